//! Growth-based evidence across truncation levels: pseudodifferential order,
//! compactness by singular-value decay, and boundedness of operator ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::SobolevScale;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpec {
    /// a column is bounded when `norm(N_{j+1}) / norm(N_j) ≤ 1 + tol_growth`
    pub tol_growth: f64,
    /// norms at or below this count as zero
    pub zero_floor: f64,
}

impl Default for GrowthSpec {
    fn default() -> Self {
        Self {
            tol_growth: 0.05,
            zero_floor: 1e-12,
        }
    }
}

impl GrowthSpec {
    fn ratio(&self, prev: f64, next: f64) -> f64 {
        match (prev <= self.zero_floor, next <= self.zero_floor) {
            (_, true) => 1.0,
            (true, false) => f64::INFINITY,
            _ => next / prev,
        }
    }

    fn bounded(&self, ratio: f64) -> bool {
        ratio <= 1.0 + self.tol_growth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderVerdict {
    Supported,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub level: usize,
    /// `‖δ^k((1+⟨D⟩²)^{−r/2} T)‖` for `k = 0..=k_max`
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEvidence {
    pub order: f64,
    pub k_max: usize,
    pub rows: Vec<OrderRow>,
    /// growth ratios per considered level pair (the last two), per `k`
    pub growth: Vec<Vec<f64>>,
    pub max_growth: f64,
    pub verdict: OrderVerdict,
}

/// Verdict from a norm table with one row per level.
///
/// Supported: every column bounded on the last two level pairs. Refuted:
/// some column grows on every considered pair. Otherwise inconclusive.
pub fn classify_growth(rows: &[Vec<f64>], spec: &GrowthSpec) -> (Vec<Vec<f64>>, OrderVerdict) {
    if rows.len() < 2 {
        return (Vec::new(), OrderVerdict::Inconclusive);
    }
    let start = rows.len().saturating_sub(3);
    let growth: Vec<Vec<f64>> = rows[start..]
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(&a, &b)| spec.ratio(a, b)).collect())
        .collect();
    let columns = growth[0].len();
    let all_bounded = growth.iter().flatten().all(|&g| spec.bounded(g));
    let some_grows = (0..columns).any(|k| growth.iter().all(|row| !spec.bounded(row[k])));
    let verdict = if all_bounded {
        OrderVerdict::Supported
    } else if some_grows {
        OrderVerdict::Refuted
    } else {
        OrderVerdict::Inconclusive
    };
    (growth, verdict)
}

/// `‖δ^k((1+H)^{−r/2} T)‖` for `k = 0..=k_max`, with `δ = [(1+H)^{1/2}, ·]`,
/// measured on the leading `dim − margin·(k+1)` block.
pub fn order_norms(scale: &SobolevScale, t: &CMat, order: f64, k_max: usize, margin: usize) -> Vec<f64> {
    let weighted = if order == 0.0 { t.clone() } else { scale.power(-0.5 * order) * t };
    delta_norms(&scale.power(0.5), weighted, k_max, margin)
}

/// `‖δ^k(x)‖` for `k = 0..=k_max` given the root `(1+H)^{1/2}`.
pub fn delta_norms(root: &CMat, mut x: CMat, k_max: usize, margin: usize) -> Vec<f64> {
    let n = x.nrows();
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            x = linalg::commutator(root, &x);
        }
        let keep = n.saturating_sub(margin * (k + 1)).max(1);
        out.push(linalg::op_norm(&linalg::leading_block(&x, keep)));
    }
    out
}

/// Assemble evidence from per-level norm tables (levels increasing).
pub fn order_evidence_from_rows(order: f64, k_max: usize, rows: Vec<OrderRow>, spec: &GrowthSpec) -> OrderEvidence {
    let table: Vec<Vec<f64>> = rows.iter().map(|r| r.norms.clone()).collect();
    let (growth, verdict) = classify_growth(&table, spec);
    let max_growth = growth.iter().flatten().copied().fold(0.0, f64::max);
    OrderEvidence {
        order,
        k_max,
        rows,
        growth,
        max_growth,
        verdict,
    }
}

/// One level of input to [`order_evidence`].
#[derive(Debug, Clone)]
pub struct OrderLevel {
    pub level: usize,
    pub t: CMat,
    /// `⟨D⟩²` at this level
    pub mean_square: CMat,
}

/// Order-`r` evidence for `T` against `⟨D⟩²` across levels.
pub fn order_evidence(
    input: &[OrderLevel],
    order: f64,
    k_max: usize,
    margin: usize,
    spec: &GrowthSpec,
) -> Result<OrderEvidence> {
    if input.windows(2).any(|w| w[1].level <= w[0].level) {
        return Err(Error::InvalidArgument("levels must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(input.len());
    for l in input {
        let scale = SobolevScale::from_laplacian(&l.mean_square)?;
        rows.push(OrderRow {
            level: l.level,
            norms: order_norms(&scale, &l.t, order, k_max, margin),
        });
    }
    Ok(order_evidence_from_rows(order, k_max, rows, spec))
}

/// Compactness proxy thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactnessSpec {
    /// need `σ_{⌈N/4⌉} ≤ decay · σ_1` at the top level
    pub decay: f64,
    /// number of leading singular values compared across the top two levels
    pub leading: usize,
    /// need `|σ_i(N_top) − σ_i(N_prev)| ≤ drift · σ_1(N_top)`
    pub drift: f64,
}

impl Default for CompactnessSpec {
    fn default() -> Self {
        Self {
            decay: 0.1,
            leading: 16,
            drift: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularRow {
    pub level: usize,
    pub sigma_1: f64,
    pub sigma_quarter: f64,
    pub leading: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessEvidence {
    pub rows: Vec<SingularRow>,
    /// `σ_{⌈N/4⌉} / σ_1` at the top level
    pub decay_ratio: f64,
    /// `max_i |Δσ_i| / σ_1` over the leading block, top two levels
    pub leading_drift: Option<f64>,
    /// a single fixed-dimension level: finite rank, compact outright
    pub finite_rank: bool,
    pub pass: bool,
}

pub fn singular_row(level: usize, t: &CMat, leading: usize) -> SingularRow {
    let sv = linalg::singular_values(t);
    let n = sv.len();
    let q = n.div_ceil(4).max(1) - 1;
    SingularRow {
        level,
        sigma_1: sv.first().copied().unwrap_or(0.0),
        sigma_quarter: sv.get(q).copied().unwrap_or(0.0),
        leading: sv.iter().take(leading).copied().collect(),
    }
}

/// Decay-with-stabilization test on singular-value rows (levels increasing).
pub fn compactness_from_rows(rows: Vec<SingularRow>, finite_rank: bool, spec: &CompactnessSpec) -> CompactnessEvidence {
    let top = rows.last().expect("at least one level");
    let decay_ratio = if top.sigma_1 > 0.0 {
        top.sigma_quarter / top.sigma_1
    } else {
        0.0
    };
    let leading_drift = (rows.len() >= 2).then(|| {
        let prev = &rows[rows.len() - 2];
        let m = top.leading.len().min(prev.leading.len());
        let worst = (0..m)
            .map(|i| (top.leading[i] - prev.leading[i]).abs())
            .fold(0.0, f64::max);
        if top.sigma_1 > 0.0 {
            worst / top.sigma_1
        } else {
            0.0
        }
    });
    let pass = finite_rank
        || (decay_ratio <= spec.decay && leading_drift.is_some_and(|d| d <= spec.drift));
    CompactnessEvidence {
        rows,
        decay_ratio,
        leading_drift,
        finite_rank,
        pass,
    }
}

/// Bounded-across-levels check for a family of operator norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessEvidence {
    pub name: String,
    pub levels: Vec<usize>,
    pub norms: Vec<f64>,
    pub growth: Vec<f64>,
    pub bounded: bool,
}

pub fn boundedness(name: &str, levels: &[usize], norms: Vec<f64>, spec: &GrowthSpec) -> BoundednessEvidence {
    let table: Vec<Vec<f64>> = norms.iter().map(|&x| vec![x]).collect();
    let (growth, verdict) = classify_growth(&table, spec);
    // a fixed-dimension model has nothing to grow
    let bounded = levels.len() == 1 || verdict == OrderVerdict::Supported;
    BoundednessEvidence {
        name: name.to_string(),
        levels: levels.to_vec(),
        norms: norms.clone(),
        growth: growth.into_iter().map(|g| g[0]).collect(),
        bounded: bounded && norms.iter().all(|x| x.is_finite()),
    }
}

/// Norms of `X^{−s}Y^s`, `Y^sX^{−s}`, `Y^{−s}X^s`, `X^sY^{−s}` with
/// `X = 1+⟨D⟩²` and `Y = 1+D_E²`.
pub fn ratio_norms(x: &SobolevScale, y: &SobolevScale, s: f64) -> [f64; 4] {
    ratio_norms_many(x, y, &[s])[0]
}

/// [`ratio_norms`] for several `s` from one change of basis: in the
/// eigenbases each product is `diag · W · diag` with `W = U_X* U_Y`.
pub fn ratio_norms_many(x: &SobolevScale, y: &SobolevScale, s_list: &[f64]) -> Vec<[f64; 4]> {
    let w = x.eigen().vectors.adjoint() * &y.eigen().vectors;
    let (lx, ly) = (x.one_plus_values(), y.one_plus_values());
    let scaled = |ex: f64, ey: f64| {
        let px: Vec<f64> = lx.iter().map(|l| l.powf(ex)).collect();
        let py: Vec<f64> = ly.iter().map(|l| l.powf(ey)).collect();
        linalg::op_norm(&CMat::from_fn(w.nrows(), w.ncols(), |i, j| w[(i, j)] * (px[i] * py[j])))
    };
    s_list
        .iter()
        .map(|&s| {
            // the second and fourth are adjoints of the first and third
            let a = scaled(-s, s);
            let b = scaled(s, -s);
            [a, a, b, b]
        })
        .collect()
}

pub const RATIO_NAMES: [&str; 4] = [
    "(1+<D>^2)^-s (1+D_E^2)^s",
    "(1+D_E^2)^s (1+<D>^2)^-s",
    "(1+D_E^2)^-s (1+<D>^2)^s",
    "(1+<D>^2)^s (1+D_E^2)^-s",
];

/// `‖(1+⟨D⟩²)^{−1/2} R_D (1+⟨D⟩²)^{−1/2}‖`; below 1 this makes
/// `(1+⟨D⟩²)(1+D_E²)^{−1}` bounded.
pub fn curvature_contraction(x: &SobolevScale, r: &CMat) -> f64 {
    let h = x.power(-0.5);
    linalg::op_norm(&(&h * r * &h))
}

/// `‖(1+⟨D⟩²)(1+D_E²)^{−1}‖`.
pub fn resolvent_comparison(x: &SobolevScale, y: &SobolevScale) -> f64 {
    ratio_norms(x, y, 1.0)[3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::harmonic_oscillator;

    #[test]
    fn identity_order_zero_supported() {
        let input: Vec<OrderLevel> = [8usize, 16, 32]
            .iter()
            .map(|&n| OrderLevel {
                level: n,
                t: linalg::identity(n),
                mean_square: linalg::real_diagonal(&(0..n).map(|k| k as f64).collect::<Vec<_>>()),
            })
            .collect();
        let e = order_evidence(&input, 0.0, 2, 0, &GrowthSpec::default()).unwrap();
        assert_eq!(e.verdict, OrderVerdict::Supported);
        for row in &e.rows {
            assert!((row.norms[0] - 1.0).abs() < 1e-12);
            assert!(row.norms[1] < 1e-12 && row.norms[2] < 1e-12);
        }
    }

    #[test]
    fn growth_classification() {
        let spec = GrowthSpec::default();
        let (_, v) = classify_growth(&[vec![1.0], vec![1.4], vec![2.0]], &spec);
        assert_eq!(v, OrderVerdict::Refuted);
        let (_, v) = classify_growth(&[vec![1.0], vec![1.4], vec![1.41]], &spec);
        assert_eq!(v, OrderVerdict::Inconclusive);
        let (_, v) = classify_growth(&[vec![0.0], vec![1e-13], vec![0.0]], &spec);
        assert_eq!(v, OrderVerdict::Supported);
    }

    #[test]
    fn oscillator_curvature_orders() {
        let levels = [32usize, 64, 128];
        let input: Vec<OrderLevel> = levels
            .iter()
            .map(|&n| {
                let m = harmonic_oscillator(n).unwrap();
                OrderLevel {
                    level: n,
                    t: m.derived.curvature_defect.matrix().clone(),
                    mean_square: m.derived.mean_square.matrix().clone(),
                }
            })
            .collect();
        let spec = GrowthSpec::default();
        let two = order_evidence(&input, 2.0, 2, 4, &spec).unwrap();
        assert_eq!(two.verdict, OrderVerdict::Supported, "{two:?}");
        let one = order_evidence(&input, 1.0, 2, 4, &spec).unwrap();
        assert_eq!(one.verdict, OrderVerdict::Refuted, "{one:?}");
        // norms grow like √N
        let g = one.growth.last().unwrap()[0];
        assert!(g > 1.3 && g < 1.6, "{g}");
    }

    #[test]
    fn compactness_examples() {
        let spec = CompactnessSpec::default();
        let rows: Vec<SingularRow> = [16usize, 32]
            .iter()
            .map(|&n| {
                let d: Vec<f64> = (0..n).map(|k| 1.0 / (1.0 + k as f64).powi(2)).collect();
                singular_row(n, &linalg::real_diagonal(&d), 16)
            })
            .collect();
        assert!(compactness_from_rows(rows, false, &spec).pass);
        let rows: Vec<SingularRow> = [16usize, 32]
            .iter()
            .map(|&n| singular_row(n, &linalg::identity(n), 16))
            .collect();
        let e = compactness_from_rows(rows, false, &spec);
        assert!(!e.pass);
        assert!((e.decay_ratio - 1.0).abs() < 1e-12);
        let fixed = vec![singular_row(3, &linalg::identity(3), 16)];
        assert!(compactness_from_rows(fixed, true, &spec).pass);
    }

    #[test]
    fn ratios_match_direct_products() {
        use crate::operator::{mean_square, wick_rotate, Orientation, TruncatedOperator};
        let n = 12;
        let d = CMat::from_fn(n, n, |i, j| {
            let t = (3 * i + 7 * j) as f64;
            linalg::c64::new((0.37 * t).sin(), (0.11 * t * t).cos()) * (1.0 + i as f64)
        });
        let d = TruncatedOperator::from_matrix(d, "D").unwrap();
        let x = SobolevScale::from_laplacian(mean_square(&d).matrix()).unwrap();
        let y = SobolevScale::from_dirac(wick_rotate(&d, Orientation::Plus).matrix()).unwrap();
        let many = ratio_norms_many(&x, &y, &[0.5, 1.0, 2.0]);
        for (k, s) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            let direct = [
                linalg::op_norm(&(x.power(-s) * y.power(s))),
                linalg::op_norm(&(y.power(s) * x.power(-s))),
                linalg::op_norm(&(y.power(-s) * x.power(s))),
                linalg::op_norm(&(x.power(s) * y.power(-s))),
            ];
            for (a, b) in many[k].iter().zip(direct) {
                assert!((a - b).abs() <= 1e-9 * b, "s = {s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ratios_trivial_for_self_adjoint() {
        let d = linalg::real_diagonal(&[0.0, 1.0, -2.0]);
        let x = SobolevScale::from_dirac(&d).unwrap();
        for s in [0.5, 1.0, 2.0] {
            for v in ratio_norms(&x, &x, s) {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
        assert!((resolvent_comparison(&x, &x) - 1.0).abs() < 1e-12);
    }
}
