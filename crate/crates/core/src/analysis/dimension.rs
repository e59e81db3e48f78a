//! Spectral-dimension estimates from zeta traces over an `(s, N)` grid.
//!
//! A grid point `s` counts as stabilized when the last increment
//! `Δ = T(s, N_top) − T(s, N_prev)` is small relative to `T(s, N_top)`, or
//! when the last two increments have one sign and shrink as a power of `N`
//! (exponent `ρ < 0`), so the tail sums to a finite limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::CMat;

use super::traces::SpectralEngine;

/// Default `s` grid: 0.1 to 4.0 in steps of 0.05.
pub fn default_s_grid() -> Vec<f64> {
    s_grid(0.1, 4.0, 0.05).expect("static grid")
}

/// `start, start + step, …` up to `stop` inclusive (within half a step).
pub fn s_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && step > 0.0 && stop >= start) {
        return Err(Error::InvalidArgument(format!(
            "bad s grid {start}:{stop}:{step}"
        )));
    }
    let n = ((stop - start) / step + 0.5).floor() as usize;
    // rounded to 1e-9 so that 0.1 + 18·0.05 prints as 1.0
    Ok((0..=n)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilizationSpec {
    /// relative last-increment threshold
    pub epsilon: f64,
}

impl Default for StabilizationSpec {
    fn default() -> Self {
        Self { epsilon: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionVerdict {
    /// `p̂` found inside the grid
    Estimated,
    /// fixed finite dimension: every trace is exact, dimension 0 at desk scale
    FiniteRank,
    /// from a closed-form trace rather than truncation
    Analytic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaColumn {
    pub s: f64,
    /// `T(s, N)` in level order
    pub values: Vec<f64>,
    /// `|Δ_last| / |T(s, N_top)|`
    pub relative_increment: f64,
    /// `ln(|Δ_last|/|Δ_prev|) / ln(N_top/N_prev)`; `None` with fewer than
    /// three levels or a zero increment
    pub increment_exponent: Option<f64>,
    pub stabilized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub method: String,
    pub levels: Vec<usize>,
    pub columns: Vec<ZetaColumn>,
    pub epsilon: f64,
    pub p_hat: Option<f64>,
    /// `[previous grid point, p̂]`
    pub bracket: Option<[f64; 2]>,
    /// interpolated zero of the increment exponent inside the bracket
    pub crossing: Option<f64>,
    pub verdict: DimensionVerdict,
    /// every computed trace is ≥ 0 (expected for positive observables)
    pub nonnegative: bool,
}

impl ZetaReport {
    /// Whether the bracket lies within `target ± tol`.
    pub fn brackets(&self, target: f64, tol: f64) -> bool {
        match self.bracket {
            Some([lo, hi]) => lo >= target - tol && hi <= target + tol && lo <= target + tol,
            None => false,
        }
    }

    pub fn s_grid(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.s).collect()
    }
}

fn check_grid(s_grid: &[f64]) -> Result<()> {
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty s grid".into()));
    }
    if s_grid.iter().any(|&s| !(s > 0.0)) || s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "s grid must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least three levels, got {}",
            levels.len()
        )));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be strictly increasing".into()));
    }
    Ok(())
}

fn column(s: f64, values: Vec<f64>, levels: &[usize], eps: f64) -> ZetaColumn {
    let k = values.len();
    let top = values[k - 1];
    let last = top - values[k - 2];
    let prev = values[k - 2] - values[k - 3];
    let relative_increment = if top != 0.0 {
        (last / top).abs()
    } else if last == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let increment_exponent = (last != 0.0 && prev != 0.0).then(|| {
        (last.abs() / prev.abs()).ln() / (levels[k - 1] as f64 / levels[k - 2] as f64).ln()
    });
    let shrinking = last * prev > 0.0 && increment_exponent.is_some_and(|r| r < 0.0);
    ZetaColumn {
        s,
        values,
        relative_increment,
        increment_exponent,
        stabilized: relative_increment < eps || shrinking,
    }
}

/// Build the report from a table `values[i][j] = T(s_i, N_j)`.
pub fn estimate_from_table(
    levels: &[usize],
    s_grid: &[f64],
    values: Vec<Vec<f64>>,
    spec: &StabilizationSpec,
    method: &str,
) -> Result<ZetaReport> {
    check_levels(levels)?;
    check_grid(s_grid)?;
    if values.len() != s_grid.len() || values.iter().any(|v| v.len() != levels.len()) {
        return Err(Error::DimensionMismatch {
            context: "zeta table",
            left: values.len(),
            right: s_grid.len(),
        });
    }
    let nonnegative = values.iter().flatten().all(|&v| v >= 0.0);
    let columns: Vec<ZetaColumn> = s_grid
        .iter()
        .zip(values)
        .map(|(&s, v)| column(s, v, levels, spec.epsilon))
        .collect();
    // smallest s from which every larger grid point is stabilized
    let first = columns
        .iter()
        .rposition(|c| !c.stabilized)
        .map_or(Some(0), |i| (i + 1 < columns.len()).then_some(i + 1));
    let (p_hat, bracket, crossing, verdict) = match first {
        None => (None, None, None, DimensionVerdict::Inconclusive),
        Some(i) => {
            let hi = columns[i].s;
            let lo = if i == 0 { hi } else { columns[i - 1].s };
            let crossing = (i > 0)
                .then(|| {
                    match (columns[i - 1].increment_exponent, columns[i].increment_exponent) {
                        (Some(a), Some(b)) if a >= 0.0 && b < 0.0 => {
                            Some(lo + (hi - lo) * a / (a - b))
                        }
                        _ => None,
                    }
                })
                .flatten();
            (Some(hi), Some([lo, hi]), crossing, DimensionVerdict::Estimated)
        }
    };
    Ok(ZetaReport {
        method: method.to_string(),
        levels: levels.to_vec(),
        columns,
        epsilon: spec.epsilon,
        p_hat,
        bracket,
        crossing,
        verdict,
        nonnegative,
    })
}

/// Report for a fixed finite-dimensional model: traces are exact and finite
/// for every `s`, so `p̂` is the smallest grid point.
pub fn finite_rank_report(
    level: usize,
    s_grid: &[f64],
    values: Vec<f64>,
    method: &str,
) -> Result<ZetaReport> {
    check_grid(s_grid)?;
    let nonnegative = values.iter().all(|&v| v >= 0.0);
    let columns = s_grid
        .iter()
        .zip(values)
        .map(|(&s, v)| ZetaColumn {
            s,
            values: vec![v],
            relative_increment: 0.0,
            increment_exponent: None,
            stabilized: true,
        })
        .collect();
    let s0 = s_grid[0];
    Ok(ZetaReport {
        method: method.to_string(),
        levels: vec![level],
        columns,
        epsilon: 0.0,
        p_hat: Some(s0),
        bracket: Some([s0, s0]),
        crossing: None,
        verdict: DimensionVerdict::FiniteRank,
        nonnegative,
    })
}

/// Report from a closed-form trace `T(s)`: `s` is admissible when `T(s)` is
/// finite and positive, `p̂` the smallest admissible grid point above every
/// inadmissible one.
pub fn analytic_report<F: Fn(f64) -> f64>(s_grid: &[f64], trace: F, method: &str) -> Result<ZetaReport> {
    check_grid(s_grid)?;
    let columns: Vec<ZetaColumn> = s_grid
        .iter()
        .map(|&s| {
            let v = trace(s);
            ZetaColumn {
                s,
                values: vec![v],
                relative_increment: 0.0,
                increment_exponent: None,
                stabilized: v.is_finite() && v > 0.0,
            }
        })
        .collect();
    let first = columns
        .iter()
        .rposition(|c| !c.stabilized)
        .map_or(Some(0), |i| (i + 1 < columns.len()).then_some(i + 1));
    let (p_hat, bracket, verdict) = match first {
        None => (None, None, DimensionVerdict::Inconclusive),
        Some(i) => {
            let hi = columns[i].s;
            let lo = if i == 0 { hi } else { columns[i - 1].s };
            (Some(hi), Some([lo, hi]), DimensionVerdict::Analytic)
        }
    };
    let nonnegative = columns
        .iter()
        .filter(|c| c.stabilized)
        .all(|c| c.values[0] >= 0.0);
    Ok(ZetaReport {
        method: method.to_string(),
        levels: Vec::new(),
        columns,
        epsilon: 0.0,
        p_hat,
        bracket,
        crossing: None,
        verdict,
        nonnegative,
    })
}

/// Estimate from engines already built at each level; `observable` indexes
/// the engine's observable list.
pub fn estimate_with_engines(
    engines: &[(usize, &SpectralEngine)],
    observable: usize,
    s_grid: &[f64],
    spec: &StabilizationSpec,
    method: &str,
    exec: Exec,
) -> Result<ZetaReport> {
    check_grid(s_grid)?;
    if engines.len() == 1 {
        let (level, e) = engines[0];
        let values = exec.map(s_grid, |&s| e.zeta(observable, s));
        return finite_rank_report(level, s_grid, values, method);
    }
    let levels: Vec<usize> = engines.iter().map(|(n, _)| *n).collect();
    let values = exec.map(s_grid, |&s| {
        engines.iter().map(|(_, e)| e.zeta(observable, s)).collect()
    });
    estimate_from_table(&levels, s_grid, values, spec, method)
}

/// One level of input: observable `a` and positive `H` at truncation `level`.
#[derive(Debug, Clone)]
pub struct TraceLevel {
    pub level: usize,
    pub a: CMat,
    pub h: CMat,
}

/// `p̂` from `Tr(a (1+H)^{−s/2})` over the supplied levels.
pub fn spectral_dimension_estimate(
    input: &[TraceLevel],
    s_grid: &[f64],
    spec: &StabilizationSpec,
    exec: Exec,
) -> Result<ZetaReport> {
    check_levels(&input.iter().map(|l| l.level).collect::<Vec<_>>())?;
    let engines = exec
        .map(input, |l| SpectralEngine::from_laplacian(&l.h, &[&l.a]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<(usize, &SpectralEngine)> =
        input.iter().zip(&engines).map(|(l, e)| (l.level, e)).collect();
    estimate_with_engines(&refs, 0, s_grid, spec, "laplacian", exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_law(levels: &[usize], s_grid: &[f64], p: f64) -> Vec<Vec<f64>> {
        // partial sums of Σ k^{−s/p}
        s_grid
            .iter()
            .map(|&s| {
                levels
                    .iter()
                    .map(|&n| (1..=n).map(|k| (k as f64).powf(-s / p)).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn grid_construction() {
        let g = default_s_grid();
        assert_eq!(g.len(), 79);
        assert_eq!(g[18], 1.0);
        assert_eq!(*g.last().unwrap(), 4.0);
        assert!(s_grid(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn power_law_series_located() {
        let levels = [128, 256, 512, 1024];
        let grid = s_grid(0.5, 3.0, 0.05).unwrap();
        for &p in &[1.0, 2.0] {
            let r = estimate_from_table(
                &levels,
                &grid,
                power_law(&levels, &grid, p),
                &StabilizationSpec::default(),
                "test",
            )
            .unwrap();
            assert_eq!(r.verdict, DimensionVerdict::Estimated);
            assert!(r.brackets(p, 0.1), "p = {p}: {:?}", r.bracket);
            assert!(r.nonnegative);
        }
    }

    #[test]
    fn never_stabilizing_is_inconclusive() {
        let levels = [2, 4, 8];
        let grid = [1.0, 2.0];
        let values = vec![vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 4.0]];
        let r = estimate_from_table(&levels, &grid, values, &StabilizationSpec::default(), "t").unwrap();
        assert_eq!(r.verdict, DimensionVerdict::Inconclusive);
        assert!(r.p_hat.is_none());
    }

    #[test]
    fn finite_rank_and_identity_example() {
        let id = crate::linalg::identity(1);
        let h = crate::linalg::real_diagonal(&[0.0]);
        let e = SpectralEngine::from_laplacian(&h, &[&id]).unwrap();
        let grid = [0.1, 0.5, 2.0];
        let r = estimate_with_engines(&[(1, &e)], 0, &grid, &StabilizationSpec::default(), "t", Exec::Sequential)
            .unwrap();
        assert_eq!(r.verdict, DimensionVerdict::FiniteRank);
        assert_eq!(r.p_hat, Some(0.1));
        assert!(r.columns.iter().all(|c| c.values[0] == 1.0));
    }

    #[test]
    fn analytic_pole_located() {
        let grid = s_grid(0.5, 2.0, 0.05).unwrap();
        let r = analytic_report(&grid, |s| super::super::traces::line_zeta_analytic(s, 1.0), "line").unwrap();
        assert_eq!(r.verdict, DimensionVerdict::Analytic);
        let [lo, hi] = r.bracket.unwrap();
        assert!(lo <= 1.0 && hi > 1.0 && hi <= 1.05 + 1e-12);
    }

    #[test]
    fn rejects_bad_levels() {
        let r = estimate_from_table(&[4, 2, 8], &[1.0], vec![vec![1.0; 3]], &StabilizationSpec::default(), "t");
        assert!(r.is_err());
        let r = estimate_from_table(&[2, 4], &[1.0], vec![vec![1.0; 2]], &StabilizationSpec::default(), "t");
        assert!(r.is_err());
    }
}
