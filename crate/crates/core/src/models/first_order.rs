//! Constant-coefficient first-order operators `D = Σ_j M_j ∂_j + K` on a
//! periodic grid, and the matrix conditions under which they define
//! (smoothly summable) pseudo-Riemannian triples.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, re, CMat};
use crate::operator::{BasisSpec, TruncatedOperator};

use super::{AlgebraSample, Family, ModelTriple};

/// Largest total dimension `grid^n · d` accepted.
pub const MAX_GRID_DIM: usize = 1 << 22;

pub const CONDITION_SEED: u64 = 0x0F1_257;
const INVERTIBLE_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FirstOrderSpec {
    pub spatial_dim: usize,
    pub fiber_dim: usize,
    pub m: Vec<CMat>,
    pub k: CMat,
    pub half_period: f64,
    pub grid: usize,
}

impl FirstOrderSpec {
    pub fn new(m: Vec<CMat>, k: CMat, half_period: f64, grid: usize) -> Result<Self> {
        let spec = Self {
            spatial_dim: m.len(),
            fiber_dim: k.nrows(),
            m,
            k,
            half_period,
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.spatial_dim == 0 || self.m.len() != self.spatial_dim {
            return Err(Error::InvalidArgument(
                "need one coefficient matrix per spatial direction".into(),
            ));
        }
        let d = self.fiber_dim;
        if d == 0 {
            return Err(Error::InvalidArgument("fiber dimension must be positive".into()));
        }
        for mat in self.m.iter().chain(std::iter::once(&self.k)) {
            if mat.nrows() != d || mat.ncols() != d {
                return Err(Error::DimensionMismatch {
                    context: "coefficient matrices must be d x d",
                    left: mat.nrows().max(mat.ncols()),
                    right: d,
                });
            }
        }
        if self.grid < 2 || !self.grid.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid points per axis must be a power of two >= 2, got {}",
                self.grid
            )));
        }
        if !(self.half_period > 0.0) || !self.half_period.is_finite() {
            return Err(Error::InvalidArgument("half period must be positive".into()));
        }
        Ok(())
    }

    pub fn with_grid(&self, grid: usize) -> Result<Self> {
        let mut s = self.clone();
        s.grid = grid;
        s.validate()?;
        Ok(s)
    }

    /// `Σ_{j,k} (M_j* M_k + M_j M_k*) ξ_j ξ_k`.
    pub fn symbol(&self, xi: &[f64]) -> CMat {
        let d = self.fiber_dim;
        let mut s = linalg::zeros(d, d);
        for (j, mj) in self.m.iter().enumerate() {
            for (k, mk) in self.m.iter().enumerate() {
                let c = xi[j] * xi[k];
                if c != 0.0 {
                    s += linalg::scale(&(mj.adjoint() * mk + mj * mk.adjoint()), re(c));
                }
            }
        }
        s
    }

    /// `Σ_j ({M_j, K} + {M_j*, K*}) ξ_j`.
    pub fn mass_symbol(&self, xi: &[f64]) -> CMat {
        let d = self.fiber_dim;
        let ka = linalg::adjoint(&self.k);
        let mut s = linalg::zeros(d, d);
        for (j, mj) in self.m.iter().enumerate() {
            if xi[j] != 0.0 {
                let t = linalg::anticommutator(mj, &self.k)
                    + linalg::anticommutator(&linalg::adjoint(mj), &ka);
                s += linalg::scale(&t, re(xi[j]));
            }
        }
        s
    }

    /// `M_k M_l* + M_k* M_l`, symmetrized in `(k, l)`: only this part
    /// survives contraction with `∂_k ∂_l` in the symbol of `⟨D⟩²`.
    pub fn quadratic(&self, k: usize, l: usize) -> CMat {
        let q = |a: usize, b: usize| &self.m[a] * self.m[b].adjoint() + self.m[a].adjoint() * &self.m[b];
        if k == l {
            q(k, k)
        } else {
            q(k, l) + q(l, k)
        }
    }

    fn coefficient_scale(&self) -> f64 {
        self.m
            .iter()
            .chain(std::iter::once(&self.k))
            .map(linalg::max_abs)
            .fold(1.0, f64::max)
    }
}

/// Spectral derivative on `P` equispaced points of `[−L, L)`; the Nyquist
/// mode is dropped so the matrix is real and exactly antisymmetric.
fn derivative_matrix(p: usize, half_period: f64) -> CMat {
    let scale = PI / (2.0 * half_period);
    let entry = |r: usize| -> f64 {
        // r = (j − k) mod p, r ≠ 0
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        sign * scale / (PI * r as f64 / p as f64).tan()
    };
    CMat::from_fn(p, p, |j, k| {
        if j == k {
            re(0.0)
        } else if j > k {
            re(entry(j - k))
        } else {
            re(-entry(k - j))
        }
    })
}

fn axis_operator(op: &CMat, axis: usize, n: usize, p: usize) -> CMat {
    let before = linalg::identity(p.pow(axis as u32));
    let after = linalg::identity(p.pow((n - axis - 1) as u32));
    linalg::kron(&linalg::kron(&before, op), &after)
}

fn bump(r2: f64, radius: f64) -> f64 {
    let q = r2 / (radius * radius);
    if q >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - q)).exp()
    }
}

/// Fourier modes of a `p`-point grid in DFT order; for even `p` the
/// Nyquist mode appears as `−p/2`.
fn modes(p: usize) -> Vec<i64> {
    (0..p as i64).map(|j| if 2 * j < p as i64 { j } else { j - p as i64 }).collect()
}

fn is_nyquist(p: usize, k: i64) -> bool {
    p % 2 == 0 && k == -(p as i64) / 2
}

/// Galerkin compression `P f P` of multiplication by `f` onto the Fourier
/// modes the derivative resolves (Nyquist dropped), written in the grid
/// basis. Unlike pointwise multiplication on the grid, its commutator with
/// the spectral derivative is `P [∂, f] P`, bounded uniformly in `p`.
pub fn galerkin_multiplication(f: &dyn Fn(&[f64]) -> f64, n: usize, p: usize, half_period: f64) -> CMat {
    let l = half_period;
    let q = 4 * p.max(16);
    let fine: Vec<f64> = (0..q).map(|j| -l + 2.0 * l * j as f64 / q as f64).collect();
    // coefficients â(m), m ∈ (−p, p) per axis, by the trapezoid rule on a fine grid
    let nf = 2 * p - 1;
    let mut shape = vec![q; n];
    let mut data: Vec<c64> = (0..q.pow(n as u32))
        .map(|mut idx| {
            let mut x = vec![0.0; n];
            for a in (0..n).rev() {
                x[a] = fine[idx % q];
                idx /= q;
            }
            re(f(&x))
        })
        .collect();
    let twiddle: Vec<Vec<c64>> = (0..nf)
        .map(|fi| {
            let m = fi as f64 - (p as f64 - 1.0);
            fine.iter().map(|&x| c64::cis(-PI * m * x / l) / q as f64).collect()
        })
        .collect();
    for axis in 0..n {
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let mut out = vec![c64::new(0.0, 0.0); outer * nf * inner];
        for o in 0..outer {
            for (fi, tw) in twiddle.iter().enumerate() {
                for i in 0..inner {
                    let mut acc = c64::new(0.0, 0.0);
                    for (j, w) in tw.iter().enumerate() {
                        acc += w * data[(o * q + j) * inner + i];
                    }
                    out[(o * nf + fi) * inner + i] = acc;
                }
            }
        }
        data = out;
        shape[axis] = nf;
    }
    let ks = modes(p);
    let points = p.pow(n as u32);
    let split = |mut g: usize| -> Vec<i64> {
        let mut k = vec![0; n];
        for a in (0..n).rev() {
            k[a] = ks[g % p];
            g /= p;
        }
        k
    };
    let multi: Vec<Vec<i64>> = (0..points).map(split).collect();
    let t = CMat::from_fn(points, points, |r, c| {
        let (kr, kc) = (&multi[r], &multi[c]);
        if kr.iter().chain(kc.iter()).any(|&k| is_nyquist(p, k)) {
            return re(0.0);
        }
        let flat = kr
            .iter()
            .zip(kc)
            .fold(0usize, |acc, (a, b)| acc * nf + (a - b + p as i64 - 1) as usize);
        data[flat]
    });
    let h = 2.0 * l / p as f64;
    let norm = (p as f64).sqrt();
    let f1 = CMat::from_fn(p, p, |r, c| c64::cis(-PI * ks[r] as f64 * (-l + c as f64 * h) / l) / norm);
    let mut u = f1.clone();
    for _ in 1..n {
        u = linalg::kron(&u, &f1);
    }
    let a = u.adjoint() * t * &u;
    // exactly Hermitian for real f
    linalg::scale(&(&a + a.adjoint()), re(0.5))
}

/// Assemble `D = Σ_j ∂_j ⊗ M_j + 1 ⊗ K` with basis index `grid·d + fiber`.
pub fn first_order_model(spec: &FirstOrderSpec) -> Result<ModelTriple> {
    spec.validate()?;
    let (n, d, p) = (spec.spatial_dim, spec.fiber_dim, spec.grid);
    let points = p
        .checked_pow(n as u32)
        .filter(|g| g.checked_mul(d).is_some_and(|t| t <= MAX_GRID_DIM))
        .ok_or(Error::TooLarge {
            dim: p.saturating_pow(n as u32).saturating_mul(d),
            limit: MAX_GRID_DIM,
        })?;
    let basis = BasisSpec::fourier_grid(spec.half_period, p, n, d)?;
    let deriv = derivative_matrix(p, spec.half_period);
    let mut dm = linalg::kron(&linalg::identity(points), &spec.k);
    for (axis, mj) in spec.m.iter().enumerate() {
        dm += linalg::kron(&axis_operator(&deriv, axis, n, p), mj);
    }
    let radius = 0.9 * spec.half_period;
    let fiber = linalg::identity(d);
    let sample = |label: &str, f: &dyn Fn(f64) -> f64| -> Result<AlgebraSample> {
        let a = galerkin_multiplication(&|x: &[f64]| f(x.iter().map(|v| v * v).sum()), n, p, spec.half_period);
        Ok(AlgebraSample {
            label: label.into(),
            op: TruncatedOperator::new(linalg::kron(&a, &fiber), basis.clone(), label)?,
        })
    };
    let samples = vec![
        sample("bump", &|r2| bump(r2, radius))?,
        sample("gauss", &|r2| (-r2).exp())?,
    ];
    let d_op = TruncatedOperator::new(dm, basis.clone(), "D")?;
    Ok(ModelTriple::new(d_op, samples, None, None, Family::FirstOrder)?
        .with_provenance("derivative", "fourier-spectral, nyquist mode dropped")
        .with_provenance("bump_radius", format!("{radius}")))
}

/// A point at which a condition was evaluated: a covector `ξ` or an index
/// tuple `(j, k[, l])`, and the measured value there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub pass: bool,
    /// smallest singular value for invertibility, largest residual otherwise
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub symbol_invertible: ConditionCheck,
    pub anticommutators: ConditionCheck,
    pub symbol_commutes: ConditionCheck,
    pub smooth_coefficients: ConditionCheck,
    pub smooth_mass: ConditionCheck,
    pub admissible: bool,
    pub smoothly_summable: bool,
    pub xi_samples: usize,
    pub seed: u64,
}

impl ConditionReport {
    pub fn checks(&self) -> [&ConditionCheck; 5] {
        [
            &self.symbol_invertible,
            &self.anticommutators,
            &self.symbol_commutes,
            &self.smooth_coefficients,
            &self.smooth_mass,
        ]
    }

    /// First failing condition, if any.
    pub fn first_violation(&self) -> Option<&ConditionCheck> {
        self.checks().into_iter().find(|c| !c.pass)
    }
}

fn unit_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|k| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                out.push(v.into_iter().map(|x| x / norm).collect());
                break;
            }
        }
    }
    out
}

/// `σ_min` of the principal symbol at `ξ`.
pub fn symbol_min_singular(spec: &FirstOrderSpec, xi: &[f64]) -> f64 {
    linalg::singular_values(&spec.symbol(xi))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Residual of the third admissibility display at `ξ`.
pub fn symbol_commutator_residual(spec: &FirstOrderSpec, xi: &[f64]) -> f64 {
    linalg::max_abs(&linalg::commutator(&spec.symbol(xi), &spec.mass_symbol(xi)))
}

/// Evaluate the three admissibility displays and the two smooth-summability
/// commutators on the frame and `xi_samples` random unit covectors.
pub fn check_first_order_conditions(spec: &FirstOrderSpec, xi_samples: usize) -> ConditionReport {
    check_first_order_conditions_seeded(spec, xi_samples, CONDITION_SEED)
}

pub fn check_first_order_conditions_seeded(
    spec: &FirstOrderSpec,
    xi_samples: usize,
    seed: u64,
) -> ConditionReport {
    let n = spec.m.len();
    let xis = unit_samples(n, xi_samples, seed);
    let scale = spec.coefficient_scale();
    let tol2 = IDENTITY_TOL * scale * scale;
    let tol3 = IDENTITY_TOL * scale.powi(4);

    let mut worst_inv = (f64::INFINITY, 0usize);
    let mut worst_comm = (f64::NEG_INFINITY, 0usize);
    for (i, xi) in xis.iter().enumerate() {
        let smin = symbol_min_singular(spec, xi);
        if smin < worst_inv.0 {
            worst_inv = (smin, i);
        }
        let r = symbol_commutator_residual(spec, xi);
        if r > worst_comm.0 {
            worst_comm = (r, i);
        }
    }

    let mut worst_anti = (0.0f64, vec![0usize, 0]);
    for j in 0..n {
        for k in j..n {
            let lhs = linalg::anticommutator(&spec.m[j], &spec.m[k]);
            let rhs = linalg::anticommutator(&linalg::adjoint(&spec.m[j]), &linalg::adjoint(&spec.m[k]));
            let r = linalg::max_abs(&(lhs - rhs));
            if r > worst_anti.0 {
                worst_anti = (r, vec![j, k]);
            }
        }
    }

    let mut worst_m = (0.0f64, vec![0usize, 0, 0]);
    let mut worst_k = (0.0f64, vec![0usize, 0]);
    for k in 0..n {
        for l in 0..n {
            let q = spec.quadratic(k, l);
            for j in 0..n {
                let r = linalg::max_abs(&linalg::commutator(&spec.m[j], &q));
                if r > worst_m.0 {
                    worst_m = (r, vec![j, k, l]);
                }
            }
            let r = linalg::max_abs(&linalg::commutator(&spec.k, &q));
            if r > worst_k.0 {
                worst_k = (r, vec![k, l]);
            }
        }
    }

    let xi_witness = |(v, i): (f64, usize)| Witness {
        xi: Some(xis[i].clone()),
        indices: None,
        value: v,
    };
    let idx_witness = |(v, idx): (f64, Vec<usize>)| Witness {
        xi: None,
        indices: Some(idx),
        value: v,
    };
    let symbol_invertible = ConditionCheck {
        name: "principal symbol invertible".into(),
        pass: worst_inv.0 > INVERTIBLE_TOL,
        witness: xi_witness(worst_inv),
    };
    let anticommutators = ConditionCheck {
        name: "{M_j,M_k} = {M_j*,M_k*}".into(),
        pass: worst_anti.0 <= tol2,
        witness: idx_witness(worst_anti),
    };
    let symbol_commutes = ConditionCheck {
        name: "symbol commutes with mass term".into(),
        pass: worst_comm.0 <= tol3,
        witness: xi_witness(worst_comm),
    };
    let smooth_coefficients = ConditionCheck {
        name: "[M_j, M_k M_l* + M_k* M_l] = 0".into(),
        pass: worst_m.0 <= tol3,
        witness: idx_witness(worst_m),
    };
    let smooth_mass = ConditionCheck {
        name: "[K, M_k M_l* + M_k* M_l] = 0".into(),
        pass: worst_k.0 <= tol3,
        witness: idx_witness(worst_k),
    };
    let admissible = symbol_invertible.pass && anticommutators.pass && symbol_commutes.pass;
    ConditionReport {
        smoothly_summable: admissible && smooth_coefficients.pass && smooth_mass.pass,
        admissible,
        symbol_invertible,
        anticommutators,
        symbol_commutes,
        smooth_coefficients,
        smooth_mass,
        xi_samples,
        seed,
    }
}
