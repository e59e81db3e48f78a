//! The weights `φ_s` and the norms `Q_n`, `P_n` built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::{SobolevScale, TruncatedOperator};

/// Relative tolerance for accepting `T = T₁T₂`.
pub const FACTORIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightValue {
    pub s: f64,
    pub value: f64,
    pub level: usize,
}

/// `φ_s(T) = Tr((1+D²)^{−s/4} T (1+D²)^{−s/4}) = Σ_k ⟨u_k, T u_k⟩ (1+λ_k²)^{−s/2}`.
pub fn phi_with(scale: &SobolevScale, t: &CMat, s: f64) -> f64 {
    let w = scale.eigen().spectral_weights(t);
    w.iter()
        .zip(scale.one_plus_values())
        .map(|(wk, &l)| wk.re * l.powf(-0.5 * s))
        .sum()
}

pub fn phi_weight(t: &TruncatedOperator, d: &TruncatedOperator, s: f64) -> Result<WeightValue> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
    }
    let scale = SobolevScale::from_dirac(d.matrix())?;
    Ok(WeightValue {
        s,
        value: phi_with(&scale, t.matrix(), s),
        level: t.dim(),
    })
}

/// `Q_n(T) = (‖T‖² + φ_{p+1/n}(T†T) + φ_{p+1/n}(TT†))^{1/2}`.
pub fn qn_with(scale: &SobolevScale, t: &CMat, p: f64, n: u32) -> f64 {
    let s = p + 1.0 / n as f64;
    let norm = linalg::op_norm(t);
    let tt = t.adjoint() * t;
    let ttd = t * t.adjoint();
    let sum = norm * norm + phi_with(scale, &tt, s) + phi_with(scale, &ttd, s);
    sum.max(0.0).sqrt()
}

pub fn qn_norm(t: &TruncatedOperator, d: &TruncatedOperator, p: f64, n: u32) -> Result<f64> {
    if p < 1.0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need p >= 1 and n >= 1, got p = {p}, n = {n}"
        )));
    }
    let scale = SobolevScale::from_dirac(d.matrix())?;
    Ok(qn_with(&scale, t.matrix(), p, n))
}

/// An upper bound on the `P_n` norm; the infimum over all factorizations
/// is never computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P1Bound {
    pub upper_bound: f64,
    /// `Q_n(T₁)·Q_n(T₂)` for each supplied factorization, in order
    pub candidates: Vec<f64>,
    pub label: String,
}

/// `min_i Q_n(T₁ⁱ)·Q_n(T₂ⁱ)` over supplied factorizations `T = T₁ⁱ T₂ⁱ`.
pub fn p1_upper_bound(
    t: &CMat,
    factorizations: &[(&CMat, &CMat)],
    d: &TruncatedOperator,
    p: f64,
    n: u32,
) -> Result<P1Bound> {
    if factorizations.is_empty() {
        return Err(Error::InvalidArgument("need at least one factorization".into()));
    }
    if p < 1.0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need p >= 1 and n >= 1, got p = {p}, n = {n}"
        )));
    }
    let scale = SobolevScale::from_dirac(d.matrix())?;
    let tol = FACTORIZATION_TOL * linalg::max_abs(t).max(1.0);
    let mut candidates = Vec::with_capacity(factorizations.len());
    for (t1, t2) in factorizations {
        let prod = *t1 * *t2;
        if prod.nrows() != t.nrows() || prod.ncols() != t.ncols() {
            return Err(Error::DimensionMismatch {
                context: "factorization product",
                left: prod.nrows(),
                right: t.nrows(),
            });
        }
        let mismatch = linalg::max_abs(&(prod - t));
        if mismatch > tol {
            return Err(Error::FactorizationMismatch(mismatch));
        }
        candidates.push(qn_with(&scale, t1, p, n) * qn_with(&scale, t2, p, n));
    }
    Ok(P1Bound {
        upper_bound: candidates.iter().copied().fold(f64::INFINITY, f64::min),
        candidates,
        label: "upper bound".into(),
    })
}
