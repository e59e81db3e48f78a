use crate::error::{Error, Result};
use crate::linalg::{self, re, CMat, I};
use crate::operator::{BasisSpec, FundamentalSymmetry, SymmetryConvention, TruncatedOperator};

use super::{AlgebraSample, Family, ModelTriple};

/// Even Lorentz-type model with `R_D = 0`: `D = σ₂ ⊗ A` for Hermitian `A`,
/// `Γ = σ₃ ⊗ 1`, `β = iσ₁ ⊗ 1`, algebra spanned by `1 ⊗ E_jj`.
pub fn lorentz_model(a: &CMat) -> Result<ModelTriple> {
    let a = linalg::symmetrize_checked(a)?;
    let k = a.nrows();
    if k == 0 {
        return Err(Error::InvalidArgument("A must be non-empty".into()));
    }
    let o = re(0.0);
    let l = re(1.0);
    let sy = linalg::from_rows(&[vec![o, -I], vec![I, o]]);
    let sz = linalg::from_rows(&[vec![l, o], vec![o, -l]]);
    let i_sx = linalg::from_rows(&[vec![o, I], vec![I, o]]);
    let id2 = linalg::identity(2);
    let idk = linalg::identity(k);
    let n = 2 * k;
    let basis = BasisSpec::abstract_space(n);
    let d = TruncatedOperator::new(linalg::kron(&sy, &a), basis.clone(), "D")?;
    let grading = TruncatedOperator::new(linalg::kron(&sz, &idk), basis.clone(), "Gamma")?;
    let beta = FundamentalSymmetry::new(
        linalg::kron(&i_sx, &idk),
        SymmetryConvention::AntiSelfAdjoint,
    )?;
    let mut samples = Vec::with_capacity(k);
    for j in 0..k {
        let e: Vec<f64> = (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        let label = format!("e{j}");
        samples.push(AlgebraSample {
            op: TruncatedOperator::new(
                linalg::kron(&id2, &linalg::real_diagonal(&e)),
                basis.clone(),
                label.clone(),
            )?,
            label,
        });
    }
    Ok(
        ModelTriple::new(d, samples, Some(grading), Some(beta), Family::Lorentz)?
            .with_provenance("fiber", k.to_string()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn self_adjoint_and_flat() {
        let a = linalg::from_rows(&[
            vec![re(1.0), c64::new(0.5, -0.25)],
            vec![c64::new(0.5, 0.25), re(-2.0)],
        ]);
        let m = lorentz_model(&a).unwrap();
        assert_eq!(linalg::hermitian_residual(m.d.matrix()), 0.0);
        assert!(linalg::max_abs(m.derived.curvature_defect.matrix()) <= 1e-15);
        let b = m.beta.as_ref().unwrap().matrix();
        let bdb = b * m.d.matrix() * b;
        // D* = βDβ
        assert!(linalg::max_abs(&(bdb - m.d.matrix().adjoint())) <= 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = linalg::from_rows(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]);
        assert!(lorentz_model(&a).is_err());
    }
}
