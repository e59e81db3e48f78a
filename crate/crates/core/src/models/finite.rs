use crate::error::{Error, Result};
use crate::linalg::{self, re, CMat};
use crate::operator::{BasisSpec, TruncatedOperator};

use super::{AlgebraSample, Family, ModelTriple};

/// `D = [[0, 0], [B, 0]]` on `ℂ^{d₁} ⊕ ℂ^{d₂}` for `B: ℂ^{d₁} → ℂ^{d₂}`,
/// graded by `Γ = diag(1_{d₁}, −1_{d₂})`.
pub fn finite_geometry(b: &CMat) -> Result<ModelTriple> {
    let (d2, d1) = (b.nrows(), b.ncols());
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidArgument("B must have positive size".into()));
    }
    let n = d1 + d2;
    let basis = BasisSpec::abstract_space(n);
    let d = CMat::from_fn(n, n, |i, j| {
        if i >= d1 && j < d1 {
            b[(i - d1, j)]
        } else {
            re(0.0)
        }
    });
    let signs: Vec<f64> = (0..n).map(|i| if i < d1 { 1.0 } else { -1.0 }).collect();
    let p1: Vec<f64> = (0..n).map(|i| if i < d1 { 1.0 } else { 0.0 }).collect();
    let p2: Vec<f64> = p1.iter().map(|x| 1.0 - x).collect();
    let grading = TruncatedOperator::new(linalg::real_diagonal(&signs), basis.clone(), "Gamma")?;
    let samples = vec![
        AlgebraSample {
            label: "p1".into(),
            op: TruncatedOperator::new(linalg::real_diagonal(&p1), basis.clone(), "p1")?,
        },
        AlgebraSample {
            label: "p2".into(),
            op: TruncatedOperator::new(linalg::real_diagonal(&p2), basis.clone(), "p2")?,
        },
    ];
    let d = TruncatedOperator::new(d, basis, "D")?;
    Ok(
        ModelTriple::new(d, samples, Some(grading), None, Family::Finite)?
            .with_provenance("d1", d1.to_string())
            .with_provenance("d2", d2.to_string()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, from_rows, I};

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        linalg::max_abs(&(a - b)) <= tol
    }

    #[test]
    fn scalar_b_wick_rotation() {
        let m = finite_geometry(&from_rows(&[vec![re(1.0)]])).unwrap();
        let phase = c64::new(0.5, 0.5); // e^{iπ/4}/√2
        let expected = linalg::scale(
            &from_rows(&[vec![re(0.0), -I], vec![re(1.0), re(0.0)]]),
            phase,
        );
        let de = m.derived.wick_plus.matrix();
        assert!(close(de, &expected, 1e-15));
        assert!(close(&(de * de), &linalg::scale(&linalg::identity(2), re(0.5)), 1e-15));
    }

    #[test]
    fn nilpotent_structure() {
        let b = from_rows(&[
            vec![c64::new(1.0, 2.0), re(-0.5), c64::new(0.0, 1.0)],
            vec![re(3.0), c64::new(0.25, -1.0), re(0.0)],
        ]);
        let m = finite_geometry(&b).unwrap();
        let dm = m.d.matrix();
        assert_eq!(linalg::max_abs(&(dm * dm)), 0.0);
        assert_eq!(linalg::max_abs(m.derived.curvature_defect.matrix()), 0.0);
        // D_E² = ½ diag(B†B, BB†)
        let de = m.derived.wick_plus.matrix();
        let sq = de * de;
        let btb = linalg::scale(&(b.adjoint() * &b), re(0.5));
        let bbt = linalg::scale(&(&b * b.adjoint()), re(0.5));
        let expected = CMat::from_fn(5, 5, |i, j| match (i < 3, j < 3) {
            (true, true) => btb[(i, j)],
            (false, false) => bbt[(i - 3, j - 3)],
            _ => re(0.0),
        });
        assert!(linalg::max_abs(&(sq - expected)) <= 1e-13 * 10.0);
    }

    #[test]
    fn zero_b() {
        let m = finite_geometry(&from_rows(&[vec![re(0.0)]])).unwrap();
        assert_eq!(linalg::max_abs(m.derived.wick_plus.matrix()), 0.0);
        assert!(m.is_even());
    }
}
