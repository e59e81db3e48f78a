//! The commutator sets `S⁰ = A ∪ [D,A] ∪ [D*,A]` and
//! `Sⁿ = [⟨D⟩², Sⁿ⁻¹] ∪ [R_D, Sⁿ⁻¹]`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::models::ModelTriple;
use crate::operator::TruncatedOperator;

/// Largest depth accepted by [`sn_generate`]; `|Sⁿ| = 3·|A|·2ⁿ`.
pub const MAX_DEPTH: usize = 3;

fn bracket(left: &TruncatedOperator, name: &str, t: &TruncatedOperator) -> TruncatedOperator {
    let m = linalg::commutator(left.matrix(), t.matrix());
    TruncatedOperator::new(m, t.basis().clone(), format!("[{name},{}]", t.label()))
        .expect("same basis")
}

/// `S⁰` when `n = 0`, else `Sⁿ`, labelled by the commutator chain.
pub fn sn_generate(model: &ModelTriple, n: usize) -> Result<Vec<TruncatedOperator>> {
    if n > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "depth {n} exceeds the limit {MAX_DEPTH}"
        )));
    }
    let d_star = crate::operator::adjoint(&model.d);
    let mut current = Vec::with_capacity(3 * model.algebra_samples.len());
    for s in &model.algebra_samples {
        current.push(s.op.clone().with_label(s.label.clone()));
    }
    for s in &model.algebra_samples {
        current.push(bracket(&model.d, "D", &s.op.clone().with_label(s.label.clone())));
    }
    for s in &model.algebra_samples {
        current.push(bracket(&d_star, "D*", &s.op.clone().with_label(s.label.clone())));
    }
    for _ in 0..n {
        let mut next = Vec::with_capacity(2 * current.len());
        for t in &current {
            next.push(bracket(&model.derived.mean_square, "<D>^2", t));
        }
        for t in &current {
            next.push(bracket(&model.derived.curvature_defect, "R_D", t));
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::models::{finite_geometry, harmonic_oscillator, hermite_multiplication, ladder, lorentz_model};

    #[test]
    fn finite_depth_zero() {
        let b = linalg::from_rows(&[vec![re(1.0), re(0.0)]]);
        let m = finite_geometry(&b).unwrap();
        let s0 = sn_generate(&m, 0).unwrap();
        assert_eq!(s0.len(), 3 * m.algebra_samples.len());
        assert_eq!(s0[0].label(), m.algebra_samples[0].label);
        assert!(s0.iter().any(|t| t.label().starts_with("[D,")));
        assert!(sn_generate(&m, 4).is_err());
    }

    #[test]
    fn self_adjoint_curvature_branch_vanishes() {
        let a = linalg::real_diagonal(&[1.0, -0.5]);
        let m = lorentz_model(&a).unwrap();
        let s1 = sn_generate(&m, 1).unwrap();
        for t in s1.iter().filter(|t| t.label().starts_with("[R_D,")) {
            assert!(linalg::max_abs(t.matrix()) < 1e-14);
        }
    }

    #[test]
    fn oscillator_laplacian_commutator() {
        // [⟨D⟩², a] = −a″ − 2a′ d/dx on the bulk block
        let n = 64;
        let m = harmonic_oscillator(n).unwrap();
        let s1 = sn_generate(&m, 1).unwrap();
        let t = s1.iter().find(|t| t.label() == "[<D>^2,gauss]").unwrap();
        let a1 = hermite_multiplication(n, |x| -2.0 * x * (-x * x).exp());
        let a2 = hermite_multiplication(n, |x| (4.0 * x * x - 2.0) * (-x * x).exp());
        let l = ladder(n);
        let expected = linalg::scale(&a2, re(-1.0)) - linalg::scale(&(&a1 * &l.d_dx), re(2.0));
        let keep = n - 8;
        let diff = linalg::leading_block(&(t.matrix() - &expected), keep);
        assert!(linalg::max_abs(&diff) < 1e-8, "{}", linalg::max_abs(&diff));
    }
}
