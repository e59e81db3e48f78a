//! The oscillator `D = d/dx + x` in the Hermite basis, its Wick rotation
//! `D_E = i d/dx + x`, and their closed-form heat kernels.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, re, CMat};
use crate::operator::{BasisSpec, TruncatedOperator};
use crate::quadrature::{hermite_functions, GaussHermite};

use super::{AlgebraSample, Family, ModelTriple};

/// Rows/columns excluded at the top of a Hermite truncation when comparing
/// unbounded quantities.
pub const HERMITE_BULK_MARGIN: usize = 4;

/// Gauss–Hermite nodes per basis function for multiplication operators.
pub const QUADRATURE_FACTOR: usize = 4;

const MIN_LEVEL: usize = 8;

/// Truncated ladder and canonical operators at one level.
#[derive(Debug, Clone)]
pub struct Ladder {
    /// annihilation `a`, `a[n−1][n] = √n`
    pub a: CMat,
    pub a_dag: CMat,
    /// `x = (a + a†)/√2`
    pub x: CMat,
    /// `d/dx = (a − a†)/√2`
    pub d_dx: CMat,
}

pub fn ladder(n: usize) -> Ladder {
    let a = CMat::from_fn(n, n, |i, j| {
        if j == i + 1 {
            re((j as f64).sqrt())
        } else {
            re(0.0)
        }
    });
    let a_dag = linalg::adjoint(&a);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let x = linalg::scale(&(&a + &a_dag), re(h));
    let d_dx = linalg::scale(&(&a - &a_dag), re(h));
    Ladder { a, a_dag, x, d_dx }
}

fn hermite_table(n: usize, nodes: &[f64]) -> Mat<f64> {
    let mut phi = Mat::<f64>::zeros(n, nodes.len());
    for (k, &x) in nodes.iter().enumerate() {
        for (i, v) in hermite_functions(x, n).into_iter().enumerate() {
            phi[(i, k)] = v;
        }
    }
    phi
}

fn gram(phi: &Mat<f64>, weights: &[f64]) -> Mat<f64> {
    let left = Mat::<f64>::from_fn(phi.nrows(), phi.ncols(), |i, k| phi[(i, k)] * weights[k]);
    let g = &left * phi.transpose();
    Mat::from_fn(g.nrows(), g.ncols(), |i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
}

/// Hermite functions at Gauss–Hermite nodes, shared by several
/// multiplication matrices at one level.
struct HermiteGrid {
    gh: GaussHermite,
    phi: Mat<f64>,
}

impl HermiteGrid {
    fn new(n: usize) -> Self {
        let gh = GaussHermite::new(QUADRATURE_FACTOR * n);
        let phi = hermite_table(n, &gh.nodes);
        Self { gh, phi }
    }

    fn real<F: Fn(f64) -> f64>(&self, g: F) -> CMat {
        let w: Vec<f64> = self
            .gh
            .nodes
            .iter()
            .zip(&self.gh.scaled_weights)
            .map(|(&x, &w)| w * g(x))
            .collect();
        let m = gram(&self.phi, &w);
        CMat::from_fn(m.nrows(), m.ncols(), |i, j| re(m[(i, j)]))
    }

    fn complex<F: Fn(f64) -> c64>(&self, u: F) -> CMat {
        let vals: Vec<c64> = self.gh.nodes.iter().map(|&x| u(x)).collect();
        let w = &self.gh.scaled_weights;
        let wr: Vec<f64> = w.iter().zip(&vals).map(|(w, v)| w * v.re).collect();
        let wi: Vec<f64> = w.iter().zip(&vals).map(|(w, v)| w * v.im).collect();
        let mr = gram(&self.phi, &wr);
        let mi = gram(&self.phi, &wi);
        CMat::from_fn(mr.nrows(), mr.ncols(), |i, j| c64::new(mr[(i, j)], mi[(i, j)]))
    }
}

/// Matrix of multiplication by `g` in the first `n` Hermite functions,
/// `∫ g φ_i φ_j`, by Gauss–Hermite quadrature with `4n` nodes.
pub fn hermite_multiplication<F: Fn(f64) -> f64>(n: usize, g: F) -> CMat {
    HermiteGrid::new(n).real(g)
}

/// Complex-valued variant of [`hermite_multiplication`].
pub fn hermite_multiplication_complex<F: Fn(f64) -> c64>(n: usize, u: F) -> CMat {
    HermiteGrid::new(n).complex(u)
}

fn gauss(x: f64) -> f64 {
    (-x * x).exp()
}

fn lorentzian(x: f64) -> f64 {
    -2.0 / (1.0 + x * x)
}

/// Algebra samples of the Hermite families, in model order.
pub const HERMITE_SAMPLES: [(&str, fn(f64) -> f64); 2] = [("gauss", gauss), ("lorentzian", lorentzian)];

/// The function behind a Hermite-family sample label.
pub fn hermite_sample(label: &str) -> Option<fn(f64) -> f64> {
    HERMITE_SAMPLES.iter().find(|(l, _)| *l == label).map(|&(_, f)| f)
}

fn build(n: usize, family: Family) -> Result<ModelTriple> {
    if n < MIN_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "Hermite level must be at least {MIN_LEVEL}, got {n}"
        )));
    }
    let basis = BasisSpec::hermite(n);
    let lad = ladder(n);
    let d = TruncatedOperator::new(
        linalg::scale(&lad.a, re(std::f64::consts::SQRT_2)),
        basis.clone(),
        "D",
    )?;
    let grid = HermiteGrid::new(n);
    let gauss = grid.real(gauss);
    let lorentzian = grid.real(lorentzian);
    let samples = vec![
        AlgebraSample {
            label: "gauss".into(),
            op: TruncatedOperator::new(gauss, basis.clone(), "exp(-x^2)")?,
        },
        AlgebraSample {
            label: "lorentzian".into(),
            op: TruncatedOperator::new(lorentzian, basis, "-2/(1+x^2)")?,
        },
    ];
    Ok(ModelTriple::new(d, samples, None, None, family)?
        .with_provenance("quadrature", "gauss-hermite")
        .with_provenance("quadrature_nodes", (QUADRATURE_FACTOR * n).to_string()))
}

/// `D = d/dx + x = √2 a` truncated to the first `n` Hermite functions.
pub fn harmonic_oscillator(n: usize) -> Result<ModelTriple> {
    build(n, Family::Oscillator)
}

/// Same truncation as [`harmonic_oscillator`], tagged so that zeta and index
/// quantities use the exact kernel of `D_E = i d/dx + x`.
pub fn line_model(n: usize) -> Result<ModelTriple> {
    build(n, Family::Line)
}

fn positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// Heat kernel of `−d²/dx² + x²`.
pub fn mehler_kernel(t: f64, x: f64, y: f64) -> Result<f64> {
    positive_time(t)?;
    let s = (2.0 * t).sinh();
    let c = (2.0 * t).cosh();
    let expo = -0.5 * (c / s) * (x * x + y * y) + x * y / s;
    Ok(expo.exp() / (2.0 * PI * s).sqrt())
}

/// `Σ_{n<terms} e^{−t(2n+1)} φ_n(x) φ_n(y)`.
pub fn mehler_series(t: f64, x: f64, y: f64, terms: usize) -> f64 {
    let px = hermite_functions(x, terms);
    let py = hermite_functions(y, terms);
    px.iter()
        .zip(&py)
        .enumerate()
        .map(|(n, (a, b))| (-t * (2 * n + 1) as f64).exp() * a * b)
        .sum()
}

/// Kernel of `e^{−t D_E²}` for `D_E = i d/dx + x`.
pub fn de_heat_kernel(t: f64, x: f64, y: f64) -> Result<c64> {
    positive_time(t)?;
    let amp = (-(x - y) * (x - y) / (4.0 * t)).exp() / (2.0 * (PI * t).sqrt());
    let phase = 0.5 * (x * x - y * y);
    Ok(c64::new(amp * phase.cos(), amp * phase.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    fn bulk(a: &CMat, n: usize) -> CMat {
        linalg::leading_block(a, n - HERMITE_BULK_MARGIN)
    }

    #[test]
    fn mean_square_diagonal() {
        let m = harmonic_oscillator(8).unwrap();
        let ms = m.derived.mean_square.matrix();
        let expected = [1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 7.0];
        for i in 0..8 {
            for j in 0..8 {
                let e = if i == j { expected[i] } else { 0.0 };
                assert!((ms[(i, j)] - re(e)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn curvature_defect_ladder_form() {
        let n = 12;
        let m = harmonic_oscillator(n).unwrap();
        let lad = ladder(n);
        let expected = linalg::scale(
            &(&lad.a * &lad.a - &lad.a_dag * &lad.a_dag),
            crate::linalg::I,
        );
        assert!(linalg::max_abs(&(m.derived.curvature_defect.matrix() - &expected)) < 1e-13);
        // entry (0, 2) is i·√2
        assert!((expected[(0, 2)] - c64::new(0.0, 2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn wick_rotation_is_position_like() {
        // D_E = i d/dx + x
        let n = 16;
        let m = harmonic_oscillator(n).unwrap();
        let lad = ladder(n);
        let expected = linalg::scale(&lad.d_dx, crate::linalg::I) + &lad.x;
        assert!(linalg::max_abs(&(m.derived.wick_plus.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn commutator_ladder_on_bulk() {
        let n = 40;
        let m = harmonic_oscillator(n).unwrap();
        let lad = ladder(n);
        let ms = m.derived.mean_square.matrix();
        let rd = m.derived.curvature_defect.matrix();
        // [⟨D⟩², d/dx] = −2x
        let c1 = linalg::commutator(ms, &lad.d_dx) + linalg::scale(&lad.x, re(2.0));
        assert!(linalg::max_abs(&bulk(&c1, n)) < 1e-10);
        // [⟨D⟩², x] = −2 d/dx
        let c2 = linalg::commutator(ms, &lad.x) + linalg::scale(&lad.d_dx, re(2.0));
        assert!(linalg::max_abs(&bulk(&c2, n)) < 1e-10);
        // [R_D, x^p d^q] = 2i(p − q) x^p d^q
        for (p, q) in [(0usize, 1usize), (1, 0), (1, 1), (2, 0), (0, 2)] {
            let mut op = linalg::identity(n);
            for _ in 0..p {
                op = &op * &lad.x;
            }
            for _ in 0..q {
                op = &op * &lad.d_dx;
            }
            let lhs = linalg::commutator(rd, &op);
            let rhs = linalg::scale(&op, c64::new(0.0, 2.0 * (p as f64 - q as f64)));
            let res = linalg::leading_block(&(lhs - rhs), n - HERMITE_BULK_MARGIN - p - q);
            assert!(linalg::max_abs(&res) < 1e-10, "p={p} q={q}");
        }
    }

    #[test]
    fn multiplication_by_polynomial_is_exact() {
        let n = 10;
        let lad = ladder(n);
        let x2 = hermite_multiplication(n, |x| x * x);
        let expected = linalg::leading_block(&(&lad.x * &lad.x), n - 1);
        assert!(linalg::max_abs(&(linalg::leading_block(&x2, n - 1) - expected)) < 1e-12);
    }

    #[test]
    fn nested_levels_agree() {
        let a = hermite_multiplication(16, |x| (-x * x).exp());
        let b = hermite_multiplication(24, |x| (-x * x).exp());
        assert!(linalg::max_abs(&(a - linalg::leading_block(&b, 16))) < 1e-12);
        let da = harmonic_oscillator(16).unwrap();
        let db = harmonic_oscillator(24).unwrap();
        assert_eq!(
            linalg::max_abs(&(da.d.matrix() - linalg::leading_block(db.d.matrix(), 16))),
            0.0
        );
    }

    #[test]
    fn mehler_values() {
        let v = mehler_kernel(0.5, 0.0, 0.0).unwrap();
        assert!((v - 1.0 / (2.0 * PI * 1f64.sinh()).sqrt()).abs() < 1e-15);
        assert!((v - 0.36800).abs() < 1e-5);
        assert_eq!(mehler_kernel(0.7, 0.3, -1.1).unwrap(), mehler_kernel(0.7, -1.1, 0.3).unwrap());
        assert!(mehler_kernel(0.0, 0.0, 0.0).is_err());
        assert!((mehler_series(0.5, 0.0, 0.0, 200) - v).abs() < 1e-12);
    }

    #[test]
    fn mehler_semigroup() {
        let gh = GaussHermite::new(120);
        for &(x, y) in &[(0.0, 0.0), (0.5, -1.0), (1.5, 1.2)] {
            let lhs = gh.integrate(|z| {
                mehler_kernel(0.4, x, z).unwrap() * mehler_kernel(0.7, z, y).unwrap()
            });
            let rhs = mehler_kernel(1.1, x, y).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn de_kernel_properties() {
        for &t in &[0.1, 1.0, 3.0] {
            let d = de_heat_kernel(t, 1.7, 1.7).unwrap();
            assert!((d - re(1.0 / (2.0 * (PI * t).sqrt()))).norm() < 1e-15);
            let a = de_heat_kernel(t, 0.4, -2.0).unwrap();
            let b = de_heat_kernel(t, -2.0, 0.4).unwrap();
            assert!((a - b.conj()).norm() < 1e-16);
            // ∫|k_t(x, y)| dy = 1
            let gl = GaussLegendre::new(400);
            let mass = gl.integrate(-40.0, 40.0, |y| de_heat_kernel(t, 0.3, y).unwrap().norm());
            assert!((mass - 1.0).abs() < 1e-8, "t={t}: {mass}");
        }
        assert!(de_heat_kernel(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_small_level() {
        assert!(harmonic_oscillator(7).is_err());
    }
}
