//! Truncated operators and the algebra derived from a non-self-adjoint `D`:
//! adjoints, `⟨D⟩²`, `R_D`, the two Wick rotations, Krein adjoints, the
//! δ/L/R derivations, the σ^z group and Hermitian functional calculus.
//!
//! Every derived operator is built from the compressed pair `(D, D†)` at a
//! fixed truncation level, so `D_E` is Hermitian at every level.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, HermitianEigen, I};

/// Which finite basis a truncated operator is expressed in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisKind {
    Hermite,
    FourierGrid {
        half_period: f64,
        points_per_axis: usize,
        spatial_dim: usize,
        fiber_dim: usize,
    },
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub level: usize,
}

impl BasisSpec {
    pub fn hermite(level: usize) -> Self {
        Self {
            kind: BasisKind::Hermite,
            level,
        }
    }

    pub fn abstract_space(level: usize) -> Self {
        Self {
            kind: BasisKind::Abstract,
            level,
        }
    }

    pub fn fourier_grid(
        half_period: f64,
        points_per_axis: usize,
        spatial_dim: usize,
        fiber_dim: usize,
    ) -> Result<Self> {
        if !(half_period > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        if points_per_axis == 0 || spatial_dim == 0 || fiber_dim == 0 {
            return Err(Error::InvalidArgument(
                "grid sizes must be positive".into(),
            ));
        }
        let level = points_per_axis
            .checked_pow(spatial_dim as u32)
            .and_then(|g| g.checked_mul(fiber_dim))
            .ok_or_else(|| Error::InvalidArgument("grid dimension overflows".into()))?;
        Ok(Self {
            kind: BasisKind::FourierGrid {
                half_period,
                points_per_axis,
                spatial_dim,
                fiber_dim,
            },
            level,
        })
    }
}

/// Compression of an (unbounded) operator to a finite basis.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    matrix: CMat,
    basis: BasisSpec,
    label: String,
}

impl TruncatedOperator {
    pub fn new(matrix: CMat, basis: BasisSpec, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                context: "truncated operator must be square",
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        if basis.level == 0 || basis.level != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                context: "basis level must equal matrix dimension",
                left: basis.level,
                right: matrix.nrows(),
            });
        }
        Ok(Self {
            matrix,
            basis,
            label: label.into(),
        })
    }

    /// Wrap a square matrix in an abstract basis.
    pub fn from_matrix(matrix: CMat, label: impl Into<String>) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, BasisSpec::abstract_space(n), label)
    }

    /// Same basis as `self`, different matrix.
    pub(crate) fn sibling(&self, matrix: CMat, label: impl Into<String>) -> Self {
        debug_assert_eq!(matrix.nrows(), self.dim());
        Self {
            matrix,
            basis: self.basis.clone(),
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn check_same_dim(&self, other: &TruncatedOperator, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Conjugate transpose.
pub fn adjoint(t: &TruncatedOperator) -> TruncatedOperator {
    t.sibling(linalg::adjoint(&t.matrix), format!("{}*", t.label))
}

/// `⟨D⟩² = ½(DD† + D†D)`.
pub fn mean_square(d: &TruncatedOperator) -> TruncatedOperator {
    let m = &d.matrix;
    let ms = linalg::scale(&(m * m.adjoint() + m.adjoint() * m), c64::new(0.5, 0.0));
    d.sibling(ms, format!("<{}>^2", d.label))
}

/// `R_D = (i/2)(D² − D†²)`.
pub fn curvature_defect(d: &TruncatedOperator) -> TruncatedOperator {
    let m = &d.matrix;
    let ma = m.adjoint();
    let r = linalg::scale(&(m * m - ma * ma), c64::new(0.0, 0.5));
    d.sibling(r, format!("R_{}", d.label))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `D_E = (e^{iπ/4}/√2)(D − iD†)`
    Plus,
    /// `D̃_E = (e^{−iπ/4}/√2)(D + iD†)`
    Minus,
}

/// Wick rotation. Both orientations are Hermitian by construction.
pub fn wick_rotate(d: &TruncatedOperator, orientation: Orientation) -> TruncatedOperator {
    // (1±i)/2 D + (1∓i)/2 D†
    let (a, b, tag) = match orientation {
        Orientation::Plus => (c64::new(0.5, 0.5), c64::new(0.5, -0.5), "E"),
        Orientation::Minus => (c64::new(0.5, -0.5), c64::new(0.5, 0.5), "E~"),
    };
    let m = &d.matrix;
    let out = Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        a * m[(i, j)] + b * m[(j, i)].conj()
    });
    d.sibling(out, format!("{}_{tag}", d.label))
}

/// `⟨D⟩²`, `R_D` and both Wick rotations of one operator.
#[derive(Debug, Clone)]
pub struct DerivedOperators {
    pub mean_square: TruncatedOperator,
    pub curvature_defect: TruncatedOperator,
    pub wick_plus: TruncatedOperator,
    pub wick_minus: TruncatedOperator,
}

impl DerivedOperators {
    pub fn new(d: &TruncatedOperator) -> Self {
        Self {
            mean_square: mean_square(d),
            curvature_defect: curvature_defect(d),
            wick_plus: wick_rotate(d, Orientation::Plus),
            wick_minus: wick_rotate(d, Orientation::Minus),
        }
    }

    /// Largest Hermiticity residual over `⟨D⟩²`, `R_D`, `D_E`, `D̃_E`.
    pub fn hermiticity_residual(&self) -> f64 {
        [
            &self.mean_square,
            &self.curvature_defect,
            &self.wick_plus,
            &self.wick_minus,
        ]
        .iter()
        .map(|t| linalg::hermitian_residual(t.matrix()))
        .fold(0.0, f64::max)
    }

    /// Relative Frobenius residuals of `D_E² = ⟨D⟩² + R_D` and `D̃_E² = ⟨D⟩² − R_D`.
    pub fn decomposition_residuals(&self) -> (f64, f64) {
        let ms = self.mean_square.matrix();
        let r = self.curvature_defect.matrix();
        let p = self.wick_plus.matrix();
        let m = self.wick_minus.matrix();
        (
            linalg::relative_frobenius(&(p * p), &(ms + r)),
            linalg::relative_frobenius(&(m * m), &(ms - r)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryConvention {
    /// `J* = J`, `J² = 1`
    SelfAdjointUnitary,
    /// `β* = −β`, `β² = −1`
    AntiSelfAdjoint,
}

pub const SYMMETRY_TOL: f64 = 1e-13;

/// Fundamental symmetry of a Krein space, in either convention.
#[derive(Debug, Clone)]
pub struct FundamentalSymmetry {
    matrix: CMat,
    convention: SymmetryConvention,
}

impl FundamentalSymmetry {
    pub fn new(matrix: CMat, convention: SymmetryConvention) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidSymmetry("not square".into()));
        }
        let n = matrix.nrows();
        let adj = linalg::adjoint(&matrix);
        let sq = &matrix * &matrix;
        let id = linalg::identity(n);
        let (adj_res, sq_res) = match convention {
            SymmetryConvention::SelfAdjointUnitary => {
                (linalg::max_abs(&(&adj - &matrix)), linalg::max_abs(&(&sq - &id)))
            }
            SymmetryConvention::AntiSelfAdjoint => {
                (linalg::max_abs(&(&adj + &matrix)), linalg::max_abs(&(&sq + &id)))
            }
        };
        if adj_res > SYMMETRY_TOL {
            return Err(Error::InvalidSymmetry(format!(
                "adjoint relation violated by {adj_res:.3e}"
            )));
        }
        if sq_res > SYMMETRY_TOL {
            return Err(Error::InvalidSymmetry(format!(
                "square relation violated by {sq_res:.3e}"
            )));
        }
        Ok(Self { matrix, convention })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn convention(&self) -> SymmetryConvention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The self-adjoint unitary form: `J` itself, or `J = iβ`.
    pub fn as_self_adjoint(&self) -> FundamentalSymmetry {
        match self.convention {
            SymmetryConvention::SelfAdjointUnitary => self.clone(),
            SymmetryConvention::AntiSelfAdjoint => FundamentalSymmetry {
                matrix: linalg::scale(&self.matrix, I),
                convention: SymmetryConvention::SelfAdjointUnitary,
            },
        }
    }

    /// The anti-self-adjoint form: `β` itself, or `β = −iJ`.
    pub fn as_anti_self_adjoint(&self) -> FundamentalSymmetry {
        match self.convention {
            SymmetryConvention::AntiSelfAdjoint => self.clone(),
            SymmetryConvention::SelfAdjointUnitary => FundamentalSymmetry {
                matrix: linalg::scale(&self.matrix, -I),
                convention: SymmetryConvention::AntiSelfAdjoint,
            },
        }
    }
}

/// Krein adjoint `T⁺ = J T† J`; `β` inputs are converted with `J = iβ`.
pub fn krein_adjoint(t: &TruncatedOperator, j: &FundamentalSymmetry) -> Result<TruncatedOperator> {
    if j.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            context: "fundamental symmetry and operator",
            left: j.dim(),
            right: t.dim(),
        });
    }
    let j = j.as_self_adjoint();
    let jm = j.matrix();
    let out = jm * t.matrix.adjoint() * jm;
    Ok(t.sibling(out, format!("{}^+", t.label)))
}

/// Spectral data of `1 + D²` for a Hermitian `D` (or of `1 + H` for `H ≥ 0`),
/// used for all fractional powers, δ/L/R maps and σ^z.
#[derive(Debug, Clone)]
pub struct SobolevScale {
    eigen: HermitianEigen,
    /// eigenvalues of `1 + D²`
    one_plus: Vec<f64>,
}

impl SobolevScale {
    /// From a Hermitian "Dirac" operator: uses `1 + D²`.
    pub fn from_dirac(d: &CMat) -> Result<Self> {
        let eigen = HermitianEigen::new(d)?;
        let one_plus = eigen.values.iter().map(|x| 1.0 + x * x).collect();
        Ok(Self { eigen, one_plus })
    }

    /// From a positive "Laplacian" `H = D²`: uses `1 + H`.
    pub fn from_laplacian(h: &CMat) -> Result<Self> {
        let eigen = HermitianEigen::new(h)?;
        let scale = eigen.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut one_plus = Vec::with_capacity(eigen.values.len());
        for &x in &eigen.values {
            if x < -1e-10 * scale {
                return Err(Error::InvalidArgument(format!(
                    "operator is not positive: eigenvalue {x:.3e}"
                )));
            }
            one_plus.push(1.0 + x.max(0.0));
        }
        Ok(Self { eigen, one_plus })
    }

    pub fn dim(&self) -> usize {
        self.one_plus.len()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// Eigenvalues of `1 + D²`, nondecreasing.
    pub fn one_plus_values(&self) -> &[f64] {
        &self.one_plus
    }

    /// `(1 + D²)^α` for real `α`.
    pub fn power(&self, alpha: f64) -> CMat {
        self.complex_power(c64::new(alpha, 0.0))
    }

    /// `(1 + D²)^z`.
    pub fn complex_power(&self, z: c64) -> CMat {
        let fv: Vec<c64> = self
            .one_plus
            .iter()
            .map(|&l| (z * l.ln()).exp())
            .collect();
        let u = &self.eigen.vectors;
        let scaled = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * fv[j]);
        &scaled * u.adjoint()
    }

    /// `δ^k(T)` with `δ(T) = [(1 + D²)^{1/2}, T]`.
    pub fn delta(&self, t: &CMat, order: usize) -> CMat {
        let mut out = t.clone();
        if order == 0 {
            return out;
        }
        let root = self.power(0.5);
        for _ in 0..order {
            out = linalg::commutator(&root, &out);
        }
        out
    }

    /// `L(T) = (1+D²)^{−1/2}[D², T]`.
    pub fn left(&self, t: &CMat) -> CMat {
        let sq = self.power(1.0);
        self.power(-0.5) * linalg::commutator(&sq, t)
    }

    /// `R(T) = [D², T](1+D²)^{−1/2}`.
    pub fn right(&self, t: &CMat) -> CMat {
        let sq = self.power(1.0);
        linalg::commutator(&sq, t) * self.power(-0.5)
    }

    /// `σ^z(T) = (1+D²)^{z/2} T (1+D²)^{−z/2}`.
    pub fn sigma(&self, t: &CMat, z: c64) -> CMat {
        self.complex_power(z * 0.5) * t * self.complex_power(-z * 0.5)
    }
}

/// `δ^order(T)` relative to a Hermitian `D`.
pub fn delta_map(
    t: &TruncatedOperator,
    d: &TruncatedOperator,
    order: usize,
) -> Result<TruncatedOperator> {
    t.check_same_dim(d, "delta_map operands")?;
    let scale = SobolevScale::from_dirac(d.matrix())?;
    Ok(t.sibling(scale.delta(t.matrix(), order), format!("delta^{order}({})", t.label)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrSide {
    Left,
    Right,
}

/// `L(T)` or `R(T)` relative to a Hermitian `D`.
pub fn lr_map(t: &TruncatedOperator, d: &TruncatedOperator, side: LrSide) -> Result<TruncatedOperator> {
    t.check_same_dim(d, "lr_map operands")?;
    let scale = SobolevScale::from_dirac(d.matrix())?;
    let (m, tag) = match side {
        LrSide::Left => (scale.left(t.matrix()), "L"),
        LrSide::Right => (scale.right(t.matrix()), "R"),
    };
    Ok(t.sibling(m, format!("{tag}({})", t.label)))
}

/// `σ^z(T)` relative to a Hermitian `D`.
pub fn sigma_conjugate(
    t: &TruncatedOperator,
    d: &TruncatedOperator,
    z: c64,
) -> Result<TruncatedOperator> {
    t.check_same_dim(d, "sigma_conjugate operands")?;
    let scale = SobolevScale::from_dirac(d.matrix())?;
    Ok(t.sibling(scale.sigma(t.matrix(), z), format!("sigma^z({})", t.label)))
}

/// `f(H)` for Hermitian `H`.
pub fn func_calculus<F: Fn(f64) -> f64>(h: &TruncatedOperator, f: F) -> Result<TruncatedOperator> {
    let eig = HermitianEigen::new(h.matrix())?;
    Ok(h.sibling(eig.apply_real(f)?, format!("f({})", h.label)))
}

/// `f(H)` for Hermitian `H` and complex-valued `f`.
pub fn func_calculus_complex<F: Fn(f64) -> c64>(
    h: &TruncatedOperator,
    f: F,
) -> Result<TruncatedOperator> {
    let eig = HermitianEigen::new(h.matrix())?;
    Ok(h.sibling(eig.apply(f)?, format!("f({})", h.label)))
}

/// Operator norms bounded by the universal lemma:
/// `‖D(1+⟨D⟩²)^{−1/2}‖ ≤ √2` and `‖(1+⟨D⟩²)^{−1/2} R_D (1+⟨D⟩²)^{−1/2}‖ ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalBounds {
    pub dirac_ratio: f64,
    pub curvature_ratio: f64,
}

impl UniversalBounds {
    pub const DIRAC_LIMIT: f64 = std::f64::consts::SQRT_2;
    pub const CURVATURE_LIMIT: f64 = 2.0;

    pub fn holds(&self, tol: f64) -> bool {
        self.dirac_ratio <= Self::DIRAC_LIMIT + tol
            && self.curvature_ratio <= Self::CURVATURE_LIMIT + tol
    }
}

pub fn universal_bounds(d: &TruncatedOperator) -> Result<UniversalBounds> {
    let derived = DerivedOperators::new(d);
    universal_bounds_with(d, &derived)
}

pub fn universal_bounds_with(
    d: &TruncatedOperator,
    derived: &DerivedOperators,
) -> Result<UniversalBounds> {
    let scale = SobolevScale::from_laplacian(derived.mean_square.matrix())?;
    Ok(universal_bounds_at(d.matrix(), derived.curvature_defect.matrix(), &scale.power(-0.5)))
}

/// Bounds given `(1+⟨D⟩²)^{−1/2}` already formed.
pub fn universal_bounds_at(d: &CMat, curvature_defect: &CMat, inv_root: &CMat) -> UniversalBounds {
    let dirac = d * inv_root;
    let curv = inv_root * curvature_defect * inv_root;
    UniversalBounds {
        dirac_ratio: linalg::op_norm(&dirac),
        curvature_ratio: linalg::op_norm(&curv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_rows, re};

    fn op(rows: &[Vec<c64>]) -> TruncatedOperator {
        TruncatedOperator::from_matrix(from_rows(rows), "T").unwrap()
    }

    fn nilpotent() -> TruncatedOperator {
        op(&[vec![re(0.0), re(0.0)], vec![re(1.0), re(0.0)]])
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        linalg::max_abs(&(a - b)) <= tol
    }

    #[test]
    fn adjoint_examples() {
        let a = adjoint(&nilpotent());
        assert_eq!(a.matrix()[(0, 1)], re(1.0));
        assert_eq!(a.matrix()[(1, 0)], re(0.0));
        let it = op(&[vec![I, re(0.0)], vec![re(0.0), I]]);
        assert_eq!(adjoint(&it).matrix()[(0, 0)], -I);
        let h = op(&[vec![re(2.0), c64::new(1.0, 1.0)], vec![c64::new(1.0, -1.0), re(0.0)]]);
        assert!(close(adjoint(&h).matrix(), h.matrix(), 0.0));
        // involution is exact
        let t = op(&[vec![c64::new(0.3, -0.7), re(1.1)], vec![c64::new(-2.0, 0.25), I]]);
        assert!(close(adjoint(&adjoint(&t)).matrix(), t.matrix(), 0.0));
    }

    #[test]
    fn mean_square_of_nilpotent_is_half_identity() {
        let ms = mean_square(&nilpotent());
        assert!(close(ms.matrix(), &linalg::scale(&linalg::identity(2), re(0.5)), 0.0));
    }

    #[test]
    fn self_adjoint_collapses_wick_and_defect() {
        let d = op(&[vec![re(1.0), c64::new(0.0, -2.0)], vec![c64::new(0.0, 2.0), re(-3.0)]]);
        assert!(close(mean_square(&d).matrix(), &(d.matrix() * d.matrix()), 1e-14));
        assert!(linalg::max_abs(curvature_defect(&d).matrix()) < 1e-14);
        assert!(close(wick_rotate(&d, Orientation::Plus).matrix(), d.matrix(), 1e-15));
        assert!(close(wick_rotate(&d, Orientation::Minus).matrix(), d.matrix(), 1e-15));
    }

    #[test]
    fn finite_geometry_wick_rotation() {
        // D = [[0,0],[B,0]] with B = [[1]]
        let de = wick_rotate(&nilpotent(), Orientation::Plus);
        let pref = c64::new(0.5, 0.5); // e^{iπ/4}/√2
        assert!((de.matrix()[(0, 1)] - pref * (-I)).norm() < 1e-15);
        assert!((de.matrix()[(1, 0)] - pref).norm() < 1e-15);
        let sq = de.matrix() * de.matrix();
        assert!(close(&sq, &linalg::scale(&linalg::identity(2), re(0.5)), 1e-15));
        assert!(linalg::max_abs(curvature_defect(&nilpotent()).matrix()) == 0.0);
    }

    #[test]
    fn krein_adjoint_examples() {
        let t = op(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]);
        let id = FundamentalSymmetry::new(linalg::identity(2), SymmetryConvention::SelfAdjointUnitary)
            .unwrap();
        assert!(close(krein_adjoint(&t, &id).unwrap().matrix(), adjoint(&t).matrix(), 0.0));
        let s3 = FundamentalSymmetry::new(
            linalg::real_diagonal(&[1.0, -1.0]),
            SymmetryConvention::SelfAdjointUnitary,
        )
        .unwrap();
        let k = krein_adjoint(&t, &s3).unwrap();
        let expected = from_rows(&[vec![re(0.0), re(0.0)], vec![re(-1.0), re(0.0)]]);
        assert!(close(k.matrix(), &expected, 0.0));
        // Krein-self-adjoint input is a fixed point: T = [[1,1],[-1,2]] has J T† J = T for J = σ3
        let ksa = op(&[vec![re(1.0), re(1.0)], vec![re(-1.0), re(2.0)]]);
        assert!(close(krein_adjoint(&ksa, &s3).unwrap().matrix(), ksa.matrix(), 0.0));
        // involution
        let t2 = krein_adjoint(&krein_adjoint(&t, &s3).unwrap(), &s3).unwrap();
        assert!(close(t2.matrix(), t.matrix(), 0.0));
    }

    #[test]
    fn krein_dimension_mismatch() {
        let t = nilpotent();
        let j = FundamentalSymmetry::new(linalg::identity(3), SymmetryConvention::SelfAdjointUnitary)
            .unwrap();
        assert!(matches!(krein_adjoint(&t, &j), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn symmetry_conventions_convert() {
        // β = iσ1
        let beta = from_rows(&[vec![re(0.0), I], vec![I, re(0.0)]]);
        let b = FundamentalSymmetry::new(beta, SymmetryConvention::AntiSelfAdjoint).unwrap();
        let j = b.as_self_adjoint();
        let expected = from_rows(&[vec![re(0.0), re(-1.0)], vec![re(-1.0), re(0.0)]]);
        assert!(close(j.matrix(), &expected, 0.0));
        assert!(close(j.as_anti_self_adjoint().matrix(), b.matrix(), 0.0));
        assert!(FundamentalSymmetry::new(linalg::identity(2), SymmetryConvention::AntiSelfAdjoint)
            .is_err());
    }

    #[test]
    fn delta_examples() {
        let d = op(&[vec![re(0.0), re(0.0)], vec![re(0.0), re(1.0)]]);
        let t = op(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]);
        let dt = delta_map(&t, &d, 1).unwrap();
        let expected = linalg::scale(t.matrix(), re(1.0 - 2f64.sqrt()));
        assert!(close(dt.matrix(), &expected, 1e-14));
        assert!(close(delta_map(&t, &d, 0).unwrap().matrix(), t.matrix(), 0.0));
        let commuting = op(&[vec![re(2.0), re(0.0)], vec![re(0.0), re(-1.0)]]);
        assert!(linalg::max_abs(delta_map(&commuting, &d, 2).unwrap().matrix()) < 1e-14);
        assert!(matches!(delta_map(&t, &nilpotent(), 1), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn lr_examples() {
        let d = op(&[vec![re(0.0), re(0.0)], vec![re(0.0), re(1.0)]]);
        let t = op(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]);
        let l = lr_map(&t, &d, LrSide::Left).unwrap();
        let expected = from_rows(&[vec![re(0.0), re(-1.0)], vec![re(0.0), re(0.0)]]);
        assert!(close(l.matrix(), &expected, 1e-14));
        let r = lr_map(&t, &d, LrSide::Right).unwrap();
        assert!(close(r.matrix(), &linalg::scale(&expected, re(1.0 / 2f64.sqrt())), 1e-14));
        let c = op(&[vec![re(1.0), re(0.0)], vec![re(0.0), re(5.0)]]);
        let lc = lr_map(&c, &d, LrSide::Left).unwrap();
        let rc = lr_map(&c, &d, LrSide::Right).unwrap();
        assert!(close(lc.matrix(), rc.matrix(), 1e-14));
    }

    #[test]
    fn sigma_on_elementary_matrix() {
        let d = op(&[vec![re(0.5), re(0.0)], vec![re(0.0), re(2.0)]]);
        let t = op(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]);
        let z = c64::new(0.7, -0.3);
        let s = sigma_conjugate(&t, &d, z).unwrap();
        let ratio: f64 = (1.0 + 0.25) / (1.0 + 4.0);
        let expected = (z * 0.5 * ratio.ln()).exp();
        assert!((s.matrix()[(0, 1)] - expected).norm() < 1e-14);
        assert!(close(sigma_conjugate(&t, &d, re(0.0)).unwrap().matrix(), t.matrix(), 1e-14));
    }

    #[test]
    fn func_calculus_diagonal() {
        let h = op(&[vec![re(1.0), re(0.0)], vec![re(0.0), re(3.0)]]);
        let f = func_calculus(&h, |x| 1.0 / (1.0 + x)).unwrap();
        assert!(close(f.matrix(), &linalg::real_diagonal(&[0.5, 0.25]), 1e-15));
        let id = func_calculus(&h, |x| x).unwrap();
        assert!(close(id.matrix(), h.matrix(), 1e-14));
        assert!(matches!(
            func_calculus(&h, |x| 1.0 / (x - 1.0)),
            Err(Error::FunctionUndefined { .. })
        ));
    }

    #[test]
    fn fourier_basis_level() {
        let b = BasisSpec::fourier_grid(3.0, 8, 2, 2).unwrap();
        assert_eq!(b.level, 128);
        assert!(BasisSpec::fourier_grid(-1.0, 8, 1, 1).is_err());
        let m = linalg::identity(4);
        assert!(TruncatedOperator::new(m, BasisSpec::hermite(3), "x").is_err());
    }
}
