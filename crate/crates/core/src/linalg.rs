//! Dense complex matrix helpers on top of `faer`.

use faer::{Mat, Side};

use crate::error::{Error, Result};

pub use faer::c64;

/// Dense complex matrix.
pub type CMat = Mat<c64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const I: c64 = c64 { re: 0.0, im: 1.0 };

#[inline]
pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub fn zeros(n: usize, m: usize) -> CMat {
    Mat::zeros(n, m)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { re(1.0) } else { re(0.0) })
}

pub fn diagonal(d: &[c64]) -> CMat {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| if i == j { d[i] } else { re(0.0) })
}

pub fn real_diagonal(d: &[f64]) -> CMat {
    let n = d.len();
    Mat::from_fn(n, n, |i, j| if i == j { re(d[i]) } else { re(0.0) })
}

/// Build a matrix from row-major nested slices.
pub fn from_rows(rows: &[Vec<c64>]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn to_rows(a: &CMat) -> Vec<Vec<c64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn scale(a: &CMat, z: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * z)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (p, q) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * p, a.ncols() * q, |i, j| {
        a[(i / p, j / q)] * b[(i % p, j % q)]
    })
}

pub fn trace(a: &CMat) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Trace of a product without forming it.
pub fn trace_product(a: &CMat, b: &CMat) -> c64 {
    let mut acc = re(0.0);
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn relative_frobenius(a: &CMat, b: &CMat) -> f64 {
    let diff = frobenius(&(a - b));
    let scale = frobenius(a).max(frobenius(b));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Relative residual `‖H − H†‖_F / ‖H‖_F`.
pub fn hermitian_residual(h: &CMat) -> f64 {
    let n = frobenius(h);
    let d = frobenius(&(h - h.adjoint()));
    if n == 0.0 {
        d
    } else {
        d / n
    }
}

/// Accept `h` as Hermitian within [`HERMITIAN_TOL`] and return `(h + h†)/2`.
pub fn symmetrize_checked(h: &CMat) -> Result<CMat> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            context: "Hermitian input must be square",
            left: h.nrows(),
            right: h.ncols(),
        });
    }
    let residual = hermitian_residual(h);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            residual,
            tolerance: HERMITIAN_TOL,
        });
    }
    Ok(Mat::from_fn(h.nrows(), h.ncols(), |i, j| {
        (h[(i, j)] + h[(j, i)].conj()) * 0.5
    }))
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s = a
        .singular_values()
        .expect("SVD failed to converge on a finite matrix");
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Below this size `op_norm` takes the full SVD.
const LANCZOS_MIN_DIM: usize = 96;
/// Lanczos steps before falling back to the Gram eigenvalues; a clustered
/// top of the spectrum can need hundreds.
const LANCZOS_MAX_STEPS: usize = 64;
const LANCZOS_SEED: u64 = 0x5eed_0f_1a;

/// Operator 2-norm.
pub fn op_norm(a: &CMat) -> f64 {
    if max_abs(a) == 0.0 {
        return 0.0;
    }
    if a.nrows().min(a.ncols()) < LANCZOS_MIN_DIM {
        return singular_values(a).first().copied().unwrap_or(0.0);
    }
    lanczos_norm(a).unwrap_or_else(|| gram_norm(a))
}

/// `sqrt(λ_max(A*A))`, accurate to rounding for the top singular value.
fn gram_norm(a: &CMat) -> f64 {
    let g = if a.nrows() < a.ncols() { a * a.adjoint() } else { a.adjoint() * a };
    g.self_adjoint_eigenvalues(Side::Lower)
        .expect("eigenvalues of a finite Hermitian matrix")
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Largest singular value by Lanczos on `A*A` with full
/// reorthogonalization and a fixed pseudo-random start, so the result is
/// reproducible. The Ritz residual bounds the error of the top eigenvalue of
/// `A*A`; iteration stops once it is below `1e-12` relative. `None` when
/// that takes more than [`LANCZOS_MAX_STEPS`].
fn lanczos_norm(a: &CMat) -> Option<f64> {
    use rand::{Rng, SeedableRng};
    let n = a.ncols();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut q = Mat::<c64>::from_fn(n, 1, |_, _| c64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let nq = q.norm_l2();
    q = scale(&q, re(1.0 / nq));
    let steps = n.min(LANCZOS_MAX_STEPS);
    let mut basis = Mat::<c64>::zeros(n, steps);
    let (mut alpha, mut beta): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for j in 0..steps {
        let mut w = a.adjoint() * (a * &q);
        alpha.push((q.adjoint() * &w)[(0, 0)].re);
        basis.as_mut().subcols_mut(j, 1).copy_from(&q);
        let qk = basis.as_ref().subcols(0, j + 1);
        for _ in 0..2 {
            let c = qk.adjoint() * &w;
            w -= qk * c;
        }
        let bj = w.norm_l2();
        let (top, last) = tridiagonal_top(&alpha, &beta);
        if bj * last <= 1e-12 * top.abs() || bj <= 1e-300 || j + 1 == n {
            return Some(top.max(0.0).sqrt());
        }
        beta.push(bj);
        q = scale(&w, re(1.0 / bj));
    }
    None
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, and the modulus of the last component
/// of its unit eigenvector.
fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], 1.0);
    }
    let off = |i: usize| if i < beta.len() { beta[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // Sturm count of eigenvalues below x
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
    }
    // inverse iteration with the shift `hi`: T − hi is negative
    // semidefinite, so unpivoted elimination is stable
    let shift = hi + 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE);
    let mut z = vec![1.0; k];
    for _ in 0..3 {
        let mut d = vec![0.0; k];
        let mut y = z.clone();
        for i in 0..k {
            d[i] = alpha[i] - shift;
            if i > 0 {
                let l = beta[i - 1] / d[i - 1];
                d[i] -= l * beta[i - 1];
                y[i] -= l * y[i - 1];
            }
            if d[i] == 0.0 {
                d[i] = -f64::MIN_POSITIVE;
            }
        }
        z[k - 1] = y[k - 1] / d[k - 1];
        for i in (0..k - 1).rev() {
            z[i] = (y[i] - beta[i] * z[i + 1]) / d[i];
        }
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return (0.5 * (lo + hi), 1.0);
        }
        z.iter_mut().for_each(|v| *v /= norm);
    }
    (0.5 * (lo + hi), z[k - 1].abs())
}

/// Leading `k × k` block.
pub fn leading_block(a: &CMat, k: usize) -> CMat {
    let k = k.min(a.nrows()).min(a.ncols());
    a.as_ref().submatrix(0, 0, k, k).to_owned()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues nondecreasing.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(h: &CMat) -> Result<Self> {
        let h = symmetrize_checked(h)?;
        Self::of_symmetric(&h)
    }

    fn of_symmetric(h: &CMat) -> Result<Self> {
        let n = h.nrows();
        if n == 0 {
            return Ok(Self {
                values: Vec::new(),
                vectors: zeros(0, 0),
            });
        }
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence)?;
        let values = evd.S().column_vector().iter().map(|x| x.re).collect();
        Ok(Self {
            values,
            vectors: evd.U().to_owned(),
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(f(λ)) U†`. Fails when `f` is not finite at some eigenvalue.
    pub fn apply<F: Fn(f64) -> c64>(&self, f: F) -> Result<CMat> {
        let mut fv = Vec::with_capacity(self.values.len());
        for &l in &self.values {
            let v = f(l);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::FunctionUndefined { eigenvalue: l });
            }
            fv.push(v);
        }
        Ok(self.apply_values(&fv))
    }

    pub fn apply_real<F: Fn(f64) -> f64>(&self, f: F) -> Result<CMat> {
        self.apply(|x| re(f(x)))
    }

    fn apply_values(&self, fv: &[c64]) -> CMat {
        let u = &self.vectors;
        let scaled = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * fv[j]);
        &scaled * u.adjoint()
    }

    /// Diagonal of `U† A U`, i.e. the weights `w_k` in `Tr(A f(H)) = Σ_k w_k f(λ_k)`.
    pub fn spectral_weights(&self, a: &CMat) -> Vec<c64> {
        let au = a * &self.vectors;
        let u = &self.vectors;
        (0..u.ncols())
            .map(|k| {
                let mut acc = re(0.0);
                for i in 0..u.nrows() {
                    acc += u[(i, k)].conj() * au[(i, k)];
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn op_norm_matches_svd(n in 96usize..160, m in 96usize..160, seed in any::<u64>(), lowrank in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut a = Mat::<c64>::from_fn(n, m, |_, _| c64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            if lowrank {
                a = &a.as_ref().submatrix(0, 0, n, 2).to_owned() * a.as_ref().submatrix(0, 0, 2, m).to_owned();
            }
            let exact = singular_values(&a)[0];
            prop_assert!((op_norm(&a) - exact).abs() <= 1e-12 * exact);
            prop_assert!((gram_norm(&a) - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn tridiagonal_top_matches_dense() {
        let alpha = [2.0, -1.0, 0.5, 3.0, 1.0];
        let beta = [0.7, 1.2, -0.4, 0.9];
        let t = Mat::<f64>::from_fn(5, 5, |r, c| match r.abs_diff(c) {
            0 => alpha[r],
            1 => beta[r.min(c)],
            _ => 0.0,
        });
        let evd = t.self_adjoint_eigen(Side::Lower).unwrap();
        let vals = evd.S().column_vector();
        let top = (0..5).max_by(|&x, &y| vals[x].total_cmp(&vals[y])).unwrap();
        let (l, last) = tridiagonal_top(&alpha, &beta);
        assert!((l - vals[top]).abs() < 1e-14);
        assert!((last - evd.U()[(4, top)].abs()).abs() < 1e-10);
    }

    #[test]
    fn lanczos_on_degenerate_spectra() {
        let id = identity(128);
        assert!((op_norm(&id) - 1.0).abs() < 1e-15);
        let d = real_diagonal(&(0..200).map(|k| if k % 2 == 0 { 3.0 } else { -3.0 }).collect::<Vec<_>>());
        assert!((op_norm(&d) - 3.0).abs() < 1e-13);
        let ramp = real_diagonal(&(0..300).map(|k| k as f64 / 299.0).collect::<Vec<_>>());
        assert!((op_norm(&ramp) - 1.0).abs() < 1e-12);
        // accumulation at the top: Lanczos gives up, the Gram route answers
        let cluster = real_diagonal(&(1..=400).map(|k| 1.0 - 1.0 / (k * k) as f64).collect::<Vec<_>>());
        assert!(lanczos_norm(&cluster).is_none());
        assert!((op_norm(&cluster) - (1.0 - 1.0 / 160000.0)).abs() < 1e-13);
    }

    #[test]
    fn kron_of_paulis() {
        let x = from_rows(&[vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]);
        let z = from_rows(&[vec![re(1.0), re(0.0)], vec![re(0.0), re(-1.0)]]);
        let k = kron(&x, &z);
        assert_eq!(k[(0, 2)], re(1.0));
        assert_eq!(k[(1, 3)], re(-1.0));
        assert_eq!(k[(0, 0)], re(0.0));
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = from_rows(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]);
        assert!(matches!(
            HermitianEigen::new(&a),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let a = from_rows(&[
            vec![re(2.0), c64::new(1.0, 1e-13)],
            vec![re(1.0), re(3.0)],
        ]);
        let s = symmetrize_checked(&a).unwrap();
        assert_eq!(hermitian_residual(&s), 0.0);
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = Mat::from_fn(3, 3, |i, j| c64::new(i as f64 + 1.0, j as f64));
        let b = Mat::from_fn(3, 3, |i, j| c64::new(j as f64 - i as f64, 0.5));
        let t1 = trace_product(&a, &b);
        let t2 = trace(&(&a * &b));
        assert!((t1 - t2).norm() < 1e-12);
    }
}
