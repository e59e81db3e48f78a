//! Gamma matrices for signature `(t, s)`, the timelike rotation
//! `γ(v) = γ_E(v − Tv) − iγ_E(Tv)` and the spin fundamental symmetry
//! `J_M = i^{t(t−1)/2} γ(e_1)⋯γ(e_t)`.
//!
//! Generators come from the Pauli tensor recursion, so every entry of every
//! gamma matrix lies in `{0, ±1, ±i}` and the algebraic identities hold
//! exactly in floating point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, re, CMat, I};
use crate::operator::{FundamentalSymmetry, SymmetryConvention};

pub const DEFAULT_SEED: u64 = 0x00C1_1FF0;
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub t: usize,
    pub s: usize,
}

impl Signature {
    pub fn new(t: usize, s: usize) -> Result<Self> {
        if t + s == 0 {
            return Err(Error::InvalidArgument("signature needs n = t + s >= 1".into()));
        }
        Ok(Self { t, s })
    }

    pub fn n(&self) -> usize {
        self.t + self.s
    }

    /// Dimension `2^⌊n/2⌋` of the spinor representation.
    pub fn rep_dim(&self) -> usize {
        1 << (self.n() / 2)
    }

    /// `κ(j)`: −1 on timelike directions, +1 on spacelike ones (0-based `j`).
    pub fn kappa(&self, j: usize) -> f64 {
        if j < self.t {
            -1.0
        } else {
            1.0
        }
    }
}

fn pauli() -> [CMat; 3] {
    let o = re(0.0);
    let l = re(1.0);
    [
        linalg::from_rows(&[vec![o, l], vec![l, o]]),
        linalg::from_rows(&[vec![o, -I], vec![I, o]]),
        linalg::from_rows(&[vec![l, o], vec![o, -l]]),
    ]
}

/// Hermitian generators `e_j` with `e_j e_k + e_k e_j = 2δ_{jk}`.
fn hermitian_generators(n: usize) -> Vec<CMat> {
    let [sx, sy, sz] = pauli();
    let mut gens: Vec<CMat> = Vec::new();
    let mut dim = 1usize;
    for _ in 0..n / 2 {
        let mut next: Vec<CMat> = gens.iter().map(|g| linalg::kron(g, &sz)).collect();
        let id = linalg::identity(dim);
        next.push(linalg::kron(&id, &sx));
        next.push(linalg::kron(&id, &sy));
        gens = next;
        dim *= 2;
    }
    if n % 2 == 1 {
        // chirality element (−i)^k e_1⋯e_{2k} closes the odd case
        let k = n / 2;
        let mut prod = linalg::identity(dim);
        for g in &gens {
            prod = &prod * g;
        }
        let phase = (0..k).fold(re(1.0), |p, _| p * (-I));
        gens.push(linalg::scale(&prod, phase));
    }
    gens
}

/// Anti-self-adjoint `γ_E(e_j)` with `γ_E(e_j)γ_E(e_k) + γ_E(e_k)γ_E(e_j) = −2δ_{jk}`.
pub fn generate_gamma_e(n: usize) -> Result<Vec<CMat>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one generator".into()));
    }
    Ok(hermitian_generators(n)
        .iter()
        .map(|g| linalg::scale(g, I))
        .collect())
}

/// Gamma matrices rotated to signature `(t, s)`.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    pub signature: Signature,
    pub gamma_e: Vec<CMat>,
    pub gamma: Vec<CMat>,
    /// diagonal of `g`
    pub metric: Vec<f64>,
    /// diagonal of the reflection `r`
    pub reflection: Vec<f64>,
    /// diagonal of the timelike projection `T`
    pub timelike: Vec<f64>,
}

pub fn rotate_representation(gamma_e: &[CMat], signature: Signature) -> Result<CliffordRep> {
    let n = gamma_e.len();
    if signature.t > n {
        return Err(Error::InvalidArgument(format!(
            "t = {} exceeds the number of generators {n}",
            signature.t
        )));
    }
    if signature.n() != n {
        return Err(Error::DimensionMismatch {
            context: "signature size and generator count",
            left: signature.n(),
            right: n,
        });
    }
    let gamma = gamma_e
        .iter()
        .enumerate()
        .map(|(j, g)| {
            if j < signature.t {
                linalg::scale(g, -I)
            } else {
                g.clone()
            }
        })
        .collect();
    let metric: Vec<f64> = (0..n).map(|j| signature.kappa(j)).collect();
    Ok(CliffordRep {
        signature,
        gamma_e: gamma_e.to_vec(),
        gamma,
        reflection: metric.clone(),
        timelike: (0..n).map(|j| if j < signature.t { 1.0 } else { 0.0 }).collect(),
        metric,
    })
}

impl CliffordRep {
    /// Standard representation for a signature.
    pub fn standard(signature: Signature) -> Result<Self> {
        rotate_representation(&generate_gamma_e(signature.n())?, signature)
    }

    pub fn dim(&self) -> usize {
        self.signature.rep_dim()
    }

    pub fn gamma_of(&self, v: &[f64]) -> CMat {
        combine(&self.gamma, v, self.dim())
    }

    pub fn gamma_e_of(&self, v: &[f64]) -> CMat {
        combine(&self.gamma_e, v, self.dim())
    }

    pub fn metric_form(&self, v: &[f64], w: &[f64]) -> f64 {
        v.iter()
            .zip(w)
            .zip(&self.metric)
            .map(|((a, b), k)| a * b * k)
            .sum()
    }
}

fn combine(basis: &[CMat], v: &[f64], dim: usize) -> CMat {
    let mut out = linalg::zeros(dim, dim);
    for (g, &c) in basis.iter().zip(v) {
        if c != 0.0 {
            out += linalg::scale(g, re(c));
        }
    }
    out
}

fn frame(n: usize, j: usize) -> Vec<f64> {
    (0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Largest residual of an identity over frame vectors and random samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: String,
    pub frame_residual: f64,
    pub random_residual: f64,
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
}

impl ResidualReport {
    fn new(identity: &str, frame_residual: f64, random_residual: f64, samples: usize, seed: u64) -> Self {
        Self {
            identity: identity.into(),
            frame_residual,
            random_residual,
            samples,
            seed,
            pass: frame_residual.max(random_residual) <= RESIDUAL_TOL,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.frame_residual.max(self.random_residual)
    }
}

/// `γ(v)² + g(v,v)·1 = 0`.
pub fn verify_square_relation(rep: &CliffordRep, samples: usize, seed: u64) -> ResidualReport {
    let n = rep.signature.n();
    let id = linalg::identity(rep.dim());
    let residual = |v: &[f64]| {
        let g = rep.gamma_of(v);
        linalg::max_abs(&(&g * &g + linalg::scale(&id, re(rep.metric_form(v, v)))))
    };
    let frame_res = (0..n).map(|j| residual(&frame(n, j))).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_res = (0..samples)
        .map(|_| residual(&random_vector(&mut rng, n)))
        .fold(0.0, f64::max);
    ResidualReport::new("gamma-square", frame_res, rand_res, samples, seed)
}

/// `γ(v)γ(w)* + γ(w)*γ(v) = 2 g_E(v, w)`.
pub fn verify_mixed_relation(rep: &CliffordRep, samples: usize, seed: u64) -> ResidualReport {
    let n = rep.signature.n();
    let id = linalg::identity(rep.dim());
    let residual = |v: &[f64], w: &[f64]| {
        let gv = rep.gamma_of(v);
        let gw_adj = linalg::adjoint(&rep.gamma_of(w));
        let ge: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
        let lhs = &gv * &gw_adj + &gw_adj * &gv;
        linalg::max_abs(&(lhs - linalg::scale(&id, re(2.0 * ge))))
    };
    let mut frame_res = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            frame_res = frame_res.max(residual(&frame(n, j), &frame(n, k)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_res = (0..samples)
        .map(|_| {
            let v = random_vector(&mut rng, n);
            let w = random_vector(&mut rng, n);
            residual(&v, &w)
        })
        .fold(0.0, f64::max);
    ResidualReport::new("mixed-riemannian", frame_res, rand_res, samples, seed)
}

/// `(1 − T − iT)² = r` on the diagonal.
pub fn rotation_square_residual(rep: &CliffordRep) -> f64 {
    rep.timelike
        .iter()
        .zip(&rep.reflection)
        .map(|(&tj, &rj)| {
            let z = c64::new(1.0 - tj, -tj);
            (z * z - re(rj)).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct SpinSymmetry {
    pub matrix: CMat,
    pub signature: Signature,
}

impl SpinSymmetry {
    pub fn adjoint_residual(&self) -> f64 {
        linalg::max_abs(&(linalg::adjoint(&self.matrix) - &self.matrix))
    }

    pub fn square_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        linalg::max_abs(&(&self.matrix * &self.matrix - linalg::identity(n)))
    }

    /// Max over frame vectors of `‖J γ(v) J − (−1)^t γ(rv)‖`.
    pub fn reflection_residual(&self, rep: &CliffordRep) -> f64 {
        let n = rep.signature.n();
        let sign = if rep.signature.t % 2 == 0 { 1.0 } else { -1.0 };
        (0..n)
            .map(|j| {
                let v = frame(n, j);
                let rv: Vec<f64> = v.iter().zip(&rep.reflection).map(|(a, r)| a * r).collect();
                let lhs = &self.matrix * rep.gamma_of(&v) * &self.matrix;
                let rhs = linalg::scale(&rep.gamma_of(&rv), re(sign));
                linalg::max_abs(&(lhs - rhs))
            })
            .fold(0.0, f64::max)
    }

    pub fn to_fundamental_symmetry(&self) -> Result<FundamentalSymmetry> {
        FundamentalSymmetry::new(self.matrix.clone(), SymmetryConvention::SelfAdjointUnitary)
    }
}

/// `J_M = i^{t(t−1)/2} γ(e_1)⋯γ(e_t)`, checked against its defining identities.
pub fn fundamental_symmetry(rep: &CliffordRep) -> Result<SpinSymmetry> {
    let t = rep.signature.t;
    if t == 0 {
        return Err(Error::InvalidArgument(
            "fundamental symmetry needs at least one timelike direction".into(),
        ));
    }
    let mut prod = linalg::identity(rep.dim());
    for g in &rep.gamma[..t] {
        prod = &prod * g;
    }
    let phase = (0..(t * (t - 1) / 2) % 4).fold(re(1.0), |p, _| p * I);
    let spin = SpinSymmetry {
        matrix: linalg::scale(&prod, phase),
        signature: rep.signature,
    };
    let worst = spin
        .adjoint_residual()
        .max(spin.square_residual())
        .max(spin.reflection_residual(rep));
    if worst > RESIDUAL_TOL {
        return Err(Error::InvalidSymmetry(format!(
            "J_M identities violated by {worst:.3e}"
        )));
    }
    Ok(spin)
}

/// Every Clifford identity for one signature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CliffordSuite {
    pub signature: Signature,
    pub rep_dim: usize,
    pub square: ResidualReport,
    pub mixed: ResidualReport,
    pub rotation_residual: f64,
    /// `(adjoint, square, reflection)` residuals of `J_M`, absent when `t = 0`
    pub spin_symmetry: Option<[f64; 3]>,
    pub pass: bool,
}

pub fn run_suite(signature: Signature, samples: usize, seed: u64) -> Result<CliffordSuite> {
    let rep = CliffordRep::standard(signature)?;
    let square = verify_square_relation(&rep, samples, seed);
    let mixed = verify_mixed_relation(&rep, samples, seed);
    let rotation_residual = rotation_square_residual(&rep);
    let spin_symmetry = if signature.t > 0 {
        let mut prod = linalg::identity(rep.dim());
        for g in &rep.gamma[..signature.t] {
            prod = &prod * g;
        }
        let t = signature.t;
        let phase = (0..(t * (t - 1) / 2) % 4).fold(re(1.0), |p, _| p * I);
        let spin = SpinSymmetry {
            matrix: linalg::scale(&prod, phase),
            signature,
        };
        Some([
            spin.adjoint_residual(),
            spin.square_residual(),
            spin.reflection_residual(&rep),
        ])
    } else {
        None
    };
    let pass = square.pass
        && mixed.pass
        && rotation_residual <= RESIDUAL_TOL
        && spin_symmetry.is_none_or(|r| r.iter().all(|&x| x <= RESIDUAL_TOL));
    Ok(CliffordSuite {
        signature,
        rep_dim: rep.dim(),
        square,
        mixed,
        rotation_residual,
        spin_symmetry,
        pass,
    })
}
