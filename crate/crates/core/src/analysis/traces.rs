//! Heat and zeta traces `Tr(a e^{−tH})`, `Tr(a (1+H)^{−s/2})` from one
//! eigendecomposition, the Mellin identity linking them, and the closed-form
//! traces of the line operator `D_E = i d/dx + x`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, HermitianEigen};
use crate::operator::SobolevScale;
use crate::quadrature::{gamma, GaussLegendre};

/// Eigenvalues of a positive `H` and the diagonal weights `⟨u_k, a u_k⟩` of
/// a list of observables, so traces of `a f(H)` are plain sums.
#[derive(Debug, Clone)]
pub struct SpectralEngine {
    values: Vec<f64>,
    weights: Vec<Vec<f64>>,
    imag_weights: Vec<f64>,
}

impl SpectralEngine {
    /// From a positive `H`; eigenvalues within `1e-10·‖H‖` below zero are
    /// clamped, larger negative ones rejected.
    pub fn from_laplacian(h: &CMat, observables: &[&CMat]) -> Result<Self> {
        let eig = HermitianEigen::new(h)?;
        let scale = eig.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut values = Vec::with_capacity(eig.values.len());
        for &x in &eig.values {
            if x < -1e-10 * scale {
                return Err(Error::InvalidArgument(format!(
                    "operator is not positive: eigenvalue {x:.3e}"
                )));
            }
            values.push(x.max(0.0));
        }
        Ok(Self::assemble(&eig, values, observables))
    }

    /// From a Hermitian `D`, with `H = D²` taken on the spectrum.
    pub fn from_dirac(d: &CMat, observables: &[&CMat]) -> Result<Self> {
        let eig = HermitianEigen::new(d)?;
        let values = eig.values.iter().map(|x| x * x).collect();
        Ok(Self::assemble(&eig, values, observables))
    }

    /// Reuse the eigendecomposition of a [`SobolevScale`]: `H = (1+H) − 1`.
    pub fn from_scale(scale: &SobolevScale, observables: &[&CMat]) -> Self {
        let values = scale.one_plus_values().iter().map(|l| (l - 1.0).max(0.0)).collect();
        Self::assemble(scale.eigen(), values, observables)
    }

    fn assemble(eig: &HermitianEigen, values: Vec<f64>, observables: &[&CMat]) -> Self {
        let mut weights = Vec::with_capacity(observables.len());
        let mut imag_weights = Vec::with_capacity(observables.len());
        for a in observables {
            let w = eig.spectral_weights(a);
            imag_weights.push(w.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
            weights.push(w.iter().map(|z| z.re).collect());
        }
        Self {
            values,
            weights,
            imag_weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn observables(&self) -> usize {
        self.weights.len()
    }

    /// Largest imaginary part among the diagonal weights of observable `i`
    /// (zero for self-adjoint observables up to rounding).
    pub fn imaginary_weight(&self, i: usize) -> f64 {
        self.imag_weights[i]
    }

    fn sum<F: Fn(f64) -> f64>(&self, i: usize, f: F) -> f64 {
        self.weights[i]
            .iter()
            .zip(&self.values)
            .map(|(w, &l)| w * f(l))
            .sum()
    }

    /// `Tr(a_i e^{−tH})`.
    pub fn heat(&self, i: usize, t: f64) -> f64 {
        self.sum(i, |l| (-t * l).exp())
    }

    /// `Tr(a_i (1+H)^{−s/2})`.
    pub fn zeta(&self, i: usize, s: f64) -> f64 {
        self.sum(i, |l| (1.0 + l).powf(-0.5 * s))
    }

    /// `Tr(a_i)`.
    pub fn trace(&self, i: usize) -> f64 {
        self.weights[i].iter().sum()
    }
}

pub fn heat_trace(a: &CMat, h: &CMat, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(SpectralEngine::from_laplacian(h, &[a])?.heat(0, t))
}

pub fn zeta_trace(a: &CMat, h: &CMat, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
    }
    Ok(SpectralEngine::from_laplacian(h, &[a])?.zeta(0, s))
}

/// Log-spaced trapezoid rule for the Mellin integral over `t ∈ [t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// flag threshold on `|mellin − zeta| / max(1, |zeta|)`
    pub tolerance: f64,
}

impl Default for MellinSpec {
    fn default() -> Self {
        Self {
            t_min: 1e-16,
            t_max: 60.0,
            points: 4001,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinCheck {
    pub s: f64,
    pub zeta: f64,
    pub mellin: f64,
    pub discrepancy: f64,
    /// estimated contribution of `(0, t_min)`, already included in `mellin`
    pub small_t_tail: f64,
    pub converged: bool,
    pub agrees: bool,
}

/// `(1/Γ(s/2)) ∫ t^{s/2−1} e^{−t} Tr(a e^{−tH}) dt` against `Tr(a(1+H)^{−s/2})`.
pub fn mellin_cross_check(
    engine: &SpectralEngine,
    observable: usize,
    s: f64,
    spec: &MellinSpec,
) -> MellinCheck {
    let half = 0.5 * s;
    let (u0, u1) = (spec.t_min.ln(), spec.t_max.ln());
    let m = spec.points.max(3);
    let h = (u1 - u0) / (m - 1) as f64;
    let integrand = |u: f64| {
        let t = u.exp();
        t.powf(half) * (-t).exp() * engine.heat(observable, t)
    };
    let mut acc = 0.0;
    for k in 0..m {
        let w = if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
        acc += w * integrand(u0 + k as f64 * h);
    }
    acc *= h;
    // near t = 0, Tr(a e^{−tH}) ≈ Tr(a)
    let tail = engine.trace(observable) * spec.t_min.powf(half) / half;
    let g = gamma(half);
    let mellin = (acc + tail) / g;
    let zeta = engine.zeta(observable, s);
    let discrepancy = (mellin - zeta).abs();
    // the grid alone must carry the integral; the extrapolated tail is a
    // correction, not a substitute
    let next = engine.sum(observable, |l| l).abs() * spec.t_min.powf(half + 1.0) / (half + 1.0);
    let upper_tail = (-spec.t_max).exp() * spec.t_max.powf(half) * engine.trace(observable).abs();
    let converged = (tail.abs() + next + upper_tail) / g <= 1e-8 * zeta.abs().max(1.0);
    MellinCheck {
        s,
        zeta,
        mellin,
        discrepancy,
        small_t_tail: tail / g,
        converged,
        agrees: discrepancy <= spec.tolerance * zeta.abs().max(1.0),
    }
}

/// `Γ(s/2 − 1/2) / (2√π Γ(s/2))`, the trace of `(1+D_E²)^{−s/2}` per unit
/// of `∫ g` for `D_E = i d/dx + x`.
pub fn line_zeta_constant(s: f64) -> f64 {
    gamma(0.5 * s - 0.5) / (2.0 * PI.sqrt() * gamma(0.5 * s))
}

/// `Tr(g (1+D_E²)^{−s/2})` for the line operator, from the closed form.
pub fn line_zeta_analytic(s: f64, integral_g: f64) -> f64 {
    line_zeta_constant(s) * integral_g
}

/// `∫_ℝ g` by Gauss–Legendre in `x = tan θ`.
pub fn line_integral<F: Fn(f64) -> f64>(g: F, nodes: usize) -> f64 {
    GaussLegendre::new(nodes).integrate_line(g)
}

/// Independent route for the line trace: `(1/2π) ∫ (1+ξ²)^{−s/2} dξ · ∫ g`,
/// both integrals by quadrature.
pub fn line_zeta_fourier(s: f64, integral_g: f64, nodes: usize) -> f64 {
    let gl = GaussLegendre::new(nodes);
    // (1 + tan²θ)^{−s/2} / cos²θ = cos^{s−2}θ
    let h = 0.5 * PI;
    let momentum = gl.integrate(-h, h, |th| th.cos().powf(s - 2.0));
    momentum / (2.0 * PI) * integral_g
}

/// Key for [`EngineCache`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EngineKey {
    pub model: String,
    pub level: usize,
    pub route: String,
}

/// Per-(model, level, route) engines: concurrent readers, each entry
/// initialized exactly once.
#[derive(Debug, Default)]
pub struct EngineCache {
    slots: Mutex<BTreeMap<EngineKey, Arc<OnceLock<Arc<SpectralEngine>>>>>,
}

impl EngineCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_try_init<F>(&self, key: EngineKey, init: F) -> Result<Arc<SpectralEngine>>
    where
        F: FnOnce() -> Result<SpectralEngine>,
    {
        let slot = {
            let mut map = self.slots.lock().expect("engine cache poisoned");
            map.entry(key).or_default().clone()
        };
        if let Some(e) = slot.get() {
            return Ok(e.clone());
        }
        let engine = Arc::new(init()?);
        Ok(slot.get_or_init(|| engine).clone())
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("engine cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn diagonal_examples() {
        let a = linalg::identity(2);
        let h = linalg::real_diagonal(&[1.0, 3.0]);
        let t = 0.7;
        let v = heat_trace(&a, &h, t).unwrap();
        assert!((v - ((-t).exp() + (-3.0 * t).exp())).abs() < 1e-15);
        let one = linalg::identity(1);
        let zero = linalg::real_diagonal(&[0.0]);
        for &s in &[0.1, 1.0, 7.0] {
            assert!((zeta_trace(&one, &zero, s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_mellin_identity() {
        let one = linalg::identity(1);
        let e = SpectralEngine::from_laplacian(&one, &[&one]).unwrap();
        for &s in &[1.0, 2.5, 4.0] {
            let c = mellin_cross_check(&e, 0, s, &MellinSpec::default());
            assert!((c.mellin - 2f64.powf(-s / 2.0)).abs() < 1e-8, "s={s}: {c:?}");
            assert!(c.agrees);
            assert_eq!(c.converged, s > 2.0);
        }
        // small s: the (0, t_min) tail is no longer negligible
        let c = mellin_cross_check(&e, 0, 0.05, &MellinSpec::default());
        assert!(!c.converged);
        assert!(c.mellin.is_finite() && c.zeta.is_finite());
    }

    #[test]
    fn line_constant_at_three() {
        let ig = line_integral(|x| 1.0 / (1.0 + x * x), 64);
        assert!((ig - PI).abs() < 1e-13);
        let v = line_zeta_analytic(3.0, ig);
        assert!((v - 1.0).abs() < 1e-12);
        let f = line_zeta_fourier(3.0, ig, 64);
        assert!((f - 1.0).abs() < 1e-12);
        for &s in &[2.0, 3.5, 5.0] {
            let a = line_zeta_analytic(s, 1.0);
            let b = line_zeta_fourier(s, 1.0, 400);
            assert!((a - b).abs() < 1e-8 * a.abs(), "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn cache_initializes_once() {
        let cache = EngineCache::new();
        let key = EngineKey {
            model: "m".into(),
            level: 2,
            route: "r".into(),
        };
        let id = linalg::identity(2);
        let a = cache
            .get_or_try_init(key.clone(), || SpectralEngine::from_laplacian(&id, &[&id]))
            .unwrap();
        let b = cache
            .get_or_try_init(key, || panic!("second initialization"))
            .unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }
}
