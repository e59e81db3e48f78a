//! Hermite functions and Gauss quadrature rules.

use std::f64::consts::PI;

use statrs::function::gamma as sgamma;

pub fn gamma(x: f64) -> f64 {
    sgamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sgamma::ln_gamma(x)
}

/// Orthonormal Hermite functions `φ_0(x), …, φ_{n−1}(x)` on `L²(ℝ)`,
/// `φ_k(x) = (2^k k! √π)^{−1/2} H_k(x) e^{−x²/2}`.
///
/// The three-term recurrence runs in rescaled form so large `|x|` does not
/// underflow the Gaussian factor before the polynomial part has grown.
pub fn hermite_functions(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    const BIG: f64 = 1e150;
    let big_ln = BIG.ln();
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0f64;
    let mut cur = PI.powf(-0.25);
    let emit = |v: f64, ls: f64| -> f64 {
        if v == 0.0 {
            0.0
        } else {
            v.signum() * (ls + v.abs().ln()).exp()
        }
    };
    out.push(emit(cur, log_scale));
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += big_ln;
        }
        out.push(emit(cur, log_scale));
    }
    out
}

/// Recurrence coefficients `(√(2/(k+1)), √(k/(k+1)))` for `k < n`.
fn recurrence(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let kf = k as f64;
            ((2.0 / (kf + 1.0)).sqrt(), (kf / (kf + 1.0)).sqrt())
        })
        .collect()
}

/// `(φ_{n−1}(x), φ_n(x))` up to a common positive factor, `n = coef.len()`.
fn hermite_pair_scaled(x: f64, coef: &[(f64, f64)]) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    for &(c1, c2) in coef {
        let next = x * c1 * cur - c2 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
        }
    }
    (prev, cur)
}

/// Root of `φ_m` in `[a, b]` where it changes sign: Newton steps, falling
/// back to bisection whenever a step leaves the bracket.
fn refine_root(coef: &[(f64, f64)], mut a: f64, mut b: f64) -> f64 {
    let mf = coef.len() as f64;
    let sa = hermite_pair_scaled(a, coef).1.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..100 {
        let (pm1, p) = hermite_pair_scaled(x, coef);
        if p == 0.0 {
            return x;
        }
        if p.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        // φ_m' / φ_m = (√(2m) φ_{m−1} − x φ_m) / φ_m
        let dp = (2.0 * mf).sqrt() * pm1 - x * p;
        let newton = x - p / dp;
        let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= 1e-13 * x.abs().max(1.0) {
            // one polishing step from the converged iterate
            let (pm1, p) = hermite_pair_scaled(next, coef);
            return next - p / ((2.0 * mf).sqrt() * pm1 - next * p);
        }
        x = next;
    }
    x
}

/// `ln |φ_k(x)|`.
fn ln_abs_hermite(x: f64, k: usize) -> f64 {
    const BIG: f64 = 1e150;
    let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    for j in 0..k {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
    }
    log_scale + cur.abs().ln()
}

/// Gauss–Hermite rule for `∫ f(x) dx` with Gaussian-decaying `f`.
///
/// `scaled_weights[k] = w_k e^{x_k²}` so `Σ_k scaled_weights[k]·f(x_k)` is exact
/// whenever `f(x) e^{x²}` is a polynomial of degree `< 2·nodes.len()`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "Gauss-Hermite rule needs at least one node");
        let mf = m as f64;
        let edge = (2.0 * mf + 1.0).sqrt();
        // roots are at least π/√(2m+1) apart; scan at a quarter of that
        let step = 0.25 * PI / edge;
        let coef = recurrence(m);
        let f = |x: f64| hermite_pair_scaled(x, &coef).1;
        let mut positive = Vec::with_capacity(m / 2);
        let mut a = if m % 2 == 1 { 0.5 * step } else { 0.0 };
        let mut fa = f(a);
        while positive.len() < m / 2 && a < edge + 1.0 {
            let b = a + step;
            let fb = f(b);
            if fa == 0.0 {
                positive.push(a);
            } else if fa.signum() != fb.signum() {
                positive.push(refine_root(&coef, a, b));
            }
            a = b;
            fa = fb;
        }
        assert_eq!(positive.len(), m / 2, "Gauss-Hermite root scan missed roots");
        let mut roots: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
        if m % 2 == 1 {
            roots.push(0.0);
        }
        roots.extend(positive.iter().copied());
        // Christoffel weight 1 / (m φ_{m−1}(x_k)²), taken in logs
        let scaled_weights = roots
            .iter()
            .map(|&x| (-2.0 * ln_abs_hermite(x, m - 1) - mf.ln()).exp())
            .collect();
        Self {
            nodes: roots,
            scaled_weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f(x) dx` for Gaussian-decaying `f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫ e^{−x²} g(x) dx`.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.integrate(|x| (-x * x).exp() * g(x))
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, z);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { z } else { p1 };
                let pm1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (z * p - pm1) / (z * z - 1.0);
                let step = p / dp;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// `∫_ℝ f(x) dx` through `x = tan θ`; accurate when `f(tan θ)/cos²θ`
    /// is smooth on `[−π/2, π/2]`.
    pub fn integrate_line<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let h = 0.5 * PI;
        self.integrate(-h, h, |theta| {
            let c = theta.cos();
            if c <= 0.0 {
                0.0
            } else {
                f(theta.tan()) / (c * c)
            }
        })
    }
}
