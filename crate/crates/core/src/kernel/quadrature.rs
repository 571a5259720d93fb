//! Gauss-Jacobi and Gauss-Legendre rules at working precision.
//!
//! Nodes are seeded from the double-precision eigenvalues of the Jacobi
//! matrix, polished by Newton steps on the three-term recurrence evaluated at
//! working precision, and weighted by the Christoffel sum of orthonormal
//! polynomials.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::scalar::{Cplx, Real};

/// Nodes and (real) weights of an interpolatory rule.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&Real) -> Cplx>(&self, mut f: F) -> Cplx {
        let prec = self.nodes.first().map(|t| t.prec()).unwrap_or(53);
        let mut acc = Cplx::zero(prec);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(t) * w;
        }
        acc
    }

    pub fn integrate_real<F: FnMut(&Real) -> Real>(&self, mut f: F) -> Real {
        let prec = self.nodes.first().map(|t| t.prec()).unwrap_or(53);
        let mut acc = Real::zero(prec);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(t) * w;
        }
        acc
    }

    pub fn weight_sum(&self) -> Real {
        let prec = self.weights.first().map(|t| t.prec()).unwrap_or(53);
        self.weights.iter().fold(Real::zero(prec), |acc, w| acc + w)
    }
}

struct Recurrence {
    /// diagonal entries alpha_k
    diag: Vec<Real>,
    /// squared off-diagonal entries beta_k, k >= 1 (beta[0] unused)
    beta: Vec<Real>,
    mass: Real,
}

/// Monic recurrence for the weight `(1-x)^a (1+x)^b` on `[-1, 1]`.
fn jacobi_recurrence(a: f64, b: f64, n: usize, prec: u32) -> Recurrence {
    let a_r = Real::from_f64(a, prec);
    let b_r = Real::from_f64(b, prec);
    let ab = &a_r + &b_r;
    let mut diag = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n + 1);
    beta.push(Real::zero(prec));
    for k in 0..n {
        let alpha_k = if k == 0 {
            (&b_r - &a_r) / (ab.clone() + 2.0)
        } else {
            let two_k_ab = ab.clone() + (2 * k) as f64;
            (b_r.square() - a_r.square()) / (two_k_ab.clone() * (two_k_ab + 2.0))
        };
        diag.push(alpha_k);
    }
    for k in 1..=n {
        let beta_k = if k == 1 {
            let s = ab.clone() + 2.0;
            (a_r.clone() + 1.0) * (b_r.clone() + 1.0) * 4.0 / (s.square() * (ab.clone() + 3.0))
        } else {
            let kf = k as f64;
            let t = ab.clone() + 2.0 * kf;
            let num = (a_r.clone() + kf) * (b_r.clone() + kf) * (ab.clone() + kf) * (4.0 * kf);
            let den = t.square() * (t.clone() + 1.0) * (t - 1.0);
            num / den
        };
        beta.push(beta_k);
    }
    let two = Real::from_f64(2.0, prec);
    let mass = two.powf(&(ab.clone() + 1.0)) * (a_r.clone() + 1.0).gamma() * (b_r.clone() + 1.0).gamma()
        / (ab + 2.0).gamma();
    Recurrence { diag, beta, mass }
}

/// Monic `p_n(x)` and `p_n'(x)` from the recurrence.
fn eval_monic(rec: &Recurrence, n: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p_prev = Real::zero(prec);
    let mut p = Real::one(prec);
    let mut dp_prev = Real::zero(prec);
    let mut dp = Real::zero(prec);
    for k in 0..n {
        let xa = x - &rec.diag[k];
        let p_next = &xa * &p - &rec.beta[k] * &p_prev;
        let dp_next = &xa * &dp + &p - &rec.beta[k] * &dp_prev;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

fn christoffel_weight(rec: &Recurrence, n: usize, x: &Real) -> Real {
    let prec = x.prec();
    let sqrt_beta: Vec<Real> = rec.beta.iter().map(|b| b.sqrt()).collect();
    let mut prev = Real::zero(prec);
    let mut cur = Real::one(prec);
    let mut sum = Real::one(prec);
    for k in 0..n - 1 {
        let next = ((x - &rec.diag[k]) * &cur - &sqrt_beta[k] * &prev) / &sqrt_beta[k + 1];
        sum += next.square();
        prev = cur;
        cur = next;
    }
    &rec.mass / &sum
}

fn seed_nodes(rec: &Recurrence, n: usize) -> Vec<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = rec.diag[k].to_f64();
        if k + 1 < n {
            let off = rec.beta[k + 1].to_f64().sqrt();
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes
}

/// Gauss rule for `(1-x)^a (1+x)^b` on `[-1,1]`.
fn gauss_jacobi_reference(a: f64, b: f64, n: usize, prec: u32) -> GaussRule {
    let rec = jacobi_recurrence(a, b, n, prec);
    let seeds = seed_nodes(&rec, n);
    let stop = Real::from_f64(2f64.powi(-(prec as i32) + 6), prec);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for s in seeds {
        let mut x = Real::from_f64(s, prec);
        for _ in 0..60 {
            let (p, dp) = eval_monic(&rec, n, &x);
            if dp.is_zero() {
                break;
            }
            let step = p / dp;
            x -= &step;
            if step.abs() <= stop {
                break;
            }
        }
        weights.push(christoffel_weight(&rec, n, &x));
        nodes.push(x);
    }
    GaussRule { nodes, weights }
}

type RuleKey = (u64, u64, usize, u32);

/// Reference rules are pure functions of their key, so they are memoised
/// process-wide.
fn cached_reference(a: f64, b: f64, n: usize, prec: u32) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    let key = (a.to_bits(), b.to_bits(), n, prec);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&key) {
        return r.clone();
    }
    let rule = Arc::new(gauss_jacobi_reference(a, b, n, prec));
    cache.lock().expect("rule cache poisoned").insert(key, rule.clone());
    rule
}

/// Gauss rule exact for polynomials of degree `2n-1` against
/// `(t-c)^alpha (d-t)^beta dt` on `[c, d]`.
pub fn jacobi_quadrature(
    c: &Real,
    d: &Real,
    alpha: f64,
    beta: f64,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<GaussRule> {
    if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidWeight { alpha, beta });
    }
    if n == 0 {
        return Err(Error::InvalidInput("quadrature size must be at least 1".into()));
    }
    if d <= c {
        return Err(Error::InvalidInput("quadrature interval must satisfy c < d".into()));
    }
    let prec = ctx.bits() + 32;
    // (1-x) pairs with the exponent at d, (1+x) with the one at c
    let reference = cached_reference(beta, alpha, n, prec);
    let c_w = c.with_prec(prec);
    let d_w = d.with_prec(prec);
    let mid = (&c_w + &d_w) / 2.0;
    let half = (&d_w - &c_w) / 2.0;
    let scale = half.powf(&(Real::from_f64(alpha, prec) + &Real::from_f64(beta, prec) + 1.0));
    let bits = ctx.bits();
    let nodes = reference
        .nodes
        .iter()
        .map(|x| (&mid + &(&half * x)).with_prec(bits))
        .collect();
    let weights = reference
        .weights
        .iter()
        .map(|w| (w * &scale).with_prec(bits))
        .collect();
    Ok(GaussRule { nodes, weights })
}

/// Gauss-Legendre rule on `[c, d]`.
pub fn legendre_quadrature(c: &Real, d: &Real, n: usize, ctx: &PrecisionContext) -> Result<GaussRule> {
    jacobi_quadrature(c, d, 0.0, 0.0, n, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn chebyshev_mass_is_pi() {
        let ctx = ctx();
        let rule = jacobi_quadrature(&ctx.real(-1.0), &ctx.real(1.0), -0.5, -0.5, 12, &ctx).unwrap();
        let pi = Real::pi(256);
        assert!((rule.weight_sum() - &pi).abs() < 1e-70);
        // second moment: pi * C(2,1)/4 = pi/2
        let m2 = rule.integrate_real(|t| t.square());
        assert!((m2 - &pi / 2.0).abs() < 1e-70);
    }

    #[test]
    fn lebesgue_unit_interval() {
        let ctx = ctx();
        let rule = legendre_quadrature(&ctx.real(0.0), &ctx.real(1.0), 5, &ctx).unwrap();
        assert!((rule.weight_sum() - 1.0).abs() < 1e-70);
    }

    #[test]
    fn exact_to_degree_2n_minus_1() {
        // int_0^1 t^k t^a (1-t)^b dt = B(k+a+1, b+1)
        let ctx = ctx();
        let (a, b) = (-0.3, 0.45);
        let n = 9;
        let rule = jacobi_quadrature(&ctx.real(0.0), &ctx.real(1.0), a, b, n, &ctx).unwrap();
        for k in 0..2 * n {
            let got = rule.integrate_real(|t| t.powi(k as i32));
            let x = ctx.real(a) + (k as f64 + 1.0);
            let y = ctx.real(b) + 1.0;
            let exact = (x.ln_gamma() + y.ln_gamma() - (x.clone() + &y).ln_gamma()).exp();
            let rel = ((got - &exact) / &exact).abs();
            assert!(rel < 100.0 * ctx.tol(), "k={k} rel={rel:?}");
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        let ctx = ctx();
        let err = jacobi_quadrature(&ctx.real(0.0), &ctx.real(1.0), -1.0, 0.0, 4, &ctx).unwrap_err();
        assert!(matches!(err, Error::InvalidWeight { .. }));
        assert!(jacobi_quadrature(&ctx.real(0.0), &ctx.real(1.0), 0.0, -1.5, 4, &ctx).is_err());
    }
}
