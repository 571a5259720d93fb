//! Non-Hermitian orthogonal polynomials for varying complex weights
//! `d nu = h_n * hbar * hbar_x / v d omega`, their functions of the second
//! kind, and the Szegő-type strong asymptotics they obey.

use crate::conformal::maps::{ell, psi, w, Side};
use crate::conformal::szego::{Szego, Weight};
use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::linalg::{nullspace_solve, solve_pivoted, CMatrix};
use crate::kernel::poly::Poly;
use crate::kernel::roots::poly_roots;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::expr::Expr;
use crate::model::measure::{MeasureSpec, NodeSet};

/// `nu = base * extra_smooth * factor / divisor`.
///
/// `factor` is not one of the named slots of the weight family but is where
/// polynomial multipliers such as `q_{n+m,m} q` live.
#[derive(Debug, Clone)]
pub struct VaryingWeight {
    base: MeasureSpec,
    extra_smooth: Option<Expr>,
    factor: Poly,
    divisor: Poly,
    divisor_roots: Vec<Cplx>,
    m_shift: usize,
}

impl VaryingWeight {
    pub fn new(base: MeasureSpec) -> Self {
        let prec = base.c().prec();
        VaryingWeight {
            base,
            extra_smooth: None,
            factor: Poly::one(prec),
            divisor: Poly::one(prec),
            divisor_roots: Vec::new(),
            m_shift: 0,
        }
    }

    pub fn with_extra_smooth(mut self, e: Expr) -> Self {
        self.extra_smooth = Some(e);
        self
    }

    pub fn with_factor(mut self, p: Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidInput("weight factor must not vanish identically".into()));
        }
        self.factor = p;
        Ok(self)
    }

    /// Divides by `v`, whose roots must stay off `[c, d]`.
    pub fn with_divisor(mut self, v: Poly, ctx: &PrecisionContext) -> Result<Self> {
        let roots = match v.degree() {
            None => return Err(Error::InvalidInput("divisor must not vanish identically".into())),
            Some(0) => Vec::new(),
            Some(_) => poly_roots(&v, ctx)?,
        };
        let (c, d) = (self.base.c(), self.base.d());
        let tiny = 1e-12 * (d - c).to_f64();
        for r in &roots {
            if cut_distance(c, d, r) <= tiny {
                return Err(Error::Domain("a divisor root lies on the support".into()));
            }
        }
        self.divisor = v;
        self.divisor_roots = roots;
        Ok(self)
    }

    pub fn with_m_shift(mut self, m: usize) -> Self {
        self.m_shift = m;
        self
    }

    pub fn base(&self) -> &MeasureSpec {
        &self.base
    }

    pub fn divisor(&self) -> &Poly {
        &self.divisor
    }

    pub fn factor(&self) -> &Poly {
        &self.factor
    }

    pub fn m_shift(&self) -> usize {
        self.m_shift
    }

    pub fn interval(&self) -> (&Real, &Real) {
        (self.base.c(), self.base.d())
    }

    /// `extra_smooth * factor / divisor` at `t`.
    pub fn modifier(&self, t: &Real) -> Cplx {
        let tc = Cplx::from_real(t);
        let mut g = self.factor.eval(&tc) / self.divisor.eval(&tc);
        if let Some(e) = &self.extra_smooth {
            g *= &e.eval_real(t);
        }
        g
    }

    /// Density of `nu` against the arcsine distribution, as a Szegő weight.
    pub fn weight(&self) -> Weight {
        let me = self.clone();
        let (c, d) = (self.base.c().clone(), self.base.d().clone());
        Weight::density(&self.base).times(&Weight::new(c, d, move |t| me.modifier(t)))
    }

    fn nodes(&self, points: &[Cplx], extra: usize, ctx: &PrecisionContext) -> Result<NodeSet> {
        let mut pts = self.divisor_roots.clone();
        pts.extend(points.iter().cloned());
        let mut ns = if pts.is_empty() {
            (*self.base.nodes(extra, ctx)?).clone()
        } else {
            self.base.nodes_near(&pts, 1, extra, ctx)?
        };
        for (t, w) in ns.nodes.iter().zip(ns.weights.iter_mut()) {
            *w *= &self.modifier(t);
        }
        Ok(ns)
    }

    /// `int f d nu`, checked against a larger rule.
    pub fn integrate<F: Fn(&Real) -> Cplx>(&self, f: F, points: &[Cplx], degree: usize, ctx: &PrecisionContext) -> Result<Cplx> {
        let prec = ctx.bits();
        let mut extra = degree / 2 + 4;
        let mut last = f64::INFINITY;
        for _ in 0..6 {
            let lo = self.nodes(points, extra, ctx)?.integrate(prec, &f);
            let hi_set = self.nodes(points, extra + extra / 2 + 8, ctx)?;
            let hi = hi_set.integrate(prec, &f);
            let scale = hi_set.integrate_abs(prec, |t| f(t).abs());
            let err = (&lo - &hi).abs();
            if err <= scale.clone() * ctx.tol() || scale.is_zero() {
                return Ok(hi);
            }
            last = (err / scale).to_f64();
            extra *= 2;
        }
        Err(Error::Accuracy { what: "varying-weight integral".into(), achieved: last })
    }

    /// `int s^k d nu` for `k < count`, where `t = a + b s`.
    pub fn moments_about(&self, a: &Real, b: &Real, count: usize, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
        let prec = ctx.bits();
        let inv_b = b.recip();
        let sums = |ns: &NodeSet| -> (Vec<Cplx>, Vec<Real>) {
            let mut out = vec![Cplx::zero(prec); count];
            let mut abs = vec![Real::zero(prec); count];
            for (t, w) in ns.nodes.iter().zip(&ns.weights) {
                let s = (t - a) * &inv_b;
                let sa = s.abs();
                let mut pw = w.clone();
                let mut pa = w.abs();
                for (o, oa) in out.iter_mut().zip(abs.iter_mut()) {
                    *o += &pw;
                    *oa += &pa;
                    pw *= &s;
                    pa *= &sa;
                }
            }
            (out, abs)
        };
        let mut extra = count / 2 + 4;
        let mut last = f64::INFINITY;
        for _ in 0..6 {
            let (lo, _) = sums(&self.nodes(&[], extra, ctx)?);
            let (hi, scale) = sums(&self.nodes(&[], extra + extra / 2 + 8, ctx)?);
            let worst = lo
                .iter()
                .zip(&hi)
                .zip(&scale)
                .map(|((l, h), s)| if s.is_zero() { 0.0 } else { ((l - h).abs() / s).to_f64() })
                .fold(0.0, f64::max);
            if worst <= ctx.tol() {
                return Ok(hi);
            }
            last = worst;
            extra *= 2;
        }
        Err(Error::Accuracy { what: "varying-weight moments".into(), achieved: last })
    }
}

fn cut_distance(c: &Real, d: &Real, z: &Cplx) -> f64 {
    let x = z.re();
    let dx = if x < *c {
        (c - &x).to_f64()
    } else if x > *d {
        (&x - d).to_f64()
    } else {
        0.0
    };
    dx.hypot(z.im().to_f64())
}

/// Center and half-width of `[c, d]`, the variable in which the moment
/// systems are solved.
pub fn support_frame(c: &Real, d: &Real) -> (Real, Real) {
    ((c + d) / 2.0, (d - c) / 2.0)
}

/// Maps a polynomial in `s = (z - a) / b` back to `z`, multiplying by `b^n`
/// so monic stays monic.
pub fn from_frame(p: &Poly, a: &Real, b: &Real, n: usize) -> Poly {
    let prec = p.prec();
    let inv_b = Cplx::from_real(&b.recip());
    let shift = Cplx::from_real(&(-(a / b)));
    let bn = Cplx::from_real(&b.powi(n as i32));
    let out = p.compose_affine(&inv_b, &shift).scale(&bn);
    Poly::new(out.into_coeffs().into_iter().map(|c| c.with_prec(prec)).collect(), prec)
}

#[derive(Debug, Clone)]
pub struct OrthoResult {
    /// Orthogonal polynomial, monic unless `monic` is false.
    pub u: Poly,
    /// `int t^n u d nu`, the constant the second-kind function carries at infinity.
    pub gamma: Cplx,
    /// `|int t^j u d nu|` for `j < n`, relative to the largest moment.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub monic: bool,
    /// Numerical rank of the moment matrix.
    pub rank: usize,
}

impl OrthoResult {
    pub fn degree(&self) -> Option<usize> {
        self.u.degree()
    }
}

/// Residual bound `10^(-bits/4)` for the orthogonality relations.
pub fn residual_tolerance(ctx: &PrecisionContext) -> f64 {
    10f64.powf(-(ctx.bits() as f64) / 4.0)
}

/// Degree-`n` orthogonal polynomial of `nu` from its moment system.
pub fn orthogonal_poly(nu: &VaryingWeight, n: usize, ctx: &PrecisionContext) -> Result<OrthoResult> {
    let prec = ctx.bits();
    let (c, d) = nu.interval();
    let (a, b) = support_frame(c, d);
    let mu = nu.moments_about(&a, &b, 2 * n + 1, ctx)?;
    if n == 0 {
        return Ok(OrthoResult {
            u: Poly::one(prec),
            gamma: mu[0].clone(),
            residuals: Vec::new(),
            max_residual: 0.0,
            monic: true,
            rank: 0,
        });
    }
    let (coeffs, monic, rank) = solve_moment_system(&mu, n, ctx)?;
    let scale = mu.iter().map(|m| m.abs()).fold(Real::zero(prec), Real::max);
    let residuals: Vec<f64> = (0..n)
        .map(|j| {
            let mut r = Cplx::zero(prec);
            for (i, ui) in coeffs.iter().enumerate() {
                r += &(ui * &mu[i + j]);
            }
            (r.abs() / &scale).to_f64()
        })
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let mut gamma = Cplx::zero(prec);
    for (i, ui) in coeffs.iter().enumerate() {
        gamma += &(ui * &mu[i + n]);
    }
    gamma *= &b.powi(2 * n as i32);
    let us = Poly::new(coeffs, prec);
    Ok(OrthoResult { u: from_frame(&us, &a, &b, n), gamma, residuals, max_residual, monic, rank })
}

/// Solves `sum_i u_i mu_{i+j} = 0`, `j < n`, with `u_n = 1` when possible.
/// Returns the coefficients, whether they are monic, and the numerical rank.
pub(crate) fn solve_moment_system(mu: &[Cplx], n: usize, ctx: &PrecisionContext) -> Result<(Vec<Cplx>, bool, usize)> {
    let prec = ctx.bits();
    let a = CMatrix::from_fn(n, n, |j, i| mu[i + j].clone());
    let rhs: Vec<Cplx> = (0..n).map(|j| -mu[n + j].clone()).collect();
    let sol = solve_pivoted(&a, &rhs, ctx)?;
    if sol.rank == n && sol.diag_ratio > ctx.eps() * 1e4 {
        let mut u = sol.x;
        u.push(Cplx::one(prec));
        return Ok((u, true, n));
    }
    let full = CMatrix::from_fn(n, n + 1, |j, i| mu[i + j].clone());
    let v = nullspace_solve(&full, ctx)?;
    let norm = crate::kernel::scalar::cnorm(&v);
    if v[n].abs() >= &norm * 1e-8 {
        let inv = v[n].recip();
        let mut u: Vec<Cplx> = v.iter().map(|x| x * &inv).collect();
        u[n] = Cplx::one(prec);
        return Ok((u, true, sol.rank));
    }
    Ok((v, false, sol.rank))
}

/// `R(z) = int u(t) d nu(t) / (z - t)`.
pub fn second_kind(nu: &VaryingWeight, u: &Poly, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
    check_off_cut(nu, z)?;
    let zz = z.with_prec(ctx.bits());
    let deg = u.degree().unwrap_or(0);
    nu.integrate(|t| u.eval(&Cplx::from_real(t)) / (&zz - t), std::slice::from_ref(&zz), deg, ctx)
}

/// The same function as `(1/u(z)) int u^2(t) d nu(t) / (z - t)`.
pub fn second_kind_squared(nu: &VaryingWeight, u: &Poly, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
    check_off_cut(nu, z)?;
    let zz = z.with_prec(ctx.bits());
    let deg = 2 * u.degree().unwrap_or(0);
    let v = nu.integrate(|t| u.eval(&Cplx::from_real(t)).square() / (&zz - t), std::slice::from_ref(&zz), deg, ctx)?;
    Ok(v / u.eval(&zz))
}

fn check_off_cut(nu: &VaryingWeight, z: &Cplx) -> Result<()> {
    let (c, d) = nu.interval();
    if !z.is_finite() || cut_distance(c, d, z) <= 1e-12 * (d - c).to_f64() {
        return Err(Error::Domain("second-kind function needs z off [c, d]".into()));
    }
    Ok(())
}

/// Predicted `S_n(z)` and `gamma_n` for the strong asymptotics
/// `u_n S_n -> 1`, `R_n w -> gamma_n S_n`.
#[derive(Debug, Clone)]
pub struct OrthoPrediction {
    pub s_n: Cplx,
    pub gamma: Cplx,
}

/// Szegő data of `nu` reused across `n` and `z`.
#[derive(Debug, Clone)]
pub struct OrthoPredictor {
    c: Real,
    d: Real,
    ell: Real,
    szego: Szego,
}

impl OrthoPredictor {
    pub fn new(nu: &VaryingWeight, ctx: &PrecisionContext) -> Result<Self> {
        let (c, d) = nu.interval();
        Ok(OrthoPredictor { c: c.clone(), d: d.clone(), ell: ell(c, d), szego: Szego::new(nu.weight(), ctx)? })
    }

    pub fn szego(&self) -> &Szego {
        &self.szego
    }

    pub fn predict(&self, n: usize, z: &Cplx) -> Result<OrthoPrediction> {
        let ps = psi(&self.c, &self.d, z, Side::Off)?;
        let s_n = self.szego.eval(z)? * (ps * &self.ell).powi(n as i64);
        let gamma = self.szego.geometric_mean() * (self.ell.powi(-2 * n as i32) * 2.0);
        Ok(OrthoPrediction { s_n, gamma })
    }

    /// `u(z) S_n(z)` and `R(z) w(z) / (gamma_n S_n(z))`, both tending to 1.
    pub fn products(&self, n: usize, z: &Cplx, u: &Poly, r: &Cplx) -> Result<(Cplx, Cplx)> {
        let p = self.predict(n, z)?;
        let wz = w(&self.c, &self.d, z, Side::Off)?;
        let first = u.eval(z) * &p.s_n;
        let second = r * &wz / (&p.gamma * &p.s_n);
        Ok((first, second))
    }
}

/// One-shot form of [`OrthoPredictor::predict`].
pub fn predict_ortho(nu: &VaryingWeight, n: usize, z: &Cplx, ctx: &PrecisionContext) -> Result<OrthoPrediction> {
    OrthoPredictor::new(nu, ctx)?.predict(n, z)
}

#[cfg(test)]
mod tests;
