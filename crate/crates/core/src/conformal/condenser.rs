//! The condenser `([c, d], T)`: the constant `tau`, the modulus `rho`, the map
//! `Phi` onto the annulus `rho < |z| < 1/rho`, and the Green equilibrium
//! distribution.

use num_complex::Complex64;

use crate::conformal::maps::{ell, psi, stilde, w, Side};
use crate::conformal::theta::{Break, ThetaQuad};
use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::quadrature::{jacobi_quadrature, legendre_quadrature, GaussRule};
use crate::kernel::scalar::{Cplx, Real};

/// Data that exist only when `[c, d]` lies in the open unit disk.
#[derive(Debug, Clone)]
pub struct Condenser {
    pub tau: Real,
    pub rho: Real,
    pub green_nodes: Vec<Real>,
    pub green_weights: Vec<Real>,
    /// `max |psi|` on the unit circle
    pub s0: f64,
    /// `max |psi'|` on the unit circle
    pub s1: f64,
    /// largest relative deviation of `|Phi^+|` from `rho` at interior samples
    pub rho_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct CondenserGeometry {
    c: Real,
    d: Real,
    ell: Real,
    condenser: Option<Condenser>,
    legendre: GaussRule,
    ctx: PrecisionContext,
}

/// Circle samples used to locate the maxima `s0`, `s1`.
const CIRCLE_SAMPLES: usize = 8192;

impl CondenserGeometry {
    /// `grid_n` is the size of the Green quadrature (at least 16).
    pub fn new(c: &Real, d: &Real, grid_n: usize, ctx: &PrecisionContext) -> Result<Self> {
        if !(c < d) {
            return Err(Error::InvalidInput("interval must satisfy c < d".into()));
        }
        if grid_n < 16 {
            return Err(Error::InvalidInput("grid_n must be at least 16".into()));
        }
        let prec = ctx.bits();
        let (c, d) = (c.with_prec(prec), d.with_prec(prec));
        let legendre = legendre_quadrature(&Real::from_f64(-1.0, prec), &Real::one(prec), crate::conformal::theta::panel_order(prec), ctx)?;
        let mut g = CondenserGeometry { ell: ell(&c, &d), c, d, condenser: None, legendre, ctx: *ctx };
        if g.c.abs() < 1.0 && g.d.abs() < 1.0 {
            g.condenser = Some(g.build(grid_n)?);
        }
        Ok(g)
    }

    fn build(&self, grid_n: usize) -> Result<Condenser> {
        let ctx = &self.ctx;
        let tau = tau(&self.c, &self.d, ctx)?;
        let rho = rho(&self.c, &self.d, &tau, ctx)?;
        let rule = jacobi_quadrature(&self.c, &self.d, -0.5, -0.5, grid_n, ctx)?;
        let pi = Real::pi(ctx.bits());
        let t2 = tau.square();
        let mut green_weights = Vec::with_capacity(grid_n);
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            let s = stilde(&self.c, &self.d, &Cplx::from_real(t)).re();
            green_weights.push(wt * &t2 / (&pi * &s));
        }
        let (s0, s1) = circle_maxima(self.c.to_f64(), self.d.to_f64());
        let mut out = Condenser { tau, rho, green_nodes: rule.nodes, green_weights, s0, s1, rho_deviation: 0.0 };
        let geom = CondenserGeometry { condenser: Some(out.clone()), ..self.clone() };
        let mut dev: f64 = 0.0;
        for k in 1..=4 {
            let t = &self.c + &((&self.d - &self.c) * (k as f64 / 5.0));
            let v = geom.condenser_map(&Cplx::from_real(&t), Side::Plus)?;
            dev = dev.max(((v.abs() - &out.rho) / &out.rho).abs().to_f64());
        }
        out.rho_deviation = dev;
        if dev > 1e-8 {
            return Err(Error::Accuracy { what: "condenser modulus".into(), achieved: dev });
        }
        Ok(out)
    }

    pub fn c(&self) -> &Real {
        &self.c
    }

    pub fn d(&self) -> &Real {
        &self.d
    }

    /// `l = 4/(d - c)`.
    pub fn ell(&self) -> &Real {
        &self.ell
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn condenser(&self) -> Result<&Condenser> {
        self.condenser
            .as_ref()
            .ok_or_else(|| Error::Domain("condenser data need [c, d] inside the unit disk".into()))
    }

    pub fn tau(&self) -> Result<&Real> {
        Ok(&self.condenser()?.tau)
    }

    pub fn rho(&self) -> Result<&Real> {
        Ok(&self.condenser()?.rho)
    }

    pub fn s0(&self) -> Result<f64> {
        Ok(self.condenser()?.s0)
    }

    pub fn s1(&self) -> Result<f64> {
        Ok(self.condenser()?.s1)
    }

    /// `int f d omega_G` on the Green quadrature.
    pub fn green_integrate<F: FnMut(&Real) -> Real>(&self, mut f: F) -> Result<Real> {
        let cd = self.condenser()?;
        let mut acc = Real::zero(self.ctx.bits());
        for (t, wt) in cd.green_nodes.iter().zip(&cd.green_weights) {
            acc += f(t) * wt;
        }
        Ok(acc)
    }

    /// Quadrature for `d omega_G` that resolves logarithmic singularities at
    /// the given interior points and (optionally) at the end points.
    pub fn green_quad_singular(&self, breaks: &[Break], endpoint_singular: (bool, bool)) -> Result<(Vec<Real>, Vec<Real>)> {
        let t2 = self.tau()?.square();
        let q = ThetaQuad::new(&self.c, &self.d, breaks, endpoint_singular, &self.ctx)?;
        let weights = q
            .nodes
            .iter()
            .zip(&q.weights)
            .map(|(t, wt)| wt * &t2 / stilde(&self.c, &self.d, &Cplx::from_real(t)).re())
            .collect();
        Ok((q.nodes, weights))
    }

    /// `exp int log|f| d omega_G` with the singular structure of `f` declared.
    pub fn green_geometric_mean<F: Fn(&Real) -> Real>(&self, f: F, breaks: &[Break], endpoint_singular: (bool, bool)) -> Result<Real> {
        let (nodes, weights) = self.green_quad_singular(breaks, endpoint_singular)?;
        let mut acc = Real::zero(self.ctx.bits());
        for (t, wt) in nodes.iter().zip(&weights) {
            let v = f(t);
            if !(v > 0.0) {
                return Err(Error::Resolution("Green geometric mean of a weight vanishing at a node".into()));
            }
            acc += v.ln() * wt;
        }
        Ok(acc.exp())
    }

    fn integrand(&self, z: &Cplx) -> Cplx {
        let wz = (z - &self.c).sqrt() * (z - &self.d).sqrt();
        (wz * stilde(&self.c, &self.d, z)).recip()
    }

    fn on_reflected_cut(&self, z: &Cplx) -> bool {
        if !z.im().is_zero() || z.re().is_zero() {
            return false;
        }
        let inv = z.re().recip();
        inv >= self.c && inv <= self.d
    }

    /// Real points reachable from 1 along the real axis without crossing a cut.
    fn in_right_gap(&self, x: &Real) -> bool {
        let lo = self.d.clone();
        let hi = if self.d > 0.0 { self.d.recip() } else { Real::from_f64(f64::INFINITY, x.prec()) };
        let blocked_by_c = self.c > 0.0 && *x >= self.c.recip();
        *x > lo && *x < hi && !blocked_by_c
    }

    /// `Phi(z)` with `Phi(1) = 1`; on a cut `side` selects the boundary value.
    pub fn condenser_map(&self, z: &Cplx, side: Side) -> Result<Cplx> {
        let cd = self.condenser()?;
        let prec = self.ctx.bits();
        if !z.is_finite() {
            return Err(Error::Domain("condenser map is evaluated at finite points".into()));
        }
        let z = z.with_prec(prec);
        let real = z.im().is_zero();
        let on_cut = real && (crate::conformal::maps::on_interval(&self.c, &self.d, &z) || self.on_reflected_cut(&z));
        if on_cut && side == Side::Off {
            return Err(Error::Domain(format!("{:.6} lies on a cut; choose a side", z)));
        }
        // end points map to the real axis
        let x = z.re();
        if real && (x == self.c || x == self.d) {
            let r = cd.rho.clone();
            return Ok(Cplx::from_real(&if x == self.d { r } else { -r }));
        }
        if real && !x.is_zero() && (x.recip() == self.c || x.recip() == self.d) {
            let r = cd.rho.recip();
            return Ok(Cplx::from_real(&if x.recip() == self.d { r } else { -r }));
        }
        let one = Cplx::one(prec);
        let integral = if !real || self.in_right_gap(&x) {
            self.path_integral(&one, &z)
        } else {
            let sign = if side == Side::Minus { -1.0 } else { 1.0 };
            let way = Cplx::new(Real::zero(prec), (z.abs() + 1.0) * sign);
            self.path_integral(&one, &way) + self.path_integral(&way, &z)
        };
        Ok((integral * cd.tau.square()).exp())
    }

    fn path_integral(&self, a: &Cplx, b: &Cplx) -> Cplx {
        let tol = self.ctx.tol() * 1e-3;
        let whole = self.gauss(a, b);
        self.adaptive(a, b, whole, tol, 0)
    }

    fn gauss(&self, a: &Cplx, b: &Cplx) -> Cplx {
        let mid = (a + b) / 2.0;
        let half = (b - a) / 2.0;
        let mut acc = Cplx::zero(self.ctx.bits());
        for (x, wt) in self.legendre.nodes.iter().zip(&self.legendre.weights) {
            let z = &mid + &(&half * x);
            acc += &(self.integrand(&z) * wt);
        }
        acc * half
    }

    fn adaptive(&self, a: &Cplx, b: &Cplx, whole: Cplx, tol: f64, depth: usize) -> Cplx {
        let mid = (a + b) / 2.0;
        let left = self.gauss(a, &mid);
        let right = self.gauss(&mid, b);
        let sum = &left + &right;
        let err = (&sum - &whole).abs();
        if depth >= 200 || err <= (sum.abs() + 1.0) * tol {
            return sum;
        }
        self.adaptive(a, &mid, left, tol, depth + 1) + self.adaptive(&mid, b, right, tol, depth + 1)
    }

    /// `|Phi^+(t)|` at an interior point, the second route to `rho`.
    pub fn boundary_modulus(&self, t: &Real) -> Result<Real> {
        Ok(self.condenser_map(&Cplx::from_real(t), Side::Plus)?.abs())
    }

    pub fn psi(&self, z: &Cplx, side: Side) -> Result<Cplx> {
        psi(&self.c, &self.d, z, side)
    }

    pub fn w(&self, z: &Cplx, side: Side) -> Result<Cplx> {
        w(&self.c, &self.d, z, side)
    }

    pub fn stilde(&self, z: &Cplx) -> Cplx {
        stilde(&self.c, &self.d, z)
    }
}

pub fn build_geometry(c: &Real, d: &Real, grid_n: usize, ctx: &PrecisionContext) -> Result<CondenserGeometry> {
    CondenserGeometry::new(c, d, grid_n, ctx)
}

/// `T^{-2} = (2/pi) int_0^1 dx / sqrt((1 - x^2)((1 - cd)^2 - (d - c)^2 x^2))`,
/// evaluated as a Gauss-Chebyshev sum over `[-1, 1]` with doubling.
pub fn tau(c: &Real, d: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let prec = ctx.bits();
    let a = (Real::one(prec) - c * d).square();
    let b = (d - c).square();
    let pi = Real::pi(prec);
    let sum = |n: usize| -> Real {
        // Chebyshev nodes cos((2k+1) pi/(2n)), weights pi/n
        let mut acc = Real::zero(prec);
        for k in 0..n / 2 {
            let x = (&pi * ((2 * k + 1) as f64 / (2 * n) as f64)).cos();
            acc += (&a - &b * x.square()).sqrt().recip();
        }
        acc * 2.0 / n as f64
    };
    let mut n = 64;
    let mut prev = sum(n);
    loop {
        n *= 2;
        let cur = sum(n);
        if (&cur - &prev).abs() <= cur.clone() * ctx.eps() * 64.0 {
            return Ok(cur.recip().sqrt());
        }
        if n > 1 << 20 {
            return Err(Error::Accuracy { what: "condenser constant".into(), achieved: ((&cur - &prev) / &cur).abs().to_f64() });
        }
        prev = cur;
    }
}

/// `rho = exp(-T^2 int_d^1 dt/(w S~))`, the modulus of `Phi(d)`.
pub fn rho(c: &Real, d: &Real, tau: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let prec = ctx.bits();
    let one = Real::one(prec);
    let f = |t: &Real| -> Real {
        let s = stilde(c, d, &Cplx::from_real(t)).re();
        ((t - c).sqrt() * s).recip()
    };
    let mut n = 32;
    let mut prev = jacobi_quadrature(d, &one, -0.5, 0.0, n, ctx)?.integrate_real(f);
    loop {
        n *= 2;
        let cur = jacobi_quadrature(d, &one, -0.5, 0.0, n, ctx)?.integrate_real(f);
        if (&cur - &prev).abs() <= cur.clone() * ctx.eps() * 64.0 {
            return Ok((-(cur * tau.square())).exp());
        }
        if n >= 4096 {
            return Err(Error::Accuracy { what: "condenser modulus".into(), achieved: ((&cur - &prev) / &cur).abs().to_f64() });
        }
        prev = cur;
    }
}

fn psi64(c: f64, d: f64, z: Complex64) -> Complex64 {
    let w = (z - c).sqrt() * (z - d).sqrt();
    (d - c) / (2.0 * z - (c + d) + 2.0 * w)
}

fn dpsi64(c: f64, d: f64, z: Complex64) -> Complex64 {
    let w = (z - c).sqrt() * (z - d).sqrt();
    let den = 2.0 * z - (c + d) + 2.0 * w;
    let dw = (2.0 * z - (c + d)) / (2.0 * w);
    -(d - c) * (2.0 + 2.0 * dw) / (den * den)
}

/// `max |psi|` and `max |psi'|` over the unit circle: dense sampling, then a
/// golden-section refinement around the best sample.
pub fn circle_maxima(c: f64, d: f64) -> (f64, f64) {
    let f0 = |th: f64| psi64(c, d, Complex64::from_polar(1.0, th)).norm();
    let f1 = |th: f64| dpsi64(c, d, Complex64::from_polar(1.0, th)).norm();
    (circle_max(f0), circle_max(f1))
}

fn circle_max<F: Fn(f64) -> f64>(f: F) -> f64 {
    let h = std::f64::consts::TAU / CIRCLE_SAMPLES as f64;
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for k in 0..CIRCLE_SAMPLES {
        let th = k as f64 * h;
        let v = f(th);
        if v > best {
            best = v;
            arg = th;
        }
    }
    let (mut a, mut b) = (arg - h, arg + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) > f(x2) {
            b = x2;
        } else {
            a = x1;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    best.max(f((a + b) / 2.0))
}
