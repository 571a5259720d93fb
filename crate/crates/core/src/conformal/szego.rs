//! Geometric means and Szegő functions of complex weights on `[c, d]`.

use std::sync::Arc;

use crate::conformal::maps::{w, Side};
use crate::conformal::theta::{t_of, Break, ThetaQuad};
use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::poly::Poly;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::measure::MeasureSpec;

type WeightFn = Arc<dyn Fn(&Real) -> Cplx + Send + Sync>;

/// A nonvanishing (away from declared zeros) complex function on `[c, d]`.
#[derive(Clone)]
pub struct Weight {
    c: Real,
    d: Real,
    f: WeightFn,
    breaks: Vec<Break>,
    endpoint_singular: (bool, bool),
}

impl std::fmt::Debug for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Weight").field("c", &self.c).field("d", &self.d).field("breaks", &self.breaks).finish()
    }
}

impl Weight {
    pub fn new<F: Fn(&Real) -> Cplx + Send + Sync + 'static>(c: Real, d: Real, f: F) -> Self {
        Weight { c, d, f: Arc::new(f), breaks: Vec::new(), endpoint_singular: (false, false) }
    }

    pub fn constant(c: Real, d: Real, k: Cplx) -> Self {
        Weight::new(c, d, move |_| k.clone())
    }

    /// Jump discontinuity at `t`.
    pub fn with_jump(mut self, t: Real) -> Self {
        self.breaks.push(Break { t, singular: false });
        self
    }

    /// Algebraic zero (logarithmic singularity of `log f`) at interior `t`.
    pub fn with_zero(mut self, t: Real) -> Self {
        self.breaks.push(Break { t, singular: true });
        self
    }

    pub fn with_endpoint_zeros(mut self, at_c: bool, at_d: bool) -> Self {
        self.endpoint_singular = (self.endpoint_singular.0 || at_c, self.endpoint_singular.1 || at_d);
        self
    }

    /// Smooth factor `h` of a measure, without the algebraic factors.
    pub fn smooth_factor(m: &MeasureSpec) -> Self {
        let mm = m.clone();
        let mut out = Weight::new(m.c().clone(), m.d().clone(), move |t| mm.h(t));
        for p in m.pieces().iter().skip(1) {
            out = out.with_jump(p.from.clone());
        }
        out
    }

    /// Full density `h hbar hbar_x` of a measure against the arcsine distribution.
    pub fn density(m: &MeasureSpec) -> Self {
        let mm = m.clone();
        let (ac, ad) = m.endpoint_exponents();
        let mut out = Weight::new(m.c().clone(), m.d().clone(), move |t| mm.density(t)).with_endpoint_zeros(ac > 0.0, ad > 0.0);
        for p in m.pieces().iter().skip(1) {
            out = out.with_jump(p.from.clone());
        }
        for z in m.interior_zeros() {
            out = out.with_zero(z.x.clone());
        }
        out
    }

    pub fn polynomial(c: Real, d: Real, v: Poly) -> Self {
        Weight::new(c, d, move |t| v.eval(&Cplx::from_real(t)))
    }

    /// Pointwise product, keeping the breaks of both factors.
    pub fn times(&self, other: &Weight) -> Weight {
        let (f, g) = (self.f.clone(), other.f.clone());
        let mut breaks = self.breaks.clone();
        breaks.extend(other.breaks.iter().cloned());
        Weight {
            c: self.c.clone(),
            d: self.d.clone(),
            f: Arc::new(move |t| f(t) * g(t)),
            breaks,
            endpoint_singular: (
                self.endpoint_singular.0 || other.endpoint_singular.0,
                self.endpoint_singular.1 || other.endpoint_singular.1,
            ),
        }
    }

    pub fn eval(&self, t: &Real) -> Cplx {
        (self.f)(t)
    }

    pub fn interval(&self) -> (&Real, &Real) {
        (&self.c, &self.d)
    }

    pub fn breaks(&self) -> &[Break] {
        &self.breaks
    }

    pub fn endpoint_singular(&self) -> (bool, bool) {
        self.endpoint_singular
    }
}

/// Continuous branch of `arg f` along `[c, d]`, tracked on a dense grid.
#[derive(Debug, Clone)]
pub struct LogBranch {
    grid: Vec<f64>,
    args: Vec<f64>,
    jumps: Vec<f64>,
}

/// Default number of tracking samples.
pub const BRANCH_SAMPLES: usize = 4096;
const MAX_BRANCH_SAMPLES: usize = 1 << 18;

impl LogBranch {
    pub fn new(weight: &Weight, samples: usize) -> Result<Self> {
        let mut n = samples.max(16);
        let prec = weight.c.prec().min(128);
        let (c, d) = (weight.c.with_prec(prec), weight.d.with_prec(prec));
        let jumps: Vec<f64> = weight.breaks.iter().filter(|b| !b.singular).map(|b| b.t.to_f64()).collect();
        loop {
            let pi = Real::pi(prec);
            let mut grid = Vec::with_capacity(n + 1);
            let mut args = Vec::with_capacity(n + 1);
            let mut ok = true;
            let mut prev: Option<(f64, f64)> = None;
            // interior samples stay off the end points, where algebraic zeros
            // may sit; the end points themselves are used when the weight is
            // finite and nonzero there
            let fracs = std::iter::once(0.0)
                .chain((0..=n).map(|j| (j as f64 + 0.5) / (n as f64 + 1.0)))
                .chain(std::iter::once(1.0));
            for frac in fracs {
                let end = frac == 0.0 || frac == 1.0;
                let th = &pi * frac;
                let t = t_of(&c, &d, &th);
                let v = weight.eval(&t).with_prec(prec);
                if v.is_zero() || !v.is_finite() {
                    if end {
                        continue;
                    }
                    return Err(Error::Resolution("weight vanishes or is not finite at a tracking sample".into()));
                }
                let a = v.arg().to_f64();
                let tf = t.to_f64();
                let unwrapped = match prev {
                    None => a,
                    Some((pt, pa)) => {
                        let k = ((pa - a) / std::f64::consts::TAU).round();
                        let u = a + k * std::f64::consts::TAU;
                        let across_jump = jumps.iter().any(|&x| pt < x && x <= tf);
                        if !across_jump && (u - pa).abs() >= std::f64::consts::FRAC_PI_2 {
                            ok = false;
                            break;
                        }
                        u
                    }
                };
                grid.push(tf);
                args.push(unwrapped);
                prev = Some((tf, unwrapped));
            }
            if ok {
                return Ok(LogBranch { grid, args, jumps });
            }
            n *= 2;
            if n > MAX_BRANCH_SAMPLES {
                return Err(Error::Resolution("argument of the weight cannot be tracked; sample more densely".into()));
            }
        }
    }

    /// Reference argument at `t` (linear interpolation, never across a jump).
    fn reference(&self, t: f64) -> f64 {
        let i = self.grid.partition_point(|&g| g <= t);
        if i == 0 {
            return self.args[0];
        }
        if i == self.grid.len() {
            return self.args[i - 1];
        }
        let (t0, t1) = (self.grid[i - 1], self.grid[i]);
        if let Some(&x) = self.jumps.iter().find(|&&x| t0 < x && x <= t1) {
            return if t < x { self.args[i - 1] } else { self.args[i] };
        }
        let s = (t - t0) / (t1 - t0);
        self.args[i - 1] + s * (self.args[i] - self.args[i - 1])
    }

    /// `log f(t)` on the tracked branch given the value `v = f(t)`.
    pub fn log(&self, t: &Real, v: &Cplx) -> Cplx {
        let l = v.ln();
        let a = l.im().to_f64();
        let k = ((self.reference(t.to_f64()) - a) / std::f64::consts::TAU).round();
        if k == 0.0 {
            l
        } else {
            let prec = v.prec();
            l + Cplx::new(Real::zero(prec), Real::pi(prec) * (2.0 * k))
        }
    }

    /// Total variation of the argument over the sample grid.
    pub fn variation(&self) -> f64 {
        self.args.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// Szegő function data of a weight: geometric mean, interior values and
/// boundary values.
#[derive(Debug, Clone)]
pub struct Szego {
    weight: Weight,
    branch: LogBranch,
    quad: ThetaQuad,
    logs: Vec<Cplx>,
    mean_log: Cplx,
    ctx: PrecisionContext,
}

impl Szego {
    pub fn new(weight: Weight, ctx: &PrecisionContext) -> Result<Self> {
        let branch = LogBranch::new(&weight, BRANCH_SAMPLES)?;
        let quad = ThetaQuad::new(&weight.c, &weight.d, &weight.breaks, weight.endpoint_singular, ctx)?;
        let prec = ctx.bits();
        let mut logs = Vec::with_capacity(quad.nodes.len());
        let mut mean_log = Cplx::zero(prec);
        for (t, wt) in quad.nodes.iter().zip(&quad.weights) {
            let l = branch.log(t, &weight.eval(t));
            mean_log += &(&l * wt);
            logs.push(l);
        }
        Ok(Szego { weight, branch, quad, logs, mean_log, ctx: *ctx })
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn branch(&self) -> &LogBranch {
        &self.branch
    }

    /// `int log h d omega` on the tracked branch.
    pub fn log_geometric_mean(&self) -> &Cplx {
        &self.mean_log
    }

    pub fn geometric_mean(&self) -> Cplx {
        self.mean_log.exp()
    }

    /// `log h(t)` on the tracked branch.
    pub fn log_weight(&self, t: &Real) -> Cplx {
        self.branch.log(t, &self.weight.eval(t))
    }

    /// `S_h(z)` for `z` off `[c, d]`.
    pub fn eval(&self, z: &Cplx) -> Result<Cplx> {
        Ok(self.log_eval(z)?.exp())
    }

    pub fn log_eval(&self, z: &Cplx) -> Result<Cplx> {
        let (c, d) = (&self.weight.c, &self.weight.d);
        let wz = w(c, d, z, Side::Off)?;
        if !z.is_finite() {
            return Err(Error::Domain("Szegő function is evaluated at finite points".into()));
        }
        let x = z.re().max(c.clone()).min(d.clone());
        let dist = (&(z - &x)).abs();
        let prec = self.ctx.bits();
        let mut acc = Cplx::zero(prec);
        if dist.to_f64() > 2.0 * (d - c).to_f64() {
            for ((t, wt), l) in self.quad.nodes.iter().zip(&self.quad.weights).zip(&self.logs) {
                acc += &(l * wt / (z - t));
            }
        } else {
            let (nodes, weights) = self.quad.refined_near(&z.re(), &z.im().abs());
            for (t, wt) in nodes.iter().zip(&weights) {
                acc += &(self.log_weight(t) * wt / (z - t));
            }
        }
        Ok(acc * wz / 2.0 - &self.mean_log / 2.0)
    }

    /// Principal value `PV int log h(s)/(t - s) d omega(s)` at interior `t`.
    pub fn principal_value(&self, t: &Real) -> Result<Cplx> {
        let (c, d) = (&self.weight.c, &self.weight.d);
        if !(t > c && t < d) {
            return Err(Error::Domain("boundary values are taken at interior points".into()));
        }
        if self.weight.breaks.iter().any(|b| b.t == *t) {
            return Err(Error::Domain("boundary ratio is undefined at a break of the weight".into()));
        }
        let mut breaks = self.weight.breaks.clone();
        breaks.push(Break { t: t.clone(), singular: false });
        let quad = ThetaQuad::new(c, d, &breaks, self.weight.endpoint_singular, &self.ctx)?;
        let lt = self.log_weight(t);
        let mut acc = Cplx::zero(self.ctx.bits());
        for (s, ws) in quad.nodes.iter().zip(&quad.weights) {
            let ls = self.log_weight(s);
            acc += &((ls - &lt) * ws / (t - s));
        }
        Ok(acc)
    }

    /// `S_h^{+/-}(t)` at interior `t`.
    pub fn boundary(&self, t: &Real, side: Side) -> Result<Cplx> {
        let (c, d) = (&self.weight.c, &self.weight.d);
        let wp = w(c, d, &Cplx::from_real(t), Side::Plus)?;
        let pv = self.principal_value(t)?;
        let half = (wp * pv) / 2.0;
        let base = (self.log_weight(t) - &self.mean_log) / 2.0;
        match side {
            Side::Plus => Ok((half + base).exp()),
            Side::Minus => Ok((base - half).exp()),
            Side::Off => Err(Error::Domain("boundary value needs a side".into())),
        }
    }

    /// `scf^{+/-}(t) = S^{+/-}(t)/S^{-/+}(t)`.
    pub fn scf(&self, t: &Real, side: Side) -> Result<Cplx> {
        let (c, d) = (&self.weight.c, &self.weight.d);
        let wp = w(c, d, &Cplx::from_real(t), Side::Plus)?;
        let e = wp * self.principal_value(t)?;
        match side {
            Side::Plus => Ok(e.exp()),
            Side::Minus => Ok((-e).exp()),
            Side::Off => Err(Error::Domain("boundary ratio needs a side".into())),
        }
    }
}

/// `G_h = exp int log h d omega`.
pub fn geometric_mean(weight: &Weight, ctx: &PrecisionContext) -> Result<Cplx> {
    Ok(Szego::new(weight.clone(), ctx)?.geometric_mean())
}

/// `S_h(z)` off the cut.
pub fn szego_function(weight: &Weight, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
    Szego::new(weight.clone(), ctx)?.eval(z)
}
