//! `C(z) = int dmu(t)/(z - t) + p(z)/q(z)`.

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::measure::{MeasureSpec, NodeSet};
use crate::model::rational::RationalPart;

/// Default distance (relative to `d - c`) that evaluation points must keep
/// from the support and from the poles.
pub const DEFAULT_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CauchyFunction {
    measure: Option<MeasureSpec>,
    rational: Option<RationalPart>,
    exclusion_radius: f64,
}

impl CauchyFunction {
    pub fn new(measure: Option<MeasureSpec>, rational: Option<RationalPart>) -> Result<Self> {
        if measure.is_none() && rational.is_none() {
            return Err(Error::InvalidInput("function needs a measure or a rational part".into()));
        }
        let f = CauchyFunction { measure, rational, exclusion_radius: DEFAULT_EXCLUSION };
        if let (Some(m), Some(r)) = (&f.measure, &f.rational) {
            for e in r.poles() {
                if f.cut_distance_of(m, &e.eta) <= f.exclusion(m) {
                    return Err(Error::InvalidInput("a pole of p/q lies on the support".into()));
                }
            }
        }
        Ok(f)
    }

    pub fn markov(measure: MeasureSpec) -> Self {
        CauchyFunction { measure: Some(measure), rational: None, exclusion_radius: DEFAULT_EXCLUSION }
    }

    pub fn with_exclusion_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidInput("exclusion radius must be positive".into()));
        }
        self.exclusion_radius = r;
        Ok(self)
    }

    pub fn measure(&self) -> Option<&MeasureSpec> {
        self.measure.as_ref()
    }

    pub fn rational(&self) -> Option<&RationalPart> {
        self.rational.as_ref()
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    /// `m = deg q` (zero without rational part).
    pub fn m(&self) -> usize {
        self.rational.as_ref().map(|r| r.degree()).unwrap_or(0)
    }

    /// Support interval `[c, d]`.
    pub fn interval(&self) -> Option<(Real, Real)> {
        self.measure.as_ref().map(|m| (m.c().clone(), m.d().clone()))
    }

    /// `k * C` with the constant given as an expression.
    pub fn scaled(&self, factor: &str, ctx: &PrecisionContext) -> Result<Self> {
        let k = crate::model::expr::Expr::parse(factor)?.constant(ctx.bits())?;
        Ok(CauchyFunction {
            measure: self.measure.as_ref().map(|m| m.scaled(factor)).transpose()?,
            rational: self.rational.as_ref().map(|r| r.scaled(&k)),
            exclusion_radius: self.exclusion_radius,
        })
    }

    fn exclusion(&self, m: &MeasureSpec) -> f64 {
        self.exclusion_radius * (m.d() - m.c()).to_f64()
    }

    fn cut_distance_of(&self, m: &MeasureSpec, z: &Cplx) -> f64 {
        let x = z.re();
        let y = z.im().abs().to_f64();
        let dx = if x < *m.c() {
            (m.c() - &x).to_f64()
        } else if x > *m.d() {
            (&x - m.d()).to_f64()
        } else {
            0.0
        };
        dx.hypot(y)
    }

    /// Checks that `z` keeps the exclusion distance from the support and the poles.
    pub fn check_domain(&self, z: &Cplx) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::Domain("evaluation point is not finite".into()));
        }
        if let Some(m) = &self.measure {
            if self.cut_distance_of(m, z) <= self.exclusion(m) {
                return Err(Error::Domain(format!("{:.6} is within the exclusion radius of the support", z)));
            }
        }
        if let Some(r) = &self.rational {
            let scale = self.measure.as_ref().map(|m| self.exclusion(m)).unwrap_or(self.exclusion_radius);
            if r.pole_distance(z).to_f64() <= scale {
                return Err(Error::Domain(format!("{:.6} is within the exclusion radius of a pole", z)));
            }
        }
        Ok(())
    }

    /// Whether `[c, d]` and all poles lie in the open unit disk.
    pub fn inside_unit_disk(&self) -> bool {
        let m_ok = self.measure.as_ref().map(|m| m.c().abs() < 1.0 && m.d().abs() < 1.0).unwrap_or(true);
        let r_ok = self.rational.as_ref().map(|r| r.poles().iter().all(|e| e.eta.abs() < 1.0)).unwrap_or(true);
        m_ok && r_ok
    }

    /// Laurent coefficients at infinity, `C(z) = sum_k c_k z^{-k-1}`.
    pub fn moments(&self, count: usize, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
        let prec = ctx.bits();
        self.moments_about(&Real::zero(prec), &Real::one(prec), count, ctx)
    }

    /// Laurent coefficients of `s -> C(a + b s)` at infinity. Centering and
    /// scaling to the support keeps Hankel systems built from them far better
    /// conditioned than the raw moments.
    pub fn moments_about(&self, a: &Real, b: &Real, count: usize, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
        let prec = ctx.bits();
        if !(b.to_f64() > 0.0) {
            return Err(Error::InvalidInput("moment scale must be positive".into()));
        }
        let mut out = vec![Cplx::zero(prec); count];
        if count == 0 {
            return Ok(out);
        }
        let inv_b = b.recip();
        let shift = |ns: &NodeSet| -> (Vec<Real>, Vec<Cplx>) {
            let nodes = ns.nodes.iter().map(|t| (t - a) * &inv_b).collect();
            let weights = ns.weights.iter().map(|w| w * &inv_b).collect();
            (nodes, weights)
        };
        if let Some(m) = &self.measure {
            let extra = count / 2 + 1;
            let (lo_t, lo_w) = shift(&*m.nodes(extra, ctx)?);
            let lo = power_sums(&lo_t, &lo_w, count, prec);
            let (hi_t, hi_w) = shift(&*m.nodes(extra + 8, ctx)?);
            let hi = power_sums(&hi_t, &hi_w, count, prec);
            let abs_w: Vec<Cplx> = hi_w.iter().map(|w| Cplx::from_real(&w.abs())).collect();
            let abs_t: Vec<Real> = hi_t.iter().map(|t| t.abs()).collect();
            let scale = power_sums(&abs_t, &abs_w, count, prec);
            for k in 0..count {
                let err = (&lo[k] - &hi[k]).abs();
                let s = scale[k].re();
                if err > &s * ctx.tol() {
                    return Err(Error::Accuracy { what: format!("moment {k}"), achieved: (err / s).to_f64() });
                }
                out[k] = hi[k].clone();
            }
        }
        if let Some(r) = &self.rational {
            let laurent = if a.is_zero() && *b == 1.0 { r.laurent(count) } else { r.affine(a, b).laurent(count) };
            for (o, d) in out.iter_mut().zip(laurent) {
                *o += &d;
            }
        }
        Ok(out)
    }

    /// `C(z)` off the support and the poles.
    pub fn eval(&self, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
        self.check_domain(z)?;
        let prec = ctx.bits();
        let z = z.with_prec(prec);
        let mut v = Cplx::zero(prec);
        if let Some(m) = &self.measure {
            let ns = m.nodes_near(std::slice::from_ref(&z), 1, 0, ctx)?;
            v = ns.integrate(prec, |t| (&z - t).recip());
        }
        if let Some(r) = &self.rational {
            v += &r.eval(&z);
        }
        Ok(v)
    }

    /// Taylor coefficients `a_j` of `C` at `z`, `C(z + h) = sum_j a_j h^j`.
    pub fn taylor(&self, z: &Cplx, count: usize, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
        self.check_domain(z)?;
        let prec = ctx.bits();
        let z = z.with_prec(prec);
        let mut out = vec![Cplx::zero(prec); count];
        if let Some(m) = &self.measure {
            let ns = m.nodes_near(std::slice::from_ref(&z), count, 0, ctx)?;
            // (-1)^j int dmu / (z - t)^{j+1}
            for (t, w) in ns.nodes.iter().zip(&ns.weights) {
                let r = (&z - t).recip();
                let step = -r.clone();
                let mut pw = r * w;
                for o in out.iter_mut() {
                    *o += &pw;
                    pw *= &step;
                }
            }
        }
        if let Some(r) = &self.rational {
            for (o, a) in out.iter_mut().zip(r.taylor(&z, count)) {
                *o += &a;
            }
        }
        Ok(out)
    }
}

/// `sum_i w_i t_i^k` for `k < count`.
fn power_sums(nodes: &[Real], weights: &[Cplx], count: usize, prec: u32) -> Vec<Cplx> {
    let mut out = vec![Cplx::zero(prec); count];
    for (t, w) in nodes.iter().zip(weights) {
        let mut pw = w.clone();
        for o in out.iter_mut() {
            *o += &pw;
            pw *= t;
        }
    }
    out
}
