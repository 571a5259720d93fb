//! Closed-form predictions for AAK and Padé approximants (error size, error
//! field, pole rings, interior-zero bounds) and the matching of observed
//! data against them.

mod rings;

pub use rings::{attraction_radius, match_pole_rings, ring_sweep, RingMatch, RingSweep};

use num_complex::Complex64;
use serde::Serialize;

use crate::conformal::annulus::AnnulusSzego;
use crate::conformal::blaschke::Rk;
use crate::conformal::condenser::CondenserGeometry;
use crate::conformal::maps::{psi, stilde, w as sqrt_map, Side};
use crate::conformal::szego::{LogBranch, Szego, Weight};
use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::linalg::{solve_pivoted, CMatrix};
use crate::kernel::poly::Poly;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::function::CauchyFunction;
use crate::model::measure::MeasureSpec;
use crate::pade::InterpolationScheme;

/// Samples of the annulus data on `|z| = rho`.
pub const ANNULUS_SAMPLES: usize = 1024;
/// Samples for the argument variation `V_h`.
pub const VARIATION_SAMPLES: usize = 4096;

/// Predicted ring of `m(eta)` poles around a pole `eta` of the rational part.
#[derive(Debug, Clone, Serialize)]
pub struct PoleRingPrediction {
    pub eta: Complex64,
    pub multiplicity: usize,
    pub n: usize,
    /// modulus scale of `eta_{k,n} - eta`, up to the bounded factors `A`
    pub radius: f64,
    /// predicted ratio of radii at `n + 1` and `n`
    pub shrink: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaPrediction {
    pub n: usize,
    /// `2 G T^{-1} rho^{2(n - m)}`
    pub sigma: f64,
    /// geometric mean of `|b^2 w mu'|` against the Green distribution
    pub g: f64,
    pub tau: f64,
    pub rho: f64,
    /// predicted `|C - g_n|` at the requested points
    pub error_field: Vec<f64>,
    pub rings: Vec<PoleRingPrediction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PadePrediction {
    pub n: usize,
    /// predicted `C - Pi_n` at the requested points
    pub error: Vec<Complex64>,
    pub rings: Vec<PoleRingPrediction>,
}

fn measure_of(f: &CauchyFunction) -> Result<&MeasureSpec> {
    f.measure().ok_or_else(|| Error::InvalidInput("the prediction needs a measure part".into()))
}

/// Condenser geometry of the support of `f`.
pub fn geometry(f: &CauchyFunction, ctx: &PrecisionContext) -> Result<CondenserGeometry> {
    let m = measure_of(f)?;
    CondenserGeometry::new(m.c(), m.d(), 64, ctx)
}

fn blaschke_q(f: &CauchyFunction, z: &Cplx) -> Cplx {
    let one = Cplx::one(z.prec());
    let mut acc = one.clone();
    if let Some(r) = f.rational() {
        for p in r.poles() {
            let factor = (z - &p.eta) / (&one - &(p.eta.conj() * z));
            acc *= &factor.powi(p.multiplicity as i64);
        }
    }
    acc
}

/// `|b^2 w mu'|(t)` with `b = q/q~` and `w = T/S~`.
fn ma_weight(f: &CauchyFunction, m: &MeasureSpec, tau: &Real, t: &Real) -> Real {
    let z = Cplx::from_real(t);
    let b = blaschke_q(f, &z).abs();
    let w = tau / stilde(m.c(), m.d(), &z).re();
    b.square() * w * m.density(t).abs()
}

/// `G` of the AAK error formula.
pub fn ma_geometric_mean(f: &CauchyFunction, geom: &CondenserGeometry) -> Result<Real> {
    let m = measure_of(f)?;
    let tau = geom.tau()?.clone();
    let weight = Weight::density(m);
    geom.green_geometric_mean(|t| ma_weight(f, m, &tau, t), weight.breaks(), weight.endpoint_singular())
}

/// Maps the angle `theta` on `|z| = rho` back to `t` in `[c, d]`, using
/// `theta = pi omega_G([t, d])` and `t = a + b cos(phi)`, where
/// `d theta / d phi = T^2 / S~(t)`. Double precision is enough here.
struct AngleMap {
    a: f64,
    b: f64,
    phi: Vec<f64>,
    theta: Vec<f64>,
}

impl AngleMap {
    fn new(c: f64, d: f64, tau: f64) -> Self {
        let (a, b) = ((c + d) / 2.0, (d - c) / 2.0);
        let steps = 1 << 14;
        let h = std::f64::consts::PI / steps as f64;
        let rate = |phi: f64| {
            let t = a + b * phi.cos();
            tau * tau / ((1.0 - c * t) * (1.0 - d * t)).sqrt()
        };
        let mut phi = vec![0.0];
        let mut theta = vec![0.0];
        for k in 0..steps {
            let (p0, p1) = (k as f64 * h, (k + 1) as f64 * h);
            let step = h / 6.0 * (rate(p0) + 4.0 * rate((p0 + p1) / 2.0) + rate(p1));
            phi.push(p1);
            theta.push(theta[k] + step);
        }
        // fold the quadrature error into a rescaling so the end point is pi
        let end = *theta.last().expect("nonempty");
        for t in theta.iter_mut() {
            *t *= std::f64::consts::PI / end;
        }
        AngleMap { a, b, phi, theta }
    }

    fn t_of(&self, theta: f64) -> f64 {
        let i = self.theta.partition_point(|x| *x < theta).clamp(1, self.theta.len() - 1);
        let (t0, t1) = (self.theta[i - 1], self.theta[i]);
        let s = if t1 > t0 { (theta - t0) / (t1 - t0) } else { 0.0 };
        let phi = self.phi[i - 1] + s * (self.phi[i] - self.phi[i - 1]);
        self.a + self.b * phi.cos()
    }
}

/// Annulus Szegő function with data `Y = |b^2 w mu'|` carried to `|z| = rho`.
pub fn annulus_data(f: &CauchyFunction, geom: &CondenserGeometry, samples: usize) -> Result<AnnulusSzego> {
    let m = measure_of(f)?;
    let tau = geom.tau()?.clone();
    let rho = geom.rho()?.clone();
    let map = AngleMap::new(m.c().to_f64(), m.d().to_f64(), tau.to_f64());
    let prec = tau.prec();
    let (c, d) = (m.c().to_f64(), m.d().to_f64());
    let mut y = Vec::with_capacity(samples);
    for j in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
        let folded = if theta > std::f64::consts::PI { 2.0 * std::f64::consts::PI - theta } else { theta };
        // keep off the end points, where the data may vanish or blow up
        let t = map.t_of(folded).clamp(c + 1e-12 * (d - c), d - 1e-12 * (d - c));
        y.push(ma_weight(f, m, &tau, &Real::from_f64(t, prec)));
    }
    AnnulusSzego::new(&y, &rho)
}

/// AAK predictions at degree `n`: `sigma_n`, the error modulus at `points`
/// (in the unit disk, off `[c, d]`) and the pole rings.
pub fn predict_ma(f: &CauchyFunction, geom: &CondenserGeometry, n: usize, points: &[Cplx]) -> Result<MaPrediction> {
    if !f.inside_unit_disk() {
        return Err(Error::Domain("AAK predictions need [c, d] and the poles inside the unit disk".into()));
    }
    let m = measure_of(f)?;
    let big_m = f.m();
    if n < big_m {
        return Err(Error::InvalidInput(format!("degree {n} is below the number of poles {big_m}")));
    }
    let tau = geom.tau()?.clone();
    let rho = geom.rho()?.clone();
    let g = ma_geometric_mean(f, geom)?;
    let k = 2 * (n - big_m);
    let sigma = (&g * 2.0 / &tau * rho.powi(k as i32)).to_f64();

    let mut error_field = Vec::with_capacity(points.len());
    if !points.is_empty() {
        let annulus = annulus_data(f, geom, ANNULUS_SAMPLES)?;
        for z in points {
            let phi = geom.condenser_map(z, Side::Off)?;
            let s = annulus.eval(&phi)?.abs();
            let w = Cplx::from_real(&tau) / stilde(m.c(), m.d(), z);
            let sr = sqrt_map(m.c(), m.d(), z, Side::Off)?;
            let b = blaschke_q(f, z).abs();
            let ratio = (&rho / phi.abs()).powi(k as i32);
            let val = (&g * 2.0) / (w * sr).abs() * ratio * s.square() / b.square();
            error_field.push(val.to_f64());
        }
    }

    let mut rings = Vec::new();
    if let Some(r) = f.rational() {
        for p in r.poles() {
            let phi = geom.condenser_map(&p.eta, Side::Off)?.abs();
            let base = (&rho / phi).to_f64();
            let mult = p.multiplicity as f64;
            rings.push(PoleRingPrediction {
                eta: p.eta.to_c64(),
                multiplicity: p.multiplicity,
                n,
                radius: base.powf(k as f64 / mult),
                shrink: base.powf(2.0 / mult),
            });
        }
    }
    Ok(MaPrediction { n, sigma, g: g.to_f64(), tau: tau.to_f64(), rho: rho.to_f64(), error_field, rings })
}

/// `r_n = r_{2n}(v_n)` for the scheme.
fn scheme_rk(c: &Real, d: &Real, scheme: &InterpolationScheme, n: usize, ctx: &PrecisionContext) -> Result<Rk> {
    let roots = scheme.finite_points(n, ctx.bits())?;
    Rk::from_roots(c, d, &roots, 2 * n)
}

/// Padé predictions at degree `n`: `C - Pi_n` at `points` (off `[c, d]`) and
/// the pole rings.
pub fn predict_pade(
    f: &CauchyFunction,
    n: usize,
    scheme: &InterpolationScheme,
    points: &[Cplx],
    ctx: &PrecisionContext,
) -> Result<PadePrediction> {
    let m = measure_of(f)?;
    let (c, d) = (m.c(), m.d());
    let sz = Szego::new(Weight::density(m), ctx)?;
    let g2 = sz.geometric_mean() * 2.0;
    let rn = scheme_rk(c, d, scheme, n, ctx)?;
    let r = match f.rational() {
        Some(rat) => Some(Rk::new(c, d, rat.q(), rat.degree(), ctx)?),
        None => None,
    };
    let mut error = Vec::with_capacity(points.len());
    for z in points {
        let s = sz.eval(z)?;
        let sr = sqrt_map(c, d, z, Side::Off)?;
        let mut val = &g2 * s.square() * rn.eval(z, Side::Off)? / sr;
        if let Some(r) = &r {
            val = val / r.eval(z, Side::Off)?.square();
        }
        error.push(val.to_c64());
    }
    let mut rings = Vec::new();
    if let Some(rat) = f.rational() {
        for p in rat.poles() {
            let mult = p.multiplicity as f64;
            let here = rn.eval(&p.eta, Side::Off)?.abs().to_f64();
            let shrink = if scheme.is_classical() {
                psi(c, d, &p.eta, Side::Off)?.abs().to_f64().powf(2.0 / mult)
            } else {
                let next = scheme_rk(c, d, scheme, n + 1, ctx)?.eval(&p.eta, Side::Off)?.abs().to_f64();
                (next / here).powf(1.0 / mult)
            };
            rings.push(PoleRingPrediction {
                eta: p.eta.to_c64(),
                multiplicity: p.multiplicity,
                n,
                radius: here.powf(1.0 / mult),
                shrink,
            });
        }
    }
    Ok(PadePrediction { n, error, rings })
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterFactorReport {
    /// `max |w_n - T/S~|` over the samples
    pub max_deviation: f64,
    /// fitted coefficients of `l_n` (empty without a rational part)
    pub l_coeffs: Vec<Complex64>,
    /// `max |w_n - T/S~ - l_n/q~|` after the fit
    pub residual: f64,
}

/// Compares outer-factor samples `w_n(z)` with `T/S~ + l_n/q~`, fitting the
/// polynomial `l_n` of degree below `m` by least squares.
pub fn validate_outer_factor(
    samples: &[Cplx],
    points: &[Cplx],
    geom: &CondenserGeometry,
    q_tilde: &Poly,
    ctx: &PrecisionContext,
) -> Result<OuterFactorReport> {
    if samples.len() != points.len() || samples.is_empty() {
        return Err(Error::InvalidInput("outer factor samples and points must match".into()));
    }
    let tau = Cplx::from_real(geom.tau()?);
    let diff: Vec<Cplx> = samples
        .iter()
        .zip(points)
        .map(|(w, z)| w - &(&tau / geom.stilde(z)))
        .collect();
    let max_deviation = diff.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
    let m = q_tilde.degree().unwrap_or(0);
    if m == 0 || points.len() < m {
        return Ok(OuterFactorReport { max_deviation, l_coeffs: Vec::new(), residual: max_deviation });
    }
    let qt: Vec<Cplx> = points.iter().map(|z| q_tilde.eval(z)).collect();
    let a = CMatrix::from_fn(points.len(), m, |i, j| points[i].powi(j as i64) / &qt[i]);
    let sol = solve_pivoted(&a, &diff, ctx)?;
    let fit = a.mul_vec(&sol.x);
    let residual = diff.iter().zip(&fit).map(|(x, y)| (x - y).abs().to_f64()).fold(0.0, f64::max);
    Ok(OuterFactorReport { max_deviation, l_coeffs: sol.x.iter().map(|x| x.to_c64()).collect(), residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroBound {
    pub x: f64,
    pub alpha: f64,
    /// the bound (`Upsilon_x` or `Psi_x`)
    pub bound: f64,
    /// `sin(alpha pi) < bound`
    pub satisfied: bool,
}

fn interior_zero(m: &MeasureSpec, x: &Real) -> Result<f64> {
    m.interior_zeros()
        .iter()
        .find(|z| (&z.x - x).abs().to_f64() <= 1e-30)
        .map(|z| z.alpha)
        .ok_or_else(|| Error::InvalidInput(format!("{} is not an interior zero of the measure", x.to_f64())))
}

/// `Upsilon_x`, with the liminf over `n` replaced by the minimum over `ns`.
pub fn upsilon(
    f: &CauchyFunction,
    scheme: &InterpolationScheme,
    ns: &[usize],
    x: &Real,
    ctx: &PrecisionContext,
) -> Result<ZeroBound> {
    let m = measure_of(f)?;
    let alpha = interior_zero(m, x)?;
    if ns.is_empty() {
        return Err(Error::InvalidInput("Upsilon needs at least one degree".into()));
    }
    let sz = Szego::new(Weight::smooth_factor(m), ctx)?;
    let scf = [sz.scf(x, Side::Plus)?, sz.scf(x, Side::Minus)?];
    let z = Cplx::from_real(x);
    let mut bound = f64::INFINITY;
    for &n in ns {
        let rn = scheme_rk(m.c(), m.d(), scheme, n, ctx)?;
        for (side, s) in [Side::Plus, Side::Minus].into_iter().zip(&scf) {
            bound = bound.min((rn.eval(&z, side)? * s).abs().to_f64());
        }
    }
    let satisfied = (alpha * std::f64::consts::PI).sin() < bound;
    Ok(ZeroBound { x: x.to_f64(), alpha, bound, satisfied })
}

/// `Psi_x = min |scf^{+/-}_{q^2 h}(x)| exp(-4 s1 (V_h + 2 m pi) / (1 - s0))`.
pub fn psi_bound(f: &CauchyFunction, geom: &CondenserGeometry, x: &Real, ctx: &PrecisionContext) -> Result<ZeroBound> {
    let m = measure_of(f)?;
    let alpha = interior_zero(m, x)?;
    let h = Weight::smooth_factor(m);
    let variation = LogBranch::new(&h, VARIATION_SAMPLES)?.variation();
    let weight = match f.rational() {
        Some(r) => h.times(&Weight::polynomial(m.c().clone(), m.d().clone(), r.q().mul(r.q()))),
        None => h,
    };
    let sz = Szego::new(weight, ctx)?;
    let lo = sz.scf(x, Side::Plus)?.abs().min(sz.scf(x, Side::Minus)?.abs());
    let (s0, s1) = (geom.s0()?, geom.s1()?);
    let expo = -4.0 * s1 * (variation + 2.0 * f.m() as f64 * std::f64::consts::PI) / (1.0 - s0);
    let bound = (lo * Real::from_f64(expo, ctx.bits()).exp()).to_f64();
    let satisfied = (alpha * std::f64::consts::PI).sin() < bound;
    Ok(ZeroBound { x: x.to_f64(), alpha, bound, satisfied })
}

#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    /// least-squares slope of `log value` against `n`
    pub slope: f64,
    pub theoretical: f64,
    /// `|slope / theoretical - 1|`
    pub deviation: f64,
}

/// Slope of `log values` against `ns`, compared with `theoretical`.
pub fn fit_rate(ns: &[usize], values: &[f64], theoretical: f64) -> Result<RateFit> {
    if ns.len() != values.len() || ns.len() < 5 {
        return Err(Error::InvalidInput("a rate fit needs at least five (n, value) pairs".into()));
    }
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput("rate fit values must be positive".into()));
    }
    let len = ns.len() as f64;
    let mx = ns.iter().map(|&n| n as f64).sum::<f64>() / len;
    let my = values.iter().map(|v| v.ln()).sum::<f64>() / len;
    let sxy: f64 = ns.iter().zip(values).map(|(&n, v)| (n as f64 - mx) * (v.ln() - my)).sum();
    let sxx: f64 = ns.iter().map(|&n| (n as f64 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(RateFit { slope, theoretical, deviation: (slope / theoretical - 1.0).abs() })
}

#[cfg(test)]
mod tests;
