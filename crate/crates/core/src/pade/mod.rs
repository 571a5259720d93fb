//! Diagonal Padé approximants, classical and multipoint.
//!
//! All linear systems are set up in the variable `s = (z - a) / b` that maps
//! the support onto `[-1, 1]`; the returned polynomials are in `z`.

pub mod scheme;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::linalg::{nullspace_solve, CMatrix};
use crate::kernel::poly::Poly;
use crate::kernel::roots::poly_roots;
use crate::kernel::scalar::{cnorm, Cplx, Real};
use crate::model::function::CauchyFunction;
use crate::ortho::{from_frame, solve_moment_system, support_frame, VaryingWeight};

pub use scheme::{admissibility_report, min_matching, AdmissibilityReport, InterpolationScheme, LevelReport, Node, SchemeKind};

/// Where a pole of the approximant sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleClass {
    /// Near a pole of `p/q`.
    Rational,
    /// Everywhere else; these accumulate on the support.
    Support,
    /// Close to the classification radius, or near two poles of `p/q`.
    Ambiguous,
}

#[derive(Debug, Clone)]
pub struct PadeApproximant {
    pub n: usize,
    /// Numerator and denominator in `z`.
    pub p: Poly,
    pub q: Poly,
    /// Monic polynomial of the finite interpolation points.
    pub v: Poly,
    pub poles: Vec<Cplx>,
    pub classes: Vec<PoleClass>,
    /// False when the leading coefficient was too small to normalise.
    pub monic: bool,
    /// Set when the linear system was numerically rank deficient.
    pub degenerate: bool,
    /// Largest relative residual of the defining conditions.
    pub residual: f64,
    a: Real,
    b: Real,
    ps: Poly,
    qs: Poly,
}

impl PadeApproximant {
    fn to_frame(&self, z: &Cplx) -> Cplx {
        (z - Cplx::from_real(&self.a)) / Cplx::from_real(&self.b)
    }

    pub fn eval(&self, z: &Cplx) -> Cplx {
        let s = self.to_frame(z);
        self.ps.eval(&s) / self.qs.eval(&s)
    }

    /// `q_n` up to the factor `b^n`, evaluated in the support frame.
    pub fn q_frame(&self, z: &Cplx) -> Cplx {
        self.qs.eval(&self.to_frame(z))
    }

    pub fn poles_of(&self, class: PoleClass) -> Vec<Cplx> {
        self.poles.iter().zip(&self.classes).filter(|(_, c)| **c == class).map(|(p, _)| p.clone()).collect()
    }
}

fn frame(f: &CauchyFunction, prec: u32) -> (Real, Real) {
    match f.interval() {
        Some((c, d)) => support_frame(&c, &d),
        None => (Real::zero(prec), Real::one(prec)),
    }
}

/// Classical diagonal Padé approximant from the Hankel system of the
/// Laurent coefficients at infinity.
pub fn classical_pade(f: &CauchyFunction, n: usize, ctx: &PrecisionContext) -> Result<PadeApproximant> {
    let prec = ctx.bits();
    let (a, b) = frame(f, prec);
    let c = f.moments_about(&a, &b, 2 * n + 1, ctx)?;
    if n == 0 {
        return finish(f, 0, Poly::zero(prec), Poly::one(prec), Poly::one(prec), (a, b), true, false, 0.0, ctx);
    }
    let (qv, monic, rank) = solve_moment_system(&c, n, ctx)?;
    let mut residual: f64 = 0.0;
    for j in 0..n {
        let mut acc = Cplx::zero(prec);
        let mut scale = Real::zero(prec);
        for (i, qi) in qv.iter().enumerate() {
            let t = qi * &c[i + j];
            scale += t.abs();
            acc += &t;
        }
        if !scale.is_zero() {
            residual = residual.max((acc.abs() / scale).to_f64());
        }
    }
    // polynomial part of q * C
    let pv: Vec<Cplx> = (0..n)
        .map(|j| {
            let mut acc = Cplx::zero(prec);
            for i in j + 1..=n {
                acc += &(&qv[i] * &c[i - 1 - j]);
            }
            acc
        })
        .collect();
    let qs = Poly::new(qv, prec);
    let ps = Poly::new(pv, prec);
    finish(f, n, ps, qs, Poly::one(prec), (a, b), monic, rank < n, residual, ctx)
}

/// `C(k, j)` as a multiprecision real.
fn binom(k: usize, j: usize, prec: u32) -> Real {
    let mut r = Real::one(prec);
    for i in 0..j {
        r = r * ((k - i) as f64) / ((i + 1) as f64);
    }
    r
}

/// Multipoint Padé approximant interpolating at the `2n` points `nodes`
/// (`None` meaning infinity) and once more at infinity.
pub fn multipoint_pade(f: &CauchyFunction, n: usize, nodes: &[Node], ctx: &PrecisionContext) -> Result<PadeApproximant> {
    let prec = ctx.bits();
    if nodes.len() != 2 * n {
        return Err(Error::InvalidInput(format!("E_n needs {} points, got {}", 2 * n, nodes.len())));
    }
    let finite: Vec<Cplx> = nodes.iter().flatten().map(|e| e.with_prec(prec)).collect();
    for e in &finite {
        f.check_domain(e)?;
    }
    let (a, b) = frame(f, prec);
    let ac = Cplx::from_real(&a);
    let bc = Cplx::from_real(&b);
    let nf = finite.len();
    let c = f.moments_about(&a, &b, 2 * n + 1, ctx)?;
    let cols = 2 * n + 2;
    let mut rows: Vec<Vec<Cplx>> = Vec::with_capacity(2 * n + 1);

    // distinct finite points with multiplicities
    let mut groups: Vec<(Cplx, usize)> = Vec::new();
    for e in &finite {
        let tol = (e.abs() + 1.0) * 1e-30;
        match groups.iter_mut().find(|(g, _)| (g - e).abs() <= tol) {
            Some(g) => g.1 += 1,
            None => groups.push((e.clone(), 1)),
        }
    }
    for (e, k) in &groups {
        let es = (e - &ac) / &bc;
        let taylor = f.taylor(e, *k, ctx)?;
        let mut bp = Real::one(prec);
        let at: Vec<Cplx> = taylor
            .iter()
            .map(|t| {
                let v = t * &bp;
                bp *= &b;
                v
            })
            .collect();
        let epow: Vec<Cplx> = {
            let mut v = vec![Cplx::one(prec)];
            for i in 1..=n {
                let next = &v[i - 1] * &es;
                v.push(next);
            }
            v
        };
        for j in 0..*k {
            let mut row = vec![Cplx::zero(prec); cols];
            for i in 0..=n {
                let mut acc = Cplx::zero(prec);
                for l in 0..=i.min(j) {
                    acc += &(&epow[i - l] * &at[j - l] * &binom(i, l, prec));
                }
                row[i] = acc;
                if i >= j {
                    row[n + 1 + i] = -(&epow[i - j] * &binom(i, j, prec));
                }
            }
            rows.push(row);
        }
    }
    // coefficients of s^J of q C - p for J = nf - n ..= n
    let lo = nf as i64 - n as i64;
    for jj in lo..=n as i64 {
        let mut row = vec![Cplx::zero(prec); cols];
        if jj >= 0 {
            let j = jj as usize;
            for i in j + 1..=n {
                row[i] = c[i - 1 - j].clone();
            }
            row[n + 1 + j] = Cplx::from_f64(-1.0, 0.0, prec);
        } else {
            let k = (-jj - 1) as usize;
            for i in 0..=n {
                row[i] = c[k + i].clone();
            }
        }
        rows.push(row);
    }
    debug_assert_eq!(rows.len(), 2 * n + 1);
    // rows are scaled to unit size; this does not change the kernel
    let mut flat = Vec::with_capacity(rows.len() * cols);
    let mut unscaled = Vec::with_capacity(rows.len());
    for row in rows {
        let s = row.iter().map(|x| x.abs()).fold(Real::zero(prec), Real::max);
        let inv = if s.is_zero() { Real::one(prec) } else { s.recip() };
        flat.extend(row.iter().map(|x| x * &inv));
        unscaled.push(row);
    }
    let m = CMatrix::from_rows(2 * n + 1, cols, flat)?;
    let sol = nullspace_solve(&m, ctx)?;
    let qv: Vec<Cplx> = sol[..=n].to_vec();
    let pv: Vec<Cplx> = sol[n + 1..].to_vec();
    let qn = cnorm(&qv);
    if qn <= cnorm(&sol) * 1e-30 {
        return Err(Error::Accuracy { what: "multipoint Padé denominator vanished".into(), achieved: qn.to_f64() });
    }
    let monic = qv[n].abs() >= &qn * 1e-8;
    let k = if monic { qv[n].recip() } else { Cplx::from_real(&qn.recip()) };
    let qv: Vec<Cplx> = qv.iter().map(|x| x * &k).collect();
    let pv: Vec<Cplx> = pv.iter().map(|x| x * &k).collect();
    let mut residual: f64 = 0.0;
    let sol_max = qv.iter().chain(pv.iter()).map(|x| x.abs()).fold(Real::zero(prec), Real::max);
    for row in &unscaled {
        let mut acc = Cplx::zero(prec);
        // a row whose only entry meets a vanishing unknown is measured against the solution size
        let mut scale = row.iter().map(|x| x.abs()).fold(Real::zero(prec), Real::max) * &sol_max;
        for (x, r) in qv.iter().chain(pv.iter()).zip(row) {
            let t = x * r;
            scale = scale.max(t.abs());
            acc += &t;
        }
        if !scale.is_zero() {
            residual = residual.max((acc.abs() / scale).to_f64());
        }
    }
    let v = Poly::from_roots(&finite, prec);
    let degenerate = residual > crate::ortho::residual_tolerance(ctx);
    finish(f, n, Poly::new(pv, prec), Poly::new(qv, prec), v, (a, b), monic, degenerate, residual, ctx)
}

/// Padé approximant for level `n` of a scheme.
pub fn pade_for_scheme(f: &CauchyFunction, n: usize, scheme: &InterpolationScheme, ctx: &PrecisionContext) -> Result<PadeApproximant> {
    if scheme.is_classical() {
        classical_pade(f, n, ctx)
    } else {
        multipoint_pade(f, n, &scheme.points(n, ctx.bits())?, ctx)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    f: &CauchyFunction,
    n: usize,
    ps: Poly,
    qs: Poly,
    v: Poly,
    (a, b): (Real, Real),
    monic: bool,
    degenerate: bool,
    residual: f64,
    ctx: &PrecisionContext,
) -> Result<PadeApproximant> {
    let prec = ctx.bits();
    let poles_s = match qs.degree() {
        None | Some(0) => Vec::new(),
        Some(_) => poly_roots(&qs, ctx)?,
    };
    let ac = Cplx::from_real(&a);
    let poles: Vec<Cplx> = poles_s.iter().map(|s| &ac + &(s * &b)).collect();
    let classes = classify(f, &poles);
    let p = from_frame(&ps, &a, &b, n);
    let q = from_frame(&qs, &a, &b, n);
    let _ = prec;
    Ok(PadeApproximant { n, p, q, v, poles, classes, monic, degenerate, residual, a, b, ps, qs })
}

/// Radius `0.1 * dist(Z(q), [c, d])` around the poles of `p/q`.
pub fn classification_radius(f: &CauchyFunction) -> Option<f64> {
    let r = f.rational()?;
    let poles = r.poles();
    let mut dist = f64::INFINITY;
    if let Some((c, d)) = f.interval() {
        for e in poles {
            let x = e.eta.re();
            let dx = if x < c {
                (&c - &x).to_f64()
            } else if x > d {
                (&x - &d).to_f64()
            } else {
                0.0
            };
            dist = dist.min(dx.hypot(e.eta.im().to_f64()));
        }
    }
    for (i, e) in poles.iter().enumerate() {
        for g in &poles[..i] {
            dist = dist.min((&e.eta - &g.eta).abs().to_f64());
        }
    }
    if !dist.is_finite() {
        dist = 1.0;
    }
    Some(0.1 * dist)
}

fn classify(f: &CauchyFunction, poles: &[Cplx]) -> Vec<PoleClass> {
    let (Some(radius), Some(r)) = (classification_radius(f), f.rational()) else {
        return vec![PoleClass::Support; poles.len()];
    };
    poles
        .iter()
        .map(|z| {
            let ds: Vec<f64> = r.poles().iter().map(|e| (z - &e.eta).abs().to_f64()).collect();
            let inside = ds.iter().filter(|&&x| x < radius).count();
            let near_edge = ds.iter().any(|&x| (x - radius).abs() < 0.05 * radius);
            if inside > 1 || near_edge {
                PoleClass::Ambiguous
            } else if inside == 1 {
                PoleClass::Rational
            } else {
                PoleClass::Support
            }
        })
        .collect()
}

/// Error of an approximant at `z`, directly and through the integral
/// representation with the auxiliary polynomial taken to be 1.
#[derive(Debug, Clone)]
pub struct PadeError {
    pub direct: Cplx,
    pub integral: Option<Cplx>,
}

pub fn pade_error(f: &CauchyFunction, pi: &PadeApproximant, z: &Cplx, ctx: &PrecisionContext) -> Result<PadeError> {
    let direct = f.eval(z, ctx)? - pi.eval(z);
    let integral = match f.measure() {
        None => None,
        Some(m) => {
            let prec = ctx.bits();
            let zz = z.with_prec(prec);
            let one = Poly::one(prec);
            let qr = f.rational().map(|r| r.q().clone()).unwrap_or(one);
            let nu = VaryingWeight::new(m.clone()).with_divisor(pi.v.clone(), ctx)?;
            let deg = pi.n + qr.degree().unwrap_or(0);
            let int = nu.integrate(
                |t| {
                    let tc = Cplx::from_real(t);
                    pi.q_frame(&tc) * qr.eval(&tc) / (&zz - t)
                },
                std::slice::from_ref(&zz),
                deg,
                ctx,
            )?;
            Some(pi.v.eval(&zz) / (pi.q_frame(&zz) * qr.eval(&zz)) * int)
        }
    };
    Ok(PadeError { direct, integral })
}

/// `|int s^j q q_n d mu / v_n|` relative to the integral of the modulus,
/// for `j < n - m`.
pub fn orthogonality_residuals(f: &CauchyFunction, pi: &PadeApproximant, ctx: &PrecisionContext) -> Result<Vec<f64>> {
    let Some(m) = f.measure() else {
        return Ok(Vec::new());
    };
    let prec = ctx.bits();
    let qr = f.rational().map(|r| r.q().clone()).unwrap_or_else(|| Poly::one(prec));
    let count = pi.n.saturating_sub(f.m());
    let nu = VaryingWeight::new(m.clone()).with_divisor(pi.v.clone(), ctx)?;
    let nodes = m.nodes(pi.n + qr.degree().unwrap_or(0) + 8, ctx)?;
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let g = |t: &Real| {
            let tc = Cplx::from_real(t);
            let s = (t - &pi.a) / &pi.b;
            pi.q_frame(&tc) * qr.eval(&tc) * s.powi(j as i32) * nu.modifier(t)
        };
        let val = nodes.integrate(prec, g);
        let scale = nodes.integrate_abs(prec, |t| g(t).abs());
        out.push((val.abs() / scale).to_f64());
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
