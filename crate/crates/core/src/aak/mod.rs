//! AAK (`p = infinity`) meromorphic approximation through the singular value
//! decomposition of a truncated Hankel operator.
//!
//! For `[c, d]` and the poles of the rational part inside the unit disk, the
//! Fourier coefficients of `C` on the circle are its moments:
//! `C(z) = sum_k c_k z^{-k-1}`. The symbol is truncated at order `N`,
//! `f_N = sum_{k <= N} c_k z^{-k-1}`, whose Hankel operator is the
//! `(N + 1) x (N + 1)` matrix `H_{jk} = c_{j+k}` for `j + k <= N` and zero
//! below the antidiagonal. Singular data are therefore exact for `f_N`.

mod outer;

pub use outer::{outer_factor, OuterFactor};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::linalg::{leading_svd, CMatrix, Svd};
use crate::kernel::poly::Poly;
use crate::kernel::roots::poly_roots;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::function::CauchyFunction;

/// Roots with `||r| - 1| < ROOT_BAND` are neither counted as poles nor
/// discarded.
pub const ROOT_BAND: f64 = 1e-8;
/// Relative singular value gap below which `sigma_n` is reported as not simple.
pub const SIMPLE_GAP: f64 = 1e-8;
/// Newton distance from a pole to the numerator zeros below which the
/// approximant is reported as reducible.
pub const CANCELLATION_DISTANCE: f64 = 1e-6;

/// The truncation rule `N = max(4n + 64, 128)`.
pub fn default_truncation(n: usize) -> usize {
    (4 * n + 64).max(128)
}

/// Geometric fit `|c_k| <= M r^k` over the last half of the coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct TailBound {
    pub m: f64,
    pub r: f64,
    /// `sum_{k > N} M r^k`, infinite when `r >= 1`
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct HankelTruncation {
    n_trunc: usize,
    coeffs: Vec<Cplx>,
    tail: TailBound,
}

impl HankelTruncation {
    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.n_trunc
    }

    /// `c_0, ..., c_N`.
    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    pub fn tail(&self) -> &TailBound {
        &self.tail
    }

    pub fn entry(&self, j: usize, k: usize) -> Cplx {
        let prec = self.coeffs[0].prec();
        if j + k <= self.n_trunc {
            self.coeffs[j + k].clone()
        } else {
            Cplx::zero(prec)
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let n = self.n_trunc + 1;
        CMatrix::from_fn(n, n, |j, k| self.entry(j, k))
    }

    /// `f_N(z) = sum_{k <= N} c_k z^{-k-1}`.
    pub fn symbol(&self, z: &Cplx) -> Cplx {
        let zi = z.recip();
        let mut acc = Cplx::zero(z.prec());
        for c in self.coeffs.iter().rev() {
            acc = acc * &zi + c;
        }
        acc * zi
    }

    /// Coefficients of `P_+(f_N v)`: `sum_{k > j} c_{k-j-1} v_k`.
    pub fn analytic_part(&self, v: &[Cplx]) -> Vec<Cplx> {
        let prec = self.coeffs[0].prec();
        let len = v.len().min(self.n_trunc + 2);
        (0..len.saturating_sub(1))
            .map(|j| {
                let mut acc = Cplx::zero(prec);
                for k in j + 1..len {
                    acc += &(&self.coeffs[k - j - 1] * &v[k]);
                }
                acc
            })
            .collect()
    }

    /// Singular triples resolving `sigma_0, ..., sigma_{n_max + 1}`.
    pub fn decompose(&self, n_max: usize, ctx: &PrecisionContext) -> Result<HankelSvd> {
        let rel_tol = (ctx.eps() * 1e6).max(f64::MIN_POSITIVE);
        let margin = ctx.tol().max(1e-30);
        // directions below the truncation error carry no information
        let floor = if self.tail.bound.is_finite() { self.tail.bound } else { 0.0 };
        let svd = leading_svd(&self.matrix(), rel_tol, n_max + 1, margin, floor);
        if svd.sigma.is_empty() {
            return Err(Error::InvalidInput("Hankel operator of a zero symbol".into()));
        }
        Ok(HankelSvd { trunc: self.clone(), svd, n_max })
    }
}

/// `H_{jk} = c_{j+k}` of the symbol truncated at order `n_trunc`.
pub fn hankel_matrix(f: &CauchyFunction, n_trunc: usize, ctx: &PrecisionContext) -> Result<HankelTruncation> {
    if !f.inside_unit_disk() {
        return Err(Error::Domain("AAK approximation needs [c, d] and the poles inside the unit disk".into()));
    }
    if n_trunc == 0 {
        return Err(Error::InvalidInput("truncation order must be positive".into()));
    }
    let coeffs = f.moments(n_trunc + 1, ctx)?;
    let tail = fit_tail(&coeffs);
    Ok(HankelTruncation { n_trunc, coeffs, tail })
}

fn fit_tail(c: &[Cplx]) -> TailBound {
    let n = c.len() - 1;
    // envelope over a short window, so parity zeros do not enter the fit
    let pts: Vec<(f64, f64)> = (n / 2..=n)
        .filter_map(|k| {
            let a = c[k.saturating_sub(3)..=k].iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
            (a > 0.0 && a.is_finite()).then(|| (k as f64, a.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return TailBound { m: 0.0, r: 0.0, bound: 0.0 };
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    // shift the line up so that it bounds every fitted point
    let lift = pts.iter().map(|p| p.1 - (my + slope * (p.0 - mx))).fold(0.0, f64::max);
    let log_m = my - slope * mx + lift;
    let r = slope.exp();
    let m = log_m.exp();
    let bound = if r < 1.0 { m * r.powi(n as i32 + 1) / (1.0 - r) } else { f64::INFINITY };
    TailBound { m, r, bound }
}

/// A Hankel truncation with its singular value decomposition, shared by all
/// degrees `n` of a sweep.
#[derive(Debug, Clone)]
pub struct HankelSvd {
    trunc: HankelTruncation,
    svd: Svd,
    n_max: usize,
}

impl HankelSvd {
    pub fn truncation(&self) -> &HankelTruncation {
        &self.trunc
    }

    /// Singular values above the working-precision floor, nonincreasing.
    pub fn sigma(&self) -> &[Real] {
        &self.svd.sigma
    }

    pub fn approximant(&self, n: usize, ctx: &PrecisionContext) -> Result<AakApproximant> {
        let n_trunc = self.trunc.n_trunc;
        if n >= n_trunc {
            return Err(Error::InvalidInput(format!("degree {n} must stay below the truncation order {n_trunc}")));
        }
        if n > self.n_max {
            return Err(Error::InvalidInput(format!("the decomposition resolves degrees up to {}", self.n_max)));
        }
        if n >= self.svd.sigma.len() {
            return Err(Error::Accuracy {
                what: format!("sigma_{n} is below the working precision"),
                achieved: self.svd.sigma.last().map(|s| s.to_f64()).unwrap_or(0.0),
            });
        }
        let prec = ctx.bits();
        let sigma = self.svd.sigma[n].clone();
        let mut warnings = Vec::new();
        let next = self.svd.sigma.get(n + 1).map(|s| s.to_f64()).unwrap_or(0.0);
        let gap = if sigma.is_zero() { 0.0 } else { 1.0 - next / sigma.to_f64() };
        if gap < SIMPLE_GAP {
            warnings.push(format!("sigma_{n} is not simple to working accuracy (relative gap {gap:.3e})"));
        }
        if n > 0 {
            let prev = self.svd.sigma[n - 1].to_f64();
            if 1.0 - sigma.to_f64() / prev < SIMPLE_GAP {
                warnings.push(format!("sigma_{n} is close to sigma_{}", n - 1));
            }
        }
        if self.trunc.tail.bound > sigma.to_f64() * 1e-6 {
            warnings.push(format!(
                "truncation tail bound {:.3e} is not small against sigma_{n} = {:.3e}",
                self.trunc.tail.bound,
                sigma.to_f64()
            ));
        }

        // fix the phase so that v(1) > 0; the poles do not depend on it
        let raw = &self.svd.v[n];
        let at_one = raw.iter().fold(Cplx::zero(prec), |acc, x| acc + x);
        let phase = if at_one.is_zero() { Cplx::one(prec) } else { (&at_one / at_one.abs()).conj() };
        let coeffs: Vec<Cplx> = raw.iter().map(|x| x * &phase).collect();
        let numerator = Poly::new(self.trunc.analytic_part(&coeffs), prec);
        let v = Poly::new(coeffs, prec);

        let mut poles = Vec::new();
        let mut indeterminate = Vec::new();
        if v.degree().unwrap_or(0) > 0 {
            for r in poly_roots(&v, ctx)? {
                let m = r.abs().to_f64();
                if m < 1.0 - ROOT_BAND {
                    poles.push(r);
                } else if m <= 1.0 + ROOT_BAND {
                    indeterminate.push(r);
                }
            }
        }
        poles.sort_by(|a, b| {
            let (a, b) = (a.to_c64(), b.to_c64());
            a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
        });
        if !indeterminate.is_empty() {
            warnings.push(format!("{} roots of v lie within {ROOT_BAND:e} of the unit circle", indeterminate.len()));
        }
        let min_cancellation = poles
            .iter()
            .map(|p| {
                let (val, der) = numerator.eval_with_derivative(p);
                if der.is_zero() {
                    f64::INFINITY
                } else {
                    (val / der).abs().to_f64()
                }
            })
            .fold(f64::INFINITY, f64::min);
        let irreducible = poles.len() == n && min_cancellation > CANCELLATION_DISTANCE;
        Ok(AakApproximant {
            n,
            n_trunc,
            sigma,
            gap,
            v,
            numerator,
            poles,
            indeterminate,
            irreducible,
            min_cancellation,
            warnings,
        })
    }
}

/// Best meromorphic approximant with at most `n` poles in the disk.
#[derive(Debug, Clone)]
pub struct AakApproximant {
    pub n: usize,
    pub n_trunc: usize,
    pub sigma: Real,
    /// `(sigma_n - sigma_{n+1}) / sigma_n`
    pub gap: f64,
    /// Unit-norm right singular vector, `v(1) > 0`.
    pub v: Poly,
    /// `P_+(f_N v)`; the approximant is `numerator / v`.
    pub numerator: Poly,
    /// Roots of `v` with modulus below `1 - ROOT_BAND`.
    pub poles: Vec<Cplx>,
    pub indeterminate: Vec<Cplx>,
    pub irreducible: bool,
    pub min_cancellation: f64,
    pub warnings: Vec<String>,
}

impl AakApproximant {
    /// `g_n(z)`, dividing pointwise.
    pub fn eval(&self, z: &Cplx) -> Result<Cplx> {
        let den = self.v.eval(z);
        if den.is_zero() {
            return Err(Error::Domain("evaluation at a pole of the approximant".into()));
        }
        Ok(self.numerator.eval(z) / den)
    }

    /// `q_n`, monic with the poles as roots.
    pub fn q(&self) -> Poly {
        Poly::from_roots(&self.poles, self.v.prec())
    }

    /// The finite Blaschke product `q_n / q~_n` at `z`.
    pub fn blaschke(&self, z: &Cplx) -> Cplx {
        let one = Cplx::one(z.prec());
        self.poles
            .iter()
            .fold(one.clone(), |acc, p| acc * ((z - p) / (&one - &(p.conj() * z))))
    }
}

/// Largest truncation order the adaptive rule will try.
pub const MAX_TRUNCATION: usize = 1024;

/// Hankel truncation and SVD good for degrees up to `n_max`.
///
/// With `n_trunc = None` the order starts at [`default_truncation`] and grows
/// until the fitted tail bound is below `1e-6 sigma_{n_max}`.
pub fn hankel_svd(f: &CauchyFunction, n_max: usize, n_trunc: Option<usize>, ctx: &PrecisionContext) -> Result<HankelSvd> {
    if let Some(big) = n_trunc {
        return hankel_matrix(f, big, ctx)?.decompose(n_max, ctx);
    }
    let mut big = default_truncation(n_max);
    loop {
        let s = hankel_matrix(f, big, ctx)?.decompose(n_max, ctx)?;
        let sigma = s.svd.sigma.get(n_max).map(|x| x.to_f64()).unwrap_or(0.0);
        let tail = &s.trunc.tail;
        if tail.bound <= 1e-6 * sigma || big >= MAX_TRUNCATION || !(tail.r < 1.0) || sigma == 0.0 {
            return Ok(s);
        }
        // order at which the fitted tail meets the target, with some slack
        let want = ((1e-6 * sigma * (1.0 - tail.r) / tail.m).ln() / tail.r.ln()).ceil() as usize;
        let next = (want + want / 8).max(big + big / 2);
        big = next.div_ceil(8).saturating_mul(8).min(MAX_TRUNCATION);
    }
}

/// The approximant of degree `n` (see [`hankel_svd`] for the truncation rule).
pub fn aak_approximant(f: &CauchyFunction, n: usize, n_trunc: Option<usize>, ctx: &PrecisionContext) -> Result<AakApproximant> {
    hankel_svd(f, n, n_trunc, ctx)?.approximant(n, ctx)
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleError {
    pub moduli: Vec<f64>,
    pub max: f64,
    pub min: f64,
    /// `max |(|f_N - g_n| - sigma_n)| / sigma_n`
    pub deviation: f64,
}

/// `|f_N - g_n|` at the points `tau` of the unit circle.
pub fn aak_error_on_circle(trunc: &HankelTruncation, g: &AakApproximant, tau: &[Cplx]) -> Result<CircleError> {
    let sigma = g.sigma.to_f64();
    let mut moduli = Vec::with_capacity(tau.len());
    for t in tau {
        let e = trunc.symbol(t) - g.eval(t)?;
        moduli.push(e.abs().to_f64());
    }
    let max = moduli.iter().copied().fold(0.0, f64::max);
    let min = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let deviation = if sigma > 0.0 {
        moduli.iter().map(|m| (m - sigma).abs() / sigma).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(CircleError { moduli, max, min, deviation })
}

/// `count` equally spaced points `e^{2 pi i j / count}`.
pub fn circle_samples(count: usize, prec: u32) -> Vec<Cplx> {
    let one = Real::one(prec);
    let step = Real::pi(prec) * 2.0 / count as f64;
    (0..count).map(|j| Cplx::polar(&one, &(&step * j as f64))).collect()
}
