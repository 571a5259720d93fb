//! Szegő-type functions of the annulus `rho < |z| < 1/rho`.
//!
//! Given positive data `Y` on `|z| = rho`, builds `S = exp(u + i v)` with `u`
//! harmonic, `u = log(Y/G_Y)/2` on `|z| = rho`, `u = 0` on `|z| = 1`, and
//! `S(z) conj(S(1/conj z)) = 1`.

use crate::error::{Error, Result};
use crate::kernel::fft::fft;
use crate::kernel::scalar::{Cplx, Real};

#[derive(Debug, Clone)]
pub struct AnnulusSzego {
    rho: Real,
    /// `b_n`, `n = 1..`: `F(z) = sum -2 b_n z^n + 2 conj(b_n) z^{-n}`
    b: Vec<Cplx>,
    log_mean: Real,
    phase: Real,
}

impl AnnulusSzego {
    /// `samples[j] = Y(rho e^{2 pi i j/N})`, `N` a power of two.
    pub fn new(samples: &[Real], rho: &Real) -> Result<Self> {
        let n = samples.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidInput("annulus data needs a power-of-two sample count".into()));
        }
        if !(*rho > 0.0 && *rho < 1.0) {
            return Err(Error::InvalidInput("annulus parameter must lie in (0, 1)".into()));
        }
        if samples.iter().any(|y| !(*y > 0.0) || !y.is_finite()) {
            return Err(Error::InvalidInput("annulus data must be positive".into()));
        }
        let prec = rho.prec();
        let logs: Vec<Cplx> = samples.iter().map(|y| Cplx::from_real(&(y.with_prec(prec).ln() / 2.0))).collect();
        let coef = fft(&logs);
        let inv_n = 1.0 / n as f64;
        let log_mean = coef[0].re() * inv_n * 2.0;
        let mut b = Vec::with_capacity(n / 2);
        for k in 1..=n / 2 {
            // the Nyquist coefficient is shared between +n/2 and -n/2
            let share = if k == n / 2 { inv_n / 2.0 } else { inv_n };
            let yk = &coef[k] * share;
            let rk = rho.powi(k as i32);
            b.push(yk / (rk.recip() - rk));
        }
        let mut s = AnnulusSzego { rho: rho.clone(), b, log_mean, phase: Real::zero(prec) };
        s.phase = -s.series(&Cplx::one(prec)).im();
        Ok(s)
    }

    fn series(&self, z: &Cplx) -> Cplx {
        let prec = self.rho.prec();
        let zi = z.recip();
        let mut zp = z.clone();
        let mut zm = zi.clone();
        let mut acc = Cplx::zero(prec);
        for b in &self.b {
            acc -= &(b * &zp * 2.0);
            acc += &(b.conj() * &zm * 2.0);
            zp *= z;
            zm *= &zi;
        }
        acc
    }

    /// Geometric mean of `Y` with respect to normalised arclength.
    pub fn geometric_mean(&self) -> Real {
        self.log_mean.exp()
    }

    pub fn eval(&self, z: &Cplx) -> Result<Cplx> {
        let r = z.abs();
        if !(r >= self.rho && r <= self.rho.recip()) {
            return Err(Error::Domain("point outside the closed annulus".into()));
        }
        let f = self.series(z) + Cplx::new(Real::zero(self.rho.prec()), self.phase.clone());
        Ok(f.exp())
    }
}

pub fn annulus_szego(samples: &[Real], rho: &Real, z: &Cplx) -> Result<Cplx> {
    AnnulusSzego::new(samples, rho)?.eval(z)
}
