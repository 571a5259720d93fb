//! Outer factors of polynomials by a discrete Schwarz integral.

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::fft::fft;
use crate::kernel::poly::Poly;
use crate::kernel::scalar::{Cplx, Real};

pub const DEFAULT_GRID: usize = 4096;

/// `w = exp(a_0 + 2 sum_k a_k z^k)` where `a_k` are the Fourier coefficients
/// of `log|v|` on the unit circle; `w(0) > 0` and `|w| = |v|` on the circle.
#[derive(Debug, Clone)]
pub struct OuterFactor {
    a: Vec<Cplx>,
    /// largest `|a_k|` over the last quarter of the retained band, an
    /// estimate of the aliasing error in `log w`
    pub aliasing: f64,
}

impl OuterFactor {
    pub fn new(v: &Poly, grid: usize, ctx: &PrecisionContext) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::InvalidInput("outer factor of the zero polynomial".into()));
        }
        if grid < 16 || !grid.is_power_of_two() {
            return Err(Error::InvalidInput("outer factor grid must be a power of two, at least 16".into()));
        }
        let prec = ctx.bits();
        let one = Real::one(prec);
        let step = Real::pi(prec) * 2.0 / grid as f64;
        let floor = v.norm() * ctx.eps();
        let mut logs = Vec::with_capacity(grid);
        for j in 0..grid {
            let m = v.eval(&Cplx::polar(&one, &(&step * j as f64))).abs();
            if m <= floor {
                return Err(Error::Resolution("polynomial vanishes on the unit circle at grid resolution".into()));
            }
            logs.push(Cplx::from_real(&m.ln()));
        }
        let inv = 1.0 / grid as f64;
        let a: Vec<Cplx> = fft(&logs).into_iter().take(grid / 2).map(|x| x * inv).collect();
        let aliasing = a[3 * grid / 8..].iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
        Ok(OuterFactor { a, aliasing })
    }

    pub fn log_eval(&self, z: &Cplx) -> Result<Cplx> {
        if z.abs() > 1.0 + 1e-12 {
            return Err(Error::Domain("outer factor is evaluated in the closed unit disk".into()));
        }
        let mut acc = Cplx::zero(z.prec());
        for c in self.a[1..].iter().rev() {
            acc = (acc + c) * z;
        }
        Ok(acc * 2.0 + &self.a[0])
    }

    pub fn eval(&self, z: &Cplx) -> Result<Cplx> {
        Ok(self.log_eval(z)?.exp())
    }
}

/// Values of the outer factor of `v` at `points` on the default grid.
pub fn outer_factor(v: &Poly, points: &[Cplx], ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
    let w = OuterFactor::new(v, DEFAULT_GRID, ctx)?;
    points.iter().map(|z| w.eval(z)).collect()
}
