//! Elementary maps attached to an interval `[c, d]`: the square root `w`, the
//! exterior map `psi` onto the disk, and the reflected root `S~`.

use crate::error::{Error, Result};
use crate::kernel::scalar::{Cplx, Real};

/// Which boundary value to take on a cut. `Plus` is the upper side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Off,
}

#[derive(Debug, Clone)]
pub struct MapValues {
    pub w: Cplx,
    pub psi: Cplx,
    pub stilde: Cplx,
}

/// Whether `z` lies on the closed interval `[c, d]` of the real axis.
pub fn on_interval(c: &Real, d: &Real, z: &Cplx) -> bool {
    let x = z.re();
    z.im().is_zero() && x >= *c && x <= *d
}

/// `w(z) = sqrt((z - c)(z - d))` with `w(z)/z -> 1` at infinity.
pub fn w(c: &Real, d: &Real, z: &Cplx, side: Side) -> Result<Cplx> {
    if on_interval(c, d, z) {
        let t = z.re();
        let r = ((&t - c) * (d - &t)).sqrt();
        return match side {
            Side::Plus => Ok(Cplx::new(Real::zero(r.prec()), r)),
            Side::Minus => Ok(Cplx::new(Real::zero(r.prec()), -r)),
            Side::Off if r.is_zero() => Ok(Cplx::zero(r.prec())),
            Side::Off => Err(Error::Domain(format!("{:.6} lies on the cut; choose a side", z))),
        };
    }
    // the product of principal roots is analytic off [c, d]
    Ok((z - c).sqrt() * (z - d).sqrt())
}

fn psi_from_w(c: &Real, d: &Real, z: &Cplx, w: &Cplx) -> Cplx {
    // stable form of (2z - c - d - 2w)/(d - c)
    let den = z * 2.0 - (c + d) + w * 2.0;
    Cplx::from_real(&(d - c)) / den
}

/// Conformal map of the complement of `[c, d]` onto the unit disk, `psi(inf) = 0`.
pub fn psi(c: &Real, d: &Real, z: &Cplx, side: Side) -> Result<Cplx> {
    let w = w(c, d, z, side)?;
    Ok(psi_from_w(c, d, z, &w))
}

/// `psi'(z)`, off the cut.
pub fn psi_derivative(c: &Real, d: &Real, z: &Cplx) -> Result<Cplx> {
    let w = w(c, d, z, Side::Off)?;
    if w.is_zero() {
        return Err(Error::Domain("psi is not differentiable at the endpoints".into()));
    }
    let den = z * 2.0 - (c + d) + &w * 2.0;
    let dw = (z * 2.0 - (c + d)) / (&w * 2.0);
    let dden = dw * 2.0 + 2.0;
    Ok(-(Cplx::from_real(&(d - c)) * dden) / den.square())
}

/// `S~(z) = sqrt((1 - cz)(1 - dz))`, positive at the origin.
pub fn stilde(c: &Real, d: &Real, z: &Cplx) -> Cplx {
    let one = Cplx::one(z.prec());
    (&one - &(z * c)).sqrt() * (&one - &(z * d)).sqrt()
}

pub fn map_values(c: &Real, d: &Real, z: &Cplx, side: Side) -> Result<MapValues> {
    let w = w(c, d, z, side)?;
    let psi = psi_from_w(c, d, z, &w);
    Ok(MapValues { stilde: stilde(c, d, z), psi, w })
}

/// `l = 4/(d - c)`, the reciprocal of the limit of `z psi(z)` at infinity.
pub fn ell(c: &Real, d: &Real) -> Real {
    Real::from_f64(4.0, c.prec()) / (d - c)
}
