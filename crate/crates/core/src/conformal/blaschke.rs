//! The products `r_k(v; z)` built from `psi` and the zeros of `v`.

use crate::conformal::maps::{on_interval, psi, Side};
use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::poly::Poly;
use crate::kernel::roots::poly_roots;
use crate::kernel::scalar::{Cplx, Real};

/// `r_k(v; .)` with `psi(e)` precomputed for every zero `e` of `v`.
#[derive(Debug, Clone)]
pub struct Rk {
    c: Real,
    d: Real,
    k: usize,
    /// `psi(e)` for each zero, repeated by multiplicity
    psi_e: Vec<Cplx>,
}

impl Rk {
    pub fn new(c: &Real, d: &Real, v: &Poly, k: usize, ctx: &PrecisionContext) -> Result<Self> {
        let roots = match v.degree() {
            None => return Err(Error::InvalidInput("r_k needs a nonzero polynomial".into())),
            Some(0) => Vec::new(),
            Some(_) => poly_roots(v, ctx)?,
        };
        Rk::from_roots(c, d, &roots, k)
    }

    pub fn from_roots(c: &Real, d: &Real, roots: &[Cplx], k: usize) -> Result<Self> {
        if roots.len() > k {
            return Err(Error::InvalidInput(format!("k = {k} is below deg v = {}", roots.len())));
        }
        let mut psi_e = Vec::with_capacity(roots.len());
        for e in roots {
            if on_interval(c, d, e) {
                return Err(Error::Domain("a zero of v lies on [c, d]".into()));
            }
            psi_e.push(psi(c, d, e, Side::Off)?);
        }
        Ok(Rk { c: c.clone(), d: d.clone(), k, psi_e })
    }

    pub fn eval(&self, z: &Cplx, side: Side) -> Result<Cplx> {
        let p = psi(&self.c, &self.d, z, side)?;
        let mut acc = p.powi((self.k - self.psi_e.len()) as i64);
        for pe in &self.psi_e {
            let num = &p - pe;
            let den = Cplx::one(p.prec()) - &(&p * pe);
            acc *= &(num / den);
        }
        Ok(acc)
    }
}

/// `r_k(v; z)`.
pub fn blaschke_rk(c: &Real, d: &Real, v: &Poly, k: usize, z: &Cplx, side: Side, ctx: &PrecisionContext) -> Result<Cplx> {
    Rk::new(c, d, v, k, ctx)?.eval(z, side)
}
