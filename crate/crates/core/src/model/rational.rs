//! The rational perturbation `p/q`.

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::poly::Poly;
use crate::kernel::roots::poly_roots;
use crate::kernel::scalar::{Cplx, Real};

/// Distinct root of `q` with its multiplicity.
#[derive(Debug, Clone)]
pub struct Pole {
    pub eta: Cplx,
    pub multiplicity: usize,
}

/// `p/q` with `q` monic, `deg p < deg q` and no common roots.
#[derive(Debug, Clone)]
pub struct RationalPart {
    p: Poly,
    q: Poly,
    poles: Vec<Pole>,
}

/// Roots closer than this (relative to `1 + |root|`) are treated as one pole.
const CLUSTER: f64 = 1e-8;

impl RationalPart {
    pub fn new(p: Poly, q: Poly, ctx: &PrecisionContext) -> Result<Self> {
        let m = match q.degree() {
            None | Some(0) => return Err(Error::InvalidInput("denominator q must have degree at least 1".into())),
            Some(m) => m,
        };
        let q = q.monic();
        let roots = poly_roots(&q, ctx)?;
        let mut poles: Vec<Pole> = Vec::new();
        let mut groups: Vec<Vec<Cplx>> = Vec::new();
        for r in roots {
            let hit = groups.iter().position(|g| (&g[0] - &r).abs() < CLUSTER * (1.0 + r.abs().to_f64()));
            match hit {
                Some(i) => groups[i].push(r),
                None => groups.push(vec![r]),
            }
        }
        for g in groups {
            let mut mean = Cplx::zero(ctx.bits());
            for r in &g {
                mean += r;
            }
            let mult = g.len();
            poles.push(Pole { eta: polish(&q, mean / mult as f64, mult), multiplicity: mult });
        }
        Self::finish(p, q, m, poles, ctx)
    }

    /// `q` given by its distinct roots and multiplicities.
    pub fn from_poles(p: Poly, poles: Vec<Pole>, ctx: &PrecisionContext) -> Result<Self> {
        if poles.is_empty() || poles.iter().any(|e| e.multiplicity == 0) {
            return Err(Error::InvalidInput("poles need positive multiplicities".into()));
        }
        for (i, a) in poles.iter().enumerate() {
            for b in &poles[..i] {
                if (&a.eta - &b.eta).abs() < CLUSTER * (1.0 + a.eta.abs().to_f64()) {
                    return Err(Error::InvalidInput("poles must be distinct".into()));
                }
            }
        }
        let mut all = Vec::new();
        for e in &poles {
            all.extend(std::iter::repeat(e.eta.clone()).take(e.multiplicity));
        }
        let q = Poly::from_roots(&all, ctx.bits());
        let m = all.len();
        Self::finish(p, q, m, poles, ctx)
    }

    fn finish(p: Poly, q: Poly, m: usize, poles: Vec<Pole>, ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.bits();
        let p = Poly::new(p.coeffs().iter().map(|c| c.with_prec(prec)).collect(), prec);
        if let Some(dp) = p.degree() {
            if dp >= m {
                return Err(Error::InvalidInput(format!("need deg p < deg q, got {dp} >= {m}")));
            }
        }
        let pn = p.norm().to_f64();
        for e in &poles {
            let scale = pn * (1.0 + e.eta.abs().to_f64()).powi(m as i32);
            if p.eval(&e.eta).abs().to_f64() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidInput("p and q share a root".into()));
            }
        }
        Ok(RationalPart { p, q, poles })
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// `m = deg q`.
    pub fn degree(&self) -> usize {
        self.q.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    pub fn eval(&self, z: &Cplx) -> Cplx {
        self.p.eval(z) / self.q.eval(z)
    }

    pub fn scaled(&self, k: &Cplx) -> RationalPart {
        RationalPart { p: self.p.scale(k), q: self.q.clone(), poles: self.poles.clone() }
    }

    /// The same function in the variable `s` with `z = a + b s`.
    pub fn affine(&self, a: &Real, b: &Real) -> RationalPart {
        let prec = self.q.prec();
        let (ac, bc) = (Cplx::from_real(a), Cplx::from_real(b));
        let lead = bc.powi(self.degree() as i64).recip();
        let inv_b = b.recip();
        let poles = self
            .poles
            .iter()
            .map(|e| Pole { eta: (&e.eta - &ac) * &inv_b, multiplicity: e.multiplicity })
            .collect();
        let q = self.q.compose_affine(&bc, &ac).scale(&lead);
        let q = Poly::new(q.into_coeffs().into_iter().map(|c| c.with_prec(prec)).collect(), prec).monic();
        RationalPart { p: self.p.compose_affine(&bc, &ac).scale(&lead), q, poles }
    }

    /// Coefficients `d_k` of `p/q = sum_k d_k z^{-k-1}` at infinity.
    pub fn laurent(&self, count: usize) -> Vec<Cplx> {
        let prec = self.q.prec();
        let m = self.degree();
        let mut d: Vec<Cplx> = Vec::with_capacity(count);
        for s in 0..count {
            let mut v = if s < m { self.p.coeff(m - 1 - s) } else { Cplx::zero(prec) };
            for j in 0..m {
                if j + s >= m {
                    v -= &(self.q.coeff(j) * &d[j + s - m]);
                }
            }
            d.push(v);
        }
        d
    }

    /// Taylor coefficients of `p/q` at `z`.
    pub fn taylor(&self, z: &Cplx, count: usize) -> Vec<Cplx> {
        let prec = self.q.prec();
        let one = Cplx::one(prec);
        let ps = self.p.compose_affine(&one, z);
        let qs = self.q.compose_affine(&one, z);
        let inv0 = qs.coeff(0).recip();
        let mut a: Vec<Cplx> = Vec::with_capacity(count);
        for k in 0..count {
            let mut v = ps.coeff(k);
            for j in 1..=k.min(qs.degree().unwrap_or(0)) {
                v -= &(qs.coeff(j) * &a[k - j]);
            }
            a.push(v * &inv0);
        }
        a
    }

    /// Distance from `z` to the nearest pole.
    pub fn pole_distance(&self, z: &Cplx) -> Real {
        self.poles
            .iter()
            .map(|e| (z - &e.eta).abs())
            .reduce(Real::min)
            .unwrap_or_else(|| Real::from_f64(f64::INFINITY, z.prec()))
    }
}

/// Newton on `q^{(mult-1)}`, where a root of multiplicity `mult` is simple.
fn polish(q: &Poly, mut eta: Cplx, mult: usize) -> Cplx {
    let mut dq = q.clone();
    for _ in 1..mult {
        dq = dq.derivative();
    }
    for _ in 0..8 {
        let (v, d) = dq.eval_with_derivative(&eta);
        if d.is_zero() {
            break;
        }
        let step = v / d;
        if !step.is_finite() {
            break;
        }
        eta -= &step;
    }
    eta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::from_f64(re, im, 256)
    }

    #[test]
    fn geometric_laurent() {
        let ctx = ctx();
        let a = c(0.3, -0.2);
        let r = RationalPart::new(Poly::one(256), Poly::new(vec![-a.clone(), Cplx::one(256)], 256), &ctx).unwrap();
        let d = r.laurent(6);
        for (k, dk) in d.iter().enumerate() {
            assert!((dk - a.powi(k as i64)).abs() < 1e-70);
        }
    }

    #[test]
    fn clusters_multiple_pole() {
        let ctx = ctx();
        let eta = c(0.7, 0.2);
        let poles = vec![eta.clone(); 6];
        let r = RationalPart::new(Poly::one(256), Poly::from_roots(&poles, 256), &ctx).unwrap();
        assert_eq!(r.poles().len(), 1);
        assert_eq!(r.poles()[0].multiplicity, 6);
        assert!((&r.poles()[0].eta - &eta).abs() < 1e-30);
    }

    #[test]
    fn laurent_matches_value() {
        let ctx = ctx();
        let r = RationalPart::from_poles(
            Poly::new(vec![c(1.0, 0.5), c(-0.25, 0.0)], 256),
            vec![Pole { eta: c(0.2, 0.1), multiplicity: 2 }, Pole { eta: c(-0.4, 0.0), multiplicity: 1 }],
            &ctx,
        )
        .unwrap();
        let z = c(3.0, 1.0);
        let d = r.laurent(200);
        let mut s = Cplx::zero(256);
        let zi = z.recip();
        let mut pw = zi.clone();
        for dk in &d {
            s += &(dk * &pw);
            pw *= &zi;
        }
        assert!((s - r.eval(&z)).abs() < 1e-60);
    }

    #[test]
    fn taylor_matches_value() {
        let ctx = ctx();
        let r = RationalPart::from_poles(Poly::one(256), vec![Pole { eta: c(0.5, 0.5), multiplicity: 3 }], &ctx).unwrap();
        let z = c(-0.5, 0.2);
        let h = c(0.01, -0.02);
        let a = r.taylor(&z, 60);
        let mut s = Cplx::zero(256);
        let mut pw = Cplx::one(256);
        for ak in &a {
            s += &(ak * &pw);
            pw *= &h;
        }
        assert!((s - r.eval(&(&z + &h))).abs() < 1e-50);
    }

    #[test]
    fn affine_change_of_variable() {
        let ctx = ctx();
        let r = RationalPart::from_poles(
            Poly::new(vec![c(1.0, 0.5), c(-0.25, 0.0)], 256),
            vec![Pole { eta: c(0.2, 0.1), multiplicity: 2 }, Pole { eta: c(-0.4, 0.0), multiplicity: 1 }],
            &ctx,
        )
        .unwrap();
        let (a, b) = (Real::from_f64(-0.15, 256), Real::from_f64(0.55, 256));
        let s = r.affine(&a, &b);
        let x = c(0.3, 0.9);
        let z = Cplx::from_real(&a) + &x * &b;
        assert!((s.eval(&x) - r.eval(&z)).abs() < 1e-70);
        assert!((&s.poles()[0].eta * &b + Cplx::from_real(&a) - c(0.2, 0.1)).abs() < 1e-70);
    }

    #[test]
    fn rejects_bad_input() {
        let ctx = ctx();
        let q = Poly::new(vec![c(-1.0, 0.0), Cplx::one(256)], 256);
        assert!(RationalPart::new(q.clone(), q.clone(), &ctx).is_err());
        assert!(RationalPart::new(Poly::one(256), Poly::one(256), &ctx).is_err());
        let common = Poly::new(vec![c(-1.0, 0.0), Cplx::zero(256), Cplx::one(256)], 256);
        let p = Poly::new(vec![c(-1.0, 0.0), Cplx::one(256)], 256);
        assert!(RationalPart::new(p, common, &ctx).is_err());
    }
}
