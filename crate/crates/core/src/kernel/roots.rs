//! Polynomial roots: double-precision companion eigenvalues as seeds, then
//! Aberth iterations at working precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::poly::Poly;
use crate::kernel::scalar::{Cplx, Real};

const MAX_ITER: usize = 500;

fn companion_seeds(coeffs: &[Cplx]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].to_c64();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let a = -coeffs[k].to_c64() / lead;
        if !a.is_finite() {
            return None;
        }
        m[(k, n - 1)] = a;
        if k + 1 < n {
            m[(k + 1, k)] = Complex64::new(1.0, 0.0);
        }
    }
    let schur = m.try_schur(f64::EPSILON, 10_000)?;
    let eig = schur.eigenvalues()?;
    let out: Vec<Complex64> = eig.iter().copied().collect();
    if out.iter().all(|z| z.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// Seeds on a circle whose radius is the Fujiwara-type geometric mean bound.
fn circle_seeds(coeffs: &[Cplx]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].abs().to_f64();
    let c0 = coeffs[0].abs().to_f64();
    let r = if c0 > 0.0 && lead > 0.0 { (c0 / lead).powf(1.0 / n as f64) } else { 1.0 };
    let r = if r.is_finite() && r > 0.0 { r } else { 1.0 };
    (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect()
}

/// Roots of `p` with multiplicity.
pub fn poly_roots(p: &Poly, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
    let deg = match p.degree() {
        None => return Err(Error::InvalidInput("zero polynomial has no finite root set".into())),
        Some(0) => return Err(Error::InvalidInput("constant polynomial has no roots".into())),
        Some(d) => d,
    };
    let prec = ctx.bits();
    let coeffs: Vec<Cplx> = p.coeffs().iter().map(|c| c.with_prec(prec)).collect();
    // roots at the origin are split off exactly
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut roots = vec![Cplx::zero(prec); zeros];
    let rest = Poly::new(coeffs[zeros..].to_vec(), prec);
    if deg - zeros == 0 {
        return Ok(roots);
    }
    roots.extend(aberth(&rest, prec));
    Ok(roots)
}

fn aberth(p: &Poly, prec: u32) -> Vec<Cplx> {
    let coeffs = p.coeffs();
    let n = coeffs.len() - 1;
    if n == 1 {
        return vec![-(&coeffs[0] / &coeffs[1])];
    }
    let seeds = companion_seeds(coeffs).unwrap_or_else(|| circle_seeds(coeffs));
    let mut z: Vec<Cplx> = seeds.iter().map(|s| Cplx::from_c64(*s, prec)).collect();
    // separate coincident seeds, Aberth needs distinct starting points
    for i in 0..n {
        for j in 0..i {
            if (&z[i] - &z[j]).abs() < 1e-14 * (1.0 + z[j].abs().to_f64()) {
                let bump = Cplx::from_c64(Complex64::from_polar(1e-8, 0.7 + i as f64), prec);
                z[i] += &bump;
            }
        }
    }
    let abs_coeffs: Vec<Real> = coeffs.iter().map(|c| c.abs()).collect();
    let eps = Real::from_f64(2f64.powi(-(prec as i32) + 1), prec);
    let step_floor = Real::from_f64(2f64.powi(-(prec as i32) + 8), prec);
    let mut converged = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(&z[i]);
            // rounding-level residual: stop refining this root
            let zabs = z[i].abs();
            let mut bound = Real::zero(prec);
            for a in abs_coeffs.iter().rev() {
                bound = bound * &zabs + a;
            }
            if val.abs() <= &bound * &eps * 16.0 {
                converged[i] = true;
                continue;
            }
            all_done = false;
            let ratio = &val / &der;
            let mut s = Cplx::zero(prec);
            for j in 0..n {
                if j != i {
                    s += &(&z[i] - &z[j]).recip();
                }
            }
            let denom = Cplx::one(prec) - &ratio * &s;
            let w = if denom.is_zero() || !denom.is_finite() { ratio } else { &ratio / &denom };
            if !w.is_finite() {
                continue;
            }
            z[i] -= &w;
            if w.abs() <= &step_floor * (z[i].abs() + 1.0) {
                converged[i] = true;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

/// Largest scaled residual `|p(r)| / (|p| (1 + |r|)^deg)` over the roots.
pub fn root_residual(p: &Poly, roots: &[Cplx]) -> f64 {
    let deg = p.degree().unwrap_or(0) as i32;
    let norm = p.norm();
    roots
        .iter()
        .map(|r| (p.eval(r).abs() / (&norm * (r.abs() + 1.0).powi(deg))).to_f64())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn sorted(mut v: Vec<Cplx>) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = v.drain(..).map(|z| z.to_c64()).collect();
        out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        out
    }

    #[test]
    fn quadratic() {
        let p = Poly::new(vec![Cplx::from_f64(-1.0, 0.0, 256), Cplx::zero(256), Cplx::one(256)], 256);
        let r = sorted(poly_roots(&p, &ctx()).unwrap());
        assert!((r[0] + 1.0).norm() < 1e-30 && (r[1] - 1.0).norm() < 1e-30);
    }

    #[test]
    fn double_root() {
        let one = Cplx::one(256);
        let p = Poly::from_roots(&[one.clone(), one], 256);
        let ctx = ctx();
        let r = poly_roots(&p, &ctx).unwrap();
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!((z - 1.0).abs() < 1e-30);
        }
        assert!(root_residual(&p, &r) <= 10.0 * ctx.tol());
    }

    #[test]
    fn random_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let roots: Vec<Cplx> = (0..8)
            .map(|_| Cplx::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 256))
            .collect();
        let p = Poly::from_roots(&roots, 256);
        let found = poly_roots(&p, &ctx()).unwrap();
        for r in &roots {
            let best = found.iter().map(|f| (f - r).abs()).fold(Real::from_f64(1.0, 256), Real::min);
            assert!(best < 1e-20);
        }
    }

    #[test]
    fn zero_roots_split_off() {
        let p = Poly::new(vec![Cplx::zero(256), Cplx::zero(256), Cplx::from_f64(-2.0, 0.0, 256), Cplx::one(256)], 256);
        let r = sorted(poly_roots(&p, &ctx()).unwrap());
        assert_eq!(r.len(), 3);
        assert!(r[0].norm() == 0.0 && r[1].norm() == 0.0 && (r[2] - 2.0).norm() < 1e-30);
    }

    #[test]
    fn rejects_zero_polynomial() {
        assert!(poly_roots(&Poly::zero(256), &ctx()).is_err());
    }
}
