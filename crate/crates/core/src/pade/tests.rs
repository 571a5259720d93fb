use super::*;
use crate::conformal::maps::{psi, Side};
use crate::model::expr::Expr;
use crate::model::measure::{MeasureSpec, Piece};
use crate::model::rational::{Pole, RationalPart};
use crate::model::spec::FunctionSpec;
use crate::ortho::orthogonal_poly;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn cz(re: f64, im: f64) -> Cplx {
    Cplx::from_f64(re, im, 256)
}

fn markov(c: f64, d: f64) -> CauchyFunction {
    let ctx = ctx();
    CauchyFunction::markov(MeasureSpec::arcsine(ctx.real(c), ctx.real(d)).unwrap())
}

fn sextic() -> CauchyFunction {
    FunctionSpec::from_json(
        r#"{
        "measure": {"interval": [-0.7, 0.4], "pieces": [
            {"from": -0.7, "to": 0, "h": "7*pi*exp(i*t)"},
            {"from": 0, "to": 0.4, "h": "pi*(i*t+1)"}]},
        "rational": {"p": [["1/120", 0]], "q_roots": [{"root": [0.7, 0.2], "multiplicity": 6}]}
    }"#,
    )
    .unwrap()
    .build(&ctx())
    .unwrap()
}

/// Monic Chebyshev coefficients `T_n / 2^(n-1)` by the three-term recurrence.
fn monic_chebyshev(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        let shrink = if k == 1 { 0.5 } else { 0.25 };
        for (i, c) in prev.iter().enumerate() {
            next[i] -= shrink * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[test]
fn chebyshev_denominators() {
    let ctx = ctx();
    let f = markov(-1.0, 1.0);
    for n in 1..=10 {
        let pi = classical_pade(&f, n, &ctx).unwrap();
        assert!(pi.monic && !pi.degenerate);
        for (k, w) in monic_chebyshev(n).iter().enumerate() {
            assert!((pi.q.coeff(k) - *w).abs() < 1e-30, "n={n} k={k}");
        }
    }
}

#[test]
fn rational_function_reproduced() {
    let ctx = ctx();
    let a = cz(0.3, -0.4);
    let r = RationalPart::from_poles(Poly::one(256), vec![Pole { eta: a.clone(), multiplicity: 1 }], &ctx).unwrap();
    let f = CauchyFunction::new(None, Some(r)).unwrap();
    let pi = classical_pade(&f, 1, &ctx).unwrap();
    assert!((pi.q.coeff(0) + &a).abs() < 1e-70);
    let z = cz(1.1, 0.7);
    assert!((pi.eval(&z) - (&z - &a).recip()).abs() < 1e-70);
    let mp = multipoint_pade(&f, 1, &[Some(cz(2.0, 0.0)), Some(cz(0.0, 3.0))], &ctx).unwrap();
    assert!((mp.eval(&z) - (&z - &a).recip()).abs() < 1e-60);
    let e = pade_error(&f, &pi, &z, &ctx).unwrap();
    assert!(e.direct.abs() < 1e-70 && e.integral.is_none());
}

#[test]
fn multipoint_at_infinity_is_classical() {
    let ctx = ctx();
    let f = sextic();
    for n in [3, 8] {
        let a = classical_pade(&f, n, &ctx).unwrap();
        let b = multipoint_pade(&f, n, &vec![None; 2 * n], &ctx).unwrap();
        for k in 0..=n {
            assert!((a.q.coeff(k) - b.q.coeff(k)).abs() < 1e-30, "n={n} q_{k}");
            assert!((a.p.coeff(k) - b.p.coeff(k)).abs() < 1e-30, "n={n} p_{k}");
        }
    }
}

#[test]
fn circle_scheme_interpolates() {
    let ctx = ctx();
    let f = markov(-0.5, 0.5);
    let scheme = InterpolationScheme::conjugate_circle(3.0, None).unwrap();
    let pts = scheme.finite_points(6, 256).unwrap();
    assert_eq!(pts.len(), 12);
    let pi = pade_for_scheme(&f, 6, &scheme, &ctx).unwrap();
    for e in &pts {
        let fe = f.eval(e, &ctx).unwrap();
        let scale = pi.q.eval(e).abs() * fe.abs() + pi.p.eval(e).abs();
        let res = (pi.q.eval(e) * &fe - pi.p.eval(e)).abs();
        assert!(res < scale * 1e-20, "{e}");
    }
    // uniqueness: same rational function as a second, unit-norm solve
    let v = pi.eval(&cz(0.2, 1.3));
    assert!(pi.residual < 1e-60);
    let again = multipoint_pade(&f, 6, &scheme.points(6, 256).unwrap(), &ctx).unwrap();
    assert!((again.eval(&cz(0.2, 1.3)) - v).abs() < 1e-50);
}

#[test]
fn confluent_points() {
    let ctx = ctx();
    let f = markov(-0.5, 0.5);
    let e = cz(1.5, 0.5);
    let nodes = vec![Some(e.clone()), Some(e.clone()), Some(e.conj()), Some(e.conj())];
    let pi = multipoint_pade(&f, 2, &nodes, &ctx).unwrap();
    // q C - p has a double zero at e
    let h = cz(1e-6, 0.0);
    let g = |z: &Cplx| pi.q.eval(z) * f.eval(z, &ctx).unwrap() - pi.p.eval(z);
    let ratio = (g(&(&e + &h)).abs() / g(&(&e + &(&h * 2.0))).abs()).to_f64();
    assert!((ratio - 0.25).abs() < 1e-3, "{ratio}");
    assert!(g(&e).abs() < 1e-60);
}

#[test]
fn exclusion_zone_is_rejected() {
    let f = markov(-0.5, 0.5);
    let nodes = vec![Some(cz(0.1, 1e-9)), None];
    assert!(matches!(multipoint_pade(&f, 1, &nodes, &ctx()), Err(Error::Domain(_))));
}

#[test]
fn admissibility_sums() {
    let ctx = ctx();
    let f = markov(-0.5, 0.5);
    let sym = admissibility_report(&InterpolationScheme::conjugate_circle(2.0, None).unwrap(), 8, &f, &ctx).unwrap();
    assert!(sym.levels.iter().all(|l| l.matching_sum < 1e-12));
    assert!(!sym.growth_flagged);
    let cl = admissibility_report(&InterpolationScheme::classical(), 8, &f, &ctx).unwrap();
    assert!(cl.levels.iter().all(|l| l.matching_sum == 0.0));

    let levels: Vec<Vec<Node>> = (1..=12)
        .map(|n| {
            let mut l: Vec<Node> = vec![Some(cz(2.0, 1.0)); n];
            l.resize(2 * n, None);
            l
        })
        .collect();
    let rep = admissibility_report(&InterpolationScheme::explicit(levels).unwrap(), 12, &f, &ctx).unwrap();
    let (c, d) = (ctx.real(-0.5), ctx.real(0.5));
    let gap = (psi(&c, &d, &cz(2.0, -1.0), Side::Off).unwrap() - psi(&c, &d, &cz(2.0, 1.0), Side::Off).unwrap())
        .abs()
        .to_f64();
    for l in &rep.levels {
        assert!((l.matching_sum - gap * l.n as f64).abs() < 1e-10);
    }
    assert!(rep.growth_flagged);
}

#[test]
fn error_integral_cross_check() {
    let ctx = ctx();
    let f = markov(-0.5, 0.5);
    let pi = classical_pade(&f, 8, &ctx).unwrap();
    let e = pade_error(&f, &pi, &cz(2.0, 0.0), &ctx).unwrap();
    let i = e.integral.unwrap();
    assert!((&e.direct - &i).abs() < e.direct.abs() * 1e-10);

    let g = sextic();
    let pi = classical_pade(&g, 10, &ctx).unwrap();
    let z = cz(-0.3, 0.6);
    let e = pade_error(&g, &pi, &z, &ctx).unwrap();
    assert!((&e.direct - e.integral.unwrap()).abs() < e.direct.abs() * 1e-10);
}

#[test]
fn error_decays_like_psi_squared() {
    let ctx = ctx();
    let f = markov(-0.5, 0.5);
    let z = cz(2.0, 0.0);
    let q = psi(&ctx.real(-0.5), &ctx.real(0.5), &z, Side::Off).unwrap().abs().square().to_f64();
    let err = |n| pade_error(&f, &classical_pade(&f, n, &ctx).unwrap(), &z, &ctx).unwrap().direct.abs().to_f64();
    let ratio = err(11) / err(10);
    assert!((ratio / q - 1.0).abs() < 0.01, "{ratio} vs {q}");
}

#[test]
fn orthogonality_of_denominators() {
    let ctx = ctx();
    let f = sextic();
    let pi = classical_pade(&f, 12, &ctx).unwrap();
    let r = orthogonality_residuals(&f, &pi, &ctx).unwrap();
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|x| *x < 1e-30), "{r:?}");
}

#[test]
fn ortho_and_pade_denominators_agree() {
    let ctx = ctx();
    let m = MeasureSpec::new(
        ctx.real(-0.5),
        ctx.real(0.5),
        vec![Piece { from: ctx.real(-0.5), to: ctx.real(0.5), h: Expr::parse("2+t").unwrap() }],
        (0.0, 0.0),
        vec![],
    )
    .unwrap();
    let f = CauchyFunction::markov(m.clone());
    let u = orthogonal_poly(&crate::ortho::VaryingWeight::new(m), 7, &ctx).unwrap().u;
    let q = classical_pade(&f, 7, &ctx).unwrap().q;
    for k in 0..=7 {
        assert!((u.coeff(k) - q.coeff(k)).abs() < 1e-50);
    }
}

#[test]
fn pole_dichotomy() {
    let ctx = ctx();
    let f = sextic();
    let pi = classical_pade(&f, 24, &ctx).unwrap();
    assert_eq!(pi.poles.len(), 24);
    assert_eq!(pi.poles_of(PoleClass::Rational).len(), 6);
    assert_eq!(pi.poles_of(PoleClass::Support).len(), 18);
}

