use super::*;
use crate::model::measure::Piece;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn arcsine(c: f64, d: f64) -> VaryingWeight {
    let ctx = ctx();
    VaryingWeight::new(MeasureSpec::arcsine(ctx.real(c), ctx.real(d)).unwrap())
}

fn smooth_positive() -> VaryingWeight {
    let ctx = ctx();
    let m = MeasureSpec::new(
        ctx.real(-1.0),
        ctx.real(1.0),
        vec![Piece { from: ctx.real(-1.0), to: ctx.real(1.0), h: Expr::parse("2+cos(t)").unwrap() }],
        (0.0, 0.0),
        vec![],
    )
    .unwrap();
    VaryingWeight::new(m)
}

fn cz(re: f64, im: f64) -> Cplx {
    Cplx::from_f64(re, im, 256)
}

#[test]
fn monic_chebyshev_low_degree() {
    let ctx = ctx();
    let nu = arcsine(-1.0, 1.0);
    let u1 = orthogonal_poly(&nu, 1, &ctx).unwrap();
    assert!(u1.monic);
    assert!(u1.u.coeff(0).abs() < 1e-70);
    assert!((u1.u.coeff(1) - 1.0).abs() < 1e-70);
    let u2 = orthogonal_poly(&nu, 2, &ctx).unwrap();
    let want = [-0.5, 0.0, 1.0];
    for (k, w) in want.iter().enumerate() {
        assert!((u2.u.coeff(k) - *w).abs() < 1e-70, "coefficient {k}");
    }
    // int t^2 (t^2 - 1/2) d omega = 3/8 - 1/4
    assert!((&u2.gamma - 0.125).abs() < 1e-70);
}

#[test]
fn residuals_within_tolerance_and_exact_degree() {
    let ctx = ctx();
    let nu = smooth_positive();
    for n in [4, 9, 16] {
        let r = orthogonal_poly(&nu, n, &ctx).unwrap();
        assert_eq!(r.degree(), Some(n));
        assert!(r.monic);
        assert!(r.max_residual <= residual_tolerance(&ctx), "n={n}: {}", r.max_residual);
    }
}

#[test]
fn second_kind_forms_agree() {
    let ctx = ctx();
    let nu = arcsine(-1.0, 1.0);
    let r0 = second_kind(&nu, &Poly::one(256), &cz(2.0, 0.0), &ctx).unwrap();
    assert!((r0 - Real::from_f64(3.0, 256).sqrt().recip()).abs() < 1e-70);

    let nu = smooth_positive();
    let u = orthogonal_poly(&nu, 6, &ctx).unwrap().u;
    for z in [cz(0.3, 0.7), cz(-1.5, -0.2), cz(2.0, 1.0)] {
        let a = second_kind(&nu, &u, &z, &ctx).unwrap();
        let b = second_kind_squared(&nu, &u, &z, &ctx).unwrap();
        assert!((&a - &b).abs() < a.abs() * 1e-40, "z={z}");
    }
    assert!(second_kind(&nu, &u, &cz(0.2, 0.0), &ctx).is_err());
}

#[test]
fn second_kind_leading_term() {
    let ctx = ctx();
    let nu = smooth_positive();
    let r = orthogonal_poly(&nu, 5, &ctx).unwrap();
    let z = cz(1e4, 0.0);
    let v = second_kind(&nu, &r.u, &z, &ctx).unwrap() * z.powi(6);
    // next term is O(1/z)
    assert!(((v - &r.gamma).abs() / r.gamma.abs()).to_f64() < 1e-3);
}

#[test]
fn chebyshev_strong_asymptotics() {
    let ctx = ctx();
    let nu = arcsine(-1.0, 1.0);
    let pred = OrthoPredictor::new(&nu, &ctx).unwrap();
    let z = cz(2.0, 0.0);
    let u = orthogonal_poly(&nu, 8, &ctx).unwrap().u;
    let p = pred.predict(8, &z).unwrap();
    assert!((u.eval(&z) * &p.s_n - 1.0).abs() < 0.05);
    assert!((&p.gamma - 2.0 / 4f64.powi(8)).abs() < 1e-70);
}

#[test]
fn product_convergence_for_smooth_weight() {
    let ctx = ctx();
    let nu = smooth_positive();
    let pred = OrthoPredictor::new(&nu, &ctx).unwrap();
    let points = [cz(0.0, 0.5), cz(1.5, 0.0), cz(-1.3, 0.4), cz(0.5, -0.8), cz(-0.2, 1.5)];
    let worst = |n: usize| -> f64 {
        let r = orthogonal_poly(&nu, n, &ctx).unwrap();
        points
            .iter()
            .map(|z| {
                let rn = second_kind(&nu, &r.u, z, &ctx).unwrap();
                let (a, b) = pred.products(n, z, &r.u, &rn).unwrap();
                (a - 1.0).abs().to_f64().max((b - 1.0).abs().to_f64())
            })
            .fold(0.0, f64::max)
    };
    let (w8, w16) = (worst(8), worst(16));
    assert!(w16 < w8, "{w16} vs {w8}");
    assert!(w16 < 0.05);
}

#[test]
fn observed_gamma_matches_prediction() {
    let ctx = ctx();
    let nu = smooth_positive();
    let pred = OrthoPredictor::new(&nu, &ctx).unwrap();
    let r = orthogonal_poly(&nu, 16, &ctx).unwrap();
    let p = pred.predict(16, &cz(2.0, 0.0)).unwrap();
    let ratio = (&r.gamma / &p.gamma).abs().to_f64();
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn zeros_approach_the_support() {
    let ctx = ctx();
    let m = MeasureSpec::new(
        ctx.real(-0.5),
        ctx.real(0.5),
        vec![Piece { from: ctx.real(-0.5), to: ctx.real(0.5), h: Expr::parse("exp(i*t)").unwrap() }],
        (0.0, 0.0),
        vec![],
    )
    .unwrap();
    let nu = VaryingWeight::new(m);
    let spread = |n: usize| -> f64 {
        let u = orthogonal_poly(&nu, n, &ctx).unwrap().u;
        poly_roots(&u, &ctx)
            .unwrap()
            .iter()
            .map(|r| cut_distance(&ctx.real(-0.5), &ctx.real(0.5), r))
            .fold(0.0, f64::max)
    };
    let (a, b) = (spread(6), spread(12));
    assert!(b < a, "{b} vs {a}");
}

#[test]
fn divisor_weight_is_orthogonal() {
    let ctx = ctx();
    let v = Poly::from_roots(&[cz(1.5, 0.3), cz(1.5, -0.3)], 256);
    let nu = arcsine(-1.0, 1.0).with_divisor(v.clone(), &ctx).unwrap();
    let r = orthogonal_poly(&nu, 5, &ctx).unwrap();
    for j in 0..5 {
        let val = nu
            .integrate(|t| Cplx::from_real(&t.powi(j)) * r.u.eval(&Cplx::from_real(t)), &[], 10, &ctx)
            .unwrap();
        assert!(val.abs() < 1e-60, "j={j}");
    }
    let bad = Poly::from_roots(&[cz(0.2, 0.0)], 256);
    assert!(arcsine(-1.0, 1.0).with_divisor(bad, &ctx).is_err());
}

#[test]
fn frame_round_trip() {
    let a = Real::from_f64(-0.15, 256);
    let b = Real::from_f64(0.55, 256);
    let p = Poly::new(vec![cz(0.25, 0.0), cz(-1.0, 0.5), cz(1.0, 0.0)], 256);
    let q = from_frame(&p, &a, &b, 2);
    let z = cz(0.3, 0.2);
    let s = (&z - Cplx::from_real(&a)) / Cplx::from_real(&b);
    let want = p.eval(&s) * Cplx::from_real(&b.square());
    assert!((q.eval(&z) - want).abs() < 1e-70);
    assert!((q.coeff(2) - 1.0).abs() < 1e-70);
}
