use super::*;
use crate::model::measure::MeasureSpec;
use crate::pade::classical_pade;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(256).unwrap()
}

fn r(x: f64) -> Real {
    Real::from_f64(x, 256)
}

fn arcsine(c: f64, d: f64) -> CauchyFunction {
    CauchyFunction::markov(MeasureSpec::arcsine(r(c), r(d)).unwrap())
}

#[test]
fn rate_fit_recovers_geometric_decay() {
    let ns: Vec<usize> = (10..20).collect();
    let vals: Vec<f64> = ns.iter().map(|&n| 3.0 * 0.4f64.powi(n as i32)).collect();
    let fit = fit_rate(&ns, &vals, 0.4f64.ln()).unwrap();
    assert!(fit.deviation < 1e-12, "{fit:?}");
    assert!(fit_rate(&ns[..4], &vals[..4], 1.0).is_err());
}

#[test]
fn angle_map_runs_from_d_to_c() {
    let (c, d) = (-0.7, 0.4);
    let tau = 0.970105931102869194;
    let map = AngleMap::new(c, d, tau);
    assert!((map.t_of(0.0) - d).abs() < 1e-12);
    assert!((map.t_of(std::f64::consts::PI) - c).abs() < 1e-12);
    let mut prev = d;
    for k in 1..50 {
        let t = map.t_of(std::f64::consts::PI * k as f64 / 50.0);
        assert!(t < prev);
        prev = t;
    }
    // the unrescaled total is pi when tau is right
    let end = map.theta.last().copied().unwrap();
    assert!((end - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn pade_prediction_for_arcsine() {
    // Markov function of the arcsine law on [-1, 1]: 2 psi(2)^{2n} / sqrt 3
    let ctx = ctx();
    let f = arcsine(-1.0, 1.0);
    let z = Cplx::from_f64(2.0, 0.0, 256);
    let psi2 = 2.0 - 3f64.sqrt();
    for n in [4, 9] {
        let p = predict_pade(&f, n, &InterpolationScheme::classical(), std::slice::from_ref(&z), &ctx).unwrap();
        let want = 2.0 * psi2.powi(2 * n as i32) / 3f64.sqrt();
        assert!((p.error[0].re / want - 1.0).abs() < 1e-12, "{:?} vs {want}", p.error[0]);
        assert!(p.error[0].im.abs() < 1e-12 * want);
    }
    // and the actual error follows it
    let pi = classical_pade(&f, 10, &ctx).unwrap();
    let got = (f.eval(&z, &ctx).unwrap() - pi.eval(&z)).to_c64();
    let want = 2.0 * psi2.powi(20) / 3f64.sqrt();
    assert!((got.re / want - 1.0).abs() < 1e-3, "{got} vs {want}");
}

#[test]
fn ma_prediction_scales_with_measure() {
    let ctx = ctx();
    let f = arcsine(-0.5, 0.5);
    let geom = geometry(&f, &ctx).unwrap();
    let a = predict_ma(&f, &geom, 6, &[]).unwrap();
    let g = f.scaled("3", &ctx).unwrap();
    let b = predict_ma(&g, &geom, 6, &[]).unwrap();
    assert!((b.sigma / a.sigma - 3.0).abs() < 1e-12);
    assert!((b.g / a.g - 3.0).abs() < 1e-12);
    let c = predict_ma(&f, &geom, 7, &[]).unwrap();
    assert!((c.sigma / a.sigma - a.rho.powi(2)).abs() < 1e-12);
}

#[test]
fn ring_tools() {
    let eta = Complex64::new(0.5, 0.5);
    let pred = PoleRingPrediction { eta, multiplicity: 4, n: 8, radius: 0.01, shrink: 0.9 };
    let mut poles: Vec<Complex64> = (0..4).map(|k| eta + Complex64::from_polar(0.02, 0.3 + k as f64 * std::f64::consts::FRAC_PI_2)).collect();
    poles.push(Complex64::new(0.1, 0.0));
    let m = &match_pole_rings(&poles, &[pred], -0.5, 0.5)[0];
    assert_eq!(m.count, 4);
    assert!(m.max_gap_error_deg < 1e-9);
    assert!((m.implied_a - 2.0).abs() < 1e-12);
    let sweep = ring_sweep(&[10, 11, 13], &[1.0, 0.5, 0.125], 0.5).unwrap();
    assert!(sweep.deviation < 1e-12);
    assert!(ring_sweep(&[10, 10], &[1.0, 1.0], 0.5).is_err());
}

#[test]
fn interior_zero_needs_a_zero() {
    let ctx = ctx();
    let f = arcsine(-0.5, 0.5);
    let geom = geometry(&f, &ctx).unwrap();
    assert!(upsilon(&f, &InterpolationScheme::classical(), &[4], &r(0.1), &ctx).is_err());
    assert!(psi_bound(&f, &geom, &r(0.1), &ctx).is_err());
}
