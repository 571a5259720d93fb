//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints one PASS/FAIL line even when output is captured.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cauchy_approx::aak::{aak_approximant, aak_error_on_circle, circle_samples, hankel_svd, OuterFactor};
use cauchy_approx::asymptotics::{
    fit_rate, geometry, ma_geometric_mean, match_pole_rings, predict_ma, predict_pade, psi_bound, ring_sweep, upsilon,
};
use cauchy_approx::conformal::maps::{psi, Side};
use cauchy_approx::conformal::{Rk, Weight};
use cauchy_approx::kernel::context::PrecisionContext;
use cauchy_approx::kernel::poly::Poly;
use cauchy_approx::kernel::scalar::{Cplx, Real};
use cauchy_approx::model::{CauchyFunction, Expr, InteriorZero, MeasureSpec, Piece};
use cauchy_approx::ortho::{orthogonal_poly, OrthoPredictor, VaryingWeight};
use cauchy_approx::pade::{classical_pade, min_matching, InterpolationScheme};
use num_complex::Complex64;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ctx() -> PrecisionContext {
    PrecisionContext::new(256).unwrap()
}

fn cz(re: f64, im: f64) -> Cplx {
    Cplx::from_f64(re, im, 256)
}

fn arcsine(c: f64, d: f64, ctx: &PrecisionContext) -> CauchyFunction {
    CauchyFunction::markov(MeasureSpec::arcsine(ctx.real(c), ctx.real(d)).unwrap())
}

/// Monic Chebyshev polynomials `2^{1-n} T_n`, coefficients lowest first.
fn monic_chebyshev(n: usize, prec: u32) -> Vec<Real> {
    let mut prev = vec![Real::one(prec)];
    let mut cur = vec![Real::zero(prec), Real::one(prec)];
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let mut next = vec![Real::zero(prec); cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += &(c * 2.0);
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
    }
    let lead = cur.last().unwrap().clone();
    cur.iter().map(|c| c / &lead).collect()
}

fn c1_chebyshev() -> Outcome {
    let ctx = ctx();
    let start = Instant::now();
    let f = arcsine(-1.0, 1.0, &ctx);
    let mut worst = 0.0f64;
    for n in 1..=10 {
        let pi = classical_pade(&f, n, &ctx).unwrap();
        let want = monic_chebyshev(n, 256);
        let q = pi.q.monic();
        for (k, w) in want.iter().enumerate() {
            worst = worst.max((q.coeff(k) - Cplx::from_real(w)).abs().to_f64());
        }
    }
    let t = start.elapsed();
    outcome(worst < 1e-30 && t < Duration::from_secs(10), format!("max coefficient error {worst:.2e}, {:.2}s", t.as_secs_f64()))
}

fn c2_geometry() -> Outcome {
    let ctx = ctx();
    let f = build("piecewise-sextic", &ctx);
    let geom = geometry(&f, &ctx).unwrap();
    let (c, d) = (geom.c().clone(), geom.d().clone());
    let rho = geom.rho().unwrap().clone();
    let mut phi_err = 0.0f64;
    let mut psi_err = 0.0f64;
    let mut r_err = 0.0f64;
    let rk = Rk::from_roots(&c, &d, &[cz(0.3, 0.8), cz(-0.9, -0.2), cz(0.7, 0.2)], 9).unwrap();
    for j in 0..64 {
        let t = &c + (&d - &c) * ((j as f64 + 0.5) / 64.0);
        let z = Cplx::from_real(&t);
        let m = geom.condenser_map(&z, Side::Plus).unwrap().abs();
        phi_err = phi_err.max(((m / &rho).to_f64() - 1.0).abs());
        let pp = psi(&c, &d, &z, Side::Plus).unwrap() * psi(&c, &d, &z, Side::Minus).unwrap();
        psi_err = psi_err.max((pp - Cplx::one(256)).abs().to_f64());
        let rr = rk.eval(&z, Side::Plus).unwrap() * rk.eval(&z, Side::Minus).unwrap();
        r_err = r_err.max((rr - Cplx::one(256)).abs().to_f64());
    }
    let weight = Weight::density(f.measure().unwrap());
    let (_, w) = geom.green_quad_singular(weight.breaks(), weight.endpoint_singular()).unwrap();
    let total = w.iter().fold(Real::zero(256), |a, x| a + x);
    let sum_err = (total.to_f64() - 1.0).abs();
    outcome(
        phi_err < 1e-8 && sum_err < 1e-10 && psi_err < 1e-20 && r_err < 1e-20,
        format!("|Phi+|/rho - 1 {phi_err:.2e}, green weight sum error {sum_err:.2e}, psi+psi- {psi_err:.2e}, r+r- {r_err:.2e}"),
    )
}

fn c3_constant_modulus() -> Outcome {
    let ctx = ctx();
    let f = build("piecewise-sextic", &ctx);
    let svd = hankel_svd(&f, 10, Some(128), &ctx).unwrap();
    let g = svd.approximant(10, &ctx).unwrap();
    let err = aak_error_on_circle(svd.truncation(), &g, &circle_samples(1024, 256)).unwrap();
    let rel = err.deviation / g.sigma.to_f64();
    outcome(rel < 0.01, format!("max | |f_N - g_n| - sigma_n | / sigma_n = {rel:.2e} over 1024 samples"))
}

fn c4_ma_rate() -> Outcome {
    let ctx = ctx();
    let start = Instant::now();
    let f = arcsine(-0.5, 0.5, &ctx);
    let geom = geometry(&f, &ctx).unwrap();
    let rho = geom.rho().unwrap().to_f64();
    let svd = hankel_svd(&f, 24, None, &ctx).unwrap();
    let ns: Vec<usize> = (10..=24).collect();
    let sig: Vec<f64> = ns.iter().map(|&n| svd.sigma()[n].to_f64()).collect();
    let fit = fit_rate(&ns, &sig, 2.0 * rho.ln()).unwrap();
    let t = start.elapsed();
    outcome(
        fit.deviation < 0.02 && t < Duration::from_secs(300),
        format!("slope {:.6} vs 2 log rho {:.6} ({:.3}%), {:.1}s", fit.slope, fit.theoretical, 100.0 * fit.deviation, t.as_secs_f64()),
    )
}

fn c5_pade_rate() -> Outcome {
    let ctx = ctx();
    let f = arcsine(-0.5, 0.5, &ctx);
    let z = cz(2.0, 0.0);
    let fz = f.eval(&z, &ctx).unwrap();
    let q2 = psi(&ctx.real(-0.5), &ctx.real(0.5), &z, Side::Off).unwrap().abs().square().to_f64();
    let mut errs = Vec::new();
    for n in 12..=25 {
        let pi = classical_pade(&f, n, &ctx).unwrap();
        errs.push((n, (&fz - pi.eval(&z)).abs().to_f64()));
    }
    let worst_ratio = errs.windows(2).map(|w| ((w[1].1 / w[0].1) / q2 - 1.0).abs()).fold(0.0, f64::max);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &(n, e) in errs.iter().filter(|(n, _)| *n >= 16) {
        let p = predict_pade(&f, n, &InterpolationScheme::classical(), std::slice::from_ref(&z), &ctx).unwrap();
        let r = p.error[0].norm() / e;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    outcome(
        worst_ratio < 0.01 && lo >= 0.8 && hi <= 1.25,
        format!("decay ratio vs |psi(2)|^2 worst {:.2e}; prediction/observed in [{lo:.6}, {hi:.6}]", worst_ratio),
    )
}

fn ring_report(label: &str, sweep: &PoleSweep, shrink: f64, eta: Complex64, c: f64, d: f64) -> (bool, String) {
    let pred = cauchy_approx::asymptotics::PoleRingPrediction { eta, multiplicity: 6, n: 0, radius: 1.0, shrink };
    let mut count_ok = true;
    let mut worst_gap = 0.0f64;
    let mut ns = Vec::new();
    let mut radii = Vec::new();
    for (&n, poles) in sweep {
        let poles: Vec<Complex64> = poles.iter().map(|p| p.to_c64()).collect();
        let m = &match_pole_rings(&poles, std::slice::from_ref(&pred), c, d)[0];
        if n >= 25 {
            count_ok &= m.count == 6;
            worst_gap = worst_gap.max(m.max_gap_error_deg);
            ns.push(n);
            radii.push(m.mean_radius);
        }
    }
    let s = ring_sweep(&ns, &radii, shrink).unwrap();
    let ok = count_ok && worst_gap < 15.0 && s.deviation < 0.2;
    (ok, format!("{label}: 6 poles {count_ok}, gap error {worst_gap:.2}deg, shrink {:.4} vs {:.4}", s.mean_ratio, shrink))
}

fn golden_match(sweep: &PoleSweep, file: &str) -> f64 {
    let golden = read_poles(&golden_path(file));
    let mut worst = 0.0f64;
    for (n, poles) in sweep {
        let ours: Vec<Complex64> = poles.iter().map(|p| p.to_c64()).collect();
        worst = worst.max(match golden.get(n) {
            Some(g) if g.len() == ours.len() => min_matching(&ours, g),
            _ => f64::INFINITY,
        });
    }
    worst
}

fn c6_pole_rings() -> Outcome {
    let ctx = ctx();
    let f = build("piecewise-sextic", &ctx);
    let geom = geometry(&f, &ctx).unwrap();
    let eta = cz(0.7, 0.2);
    let (c, d) = (geom.c().to_f64(), geom.d().to_f64());
    let pade_shrink = psi(geom.c(), geom.d(), &eta, Side::Off).unwrap().abs().to_f64().powf(1.0 / 3.0);
    let phi = geom.condenser_map(&eta, Side::Off).unwrap().abs();
    let ma_shrink = (geom.rho().unwrap() / phi).to_f64().powf(1.0 / 3.0);
    let pade = sextic_pade_poles(RING_NS, &ctx);
    let aak = sextic_aak_poles(RING_NS, &ctx);
    let (ok_p, msg_p) = ring_report("pade", &pade, pade_shrink, eta.to_c64(), c, d);
    let (ok_a, msg_a) = ring_report("aak", &aak, ma_shrink, eta.to_c64(), c, d);
    let gp = golden_match(&pade, "sextic_pade_poles.csv");
    let ga = golden_match(&aak, "sextic_aak_poles.csv");
    outcome(
        ok_p && ok_a && gp < 1e-6 && ga < 1e-6,
        format!("{msg_p}; {msg_a}; golden distance pade {gp:.1e} aak {ga:.1e}"),
    )
}

fn c7_product_convergence() -> Outcome {
    let ctx = ctx();
    let m = MeasureSpec::new(
        ctx.real(-1.0),
        ctx.real(1.0),
        vec![Piece { from: ctx.real(-1.0), to: ctx.real(1.0), h: Expr::parse("2+cos(t)").unwrap() }],
        (0.0, 0.0),
        vec![],
    )
    .unwrap();
    let nu = VaryingWeight::new(m);
    let pred = OrthoPredictor::new(&nu, &ctx).unwrap();
    let points = [cz(0.0, 0.5), cz(1.5, 0.0), cz(-1.3, 0.4), cz(0.5, -0.8), cz(-0.2, 1.5)];
    let worst = |n: usize| -> f64 {
        let u = orthogonal_poly(&nu, n, &ctx).unwrap().u;
        points
            .iter()
            .map(|z| (u.eval(z) * pred.predict(n, z).unwrap().s_n - Cplx::one(256)).abs().to_f64())
            .fold(0.0, f64::max)
    };
    let (w10, w20, w24) = (worst(10), worst(20), worst(24));
    outcome(w20 < w10 && w24 < 0.05, format!("max |u_n S_n - 1|: n=10 {w10:.2e}, n=20 {w20:.2e}, n=24 {w24:.2e}"))
}

fn c8_outer_factor() -> Outcome {
    let ctx = ctx();
    let f = build("markov-half", &ctx);
    let geom = geometry(&f, &ctx).unwrap();
    let svd = hankel_svd(&f, 20, None, &ctx).unwrap();
    let mut points = Vec::new();
    for r in [0.0, 0.3, 0.6, 0.9] {
        for k in 0..16 {
            points.push(Cplx::from_c64(Complex64::from_polar(r, k as f64 * std::f64::consts::PI / 8.0), 256));
        }
    }
    let mut devs = Vec::new();
    for n in [8, 12, 16, 20] {
        let v = svd.approximant(n, &ctx).unwrap().v;
        let w = OuterFactor::new(&v, 4096, &ctx).unwrap();
        let samples: Vec<Cplx> = points.iter().map(|z| w.eval(z).unwrap()).collect();
        let rep = cauchy_approx::asymptotics::validate_outer_factor(&samples, &points, &geom, &Poly::one(256), &ctx).unwrap();
        devs.push(rep.max_deviation);
    }
    let ok = devs.windows(2).all(|w| w[1] < w[0]);
    outcome(ok, format!("max |w_n - T/S~| at n = 8, 12, 16, 20: {}", devs.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(", ")))
}

fn c9_zero_bounds() -> Outcome {
    let ctx = ctx();
    let xs = [-0.45, 0.1, 0.6];
    let zeros: Vec<InteriorZero> = xs.iter().map(|&x| InteriorZero { x: ctx.real(x), alpha: 0.25 }).collect();
    let m = MeasureSpec::new(
        ctx.real(-1.0),
        ctx.real(1.0),
        vec![Piece { from: ctx.real(-1.0), to: ctx.real(1.0), h: Expr::parse("2+cos(t)").unwrap() }],
        (0.0, 0.0),
        zeros,
    )
    .unwrap();
    let f = CauchyFunction::markov(m);
    let scheme = InterpolationScheme::conjugate_circle(1.5, None).unwrap();
    let mut ups_err = 0.0f64;
    for &x in &xs {
        let b = upsilon(&f, &scheme, &[8, 12, 16], &ctx.real(x), &ctx).unwrap();
        ups_err = ups_err.max((b.bound - 1.0).abs());
    }

    // h = e^{it} on [-0.5, 0.5]: scf^- = exp(-sqrt((x - c)(d - x))), V_h = 1,
    // s0 = 2 - sqrt 3, s1 = 1/(sqrt 3 + 3/2)
    let x = 0.1;
    let m = MeasureSpec::new(
        ctx.real(-0.5),
        ctx.real(0.5),
        vec![Piece { from: ctx.real(-0.5), to: ctx.real(0.5), h: Expr::parse("exp(i*t)").unwrap() }],
        (0.0, 0.0),
        vec![InteriorZero { x: ctx.real(x), alpha: 0.25 }],
    )
    .unwrap();
    let f = CauchyFunction::markov(m);
    let geom = geometry(&f, &ctx).unwrap();
    let got = psi_bound(&f, &geom, &ctx.real(x), &ctx).unwrap().bound;
    let p = 512;
    let xr = Real::ratio(1, 10, p);
    let half = Real::ratio(1, 2, p);
    let sqrt3 = Real::from_i64(3, p).sqrt();
    let s0 = Real::from_i64(2, p) - &sqrt3;
    let s1 = (&sqrt3 + Real::ratio(3, 2, p)).recip();
    let root = ((&xr + &half) * (&half - &xr)).sqrt();
    let oracle = (-root - s1 * 4.0 / (Real::one(p) - s0)).exp().to_f64();
    let psi_err = (got / oracle - 1.0).abs();
    outcome(
        ups_err < 1e-8 && psi_err < 1e-10,
        format!("max |Upsilon_x - 1| {ups_err:.2e}; Psi_x {got:.15} vs oracle {oracle:.15} (rel {psi_err:.1e})"),
    )
}

fn c10_scaling() -> Outcome {
    let ctx = ctx();
    let f = build("piecewise-sextic", &ctx);
    let g = f.scaled("3*exp(i*pi/7)", &ctx).unwrap();
    let geom = geometry(&f, &ctx).unwrap();
    let ga = ma_geometric_mean(&f, &geom).unwrap().to_f64();
    let gb = ma_geometric_mean(&g, &geom).unwrap().to_f64();
    let a = aak_approximant(&f, 8, None, &ctx).unwrap();
    let b = aak_approximant(&g, 8, None, &ctx).unwrap();
    let sig = (&b.sigma / &a.sigma).to_f64();
    let aak_shift = pole_shift(&a.poles, &b.poles);
    let pa = classical_pade(&f, 8, &ctx).unwrap();
    let pb = classical_pade(&g, 8, &ctx).unwrap();
    let pade_shift = pole_shift(&pa.poles, &pb.poles);
    let pred = predict_ma(&g, &geom, 8, &[]).unwrap().sigma / predict_ma(&f, &geom, 8, &[]).unwrap().sigma;
    let ok = (sig - 3.0).abs() < 1e-12 && (gb / ga - 3.0).abs() < 1e-12 && aak_shift < 1e-20 && pade_shift < 1e-20;
    outcome(
        ok && (pred - 3.0).abs() < 1e-12,
        format!("sigma ratio {sig:.15}, G ratio {:.15}, pole shift aak {aak_shift:.1e} pade {pade_shift:.1e}", gb / ga),
    )
}

fn pole_shift(a: &[Cplx], b: &[Cplx]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    // high-precision nearest matching; the sets are well separated
    a.iter()
        .map(|p| b.iter().map(|q| (p - q).abs().to_f64()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("chebyshev denominators", c1_chebyshev),
        ("geometry self-consistency", c2_geometry),
        ("AAK constant-modulus error", c3_constant_modulus),
        ("AAK rate 2 log rho", c4_ma_rate),
        ("Pade rate and error prediction", c5_pade_rate),
        ("pole rings", c6_pole_rings),
        ("strong asymptotics products", c7_product_convergence),
        ("outer factor convergence", c8_outer_factor),
        ("interior zero bounds", c9_zero_bounds),
        ("scaling invariance", c10_scaling),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(o) => {
                println!("criterion {:>2} {}: {} ({secs:.1}s) {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
                failed += usize::from(!o.pass);
            }
            Err(_) => {
                println!("criterion {:>2} FAIL: {} ({secs:.1}s) panicked", i + 1, name);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
