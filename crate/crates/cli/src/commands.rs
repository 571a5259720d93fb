//! The four commands. Each returns the paths it wrote.

use std::path::PathBuf;

use cauchy_approx::aak::{hankel_svd, AakApproximant};
use cauchy_approx::asymptotics::{
    fit_rate, geometry, match_pole_rings, predict_ma, predict_pade, ring_sweep, PoleRingPrediction, RingMatch,
};
use cauchy_approx::conformal::maps::{psi, Side};
use cauchy_approx::kernel::context::PrecisionContext;
use cauchy_approx::kernel::scalar::Cplx;
use cauchy_approx::model::{CauchyFunction, FunctionSpec};
use cauchy_approx::pade::{classical_pade, InterpolationScheme, PadeApproximant};
use cauchy_approx::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Format, Method, RunConfig, DEFAULT_COUNT};
use crate::output::{cplx_json, cplx_list, pole_plot, Writer};

struct Setup {
    ctx: PrecisionContext,
    f: CauchyFunction,
    spec: FunctionSpec,
    label: String,
    formats: Vec<Format>,
    writer: Writer,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let ctx = PrecisionContext::new(cfg.precision()?)?;
    let (spec, label) = cfg.function()?;
    let f = spec.build(&ctx)?;
    let writer = Writer::new(&cfg.out_dir())?;
    Ok(Setup { ctx, f, spec, label, formats: cfg.formats(), writer })
}

impl Setup {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn header(&self, command: &str) -> Value {
        json!({
            "command": command,
            "function": self.label,
            "spec": serde_json::to_value(&self.spec).expect("spec serializes"),
            "precision": self.ctx.bits(),
        })
    }

    fn interval(&self) -> (f64, f64) {
        self.f.interval().map(|(c, d)| (c.to_f64(), d.to_f64())).unwrap_or((0.0, 0.0))
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

fn pole_rows(poles: &[Cplx], extra: impl Fn(usize) -> Option<String>) -> Vec<Vec<String>> {
    poles
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut row = vec![k.to_string(), p.re().to_decimal(), p.im().to_decimal()];
            row.extend(extra(k));
            row
        })
        .collect()
}

fn points(poles: &[Cplx]) -> Vec<(f64, f64)> {
    poles.iter().map(|p| (p.re().to_f64(), p.im().to_f64())).collect()
}

pub fn moments(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut s = setup(cfg)?;
    let count = cfg.count.unwrap_or(DEFAULT_COUNT);
    let c = if count == 0 { Vec::new() } else { s.f.moments(count, &s.ctx)? };
    if s.wants(Format::Csv) {
        let rows: Vec<Vec<String>> =
            c.iter().enumerate().map(|(k, z)| vec![k.to_string(), z.re().to_decimal(), z.im().to_decimal()]).collect();
        let header = vec![format!("moments of {}, {} bits", s.label, s.ctx.bits()), "k,re,im".into()];
        s.writer.csv("moments.csv", &header, &rows)?;
    }
    if s.wants(Format::Json) {
        let body = merge(s.header("moments"), json!({"count": count, "moments": cplx_list(&c)}));
        s.writer.json("moments.json", body)?;
    }
    Ok(s.writer.written)
}

fn class_name(a: &PadeApproximant, k: usize) -> String {
    serde_json::to_value(a.classes[k]).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn pade(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut s = setup(cfg)?;
    let n = cfg.n()?;
    let a = classical_pade(&s.f, n, &s.ctx)?;
    let stem = format!("pade_n{n}");
    if s.wants(Format::Csv) {
        let header = vec![format!("classical Pade poles of {}, n = {n}, {} bits", s.label, s.ctx.bits()), "k,re,im,class".into()];
        s.writer.csv(&format!("{stem}_poles.csv"), &header, &pole_rows(&a.poles, |k| Some(class_name(&a, k))))?;
    }
    if s.wants(Format::Json) {
        let poles: Vec<Value> = a
            .poles
            .iter()
            .enumerate()
            .map(|(k, p)| json!({"z": cplx_json(p), "class": class_name(&a, k)}))
            .collect();
        let body = merge(
            s.header("pade"),
            json!({
                "n": n,
                "denominator": cplx_list(a.q.coeffs()),
                "numerator": cplx_list(a.p.coeffs()),
                "poles": poles,
                "monic": a.monic,
                "degenerate": a.degenerate,
                "residual": a.residual,
            }),
        );
        s.writer.json(&format!("{stem}.json"), body)?;
    }
    if s.wants(Format::Svg) {
        let (c, d) = s.interval();
        s.writer.svg(&format!("{stem}.svg"), &pole_plot(c, d, &points(&a.poles), &format!("Pade poles, n = {n}")))?;
    }
    Ok(s.writer.written)
}

fn aak_json(a: &AakApproximant) -> Value {
    json!({
        "n": a.n,
        "N": a.n_trunc,
        "sigma": a.sigma.to_decimal(),
        "gap": a.gap,
        "singular_vector": cplx_list(a.v.coeffs()),
        "poles": cplx_list(&a.poles),
        "indeterminate": cplx_list(&a.indeterminate),
        "irreducible": a.irreducible,
        "min_cancellation": a.min_cancellation,
        "warnings": a.warnings,
    })
}

pub fn aak(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut s = setup(cfg)?;
    let n = cfg.n()?;
    let svd = hankel_svd(&s.f, n, cfg.n_trunc, &s.ctx)?;
    let a = svd.approximant(n, &s.ctx)?;
    let stem = format!("aak_n{n}");
    if s.wants(Format::Csv) {
        let header = vec![format!("AAK poles of {}, n = {n}, N = {}, {} bits", s.label, a.n_trunc, s.ctx.bits()), "k,re,im".into()];
        s.writer.csv(&format!("{stem}_poles.csv"), &header, &pole_rows(&a.poles, |_| None))?;
    }
    if s.wants(Format::Json) {
        let sigma: Vec<String> = svd.sigma().iter().take(n + 2).map(|x| x.to_decimal()).collect();
        let tail = serde_json::to_value(svd.truncation().tail()).expect("tail serializes");
        let body = merge(merge(s.header("aak"), aak_json(&a)), json!({"singular_values": sigma, "tail": tail}));
        s.writer.json(&format!("{stem}.json"), body)?;
    }
    if s.wants(Format::Svg) {
        let (c, d) = s.interval();
        s.writer.svg(&format!("{stem}.svg"), &pole_plot(c, d, &points(&a.poles), &format!("AAK poles, n = {n}")))?;
    }
    Ok(s.writer.written)
}

/// Per-degree data of a sweep.
struct Step {
    n: usize,
    observed: f64,
    predicted: f64,
    poles: Vec<Cplx>,
    rings: Vec<PoleRingPrediction>,
}

pub fn sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut s = setup(cfg)?;
    let ns = cfg.n_range()?;
    let method = cfg.method.unwrap_or(Method::Aak);
    let (steps, theoretical, rate_of) = match method {
        Method::Aak => sweep_aak(&s, &ns, cfg.n_trunc)?,
        Method::Pade => sweep_pade(&s, &ns, cfg.z.unwrap_or([2.0, 0.0]))?,
    };
    let name = match method {
        Method::Aak => "aak",
        Method::Pade => "pade",
    };

    let fit_ns: Vec<usize> = steps.iter().filter(|st| st.observed > 0.0).map(|st| st.n).collect();
    let fit_vals: Vec<f64> = steps.iter().filter(|st| st.observed > 0.0).map(|st| st.observed).collect();
    let fit = fit_rate(&fit_ns, &fit_vals, theoretical)?;

    let (c, d) = s.interval();
    let mut matches: Vec<(usize, Vec<RingMatch>)> = Vec::new();
    for st in &steps {
        let poles: Vec<_> = st.poles.iter().map(|p| p.to_c64()).collect();
        matches.push((st.n, match_pole_rings(&poles, &st.rings, c, d)));
    }
    let mut ring_fits = Vec::new();
    if let Some(first) = steps.first() {
        for (i, ring) in first.rings.iter().enumerate() {
            let full: Vec<(usize, f64)> = matches
                .iter()
                .filter(|(_, m)| m[i].count == ring.multiplicity)
                .map(|(n, m)| (*n, m[i].mean_radius))
                .collect();
            let fit = if full.len() >= 2 {
                let (rn, rr): (Vec<usize>, Vec<f64>) = full.into_iter().unzip();
                serde_json::to_value(ring_sweep(&rn, &rr, ring.shrink)?).expect("sweep serializes")
            } else {
                Value::Null
            };
            ring_fits.push(json!({"eta": [ring.eta.re, ring.eta.im], "multiplicity": ring.multiplicity, "shrink": fit}));
        }
    }

    let stem = format!("sweep_{name}");
    if s.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = steps
            .iter()
            .map(|st| vec![st.n.to_string(), format!("{:e}", st.observed), format!("{:e}", st.predicted), format!("{}", st.observed / st.predicted)])
            .collect();
        let header = vec![
            format!("{name} sweep of {}, {rate_of}, {} bits", s.label, s.ctx.bits()),
            format!("fitted slope {} vs theoretical {} (relative deviation {})", fit.slope, fit.theoretical, fit.deviation),
            "n,observed,predicted,ratio".into(),
        ];
        s.writer.csv(&format!("{stem}.csv"), &header, &rows)?;
        let mut ring_rows = Vec::new();
        for (n, ms) in &matches {
            for m in ms {
                ring_rows.push(vec![
                    n.to_string(),
                    m.eta.re.to_string(),
                    m.eta.im.to_string(),
                    m.count.to_string(),
                    format!("{:e}", m.mean_radius),
                    m.max_gap_error_deg.to_string(),
                    m.implied_a.to_string(),
                ]);
            }
        }
        let header = vec![format!("{name} pole rings of {}", s.label), "n,eta_re,eta_im,count,mean_radius,max_gap_error_deg,implied_a".into()];
        s.writer.csv(&format!("{stem}_rings.csv"), &header, &ring_rows)?;
        let mut pole_table = Vec::new();
        for st in &steps {
            for row in pole_rows(&st.poles, |_| None) {
                let mut r = vec![st.n.to_string()];
                r.extend(row);
                pole_table.push(r);
            }
        }
        let header = vec![format!("{name} poles of {}", s.label), "n,k,re,im".into()];
        s.writer.csv(&format!("{stem}_poles.csv"), &header, &pole_table)?;
    }
    if s.wants(Format::Json) {
        let per_n: Vec<Value> = steps
            .iter()
            .zip(&matches)
            .map(|(st, (_, m))| {
                json!({
                    "n": st.n,
                    "observed": st.observed,
                    "predicted": st.predicted,
                    "poles": cplx_list(&st.poles),
                    "rings": serde_json::to_value(m).expect("rings serialize"),
                })
            })
            .collect();
        let body = merge(
            s.header("sweep"),
            json!({
                "method": name,
                "quantity": rate_of,
                "rate": serde_json::to_value(&fit).expect("fit serializes"),
                "ring_shrink": ring_fits,
                "steps": per_n,
            }),
        );
        s.writer.json(&format!("{stem}.json"), body)?;
    }
    if s.wants(Format::Svg) {
        if let Some(last) = steps.last() {
            let title = format!("{name} poles, n = {}", last.n);
            s.writer.svg(&format!("{stem}.svg"), &pole_plot(c, d, &points(&last.poles), &title))?;
        }
    }
    Ok(s.writer.written)
}

type SweepData = (Vec<Step>, f64, &'static str);

fn sweep_aak(s: &Setup, ns: &[usize], n_trunc: Option<usize>) -> Result<SweepData> {
    let top = *ns.last().expect("nonempty range");
    let geom = geometry(&s.f, &s.ctx)?;
    let rho = geom.rho()?.to_f64();
    let svd = hankel_svd(&s.f, top, n_trunc, &s.ctx)?;
    let m = s.f.m();
    let mut steps = Vec::new();
    for &n in ns {
        let a = svd.approximant(n, &s.ctx)?;
        let (predicted, rings) = if n >= m {
            let p = predict_ma(&s.f, &geom, n, &[])?;
            (p.sigma, p.rings)
        } else {
            (f64::NAN, Vec::new())
        };
        steps.push(Step { n, observed: a.sigma.to_f64(), predicted, poles: a.poles, rings });
    }
    Ok((steps, 2.0 * rho.ln(), "sigma_n"))
}

fn sweep_pade(s: &Setup, ns: &[usize], z: [f64; 2]) -> Result<SweepData> {
    let prec = s.ctx.bits();
    let zc = Cplx::from_f64(z[0], z[1], prec);
    s.f.check_domain(&zc)?;
    let fz = s.f.eval(&zc, &s.ctx)?;
    let (c, d) = s.f.interval().ok_or_else(|| Error::InvalidInput("a Pade sweep needs a measure part".into()))?;
    let rate = 2.0 * psi(&c, &d, &zc, Side::Off)?.abs().to_f64().ln();
    let scheme = InterpolationScheme::classical();
    let steps = ns
        .par_iter()
        .map(|&n| {
            let a = classical_pade(&s.f, n, &s.ctx)?;
            let p = predict_pade(&s.f, n, &scheme, std::slice::from_ref(&zc), &s.ctx)?;
            let observed = (&fz - a.eval(&zc)).abs().to_f64();
            Ok(Step { n, observed, predicted: p.error[0].norm(), poles: a.poles, rings: p.rings })
        })
        .collect::<Result<Vec<_>>>()?;
    let label = if z == [2.0, 0.0] { "|error| at z = 2" } else { "|error| at z" };
    Ok((steps, rate, label))
}
