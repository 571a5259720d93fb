//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use cauchy_approx::aak::hankel_svd;
use cauchy_approx::kernel::context::PrecisionContext;
use cauchy_approx::kernel::scalar::Cplx;
use cauchy_approx::model::{preset, CauchyFunction};
use cauchy_approx::pade::classical_pade;
use num_complex::Complex64;

pub const RING_NS: std::ops::RangeInclusive<usize> = 21..=33;

pub fn build(name: &str, ctx: &PrecisionContext) -> CauchyFunction {
    preset(name).unwrap().build(ctx).unwrap()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

pub type PoleSweep = BTreeMap<usize, Vec<Cplx>>;

pub fn sextic_pade_poles(ns: impl IntoIterator<Item = usize>, ctx: &PrecisionContext) -> PoleSweep {
    let f = build("piecewise-sextic", ctx);
    ns.into_iter().map(|n| (n, classical_pade(&f, n, ctx).unwrap().poles)).collect()
}

pub fn sextic_aak_poles(ns: impl IntoIterator<Item = usize>, ctx: &PrecisionContext) -> PoleSweep {
    let f = build("piecewise-sextic", ctx);
    let ns: Vec<usize> = ns.into_iter().collect();
    let top = *ns.iter().max().unwrap();
    let svd = hankel_svd(&f, top, None, ctx).unwrap();
    ns.into_iter().map(|n| (n, svd.approximant(n, ctx).unwrap().poles)).collect()
}

pub fn write_poles(path: &PathBuf, sweep: &PoleSweep, header: &str) {
    let mut out = format!("# {header}\n# n,k,re,im\n");
    for (n, poles) in sweep {
        for (k, p) in poles.iter().enumerate() {
            out.push_str(&format!("{n},{k},{},{}\n", p.re().to_decimal_digits(40), p.im().to_decimal_digits(40)));
        }
    }
    std::fs::write(path, out).unwrap();
}

pub fn read_poles(path: &PathBuf) -> BTreeMap<usize, Vec<Complex64>> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut out: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        let n: usize = f[0].parse().unwrap();
        out.entry(n).or_default().push(Complex64::new(f[2].parse().unwrap(), f[3].parse().unwrap()));
    }
    out
}
