//! Interpolation schemes and their admissibility report.

use crate::conformal::maps::{psi, Side};
use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::poly::Poly;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::function::CauchyFunction;
use num_complex::Complex64;
use serde::Serialize;

/// A point of `E_n`; `None` is the point at infinity.
pub type Node = Option<Cplx>;

#[derive(Debug, Clone)]
pub enum SchemeKind {
    /// All `2n` points at infinity.
    Classical,
    /// `count` points (all `2n` when `None`) equally spaced on `|z| = radius`,
    /// at angles `pi (2j + 1) / count`; the rest at infinity.
    ConjugateCircle { radius: f64, count: Option<usize> },
    /// `levels[n - 1]` lists the `2n` points of `E_n`.
    Explicit(Vec<Vec<Node>>),
}

#[derive(Debug, Clone)]
pub struct InterpolationScheme {
    kind: SchemeKind,
}

impl InterpolationScheme {
    pub fn classical() -> Self {
        InterpolationScheme { kind: SchemeKind::Classical }
    }

    pub fn conjugate_circle(radius: f64, count: Option<usize>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput("circle radius must be positive".into()));
        }
        Ok(InterpolationScheme { kind: SchemeKind::ConjugateCircle { radius, count } })
    }

    pub fn explicit(levels: Vec<Vec<Node>>) -> Result<Self> {
        for (i, l) in levels.iter().enumerate() {
            if l.len() != 2 * (i + 1) {
                return Err(Error::InvalidInput(format!("level {} needs {} points, got {}", i + 1, 2 * (i + 1), l.len())));
            }
        }
        Ok(InterpolationScheme { kind: SchemeKind::Explicit(levels) })
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn is_classical(&self) -> bool {
        matches!(self.kind, SchemeKind::Classical)
    }

    /// The `2n` points of `E_n`.
    pub fn points(&self, n: usize, prec: u32) -> Result<Vec<Node>> {
        match &self.kind {
            SchemeKind::Classical => Ok(vec![None; 2 * n]),
            SchemeKind::ConjugateCircle { radius, count } => {
                let f = count.unwrap_or(2 * n).min(2 * n);
                let f = f - f % 2;
                let r = Real::from_f64(*radius, prec);
                let pi = Real::pi(prec);
                let mut out: Vec<Node> = (0..f)
                    .map(|j| Some(Cplx::polar(&r, &(&pi * ((2 * j + 1) as f64 / f as f64)))))
                    .collect();
                out.resize(2 * n, None);
                Ok(out)
            }
            SchemeKind::Explicit(levels) => {
                if n == 0 {
                    return Ok(Vec::new());
                }
                levels
                    .get(n - 1)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("explicit scheme has no level {n}")))
            }
        }
    }

    pub fn finite_points(&self, n: usize, prec: u32) -> Result<Vec<Cplx>> {
        Ok(self.points(n, prec)?.into_iter().flatten().collect())
    }

    /// Monic `v_n` vanishing at the finite points of `E_n`.
    pub fn v(&self, n: usize, prec: u32) -> Result<Poly> {
        Ok(Poly::from_roots(&self.finite_points(n, prec)?, prec))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub n: usize,
    /// `min over rearrangements of sum |psi(conj e) - psi(Delta(e))|`, as
    /// found by greedy matching with 2-swap improvement.
    pub matching_sum: f64,
    /// Distance of the finite points to `[c, d]` and the poles.
    pub separation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub levels: Vec<LevelReport>,
    pub growth_flagged: bool,
    pub min_separation: f64,
    /// Conditions the report cannot decide from finite data.
    pub note: String,
}

/// Matching sums and separations for `n = 1..=n_max`.
pub fn admissibility_report(
    scheme: &InterpolationScheme,
    n_max: usize,
    f: &CauchyFunction,
    ctx: &PrecisionContext,
) -> Result<AdmissibilityReport> {
    let (c, d) = f
        .interval()
        .ok_or_else(|| Error::InvalidInput("admissibility needs a measure part".into()))?;
    let mut levels = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let pts = scheme.finite_points(n, ctx.bits())?;
        let mut a = Vec::with_capacity(pts.len());
        let mut b = Vec::with_capacity(pts.len());
        let mut separation = f64::INFINITY;
        for e in &pts {
            separation = separation.min(distance_to_singularities(f, &c, &d, e));
            a.push(psi(&c, &d, &e.conj(), Side::Off)?.to_c64());
            b.push(psi(&c, &d, e, Side::Off)?.to_c64());
        }
        levels.push(LevelReport { n, matching_sum: min_matching(&a, &b), separation });
    }
    let growth_flagged = grows(&levels.iter().map(|l| l.matching_sum).collect::<Vec<_>>());
    let min_separation = levels.iter().map(|l| l.separation).fold(f64::INFINITY, f64::min);
    Ok(AdmissibilityReport {
        levels,
        growth_flagged,
        min_separation,
        note: "only separation and boundedness of matching sums are checked; weak-* convergence to a measure of finite Green energy is not decidable from finitely many levels".into(),
    })
}

fn distance_to_singularities(f: &CauchyFunction, c: &Real, d: &Real, e: &Cplx) -> f64 {
    let x = e.re();
    let dx = if x < *c {
        (c - &x).to_f64()
    } else if x > *d {
        (&x - d).to_f64()
    } else {
        0.0
    };
    let mut s = dx.hypot(e.im().to_f64());
    if let Some(r) = f.rational() {
        s = s.min(r.pole_distance(e).to_f64());
    }
    s
}

/// Greedy nearest-neighbour assignment followed by 2-swap descent.
pub fn min_matching(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len();
    let mut used = vec![false; n];
    let mut perm = vec![0usize; n];
    for (i, ai) in a.iter().enumerate() {
        let mut best = usize::MAX;
        let mut bd = f64::INFINITY;
        for (j, bj) in b.iter().enumerate() {
            if !used[j] && (ai - bj).norm() < bd {
                bd = (ai - bj).norm();
                best = j;
            }
        }
        used[best] = true;
        perm[i] = best;
    }
    let cost = |i: usize, j: usize| (a[i] - b[j]).norm();
    for _ in 0..100 {
        let mut improved = false;
        for i in 0..n {
            for j in i + 1..n {
                let now = cost(i, perm[i]) + cost(j, perm[j]);
                let swapped = cost(i, perm[j]) + cost(j, perm[i]);
                if swapped < now - 1e-15 * now.max(1.0) {
                    perm.swap(i, j);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    (0..n).map(|i| cost(i, perm[i])).sum()
}

/// Growth heuristic: the mean over the last quarter of the range exceeds the
/// mean over the second quarter by half.
fn grows(sums: &[f64]) -> bool {
    let n = sums.len();
    if n < 4 {
        return false;
    }
    let q = n / 4;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let early = mean(&sums[q..2 * q]);
    let late = mean(&sums[n - q..]);
    late > 1e-10 && late > 1.5 * early
}
