//! Quadrature against the arcsine distribution in the angle variable
//! `t = c + (d - c)(1 - cos theta)/2`, where `d omega = d theta / pi`.
//!
//! Panels are split at break points and graded geometrically toward points
//! where the integrand has a logarithmic singularity.

use std::sync::Arc;

use crate::error::Result;
use crate::kernel::context::PrecisionContext;
use crate::kernel::quadrature::{legendre_quadrature, GaussRule};
use crate::kernel::scalar::Real;

/// Grading ratio of the geometric panels.
const SIGMA: f64 = 0.25;
/// Longest smooth panel in `theta`.
const MAX_PANEL: f64 = 0.25;

/// A point of `[c, d]` where panels must end.
#[derive(Debug, Clone)]
pub struct Break {
    pub t: Real,
    /// logarithmic singularity (grade toward it) rather than a plain jump
    pub singular: bool,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub a: Real,
    pub b: Real,
}

/// Nodes `t_i` with weights `w_i`, `int f d omega ~ sum w_i f(t_i)`.
#[derive(Debug, Clone)]
pub struct ThetaQuad {
    pub c: Real,
    pub d: Real,
    pub panels: Vec<Panel>,
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
    rule: Arc<GaussRule>,
}

/// Gauss-Legendre points per panel for a given precision.
pub fn panel_order(bits: u32) -> usize {
    ((bits as usize) / 6).clamp(16, 96)
}

pub fn theta_of(c: &Real, d: &Real, t: &Real) -> Real {
    // 1 - cos theta = 2 (t - c)/(d - c)
    (Real::one(t.prec()) - (t - c) * 2.0 / (d - c)).acos()
}

pub fn t_of(c: &Real, d: &Real, theta: &Real) -> Real {
    c + (d - c) * (Real::one(theta.prec()) - theta.cos()) / 2.0
}

impl ThetaQuad {
    /// `endpoint_singular` flags logarithmic behaviour at `c` and `d`.
    pub fn new(c: &Real, d: &Real, breaks: &[Break], endpoint_singular: (bool, bool), ctx: &PrecisionContext) -> Result<Self> {
        let prec = ctx.bits();
        let pi = Real::pi(prec);
        let mut cuts: Vec<(Real, bool)> = vec![(Real::zero(prec), endpoint_singular.0), (pi.clone(), endpoint_singular.1)];
        for b in breaks {
            if b.t > *c && b.t < *d {
                let th = theta_of(c, d, &b.t);
                match cuts.iter_mut().find(|(x, _)| *x == th) {
                    Some(e) => e.1 |= b.singular,
                    None => cuts.push((th, b.singular)),
                }
            }
        }
        cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        let levels = grading_levels(ctx);
        let mut panels = Vec::new();
        for win in cuts.windows(2) {
            let (a, sa) = (&win[0].0, win[0].1);
            let (b, sb) = (&win[1].0, win[1].1);
            graded_panels(a, b, sa, sb, levels, &mut panels);
        }
        let rule = Arc::new(legendre_quadrature(&Real::from_f64(-1.0, prec), &Real::one(prec), panel_order(prec), ctx)?);
        let mut q = ThetaQuad { c: c.clone(), d: d.clone(), panels: Vec::new(), nodes: Vec::new(), weights: Vec::new(), rule };
        for p in panels {
            q.push_panel(p);
        }
        Ok(q)
    }

    fn push_panel(&mut self, p: Panel) {
        let inv_pi = Real::pi(p.a.prec()).recip();
        for (x, w) in self.map_panel(&p) {
            self.nodes.push(x);
            self.weights.push(w * &inv_pi);
        }
        self.panels.push(p);
    }

    /// Nodes `t` and `theta`-weights of the Gauss rule on one panel.
    fn map_panel(&self, p: &Panel) -> Vec<(Real, Real)> {
        let mid = (&p.a + &p.b) / 2.0;
        let half = (&p.b - &p.a) / 2.0;
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(x, w)| (t_of(&self.c, &self.d, &(&mid + &(x * &half))), w * &half))
            .collect()
    }

    /// Nodes for an integrand that also has a pole at distance `dist` from
    /// the real point `x`: panels whose `t`-range comes within a panel length
    /// of `x` are bisected.
    pub fn refined_near(&self, x: &Real, dist: &Real) -> (Vec<Real>, Vec<Real>) {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let inv_pi = Real::pi(x.prec()).recip();
        for p in &self.panels {
            self.refine(p, x, dist, &inv_pi, 0, &mut nodes, &mut weights);
        }
        (nodes, weights)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&self, p: &Panel, x: &Real, dist: &Real, inv_pi: &Real, depth: usize, nodes: &mut Vec<Real>, weights: &mut Vec<Real>) {
        let ta = t_of(&self.c, &self.d, &p.a);
        let tb = t_of(&self.c, &self.d, &p.b);
        let len = (&tb - &ta).abs();
        let gap = if *x < ta {
            &ta - x
        } else if *x > tb {
            x - &tb
        } else {
            Real::zero(x.prec())
        };
        let sep = (gap.square() + dist.square()).sqrt();
        if sep >= len || depth >= 80 {
            for (t, w) in self.map_panel(p) {
                nodes.push(t);
                weights.push(w * inv_pi);
            }
            return;
        }
        let mid = (&p.a + &p.b) / 2.0;
        self.refine(&Panel { a: p.a.clone(), b: mid.clone() }, x, dist, inv_pi, depth + 1, nodes, weights);
        self.refine(&Panel { a: mid, b: p.b.clone() }, x, dist, inv_pi, depth + 1, nodes, weights);
    }
}

fn grading_levels(ctx: &PrecisionContext) -> usize {
    // innermost panel width near the tolerance, but wide enough that the
    // offset t - c ~ theta^2 stays representable next to c
    let target = ctx.tol().max(16_777_216.0 * ctx.eps().sqrt()).max(1e-60);
    (target.ln() / SIGMA.ln()).ceil() as usize
}

fn graded_panels(a: &Real, b: &Real, sa: bool, sb: bool, levels: usize, out: &mut Vec<Panel>) {
    let len = b - a;
    if sa && sb {
        let mid = (a + b) / 2.0;
        graded_panels(a, &mid, true, false, levels, out);
        graded_panels(&mid, b, false, true, levels, out);
        return;
    }
    if !sa && !sb {
        let k = (len.to_f64() / MAX_PANEL).ceil().max(1.0) as usize;
        for j in 0..k {
            out.push(Panel { a: a + &(&len * (j as f64 / k as f64)), b: a + &(&len * ((j + 1) as f64 / k as f64)) });
        }
        return;
    }
    // geometric panels toward the singular end, then the smooth remainder
    let mut edges: Vec<Real> = Vec::with_capacity(levels + 2);
    let mut s = Real::one(a.prec());
    edges.push(Real::zero(a.prec()));
    let mut fracs = Vec::new();
    for _ in 0..levels {
        s *= SIGMA;
        fracs.push(s.clone());
    }
    fracs.reverse();
    edges.extend(fracs);
    edges.push(Real::one(a.prec()));
    let place = |f: &Real| if sa { a + &(&len * f) } else { b - &(&len * f) };
    let mut pts: Vec<Real> = edges.iter().map(place).collect();
    if !sa {
        pts.reverse();
    }
    // split the outermost (largest) panel further if it is long
    for win in pts.windows(2) {
        let width = (&win[1] - &win[0]).to_f64();
        let k = (width / MAX_PANEL).ceil().max(1.0) as usize;
        for j in 0..k {
            let w = &win[1] - &win[0];
            out.push(Panel { a: &win[0] + &(&w * (j as f64 / k as f64)), b: &win[0] + &(&w * ((j + 1) as f64 / k as f64)) });
        }
    }
}
