//! Complex measures `dmu = h * hbar * hbar_x d omega` on an interval and their
//! discretisation into quadrature nodes.
//!
//! The interval is split at piece boundaries and at interior zeros. On each
//! resulting sub-piece the algebraic factor at an end point that is a true
//! singularity (`c`, `d` or an interior zero) is absorbed into a Gauss-Jacobi
//! weight; everything else is smooth on the sub-piece and is evaluated at the
//! nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::quadrature::jacobi_quadrature;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::expr::{CompiledExpr, Expr};

/// Smooth factor on one subinterval.
#[derive(Debug, Clone)]
pub struct Piece {
    pub from: Real,
    pub to: Real,
    pub h: Expr,
}

#[derive(Debug, Clone)]
pub struct InteriorZero {
    pub x: Real,
    pub alpha: f64,
}

/// An algebraic singularity `|t - at|^exponent` of the density against `dt`.
#[derive(Debug, Clone)]
struct Singular {
    at: Real,
    exponent: f64,
}

#[derive(Debug, Clone)]
struct SubPiece {
    a: Real,
    b: Real,
    /// index into `singulars` absorbed at `a` / `b`
    left: Option<usize>,
    right: Option<usize>,
    piece: usize,
}

/// Nodes and complex weights with `int f dmu ~ sum w_i f(t_i)`.
#[derive(Debug, Clone, Default)]
pub struct NodeSet {
    pub nodes: Vec<Real>,
    pub weights: Vec<Cplx>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&Real) -> Cplx>(&self, prec: u32, mut f: F) -> Cplx {
        let mut acc = Cplx::zero(prec);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += &(f(t) * w);
        }
        acc
    }

    /// `sum |w_i| |f(t_i)|`, the scale against which cancellation is judged.
    pub fn integrate_abs<F: FnMut(&Real) -> Real>(&self, prec: u32, mut f: F) -> Real {
        let mut acc = Real::zero(prec);
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(t) * w.abs();
        }
        acc
    }

    fn extend(&mut self, other: &NodeSet) {
        self.nodes.extend(other.nodes.iter().cloned());
        self.weights.extend(other.weights.iter().cloned());
    }
}

type SegKey = (u32, usize, u64, u64, usize);

#[derive(Debug, Default)]
struct Cache {
    smooth: Mutex<HashMap<u32, Vec<usize>>>,
    full: Mutex<HashMap<(u32, usize), Arc<NodeSet>>>,
    segments: Mutex<HashMap<SegKey, Arc<NodeSet>>>,
    compiled: Mutex<HashMap<u32, Arc<Vec<CompiledExpr>>>>,
}

/// Quadrature sizes tried when resolving a smooth integrand.
const LADDER: [usize; 16] = [8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768, 1024, 1536];
/// Largest rule used on a single segment before bisecting.
const MAX_SEGMENT_NODES: usize = 192;

#[derive(Debug, Clone)]
pub struct MeasureSpec {
    c: Real,
    d: Real,
    pieces: Vec<Piece>,
    alpha_c: f64,
    alpha_d: f64,
    zeros: Vec<InteriorZero>,
    singulars: Vec<Singular>,
    subs: Vec<SubPiece>,
    cache: Arc<Cache>,
}

impl MeasureSpec {
    pub fn new(
        c: Real,
        d: Real,
        pieces: Vec<Piece>,
        endpoint_exponents: (f64, f64),
        mut zeros: Vec<InteriorZero>,
    ) -> Result<Self> {
        if !(c < d) {
            return Err(Error::InvalidInput("measure interval must satisfy c < d".into()));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidInput("measure needs at least one piece".into()));
        }
        if pieces[0].from != c || pieces[pieces.len() - 1].to != d {
            return Err(Error::InvalidInput("pieces must start at c and end at d".into()));
        }
        for p in &pieces {
            if !(p.from < p.to) {
                return Err(Error::InvalidInput("each piece must have from < to".into()));
            }
        }
        for w in pieces.windows(2) {
            if w[0].to != w[1].from {
                return Err(Error::InvalidInput("pieces must be contiguous".into()));
            }
        }
        let (alpha_c, alpha_d) = endpoint_exponents;
        for a in [alpha_c, alpha_d] {
            if !(0.0..0.5).contains(&a) {
                return Err(Error::InvalidInput(format!("endpoint exponent {a} outside [0, 1/2)")));
            }
        }
        zeros.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite"));
        for z in &zeros {
            if !(z.x > c && z.x < d) {
                return Err(Error::InvalidInput("interior zeros must lie strictly inside (c, d)".into()));
            }
            if !(z.alpha > 0.0 && z.alpha < 0.5) {
                return Err(Error::InvalidInput(format!("interior exponent {} outside (0, 1/2)", z.alpha)));
            }
        }
        for w in zeros.windows(2) {
            if w[0].x == w[1].x {
                return Err(Error::InvalidInput("interior zeros must be distinct".into()));
            }
        }
        let mut singulars = vec![
            Singular { at: c.clone(), exponent: alpha_c - 0.5 },
            Singular { at: d.clone(), exponent: alpha_d - 0.5 },
        ];
        singulars.extend(zeros.iter().map(|z| Singular { at: z.x.clone(), exponent: 2.0 * z.alpha }));
        let subs = split(&c, &d, &pieces, &zeros);
        Ok(MeasureSpec {
            c,
            d,
            pieces,
            alpha_c,
            alpha_d,
            zeros,
            singulars,
            subs,
            cache: Arc::new(Cache::default()),
        })
    }

    /// Arcsine distribution on `[c, d]` (`h = 1`, no zeros).
    pub fn arcsine(c: Real, d: Real) -> Result<Self> {
        let p = Piece { from: c.clone(), to: d.clone(), h: Expr::parse("1")? };
        MeasureSpec::new(c, d, vec![p], (0.0, 0.0), Vec::new())
    }

    pub fn c(&self) -> &Real {
        &self.c
    }

    pub fn d(&self) -> &Real {
        &self.d
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn endpoint_exponents(&self) -> (f64, f64) {
        (self.alpha_c, self.alpha_d)
    }

    pub fn interior_zeros(&self) -> &[InteriorZero] {
        &self.zeros
    }

    /// Same measure multiplied by the constant expression `factor`.
    pub fn scaled(&self, factor: &str) -> Result<Self> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok(Piece { from: p.from.clone(), to: p.to.clone(), h: p.h.scaled(factor)? }))
            .collect::<Result<Vec<_>>>()?;
        MeasureSpec::new(self.c.clone(), self.d.clone(), pieces, (self.alpha_c, self.alpha_d), self.zeros.clone())
    }

    /// Index of the piece containing `t` (the right-most one at a break).
    pub fn piece_index(&self, t: &Real) -> usize {
        self.pieces.iter().rposition(|p| p.from <= *t).unwrap_or(0)
    }

    /// Smooth factor `h(t)`.
    pub fn h(&self, t: &Real) -> Cplx {
        self.pieces[self.piece_index(t)].h.eval_real(t)
    }

    /// Product of interior-zero factors `hbar_x(t)`.
    pub fn hbar_x(&self, t: &Real) -> Real {
        let mut acc = Real::one(t.prec());
        for z in &self.zeros {
            acc *= (t - &z.x).abs().powf(&Real::from_f64(2.0 * z.alpha, t.prec()));
        }
        acc
    }

    /// Endpoint factor `hbar(t)`.
    pub fn hbar(&self, t: &Real) -> Real {
        let prec = t.prec();
        let mut acc = Real::one(prec);
        if self.alpha_c != 0.0 {
            acc *= (t - &self.c).abs().powf(&Real::from_f64(self.alpha_c, prec));
        }
        if self.alpha_d != 0.0 {
            acc *= (t - &self.d).abs().powf(&Real::from_f64(self.alpha_d, prec));
        }
        acc
    }

    /// Density of `mu` against the arcsine distribution.
    pub fn density(&self, t: &Real) -> Cplx {
        self.h(t) * (self.hbar(t) * self.hbar_x(t))
    }

    fn compiled(&self, prec: u32) -> Arc<Vec<CompiledExpr>> {
        let mut map = self.cache.compiled.lock().expect("cache poisoned");
        map.entry(prec)
            .or_insert_with(|| Arc::new(self.pieces.iter().map(|p| p.h.compile(prec)).collect()))
            .clone()
    }

    /// Nodes for a segment `[a, b]` of sub-piece `s` with `n` points.
    fn segment_rule(&self, s: usize, a: &Real, b: &Real, n: usize, ctx: &PrecisionContext) -> Result<Arc<NodeSet>> {
        let key = (ctx.bits(), s, a.to_f64().to_bits(), b.to_f64().to_bits(), n);
        if let Some(r) = self.cache.segments.lock().expect("cache poisoned").get(&key) {
            return Ok(r.clone());
        }
        let sub = &self.subs[s];
        let left = if *a == sub.a { sub.left } else { None };
        let right = if *b == sub.b { sub.right } else { None };
        let ea = left.map(|i| self.singulars[i].exponent).unwrap_or(0.0);
        let eb = right.map(|i| self.singulars[i].exponent).unwrap_or(0.0);
        let rule = jacobi_quadrature(a, b, ea, eb, n, ctx)?;
        let prec = ctx.bits();
        let hs = self.compiled(prec);
        let h = &hs[sub.piece];
        let inv_pi = Real::pi(prec).recip();
        let exps: Vec<Real> = self.singulars.iter().map(|sg| Real::from_f64(sg.exponent, prec)).collect();
        let mut out = NodeSet::default();
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let mut r = w * &inv_pi;
            for (i, sg) in self.singulars.iter().enumerate() {
                if Some(i) == left || Some(i) == right || sg.exponent == 0.0 {
                    continue;
                }
                r *= (t - &sg.at).abs().powf(&exps[i]);
            }
            out.weights.push(h.eval_real(t) * &r);
            out.nodes.push(t.clone());
        }
        let out = Arc::new(out);
        self.cache.segments.lock().expect("cache poisoned").insert(key, out.clone());
        Ok(out)
    }

    /// Per sub-piece rule size that resolves the smooth part of the density.
    fn smooth_sizes(&self, ctx: &PrecisionContext) -> Result<Vec<usize>> {
        if let Some(v) = self.cache.smooth.lock().expect("cache poisoned").get(&ctx.bits()) {
            return Ok(v.clone());
        }
        let prec = ctx.bits();
        let tol = ctx.eps() * 256.0;
        let mut sizes = Vec::with_capacity(self.subs.len());
        for (s, sub) in self.subs.iter().enumerate() {
            let mid = (&sub.a + &sub.b) / 2.0;
            let half = (&sub.b - &sub.a) / 2.0;
            let probe = |ns: &NodeSet| -> (Vec<Cplx>, Real) {
                let v = (0..4)
                    .map(|k| ns.integrate(prec, |t| Cplx::from_real(&((t - &mid) / &half).powi(k))))
                    .collect();
                (v, ns.integrate_abs(prec, |_| Real::one(prec)))
            };
            let mut chosen = None;
            let mut prev = probe(&*self.segment_rule(s, &sub.a, &sub.b, LADDER[0], ctx)?);
            let mut achieved = f64::INFINITY;
            for &n in &LADDER[1..] {
                let cur = probe(&*self.segment_rule(s, &sub.a, &sub.b, n, ctx)?);
                let diff = prev.0.iter().zip(&cur.0).map(|(x, y)| (x - y).abs().to_f64()).fold(0.0, f64::max);
                let scale = cur.1.to_f64().max(f64::MIN_POSITIVE);
                achieved = diff / scale;
                if achieved <= tol {
                    chosen = Some(n);
                    break;
                }
                prev = cur;
            }
            match chosen {
                Some(n) => sizes.push(n),
                None => return Err(Error::Accuracy { what: "measure discretisation".into(), achieved }),
            }
        }
        self.cache.smooth.lock().expect("cache poisoned").insert(ctx.bits(), sizes.clone());
        Ok(sizes)
    }

    /// Nodes exact for `t^k`, `k < 2 * extra`, times the smooth density.
    pub fn nodes(&self, extra: usize, ctx: &PrecisionContext) -> Result<Arc<NodeSet>> {
        let extra = round_up(extra);
        if let Some(r) = self.cache.full.lock().expect("cache poisoned").get(&(ctx.bits(), extra)) {
            return Ok(r.clone());
        }
        let sizes = self.smooth_sizes(ctx)?;
        let mut out = NodeSet::default();
        for (s, sub) in self.subs.iter().enumerate() {
            out.extend(&*self.segment_rule(s, &sub.a, &sub.b, sizes[s] + extra, ctx)?);
        }
        let out = Arc::new(out);
        self.cache.full.lock().expect("cache poisoned").insert((ctx.bits(), extra), out.clone());
        Ok(out)
    }

    /// Nodes for integrands with poles at `points` (off the interval) of
    /// order up to `order`, plus polynomial degree below `2 * extra`. Segments
    /// are bisected until each is resolved by a moderate Gauss rule.
    pub fn nodes_near(&self, points: &[Cplx], order: usize, extra: usize, ctx: &PrecisionContext) -> Result<NodeSet> {
        let sizes = self.smooth_sizes(ctx)?;
        let mut out = NodeSet::default();
        for (s, sub) in self.subs.iter().enumerate() {
            self.refine(s, &sub.a, &sub.b, points, sizes[s] + extra + order, ctx, &mut out, 0)?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        s: usize,
        a: &Real,
        b: &Real,
        points: &[Cplx],
        base: usize,
        ctx: &PrecisionContext,
        out: &mut NodeSet,
        depth: usize,
    ) -> Result<()> {
        let need = base + points.iter().map(|z| pole_nodes(z, a, b, ctx.bits())).max().unwrap_or(0);
        if need <= MAX_SEGMENT_NODES.max(base) || depth >= 60 {
            if depth >= 60 {
                return Err(Error::Domain("evaluation point too close to the support".into()));
            }
            out.extend(&*self.segment_rule(s, a, b, round_up(need), ctx)?);
            return Ok(());
        }
        let mid = (a + b) / 2.0;
        self.refine(s, a, &mid, points, base, ctx, out, depth + 1)?;
        self.refine(s, &mid, b, points, base, ctx, out, depth + 1)
    }

    /// `int f dmu` resolved by comparing two rule sizes.
    pub fn integrate<F: Fn(&Real) -> Cplx>(&self, f: F, extra: usize, ctx: &PrecisionContext) -> Result<Cplx> {
        let prec = ctx.bits();
        let lo = self.nodes(extra, ctx)?.integrate(prec, &f);
        let hi_nodes = self.nodes(extra + extra / 4 + 8, ctx)?;
        let hi = hi_nodes.integrate(prec, &f);
        let scale = hi_nodes.integrate_abs(prec, |t| f(t).abs());
        let err = (&lo - &hi).abs();
        if err > scale.clone() * ctx.tol() && err > Real::from_f64(f64::MIN_POSITIVE, prec) {
            return Err(Error::Accuracy { what: "measure integral".into(), achieved: (err / scale).to_f64() });
        }
        Ok(hi)
    }
}

fn round_up(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    *LADDER.iter().find(|&&l| l >= n).unwrap_or(&(n.div_ceil(256) * 256))
}

/// Gauss points needed on `[a, b]` for a pole at `z`, from the Bernstein
/// ellipse through `z`.
fn pole_nodes(z: &Cplx, a: &Real, b: &Real, bits: u32) -> usize {
    let zc = z.to_c64();
    let (af, bf) = (a.to_f64(), b.to_f64());
    let u = (zc - (af + bf) / 2.0) / ((bf - af) / 2.0);
    let r1 = u + (u * u - 1.0).sqrt();
    let r2 = u - (u * u - 1.0).sqrt();
    let rho = r1.norm().max(r2.norm());
    if !(rho > 1.0) {
        return usize::MAX / 4;
    }
    let n = (bits as f64 * std::f64::consts::LN_2 + 8.0) / (2.0 * rho.ln());
    if n.is_finite() {
        n.ceil() as usize + 2
    } else {
        usize::MAX / 4
    }
}

fn split(c: &Real, d: &Real, pieces: &[Piece], zeros: &[InteriorZero]) -> Vec<SubPiece> {
    // singular indices: 0 = c, 1 = d, 2.. interior zeros
    let mut cuts: Vec<(Real, Option<usize>)> = vec![(c.clone(), Some(0)), (d.clone(), Some(1))];
    for p in pieces.iter().skip(1) {
        cuts.push((p.from.clone(), None));
    }
    for (j, z) in zeros.iter().enumerate() {
        if let Some(existing) = cuts.iter_mut().find(|(t, _)| *t == z.x) {
            existing.1 = Some(j + 2);
        } else {
            cuts.push((z.x.clone(), Some(j + 2)));
        }
    }
    cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    cuts.windows(2)
        .map(|w| {
            let piece = pieces.iter().rposition(|p| p.from <= w[0].0).unwrap_or(0);
            SubPiece { a: w[0].0.clone(), b: w[1].0.clone(), left: w[0].1, right: w[1].1, piece }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn arcsine_moments() {
        let ctx = ctx();
        let m = MeasureSpec::arcsine(ctx.real(-1.0), ctx.real(1.0)).unwrap();
        let ns = m.nodes(4, &ctx).unwrap();
        let c0 = ns.integrate(256, |_| Cplx::one(256));
        let c2 = ns.integrate(256, |t| Cplx::from_real(&t.square()));
        let c4 = ns.integrate(256, |t| Cplx::from_real(&t.powi(4)));
        assert!((c0 - 1.0).abs() < 1e-70);
        assert!((c2 - 0.5).abs() < 1e-70);
        assert!((c4 - 0.375).abs() < 1e-70);
    }

    #[test]
    fn split_pieces_agree_with_single() {
        let ctx = ctx();
        let one = MeasureSpec::arcsine(ctx.real(-0.7), ctx.real(0.4)).unwrap();
        let h = Expr::parse("1").unwrap();
        let two = MeasureSpec::new(
            ctx.real(-0.7),
            ctx.real(0.4),
            vec![
                Piece { from: ctx.real(-0.7), to: ctx.real(0.0), h: h.clone() },
                Piece { from: ctx.real(0.0), to: ctx.real(0.4), h },
            ],
            (0.0, 0.0),
            Vec::new(),
        )
        .unwrap();
        for k in [0, 3, 7] {
            let f = |t: &Real| Cplx::from_real(&t.powi(k));
            let a = one.integrate(f, 8, &ctx).unwrap();
            let b = two.integrate(f, 8, &ctx).unwrap();
            assert!((a - b).abs() < 1e-60, "k={k}");
        }
    }

    #[test]
    fn interior_zero_mass() {
        // |t|^{1/2} against arcsine on [-1,1]: Gamma(3/4)/(sqrt(pi) Gamma(5/4))
        let ctx = ctx();
        let m = MeasureSpec::new(
            ctx.real(-1.0),
            ctx.real(1.0),
            vec![Piece { from: ctx.real(-1.0), to: ctx.real(1.0), h: Expr::parse("1").unwrap() }],
            (0.0, 0.0),
            vec![InteriorZero { x: ctx.real(0.0), alpha: 0.25 }],
        )
        .unwrap();
        let got = m.integrate(|_| Cplx::one(256), 0, &ctx).unwrap();
        let exact = ctx.real(0.75).gamma() / (Real::pi(256).sqrt() * ctx.real(1.25).gamma());
        assert!((got - exact).abs() < 1e-60);
    }

    #[test]
    fn near_point_refinement() {
        // int d omega / (z - t) = 1 / w(z) on [-1,1]
        let ctx = ctx();
        let m = MeasureSpec::arcsine(ctx.real(-1.0), ctx.real(1.0)).unwrap();
        let z = Cplx::from_f64(0.3, 1e-4, 256);
        let ns = m.nodes_near(std::slice::from_ref(&z), 1, 0, &ctx).unwrap();
        let got = ns.integrate(256, |t| (&z - t).recip());
        let w = (&z - 1.0).sqrt() * (&z + 1.0).sqrt();
        assert!((got - w.recip()).abs() < 1e-60);
    }

    #[test]
    fn validation() {
        let ctx = ctx();
        let h = Expr::parse("1").unwrap();
        let p = |a: f64, b: f64| Piece { from: ctx.real(a), to: ctx.real(b), h: h.clone() };
        assert!(MeasureSpec::new(ctx.real(1.0), ctx.real(0.0), vec![p(1.0, 0.0)], (0.0, 0.0), vec![]).is_err());
        assert!(MeasureSpec::new(ctx.real(0.0), ctx.real(1.0), vec![p(0.0, 0.5)], (0.0, 0.0), vec![]).is_err());
        assert!(MeasureSpec::new(ctx.real(0.0), ctx.real(1.0), vec![p(0.0, 1.0)], (0.5, 0.0), vec![]).is_err());
        let z = InteriorZero { x: ctx.real(1.0), alpha: 0.25 };
        assert!(MeasureSpec::new(ctx.real(0.0), ctx.real(1.0), vec![p(0.0, 1.0)], (0.0, 0.0), vec![z]).is_err());
    }
}
