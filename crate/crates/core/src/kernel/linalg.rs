//! Dense complex linear algebra at working precision.
//!
//! Everything here works on column storage internally because both the
//! one-sided Jacobi SVD and Householder QR touch whole columns at a time.

use rug::Complex;

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::scalar::{cdot, cnorm, Cplx, Real};

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cplx>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        CMatrix { rows, cols, data: vec![Cplx::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = CMatrix::zeros(n, n, prec);
        for k in 0..n {
            m.set(k, k, Cplx::one(prec));
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Cplx>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidInput(format!(
                "matrix of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Cplx>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cplx {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cplx) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Cplx> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    fn columns(&self) -> Vec<Vec<Cplx>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map(|z| z.prec()).unwrap_or(53)
    }

    pub fn scale(&self, s: &Cplx) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let prec = self.prec();
        let mut out = CMatrix::zeros(self.rows, other.cols, prec);
        let mut acc = Complex::new(prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                acc.assign_zero();
                for k in 0..self.cols {
                    acc += &self.get(i, k).0 * &other.get(k, j).0;
                }
                out.data[i * other.cols + j] = Cplx(acc.clone());
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        let prec = self.prec();
        let mut acc = Complex::new(prec);
        (0..self.rows)
            .map(|i| {
                acc.assign_zero();
                for (k, x) in v.iter().enumerate() {
                    acc += &self.get(i, k).0 * &x.0;
                }
                Cplx(acc.clone())
            })
            .collect()
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> Real {
        cnorm(&self.data)
    }
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<_> = (0..self.cols).map(|j| self.get(i, j).to_c64()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

trait AssignZero {
    fn assign_zero(&mut self);
}

impl AssignZero for Complex {
    fn assign_zero(&mut self) {
        use rug::Assign;
        self.assign(0);
    }
}

/// Thin singular value decomposition `M = U diag(sigma) V*`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub sigma: Vec<Real>,
    /// columns are left singular vectors
    pub u: Vec<Vec<Cplx>>,
    /// columns are right singular vectors
    pub v: Vec<Vec<Cplx>>,
}

impl Svd {
    pub fn reconstruct(&self, rows: usize, cols: usize) -> CMatrix {
        let prec = self.sigma.first().map(|s| s.prec()).unwrap_or(53);
        let mut m = CMatrix::zeros(rows, cols, prec);
        for (k, s) in self.sigma.iter().enumerate() {
            for i in 0..rows {
                let us = &self.u[k][i] * s;
                for j in 0..cols {
                    let add = &us * &self.v[k][j].conj();
                    let cur = m.get(i, j) + &add;
                    m.set(i, j, cur);
                }
            }
        }
        m
    }
}

/// Rotates columns `p` and `q` so they become orthogonal. Returns the
/// rotation `(c, s, e^{i phi})` if one was applied.
fn jacobi_pair(cols: &mut [Vec<Cplx>], p: usize, q: usize, threshold: &Real) -> Option<(Real, Real, Cplx)> {
    let alpha = cnorm(&cols[p]).square();
    let beta = cnorm(&cols[q]).square();
    let gamma = cdot(&cols[p], &cols[q]);
    let g = gamma.abs();
    if g.is_zero() || g <= (&alpha * &beta).sqrt() * threshold {
        return None;
    }
    let zeta = (&beta - &alpha) / (&g * 2.0);
    let root = (zeta.square() + 1.0).sqrt();
    let mut t = (zeta.abs() + &root).recip();
    if zeta.is_sign_negative() {
        t = -t;
    }
    let c = (t.square() + 1.0).sqrt().recip();
    let s = &c * &t;
    let phase = &gamma / &g;
    Some((c, s, phase))
}

fn apply_rotation(cols: &mut [Vec<Cplx>], p: usize, q: usize, c: &Real, s: &Real, phase: &Cplx) {
    let e_minus = phase.conj() * s;
    let e_plus = phase * s;
    let (lo, hi) = cols.split_at_mut(q);
    let (ap, aq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
        let nx = &*x * c - &e_minus * &*y;
        let ny = &e_plus * &*x + &*y * c;
        *x = nx;
        *y = ny;
    }
}

/// One-sided Jacobi on the columns of a tall (rows >= cols) matrix.
/// Returns the final columns `M V` and the accumulated `V`.
fn one_sided_jacobi(mut cols: Vec<Vec<Cplx>>, prec: u32) -> (Vec<Vec<Cplx>>, Vec<Vec<Cplx>>) {
    let n = cols.len();
    let mut v: Vec<Vec<Cplx>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Cplx::one(prec) } else { Cplx::zero(prec) }).collect())
        .collect();
    let threshold = Real::from_f64(2f64.powi(-(prec as i32) + 4), prec);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                if let Some((c, s, phase)) = jacobi_pair(&mut cols, p, q, &threshold) {
                    apply_rotation(&mut cols, p, q, &c, &s, &phase);
                    apply_rotation(&mut v, p, q, &c, &s, &phase);
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, v)
}

/// Orders a Jacobi result into an [`Svd`]; `mv` are the columns `M V`.
fn finish_svd(mv: Vec<Vec<Cplx>>, v: Vec<Vec<Cplx>>, prec: u32) -> Svd {
    let mut triples: Vec<(Real, Vec<Cplx>, Vec<Cplx>)> = mv
        .into_iter()
        .zip(v)
        .map(|(col, vcol)| {
            let s = cnorm(&col);
            let u = if s.is_zero() {
                col
            } else {
                let inv = s.recip();
                col.iter().map(|z| z * &inv).collect()
            };
            (s, u, vcol)
        })
        .collect();
    triples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut sigma = Vec::new();
    let mut u = Vec::new();
    let mut vv = Vec::new();
    for (s, uc, vc) in triples {
        sigma.push(s.with_prec(prec));
        u.push(uc);
        vv.push(vc);
    }
    Svd { sigma, u, v: vv }
}

/// Full thin SVD by one-sided Jacobi.
pub fn svd(m: &CMatrix, _ctx: &PrecisionContext) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("svd input has non-finite entries".into()));
    }
    let prec = m.prec();
    if m.rows >= m.cols {
        let (mv, v) = one_sided_jacobi(m.columns(), prec);
        Ok(finish_svd(mv, v, prec))
    } else {
        let (mv, v) = one_sided_jacobi(m.adjoint().columns(), prec);
        let s = finish_svd(mv, v, prec);
        Ok(Svd { sigma: s.sigma, u: s.v, v: s.u })
    }
}

/// Unit vector minimising `|M v|`: the right singular vector of the
/// smallest singular value. Wide systems are padded with zero rows.
pub fn nullspace_solve(m: &CMatrix, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
    if m.cols == 0 {
        return Err(Error::InvalidInput("nullspace_solve needs at least one column".into()));
    }
    let prec = m.prec();
    let mut cols = m.columns();
    if m.rows < m.cols {
        for c in cols.iter_mut() {
            c.resize(m.cols, Cplx::zero(prec));
        }
    }
    let _ = ctx;
    let (mv, v) = one_sided_jacobi(cols, prec);
    let s = finish_svd(mv, v, prec);
    Ok(s.v.last().cloned().expect("at least one column"))
}

/// Householder QR with column pivoting, `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    rows: usize,
    /// Householder vectors; reflector k acts on rows k.. and has `v[0]` at row k
    reflectors: Vec<Vec<Cplx>>,
    /// `2 / |v|^2` per reflector (zero when the reflector is the identity)
    betas: Vec<Real>,
    /// columns of R (length = rank rows used)
    r_cols: Vec<Vec<Cplx>>,
    /// `perm[j]` is the original column sitting at position j
    pub perm: Vec<usize>,
    pub rank: usize,
}

impl PivotedQr {
    /// Factorises until the largest remaining column norm falls to
    /// `stop * max initial column norm` (pass zero for a full factorisation).
    pub fn new(a: &CMatrix, stop: f64) -> Self {
        Self::factor(a, stop, None)
    }

    /// As [`PivotedQr::new`], but also stops once `leading` columns are done
    /// and the remaining norm has dropped by `margin` relative to the norm
    /// met at step `leading`, or below the absolute `floor`.
    pub fn new_leading(a: &CMatrix, stop: f64, leading: usize, margin: f64, floor: f64) -> Self {
        Self::factor(a, stop, Some((leading, margin, floor)))
    }

    fn factor(a: &CMatrix, stop: f64, leading: Option<(usize, f64, f64)>) -> Self {
        let rows = a.rows;
        let ncols = a.cols;
        let prec = a.prec();
        let mut cols = a.columns();
        let mut perm: Vec<usize> = (0..ncols).collect();
        let mut norms: Vec<Real> = cols.iter().map(|c| cnorm(c).square()).collect();
        let scale = norms.iter().cloned().fold(Real::zero(prec), Real::max).sqrt();
        let stop_abs = &scale * stop;
        let mut reflectors = Vec::new();
        let mut betas = Vec::new();
        let steps = rows.min(ncols);
        let mut rank = 0;
        let mut tmp = Complex::new(prec);
        let mut lead_norm: Option<Real> = None;
        for k in 0..steps {
            // exact residual column norms; cheap compared with the update
            for j in k..ncols {
                norms[j] = cnorm(&cols[j][k..]).square();
            }
            let (jmax, _) = norms[k..]
                .iter()
                .enumerate()
                .fold((0usize, Real::from_f64(-1.0, prec)), |(bi, bv), (i, v)| {
                    if *v > bv {
                        (i, v.clone())
                    } else {
                        (bi, bv)
                    }
                });
            let jmax = jmax + k;
            if norms[jmax].sqrt() <= stop_abs || norms[jmax].is_zero() {
                break;
            }
            if let Some((lead, margin, floor)) = leading {
                if k == lead {
                    lead_norm = Some((norms[jmax].sqrt() * margin).max(Real::from_f64(floor, prec)));
                } else if k > lead && lead_norm.as_ref().is_some_and(|l| norms[jmax].sqrt() <= *l) {
                    break;
                }
            }
            cols.swap(k, jmax);
            norms.swap(k, jmax);
            perm.swap(k, jmax);
            let xnorm = norms[k].sqrt();
            let x0 = cols[k][k].clone();
            let x0abs = x0.abs();
            let alpha = if x0abs.is_zero() {
                Cplx::from_real(&(-&xnorm))
            } else {
                -(&x0 / &x0abs) * &xnorm
            };
            let mut v: Vec<Cplx> = cols[k][k..].to_vec();
            v[0] -= &alpha;
            let vnorm2 = &xnorm * (&xnorm + &x0abs) * 2.0;
            let beta = if vnorm2.is_zero() { Real::zero(prec) } else { vnorm2.recip() * 2.0 };
            for col in cols.iter_mut().skip(k + 1) {
                let s = cdot(&v, &col[k..]) * &beta;
                for (ci, vi) in col[k..].iter_mut().zip(&v) {
                    tmp.assign_zero();
                    tmp += &vi.0 * &s.0;
                    ci.0 -= &tmp;
                }
            }
            cols[k][k] = alpha;
            for z in cols[k][k + 1..].iter_mut() {
                *z = Cplx::zero(prec);
            }
            reflectors.push(v);
            betas.push(beta);
            rank = k + 1;
        }
        let r_cols = cols.into_iter().map(|mut c| {
            c.truncate(rank);
            c
        });
        PivotedQr { rows, reflectors, betas, r_cols: r_cols.collect(), perm, rank }
    }

    /// `Q* b`.
    pub fn apply_qh(&self, b: &[Cplx]) -> Vec<Cplx> {
        let mut y = b.to_vec();
        for (k, (v, beta)) in self.reflectors.iter().zip(&self.betas).enumerate() {
            let s = cdot(v, &y[k..]) * beta;
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= &(vi * &s);
            }
        }
        y
    }

    /// First `rank` columns of Q, explicitly.
    pub fn q_thin(&self) -> Vec<Vec<Cplx>> {
        let prec = self.betas.first().map(|b| b.prec()).unwrap_or(53);
        (0..self.rank)
            .map(|j| {
                let mut e = vec![Cplx::zero(prec); self.rows];
                e[j] = Cplx::one(prec);
                for k in (0..self.rank).rev() {
                    let v = &self.reflectors[k];
                    let s = cdot(v, &e[k..]) * &self.betas[k];
                    for (ei, vi) in e[k..].iter_mut().zip(v) {
                        *ei -= &(vi * &s);
                    }
                }
                e
            })
            .collect()
    }

    /// Entry `R[i][j]` in pivoted column order.
    pub fn r(&self, i: usize, j: usize) -> &Cplx {
        &self.r_cols[j][i]
    }

    /// `|R[rank-1][rank-1]| / |R[0][0]|`, a cheap conditioning indicator.
    pub fn diag_ratio(&self) -> f64 {
        if self.rank == 0 {
            return 0.0;
        }
        (self.r(self.rank - 1, self.rank - 1).abs() / self.r(0, 0).abs()).to_f64()
    }

    /// Basic least-squares solution; free variables beyond the rank are zero.
    pub fn solve(&self, b: &[Cplx]) -> Vec<Cplx> {
        let prec = b.first().map(|z| z.prec()).unwrap_or(53);
        let y = self.apply_qh(b);
        let n = self.perm.len();
        let mut xt = vec![Cplx::zero(prec); n];
        for i in (0..self.rank).rev() {
            let mut acc = y[i].clone();
            for j in i + 1..self.rank {
                acc -= &(self.r(i, j) * &xt[j]);
            }
            xt[i] = acc / self.r(i, i);
        }
        let mut x = vec![Cplx::zero(prec); n];
        for (j, &orig) in self.perm.iter().enumerate() {
            x[orig] = xt[j].clone();
        }
        x
    }
}

/// Solution of a square system with a pivoted-QR rank report.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<Cplx>,
    pub rank: usize,
    pub diag_ratio: f64,
}

/// Solves `A x = b` by Householder QR with column pivoting.
pub fn solve_pivoted(a: &CMatrix, b: &[Cplx], ctx: &PrecisionContext) -> Result<LinearSolution> {
    if a.rows != b.len() {
        return Err(Error::InvalidInput("right-hand side length does not match matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("linear system has non-finite entries".into()));
    }
    let qr = PivotedQr::new(a, ctx.eps() * 16.0);
    Ok(LinearSolution { x: qr.solve(b), rank: qr.rank, diag_ratio: qr.diag_ratio() })
}

/// SVD of the numerically significant part of `a`. Directions whose residual
/// column norm falls below `rel_tol * max column norm` are discarded, so only
/// the leading `rank` triples are returned and they are accurate to about
/// `rel_tol * |a|` in absolute terms.
pub fn lowrank_svd(a: &CMatrix, rel_tol: f64) -> Svd {
    svd_from_qr(a, PivotedQr::new(a, rel_tol))
}

/// Low-rank SVD that resolves the `leading + 1` largest singular values.
/// The discarded part has norm about `margin * sigma_leading`, which
/// perturbs each kept `sigma_j` by about `(margin sigma_leading)^2 / sigma_j`.
/// A positive `floor` caps the discarded norm from below, for matrices known
/// only to that absolute accuracy.
pub fn leading_svd(a: &CMatrix, rel_tol: f64, leading: usize, margin: f64, floor: f64) -> Svd {
    svd_from_qr(a, PivotedQr::new_leading(a, rel_tol, leading, margin, floor))
}

fn svd_from_qr(a: &CMatrix, qr: PivotedQr) -> Svd {
    let prec = a.prec();
    let k = qr.rank;
    if k == 0 {
        return Svd { sigma: Vec::new(), u: Vec::new(), v: Vec::new() };
    }
    // B = R P^T is k x cols; one-sided Jacobi on the columns of B*
    let ncols = a.cols;
    let mut bh_cols: Vec<Vec<Cplx>> = vec![vec![Cplx::zero(prec); ncols]; k];
    for (pos, &orig) in qr.perm.iter().enumerate() {
        for (i, col) in bh_cols.iter_mut().enumerate() {
            col[orig] = qr.r(i, pos).conj();
        }
    }
    let (mv, w) = one_sided_jacobi(bh_cols, prec);
    // B* W = U' S  =>  B = W S U'*, A ~ (Q W) S U'*
    let s = finish_svd(mv, w, prec);
    let q = qr.q_thin();
    let left: Vec<Vec<Cplx>> = s
        .v
        .iter()
        .map(|wcol| {
            (0..a.rows)
                .map(|r| {
                    let mut acc = Cplx::zero(prec);
                    for (j, wj) in wcol.iter().enumerate() {
                        acc += &(&q[j][r] * wj);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Svd { sigma: s.sigma, u: left, v: s.u }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| {
            Cplx::from_f64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 256)
        })
    }

    #[test]
    fn identity_singular_values() {
        let s = svd(&CMatrix::identity(3, 256), &ctx()).unwrap();
        for v in &s.sigma {
            assert!((v - 1.0).abs() < 1e-70);
        }
    }

    #[test]
    fn padded_diagonal() {
        let mut m = CMatrix::zeros(3, 2, 256);
        m.set(0, 0, Cplx::from_f64(1.0, 0.0, 256));
        m.set(1, 1, Cplx::from_f64(3.0, 0.0, 256));
        let s = svd(&m, &ctx()).unwrap();
        assert!((&s.sigma[0] - 3.0).abs() < 1e-70);
        assert!((&s.sigma[1] - 1.0).abs() < 1e-70);
    }

    #[test]
    fn random_reconstruction() {
        for (r, c) in [(10, 10), (7, 4), (4, 7)] {
            let m = random_matrix(r, c, 7 + r as u64);
            let s = svd(&m, &ctx()).unwrap();
            let back = s.reconstruct(r, c);
            assert!(back.sub(&m).norm_fro() < 1e-60, "{r}x{c}");
            for w in s.sigma.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn nullspace_examples() {
        let ctx = ctx();
        let mut m = CMatrix::zeros(2, 2, 256);
        m.set(0, 0, Cplx::one(256));
        let v = nullspace_solve(&m, &ctx).unwrap();
        assert!(v[0].abs() < 1e-70);
        assert!((v[1].abs() - 1.0).abs() < 1e-70);

        let row = CMatrix::from_rows(1, 2, vec![Cplx::one(256), Cplx::one(256)]).unwrap();
        let v = nullspace_solve(&row, &ctx).unwrap();
        assert!((&v[0] + &v[1]).abs() < 1e-70);
        assert!((v[0].abs().square() - 0.5).abs() < 1e-70);
    }

    #[test]
    fn pivoted_solve_square() {
        let ctx = ctx();
        let a = random_matrix(6, 6, 3);
        let x: Vec<Cplx> = (0..6).map(|k| Cplx::from_f64(k as f64, 1.0 - k as f64, 256)).collect();
        let b = a.mul_vec(&x);
        let sol = solve_pivoted(&a, &b, &ctx).unwrap();
        assert_eq!(sol.rank, 6);
        for (p, q) in sol.x.iter().zip(&x) {
            assert!((p - q).abs() < 1e-65);
        }
    }

    #[test]
    fn lowrank_matches_full() {
        // rank-3 product plus exact zeros elsewhere
        let a = random_matrix(9, 3, 11);
        let b = random_matrix(3, 8, 12);
        let m = a.mul(&b);
        let full = svd(&m, &ctx()).unwrap();
        let low = lowrank_svd(&m, 1e-60);
        assert_eq!(low.sigma.len(), 3);
        for k in 0..3 {
            assert!((&full.sigma[k] - &low.sigma[k]).abs() < 1e-60);
        }
        assert!(low.reconstruct(9, 8).sub(&m).norm_fro() < 1e-58);
    }
}
