use std::fmt;

use crate::kernel::scalar::{Cplx, Real};

/// Polynomial with complex coefficients, lowest degree first.
///
/// Trailing exact zeros are trimmed on construction so the last stored
/// coefficient is the leading one. The zero polynomial stores no coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Cplx>,
    prec: u32,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Cplx>, prec: u32) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Poly { coeffs: Vec::new(), prec }
    }

    pub fn one(prec: u32) -> Self {
        Poly::constant(Cplx::one(prec))
    }

    pub fn constant(c: Cplx) -> Self {
        let prec = c.prec();
        Poly::new(vec![c], prec)
    }

    /// `z^k`.
    pub fn monomial(k: usize, prec: u32) -> Self {
        let mut coeffs = vec![Cplx::zero(prec); k + 1];
        coeffs[k] = Cplx::one(prec);
        Poly { coeffs, prec }
    }

    /// Monic polynomial `prod (z - r)`.
    pub fn from_roots(roots: &[Cplx], prec: u32) -> Self {
        let mut coeffs = vec![Cplx::one(prec)];
        for r in roots {
            let mut next = vec![Cplx::zero(prec); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= &(c * r);
            }
            coeffs = next;
        }
        Poly::new(coeffs, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cplx> {
        self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Cplx {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Cplx::zero(self.prec))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Cplx> {
        self.coeffs.last()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> Real {
        let mut acc = Real::zero(self.prec);
        for c in &self.coeffs {
            acc += c.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn eval(&self, z: &Cplx) -> Cplx {
        let mut acc = Cplx::zero(self.prec.max(z.prec()));
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: &Cplx) -> (Cplx, Cplx) {
        let prec = self.prec.max(z.prec());
        let mut p = Cplx::zero(prec);
        let mut dp = Cplx::zero(prec);
        for c in self.coeffs.iter().rev() {
            dp *= z;
            dp += &p;
            p *= z;
            p += c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * (k as f64))
            .collect();
        Poly::new(coeffs, self.prec)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.prec);
        }
        let mut out = vec![Cplx::zero(self.prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out, self.prec)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + &other.coeff(k)).collect();
        Poly::new(coeffs, self.prec)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - &other.coeff(k)).collect();
        Poly::new(coeffs, self.prec)
    }

    pub fn scale(&self, s: &Cplx) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect(), self.prec)
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lc) => {
                let inv = lc.recip();
                let mut p = self.scale(&inv);
                if let Some(last) = p.coeffs.last_mut() {
                    *last = Cplx::one(self.prec);
                }
                p
            }
            None => self.clone(),
        }
    }

    /// Reciprocal polynomial `z^n conj(p(1/conj z))` relative to formal degree `n`.
    pub fn reciprocal(&self, n: usize) -> Poly {
        let mut coeffs = vec![Cplx::zero(self.prec); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            assert!(k <= n, "formal degree below actual degree");
            coeffs[n - k] = c.conj();
        }
        Poly::new(coeffs, self.prec)
    }

    /// Polynomial `q` with `q(z) = p(a z + b)`.
    pub fn compose_affine(&self, a: &Cplx, b: &Cplx) -> Poly {
        let lin = Poly::new(vec![b.clone(), a.clone()], self.prec);
        let mut acc = Poly::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
