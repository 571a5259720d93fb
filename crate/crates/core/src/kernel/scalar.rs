//! Precision-carrying real and complex scalars backed by MPFR/MPC.
//!
//! Every value remembers its own mantissa width; binary operations produce a
//! result at the wider of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

/// Arbitrary-precision real number.
#[derive(Clone, PartialEq)]
pub struct Real(pub(crate) Float);

/// Arbitrary-precision complex number.
#[derive(Clone, PartialEq)]
pub struct Cplx(pub(crate) Complex);

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Real(Float::with_val(prec, 1))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Real(Float::with_val(prec, x))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        Real(Float::with_val(prec, x))
    }

    /// Exact ratio `num / den` rounded once.
    pub fn ratio(num: i64, den: i64, prec: u32) -> Self {
        let n = Float::with_val(prec, num);
        Real(n / den)
    }

    /// Parses a decimal literal (e.g. `"0.7"`, `"-1.25e-3"`) at the given precision.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        Float::parse(s.trim()).ok().map(|v| Real(Float::with_val(prec, v)))
    }

    pub fn pi(prec: u32) -> Self {
        Real(Float::with_val(prec, Constant::Pi))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Real(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Real {
        Real(self.0.clone().exp())
    }

    pub fn ln(&self) -> Real {
        Real(self.0.clone().ln())
    }

    pub fn sin(&self) -> Real {
        Real(self.0.clone().sin())
    }

    pub fn cos(&self) -> Real {
        Real(self.0.clone().cos())
    }

    pub fn acos(&self) -> Real {
        Real(self.0.clone().acos())
    }

    pub fn atan2(&self, x: &Real) -> Real {
        Real(self.0.clone().atan2(&x.0))
    }

    pub fn gamma(&self) -> Real {
        Real(self.0.clone().gamma())
    }

    pub fn ln_gamma(&self) -> Real {
        Real(self.0.clone().ln_gamma())
    }

    pub fn powf(&self, e: &Real) -> Real {
        Real(self.0.clone().pow(&e.0))
    }

    pub fn powi(&self, e: i32) -> Real {
        Real(self.0.clone().pow(e))
    }

    pub fn square(&self) -> Real {
        Real(self.0.clone().square())
    }

    pub fn recip(&self) -> Real {
        Real(self.0.clone().recip())
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Shortest decimal string that parses back to the same value at this precision.
    pub fn to_decimal(&self) -> String {
        self.0.to_string_radix(10, None)
    }

    /// Decimal string with `digits` significant digits.
    pub fn to_decimal_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }
}

impl Cplx {
    pub fn zero(prec: u32) -> Self {
        Cplx(Complex::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Cplx(Complex::with_val(prec, 1))
    }

    pub fn i(prec: u32) -> Self {
        Cplx(Complex::with_val(prec, (0, 1)))
    }

    pub fn new(re: Real, im: Real) -> Self {
        let p = re.prec().max(im.prec());
        Cplx(Complex::with_val(p, (re.0, im.0)))
    }

    pub fn from_real(re: &Real) -> Self {
        Cplx(Complex::with_val(re.prec(), &re.0))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Cplx(Complex::with_val(prec, (re, im)))
    }

    pub fn from_c64(z: Complex64, prec: u32) -> Self {
        Cplx::from_f64(z.re, z.im, prec)
    }

    /// `r * exp(i*theta)`.
    pub fn polar(r: &Real, theta: &Real) -> Self {
        Cplx::new(r * &theta.cos(), r * &theta.sin())
    }

    pub fn prec(&self) -> u32 {
        self.0.prec().0
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Cplx(Complex::with_val(prec, &self.0))
    }

    pub fn re(&self) -> Real {
        Real(self.0.real().clone())
    }

    pub fn im(&self) -> Real {
        Real(self.0.imag().clone())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.0.real().to_f64(), self.0.imag().to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs().into_real_imag().0)
    }

    pub fn norm_sqr(&self) -> Real {
        Real(self.0.clone().norm().into_real_imag().0)
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> Real {
        Real(self.0.clone().arg().into_real_imag().0)
    }

    pub fn conj(&self) -> Cplx {
        Cplx(self.0.clone().conj())
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Cplx {
        Cplx(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Cplx {
        Cplx(self.0.clone().exp())
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Cplx {
        Cplx(self.0.clone().ln())
    }

    pub fn sin(&self) -> Cplx {
        Cplx(self.0.clone().sin())
    }

    pub fn cos(&self) -> Cplx {
        Cplx(self.0.clone().cos())
    }

    pub fn recip(&self) -> Cplx {
        Cplx(self.0.clone().recip())
    }

    pub fn square(&self) -> Cplx {
        Cplx(self.0.clone().square())
    }

    /// Principal power `self^e`.
    pub fn powc(&self, e: &Cplx) -> Cplx {
        Cplx(self.0.clone().pow(&e.0))
    }

    pub fn powi(&self, e: i64) -> Cplx {
        if e < 0 {
            return self.powi(-e).recip();
        }
        let mut result = Cplx::one(self.prec());
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                result *= &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Cplx {
        Cplx(self.0.clone().mul_i(false))
    }

    pub fn scale(&self, r: &Real) -> Cplx {
        self * r
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }
}

impl From<Real> for Cplx {
    fn from(r: Real) -> Self {
        Cplx::from_real(&r)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(24)))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "{}", self.0.to_string_radix(10, Some(d.max(1)))),
            None => write!(f, "{}", self.0.to_string_radix(10, Some(24))),
        }
    }
}

impl fmt::Debug for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.re(), self.im())
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "({:.*}, {:.*})", d, self.re(), d, self.im()),
            None => write!(f, "({}, {})", self.re(), self.im()),
        }
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                let p = self.prec().max(rhs.prec());
                Real(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(mut self, rhs: &Real) -> Real {
                if self.prec() >= rhs.prec() {
                    self.0.$am(&rhs.0);
                    self
                } else {
                    &self $op rhs
                }
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self $op &rhs
            }
        }
        impl $tr<f64> for &Real {
            type Output = Real;
            fn $m(self, rhs: f64) -> Real {
                Real(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for Real {
            type Output = Real;
            fn $m(mut self, rhs: f64) -> Real {
                self.0.$am(rhs);
                self
            }
        }
        impl $atr<&Real> for Real {
            fn $am(&mut self, rhs: &Real) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<Real> for Real {
            fn $am(&mut self, rhs: Real) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<f64> for Real {
            fn $am(&mut self, rhs: f64) {
                self.0.$am(rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign, +);
real_binop!(Sub, sub, SubAssign, sub_assign, -);
real_binop!(Mul, mul, MulAssign, mul_assign, *);
real_binop!(Div, div, DivAssign, div_assign, /);

macro_rules! cplx_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&Cplx> for &Cplx {
            type Output = Cplx;
            fn $m(self, rhs: &Cplx) -> Cplx {
                let p = self.prec().max(rhs.prec());
                Cplx(Complex::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Cplx> for &Cplx {
            type Output = Cplx;
            fn $m(self, rhs: Cplx) -> Cplx {
                self $op &rhs
            }
        }
        impl $tr<&Cplx> for Cplx {
            type Output = Cplx;
            fn $m(mut self, rhs: &Cplx) -> Cplx {
                if self.prec() >= rhs.prec() {
                    self.0.$am(&rhs.0);
                    self
                } else {
                    &self $op rhs
                }
            }
        }
        impl $tr<Cplx> for Cplx {
            type Output = Cplx;
            fn $m(self, rhs: Cplx) -> Cplx {
                self $op &rhs
            }
        }
        impl $tr<&Real> for &Cplx {
            type Output = Cplx;
            fn $m(self, rhs: &Real) -> Cplx {
                let p = self.prec().max(rhs.prec());
                Cplx(Complex::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for &Cplx {
            type Output = Cplx;
            fn $m(self, rhs: Real) -> Cplx {
                self $op &rhs
            }
        }
        impl $tr<&Real> for Cplx {
            type Output = Cplx;
            fn $m(mut self, rhs: &Real) -> Cplx {
                self.0.$am(&rhs.0);
                self
            }
        }
        impl $tr<Real> for Cplx {
            type Output = Cplx;
            fn $m(mut self, rhs: Real) -> Cplx {
                self.0.$am(&rhs.0);
                self
            }
        }
        impl $tr<f64> for &Cplx {
            type Output = Cplx;
            fn $m(self, rhs: f64) -> Cplx {
                Cplx(Complex::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<f64> for Cplx {
            type Output = Cplx;
            fn $m(mut self, rhs: f64) -> Cplx {
                self.0.$am(rhs);
                self
            }
        }
        impl $atr<&Cplx> for Cplx {
            fn $am(&mut self, rhs: &Cplx) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<Cplx> for Cplx {
            fn $am(&mut self, rhs: Cplx) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<&Real> for Cplx {
            fn $am(&mut self, rhs: &Real) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<f64> for Cplx {
            fn $am(&mut self, rhs: f64) {
                self.0.$am(rhs);
            }
        }
    };
}

cplx_binop!(Add, add, AddAssign, add_assign, +);
cplx_binop!(Sub, sub, SubAssign, sub_assign, -);
cplx_binop!(Mul, mul, MulAssign, mul_assign, *);
cplx_binop!(Div, div, DivAssign, div_assign, /);

macro_rules! real_lhs_cplx {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Cplx> for &Real {
            type Output = Cplx;
            fn $m(self, rhs: &Cplx) -> Cplx {
                Cplx::from_real(self) $op rhs
            }
        }
        impl $tr<Cplx> for &Real {
            type Output = Cplx;
            fn $m(self, rhs: Cplx) -> Cplx {
                Cplx::from_real(self) $op &rhs
            }
        }
        impl $tr<&Cplx> for Real {
            type Output = Cplx;
            fn $m(self, rhs: &Cplx) -> Cplx {
                Cplx::from_real(&self) $op rhs
            }
        }
        impl $tr<Cplx> for Real {
            type Output = Cplx;
            fn $m(self, rhs: Cplx) -> Cplx {
                Cplx::from_real(&self) $op &rhs
            }
        }
    };
}

real_lhs_cplx!(Add, add, +);
real_lhs_cplx!(Sub, sub, -);
real_lhs_cplx!(Mul, mul, *);
real_lhs_cplx!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0.clone())
    }
}

impl Neg for Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx(-self.0)
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx(-self.0.clone())
    }
}

/// Sum of a sequence of complex values (zero at `prec` if empty).
pub fn csum<'a, I: IntoIterator<Item = &'a Cplx>>(it: I, prec: u32) -> Cplx {
    let mut acc = Cplx::zero(prec);
    for v in it {
        acc += v;
    }
    acc
}

/// Hermitian dot product `sum conj(a_i) b_i`.
pub fn cdot(a: &[Cplx], b: &[Cplx]) -> Cplx {
    let prec = a.first().map(|v| v.prec()).unwrap_or(53);
    let mut acc = Complex::new(prec);
    let mut tmp = Complex::new(prec);
    for (x, y) in a.iter().zip(b) {
        tmp.assign_conj_mul(&x.0, &y.0);
        acc += &tmp;
    }
    Cplx(acc)
}

/// Euclidean norm of a complex vector.
pub fn cnorm(a: &[Cplx]) -> Real {
    let prec = a.first().map(|v| v.prec()).unwrap_or(53);
    let mut acc = Float::new(prec);
    for x in a {
        acc += x.0.real().clone().square();
        acc += x.0.imag().clone().square();
    }
    Real(acc.sqrt())
}

trait AssignConjMul {
    fn assign_conj_mul(&mut self, a: &Complex, b: &Complex);
}

impl AssignConjMul for Complex {
    fn assign_conj_mul(&mut self, a: &Complex, b: &Complex) {
        // (ar - i ai)(br + i bi) = ar br + ai bi + i (ar bi - ai br)
        let (ar, ai) = (a.real(), a.imag());
        let (br, bi) = (b.real(), b.imag());
        let (re, im) = self.as_mut_real_imag();
        re.assign(ar * br);
        *re += ai * bi;
        im.assign(ar * bi);
        *im -= ai * br;
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_carried() {
        let a = Real::from_f64(1.0, 256);
        let b = Real::from_f64(3.0, 256);
        let third = &a / &b;
        assert_eq!(third.prec(), 256);
        let back = &third * 3.0;
        assert!((back - 1.0).abs() < 1e-70);
    }

    #[test]
    fn complex_basics() {
        let z = Cplx::from_f64(3.0, 4.0, 128);
        assert!((z.abs() - 5.0).abs() < 1e-35);
        let w = &z * &z.conj();
        assert!((w.re() - 25.0).abs() < 1e-35);
        assert!(w.im().abs() < 1e-35);
        let s = Cplx::from_f64(-4.0, 0.0, 128).sqrt();
        assert!((s.im() - 2.0).abs() < 1e-35);
        assert!((z.powi(3) - &z * &z * &z).abs() < 1e-30);
        assert!((z.powi(-2) * z.square() - 1.0).abs() < 1e-35);
    }

    #[test]
    fn conj_dot() {
        let a = vec![Cplx::from_f64(1.0, 1.0, 128), Cplx::from_f64(0.0, 2.0, 128)];
        let d = cdot(&a, &a);
        assert!((d.re() - 6.0).abs() < 1e-35);
        assert!(d.im().abs() < 1e-35);
        assert!((cnorm(&a).square() - 6.0).abs() < 1e-35);
    }

    #[test]
    fn decimal_round_trip() {
        let x = Real::ratio(1, 7, 256);
        let s = x.to_decimal();
        let y = Real::parse(&s, 256).unwrap();
        assert_eq!(x, y);
        assert_eq!(y.to_decimal(), s);
    }
}
