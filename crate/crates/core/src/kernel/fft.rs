//! Radix-2 FFT at working precision.

use crate::kernel::scalar::{Cplx, Real};

/// Forward transform `X_k = sum_j x_j e^{-2 pi i jk/n}` (no normalisation).
/// The length must be a power of two.
pub fn fft(x: &[Cplx]) -> Vec<Cplx> {
    transform(x, false)
}

/// Inverse transform including the `1/n` factor.
pub fn ifft(x: &[Cplx]) -> Vec<Cplx> {
    let n = x.len() as f64;
    transform(x, true).into_iter().map(|z| z / n).collect()
}

fn transform(x: &[Cplx], inverse: bool) -> Vec<Cplx> {
    let n = x.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n == 1 {
        return x.to_vec();
    }
    let prec = x[0].prec();
    let bits = n.trailing_zeros();
    let mut a: Vec<Cplx> = (0..n).map(|i| x[i.reverse_bits() >> (usize::BITS - bits)].clone()).collect();
    let two_pi = Real::pi(prec) * 2.0;
    let sign = if inverse { 1.0 } else { -1.0 };
    // table of e^{sign 2 pi i k / n}, k < n/2
    let twiddles: Vec<Cplx> = (0..n / 2)
        .map(|k| {
            let theta = &two_pi * (sign * k as f64 / n as f64);
            Cplx::polar(&Real::one(prec), &theta)
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let t = &twiddles[k * stride] * &a[start + k + len / 2];
                let u = a[start + k].clone();
                a[start + k] = &u + &t;
                a[start + k + len / 2] = u - t;
            }
        }
        len <<= 1;
    }
    a
}
