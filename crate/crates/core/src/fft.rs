//! Complex discrete Fourier transform for any length.
//!
//! Powers of two use an iterative radix-2 kernel; other lengths go through
//! Bluestein's chirp-z identity on a padded power-of-two transform.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// Planned transform of a fixed length. Forward is
/// `X_k = sum_j x_j exp(-2 pi i j k / n)`; inverse carries the `1/n`.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    Radix2 {
        twiddles: Vec<Complex64>,
        bitrev: Vec<usize>,
    },
    Bluestein {
        chirp: Vec<Complex64>,
        kernel: Vec<Complex64>,
        inner: Box<Fft>,
    },
}

fn expi(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, s)
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform length must be positive");
        if n.is_power_of_two() {
            let twiddles = (0..n / 2)
                .map(|k| expi(-2.0 * PI * k as f64 / n as f64))
                .collect();
            let bits = n.trailing_zeros();
            let bitrev = (0..n)
                .map(|k| if bits == 0 { 0 } else { k.reverse_bits() >> (usize::BITS - bits) })
                .collect();
            return Fft {
                n,
                plan: Plan::Radix2 { twiddles, bitrev },
            };
        }

        let m = (2 * n - 1).next_power_of_two();
        let inner = Box::new(Fft::new(m));
        // j^2 mod 2n keeps the chirp angle small for large j.
        let chirp: Vec<Complex64> = (0..n)
            .map(|j| {
                let jj = (j as u128 * j as u128 % (2 * n) as u128) as f64;
                expi(-PI * jj / n as f64)
            })
            .collect();
        let mut kernel = alloc::vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for j in 1..n {
            kernel[j] = chirp[j].conj();
            kernel[m - j] = chirp[j].conj();
        }
        inner.forward(&mut kernel);
        Fft {
            n,
            plan: Plan::Bluestein {
                chirp,
                kernel,
                inner,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match plan");
        match &self.plan {
            Plan::Radix2 { twiddles, bitrev } => radix2(buf, twiddles, bitrev),
            Plan::Bluestein {
                chirp,
                kernel,
                inner,
            } => {
                let m = inner.len();
                let mut work = alloc::vec![Complex64::new(0.0, 0.0); m];
                for ((w, x), c) in work.iter_mut().zip(buf.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, k) in work.iter_mut().zip(kernel) {
                    *w *= k;
                }
                inner.inverse(&mut work);
                for ((x, w), c) in buf.iter_mut().zip(&work).zip(chirp) {
                    *x = w * c;
                }
            }
        }
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        buf.iter_mut().for_each(|x| *x = x.conj());
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|x| *x = x.conj() * scale);
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64], bitrev: &[usize]) {
    let n = buf.len();
    for (k, &r) in bitrev.iter().enumerate() {
        if k < r {
            buf.swap(k, r);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let t = buf[start + j + half] * twiddles[j * stride];
                let u = buf[start + j];
                buf[start + j] = u + t;
                buf[start + j + half] = u - t;
            }
        }
        len <<= 1;
    }
}
