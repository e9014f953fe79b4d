//! Centred discrete Fourier transforms and the exact twiddle table shared by
//! the direct quadratures.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// kernel `exp(-2 pi i (k - n/2)(a - n/2) / n)`
    Forward,
    /// kernel `exp(+2 pi i (k - n/2)(a - n/2) / n)`
    Inverse,
}

/// Unnormalised DFT with both indices centred at `n/2`.
///
/// `(k - n/2)(a - n/2) = k a - (k + a) n/2 + n^2/4`, so the centred kernel is
/// the ordinary one with `(-1)^a` applied before, `(-1)^k` after and a global
/// `(-1)^(n/2)`.
pub(crate) struct CentredDft {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl CentredDft {
    pub(crate) fn new(n: usize, direction: Direction) -> Self {
        assert!(n % 2 == 0, "centred DFT needs an even length");
        let mut planner = FftPlanner::new();
        let fft = match direction {
            Direction::Forward => planner.plan_fft_forward(n),
            Direction::Inverse => planner.plan_fft_inverse(n),
        };
        Self { n, fft }
    }

    pub(crate) fn process(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (a, v) in buf.iter_mut().enumerate() {
            if a % 2 == 1 {
                *v = -*v;
            }
        }
        self.fft.process(buf);
        let global = if (self.n / 2) % 2 == 1 { -1.0 } else { 1.0 };
        for (k, v) in buf.iter_mut().enumerate() {
            let s = if k % 2 == 1 { -global } else { global };
            *v *= s;
        }
    }
}

/// `table[q] = exp(-i pi q / n)` for `q` in `0..2n`, with conjugate pairs
/// `table[2n - q] = conj(table[q])` built exactly.
#[derive(Debug, Clone)]
pub(crate) struct Twiddles {
    period: i64,
    table: Vec<Complex64>,
}

impl Twiddles {
    pub(crate) fn new(n: usize) -> Self {
        let period = 2 * n;
        let mut table = vec![Complex64::new(0.0, 0.0); period];
        for q in 0..=n {
            let theta = PI * q as f64 / n as f64;
            table[q] = Complex64::new(theta.cos(), -theta.sin());
        }
        for q in 1..n {
            table[period - q] = table[q].conj();
        }
        // exact values at the quarter points
        table[0] = Complex64::new(1.0, 0.0);
        table[n] = Complex64::new(-1.0, 0.0);
        if n % 2 == 0 {
            table[n / 2] = Complex64::new(0.0, -1.0);
            table[3 * n / 2] = Complex64::new(0.0, 1.0);
        }
        Self { period: period as i64, table }
    }

    /// `exp(-i pi q / n)` for any integer `q`.
    #[inline]
    pub(crate) fn minus(&self, q: i64) -> Complex64 {
        self.table[q.rem_euclid(self.period) as usize]
    }

    /// `exp(+i pi q / n)` for any integer `q`.
    #[inline]
    pub(crate) fn plus(&self, q: i64) -> Complex64 {
        self.minus(-q)
    }
}
