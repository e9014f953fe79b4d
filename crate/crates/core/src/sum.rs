use num_complex::Complex64;

/// Neumaier-compensated complex accumulator. Lattice integrals are summed
/// row-major through one of these so serial and parallel callers agree.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

#[inline]
fn step((sum, comp): (f64, f64), v: f64) -> (f64, f64) {
    let t = sum + v;
    let c = if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
    (t, comp + c)
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re = step(self.re, v.re);
        self.im = step(self.im, v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_digits() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        let acc: CompensatedSum = vals.iter().map(|&v| Complex64::new(v, -v)).collect();
        assert_eq!(acc.value(), Complex64::new(2.0, -2.0));
    }
}
