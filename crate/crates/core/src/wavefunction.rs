//! Sampled wavefunctions, discrete inner products and the unitary
//! hbar-Fourier transform.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{CentredDft, Direction};
use crate::grid::SpatialGrid;

/// Relative amplitude allowed at the first and last grid point of a state
/// that is fed to a transform.
pub const BOUNDARY_DECAY: f64 = 1e-8;

/// Tolerance on `|‖psi‖² - 1|` for a state to count as normalised.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Complex amplitudes `psi(x_j)` on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.num_points() {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.num_points()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = (0..grid.num_points()).map(|j| f(grid.x(j))).collect();
        Self { grid, amplitudes }
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self { grid, amplitudes: vec![Complex64::new(0.0, 0.0); grid.num_points()] }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude at grid index `j`; indices outside the grid read as zero.
    #[inline]
    pub fn at(&self, j: i64) -> Complex64 {
        if j < 0 || j >= self.amplitudes.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[j as usize]
        }
    }

    /// Discrete squared norm `sum_j |psi_j|^2 dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, amplitudes: self.amplitudes.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &WaveFunction) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let amplitudes = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, amplitudes })
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Sup-norm distance to another state on the same grid.
    pub fn sup_distance(&self, other: &WaveFunction) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Zero-extension precondition: the end samples are negligible.
    pub fn check_boundary_decay(&self) -> Result<()> {
        let peak = self.max_abs();
        let edge = self.amplitudes[0].norm().max(self.amplitudes[self.len() - 1].norm());
        if edge > BOUNDARY_DECAY * peak {
            return Err(Error::BoundaryLeak(format!(
                "edge amplitude {edge:e} exceeds {BOUNDARY_DECAY:e} x peak {peak:e}"
            )));
        }
        Ok(())
    }

    /// `psi^(p)` at an arbitrary momentum by direct quadrature of
    /// `(2 pi hbar)^(-1/2) sum_j exp(-i p x_j / hbar) psi_j dx`.
    pub fn fourier_at(&self, p: f64) -> Complex64 {
        let hbar = self.grid.hbar();
        let sum: Complex64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let th = -p * self.grid.x(j) / hbar;
                a * Complex64::new(th.cos(), th.sin())
            })
            .sum();
        sum * (self.grid.dx() / (2.0 * PI * hbar).sqrt())
    }

    /// Unitary hbar-Fourier transform onto the conjugate momentum grid.
    pub fn hbar_fourier(&self) -> Result<MomentumWaveFunction> {
        self.check_boundary_decay()?;
        Ok(self.hbar_fourier_unchecked())
    }

    pub(crate) fn hbar_fourier_unchecked(&self) -> MomentumWaveFunction {
        let mut buf = self.amplitudes.clone();
        CentredDft::new(buf.len(), Direction::Forward).process(&mut buf);
        let scale = self.grid.dx() / (2.0 * PI * self.grid.hbar()).sqrt();
        buf.iter_mut().for_each(|v| *v *= scale);
        MomentumWaveFunction { grid: self.grid, amplitudes: buf }
    }

    /// Writes the `x,re,im` CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,re,im")?;
        for (j, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.grid.x(j), a.re, a.im)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    /// Reads the `x,re,im` CSV; the positions must match `grid`.
    pub fn read_csv<R: BufRead>(grid: SpatialGrid, input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty wavefunction csv".into()))??;
        if header.trim() != "x,re,im" {
            return Err(Error::Parse(format!("expected header `x,re,im`, found `{}`", header.trim())));
        }
        let mut amplitudes = Vec::with_capacity(grid.num_points());
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 fields", row + 2)));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: `{s}`: {e}", row + 2)));
            let (x, re, im) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            let j = amplitudes.len();
            if j >= grid.num_points() {
                return Err(Error::Parse(format!("more than {} rows", grid.num_points())));
            }
            if (x - grid.x(j)).abs() > 1e-9 * grid.dx().max(1.0) {
                return Err(Error::Parse(format!("row {}: x = {x} does not match grid point {}", row + 2, grid.x(j))));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::Parse(format!("row {}: non-finite amplitude", row + 2)));
            }
            amplitudes.push(Complex64::new(re, im));
        }
        if amplitudes.len() != grid.num_points() {
            return Err(Error::Parse(format!(
                "found {} rows, grid has {} points",
                amplitudes.len(),
                grid.num_points()
            )));
        }
        Ok(Self { grid, amplitudes })
    }
}

/// Momentum-space amplitudes `psi^(p_k)` on the conjugate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWaveFunction {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
}

impl MomentumWaveFunction {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dp()
    }

    /// Inverse transform back to position space.
    pub fn inverse(&self) -> WaveFunction {
        let mut buf = self.amplitudes.clone();
        CentredDft::new(buf.len(), Direction::Inverse).process(&mut buf);
        let scale = self.grid.dp() / (2.0 * PI * self.grid.hbar()).sqrt();
        buf.iter_mut().for_each(|v| *v *= scale);
        WaveFunction { grid: self.grid, amplitudes: buf }
    }

    /// `sum_k conj(a_k) b_k dp`.
    pub fn inner_product(&self, other: &MomentumWaveFunction) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        let s: Complex64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dp())
    }
}

/// Discrete `<phi|psi> = sum_j conj(phi_j) psi_j dx`.
pub fn inner_product(phi: &WaveFunction, psi: &WaveFunction) -> Result<Complex64> {
    phi.grid.check_same(&psi.grid)?;
    let s: Complex64 = phi.amplitudes.iter().zip(&psi.amplitudes).map(|(a, b)| a.conj() * b).sum();
    Ok(s * phi.grid.dx())
}

/// `|<a|b>| / (‖a‖ ‖b‖)`.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    let ov = inner_product(a, b)?;
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(ov.norm() / denom)
}
