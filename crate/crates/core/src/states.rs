//! Catalogue of analytically known test states.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::wavefunction::WaveFunction;

pub const MAX_HERMITE_INDEX: usize = 10;

/// Fraction of the grid half-extent (and of the resolved momentum half-band)
/// that a state centre may occupy.
pub const CENTER_MARGIN: f64 = 0.6;

/// k-th eigenfunction of `(x^2 + p^2)/2` (m = omega = 1), eigenvalue
/// `hbar (k + 1/2)`.
pub fn hermite_state(k: usize, grid: &SpatialGrid) -> Result<WaveFunction> {
    if k > MAX_HERMITE_INDEX {
        return Err(Error::IndexTooHigh(k));
    }
    let hbar = grid.hbar();
    let amp0 = (PI * hbar).powf(-0.25);
    let amplitudes = (0..grid.num_points())
        .map(|j| {
            let xi = grid.x(j) / hbar.sqrt();
            Complex64::new(hermite_function(k, xi) * amp0, 0.0)
        })
        .collect();
    WaveFunction::new(*grid, amplitudes)
}

/// Normalised Hermite function of the dimensionless coordinate, without the
/// `(pi hbar)^(-1/4)` factor, via the three-term recurrence
/// `h_{k+1} = sqrt(2/(k+1)) xi h_k - sqrt(k/(k+1)) h_{k-1}`.
fn hermite_function(k: usize, xi: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = (-xi * xi / 2.0).exp();
    for n in 0..k {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_center(grid: &SpatialGrid, x0: f64, p0: f64) -> Result<()> {
    let x_lim = CENTER_MARGIN * grid.extent() / 2.0;
    let p_lim = CENTER_MARGIN * PI * grid.hbar() / (2.0 * grid.dx());
    if !x0.is_finite() || x0.abs() > x_lim {
        return Err(Error::CenterTooFarOut(x0));
    }
    if !p0.is_finite() || p0.abs() > p_lim {
        return Err(Error::CenterTooFarOut(p0));
    }
    Ok(())
}

/// Ground state displaced to `(x0, p0)`:
/// `exp(i (p0 x - p0 x0 / 2) / hbar) psi_0(x - x0)`.
pub fn coherent_state(x0: f64, p0: f64, grid: &SpatialGrid) -> Result<WaveFunction> {
    check_center(grid, x0, p0)?;
    let hbar = grid.hbar();
    let amp0 = (PI * hbar).powf(-0.25);
    Ok(WaveFunction::from_fn(*grid, |x| {
        let env = amp0 * (-(x - x0).powi(2) / (2.0 * hbar)).exp();
        let th = (p0 * x - p0 * x0 / 2.0) / hbar;
        Complex64::new(env * th.cos(), env * th.sin())
    }))
}

/// Normalised `coherent(alpha, 0) + exp(i phase) coherent(-alpha, 0)`.
pub fn cat_state(alpha: f64, phase: f64, grid: &SpatialGrid) -> Result<WaveFunction> {
    let right = coherent_state(alpha, 0.0, grid)?;
    let left = coherent_state(-alpha, 0.0, grid)?;
    let sum = right.add(&left.scaled(Complex64::from_polar(1.0, phase)))?;
    if sum.norm() < 1e-12 {
        return Err(Error::ZeroNorm);
    }
    sum.normalized()
}

/// Plane wave `exp(i p0 x / hbar)` under a normalised Gaussian window of
/// width `width` centred at `center`.
pub fn plane_wave_windowed(p0: f64, center: f64, width: f64, grid: &SpatialGrid) -> Result<WaveFunction> {
    check_center(grid, center, p0)?;
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::Parse(format!("window width must be positive, got {width}")));
    }
    let hbar = grid.hbar();
    WaveFunction::from_fn(*grid, |x| {
        let env = (-(x - center).powi(2) / (2.0 * width * width)).exp();
        Complex64::from_polar(env, p0 * x / hbar)
    })
    .normalized()
}

/// Serializable description of a catalogue state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Hermite {
        k: usize,
    },
    Coherent {
        x0: f64,
        p0: f64,
    },
    Cat {
        alpha: f64,
        #[serde(default)]
        phase: f64,
    },
    PlaneWaveWindowed {
        p0: f64,
        #[serde(default)]
        center: f64,
        width: f64,
    },
    CustomCsv {
        path: PathBuf,
    },
}

impl StateSpec {
    pub fn build(&self, grid: &SpatialGrid) -> Result<WaveFunction> {
        match self {
            StateSpec::Hermite { k } => hermite_state(*k, grid),
            StateSpec::Coherent { x0, p0 } => coherent_state(*x0, *p0, grid),
            StateSpec::Cat { alpha, phase } => cat_state(*alpha, *phase, grid),
            StateSpec::PlaneWaveWindowed { p0, center, width } => plane_wave_windowed(*p0, *center, *width, grid),
            StateSpec::CustomCsv { path } => {
                let file = std::fs::File::open(path)?;
                WaveFunction::read_csv(*grid, std::io::BufReader::new(file))
            }
        }
    }

    /// Parses the short form used on the command line: `hermite:K`,
    /// `coherent:X0,P0`, `cat:ALPHA[,PHASE]`, `plane:P0,CENTER,WIDTH`,
    /// `csv:PATH`.
    pub fn parse_short(text: &str) -> Result<Self> {
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("state `{text}`: {e}"))))
                .collect()
        };
        let want = |v: &[f64], lo: usize, hi: usize| -> Result<()> {
            if v.len() < lo || v.len() > hi {
                return Err(Error::Parse(format!("state `{text}`: wrong number of parameters")));
            }
            Ok(())
        };
        match kind.trim() {
            "hermite" | "ground" => {
                if kind.trim() == "ground" {
                    return Ok(StateSpec::Hermite { k: 0 });
                }
                let k = args.trim().parse::<usize>().map_err(|e| Error::Parse(format!("state `{text}`: {e}")))?;
                Ok(StateSpec::Hermite { k })
            }
            "coherent" => {
                let v = nums()?;
                want(&v, 2, 2)?;
                Ok(StateSpec::Coherent { x0: v[0], p0: v[1] })
            }
            "cat" => {
                let v = nums()?;
                want(&v, 1, 2)?;
                Ok(StateSpec::Cat { alpha: v[0], phase: v.get(1).copied().unwrap_or(0.0) })
            }
            "plane" => {
                let v = nums()?;
                want(&v, 3, 3)?;
                Ok(StateSpec::PlaneWaveWindowed { p0: v[0], center: v[1], width: v[2] })
            }
            "csv" => Ok(StateSpec::CustomCsv { path: PathBuf::from(args.trim()) }),
            other => Err(Error::Parse(format!("unknown state kind `{other}`"))),
        }
    }
}
