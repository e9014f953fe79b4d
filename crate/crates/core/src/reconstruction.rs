//! Recovering a pre-selected state from weak values or from its
//! cross-Wigner transform.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::phase_space::{Kind, Lattice, PhaseSpaceFunction};
use crate::sum::CompensatedSum;
use crate::transforms::cross_wigner_on;
use crate::wavefunction::{inner_product, WaveFunction};

/// Smallest admissible `|psi^(p0)|` for the Lundeen procedure.
pub const MOMENTUM_AMPLITUDE_THRESHOLD: f64 = 1e-8;
/// Smallest admissible `|<phi|lambda>|`.
pub const AUXILIARY_OVERLAP_THRESHOLD: f64 = 1e-8;
/// Smallest admissible `|phi(x_ref)|` relative to `max |phi|`.
pub const REFERENCE_AMPLITUDE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lundeen,
    FourierInversion,
    GrAuxiliary,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Lundeen => "lundeen",
            Method::FourierInversion => "fourier_inversion",
            Method::GrAuxiliary => "gr_auxiliary",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub reconstructed: WaveFunction,
    /// `|<true|rec>| / (|true| |rec|)`
    pub fidelity: f64,
    /// Unit number `g` with `true / |true| ~ g rec / |rec|`.
    pub global_phase: Complex64,
    pub method: Method,
    /// Set when the reconstruction is only determined up to a complex factor.
    pub up_to_constant: bool,
}

impl ReconstructionReport {
    pub fn compare(
        reconstructed: WaveFunction,
        truth: &WaveFunction,
        method: Method,
        up_to_constant: bool,
    ) -> Result<Self> {
        let ov = inner_product(&reconstructed, truth)?;
        let denom = reconstructed.norm() * truth.norm();
        let fidelity = if denom > 0.0 { ov.norm() / denom } else { 0.0 };
        let global_phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
        Ok(Self { reconstructed, fidelity, global_phase, method, up_to_constant })
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    method: Method,
    fidelity: f64,
    global_phase_re: f64,
    global_phase_im: f64,
    up_to_constant: bool,
    state_csv: &'a str,
}

impl Serialize for ReconstructionReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let csv = self.reconstructed.to_csv_string();
        ReportJson {
            method: self.method,
            fidelity: self.fidelity,
            global_phase_re: self.global_phase.re,
            global_phase_im: self.global_phase.im,
            up_to_constant: self.up_to_constant,
            state_csv: &csv,
        }
        .serialize(s)
    }
}

/// A prepared state seen only through weak measurements of the position
/// projectors `|x_j><x_j|`, post-selected on the momentum eigenstate `|p0>`.
pub struct LundeenOracle {
    psi: WaveFunction,
    post: WaveFunction,
    overlap: Complex64,
    p0: f64,
}

impl LundeenOracle {
    pub fn new(psi: &WaveFunction, p0: f64) -> Result<Self> {
        let amp = psi.fourier_at(p0).norm() / psi.norm();
        if amp < MOMENTUM_AMPLITUDE_THRESHOLD {
            return Err(Error::SmallMomentumAmplitude(amp));
        }
        let grid = *psi.grid();
        let post = WaveFunction::from_fn(grid, |x| Complex64::from_polar(1.0, p0 * x / grid.hbar()));
        let overlap = inner_product(&post, psi)?;
        Ok(Self { psi: psi.clone(), post, overlap, p0 })
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.psi.grid()
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Weak value of `|x_j><x_j|`.
    pub fn weak_value(&self, j: usize) -> Complex64 {
        let dx = self.grid().dx();
        self.post.amplitudes()[j].conj() * self.psi.amplitudes()[j] * dx / self.overlap
    }
}

/// `psi(x) ∝ e^{i p0 x / hbar} <Pi_x>_w`, normalized. The result equals the
/// prepared state up to a global phase.
pub fn lundeen_reconstruct(oracle: &LundeenOracle) -> Result<WaveFunction> {
    let grid = *oracle.grid();
    let amplitudes = (0..grid.num_points())
        .map(|j| Complex64::from_polar(1.0, oracle.p0() * grid.x(j) / grid.hbar()) * oracle.weak_value(j))
        .collect();
    WaveFunction::new(grid, amplitudes)?.normalized()
}

pub fn lundeen_report(truth: &WaveFunction, p0: f64) -> Result<ReconstructionReport> {
    let rec = lundeen_reconstruct(&LundeenOracle::new(truth, p0)?)?;
    ReconstructionReport::compare(rec, truth, Method::Lundeen, true)
}

/// Unit phase `e^{i pi q / (2N)}` for integer `q`.
fn phase_table(n: usize) -> impl Fn(i64) -> Complex64 {
    let m = 4 * n as i64;
    let table: Vec<Complex64> = (0..m).map(|q| Complex64::from_polar(1.0, PI * q as f64 / (2 * n) as f64)).collect();
    move |q| table[q.rem_euclid(m) as usize]
}

/// `psi(x) phi*(x_ref) = sum_p e^{i p (x - x_ref) / hbar} W((x + x_ref)/2, p) dp`
/// for every grid point `x`. Entries whose midpoint is not a lattice column
/// are `None`.
pub fn invert_cross_wigner(w: &PhaseSpaceFunction, x_ref: f64) -> Result<Vec<Option<Complex64>>> {
    if !matches!(w.kind(), Kind::Wigner | Kind::CrossWigner) {
        return Err(Error::KindMismatch { expected: "cross_wigner", found: w.kind().name() });
    }
    let lattice = *w.lattice();
    let grid = *lattice.grid();
    let n = grid.num_points();
    let l_ref = grid.index_of(x_ref).ok_or(Error::OffGrid(x_ref))?;
    let phase = phase_table(n);
    let x_unit = lattice.x_half(1) - lattice.x_half(0);
    Ok((0..n)
        .map(|l| {
            let m = l as i64 + l_ref as i64 - n as i64;
            if m.rem_euclid(x_unit) != 0 {
                return None;
            }
            let i = m / x_unit + (lattice.nx() / 2) as i64;
            if i < 0 || i >= lattice.nx() as i64 {
                return None;
            }
            let shift = 2 * (l as i64 - l_ref as i64);
            let row = w.row(i as usize);
            let s: CompensatedSum =
                row.iter().enumerate().map(|(k, &v)| phase(lattice.p_half(k) * shift) * v).collect();
            Some(s.value() * lattice.p_step())
        })
        .collect())
}

/// Like [`invert_cross_wigner`] but reports the parity failure for a given `x`.
pub fn invert_cross_wigner_at(w: &PhaseSpaceFunction, x: f64, x_ref: f64) -> Result<Complex64> {
    let grid = *w.grid();
    let l = grid.index_of(x).ok_or(Error::OffGrid(x))?;
    let l_ref = grid.index_of(x_ref).ok_or(Error::OffGrid(x_ref))?;
    invert_cross_wigner(w, x_ref)?[l].ok_or(Error::NodeParity { x: l, x_ref: l_ref })
}

/// Recovers `psi` from `W_{psi,phi}` sampled on the fine lattice and the
/// known post-selected state.
pub fn inversion_reconstruct(w: &PhaseSpaceFunction, phi: &WaveFunction, x_ref: f64) -> Result<WaveFunction> {
    let grid = *w.grid();
    let l_ref = grid.index_of(x_ref).ok_or(Error::OffGrid(x_ref))?;
    let amp = phi.amplitudes()[l_ref].norm();
    if amp < REFERENCE_AMPLITUDE_THRESHOLD * phi.max_abs() {
        return Err(Error::SmallReferenceAmplitude(amp));
    }
    let divisor = phi.amplitudes()[l_ref].conj();
    let amplitudes = invert_cross_wigner(w, x_ref)?
        .into_iter()
        .enumerate()
        .map(|(l, v)| v.map(|v| v / divisor).ok_or(Error::NodeParity { x: l, x_ref: l_ref }))
        .collect::<Result<Vec<_>>>()?;
    WaveFunction::new(grid, amplitudes)
}

pub fn inversion_report(truth: &WaveFunction, phi: &WaveFunction, x_ref: f64) -> Result<ReconstructionReport> {
    let w = cross_wigner_on(truth, phi, &Lattice::fine(truth.grid()))?;
    let rec = inversion_reconstruct(&w, phi, x_ref)?;
    ReconstructionReport::compare(rec, truth, Method::FourierInversion, false)
}

/// `psi(x) = 2 <phi|lambda>^-1 sum W_{psi,phi}(y, p) [T_GR(y, p) lambda](x) dy dp`.
///
/// Without the overlap the profile is returned with the factor `<phi|lambda>`
/// left in, so it is correct only up to a constant.
pub fn gr_reconstruct(
    w: &PhaseSpaceFunction,
    lambda: &WaveFunction,
    overlap_phi_lambda: Option<Complex64>,
) -> Result<WaveFunction> {
    if !matches!(w.kind(), Kind::Wigner | Kind::CrossWigner) {
        return Err(Error::KindMismatch { expected: "cross_wigner", found: w.kind().name() });
    }
    let lattice = *w.lattice();
    let grid = *lattice.grid();
    if !grid.same_as(lambda.grid()) {
        return Err(Error::GridMismatch);
    }
    lambda.check_boundary_decay()?;
    let overlap = match overlap_phi_lambda {
        Some(ov) if ov.norm() < AUXILIARY_OVERLAP_THRESHOLD => return Err(Error::OrthogonalAuxiliary(ov.norm())),
        Some(ov) => ov,
        None => Complex64::new(1.0, 0.0),
    };
    let n = grid.num_points() as i64;
    let phase = phase_table(grid.num_points());
    let lam = lambda.amplitudes();
    let scale = 2.0 * lattice.cell_area() / overlap;
    let amplitudes: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|l| {
            let hx = 2 * (l - n / 2);
            let mut acc = CompensatedSum::new();
            for i in 0..lattice.nx() {
                let hy = lattice.x_half(i);
                let src_half = 2 * hy - hx;
                if src_half.rem_euclid(2) != 0 {
                    continue;
                }
                let src = src_half / 2 + n / 2;
                if src < 0 || src >= n {
                    continue;
                }
                let lv = lam[src as usize];
                let row = w.row(i);
                let mut inner = CompensatedSum::new();
                for (k, &v) in row.iter().enumerate() {
                    inner.add(v * phase(2 * lattice.p_half(k) * (hx - hy)));
                }
                acc.add(inner.value() * lv);
            }
            acc.value() * scale
        })
        .collect();
    WaveFunction::new(grid, amplitudes)
}

/// The same reconstruction from `rho = W / <phi|psi>` and the overlap
/// `<phi|psi>`.
pub fn gr_reconstruct_rho(
    rho: &PhaseSpaceFunction,
    overlap_phi_psi: Complex64,
    lambda: &WaveFunction,
    overlap_phi_lambda: Option<Complex64>,
) -> Result<WaveFunction> {
    if rho.kind() != Kind::Rho {
        return Err(Error::KindMismatch { expected: "rho", found: rho.kind().name() });
    }
    gr_reconstruct(&rho.scaled(overlap_phi_psi).with_kind(Kind::CrossWigner), lambda, overlap_phi_lambda)
}

pub fn gr_report(
    truth: &WaveFunction,
    phi: &WaveFunction,
    lambda: &WaveFunction,
    known_overlap: bool,
) -> Result<ReconstructionReport> {
    let w = cross_wigner_on(truth, phi, &Lattice::wigner(truth.grid()))?;
    let overlap = known_overlap.then(|| inner_product(phi, lambda)).transpose()?;
    let rec = gr_reconstruct(&w, lambda, overlap)?;
    let rec = if known_overlap { rec } else { rec.normalized()? };
    ReconstructionReport::compare(rec, truth, Method::GrAuxiliary, !known_overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent_state, hermite_state};
    use crate::transforms::{cross_wigner, marginal_p, wigner};

    fn g() -> SpatialGrid {
        SpatialGrid::reference()
    }

    #[test]
    fn lundeen_ground_and_coherent() {
        let grid = g();
        let r = lundeen_report(&hermite_state(0, &grid).unwrap(), 0.0).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-9);
        let p0 = grid.nearest_momentum(2.0);
        let r = lundeen_report(&coherent_state(1.0, 2.0, &grid).unwrap(), p0).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-9, "{}", r.fidelity);
        assert!(r.fidelity <= 1.0 + 1e-12);
    }

    #[test]
    fn lundeen_odd_state_at_zero_momentum_is_rejected() {
        let psi = hermite_state(1, &g()).unwrap();
        assert!(matches!(lundeen_report(&psi, 0.0), Err(Error::SmallMomentumAmplitude(_))));
    }

    #[test]
    fn inversion_of_ground_wigner() {
        let grid = g();
        let w = wigner(&hermite_state(0, &grid).unwrap()).unwrap();
        let vals = invert_cross_wigner(&w, 0.0).unwrap();
        let mut seen = 0;
        for (l, v) in vals.iter().enumerate() {
            let x = grid.x(l);
            match v {
                Some(v) => {
                    seen += 1;
                    let want = (-x * x / 2.0).exp() / PI.sqrt();
                    assert!((v - Complex64::new(want, 0.0)).norm() < 1e-10, "x={x}");
                }
                None => assert!(l % 2 == 1),
            }
        }
        assert_eq!(seen, grid.num_points() / 2);
        assert!(matches!(invert_cross_wigner_at(&w, grid.x(1), 0.0), Err(Error::NodeParity { .. })));
    }

    #[test]
    fn diagonal_inversion_is_the_p_marginal() {
        let grid = g();
        let w = cross_wigner(&hermite_state(1, &grid).unwrap(), &coherent_state(1.0, 0.5, &grid).unwrap()).unwrap();
        let marg = marginal_p(&w).unwrap();
        for l in (0..grid.num_points()).step_by(17) {
            let v = invert_cross_wigner_at(&w, grid.x(l), grid.x(l)).unwrap();
            assert!((v - marg[l]).norm() < 1e-12);
        }
    }

    #[test]
    fn fine_lattice_inversion_recovers_everything() {
        let grid = g();
        let psi = hermite_state(1, &grid).unwrap();
        let phi = hermite_state(0, &grid).unwrap();
        let r = inversion_report(&psi, &phi, 0.0).unwrap();
        assert!(r.reconstructed.sup_distance(&psi).unwrap() < 1e-9);
        assert!(matches!(inversion_report(&psi, &psi, 0.0), Err(Error::SmallReferenceAmplitude(_))));
    }

    #[test]
    fn gr_recovers_ground_exactly() {
        let grid = g();
        let psi = hermite_state(0, &grid).unwrap();
        let lam = coherent_state(1.0, 0.0, &grid).unwrap();
        let r = gr_report(&psi, &psi, &lam, true).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-6);
        assert!(r.reconstructed.sup_distance(&psi).unwrap() < 1e-5);
    }

    #[test]
    fn gr_rejects_orthogonal_auxiliary() {
        let grid = g();
        let w = wigner(&hermite_state(0, &grid).unwrap()).unwrap();
        let lam = hermite_state(1, &grid).unwrap();
        assert!(matches!(
            gr_reconstruct(&w, &lam, Some(Complex64::new(1e-12, 0.0))),
            Err(Error::OrthogonalAuxiliary(_))
        ));
    }
}
