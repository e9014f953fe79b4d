//! Cross-Wigner and cross-ambiguity transforms, marginals and the symplectic
//! Fourier transform.
//!
//! The cross-Wigner transform is evaluated by direct lag quadrature
//!
//! ```text
//! W(x̄, p) = (2 pi hbar)^-1  sum_d  exp(-i p d dx / hbar) psi_a conj(phi_b) 2 dx
//! ```
//!
//! over grid index pairs `a + b = c`, `a - b = d` with midpoint `x̄` at `c`
//! half-steps. Lags `d` and `-d` are added as a pair, so swapping the two
//! states conjugates the result bit for bit and the diagonal is exactly real.
//! Rows are independent and each row is summed in a fixed order, so the rayon
//! row parallelism does not change any bit of the output.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{CentredDft, Direction, Twiddles};
use crate::phase_space::{Kind, Lattice, PhaseSpaceFunction};
use crate::sum::CompensatedSum;
use crate::wavefunction::WaveFunction;

fn check_pair(psi: &WaveFunction, phi: &WaveFunction) -> Result<()> {
    psi.grid().check_same(phi.grid())?;
    psi.check_boundary_decay()?;
    phi.check_boundary_decay()
}

/// Cross-Wigner transform `W_{psi,phi}` on the Wigner lattice.
pub fn cross_wigner(psi: &WaveFunction, phi: &WaveFunction) -> Result<PhaseSpaceFunction> {
    cross_wigner_on(psi, phi, &Lattice::wigner(psi.grid()))
}

/// Wigner distribution `W_psi = W_{psi,psi}`.
pub fn wigner(psi: &WaveFunction) -> Result<PhaseSpaceFunction> {
    Ok(cross_wigner(psi, psi)?.with_kind(Kind::Wigner))
}

/// Cross-Wigner transform sampled on `lattice`, which must have p step
/// `dp/2` and x step `dx` or `dx/2`. Momenta outside the resolved band are set
/// to zero; the resolved band is
/// `-pi hbar / (2 dx) <= p < pi hbar / (2 dx)`.
pub fn cross_wigner_on(psi: &WaveFunction, phi: &WaveFunction, lattice: &Lattice) -> Result<PhaseSpaceFunction> {
    check_pair(psi, phi)?;
    let grid = psi.grid();
    grid.check_same(lattice.grid())?;
    let n = grid.num_points() as i64;
    let x_ok = (lattice.x_step() - grid.dx()).abs() < 1e-12 * grid.dx()
        || (lattice.x_step() - grid.dx() / 2.0).abs() < 1e-12 * grid.dx();
    let p_ok = (lattice.p_step() - grid.dp() / 2.0).abs() < 1e-12 * grid.dp();
    if !(x_ok && p_ok) {
        return Err(Error::LatticeMismatch(format!(
            "cross-Wigner needs x step dx or dx/2 and p step dp/2, got {}",
            lattice.describe()
        )));
    }

    let tw = Twiddles::new(2 * grid.num_points());
    let psi_a = psi.amplitudes();
    let phi_a = phi.amplitudes();
    let prefactor = grid.dx() / (PI * grid.hbar());
    let np = lattice.np();

    let rows: Vec<Vec<Complex64>> = (0..lattice.nx())
        .into_par_iter()
        .map(|i| {
            let c = lattice.x_half(i) + n;
            let mut row = vec![Complex64::new(0.0, 0.0); np];
            if c < 0 || c > 2 * n - 2 {
                return row;
            }
            // (d, psi_a phi_b*, psi_b phi_a*) for a = (c+d)/2, b = (c-d)/2
            let centre = (c % 2 == 0).then(|| {
                let j = (c / 2) as usize;
                psi_a[j] * phi_a[j].conj()
            });
            let mut pairs = Vec::new();
            let mut d = if c % 2 == 0 { 2 } else { 1 };
            loop {
                let a = (c + d) / 2;
                let b = (c - d) / 2;
                if a >= n || b < 0 {
                    break;
                }
                let (a, b) = (a as usize, b as usize);
                pairs.push((d, psi_a[a] * phi_a[b].conj(), psi_a[b] * phi_a[a].conj()));
                d += 2;
            }
            for (k, out) in row.iter_mut().enumerate() {
                let hp = lattice.p_half(k);
                if hp < -n / 2 || hp >= n / 2 {
                    continue;
                }
                let mut acc = CompensatedSum::new();
                if let Some(v) = centre {
                    acc.add(v);
                }
                for &(d, fwd, bwd) in &pairs {
                    let q = 2 * hp * d;
                    acc.add(tw.minus(q) * fwd + tw.plus(q) * bwd);
                }
                *out = acc.value() * prefactor;
            }
            row
        })
        .collect();

    PhaseSpaceFunction::new(*lattice, Kind::CrossWigner, rows.concat())
}

fn check_marginal_kind(f: &PhaseSpaceFunction) -> Result<()> {
    match f.kind() {
        Kind::Wigner | Kind::CrossWigner | Kind::Rho => Ok(()),
        other => Err(Error::KindMismatch { expected: "wigner or cross_wigner", found: other.name() }),
    }
}

/// `x_i -> sum_k F(x_i, p_k) dp`, one value per lattice column.
pub fn marginal_p(f: &PhaseSpaceFunction) -> Result<Vec<Complex64>> {
    check_marginal_kind(f)?;
    let step = f.lattice().p_step();
    Ok((0..f.lattice().nx()).map(|i| f.row(i).iter().copied().collect::<CompensatedSum>().value() * step).collect())
}

/// `p_k -> sum_i F(x_i, p_k) dx`, one value per lattice row.
pub fn marginal_x(f: &PhaseSpaceFunction) -> Result<Vec<Complex64>> {
    check_marginal_kind(f)?;
    let l = f.lattice();
    let step = l.x_step();
    Ok((0..l.np()).map(|k| (0..l.nx()).map(|i| f.get(i, k)).collect::<CompensatedSum>().value() * step).collect())
}

/// Symplectic Fourier transform
///
/// `F_s F(X, P) = (2 pi hbar)^-1 sum exp(-i (P x - X p) / hbar) F(x, p) dx dp`,
///
/// returned on the dual lattice. Applying it twice returns the input on the
/// original lattice.
pub fn symplectic_fourier(f: &PhaseSpaceFunction) -> PhaseSpaceFunction {
    let l = *f.lattice();
    let dual = l.dual();
    let (nx, np) = (l.nx(), l.np());
    let scale = l.cell_area() / (2.0 * PI * l.grid().hbar());

    // p -> X: inverse centred DFT along each position row
    let inv = CentredDft::new(np, Direction::Inverse);
    let mut stage: Vec<Complex64> = f.values().to_vec();
    stage.par_chunks_mut(np).for_each(|row| inv.process(row));

    // x -> P: forward centred DFT along each column, written transposed
    let fwd = CentredDft::new(nx, Direction::Forward);
    let out_rows: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|b| {
            let mut col: Vec<Complex64> = (0..nx).map(|i| stage[i * np + b]).collect();
            fwd.process(&mut col);
            col.iter_mut().for_each(|v| *v *= scale);
            col
        })
        .collect();

    let kind = match f.kind() {
        Kind::Wigner | Kind::CrossWigner => Kind::Ambiguity,
        Kind::Ambiguity => Kind::CrossWigner,
        other => other,
    };
    PhaseSpaceFunction::new(dual, kind, out_rows.concat()).expect("dual lattice shape")
}

/// Cross-ambiguity function
///
/// `A(X, P) = (2 pi hbar)^-1 sum_j exp(-i P x_j / hbar) psi(x_j + X/2) conj(phi(x_j - X/2)) dx`
///
/// on the dual of the Wigner lattice (`X` step `2 dx`, `P` step `dp`).
pub fn cross_ambiguity(psi: &WaveFunction, phi: &WaveFunction) -> Result<PhaseSpaceFunction> {
    check_pair(psi, phi)?;
    let grid = psi.grid();
    let n = grid.num_points();
    let lattice = Lattice::wigner(grid).dual();
    let dft = CentredDft::new(n, Direction::Forward);
    let scale = grid.dx() / (2.0 * PI * grid.hbar());
    let rows: Vec<Vec<Complex64>> = (0..lattice.nx())
        .into_par_iter()
        .map(|b| {
            let r = b as i64 - (n / 2) as i64;
            let mut g: Vec<Complex64> = (0..n as i64).map(|j| psi.at(j + r) * phi.at(j - r).conj()).collect();
            dft.process(&mut g);
            g.iter_mut().for_each(|v| *v *= scale);
            g
        })
        .collect();
    PhaseSpaceFunction::new(lattice, Kind::Ambiguity, rows.concat())
}

/// Sup-norm of `W_{psi+phi} - W_phi - W_psi - 2 Re W_{psi,phi}`.
pub fn superposition_identity_check(psi: &WaveFunction, phi: &WaveFunction) -> Result<f64> {
    let sum = psi.add(phi)?;
    let w_sum = cross_wigner(&sum, &sum)?;
    let w_psi = cross_wigner(psi, psi)?;
    let w_phi = cross_wigner(phi, phi)?;
    let w_cross = cross_wigner(psi, phi)?;
    let mut worst: f64 = 0.0;
    for idx in 0..w_sum.values().len() {
        let r = w_sum.values()[idx] - w_phi.values()[idx] - w_psi.values()[idx] - 2.0 * w_cross.values()[idx].re;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}
