//! Dense grid operators: displacements, reflections, Weyl quantization and
//! the operator-from-symbol integrals.
//!
//! A [`LinearOperator`] acts on amplitude vectors by `(A psi)_j = sum_l M_jl psi_l`.
//! The displacement and reflection *matrices* wrap indices periodically, which
//! makes them exactly unitary. The `*_apply` forms zero-extend instead and are
//! the ones used inside phase-space quadratures.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Twiddles;
use crate::grid::SpatialGrid;
use crate::phase_space::{Kind, Lattice, PhaseSpaceFunction};
use crate::sum::CompensatedSum;
use crate::symbol::PolynomialSymbol;
use crate::symbolic::mccoy_order;
use crate::transforms::symplectic_fourier;
use crate::wavefunction::{inner_product, WaveFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    grid: SpatialGrid,
    matrix: DMatrix<Complex64>,
    unitary: bool,
}

impl LinearOperator {
    pub fn new(grid: SpatialGrid, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.num_points();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, matrix, unitary: false })
    }

    pub fn identity(grid: &SpatialGrid) -> Self {
        let n = grid.num_points();
        Self { grid: *grid, matrix: DMatrix::identity(n, n), unitary: true }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        self.grid.check_same(psi.grid())?;
        let v = DVector::from_column_slice(psi.amplitudes());
        let out = &self.matrix * v;
        WaveFunction::new(self.grid, out.as_slice().to_vec())
    }

    /// `<phi|A psi> = sum_j conj(phi_j) (A psi)_j dx`
    pub fn matrix_element(&self, phi: &WaveFunction, psi: &WaveFunction) -> Result<Complex64> {
        inner_product(phi, &self.apply(psi)?)
    }

    /// `self * other`
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.grid.check_same(&other.grid)?;
        Ok(Self { grid: self.grid, matrix: &self.matrix * &other.matrix, unitary: self.unitary && other.unitary })
    }

    pub fn adjoint(&self) -> LinearOperator {
        Self { grid: self.grid, matrix: self.matrix.adjoint(), unitary: self.unitary }
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator> {
        self.grid.check_same(&other.grid)?;
        Ok(Self { grid: self.grid, matrix: &self.matrix + &other.matrix, unitary: false })
    }

    pub fn scale(&self, c: Complex64) -> LinearOperator {
        Self { grid: self.grid, matrix: &self.matrix * c, unitary: false }
    }

    pub fn max_abs_diff(&self, other: &LinearOperator) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest entry difference restricted to rows and columns whose grid
    /// position satisfies `|x| <= radius`.
    pub fn max_abs_diff_interior(&self, other: &LinearOperator, radius: f64) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let idx: Vec<usize> = (0..self.grid.num_points()).filter(|&j| self.grid.x(j).abs() <= radius).collect();
        let mut worst: f64 = 0.0;
        for &r in &idx {
            for &c in &idx {
                worst = worst.max((self.matrix[(r, c)] - other.matrix[(r, c)]).norm());
            }
        }
        Ok(worst)
    }

    /// Largest difference of matrix elements `<b_r|A|b_c>` between two
    /// operators over a basis of states, i.e. the sup-norm of the difference
    /// compressed onto the span of `basis`.
    pub fn max_abs_diff_on(&self, other: &LinearOperator, basis: &[WaveFunction]) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let diff = LinearOperator { grid: self.grid, matrix: &self.matrix - &other.matrix, unitary: false };
        let mut worst: f64 = 0.0;
        for b in basis {
            let db = diff.apply(b)?;
            for a in basis {
                worst = worst.max(inner_product(a, &db)?.norm());
            }
        }
        Ok(worst)
    }

    /// `max |M - M^dagger|`
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `max |M^dagger M - I|`
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let n = prod.nrows();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let want = if r == c { ONE } else { ZERO };
                worst = worst.max((prod[(r, c)] - want).norm());
            }
        }
        worst
    }

    /// Sorted eigenvalues of a Hermitian operator.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

fn displacement_steps(grid: &SpatialGrid, x0: f64) -> Result<i64> {
    grid.steps_of(x0).ok_or(Error::OffGridShift(x0))
}

/// Reflection centre in units of `dx/2`.
fn reflection_half_steps(grid: &SpatialGrid, x0: f64) -> Result<i64> {
    let h = 2.0 * x0 / grid.dx();
    let r = h.round();
    if !x0.is_finite() || (h - r).abs() > 1e-9 {
        return Err(Error::OffGridReflection(x0));
    }
    Ok(r as i64)
}

/// Momentum in units of `dp/2` when it lies on that lattice.
fn momentum_half_steps(grid: &SpatialGrid, p0: f64) -> Option<i64> {
    let h = 2.0 * p0 / grid.dp();
    let r = h.round();
    ((h - r).abs() <= 1e-9).then_some(r as i64)
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Position of grid index `j` in units of `dx/2`.
fn half_position(grid: &SpatialGrid, j: i64) -> i64 {
    2 * j - grid.num_points() as i64
}

/// Phase factor `exp(i theta_j)` for every grid index, taken from the exact
/// table when `p0` lies on the `dp/2` lattice. `table_q(hp, h)` gives the
/// table index for position `h` (half steps) and momentum `hp` (half steps).
fn phases(
    grid: &SpatialGrid,
    p0: f64,
    table_q: impl Fn(i64, i64) -> i64,
    theta: impl Fn(f64) -> f64,
) -> Vec<Complex64> {
    let n = grid.num_points();
    match momentum_half_steps(grid, p0) {
        Some(hp) => {
            let tw = Twiddles::new(2 * n);
            (0..n as i64).map(|j| tw.plus(table_q(hp, half_position(grid, j)))).collect()
        }
        None => (0..n).map(|j| cis(theta(grid.x(j)))).collect(),
    }
}

/// Heisenberg displacement `(T psi)(x) = exp(i (p0 x - p0 x0 / 2) / hbar) psi(x - x0)`
/// as a unitary matrix with periodic index wrap.
pub fn heisenberg(x0: f64, p0: f64, grid: &SpatialGrid) -> Result<LinearOperator> {
    let m = displacement_steps(grid, x0)?;
    let n = grid.num_points();
    let ph = heisenberg_phases(grid, x0, p0, m);
    let mut matrix = DMatrix::from_element(n, n, ZERO);
    for (j, &phase) in ph.iter().enumerate() {
        let src = (j as i64 - m).rem_euclid(n as i64) as usize;
        matrix[(j, src)] = phase;
    }
    Ok(LinearOperator { grid: *grid, matrix, unitary: true })
}

fn heisenberg_phases(grid: &SpatialGrid, x0: f64, p0: f64, m: i64) -> Vec<Complex64> {
    let hbar = grid.hbar();
    // p0 (x - x0/2) / hbar = hp h' pi / (2N) with h' = h - m in half steps
    phases(grid, p0, |hp, h| hp * (h - m), |x| p0 * (x - x0 / 2.0) / hbar)
}

/// Zero-extended form of [`heisenberg`].
pub fn heisenberg_apply(psi: &WaveFunction, x0: f64, p0: f64) -> Result<WaveFunction> {
    let grid = psi.grid();
    let m = displacement_steps(grid, x0)?;
    let ph = heisenberg_phases(grid, x0, p0, m);
    let amps = ph.iter().enumerate().map(|(j, &phase)| phase * psi.at(j as i64 - m)).collect();
    WaveFunction::new(*grid, amps)
}

/// Grossmann-Royer reflection `(T_GR psi)(x) = exp(2i p0 (x - x0) / hbar) psi(2 x0 - x)`
/// with periodic index wrap. Requires `x0` to be a multiple of `dx/2`.
pub fn grossmann_royer(x0: f64, p0: f64, grid: &SpatialGrid) -> Result<LinearOperator> {
    let h0 = reflection_half_steps(grid, x0)?;
    let n = grid.num_points() as i64;
    let ph = gr_phases(grid, x0, p0, h0);
    let mut matrix = DMatrix::from_element(n as usize, n as usize, ZERO);
    for (j, &phase) in ph.iter().enumerate() {
        let src = (h0 - j as i64 + n).rem_euclid(n) as usize;
        matrix[(j, src)] = phase;
    }
    Ok(LinearOperator { grid: *grid, matrix, unitary: true })
}

fn gr_phases(grid: &SpatialGrid, x0: f64, p0: f64, h0: i64) -> Vec<Complex64> {
    let hbar = grid.hbar();
    // 2 p0 (x - x0) / hbar = 2 hp (h - h0) pi / (2N)
    phases(grid, p0, |hp, h| 2 * hp * (h - h0), |x| 2.0 * p0 * (x - x0) / hbar)
}

/// Zero-extended form of [`grossmann_royer`].
pub fn grossmann_royer_apply(psi: &WaveFunction, x0: f64, p0: f64) -> Result<WaveFunction> {
    let grid = psi.grid();
    let h0 = reflection_half_steps(grid, x0)?;
    let n = grid.num_points() as i64;
    let ph = gr_phases(grid, x0, p0, h0);
    let amps = ph.iter().enumerate().map(|(j, &phase)| phase * psi.at(h0 - j as i64 + n)).collect();
    WaveFunction::new(*grid, amps)
}

/// `<phi|T_GR psi>` for a reflection centre `h0` and momentum `hp`, both in
/// half steps. `tw` must be `Twiddles::new(2N)`.
pub(crate) fn gr_matrix_element(tw: &Twiddles, phi: &WaveFunction, psi: &WaveFunction, h0: i64, hp: i64) -> Complex64 {
    let grid = psi.grid();
    let n = grid.num_points() as i64;
    let (a, b) = (phi.amplitudes(), psi.amplitudes());
    let lo = (h0 + 1).max(0);
    let hi = (h0 + n).min(n - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in lo..=hi {
        acc += a[j as usize].conj() * tw.plus(2 * hp * (2 * j - n - h0)) * b[(h0 - j + n) as usize];
    }
    acc * grid.dx()
}

/// `<phi|T psi>` for a displacement of `m` grid steps and momentum `hp` in
/// half steps. `tw` must be `Twiddles::new(2N)`.
pub(crate) fn heisenberg_matrix_element(
    tw: &Twiddles,
    phi: &WaveFunction,
    psi: &WaveFunction,
    m: i64,
    hp: i64,
) -> Complex64 {
    let grid = psi.grid();
    let n = grid.num_points() as i64;
    let (a, b) = (phi.amplitudes(), psi.amplitudes());
    let mut acc = Complex64::new(0.0, 0.0);
    for j in m.max(0)..(n + m).min(n) {
        acc += a[j as usize].conj() * tw.plus(hp * (2 * j - n - m)) * b[(j - m) as usize];
    }
    acc * grid.dx()
}

/// Parity `psi(x) -> psi(-x)`.
pub fn parity(grid: &SpatialGrid) -> LinearOperator {
    grossmann_royer(0.0, 0.0, grid).expect("origin is a reflection centre")
}

/// `(Pi psi)_j = delta_{j, j0} psi_j0 / dx`, so that
/// `<phi|Pi|psi> = conj(phi(x0)) psi(x0)`.
pub fn projector_x(x0: f64, grid: &SpatialGrid) -> Result<LinearOperator> {
    let j0 = grid.index_of(x0).ok_or(Error::OffGrid(x0))?;
    let n = grid.num_points();
    let mut matrix = DMatrix::from_element(n, n, ZERO);
    matrix[(j0, j0)] = Complex64::new(1.0 / grid.dx(), 0.0);
    Ok(LinearOperator { grid: *grid, matrix, unitary: false })
}

pub fn position(grid: &SpatialGrid) -> LinearOperator {
    let diag =
        DVector::from_iterator(grid.num_points(), (0..grid.num_points()).map(|j| Complex64::new(grid.x(j), 0.0)));
    LinearOperator { grid: *grid, matrix: DMatrix::from_diagonal(&diag), unitary: false }
}

/// Spectral `p^s`: the circulant `(1/N) sum_k p_k^s exp(2 pi i (k - N/2)(j - l) / N)`.
pub fn momentum_power(grid: &SpatialGrid, s: u32) -> LinearOperator {
    if s == 0 {
        return LinearOperator { unitary: false, ..LinearOperator::identity(grid) };
    }
    let n = grid.num_points();
    let tw = Twiddles::new(n);
    let half = (n / 2) as i64;
    let column: Vec<Complex64> = (0..n as i64)
        .map(|d| {
            let acc: CompensatedSum =
                (0..n as i64).map(|k| tw.plus(2 * (k - half) * d) * grid.p(k as usize).powi(s as i32)).collect();
            acc.value() / n as f64
        })
        .collect();
    let matrix = DMatrix::from_fn(n, n, |j, l| {
        let d = j as i64 - l as i64;
        if d >= 0 {
            column[d as usize]
        } else {
            column[(-d) as usize].conj()
        }
    });
    LinearOperator { grid: *grid, matrix, unitary: false }
}

pub fn momentum(grid: &SpatialGrid) -> LinearOperator {
    momentum_power(grid, 1)
}

/// Weyl quantization of a polynomial symbol, monomial by monomial through
/// the McCoy ordering `2^-s sum_k C(s, k) p^(s-k) x^r p^k`.
pub fn weyl_quantize(a: &PolynomialSymbol, grid: &SpatialGrid) -> Result<LinearOperator> {
    a.check_degree()?;
    let n = grid.num_points();
    let max_s = a.terms().map(|(_, s, _)| s).max().unwrap_or(0);
    let p_pow: Vec<DMatrix<Complex64>> = (0..=max_s).map(|s| momentum_power(grid, s).matrix).collect();
    let mut total = DMatrix::from_element(n, n, ZERO);
    for (r, s, c) in a.terms() {
        let ordered = mccoy_order(r, s)?;
        for &(left, _, right, coeff) in ordered.terms() {
            let w = c * (*coeff.numer() as f64 / *coeff.denom() as f64);
            // x^r p^right: scale rows of p^right by x_j^r
            let mut xp = p_pow[right as usize].clone();
            for j in 0..n {
                let xr = grid.x(j).powi(r as i32);
                xp.row_mut(j).iter_mut().for_each(|v| *v *= xr);
            }
            let word = if left == 0 { xp } else { &p_pow[left as usize] * xp };
            total += word * w;
        }
    }
    Ok(LinearOperator { grid: *grid, matrix: total, unitary: false })
}

/// `W(x, p) = (pi hbar)^-1 <T_GR(x, p) phi | psi>` on the Wigner lattice.
pub fn cross_wigner_via_gr(psi: &WaveFunction, phi: &WaveFunction) -> Result<PhaseSpaceFunction> {
    psi.grid().check_same(phi.grid())?;
    let grid = psi.grid();
    let lattice = Lattice::wigner(grid);
    let scale = 1.0 / (PI * grid.hbar());
    let tw = Twiddles::new(2 * grid.num_points());
    let rows: Vec<Vec<Complex64>> = (0..lattice.nx())
        .into_par_iter()
        .map(|i| {
            (0..lattice.np())
                .map(|k| gr_matrix_element(&tw, psi, phi, lattice.x_half(i), lattice.p_half(k)).conj() * scale)
                .collect()
        })
        .collect();
    PhaseSpaceFunction::new(lattice, Kind::CrossWigner, rows.concat())
}

/// `A(X, P) = (2 pi hbar)^-1 <T(X, P) phi | psi>` on the dual of the Wigner
/// lattice.
pub fn cross_ambiguity_via_heisenberg(psi: &WaveFunction, phi: &WaveFunction) -> Result<PhaseSpaceFunction> {
    psi.grid().check_same(phi.grid())?;
    let grid = psi.grid();
    let lattice = Lattice::wigner(grid).dual();
    let scale = 1.0 / (2.0 * PI * grid.hbar());
    let tw = Twiddles::new(2 * grid.num_points());
    let rows: Vec<Vec<Complex64>> = (0..lattice.nx())
        .into_par_iter()
        .map(|i| {
            (0..lattice.np())
                .map(|k| {
                    heisenberg_matrix_element(&tw, psi, phi, lattice.x_half(i) / 2, lattice.p_half(k)).conj() * scale
                })
                .collect()
        })
        .collect();
    PhaseSpaceFunction::new(lattice, Kind::Ambiguity, rows.concat())
}

fn require_fine(a: &PhaseSpaceFunction) -> Result<()> {
    Lattice::fine(a.grid()).check_same(a.lattice())
}

/// Samples a symbol on the fine lattice used by the operator integrals.
pub fn sample_symbol_fine(a: &PolynomialSymbol, grid: &SpatialGrid) -> PhaseSpaceFunction {
    a.sample(&Lattice::fine(grid))
}

/// `A = (pi hbar)^-1 sum a(x, p) T_GR(x, p) dx dp` over the fine lattice.
///
/// The reflection centre for the matrix element `(l, l')` is the midpoint
/// `(x_l + x_l') / 2`, so
/// `M_ll' = (2N)^-1 sum_k a(l + l', p_k) exp(i p_k (x_l - x_l') / hbar)`.
pub fn operator_from_symbol_gr(a: &PhaseSpaceFunction) -> Result<LinearOperator> {
    require_fine(a)?;
    let grid = *a.grid();
    let n = grid.num_points();
    let lattice = *a.lattice();
    let tw = Twiddles::new(2 * n);
    let scale = 1.0 / (2 * n) as f64;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|l| {
            (0..n)
                .map(|lp| {
                    let d = l as i64 - lp as i64;
                    let row = a.row(l + lp);
                    let acc: CompensatedSum =
                        row.iter().enumerate().map(|(k, v)| v * tw.plus(2 * lattice.p_half(k) * d)).collect();
                    acc.value() * scale
                })
                .collect()
        })
        .collect();
    let matrix = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    LinearOperator::new(grid, matrix)
}

/// `A = (2 pi hbar)^-1 sum F_s a(X, P) T(X, P) dX dP` over the dual of the
/// fine lattice (`X` step `dx`, `P` step `dp`).
pub fn operator_from_symbol_heisenberg(a: &PhaseSpaceFunction) -> Result<LinearOperator> {
    require_fine(a)?;
    let grid = *a.grid();
    let n = grid.num_points();
    let fa = symplectic_fourier(a);
    let dual = *fa.lattice();
    let tw = Twiddles::new(2 * n);
    let scale = 1.0 / n as f64;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|l| {
            (0..n)
                .map(|lp| {
                    // X = x_l - x_l' sits at dual column l - l' + N
                    let row = fa.row(l + n - lp);
                    let mid = (l + lp) as i64 - n as i64;
                    let acc: CompensatedSum =
                        row.iter().enumerate().map(|(k, v)| v * tw.plus(dual.p_half(k) * mid)).collect();
                    acc.value() * scale
                })
                .collect()
        })
        .collect();
    let matrix = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    LinearOperator::new(grid, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent_state, hermite_state};

    fn small() -> SpatialGrid {
        SpatialGrid::new(64, 14.0, 1.0).unwrap()
    }

    #[test]
    fn heisenberg_special_cases() {
        let g = small();
        assert_eq!(heisenberg(0.0, 0.0, &g).unwrap().max_abs_diff(&LinearOperator::identity(&g)).unwrap(), 0.0);
        let psi = hermite_state(2, &g).unwrap();
        let x0 = 4.0 * g.dx();
        let shifted = heisenberg(x0, 0.0, &g).unwrap().apply(&psi).unwrap();
        for j in 4..64 {
            assert_eq!(shifted.amplitudes()[j], psi.amplitudes()[j - 4]);
        }
        assert!(matches!(heisenberg(0.3 * g.dx(), 0.0, &g), Err(Error::OffGridShift(_))));
        let t = heisenberg(x0, 1.3, &g).unwrap();
        assert!(t.unitarity_defect() < 1e-14);
    }

    #[test]
    fn coherent_state_is_displaced_ground() {
        let g = SpatialGrid::reference();
        let x0 = 16.0 * g.dx();
        let p0 = 1.7;
        let made = heisenberg_apply(&hermite_state(0, &g).unwrap(), x0, p0).unwrap();
        assert!(made.sup_distance(&coherent_state(x0, p0, &g).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn reflection_properties() {
        let g = small();
        let par = parity(&g);
        let psi = coherent_state(1.0, 0.5, &g).unwrap();
        let reflected = par.apply(&psi).unwrap();
        for j in 1..64 {
            assert_eq!(reflected.amplitudes()[j], psi.amplitudes()[64 - j]);
        }
        let x0 = 3.0 * g.dx() / 2.0;
        let p0 = 5.0 * g.dp() / 2.0;
        let gr = grossmann_royer(x0, p0, &g).unwrap();
        let sq = gr.compose(&gr).unwrap();
        assert!(sq.max_abs_diff(&LinearOperator::identity(&g)).unwrap() < 1e-15);
        assert!(matches!(grossmann_royer(0.3 * g.dx(), 0.0, &g), Err(Error::OffGridReflection(_))));
    }

    #[test]
    fn reflection_factorizes_through_parity() {
        let g = small();
        let x0 = 3.0 * g.dx();
        let p0 = 2.0 * g.dp();
        let t = heisenberg(x0, p0, &g).unwrap();
        let lhs = grossmann_royer(x0, p0, &g).unwrap();
        let rhs = t.compose(&parity(&g)).unwrap().compose(&t.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn projector_completeness() {
        let g = SpatialGrid::new(16, 8.0, 1.0).unwrap();
        let mut sum = LinearOperator::identity(&g).scale(ZERO);
        for j in 0..16 {
            sum = sum.add(&projector_x(g.x(j), &g).unwrap().scale(Complex64::new(g.dx(), 0.0))).unwrap();
        }
        assert!(sum.max_abs_diff(&LinearOperator::identity(&g)).unwrap() < 1e-15);
        assert!(matches!(projector_x(0.1, &g), Err(Error::OffGrid(_))));
    }

    #[test]
    fn quantized_position_is_diagonal() {
        let g = small();
        let x = weyl_quantize(&PolynomialSymbol::x(), &g).unwrap();
        assert_eq!(x.max_abs_diff(&position(&g)).unwrap(), 0.0);
    }

    #[test]
    fn momentum_matches_fourier_derivative() {
        let g = SpatialGrid::reference();
        let psi = coherent_state(0.0, 1.5, &g).unwrap();
        let ev = momentum(&g).matrix_element(&psi, &psi).unwrap();
        assert!((ev.re - 1.5).abs() < 1e-10 && ev.im.abs() < 1e-12);
        assert!(momentum_power(&g, 3).hermiticity_defect() < 1e-10);
    }

    #[test]
    fn oscillator_ground_state_eigenvalue() {
        let g = SpatialGrid::reference();
        let h = weyl_quantize(&PolynomialSymbol::harmonic(), &g).unwrap();
        let psi = hermite_state(0, &g).unwrap();
        let hpsi = h.apply(&psi).unwrap();
        assert!(hpsi.sup_distance(&psi.scaled(Complex64::new(0.5, 0.0))).unwrap() < 1e-6);
        assert!(h.hermiticity_defect() < 1e-8);
    }

    #[test]
    fn matrix_element_kernels_match_applied_operators() {
        let g = small();
        let tw = Twiddles::new(2 * g.num_points());
        let psi = coherent_state(0.5, -1.0, &g).unwrap();
        let phi = hermite_state(2, &g).unwrap();
        for (h0, hp) in [(0, 0), (3, -5), (-40, 17), (64, 31), (-63, -32)] {
            let (x0, p0) = (h0 as f64 * g.dx() / 2.0, hp as f64 * g.dp() / 2.0);
            let want = inner_product(&phi, &grossmann_royer_apply(&psi, x0, p0).unwrap()).unwrap();
            assert!((gr_matrix_element(&tw, &phi, &psi, h0, hp) - want).norm() < 1e-15);
            let m = h0 / 2;
            let want = inner_product(&phi, &heisenberg_apply(&psi, m as f64 * g.dx(), p0).unwrap()).unwrap();
            assert!((heisenberg_matrix_element(&tw, &phi, &psi, m, hp) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn gr_route_matches_quadrature() {
        let g = small();
        let psi = hermite_state(0, &g).unwrap();
        let phi = hermite_state(1, &g).unwrap();
        let a = crate::transforms::cross_wigner(&psi, &phi).unwrap();
        let b = cross_wigner_via_gr(&psi, &phi).unwrap();
        let d = a.sup_distance(&b).unwrap();
        assert!(d < 1e-13, "{d}");
    }

    #[test]
    fn heisenberg_route_matches_ambiguity() {
        let g = small();
        let psi = hermite_state(0, &g).unwrap();
        let phi = coherent_state(0.5, 1.0, &g).unwrap();
        let a = crate::transforms::cross_ambiguity(&psi, &phi).unwrap();
        let b = cross_ambiguity_via_heisenberg(&psi, &phi).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-13);
    }

    #[test]
    fn operator_integrals_reproduce_position_and_projector() {
        let g = small();
        let x_sym = sample_symbol_fine(&PolynomialSymbol::x(), &g);
        for op in [operator_from_symbol_gr(&x_sym).unwrap(), operator_from_symbol_heisenberg(&x_sym).unwrap()] {
            assert!(op.max_abs_diff(&position(&g)).unwrap() < 1e-10);
        }
        let psi = hermite_state(0, &g).unwrap();
        let w = crate::transforms::cross_wigner_on(&psi, &psi, &Lattice::fine(&g)).unwrap();
        let sym = w.scaled(Complex64::new(2.0 * PI * g.hbar(), 0.0)).with_kind(Kind::Symbol);
        let proj = DMatrix::from_fn(64, 64, |r, c| psi.amplitudes()[r] * psi.amplitudes()[c].conj() * g.dx());
        let proj = LinearOperator::new(g, proj).unwrap();
        let gr = operator_from_symbol_gr(&sym).unwrap();
        let hw = operator_from_symbol_heisenberg(&sym).unwrap();
        assert!(gr.max_abs_diff(&proj).unwrap() < 1e-12);
        assert!(hw.max_abs_diff(&gr).unwrap() < 1e-12);
    }
}
