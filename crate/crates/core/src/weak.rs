//! Weak values `<phi|A|psi> / <phi|psi>` of pre-selected `psi` and
//! post-selected `phi`, computed four ways:
//!
//! * `braket`: directly from the quantized operator;
//! * `phase_space`: `sum a W_{psi,phi} dx dp` over the Wigner lattice;
//! * `gr_operator`: `(pi hbar)^-1 sum a(z) <phi|T_GR(z) psi> dz`;
//! * `heisenberg`: `(2 pi hbar)^-1 sum F_s a(z) <phi|T(z) psi> dz` over the
//!   dual lattice.
//!
//! Symbols are always Weyl symbols.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Twiddles;
use crate::operators::{gr_matrix_element, heisenberg_matrix_element, weyl_quantize, LinearOperator};
use crate::phase_space::{Kind, Lattice, PhaseSpaceFunction};
use crate::sum::CompensatedSum;
use crate::symbol::PolynomialSymbol;
use crate::transforms::{cross_wigner, symplectic_fourier};
use crate::wavefunction::{inner_product, WaveFunction};

/// Relative overlap below which a weak value is reported as undefined.
pub const OVERLAP_THRESHOLD: f64 = 1e-8;

/// Largest admissible `|a W|` on the lattice boundary relative to its peak.
pub const ALIAS_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakValueRoute {
    Braket,
    PhaseSpace,
    GrOperator,
    Heisenberg,
}

impl WeakValueRoute {
    pub const ALL: [WeakValueRoute; 4] =
        [WeakValueRoute::Braket, WeakValueRoute::PhaseSpace, WeakValueRoute::GrOperator, WeakValueRoute::Heisenberg];

    pub fn name(&self) -> &'static str {
        match self {
            WeakValueRoute::Braket => "braket",
            WeakValueRoute::PhaseSpace => "phase_space",
            WeakValueRoute::GrOperator => "gr_operator",
            WeakValueRoute::Heisenberg => "heisenberg",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|r| r.name() == text).ok_or_else(|| Error::Parse(format!("unknown route `{text}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    pub value: Complex64,
    pub overlap: Complex64,
    pub route: WeakValueRoute,
    /// Set when the overlap guard was overridden.
    pub diverging: bool,
}

impl WeakValueResult {
    pub fn re_part(&self) -> f64 {
        self.value.re
    }

    pub fn im_part(&self) -> f64 {
        self.value.im
    }

    pub fn overlap_magnitude(&self) -> f64 {
        self.overlap.norm()
    }
}

#[derive(Serialize)]
struct WeakValueJson {
    re: f64,
    im: f64,
    overlap_re: f64,
    overlap_im: f64,
    route: WeakValueRoute,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    divergence_warning: bool,
}

impl Serialize for WeakValueResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeakValueJson {
            re: self.value.re,
            im: self.value.im,
            overlap_re: self.overlap.re,
            overlap_im: self.overlap.im,
            route: self.route,
            divergence_warning: self.diverging,
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WeakOptions {
    /// Return a value (flagged as diverging) even below the overlap guard.
    pub force: bool,
}

/// `<phi|psi>` and whether the guard was overridden.
pub fn guarded_overlap(psi: &WaveFunction, phi: &WaveFunction, opts: WeakOptions) -> Result<(Complex64, bool)> {
    let ov = inner_product(phi, psi)?;
    let threshold = OVERLAP_THRESHOLD * phi.norm() * psi.norm();
    if ov.norm() >= threshold {
        Ok((ov, false))
    } else if opts.force {
        Ok((ov, true))
    } else {
        Err(Error::OrthogonalStates { overlap: ov.norm(), threshold })
    }
}

/// Symbols accepted by the phase-space routes.
pub trait SymbolSource {
    fn on_lattice(&self, lattice: &Lattice) -> Result<PhaseSpaceFunction>;
}

impl SymbolSource for PolynomialSymbol {
    fn on_lattice(&self, lattice: &Lattice) -> Result<PhaseSpaceFunction> {
        self.check_degree()?;
        Ok(self.sample(lattice))
    }
}

impl SymbolSource for PhaseSpaceFunction {
    fn on_lattice(&self, lattice: &Lattice) -> Result<PhaseSpaceFunction> {
        lattice.check_same(self.lattice())?;
        Ok(self.clone().with_kind(Kind::Symbol))
    }
}

fn check_alias(product: &PhaseSpaceFunction) -> Result<()> {
    let peak = product.max_abs();
    let edge = product.boundary_max_abs();
    if peak > 0.0 && edge > ALIAS_THRESHOLD * peak {
        return Err(Error::AliasedSymbol(format!(
            "|a W| reaches {edge:e} on the lattice boundary against a peak of {peak:e}"
        )));
    }
    Ok(())
}

pub fn weak_value_braket(
    op: &LinearOperator,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<WeakValueResult> {
    let (overlap, diverging) = guarded_overlap(psi, phi, opts)?;
    let value = op.matrix_element(phi, psi)? / overlap;
    Ok(WeakValueResult { value, overlap, route: WeakValueRoute::Braket, diverging })
}

/// `<phi|psi>^-1 sum a W_{psi,phi} dx dp`
pub fn weak_value_phase_space(
    a: &dyn SymbolSource,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<WeakValueResult> {
    let (overlap, diverging) = guarded_overlap(psi, phi, opts)?;
    let w = cross_wigner(psi, phi)?;
    let sym = a.on_lattice(w.lattice())?;
    check_alias(&w.zip_with(&sym, |u, v| u * v)?)?;
    let value = w.integral_against(&sym)? / overlap;
    Ok(WeakValueResult { value, overlap, route: WeakValueRoute::PhaseSpace, diverging })
}

/// Integrands `a_s(z) K(z)` for several sampled symbols sharing one kernel
/// field `K`, with `K` evaluated only where some symbol is non-zero.
fn contract(
    lattice: &Lattice,
    syms: &[PhaseSpaceFunction],
    kernel: impl Fn(usize, usize) -> Complex64 + Sync,
) -> Vec<PhaseSpaceFunction> {
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<Vec<Vec<Complex64>>> = (0..lattice.nx())
        .into_par_iter()
        .map(|i| {
            let mut row = vec![Vec::with_capacity(lattice.np()); syms.len()];
            for k in 0..lattice.np() {
                let kv = if syms.iter().any(|s| s.get(i, k) != zero) { kernel(i, k) } else { zero };
                for (out, s) in row.iter_mut().zip(syms) {
                    out.push(s.get(i, k) * kv);
                }
            }
            row
        })
        .collect();
    (0..syms.len())
        .map(|n| {
            let values: Vec<Complex64> = rows.iter().flat_map(|r| r[n].iter().copied()).collect();
            PhaseSpaceFunction::new(*lattice, Kind::Symbol, values).expect("lattice shape")
        })
        .collect()
}

fn total(f: &PhaseSpaceFunction) -> Complex64 {
    f.values().iter().copied().collect::<CompensatedSum>().value()
}

/// `(pi hbar)^-1 <phi|psi>^-1 sum a(z) <phi|T_GR(z) psi> dz` on the Wigner lattice.
pub fn weak_value_via_gr(
    a: &dyn SymbolSource,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<WeakValueResult> {
    Ok(weak_values_via_gr(&[a], psi, phi, opts)?.remove(0))
}

/// [`weak_value_via_gr`] for several symbols, sharing the matrix elements.
pub fn weak_values_via_gr(
    symbols: &[&dyn SymbolSource],
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<Vec<WeakValueResult>> {
    let (overlap, diverging) = guarded_overlap(psi, phi, opts)?;
    let grid = psi.grid();
    let lattice = Lattice::wigner(grid);
    let syms = symbols.iter().map(|a| a.on_lattice(&lattice)).collect::<Result<Vec<_>>>()?;
    let tw = Twiddles::new(2 * grid.num_points());
    let integrands =
        contract(&lattice, &syms, |i, k| gr_matrix_element(&tw, phi, psi, lattice.x_half(i), lattice.p_half(k)));
    let scale = lattice.cell_area() / (PI * grid.hbar()) / overlap;
    integrands
        .iter()
        .map(|f| {
            check_alias(f)?;
            Ok(WeakValueResult { value: total(f) * scale, overlap, route: WeakValueRoute::GrOperator, diverging })
        })
        .collect()
}

/// `(2 pi hbar)^-1 <phi|psi>^-1 sum F_s a(z) <phi|T(z) psi> dz` on the dual
/// of the Wigner lattice.
pub fn weak_value_via_heisenberg(
    a: &dyn SymbolSource,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<WeakValueResult> {
    Ok(weak_values_via_heisenberg(&[a], psi, phi, opts)?.remove(0))
}

/// [`weak_value_via_heisenberg`] for several symbols, sharing the matrix
/// elements.
pub fn weak_values_via_heisenberg(
    symbols: &[&dyn SymbolSource],
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<Vec<WeakValueResult>> {
    let (overlap, diverging) = guarded_overlap(psi, phi, opts)?;
    let grid = psi.grid();
    let wl = Lattice::wigner(grid);
    let fas = symbols.iter().map(|a| Ok(symplectic_fourier(&a.on_lattice(&wl)?))).collect::<Result<Vec<_>>>()?;
    let dual = wl.dual();
    let tw = Twiddles::new(2 * grid.num_points());
    let integrands =
        contract(&dual, &fas, |i, k| heisenberg_matrix_element(&tw, phi, psi, dual.x_half(i) / 2, dual.p_half(k)));
    let scale = dual.cell_area() / (2.0 * PI * grid.hbar()) / overlap;
    Ok(integrands
        .iter()
        .map(|f| WeakValueResult { value: total(f) * scale, overlap, route: WeakValueRoute::Heisenberg, diverging })
        .collect())
}

pub fn weak_value_route(
    route: WeakValueRoute,
    a: &PolynomialSymbol,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<WeakValueResult> {
    match route {
        WeakValueRoute::Braket => weak_value_braket(&weyl_quantize(a, psi.grid())?, psi, phi, opts),
        WeakValueRoute::PhaseSpace => weak_value_phase_space(a, psi, phi, opts),
        WeakValueRoute::GrOperator => weak_value_via_gr(a, psi, phi, opts),
        WeakValueRoute::Heisenberg => weak_value_via_heisenberg(a, psi, phi, opts),
    }
}

/// The weak value of the Weyl quantization of `a` by every route, in the
/// order of [`WeakValueRoute::ALL`].
pub fn weak_value_all_routes(
    a: &PolynomialSymbol,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<Vec<WeakValueResult>> {
    WeakValueRoute::ALL.iter().map(|&r| weak_value_route(r, a, psi, phi, opts)).collect()
}

/// Complex quasi-probability `rho = W_{psi,phi} / <phi|psi>`.
pub fn rho(psi: &WaveFunction, phi: &WaveFunction, opts: WeakOptions) -> Result<PhaseSpaceFunction> {
    let (overlap, _) = guarded_overlap(psi, phi, opts)?;
    let w = cross_wigner(psi, phi)?;
    Ok(w.scaled(1.0 / overlap).with_kind(Kind::Rho))
}

/// `(sum Re(a rho), sum Im(a rho))`: the pointer shift and the shift of the
/// conjugate pointer variable.
pub fn pointer_statistics(
    a: &dyn SymbolSource,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<(f64, f64)> {
    let r = rho(psi, phi, opts)?;
    let sym = a.on_lattice(r.lattice())?;
    let v = r.integral_against(&sym)?;
    Ok((v.re, v.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionReport {
    /// `<psi+phi|A|psi+phi> / |psi+phi|^2`
    pub value: f64,
    /// `(<A>_psi + <A>_phi + 2 Re <phi|A|psi>) / |psi+phi|^2`
    pub decomposition: f64,
    pub residual: f64,
    /// The same numerator divided by `|psi+phi|` instead of its square.
    pub first_power_value: f64,
    pub first_power_deviation: f64,
    /// `<A>_{phi,psi}` when the pair is not orthogonal.
    pub weak_cross_term: Option<(f64, f64)>,
    /// `sum a W_{psi+phi} / |psi+phi|^2` when a symbol was given.
    pub wigner_value: Option<f64>,
    /// Residual of the phase-space decomposition
    /// `W_{psi+phi} = W_psi + W_phi + 2 Re W_{psi,phi}` integrated against `a`.
    pub wigner_residual: Option<f64>,
}

/// Expectation of `op` in the superposition `psi + phi` and its
/// decomposition into diagonal and interference parts.
pub fn superposition_expectation(
    op: &LinearOperator,
    psi: &WaveFunction,
    phi: &WaveFunction,
    symbol: Option<&PolynomialSymbol>,
) -> Result<SuperpositionReport> {
    let sum = psi.add(phi)?;
    if sum.norm() <= 1e-12 * (psi.norm() + phi.norm()) {
        return Err(Error::ZeroSum);
    }
    let n2 = sum.norm_sqr();
    let numer = op.matrix_element(&sum, &sum)?.re;
    let value = numer / n2;
    let e_psi = op.matrix_element(psi, psi)?.re;
    let e_phi = op.matrix_element(phi, phi)?.re;
    let cross = op.matrix_element(phi, psi)?;
    let decomposition = (e_psi + e_phi + 2.0 * cross.re) / n2;
    let first_power_value = numer / n2.sqrt();
    let weak_cross_term = guarded_overlap(psi, phi, WeakOptions::default()).ok().map(|(ov, _)| {
        let w = cross / ov;
        (w.re, w.im)
    });

    let (wigner_value, wigner_residual) = match symbol {
        Some(a) => {
            let lattice = Lattice::wigner(psi.grid());
            let sym = a.on_lattice(&lattice)?;
            let whole = cross_wigner(&sum, &sum)?.integral_against(&sym)?.re;
            let parts = cross_wigner(psi, psi)?.integral_against(&sym)?.re
                + cross_wigner(phi, phi)?.integral_against(&sym)?.re
                + 2.0 * cross_wigner(psi, phi)?.map(|v| Complex64::new(v.re, 0.0)).integral_against(&sym)?.re;
            (Some(whole / n2), Some((whole - parts).abs() / n2))
        }
        None => (None, None),
    };

    Ok(SuperpositionReport {
        value,
        decomposition,
        residual: (value - decomposition).abs(),
        first_power_value,
        first_power_deviation: (first_power_value - value).abs(),
        weak_cross_term,
        wigner_value,
        wigner_residual,
    })
}

/// Comparison of the naive phase-space average of a squared symbol with the
/// true mean of the squared operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveSquareReport {
    /// weak value of `h`
    pub mean: Complex64,
    /// `sum h^2 rho`: the naive, non-Weyl use of the classical square
    pub naive: Complex64,
    /// `sum (h * h) rho` with the Moyal square, the Weyl symbol of `H^2`
    pub corrected: Complex64,
    /// `<phi|H H|psi> / <phi|psi>` from the operator product
    pub operator_square: Complex64,
}

impl NaiveSquareReport {
    pub fn naive_variance(&self) -> Complex64 {
        self.naive - self.mean * self.mean
    }

    pub fn corrected_variance(&self) -> Complex64 {
        self.corrected - self.mean * self.mean
    }

    /// `naive - operator_square`
    pub fn discrepancy(&self) -> Complex64 {
        self.naive - self.operator_square
    }
}

pub fn naive_square_control(
    h: &PolynomialSymbol,
    psi: &WaveFunction,
    phi: &WaveFunction,
    opts: WeakOptions,
) -> Result<NaiveSquareReport> {
    let hbar = psi.grid().hbar();
    let mean = weak_value_phase_space(h, psi, phi, opts)?.value;
    let naive = weak_value_phase_space(&h.square(), psi, phi, opts)?.value;
    let corrected = weak_value_phase_space(&h.star(h, hbar), psi, phi, opts)?.value;
    let op = weyl_quantize(h, psi.grid())?;
    let operator_square = weak_value_braket(&op.compose(&op)?, psi, phi, opts)?.value;
    Ok(NaiveSquareReport { mean, naive, corrected, operator_square })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::states::{coherent_state, hermite_state};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ground_energy_by_every_route() {
        let g = SpatialGrid::reference();
        let psi = hermite_state(0, &g).unwrap();
        for r in weak_value_all_routes(&PolynomialSymbol::harmonic(), &psi, &psi, WeakOptions::default()).unwrap() {
            assert!((r.value - c(0.5)).norm() < 1e-6, "{:?}", r);
        }
    }

    #[test]
    fn orthogonal_pair_is_rejected_unless_forced() {
        let g = SpatialGrid::reference();
        let psi = hermite_state(0, &g).unwrap();
        let phi = hermite_state(1, &g).unwrap();
        let op = LinearOperator::identity(&g);
        assert!(matches!(
            weak_value_braket(&op, &psi, &phi, WeakOptions::default()),
            Err(Error::OrthogonalStates { .. })
        ));
        let forced = weak_value_braket(&op, &psi, &phi, WeakOptions { force: true }).unwrap();
        assert!(forced.diverging);
    }

    #[test]
    fn json_layout() {
        let r = WeakValueResult {
            value: Complex64::new(0.5, -0.25),
            overlap: c(1.0),
            route: WeakValueRoute::PhaseSpace,
            diverging: false,
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"re":0.5,"im":-0.25,"overlap_re":1.0,"overlap_im":0.0,"route":"phase_space"}"#
        );
    }

    #[test]
    fn negative_control_reproduces_quarter_hbar_squared() {
        let g = SpatialGrid::reference();
        let psi = hermite_state(0, &g).unwrap();
        let rep = naive_square_control(&PolynomialSymbol::harmonic(), &psi, &psi, WeakOptions::default()).unwrap();
        assert!((rep.naive_variance() - c(0.25)).norm() < 1e-6);
        assert!(rep.corrected_variance().norm() < 1e-6);
        assert!((rep.discrepancy() - c(0.25)).norm() < 1e-6);
    }

    #[test]
    fn superposition_of_orthogonal_levels() {
        let g = SpatialGrid::reference();
        let h = PolynomialSymbol::harmonic();
        let op = weyl_quantize(&h, &g).unwrap();
        let rep =
            superposition_expectation(&op, &hermite_state(0, &g).unwrap(), &hermite_state(1, &g).unwrap(), Some(&h))
                .unwrap();
        assert!((rep.value - 1.0).abs() < 1e-6);
        assert!(rep.residual < 1e-9);
        assert!(rep.weak_cross_term.is_none());
        assert!(rep.wigner_residual.unwrap() < 1e-10);
        assert!((rep.wigner_value.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pointer_statistics_match_weak_value() {
        let g = SpatialGrid::reference();
        let psi = hermite_state(0, &g).unwrap();
        let phi = coherent_state(2.0, 0.0, &g).unwrap();
        let x = PolynomialSymbol::x();
        let (re, im) = pointer_statistics(&x, &psi, &phi, WeakOptions::default()).unwrap();
        let wv = weak_value_braket(&crate::operators::position(&g), &psi, &phi, WeakOptions::default()).unwrap();
        assert!((re - wv.re_part()).abs() < 1e-9 && (im - wv.im_part()).abs() < 1e-9);
    }

    #[test]
    fn unresolved_symbol_is_flagged() {
        let g = SpatialGrid::reference();
        let psi = hermite_state(0, &g).unwrap();
        let edge = PhaseSpaceFunction::sample(Lattice::wigner(&g), Kind::Symbol, |x, _| c((x * x).exp()));
        assert!(matches!(
            weak_value_phase_space(&edge, &psi, &psi, WeakOptions::default()),
            Err(Error::AliasedSymbol(_))
        ));
    }
}
