use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use weakwigner::operators::{
    grossmann_royer, heisenberg, heisenberg_apply, operator_from_symbol_gr, operator_from_symbol_heisenberg, parity,
    position, projector_x, sample_symbol_fine, weyl_quantize,
};
use weakwigner::symbolic::mccoy_order;
use weakwigner::transforms::cross_wigner_on;
use weakwigner::{
    coherent_state, hermite_state, Error, Kind, Lattice, LinearOperator, PhaseSpaceFunction, PolynomialSymbol,
    SpatialGrid,
};

fn g() -> SpatialGrid {
    SpatialGrid::reference()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn heisenberg_special_cases() {
    let g = g();
    let id = LinearOperator::identity(&g);
    assert_eq!(heisenberg(0.0, 0.0, &g).unwrap().max_abs_diff(&id).unwrap(), 0.0);
    let psi = hermite_state(2, &g).unwrap();
    let shift = 16.0 * g.dx();
    let moved = heisenberg_apply(&psi, shift, 0.0).unwrap();
    for j in 16..g.num_points() {
        assert_eq!(moved.amplitudes()[j], psi.amplitudes()[j - 16]);
    }
    assert!(matches!(heisenberg(0.3 * g.dx(), 0.0, &g), Err(Error::OffGridShift(_))));
}

#[test]
fn displacement_and_reflection_preserve_norm() {
    let g = g();
    let states = [hermite_state(0, &g).unwrap(), hermite_state(5, &g).unwrap(), coherent_state(1.0, 2.0, &g).unwrap()];
    for (x0, p0) in [(0.5, 0.0), (-1.25, 0.7), (2.0, -1.3)] {
        let x0 = g.x(g.nearest_index(x0));
        for op in [heisenberg(x0, p0, &g).unwrap(), grossmann_royer(x0, p0, &g).unwrap()] {
            assert!(op.unitarity_defect() < 1e-12);
            for s in &states {
                assert!((op.apply(s).unwrap().norm() - s.norm()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn reflection_at_origin_is_parity() {
    let g = g();
    let t = grossmann_royer(0.0, 0.0, &g).unwrap();
    assert_eq!(t.max_abs_diff(&parity(&g)).unwrap(), 0.0);
    let psi = coherent_state(1.0, 0.5, &g).unwrap();
    let r = t.apply(&psi).unwrap();
    for j in 1..g.num_points() {
        assert_eq!(r.amplitudes()[j], psi.amplitudes()[g.num_points() - j]);
    }
}

#[test]
fn reflection_is_an_involution_and_factorizes() {
    let g = g();
    let id = LinearOperator::identity(&g);
    for (h0, hp) in [(3, 0), (-17, 5), (40, -12)] {
        let (x0, p0) = (h0 as f64 * g.dx() / 2.0, hp as f64 * g.dp() / 2.0);
        let t = grossmann_royer(x0, p0, &g).unwrap();
        assert!(t.compose(&t).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
    }
    for (m, k) in [(4, 2), (-10, -3)] {
        let (x0, p0) = (m as f64 * g.dx(), k as f64 * g.dp());
        let d = heisenberg(x0, p0, &g).unwrap();
        let fact = d.compose(&parity(&g)).unwrap().compose(&d.adjoint()).unwrap();
        assert!(grossmann_royer(x0, p0, &g).unwrap().max_abs_diff(&fact).unwrap() < 1e-10);
    }
    assert!(matches!(grossmann_royer(0.3 * g.dx(), 0.0, &g), Err(Error::OffGridReflection(_))));
}

#[test]
fn mccoy_examples() {
    assert_eq!(mccoy_order(2, 0).unwrap().normal_form().to_string(), "x^2");
    assert_eq!(mccoy_order(1, 1).unwrap().normal_form().to_string(), "x p - (1/2)i*hbar");
    assert_eq!(mccoy_order(2, 2).unwrap().normal_form().to_string(), "x^2 p^2 - 2i*hbar x p - (1/2) hbar^2");
    assert!(matches!(mccoy_order(5, 4), Err(Error::DegreeTooHigh(9))));
}

#[test]
fn quantized_position_and_harmonic_oscillator() {
    let g = g();
    let x = weyl_quantize(&PolynomialSymbol::x(), &g).unwrap();
    assert_eq!(x.max_abs_diff(&position(&g)).unwrap(), 0.0);
    let h = weyl_quantize(&PolynomialSymbol::harmonic(), &g).unwrap();
    let psi = hermite_state(0, &g).unwrap();
    let hpsi = h.apply(&psi).unwrap();
    assert!(hpsi.sup_distance(&psi.scaled(c(0.5))).unwrap() < 1e-9);
    assert!(h.hermiticity_defect() < 1e-8);
    let ev = h.spectrum();
    for (k, e) in ev.iter().take(6).enumerate() {
        assert!((e / (k as f64 + 0.5) - 1.0).abs() < 1e-5);
    }
}

#[test]
fn squared_hamiltonian_symbol_on_resolved_states() {
    let g = g();
    let h = PolynomialSymbol::harmonic();
    let hop = weyl_quantize(&h, &g).unwrap();
    let shifted = weyl_quantize(&PolynomialSymbol::parse("H2 - hbar^2/4", g.hbar()).unwrap(), &g).unwrap();
    let basis: Vec<_> = (0..=10).map(|k| hermite_state(k, &g).unwrap()).collect();
    assert!(hop.compose(&hop).unwrap().max_abs_diff_on(&shifted, &basis).unwrap() <= 1e-6);
    let naive = weyl_quantize(&h.square(), &g).unwrap();
    assert!(hop.compose(&hop).unwrap().max_abs_diff_on(&naive, &basis).unwrap() > 0.2);
}

fn projector(psi: &weakwigner::WaveFunction) -> LinearOperator {
    let g = *psi.grid();
    let a = psi.amplitudes();
    let m = DMatrix::from_fn(g.num_points(), g.num_points(), |r, col| a[r] * a[col].conj() * g.dx());
    LinearOperator::new(g, m).unwrap()
}

#[test]
fn operators_from_symbols() {
    let g = g();
    let x_sym = sample_symbol_fine(&PolynomialSymbol::x(), &g);
    let x_gr = operator_from_symbol_gr(&x_sym).unwrap();
    let x_hw = operator_from_symbol_heisenberg(&x_sym).unwrap();
    assert!(x_gr.max_abs_diff_interior(&position(&g), 5.0).unwrap() < 1e-5);
    assert!(x_hw.max_abs_diff(&x_gr).unwrap() < 1e-5);

    let psi = hermite_state(0, &g).unwrap();
    let w = cross_wigner_on(&psi, &psi, &Lattice::fine(&g)).unwrap();
    let sym = w.scaled(c(2.0 * PI * g.hbar())).with_kind(Kind::Symbol);
    let proj = projector(&psi);
    assert!(operator_from_symbol_gr(&sym).unwrap().max_abs_diff(&proj).unwrap() < 1e-5);
    assert!(operator_from_symbol_heisenberg(&sym).unwrap().max_abs_diff(&proj).unwrap() < 1e-5);
}

#[test]
fn wide_window_symbol_is_nearly_identity_on_interior_states() {
    let g = g();
    let window = PhaseSpaceFunction::sample(Lattice::fine(&g), Kind::Symbol, |x, p| {
        c((-(x / 8.0).powi(16) - (p / 20.0).powi(16)).exp())
    });
    let op = operator_from_symbol_gr(&window).unwrap();
    for k in [0, 1, 3] {
        let psi = hermite_state(k, &g).unwrap();
        assert!(op.apply(&psi).unwrap().sup_distance(&psi).unwrap() < 1e-3);
    }
}

#[test]
fn position_projectors() {
    let g = g();
    let psi = coherent_state(0.5, 1.0, &g).unwrap();
    let x0 = g.x(140);
    let pr = projector_x(x0, &g).unwrap();
    let v = pr.matrix_element(&psi, &psi).unwrap();
    assert!((v - c(psi.amplitudes()[140].norm_sqr())).norm() < 1e-15);
    let mut total = LinearOperator::identity(&g).scale(c(0.0));
    for j in 0..g.num_points() {
        total = total.add(&projector_x(g.x(j), &g).unwrap().scale(c(g.dx()))).unwrap();
    }
    assert!(total.max_abs_diff(&LinearOperator::identity(&g)).unwrap() < 1e-12);
    assert!(matches!(projector_x(0.3 * g.dx(), &g), Err(Error::OffGrid(_))));
}
