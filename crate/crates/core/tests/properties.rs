use num_complex::Complex64;
use proptest::prelude::*;
use weakwigner::operators::{grossmann_royer, heisenberg};
use weakwigner::reconstruction::gr_reconstruct;
use weakwigner::symbolic::{mccoy_order, mccoy_order_mirrored};
use weakwigner::transforms::cross_wigner;
use weakwigner::weak::{weak_value_phase_space, WeakOptions};
use weakwigner::{
    coherent_state, hermite_state, inner_product, make_grid, LinearOperator, PolynomialSymbol, SpatialGrid,
    WaveFunction,
};

fn small() -> SpatialGrid {
    make_grid(64, 16.0, 1.0).unwrap()
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| cx(a, b))
}

/// Random superposition of the first four Hermite functions.
fn state() -> impl Strategy<Value = WaveFunction> {
    prop::collection::vec(coeff(), 4).prop_filter_map("vanishing state", |cs| {
        let g = small();
        let mut psi = WaveFunction::zeros(g);
        for (k, c) in cs.iter().enumerate() {
            psi = psi.add(&hermite_state(k, &g).unwrap().scaled(*c)).unwrap();
        }
        (psi.norm() > 0.1).then_some(psi)
    })
}

fn coherent() -> impl Strategy<Value = WaveFunction> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(x, p)| coherent_state(x, p, &small()).unwrap())
}

fn symbol() -> impl Strategy<Value = PolynomialSymbol> {
    prop::collection::vec((0u32..3, 0u32..3, -1.0..1.0f64), 1..4)
        .prop_map(|ts| PolynomialSymbol::from_terms(ts.into_iter().map(|(r, s, c)| (r, s, cx(c, 0.0)))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn cross_wigner_is_sesquilinear(psi in state(), chi in state(), phi in state(), a in coeff(), b in coeff()) {
        let lhs = cross_wigner(&psi.scaled(a).add(&chi.scaled(b)).unwrap(), &phi).unwrap();
        let rhs = cross_wigner(&psi, &phi).unwrap().scaled(a)
            .zip_with(&cross_wigner(&chi, &phi).unwrap().scaled(b), |u, v| u + v).unwrap();
        let scale = 1.0 + lhs.max_abs();
        prop_assert!(lhs.sup_distance(&rhs).unwrap() <= 1e-12 * scale);

        let lhs = cross_wigner(&phi, &psi.scaled(a)).unwrap();
        let rhs = cross_wigner(&phi, &psi).unwrap().scaled(a.conj());
        prop_assert!(lhs.sup_distance(&rhs).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn cross_wigner_hermiticity_and_diagonal_reality(psi in state(), phi in state()) {
        let a = cross_wigner(&psi, &phi).unwrap().map(|v| v.conj());
        let b = cross_wigner(&phi, &psi).unwrap();
        prop_assert!(a.sup_distance(&b).unwrap() <= 1e-14 * (1.0 + b.max_abs()));
        let w = cross_wigner(&psi, &psi).unwrap();
        prop_assert!(w.max_abs_im() <= 1e-12 * w.max_abs_re());
    }

    #[test]
    fn weak_values_are_linear_in_the_observable(psi in coherent(), phi in coherent(),
                                                 a in symbol(), b in symbol(), s in coeff(), t in coeff()) {
        prop_assume!(inner_product(&phi, &psi).unwrap().norm() > 1e-2);
        let o = WeakOptions::default();
        let combo = a.scale(s).add(&b.scale(t));
        let lhs = weak_value_phase_space(&combo, &psi, &phi, o).unwrap().value;
        let rhs = weak_value_phase_space(&a, &psi, &phi, o).unwrap().value * s
            + weak_value_phase_space(&b, &psi, &phi, o).unwrap().value * t;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn reconstruction_scales_with_the_input(psi in state(), phi in coherent(), lam in coherent(), c in coeff()) {
        prop_assume!(c.norm() > 1e-3);
        let ov = Some(inner_product(&phi, &lam).unwrap());
        prop_assume!(ov.unwrap().norm() > 1e-3);
        let w = cross_wigner(&psi, &phi).unwrap();
        let base = gr_reconstruct(&w, &lam, ov).unwrap();
        let scaled = gr_reconstruct(&w.scaled(c), &lam, ov).unwrap();
        let d = scaled.sup_distance(&base.scaled(c)).unwrap();
        prop_assert!(d <= 1e-10 * (1.0 + base.max_abs() * c.norm()));
    }

    #[test]
    fn reflections_are_involutions_and_preserve_norm(h0 in -20i64..20, hp in -20i64..20, psi in state()) {
        let g = small();
        let (x0, p0) = (h0 as f64 * g.dx() / 2.0, hp as f64 * g.dp() / 2.0);
        let t = grossmann_royer(x0, p0, &g).unwrap();
        let id = LinearOperator::identity(&g);
        prop_assert!(t.compose(&t).unwrap().max_abs_diff(&id).unwrap() <= 1e-12);
        prop_assert!((t.apply(&psi).unwrap().norm() - psi.norm()).abs() <= 1e-12 * psi.norm());
        let d = heisenberg((h0 / 2) as f64 * g.dx(), p0, &g).unwrap();
        prop_assert!((d.apply(&psi).unwrap().norm() - psi.norm()).abs() <= 1e-9 * psi.norm());
    }

    #[test]
    fn ordering_rules_agree(r in 0u32..5, s in 0u32..5) {
        let a = mccoy_order(r, s).unwrap();
        let b = mccoy_order_mirrored(r, s).unwrap();
        prop_assert_eq!(a.normal_form(), &b);
    }

    #[test]
    fn symbol_text_round_trips(sym in symbol()) {
        let text = sym.to_string();
        let back = PolynomialSymbol::parse(&text, 1.0).unwrap();
        for (x, p) in [(0.3, -1.1), (1.7, 0.4), (-2.0, 2.0)] {
            prop_assert!((back.evaluate(x, p) - sym.evaluate(x, p)).norm() <= 1e-12);
        }
    }

    #[test]
    fn wavefunction_csv_round_trips(psi in state()) {
        let back = WaveFunction::read_csv(small(), psi.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back.amplitudes(), psi.amplitudes());
    }
}
