use std::f64::consts::PI;

use num_complex::Complex64;
use weakwigner::operators::{cross_ambiguity_via_heisenberg, cross_wigner_via_gr};
use weakwigner::transforms::{
    cross_ambiguity, cross_wigner, marginal_p, marginal_x, superposition_identity_check, symplectic_fourier, wigner,
};
use weakwigner::{coherent_state, hermite_state, inner_product, Error, Kind, PhaseSpaceFunction, SpatialGrid};

fn g() -> SpatialGrid {
    SpatialGrid::reference()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn ground_wigner_is_the_phase_space_gaussian() {
    let g = g();
    let w = wigner(&hermite_state(0, &g).unwrap()).unwrap();
    assert_eq!(w.kind(), Kind::Wigner);
    let l = *w.lattice();
    for i in 0..l.nx() {
        for k in 0..l.np() {
            let (x, p) = (l.x(i), l.p(k));
            let want = (-(x * x + p * p)).exp() / PI;
            assert!((w.get(i, k) - c(want, 0.0)).norm() < 1e-7);
        }
    }
    assert!((w.get(128, 128).re - 1.0 / PI).abs() < 1e-12);
}

#[test]
fn first_excited_state_is_negative_at_origin() {
    let g = g();
    let w = wigner(&hermite_state(1, &g).unwrap()).unwrap();
    assert!((w.get(128, 128).re + 0.318_309_886_183_790_7).abs() < 1e-7);
}

#[test]
fn cross_wigner_against_quadrature_reference() {
    let g = g();
    let h0 = hermite_state(0, &g).unwrap();
    let h1 = hermite_state(1, &g).unwrap();
    assert!(cross_wigner(&h0, &h1).unwrap().get(128, 128).norm() < 1e-7);

    let psi = h1;
    let phi = coherent_state(0.5, -1.0, &g).unwrap();
    let w = cross_wigner(&psi, &phi).unwrap();
    // (grid index of x, p in units of pi/20, value)
    let reference = [
        (136, 0, c(0.181_737_950_423_635_4, -0.056_675_504_289_602_57)),
        (128, 5, c(0.021_143_871_779_190_45, -0.103_982_866_238_736_2)),
        (120, 3, c(-0.096_029_519_712_750_24, -0.046_162_422_992_070_83)),
    ];
    for (j, m, want) in reference {
        let i = w.lattice().column_of_grid_index(j).unwrap();
        assert!((w.get(i, 128 + m) - want).norm() < 1e-7, "{j} {m}");
    }
}

#[test]
fn hermiticity_is_exact() {
    let g = g();
    let psi = coherent_state(1.0, 0.5, &g).unwrap();
    let phi = hermite_state(3, &g).unwrap();
    let a = cross_wigner(&psi, &phi).unwrap().map(|v| v.conj());
    let b = cross_wigner(&phi, &psi).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn catalogue_wigner_functions_integrate_to_one() {
    let g = g();
    for psi in [hermite_state(4, &g).unwrap(), coherent_state(-2.0, 1.0, &g).unwrap()] {
        let w = wigner(&psi).unwrap();
        assert!((w.integral() - 1.0).norm() < 1e-7);
        assert!(w.max_abs_im() <= 1e-9 * w.max_abs_re());
    }
}

#[test]
fn marginals() {
    let g = g();
    let psi = hermite_state(0, &g).unwrap();
    let mp = marginal_p(&wigner(&psi).unwrap()).unwrap();
    for (j, v) in mp.iter().enumerate() {
        let x = g.x(j);
        assert!((v - c((-x * x).exp() / PI.sqrt(), 0.0)).norm() < 1e-10);
    }

    let w01 = cross_wigner(&hermite_state(0, &g).unwrap(), &hermite_state(1, &g).unwrap()).unwrap();
    let total: Complex64 = marginal_p(&w01).unwrap().iter().sum::<Complex64>() * g.dx();
    assert!(total.norm() < 1e-8);

    let coh = coherent_state(1.0, 0.0, &g).unwrap();
    let w = cross_wigner(&coh, &psi).unwrap();
    let total: Complex64 = marginal_p(&w).unwrap().iter().sum::<Complex64>() * g.dx();
    assert!((total - c((-0.25f64).exp(), 0.0)).norm() < 1e-9);
    let mx = marginal_x(&w).unwrap();
    let l = w.lattice();
    for (k, v) in mx.iter().enumerate() {
        let want = coh.fourier_at(l.p(k)) * psi.fourier_at(l.p(k)).conj();
        assert!((v - want).norm() < 1e-7);
    }
}

#[test]
fn marginals_reject_symbols() {
    let g = g();
    let sym = PhaseSpaceFunction::sample(weakwigner::Lattice::wigner(&g), Kind::Symbol, |x, _| c(x, 0.0));
    assert!(matches!(marginal_p(&sym), Err(Error::KindMismatch { .. })));
}

#[test]
fn symplectic_fourier_of_ground_wigner() {
    let g = g();
    let psi = hermite_state(0, &g).unwrap();
    let w = wigner(&psi).unwrap();
    let fw = symplectic_fourier(&w);
    assert_eq!(fw.kind(), Kind::Ambiguity);
    let l = *fw.lattice();
    let mut worst: f64 = 0.0;
    for i in 0..l.nx() {
        for k in 0..l.np() {
            let (x, p) = (l.x(i), l.p(k));
            worst = worst.max((fw.get(i, k) - c((-(x * x + p * p) / 4.0).exp() / (2.0 * PI), 0.0)).norm());
        }
    }
    assert!(worst < 1e-7, "{worst}");
    assert!(symplectic_fourier(&fw).sup_distance(&w).unwrap() < 1e-12);
    let zero = w.scaled(c(0.0, 0.0));
    assert_eq!(symplectic_fourier(&zero).max_abs(), 0.0);
}

#[test]
fn ambiguity_function() {
    let g = g();
    let psi = coherent_state(0.5, 1.0, &g).unwrap();
    let a = cross_ambiguity(&psi, &psi).unwrap();
    let l = *a.lattice();
    assert!((a.get(l.nx() / 2, l.np() / 2) - c(1.0 / (2.0 * PI), 0.0)).norm() < 1e-12);
    assert!(a.sup_distance(&symplectic_fourier(&wigner(&psi).unwrap())).unwrap() < 1e-7);

    let h0 = hermite_state(0, &g).unwrap();
    let h1 = hermite_state(1, &g).unwrap();
    let direct = cross_ambiguity(&h0, &h1).unwrap();
    assert!(direct.sup_distance(&cross_ambiguity_via_heisenberg(&h0, &h1).unwrap()).unwrap() < 1e-12);
}

#[test]
fn grossmann_royer_route() {
    let g = g();
    let h0 = hermite_state(0, &g).unwrap();
    let h1 = hermite_state(1, &g).unwrap();
    let via_gr = cross_wigner_via_gr(&h0, &h0).unwrap();
    assert!(via_gr.sup_distance(&wigner(&h0).unwrap()).unwrap() < 1e-12);
    let pair = cross_wigner_via_gr(&h0, &h1).unwrap();
    assert!(pair.sup_distance(&cross_wigner(&h0, &h1).unwrap()).unwrap() < 1e-7);
    assert!(pair.get(128, 128).norm() < 1e-15);
}

#[test]
fn superposition_identity() {
    let g = g();
    let h0 = hermite_state(0, &g).unwrap();
    for phi in [hermite_state(1, &g).unwrap(), h0.clone(), coherent_state(3.0, 0.0, &g).unwrap()] {
        assert!(superposition_identity_check(&h0, &phi).unwrap() <= 1e-10);
    }
    let doubled = h0.scaled(c(2.0, 0.0));
    let w2 = wigner(&doubled).unwrap();
    let w1 = wigner(&h0).unwrap().scaled(c(4.0, 0.0));
    assert!(w2.sup_distance(&w1).unwrap() < 1e-14);
    let ov = inner_product(&h0, &h0).unwrap();
    assert!((cross_wigner(&h0, &h0).unwrap().integral() - ov).norm() < 1e-12);
}
