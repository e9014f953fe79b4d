//! Verification suite: every module invariant and every acceptance
//! criterion as a named, measured check.
//!
//! Checks run sequentially in a fixed order. Each one reports a measured
//! deviation and the tolerance it is held to, and the rendered report is
//! byte-for-byte reproducible unless timings are requested.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::operators::{
    cross_wigner_via_gr, grossmann_royer, heisenberg, operator_from_symbol_gr, operator_from_symbol_heisenberg,
    position, sample_symbol_fine, weyl_quantize, LinearOperator,
};
use crate::phase_space::{Kind, Lattice};
use crate::reconstruction::{gr_reconstruct, gr_reconstruct_rho, lundeen_report};
use crate::states::{hermite_state, StateSpec};
use crate::symbol::PolynomialSymbol;
use crate::symbolic::{mccoy_order, mccoy_order_mirrored};
use crate::transforms::{
    cross_ambiguity, cross_wigner, cross_wigner_on, marginal_p, marginal_x, superposition_identity_check,
    symplectic_fourier,
};
use crate::wavefunction::{fidelity, inner_product, WaveFunction};
use crate::weak::{
    naive_square_control, pointer_statistics, rho, superposition_expectation, weak_value_braket,
    weak_value_phase_space, weak_value_via_gr, weak_value_via_heisenberg, weak_values_via_gr,
    weak_values_via_heisenberg, SymbolSource, WeakOptions,
};

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub grid: SpatialGrid,
    /// Multiplier applied to every non-zero tolerance.
    pub tol_scale: f64,
    pub quick: bool,
}

impl SuiteConfig {
    /// `N = 256`, extent 20.
    pub fn full(hbar: f64) -> Result<Self> {
        Ok(Self { grid: SpatialGrid::new(256, 20.0, hbar)?, tol_scale: 1.0, quick: false })
    }

    /// `N = 64`, extent 16, tolerances relaxed a hundredfold.
    pub fn quick(hbar: f64) -> Result<Self> {
        Ok(Self { grid: SpatialGrid::new(64, 16.0, hbar)?, tol_scale: 100.0, quick: true })
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.tol_scale
    }

    fn label(&self) -> &'static str {
        if self.quick {
            "quick"
        } else {
            "full"
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub group: String,
    pub name: String,
    /// `None` when the check could not be evaluated.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let measured = self.measured.map_or_else(|| "n/a".to_string(), |m| format!("{m:.3e}"));
        format!(
            "{status} {}/{} measured={measured} tolerance={:.1e} {}",
            self.group, self.name, self.tolerance, self.detail
        )
    }
}

fn run_check(group: &str, name: &str, tolerance: f64, f: impl FnOnce() -> Result<(f64, String)>) -> CheckOutcome {
    let start = Instant::now();
    let (measured, detail) = match f() {
        Ok((m, d)) => (Some(m), d),
        Err(e) => (None, format!("error: {e}")),
    };
    let passed = measured.is_some_and(|m| m.is_finite() && m <= tolerance);
    CheckOutcome {
        group: group.to_string(),
        name: name.to_string(),
        measured,
        tolerance,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub mode: &'static str,
    pub n_points: usize,
    pub extent: f64,
    pub hbar: f64,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn text(&self) -> String {
        let mut out =
            format!("verify mode={} N={} extent={} hbar={}\n", self.mode, self.n_points, self.extent, self.hbar);
        for c in &self.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), self.failures());
        out
    }

    /// JUnit XML. Timings are included only on request, so that two runs
    /// can be compared byte for byte.
    pub fn junit(&self, with_timing: bool) -> String {
        let mut groups: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !groups.contains(&c.group.as_str()) {
                groups.push(&c.group);
            }
        }
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<testsuites name=\"weakwigner-verify-{}\" tests=\"{}\" failures=\"{}\">",
            self.mode,
            self.checks.len(),
            self.failures()
        );
        for g in groups {
            let members: Vec<&CheckOutcome> = self.checks.iter().filter(|c| c.group == g).collect();
            let fails = members.iter().filter(|c| !c.passed).count();
            let _ = writeln!(
                out,
                "  <testsuite name=\"{}\" tests=\"{}\" failures=\"{}\">",
                xml_escape(g),
                members.len(),
                fails
            );
            for c in members {
                let time = if with_timing { format!(" time=\"{:.3}\"", c.seconds) } else { String::new() };
                let _ = writeln!(
                    out,
                    "    <testcase classname=\"{}\" name=\"{}\"{time}>",
                    xml_escape(&c.group),
                    xml_escape(&c.name)
                );
                if !c.passed {
                    let _ = writeln!(out, "      <failure message=\"{}\"/>", xml_escape(&c.line()));
                }
                let _ = writeln!(out, "      <system-out>{}</system-out>", xml_escape(&c.line()));
                out.push_str("    </testcase>\n");
            }
            out.push_str("  </testsuite>\n");
        }
        out.push_str("</testsuites>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Catalog {
    grid: SpatialGrid,
    states: Vec<(String, WaveFunction)>,
    /// Five pairs of indices into `states`.
    pairs: Vec<(usize, usize)>,
}

impl Catalog {
    fn new(cfg: &SuiteConfig) -> Result<Self> {
        let s = if cfg.quick { 0.5 } else { 1.0 };
        let specs = [
            StateSpec::Hermite { k: 0 },
            StateSpec::Hermite { k: 1 },
            StateSpec::Hermite { k: 2 },
            StateSpec::Coherent { x0: 1.0, p0: 0.0 },
            StateSpec::Coherent { x0: 0.0, p0: 1.0 },
            StateSpec::Coherent { x0: 2.0 * s, p0: 0.0 },
            StateSpec::Coherent { x0: 1.0, p0: 2.0 },
            StateSpec::Coherent { x0: -1.0, p0: 0.5 },
            StateSpec::Cat { alpha: 3.0 * s, phase: 0.0 },
        ];
        let states = specs.iter().map(|sp| Ok((spec_name(sp), sp.build(&cfg.grid)?))).collect::<Result<Vec<_>>>()?;
        let pairs = vec![(0, 5), (1, 4), (6, 0), (8, 3), (2, 7)];
        Ok(Self { grid: cfg.grid, states, pairs })
    }

    fn state(&self, i: usize) -> &WaveFunction {
        &self.states[i].1
    }

    fn pair_name(&self, (a, b): (usize, usize)) -> String {
        format!("({}, {})", self.states[a].0, self.states[b].0)
    }

    fn five_pairs(&self) -> impl Iterator<Item = (&WaveFunction, &WaveFunction)> {
        self.pairs.iter().map(|&(a, b)| (self.state(a), self.state(b)))
    }

    /// Every ordered pair of catalogue states.
    fn all_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.states.len();
        (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
    }
}

pub fn spec_name(spec: &StateSpec) -> String {
    match spec {
        StateSpec::Hermite { k } => format!("hermite({k})"),
        StateSpec::Coherent { x0, p0 } => format!("coherent({x0},{p0})"),
        StateSpec::Cat { alpha, phase } => format!("cat({alpha},{phase})"),
        StateSpec::PlaneWaveWindowed { p0, center, width } => format!("plane({p0},{center},{width})"),
        StateSpec::CustomCsv { path } => format!("csv({})", path.display()),
    }
}

fn sup(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn worst<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    let mut w: f64 = 0.0;
    for it in items {
        let v = f(it)?;
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        w = w.max(v);
    }
    Ok(w)
}

fn test_symbols() -> Vec<(&'static str, PolynomialSymbol)> {
    vec![
        ("1", PolynomialSymbol::constant(1.0)),
        ("x", PolynomialSymbol::x()),
        ("p", PolynomialSymbol::p()),
        ("xp", PolynomialSymbol::monomial(1, 1, c(1.0))),
        ("H", PolynomialSymbol::harmonic()),
    ]
}

// ---------------------------------------------------------------- acceptance

fn criterion_ground_energy(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "01_ground_state_energy", cfg.tol(1e-6), || {
        let psi = cat.state(0);
        let hbar = cat.grid.hbar();
        let h = PolynomialSymbol::harmonic();
        let op = weyl_quantize(&h, &cat.grid)?;
        let o = WeakOptions::default();
        let values = [
            weak_value_braket(&op, psi, psi, o)?,
            weak_value_phase_space(&h, psi, psi, o)?,
            weak_value_via_gr(&h, psi, psi, o)?,
            weak_value_via_heisenberg(&h, psi, psi, o)?,
        ];
        let m = worst(values.iter(), |r| Ok((r.value - c(0.5 * hbar)).norm()))?;
        let detail = values.iter().map(|r| format!("{}={:.12}", r.route.name(), r.value.re)).collect::<Vec<_>>();
        Ok((m, detail.join(" ")))
    })
}

fn criterion_naive_square(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "02_weyl_ordering_counterexample", cfg.tol(1e-6), || {
        let psi = cat.state(0);
        let hbar = cat.grid.hbar();
        let rep = naive_square_control(&PolynomialSymbol::harmonic(), psi, psi, WeakOptions::default())?;
        let naive = rep.naive_variance();
        let corrected = rep.corrected_variance();
        let m = (naive - c(0.25 * hbar * hbar)).norm().max(corrected.norm());
        Ok((m, format!("naive_variance={:.12} corrected_variance={:.3e}", naive.re, corrected.re)))
    })
}

fn criterion_mccoy(cfg: &SuiteConfig) -> CheckOutcome {
    let _ = cfg;
    run_check("acceptance", "03_mccoy_normal_forms", 0.0, || {
        let a = mccoy_order(1, 1)?.normal_form().to_string();
        let b = mccoy_order(2, 2)?.normal_form().to_string();
        let ok = a == "x p - (1/2)i*hbar" && b == "x^2 p^2 - 2i*hbar x p - (1/2) hbar^2";
        Ok((if ok { 0.0 } else { 1.0 }, format!("[{a}] [{b}]")))
    })
}

fn marginal_defect(psi: &WaveFunction, phi: &WaveFunction) -> Result<f64> {
    let w = cross_wigner(psi, phi)?;
    let mp = marginal_p(&w)?;
    let want_p: Vec<Complex64> = psi.amplitudes().iter().zip(phi.amplitudes()).map(|(a, b)| a * b.conj()).collect();
    let mx = marginal_x(&w)?;
    let l = w.lattice();
    let want_x: Vec<Complex64> = (0..l.np()).map(|k| psi.fourier_at(l.p(k)) * phi.fourier_at(l.p(k)).conj()).collect();
    Ok(sup(&mp, &want_p).max(sup(&mx, &want_x)))
}

fn criterion_marginals(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "04_marginals", cfg.tol(1e-7), || {
        Ok((worst(cat.five_pairs(), |(a, b)| marginal_defect(a, b))?, "5 pairs".into()))
    })
}

fn criterion_rho_normalization(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "05_complex_distribution_normalization", cfg.tol(1e-7), || {
        let mut count = 0;
        let mut w: f64 = 0.0;
        for (a, b) in cat.all_pairs() {
            match rho(cat.state(a), cat.state(b), WeakOptions::default()) {
                Ok(r) => {
                    count += 1;
                    w = w.max((r.integral() - c(1.0)).norm());
                }
                Err(Error::OrthogonalStates { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok((w, format!("{count} non-orthogonal pairs")))
    })
}

fn criterion_superposition(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "06_superposition_identity", 0.0, || {
        let pointwise = worst(cat.five_pairs(), |(a, b)| superposition_identity_check(a, b))?;
        let ops = [weyl_quantize(&PolynomialSymbol::harmonic(), &cat.grid)?, position(&cat.grid)];
        let decomposition = worst(cat.five_pairs(), |(a, b)| {
            worst(ops.iter(), |op| Ok(superposition_expectation(op, a, b, None)?.residual))
        })?;
        let (t1, t2) = (cfg.tol(1e-10), cfg.tol(1e-9));
        let m = if pointwise <= t1 && decomposition <= t2 { 0.0 } else { 1.0 };
        Ok((m, format!("pointwise={pointwise:.3e}/{t1:.0e} decomposition={decomposition:.3e}/{t2:.0e}")))
    })
}

fn criterion_fourier_pair(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "07_fourier_pair", 0.0, || {
        let mut pair: f64 = 0.0;
        let mut inv: f64 = 0.0;
        for (a, b) in cat.five_pairs() {
            let w = cross_wigner(a, b)?;
            let fw = symplectic_fourier(&w);
            pair = pair.max(cross_ambiguity(a, b)?.sup_distance(&fw)?);
            inv = inv.max(symplectic_fourier(&fw).sup_distance(&w)?);
        }
        let (t1, t2) = (cfg.tol(1e-7), cfg.tol(1e-9));
        let m = if pair <= t1 && inv <= t2 { 0.0 } else { 1.0 };
        Ok((m, format!("ambiguity={pair:.3e}/{t1:.0e} involution={inv:.3e}/{t2:.0e}")))
    })
}

fn criterion_dual_route(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "08_dual_route_cross_wigner", cfg.tol(1e-7), || {
        let m = worst(cat.five_pairs(), |(a, b)| cross_wigner(a, b)?.sup_distance(&cross_wigner_via_gr(a, b)?))?;
        Ok((m, "5 pairs".into()))
    })
}

fn ground_projector(psi: &WaveFunction) -> Result<LinearOperator> {
    let g = *psi.grid();
    let a = psi.amplitudes();
    let m = nalgebra::DMatrix::from_fn(g.num_points(), g.num_points(), |r, col| a[r] * a[col].conj() * g.dx());
    LinearOperator::new(g, m)
}

fn criterion_operator_representations(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "09_operator_representations", cfg.tol(1e-5), || {
        let g = cat.grid;
        let radius = g.extent() / 4.0;
        let x_sym = sample_symbol_fine(&PolynomialSymbol::x(), &g);
        let x_op = position(&g);
        let psi = cat.state(0);
        let w = cross_wigner_on(psi, psi, &Lattice::fine(&g))?;
        let proj_sym = w.scaled(c(2.0 * PI * g.hbar())).with_kind(Kind::Symbol);
        let proj = ground_projector(psi)?;
        let m = [
            operator_from_symbol_gr(&x_sym)?.max_abs_diff_interior(&x_op, radius)?,
            operator_from_symbol_heisenberg(&x_sym)?.max_abs_diff_interior(&x_op, radius)?,
            operator_from_symbol_gr(&proj_sym)?.max_abs_diff_interior(&proj, radius)?,
            operator_from_symbol_heisenberg(&proj_sym)?.max_abs_diff_interior(&proj, radius)?,
        ];
        Ok((m.iter().copied().fold(0.0, f64::max), format!("|x| <= {radius}")))
    })
}

fn criterion_lundeen(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "10_lundeen_reconstruction", cfg.tol(1e-9), || {
        let g = cat.grid;
        let r1 = lundeen_report(cat.state(0), 0.0)?;
        let r2 = lundeen_report(cat.state(6), g.nearest_momentum(2.0))?;
        let rejected = matches!(lundeen_report(cat.state(1), 0.0), Err(Error::SmallMomentumAmplitude(_)));
        let m = if rejected { (1.0 - r1.fidelity).max(1.0 - r2.fidelity) } else { f64::INFINITY };
        Ok((m, format!("fidelities {:.15} {:.15}; odd state rejected: {rejected}", r1.fidelity, r2.fidelity)))
    })
}

/// `(psi, phi)` index pairs and auxiliary states for the reconstruction checks.
fn gr_cases() -> (Vec<(usize, usize)>, Vec<usize>) {
    (vec![(0, 3), (1, 4), (7, 3)], vec![0, 3, 2])
}

fn criterion_gr(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "11_gr_reconstruction", 0.0, || {
        let (pairs, lambdas) = gr_cases();
        let mut fid: f64 = 0.0;
        let mut spread: f64 = 0.0;
        for (a, b) in pairs {
            let (psi, phi) = (cat.state(a), cat.state(b));
            let w = cross_wigner(psi, phi)?;
            let mut recs = Vec::new();
            for &l in &lambdas {
                let lam = cat.state(l);
                let rec = gr_reconstruct(&w, lam, Some(inner_product(phi, lam)?))?;
                fid = fid.max(1.0 - fidelity(&rec, psi)?);
                recs.push(rec);
            }
            for r in &recs[1..] {
                spread = spread.max(r.sup_distance(&recs[0])?);
            }
        }
        let (t1, t2) = (cfg.tol(1e-6), cfg.tol(1e-5));
        let m = if fid <= t1 && spread <= t2 { 0.0 } else { 1.0 };
        Ok((m, format!("1-fidelity={fid:.3e}/{t1:.0e} lambda_spread={spread:.3e}/{t2:.0e}")))
    })
}

fn criterion_spectrum(cfg: &SuiteConfig, cat: &Catalog) -> CheckOutcome {
    run_check("acceptance", "12_spectrum", cfg.tol(1e-5), || {
        let hbar = cat.grid.hbar();
        let ev = weyl_quantize(&PolynomialSymbol::harmonic(), &cat.grid)?.spectrum();
        let m = worst(0..6, |k| {
            let want = hbar * (k as f64 + 0.5);
            Ok((ev[k] - want).abs() / want)
        })?;
        let shown = ev[..6].iter().map(|e| format!("{e:.10}")).collect::<Vec<_>>().join(" ");
        Ok((m, shown))
    })
}

fn criterion_determinism(cfg: &SuiteConfig) -> CheckOutcome {
    run_check("acceptance", "13_determinism", 0.0, || {
        let first = run_invariants(cfg)?.junit(false);
        let second = run_invariants(cfg)?.junit(false);
        Ok((if first == second { 0.0 } else { 1.0 }, format!("{} report bytes", first.len())))
    })
}

/// Acceptance criteria 1 to 12, each as one check.
pub fn acceptance_checks(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let cat = Catalog::new(cfg)?;
    Ok(vec![
        criterion_ground_energy(cfg, &cat),
        criterion_naive_square(cfg, &cat),
        criterion_mccoy(cfg),
        criterion_marginals(cfg, &cat),
        criterion_rho_normalization(cfg, &cat),
        criterion_superposition(cfg, &cat),
        criterion_fourier_pair(cfg, &cat),
        criterion_dual_route(cfg, &cat),
        criterion_operator_representations(cfg, &cat),
        criterion_lundeen(cfg, &cat),
        criterion_gr(cfg, &cat),
        criterion_spectrum(cfg, &cat),
    ])
}

/// All thirteen acceptance criteria. The last one reruns the invariant
/// suite twice and compares the rendered reports.
pub fn acceptance(cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = acceptance_checks(cfg)?;
    out.push(criterion_determinism(cfg));
    Ok(out)
}

// ---------------------------------------------------------------- invariants

fn core_grid_checks(cfg: &SuiteConfig, cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    out.push(run_check("core-grid", "round_trip", cfg.tol(1e-9), || {
        let m = worst(&cat.states, |(_, s)| s.hbar_fourier()?.inverse().sup_distance(s))?;
        Ok((m, format!("{} states", cat.states.len())))
    }));
    out.push(run_check("core-grid", "parseval", cfg.tol(1e-9), || {
        let m = worst(cat.all_pairs(), |(a, b)| {
            let (fa, fb) = (cat.state(a).hbar_fourier()?, cat.state(b).hbar_fourier()?);
            Ok((fb.inner_product(&fa)? - inner_product(cat.state(b), cat.state(a))?).norm())
        })?;
        Ok((m, "all ordered pairs".into()))
    }));
    out.push(run_check("core-grid", "grid_consistency", 4.0 * f64::EPSILON, || {
        let g = cat.grid;
        let want = 2.0 * PI * g.hbar() / g.num_points() as f64;
        Ok(((g.dp() * g.dx() - want).abs() / want, "relative dp*dx - 2 pi hbar / N".into()))
    }));
}

fn transform_checks(cfg: &SuiteConfig, cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    out.push(run_check("transforms", "bilinearity", cfg.tol(1e-12), || {
        let (a, b) = (Complex64::new(0.7, -0.3), Complex64::new(-0.2, 1.1));
        let m = worst(cat.five_pairs(), |(psi, phi)| {
            let psi2 = cat.state(2);
            let lhs = cross_wigner(&psi.scaled(a).add(&psi2.scaled(b))?, phi)?;
            let rhs = cross_wigner(psi, phi)?.scaled(a).zip_with(&cross_wigner(psi2, phi)?.scaled(b), |u, v| u + v)?;
            lhs.sup_distance(&rhs)
        })?;
        Ok((m, "5 pairs".into()))
    }));
    out.push(run_check("transforms", "hermiticity", 0.0, || {
        let m = worst(cat.five_pairs(), |(psi, phi)| {
            let w = cross_wigner(psi, phi)?.map(|v| v.conj());
            w.sup_distance(&cross_wigner(phi, psi)?)
        })?;
        Ok((m, "exact".into()))
    }));
    out.push(run_check("transforms", "diagonal_reality", cfg.tol(1e-9), || {
        let m = worst(&cat.states, |(_, s)| {
            let w = cross_wigner(s, s)?;
            Ok(w.max_abs_im() / w.max_abs())
        })?;
        Ok((m, "relative".into()))
    }));
    out.push(run_check("transforms", "moyal_bridge", cfg.tol(1e-6), || {
        let symbols: Vec<_> = test_symbols().into_iter().filter(|(n, _)| *n != "xp").collect();
        let ops = symbols.iter().map(|(_, a)| weyl_quantize(a, &cat.grid)).collect::<Result<Vec<_>>>()?;
        let m = worst(cat.five_pairs(), |(psi, phi)| {
            let w = cross_wigner(psi, phi)?;
            worst(symbols.iter().zip(&ops), |((_, a), op)| {
                Ok((w.integral_against(&a.sample(w.lattice()))? - op.matrix_element(phi, psi)?).norm())
            })
        })?;
        Ok((m, "a in {1, x, p, H}".into()))
    }));
    out.push(run_check("transforms", "fourier_pair", cfg.tol(1e-7), || {
        let m = worst(cat.five_pairs(), |(psi, phi)| {
            let w = cross_wigner(psi, phi)?;
            let a = cross_ambiguity(psi, phi)?;
            Ok(a.sup_distance(&symplectic_fourier(&w))?.max(w.sup_distance(&symplectic_fourier(&a))?))
        })?;
        Ok((m, "both directions".into()))
    }));
}

fn operator_checks(cfg: &SuiteConfig, cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    let g = cat.grid;
    let centres = [(0.0, 0.0), (1.0, 0.5), (-2.0, 1.0)];
    let on_lattice = |x: f64, p: f64| (g.x(g.nearest_index(x)), (2.0 * p / g.dp()).round() * g.dp() / 2.0);
    out.push(run_check("operators", "unitarity", cfg.tol(1e-10), || {
        let mut w: f64 = 0.0;
        for &(x, p) in &centres {
            let (x0, p0) = on_lattice(x, p);
            for op in [heisenberg(x0, p0, &g)?, grossmann_royer(x0, p0, &g)?] {
                for (_, s) in &cat.states {
                    w = w.max((op.apply(s)?.norm() - s.norm()).abs());
                }
            }
        }
        Ok((w, "norm change".into()))
    }));
    out.push(run_check("operators", "gr_involution", cfg.tol(1e-12), || {
        let m = worst(centres.iter(), |&(x, p)| {
            let (x0, p0) = on_lattice(x, p);
            let t = grossmann_royer(x0, p0, &g)?;
            t.compose(&t)?.max_abs_diff(&LinearOperator::identity(&g))
        })?;
        Ok((m, "T_GR^2 - I".into()))
    }));
    out.push(run_check("operators", "mccoy_symmetry", 0.0, || {
        let mut bad = 0;
        let mut n = 0;
        for r in 0..=4 {
            for s in 0..=4 {
                n += 1;
                if mccoy_order(r, s)?.normal_form() != &mccoy_order_mirrored(r, s)? {
                    bad += 1;
                }
            }
        }
        Ok((bad as f64, format!("{n} monomials")))
    }));
    out.push(run_check("operators", "hermiticity", cfg.tol(1e-8), || {
        let symbols = [
            PolynomialSymbol::harmonic(),
            PolynomialSymbol::monomial(1, 1, c(1.0)),
            PolynomialSymbol::monomial(2, 2, c(1.0)),
            PolynomialSymbol::monomial(3, 1, c(0.5)).add(&PolynomialSymbol::monomial(0, 3, c(-1.0))),
        ];
        let m = worst(symbols.iter(), |a| Ok(weyl_quantize(a, &g)?.hermiticity_defect()))?;
        Ok((m, "4 real symbols".into()))
    }));
    out.push(run_check("operators", "harmonic_spectrum", cfg.tol(1e-5), || {
        let ev = weyl_quantize(&PolynomialSymbol::harmonic(), &g)?.spectrum();
        let m = worst(0..6, |k| Ok((ev[k] / (g.hbar() * (k as f64 + 0.5)) - 1.0).abs()))?;
        Ok((m, "k = 0..5, relative".into()))
    }));
    out.push(run_check("operators", "weyl_square_on_resolved_states", cfg.tol(1e-6), || {
        let h = PolynomialSymbol::harmonic();
        let hop = weyl_quantize(&h, &g)?;
        let star = weyl_quantize(&h.star(&h, g.hbar()), &g)?;
        let basis = (0..=10).map(|k| hermite_state(k, &g)).collect::<Result<Vec<_>>>()?;
        Ok((hop.compose(&hop)?.max_abs_diff_on(&star, &basis)?, "hermite 0..=10".into()))
    }));
}

fn weak_checks(cfg: &SuiteConfig, cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    let g = cat.grid;
    let o = WeakOptions::default();
    out.push(run_check("weakvalues", "route_consistency", cfg.tol(1e-5), || {
        let symbols = test_symbols();
        let ops = symbols.iter().map(|(_, a)| weyl_quantize(a, &g)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&dyn SymbolSource> = symbols.iter().map(|(_, a)| a as &dyn SymbolSource).collect();
        let mut pairs = 0;
        let mut w: f64 = 0.0;
        for (a, b) in cat.all_pairs() {
            let (psi, phi) = (cat.state(a), cat.state(b));
            if inner_product(phi, psi)?.norm() < 1e-3 {
                continue;
            }
            pairs += 1;
            let gr = weak_values_via_gr(&refs, psi, phi, o)?;
            let hw = weak_values_via_heisenberg(&refs, psi, phi, o)?;
            for (n, ((_, sym), op)) in symbols.iter().zip(&ops).enumerate() {
                let vals = [
                    weak_value_braket(op, psi, phi, o)?.value,
                    weak_value_phase_space(sym, psi, phi, o)?.value,
                    gr[n].value,
                    hw[n].value,
                ];
                for i in 0..vals.len() {
                    for j in 0..i {
                        w = w.max((vals[i] - vals[j]).norm());
                    }
                }
            }
        }
        Ok((w, format!("{pairs} pairs x 5 symbols")))
    }));
    out.push(run_check("weakvalues", "real_for_real_symbols", cfg.tol(1e-9), || {
        let mut w: f64 = 0.0;
        for (_, s) in &cat.states {
            for (_, a) in test_symbols() {
                w = w.max(weak_value_phase_space(&a, s, s, o)?.value.im.abs());
            }
        }
        Ok((w, "psi = phi".into()))
    }));
    out.push(run_check("weakvalues", "moyal_average", cfg.tol(1e-6), || {
        let ops = test_symbols().into_iter().map(|(_, a)| weyl_quantize(&a, &g)).collect::<Result<Vec<_>>>()?;
        let mut w: f64 = 0.0;
        for (_, s) in &cat.states {
            for ((_, a), op) in test_symbols().iter().zip(&ops) {
                let wv = weak_value_phase_space(a, s, s, o)?.value;
                w = w.max((wv - op.matrix_element(s, s)? / s.norm_sqr()).norm());
            }
        }
        Ok((w, "psi = phi, against <psi|A|psi>".into()))
    }));
    out.push(run_check("weakvalues", "linearity_in_observable", cfg.tol(1e-9), || {
        let (alpha, beta) = (Complex64::new(0.3, 0.2), Complex64::new(-1.5, 0.0));
        let a = PolynomialSymbol::x();
        let b = PolynomialSymbol::harmonic();
        let combo = a.scale(alpha).add(&b.scale(beta));
        let m = worst(cat.five_pairs(), |(psi, phi)| {
            let lhs = weak_value_phase_space(&combo, psi, phi, o);
            let lhs = match lhs {
                Err(Error::OrthogonalStates { .. }) => return Ok(0.0),
                other => other?.value,
            };
            let rhs = alpha * weak_value_phase_space(&a, psi, phi, o)?.value
                + beta * weak_value_phase_space(&b, psi, phi, o)?.value;
            Ok((lhs - rhs).norm())
        })?;
        Ok((m, "a = x, b = H".into()))
    }));
    out.push(run_check("weakvalues", "quantization_sensitivity", cfg.tol(1e-6), || {
        let rep = naive_square_control(&PolynomialSymbol::harmonic(), cat.state(0), cat.state(0), o)?;
        let hbar = g.hbar();
        Ok(((rep.discrepancy() - c(0.25 * hbar * hbar)).norm(), format!("discrepancy={:.12}", rep.discrepancy().re)))
    }));
    out.push(run_check("weakvalues", "rho_marginals", cfg.tol(1e-7), || {
        let mut w: f64 = 0.0;
        for (a, b) in cat.all_pairs() {
            let (psi, phi) = (cat.state(a), cat.state(b));
            let r = match rho(psi, phi, o) {
                Err(Error::OrthogonalStates { .. }) => continue,
                other => other?,
            };
            let ov = inner_product(phi, psi)?;
            let want: Vec<Complex64> =
                psi.amplitudes().iter().zip(phi.amplitudes()).map(|(x, y)| x * y.conj() / ov).collect();
            w = w.max(sup(&marginal_p(&r)?, &want)).max((r.integral() - c(1.0)).norm());
        }
        Ok((w, "normalization and position marginal".into()))
    }));
    out.push(run_check("weakvalues", "pointer_statistics", cfg.tol(1e-9), || {
        let m = worst(cat.five_pairs(), |(psi, phi)| {
            let x = PolynomialSymbol::x();
            let (re, im) = match pointer_statistics(&x, psi, phi, o) {
                Err(Error::OrthogonalStates { .. }) => return Ok(0.0),
                other => other?,
            };
            let wv = weak_value_phase_space(&x, psi, phi, o)?;
            Ok((re - wv.re_part()).abs().max((im - wv.im_part()).abs()))
        })?;
        Ok((m, "a = x".into()))
    }));
}

fn reconstruction_checks(cfg: &SuiteConfig, cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    let (pairs, lambdas) = gr_cases();
    let (a, b) = pairs[1];
    let (psi, phi) = (cat.state(a), cat.state(b));
    let lam = cat.state(lambdas[1]);
    out.push(run_check("reconstruction", "lambda_independence", cfg.tol(1e-5), || {
        let w = cross_wigner(psi, phi)?;
        let recs = lambdas
            .iter()
            .map(|&l| gr_reconstruct(&w, cat.state(l), Some(inner_product(phi, cat.state(l))?)))
            .collect::<Result<Vec<_>>>()?;
        let m = worst(&recs[1..], |r| r.sup_distance(&recs[0]))?;
        Ok((m, cat.pair_name((a, b))))
    }));
    out.push(run_check("reconstruction", "scale_covariance", cfg.tol(1e-12), || {
        let w = cross_wigner(psi, phi)?;
        let k = Complex64::new(-0.8, 2.5);
        let ov = Some(inner_product(phi, lam)?);
        let base = gr_reconstruct(&w, lam, ov)?.scaled(k);
        let scaled = gr_reconstruct(&w.scaled(k), lam, ov)?;
        Ok((base.sup_distance(&scaled)? / base.max_abs(), "relative".into()))
    }));
    out.push(run_check("reconstruction", "consistency_triangle", cfg.tol(1e-5), || {
        let w = cross_wigner(psi, phi)?;
        let rec = gr_reconstruct(&w, lam, Some(inner_product(phi, lam)?))?;
        Ok((cross_wigner(&rec, phi)?.sup_distance(&w)?, "W(rec, phi) - W".into()))
    }));
    out.push(run_check("reconstruction", "rho_variant", cfg.tol(1e-9), || {
        let w = cross_wigner(psi, phi)?;
        let ov_pl = Some(inner_product(phi, lam)?);
        let direct = gr_reconstruct(&w, lam, ov_pl)?;
        let via_rho =
            gr_reconstruct_rho(&rho(psi, phi, WeakOptions::default())?, inner_product(phi, psi)?, lam, ov_pl)?;
        Ok((direct.sup_distance(&via_rho)?, String::new()))
    }));
    out.push(run_check("reconstruction", "lundeen_oracle_only", 0.0, || {
        let s = cat.state(6);
        let p0 = cat.grid.nearest_momentum(2.0);
        let a = lundeen_report(s, p0)?;
        let b = lundeen_report(&s.scaled(Complex64::new(0.0, 3.0)), p0)?;
        let same = a.reconstructed.sup_distance(&b.reconstructed)? < 1e-12;
        Ok((if same { 0.0 } else { 1.0 }, "weak-value interface only".into()))
    }));
}

fn state_checks(cfg: &SuiteConfig, cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    out.push(run_check("states", "boundary_decay", 0.0, || {
        let bad = cat.states.iter().filter(|(_, s)| s.check_boundary_decay().is_err()).count();
        Ok((bad as f64, format!("{} states", cat.states.len())))
    }));
    out.push(run_check("states", "hermite_eigen_residual", cfg.tol(1e-6), || {
        let g = cat.grid;
        let h = weyl_quantize(&PolynomialSymbol::harmonic(), &g)?;
        let m = worst(0..=10, |k| {
            let s = hermite_state(k, &g)?;
            let hs = h.apply(&s)?;
            Ok(hs
                .sup_distance(&s.scaled(c(g.hbar() * (k as f64 + 0.5))))?
                .max((hs.add(&s.scaled(c(-g.hbar() * (k as f64 + 0.5))))?).norm()))
        })?;
        Ok((m, "k = 0..10".into()))
    }));
}

fn output_checks(cat: &Catalog, out: &mut Vec<CheckOutcome>) {
    out.push(run_check("cli", "byte_identical_outputs", 0.0, || {
        let render = || -> Result<String> {
            let (psi, phi) = (cat.state(0), cat.state(3));
            let mut s = cross_wigner(psi, phi)?.to_csv_string();
            let wv = weak_value_phase_space(&PolynomialSymbol::x(), psi, phi, WeakOptions::default())?;
            s.push_str(&serde_json::to_string(&wv).map_err(|e| Error::Parse(e.to_string()))?);
            Ok(s)
        };
        Ok((if render()? == render()? { 0.0 } else { 1.0 }, "csv and json".into()))
    }));
}

/// Every module invariant.
pub fn run_invariants(cfg: &SuiteConfig) -> Result<Report> {
    let cat = Catalog::new(cfg)?;
    let mut checks = Vec::new();
    core_grid_checks(cfg, &cat, &mut checks);
    transform_checks(cfg, &cat, &mut checks);
    operator_checks(cfg, &cat, &mut checks);
    weak_checks(cfg, &cat, &mut checks);
    reconstruction_checks(cfg, &cat, &mut checks);
    state_checks(cfg, &cat, &mut checks);
    output_checks(&cat, &mut checks);
    Ok(report(cfg, checks))
}

fn report(cfg: &SuiteConfig, checks: Vec<CheckOutcome>) -> Report {
    Report {
        mode: cfg.label(),
        n_points: cfg.grid.num_points(),
        extent: cfg.grid.extent(),
        hbar: cfg.grid.hbar(),
        checks,
    }
}

/// Module invariants followed by acceptance criteria 1 to 12.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    let mut rep = run_invariants(cfg)?;
    rep.checks.extend(acceptance_checks(cfg)?);
    Ok(rep)
}
