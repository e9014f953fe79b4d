//! `weakwigner` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or input
//! error, 3 numeric precondition failure, 4 orthogonal pre/post states.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use weakwigner::checks::{run_suite, SuiteConfig};
use weakwigner::phase_space::gnuplot_heatmap_script;
use weakwigner::reconstruction::{gr_report, inversion_report, lundeen_report, ReconstructionReport};
use weakwigner::transforms::{cross_ambiguity, cross_wigner, wigner};
use weakwigner::weak::{naive_square_control, rho, weak_value_all_routes, weak_value_route, WeakOptions};
use weakwigner::{
    mccoy_order, Error, PhaseSpaceFunction, PolynomialSymbol, SpatialGrid, WeakValueResult, WeakValueRoute,
};

use config::ScenarioConfig;
use output::Outputs;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
    VerifyFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(Error::Parse(_) | Error::Io(_)) => 2,
            CliError::Core(Error::OrthogonalStates { .. }) => 4,
            CliError::Core(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e @ (Error::Parse(_) | Error::Io(_))) => write!(f, "input error: {e}"),
            CliError::Core(e @ Error::OrthogonalStates { .. }) => write!(f, "{e} (use --force to override)"),
            CliError::Core(e) => write!(f, "numeric precondition violated: {e}"),
            CliError::VerifyFailed(n) => write!(f, "verification failed: {n} check(s) did not pass"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "weakwigner", version, about = "Cross-Wigner transforms, weak values and state reconstruction")]
struct Cli {
    /// Scenario file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grid override as `N,extent`
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Reduced Planck constant; defaults to the config, then $WEAKWIGNER_HBAR, then 1
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Directory for output files
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Pair {
    /// Pre-selected state, e.g. `ground`, `hermite:2`, `coherent:1,0.5`, `cat:3`, `csv:psi.csv`
    #[arg(long)]
    pre: Option<String>,
    /// Post-selected state
    #[arg(long)]
    post: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Wigner function of a single state
    Wigner {
        #[arg(long)]
        state: Option<String>,
    },
    /// Cross-Wigner transform of the pre- and post-selected states
    CrossWigner(Pair),
    /// Cross-ambiguity function of the pre- and post-selected states
    Ambiguity(Pair),
    /// Weak value of the Weyl quantization of a symbol
    WeakValue {
        #[command(flatten)]
        pair: Pair,
        /// Weyl symbol of the observable, e.g. `H`, `x*p`, `0.5*x^2 + 0.5*p^2`
        #[arg(long = "weyl-symbol", visible_alias = "symbol")]
        symbol: Option<String>,
        #[arg(long, value_enum, default_value_t = RouteArg::PhaseSpace)]
        route: RouteArg,
        /// Report all four routes and their largest pairwise spread
        #[arg(long)]
        all_routes: bool,
        /// Return a value even for (nearly) orthogonal states, flagged as divergent
        #[arg(long)]
        force: bool,
        /// Negative control: treat the symbol as the classical square of `--base`
        /// and compare the naive phase-space average with the operator square
        #[arg(long)]
        naive: bool,
        /// Observable whose classical square is given by the symbol in `--naive` mode
        #[arg(long, default_value = "H", requires = "naive")]
        base: String,
    },
    /// Complex quasi-probability distribution of the pre/post pair
    Rho {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        force: bool,
    },
    /// Reconstruct a state and report the fidelity against the truth
    Reconstruct {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// The state to reconstruct
        #[arg(long)]
        state: Option<String>,
        /// Post-selected reference state (inversion and gr)
        #[arg(long)]
        post: Option<String>,
        /// Auxiliary state (gr)
        #[arg(long)]
        lambda: Option<String>,
        /// Post-selected momentum (lundeen)
        #[arg(long, allow_negative_numbers = true)]
        p0: Option<f64>,
        /// Reference position (inversion)
        #[arg(long, allow_negative_numbers = true)]
        x_ref: Option<f64>,
        /// Do not use the overlap <post|lambda>; the result is then fixed only up to a constant
        #[arg(long)]
        unknown_overlap: bool,
    },
    /// Weyl-ordered form of x^r p^s reduced to normal order
    Mccoy { r: u32, s: u32 },
    /// Run the invariant and acceptance suite
    Verify {
        /// N = 64, extent 16, tolerances relaxed a hundredfold
        #[arg(long)]
        quick: bool,
        /// Write a JUnit XML summary here
        #[arg(long)]
        junit: Option<PathBuf>,
        /// Include timings in the JUnit file
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Braket,
    PhaseSpace,
    GrOperator,
    Heisenberg,
}

impl From<RouteArg> for WeakValueRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Braket => WeakValueRoute::Braket,
            RouteArg::PhaseSpace => WeakValueRoute::PhaseSpace,
            RouteArg::GrOperator => WeakValueRoute::GrOperator,
            RouteArg::Heisenberg => WeakValueRoute::Heisenberg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lundeen,
    Inversion,
    Gr,
}

struct Ctx {
    cfg: ScenarioConfig,
    grid: SpatialGrid,
    out_dir: PathBuf,
}

impl Ctx {
    fn state(
        &self,
        flag: &Option<String>,
        field: &Option<config::StateField>,
        name: &str,
    ) -> CliResult<weakwigner::WaveFunction> {
        let spec = self.cfg.state(flag.as_deref(), field, name)?;
        Ok(spec.build(&self.grid)?)
    }

    fn pair(&self, pair: &Pair) -> CliResult<(weakwigner::WaveFunction, weakwigner::WaveFunction)> {
        Ok((
            self.state(&pair.pre, &self.cfg.pre_state, "pre_state")?,
            self.state(&pair.post, &self.cfg.post_state, "post_state")?,
        ))
    }

    fn symbol(&self, flag: &Option<String>) -> CliResult<PolynomialSymbol> {
        let text = flag
            .as_deref()
            .or(self.cfg.observable.as_deref())
            .ok_or_else(|| CliError::Config("no observable given (--weyl-symbol or `observable`)".into()))?;
        Ok(PolynomialSymbol::parse(text, self.grid.hbar())?)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weakwigner: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = ScenarioConfig::load(cli.config.as_deref())?;
    if let Command::Mccoy { r, s } = cli.command {
        let expr = mccoy_order(r, s)?;
        println!("{expr}");
        return Ok(());
    }
    if let Command::Verify { quick, junit, timing } = &cli.command {
        let hbar = match cli.hbar.or(cfg.grid.hbar) {
            Some(h) => h,
            None => config::hbar_from_env()?.unwrap_or(1.0),
        };
        return verify(*quick, hbar, junit.as_deref(), *timing);
    }
    let grid = cfg.grid(cli.grid.as_deref(), cli.hbar)?;
    let out_dir = cli.out_dir.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let ctx = Ctx { cfg, grid, out_dir };

    match &cli.command {
        Command::Wigner { state } => {
            let psi = ctx.state(state, &ctx.cfg.pre_state, "state")?;
            write_phase_space(&ctx, "wigner", "Wigner function", &wigner(&psi)?)
        }
        Command::CrossWigner(pair) => {
            let (psi, phi) = ctx.pair(pair)?;
            write_phase_space(&ctx, "cross_wigner", "cross-Wigner transform", &cross_wigner(&psi, &phi)?)
        }
        Command::Ambiguity(pair) => {
            let (psi, phi) = ctx.pair(pair)?;
            write_phase_space(&ctx, "ambiguity", "cross-ambiguity function", &cross_ambiguity(&psi, &phi)?)
        }
        Command::Rho { pair, force } => {
            let (psi, phi) = ctx.pair(pair)?;
            write_phase_space(
                &ctx,
                "rho",
                "complex quasi-probability",
                &rho(&psi, &phi, WeakOptions { force: *force })?,
            )
        }
        Command::WeakValue { pair, symbol, route, all_routes, force, naive, base } => {
            let (psi, phi) = ctx.pair(pair)?;
            let sym = ctx.symbol(symbol)?;
            let opts = WeakOptions { force: *force };
            let text = if *naive {
                pretty(&naive_json(&ctx, &sym, base, &psi, &phi, opts)?)
            } else if *all_routes {
                let results = weak_value_all_routes(&sym, &psi, &phi, opts)?;
                let mut spread: f64 = 0.0;
                for a in &results {
                    for b in &results {
                        spread = spread.max((a.value - b.value).norm());
                    }
                }
                pretty(&RouteTable { results, max_route_spread: spread })
            } else {
                pretty(&weak_value_route((*route).into(), &sym, &psi, &phi, opts)?)
            };
            let mut out = Outputs::default();
            out.add(ctx.path("weak_value.json"), text.clone());
            out.commit().map_err(Error::from)?;
            print!("{text}");
            Ok(())
        }
        Command::Reconstruct { method, state, post, lambda, p0, x_ref, unknown_overlap } => {
            let method = match method {
                Some(m) => *m,
                None => match ctx.cfg.method.as_deref() {
                    Some("lundeen") | None => MethodArg::Lundeen,
                    Some("inversion") => MethodArg::Inversion,
                    Some("gr") => MethodArg::Gr,
                    Some(other) => return Err(CliError::Config(format!("unknown method `{other}`"))),
                },
            };
            let truth = ctx.state(state, &ctx.cfg.pre_state, "state")?;
            let report = match method {
                MethodArg::Lundeen => lundeen_report(&truth, p0.or(ctx.cfg.p0).unwrap_or(0.0))?,
                MethodArg::Inversion => {
                    let phi = ctx.state(post, &ctx.cfg.post_state, "post_state")?;
                    inversion_report(&truth, &phi, x_ref.or(ctx.cfg.x_ref).unwrap_or(0.0))?
                }
                MethodArg::Gr => {
                    let phi = ctx.state(post, &ctx.cfg.post_state, "post_state")?;
                    let lam = ctx.state(lambda, &ctx.cfg.lambda_state, "lambda_state")?;
                    gr_report(&truth, &phi, &lam, !unknown_overlap)?
                }
            };
            write_reconstruction(&ctx, &report)
        }
        Command::Mccoy { .. } | Command::Verify { .. } => unreachable!(),
    }
}

#[derive(Serialize)]
struct RouteTable {
    results: Vec<WeakValueResult>,
    max_route_spread: f64,
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types always serialize");
    s.push('\n');
    s
}

fn cjson(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn naive_json(
    ctx: &Ctx,
    sym: &PolynomialSymbol,
    base: &str,
    psi: &weakwigner::WaveFunction,
    phi: &weakwigner::WaveFunction,
    opts: WeakOptions,
) -> CliResult<serde_json::Value> {
    let h = PolynomialSymbol::parse(base, ctx.grid.hbar())?;
    let sq = h.square();
    let mismatch = sym.terms().count() != sq.terms().count()
        || sym.terms().zip(sq.terms()).any(|(a, b)| a.0 != b.0 || a.1 != b.1 || (a.2 - b.2).norm() > 1e-12);
    if mismatch {
        return Err(CliError::Config(format!("--naive: symbol `{sym}` is not the classical square of `{h}`")));
    }
    let r = naive_square_control(&h, psi, phi, opts)?;
    Ok(json!({
        "base": h.to_string(),
        "mean": cjson(r.mean),
        "naive_square": cjson(r.naive),
        "moyal_square": cjson(r.corrected),
        "operator_square": cjson(r.operator_square),
        "naive_variance": cjson(r.naive_variance()),
        "corrected_variance": cjson(r.corrected_variance()),
        "discrepancy": cjson(r.discrepancy()),
    }))
}

fn write_phase_space(ctx: &Ctx, stem: &str, title: &str, f: &PhaseSpaceFunction) -> CliResult<()> {
    let csv = format!("{stem}.csv");
    let mut out = Outputs::default();
    out.add(ctx.path(&csv), f.to_csv_string());
    out.add(ctx.path(&format!("{stem}.gp")), gnuplot_heatmap_script(&csv, title, f.lattice()));
    for p in out.commit().map_err(Error::from)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn write_reconstruction(ctx: &Ctx, report: &ReconstructionReport) -> CliResult<()> {
    let mut out = Outputs::default();
    out.add(ctx.path("reconstruction.json"), pretty(report));
    out.add(ctx.path("reconstructed.csv"), report.reconstructed.to_csv_string());
    out.commit().map_err(Error::from)?;
    println!("method={} fidelity={:.15}", report.method.name(), report.fidelity);
    Ok(())
}

fn verify(quick: bool, hbar: f64, junit: Option<&Path>, timing: bool) -> CliResult<()> {
    let start = Instant::now();
    let cfg = if quick { SuiteConfig::quick(hbar)? } else { SuiteConfig::full(hbar)? };
    let report = run_suite(&cfg)?;
    print!("{}", report.text());
    eprintln!("verify finished in {:.1} s", start.elapsed().as_secs_f64());
    if let Some(path) = junit {
        let mut out = Outputs::default();
        out.add(path.to_path_buf(), report.junit(timing));
        out.commit().map_err(Error::from)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(report.failures()))
    }
}
