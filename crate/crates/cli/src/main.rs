//! Command-line front end: solve, norm, verify and sweep.

mod config;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use wfrac::frac_calc::{FracOrder, TimeGrid};
use wfrac::solver::{load_solution, manufactured_rhs, solve, Coefficients, EquationSpec, ExactSolution, SolveOptions};
use wfrac::spaces::{mixed_norm, BesselSymbol, Field, MixedNormSpec, SpaceGrid, SpaceTimeField};
use wfrac::verify::{run_check, run_suite_with, CheckId, CheckSpec, Params, Report, SuiteOptions, DEFAULT_SEED};
use wfrac::weights::{Domain, Weight};

#[derive(Parser, Debug)]
#[command(name = "wfrac", version, about = "Time-fractional equations in weighted mixed-norm Sobolev spaces")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the equation for a built-in forcing and write the solution.
    Solve(Options),
    /// Mixed norm of a stored solution.
    Norm(Options),
    /// Run a verification suite.
    Verify(Options),
    /// Run one check over the Cartesian product of the listed parameters.
    Sweep(Options),
}

/// Every subcommand takes the same flags so that one config file serves all
/// of them; each reads the ones it needs. List-valued flags (`sweep` only)
/// take comma-separated values, or `;`-separated for weights.
#[derive(Args, Debug, Clone)]
struct Options {
    /// Fractional order in (0, 2).
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    alpha: Vec<f64>,
    /// Spatial integrability exponent.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    p: Vec<f64>,
    /// Temporal integrability exponent.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    q: Vec<f64>,
    /// Bessel smoothness of the norm.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, allow_hyphen_values = true)]
    gamma: Vec<f64>,
    /// Spatial weight: `1`, `const:c`, `power:l`, `power:l@y` or `table:path`.
    #[arg(long = "weight-x", value_delimiter = ';', action = ArgAction::Set)]
    weight_x: Vec<String>,
    /// Temporal weight, same syntax.
    #[arg(long = "weight-t", value_delimiter = ';', action = ArgAction::Set)]
    weight_t: Vec<String>,
    /// Spatial nodes per axis (the refinement levels for `sweep`).
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    grid: Vec<usize>,
    /// Number of time steps.
    #[arg(long)]
    tsteps: Option<usize>,
    /// Final time.
    #[arg(long = "T", value_delimiter = ',', action = ArgAction::Set)]
    final_time: Vec<f64>,
    /// Half-width `L` of the periodic box `[-L, L)^d`.
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    /// Space dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Forcing of `solve`.
    #[arg(long, value_enum)]
    rhs: Option<Rhs>,
    /// Suite id for `verify`.
    #[arg(long)]
    suite: Option<String>,
    /// Check id for `sweep`.
    #[arg(long)]
    check: Option<String>,
    /// Check variants for `sweep`.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    variant: Vec<String>,
    /// Seed of the test families.
    #[arg(long)]
    seed: Option<u64>,
    /// Bessel symbol convention (`sign-flipped` is a deliberate mutation).
    #[arg(long, value_enum)]
    bessel: Option<Bessel>,
    /// Stored solution for `norm`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON object of flag values; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Rhs {
    /// `exp(-(x / (L/8))^2)`, constant in time.
    Bump,
    /// `sin(pi x / L)`, constant in time.
    Sine,
    /// Forcing of the exact solution `t^2 sin(pi x / L)`.
    Manufactured,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Bessel {
    Standard,
    SignFlipped,
}

impl From<Bessel> for BesselSymbol {
    fn from(b: Bessel) -> Self {
        match b {
            Bessel::Standard => BesselSymbol::Standard,
            Bessel::SignFlipped => BesselSymbol::SignFlipped,
        }
    }
}

enum Failure {
    /// Bad arguments or inputs.
    Input(String),
    /// Checks that did not pass.
    Checks(Vec<String>),
}

impl From<wfrac::Error> for Failure {
    fn from(e: wfrac::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Lossless float output.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn single<T: Copy>(values: &[T], name: &str, default: Option<T>) -> Result<T, Failure> {
    match (values, default) {
        ([], Some(d)) => Ok(d),
        ([], None) => Err(Failure::Input(format!("--{name} is required"))),
        ([v], _) => Ok(*v),
        _ => Err(Failure::Input(format!("--{name} takes a single value here"))),
    }
}

fn single_str<'a>(values: &'a [String], name: &str, default: &'a str) -> Result<&'a str, Failure> {
    match values {
        [] => Ok(default),
        [v] => Ok(v),
        _ => Err(Failure::Input(format!("--{name} takes a single value here"))),
    }
}

impl Options {
    fn half_width(&self) -> f64 {
        self.half_width.unwrap_or(PI)
    }

    fn dim(&self) -> usize {
        self.dim.unwrap_or(1)
    }

    /// The mixed norm named by the flags over `(0, T)`.
    fn norm_spec(&self, final_time: f64) -> Result<MixedNormSpec, Failure> {
        let p = single(&self.p, "p", Some(2.0))?;
        let q = single(&self.q, "q", Some(2.0))?;
        let gamma = single(&self.gamma, "gamma", Some(0.0))?;
        let space = Domain::spatial(self.dim(), self.half_width())?;
        let w_x = Weight::parse_spec(single_str(&self.weight_x, "weight-x", "1")?, space)?;
        let w_t = Weight::parse_spec(single_str(&self.weight_t, "weight-t", "1")?, Domain::temporal(final_time)?)?;
        Ok(MixedNormSpec::new(q, p, gamma, w_t, w_x, final_time)?)
    }
}

fn forcing(rhs: Rhs, order: FracOrder, tg: &TimeGrid<f64>, sg: SpaceGrid) -> Result<SpaceTimeField<f64>, Failure> {
    let l = sg.half_width();
    Ok(match rhs {
        Rhs::Bump => SpaceTimeField::from_fn(tg.clone(), sg, |_, x| {
            (-x.iter().map(|v| (8.0 * v / l).powi(2)).sum::<f64>()).exp()
        }),
        Rhs::Sine => SpaceTimeField::from_fn(tg.clone(), sg, |_, x| (PI * x[0] / l).sin()),
        Rhs::Manufactured => {
            let phi = Field::from_fn(sg, |x: &[f64]| (PI * x[0] / l).sin());
            manufactured_rhs(&ExactSolution::power(tg.clone(), 2.0, phi), order, &Coefficients::laplacian(sg.dim()))?
        }
    })
}

fn run_solve(o: &Options) -> Outcome {
    let out = o.out.as_ref().ok_or_else(|| Failure::Input("--out is required".into()))?;
    let order = FracOrder::for_equation(single(&o.alpha, "alpha", None)?)?;
    let final_time = single(&o.final_time, "T", Some(1.0))?;
    let tg = TimeGrid::uniform(final_time, o.tsteps.unwrap_or(128))?;
    let sg = SpaceGrid::new(o.dim(), o.half_width(), single(&o.grid, "grid", Some(128))?)?;
    let norm = o.norm_spec(final_time)?;
    let f = forcing(o.rhs.unwrap_or(Rhs::Bump), order, &tg, sg)?;
    let spec = EquationSpec::laplacian(order, f)?;
    let sol = solve(&spec, &SolveOptions::default())?;
    let manifest = sol.save(out)?;
    println!("solution {}", out.display());
    println!("manifest {}", wfrac::solver::manifest_path(out).display());
    println!("scheme {}", manifest.scheme);
    println!("residual {}", fmt(manifest.residual));
    println!("max_abs {}", fmt(sol.u().max_abs()));
    println!("norm {}", fmt(mixed_norm(sol.u(), &norm)?));
    Ok(())
}

fn run_norm(o: &Options) -> Outcome {
    let input = o.input.as_ref().ok_or_else(|| Failure::Input("--input is required".into()))?;
    let (manifest, u) = load_solution(input)?;
    let mut o = o.clone();
    // the stored grid fixes the box
    o.dim = Some(manifest.space.dim());
    o.half_width = Some(manifest.space.half_width());
    let final_time = single(&o.final_time, "T", Some(manifest.final_time))?;
    let norm = o.norm_spec(final_time)?;
    println!("norm {}", fmt(mixed_norm(&u, &norm)?));
    Ok(())
}

fn report_outcome(report: &Report, out: Option<&PathBuf>) -> Outcome {
    for c in &report.checks {
        println!("{} {}", if c.pass { "pass" } else { "FAIL" }, c.check);
        for f in c.failures() {
            println!("    {f}");
        }
    }
    if let Some(path) = out {
        let csv = report.save(path)?;
        println!("report {}", path.display());
        println!("rows {}", csv.display());
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Checks(report.failing().iter().map(|c| c.to_string()).collect()))
    }
}

fn suite_options(o: &Options) -> SuiteOptions {
    SuiteOptions {
        seed: o.seed.unwrap_or(DEFAULT_SEED),
        bessel: o.bessel.map_or(BesselSymbol::Standard, Into::into),
    }
}

fn run_verify(o: &Options) -> Outcome {
    let name = o.suite.as_deref().unwrap_or("fast");
    let report = run_suite_with(name, &suite_options(o))?;
    report_outcome(&report, o.out.as_ref())
}

/// Options as a list, `None` when the flag is absent.
fn listed<T: Clone>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().cloned().map(Some).collect()
    }
}

fn sweep_params(o: &Options) -> Vec<Params> {
    let mut out = vec![Params::new()];
    macro_rules! product {
        ($values:expr, $set:ident) => {
            out = out
                .into_iter()
                .flat_map(|base| {
                    listed(&$values).into_iter().map(move |v| match v {
                        Some(v) => base.clone().$set(v),
                        None => base.clone(),
                    })
                })
                .collect();
        };
    }
    product!(o.alpha, with_alpha);
    product!(o.p, with_p);
    product!(o.q, with_q);
    product!(o.gamma, with_gamma);
    product!(o.final_time, with_final_time);
    let strs = |v: &[String]| v.to_vec();
    for (values, field) in [(strs(&o.weight_x), 0), (strs(&o.weight_t), 1), (strs(&o.variant), 2)] {
        out = out
            .into_iter()
            .flat_map(|base| {
                listed(&values).into_iter().map(move |v| match v {
                    Some(v) => match field {
                        0 => base.clone().with_w_x(&v),
                        1 => base.clone().with_w_t(&v),
                        _ => base.clone().with_variant(&v),
                    },
                    None => base.clone(),
                })
            })
            .collect();
    }
    out
}

fn run_sweep(o: &Options) -> Outcome {
    let check: CheckId = o
        .check
        .as_deref()
        .ok_or_else(|| Failure::Input("--check is required".into()))?
        .parse()?;
    if o.grid.is_empty() {
        return Err(Failure::Input("--grid lists the refinement levels and is required".into()));
    }
    let options = suite_options(o);
    let spec = CheckSpec::new(check, sweep_params(o), o.grid.clone())?
        .with_seed(options.seed)
        .with_bessel(options.bessel);
    let result = run_check(&spec)?;
    for inst in &result.instances {
        let constants: Vec<String> = inst.constants().into_iter().map(fmt).collect();
        println!(
            "{} [{}] constants {} drift {}",
            inst.verdict,
            inst.params.label(),
            constants.join(" "),
            fmt(inst.drift)
        );
    }
    let report = Report::new("sweep", options.seed, options.bessel, vec![result]);
    report_outcome(&report, o.out.as_ref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match config::merged_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Solve(o) => run_solve(o),
        Command::Norm(o) => run_norm(o),
        Command::Verify(o) => run_verify(o),
        Command::Sweep(o) => run_sweep(o),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(ids)) => {
            eprintln!("failing checks: {}", ids.join(" "));
            ExitCode::from(1)
        }
    }
}
