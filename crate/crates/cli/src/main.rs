//! `moment-kit` command-line front end.
//!
//! Exit codes: 0 success, 1 bad flags or input, 2 numerical failure,
//! 3 moment vector not realizable (`check`, `atoms`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use moment_kit::closures::ClosureModel;
use moment_kit::metrics::read_field_csv;
use moment_kit::realizability::{
    is_realizable_full, is_realizable_mixed_normalized, minimal_atomic_measure, mixed_half_atoms, Side,
};
use moment_kit::runner::{self, BenchSpec, RunSpec, Solver, DEFAULT_SAMPLES};
use moment_kit::scenario::Scenario;
use moment_kit::{AtomicDensity, MixedMomentVector, MomentError, MomentVector};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_NOT_REALIZABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "moment-kit", version, about = "Moment closures and solvers for 1D Fokker-Planck transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one model (or the `fp` reference) on a scenario
    Run(RunArgs),
    /// Test a moment vector for realizability
    Check(MomentArgs),
    /// Recover a minimal atomic measure from a realizable moment vector
    Atoms(MomentArgs),
    /// Compare several models against the reference and write error tables
    Bench(BenchArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Builtin scenario name or path to a scenario file
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 200)]
    nx: usize,
    /// Angular nodes of the reference solver
    #[arg(long, default_value_t = 100)]
    nmu: usize,
    /// End time (defaults to the scenario's)
    #[arg(long)]
    tend: Option<f64>,
    /// Uniform sample times used for the space-time norms
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// pn:N, m1, k1, mpn:N, mm1, mk1, mk2 or fp
    #[arg(long)]
    model: String,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated model names
    #[arg(long, value_delimiter = ',', required = true)]
    models: Vec<String>,
    /// `fp` to use (or compute) the reference in the output directory, or a field CSV
    #[arg(long, default_value = "fp")]
    reference: String,
}

#[derive(Args)]
struct MomentArgs {
    /// Mixed moments `ψ⁽⁰⁾ ψ₊⁽¹⁾..ψ₊⁽ⁿ⁾ ψ₋⁽¹⁾..ψ₋⁽ⁿ⁾` instead of full moments on [-1, 1]
    #[arg(long)]
    mixed: bool,
    #[arg(long)]
    order: usize,
    /// Tolerance on the normalized vector
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(required = true, allow_negative_numbers = true)]
    moments: Vec<f64>,
}

/// Errors tagged with the exit code they map to.
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<MomentError> for Failure {
    fn from(e: MomentError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.into())
        } else {
            Failure::Usage(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Check(a) => cmd_check(a),
        Command::Atoms(a) => cmd_atoms(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

/// Caps the global rayon pool at `MOMENT_KIT_THREADS`.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("MOMENT_KIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().with_context(|| format!("MOMENT_KIT_THREADS={v:?} is not a thread count"))?;
    if n == 0 {
        bail!("MOMENT_KIT_THREADS must be at least 1");
    }
    // sequential builds have no pool to cap
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn load_scenario(g: &GridArgs) -> Result<Scenario, Failure> {
    if g.nx == 0 {
        return Err(anyhow::anyhow!("--nx must be positive").into());
    }
    if g.nmu < 2 {
        return Err(anyhow::anyhow!("--nmu must be at least 2").into());
    }
    if let Some(t) = g.tend {
        if !(t > 0.0 && t.is_finite()) {
            return Err(anyhow::anyhow!("--tend must be positive, got {t}").into());
        }
    }
    Scenario::resolve(&g.scenario).map_err(|e| Failure::Usage(e.into()))
}

fn cmd_run(a: RunArgs) -> Result<u8, Failure> {
    let solver: Solver = a.model.parse().map_err(|e: MomentError| Failure::Usage(e.into()))?;
    let s = load_scenario(&a.grid)?;
    let spec =
        RunSpec { n_mu: a.grid.nmu, t_end: a.grid.tend, samples: a.grid.samples, ..RunSpec::new(solver, a.grid.nx) };
    let out = runner::run(&s, &spec)?;
    let files = out.write(&a.grid.out)?;
    println!(
        "{} on {}: t = {}, {} steps ({} rejected), min density {:.3e}, {:.2}s",
        out.solver, out.scenario, out.t_end, out.stats.accepted, out.stats.rejected, out.min_density, out.wall_seconds
    );
    print_files(&files);
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8, Failure> {
    let models = a
        .models
        .iter()
        .map(|m| m.parse::<ClosureModel>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(e.into()))?;
    let s = load_scenario(&a.grid)?;
    let spec =
        BenchSpec { t_end: a.grid.tend, samples: a.grid.samples, ..BenchSpec::new(models, a.grid.nx, a.grid.nmu) };
    let t_end = a.grid.tend.unwrap_or(s.t_end);
    let reference = if a.reference.eq_ignore_ascii_case("fp") {
        let r = runner::load_reference(&a.grid.out, a.grid.nx, t_end)?;
        if r.is_none() {
            eprintln!("no stored reference in {}, running fp first", a.grid.out.display());
        }
        r
    } else {
        Some(read_reference(Path::new(&a.reference))?)
    };
    let out = runner::bench(&s, &spec, reference)?;
    let files = out.write(&a.grid.out)?;
    print!("{}", moment_kit::metrics::table_text(&out.title(), &out.rows));
    print_files(&files);
    Ok(0)
}

fn read_reference(path: &Path) -> Result<moment_kit::metrics::DensityField, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading reference {}", path.display()))?;
    read_field_csv(&text).map_err(|e| Failure::Usage(e.into()))
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("  wrote {}", f.display());
    }
}

enum Moments {
    Full(MomentVector),
    Mixed(MixedMomentVector),
}

fn parse_moments(a: &MomentArgs) -> Result<Moments, Failure> {
    let n = a.order;
    let want = if a.mixed { 2 * n + 1 } else { n + 1 };
    if a.mixed && n == 0 {
        return Err(anyhow::anyhow!("mixed moments need --order of at least 1").into());
    }
    if a.moments.len() != want {
        return Err(anyhow::anyhow!("order {n} needs {want} values, got {}", a.moments.len()).into());
    }
    if a.moments.iter().any(|v| !v.is_finite()) {
        return Err(anyhow::anyhow!("moments must be finite").into());
    }
    let m = if a.mixed {
        Moments::Mixed(MixedMomentVector::from_slice(&a.moments).map_err(|e| Failure::Usage(e.into()))?)
    } else {
        Moments::Full(MomentVector::full(a.moments.clone()).map_err(|e| Failure::Usage(e.into()))?)
    };
    Ok(m)
}

fn cmd_check(a: MomentArgs) -> Result<u8, Failure> {
    let verdict = match parse_moments(&a)? {
        Moments::Full(m) => {
            let scale = m.get(0);
            let normalized =
                if scale > 0.0 { MomentVector::full(m.values().iter().map(|v| v / scale).collect())? } else { m };
            is_realizable_full(&normalized, a.tol)
        }
        Moments::Mixed(g) => is_realizable_mixed_normalized(&g, a.tol),
    };
    if verdict.realizable {
        // + 0.0 turns a -0 slack into 0
        println!("realizable (margin {:.3e})", verdict.margin + 0.0);
        Ok(0)
    } else {
        println!("not realizable: {} violated (margin {:.3e})", verdict.failed_condition, verdict.margin);
        Ok(EXIT_NOT_REALIZABLE)
    }
}

fn print_atoms(label: &str, d: &AtomicDensity) {
    println!("{label}: {} atom(s)", d.atoms.len());
    for atom in &d.atoms {
        println!("  mu = {:+.12}  weight = {:.12}", atom.position, atom.weight);
    }
}

fn cmd_atoms(a: MomentArgs) -> Result<u8, Failure> {
    let not_realizable = |e: &MomentError| matches!(e, MomentError::NotRealizable { .. });
    match parse_moments(&a)? {
        Moments::Full(m) => match minimal_atomic_measure(&m) {
            Ok(d) => print_atoms("full", &d),
            Err(e) if not_realizable(&e) => {
                println!("not realizable: {e}");
                return Ok(EXIT_NOT_REALIZABLE);
            }
            Err(e) => return Err(e.into()),
        },
        Moments::Mixed(g) => {
            let v = is_realizable_mixed_normalized(&g, a.tol);
            if !v.realizable {
                println!("not realizable: {} violated (margin {:.3e})", v.failed_condition, v.margin);
                return Ok(EXIT_NOT_REALIZABLE);
            }
            let plus = mixed_half_atoms(Side::Plus, &g)?;
            let minus = mixed_half_atoms(Side::Minus, &g)?;
            print_atoms("plus", &plus);
            print_atoms("minus", &minus);
            let carried: f64 = plus.atoms.iter().chain(&minus.atoms).map(|x| x.weight).sum();
            let at_zero = g.psi0 - carried;
            if at_zero.abs() > a.tol * g.psi0.abs().max(1.0) {
                println!("zero: weight {at_zero:.12} at mu = 0 (up to the split)");
            }
        }
    }
    Ok(0)
}
