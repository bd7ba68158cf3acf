//! One solver on one scenario, and model-versus-reference error tables.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::closures::ClosureModel;
use crate::error::{MomentError, Result};
use crate::fp::{fp_solve_logged, FpOptions, FpSystem};
use crate::fv::{fv_solve_logged, FvOptions};
use crate::metrics::{
    field_csv, read_field_csv, snapshot_csv, snapshot_path, table_csv, table_text, DensityField, ErrorRow,
};
use crate::ode::{IntegrationStats, StepInfo};
use crate::par::Exec;
use crate::scenario::Scenario;

/// Uniform samples per run used for the space-time norms.
pub const DEFAULT_SAMPLES: usize = 40;

/// A moment model or the discrete-ordinates reference.
#[derive(Clone, Debug, PartialEq)]
pub enum Solver {
    Moment(ClosureModel),
    Reference,
}

impl FromStr for Solver {
    type Err = MomentError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("fp") {
            Ok(Solver::Reference)
        } else {
            Ok(Solver::Moment(s.parse()?))
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Solver::Moment(m) => m.fmt(f),
            Solver::Reference => f.write_str("fp"),
        }
    }
}

impl Solver {
    /// Name usable inside file names (`pn:5` becomes `pn5`).
    pub fn file_label(&self) -> String {
        self.to_string().replace(':', "")
    }
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub solver: Solver,
    pub n_x: usize,
    /// Angular nodes of the reference solver.
    pub n_mu: usize,
    /// Defaults to the scenario's end time.
    pub t_end: Option<f64>,
    /// Forces the split implicit reference integrator on or off; by default
    /// it is used when the collision term is much stiffer than transport.
    pub stiff: Option<bool>,
    pub samples: usize,
    pub exec: Exec,
}

impl RunSpec {
    pub fn new(solver: Solver, n_x: usize) -> Self {
        Self { solver, n_x, n_mu: 100, t_end: None, stiff: None, samples: DEFAULT_SAMPLES, exec: Exec::default() }
    }
}

/// Uniform sample times on `(0, t_end]` merged with the scenario's snapshot
/// and characteristic times that fall inside.
pub fn sample_times(s: &Scenario, t_end: f64, samples: usize) -> Vec<f64> {
    let mut ts: Vec<f64> =
        s.snapshots.iter().chain([&s.char_time]).copied().filter(|&t| t > 0.0 && t <= t_end).collect();
    ts.push(t_end);
    let exact_len = ts.len();
    ts.extend((1..=samples).map(|k| t_end * k as f64 / samples as f64));
    // keep the exactly scheduled times over nearby uniform ones
    let mut out: Vec<f64> = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        let tol = 1e-9 * t.max(1.0);
        if i >= exact_len && out.iter().any(|&o| (o - t).abs() <= tol) {
            continue;
        }
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub scenario: String,
    pub solver: Solver,
    pub t_end: f64,
    /// Snapshot times written as CSV.
    pub snapshots: Vec<f64>,
    pub field: DensityField,
    pub stats: IntegrationStats,
    pub steps: Vec<StepInfo>,
    pub min_density: f64,
    /// `‖∂ₜu‖₁` at the end (moment models only).
    pub final_rate: Option<f64>,
    /// `(t, mass, accumulated inflow)` per sample (moment models only).
    pub mass: Vec<(f64, f64, f64)>,
    /// Mean first-moment anisotropy per sample (reference only).
    pub anisotropy: Vec<f64>,
    pub stiff: bool,
    pub wall_seconds: f64,
}

pub fn run(s: &Scenario, spec: &RunSpec) -> Result<RunOutput> {
    let t_end = spec.t_end.unwrap_or(s.t_end);
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(MomentError::Domain(format!("end time must be positive, got {t_end}")));
    }
    if spec.n_x == 0 {
        return Err(MomentError::Domain("need at least one cell".into()));
    }
    let samples = sample_times(s, t_end, spec.samples);
    let snapshots: Vec<f64> = {
        let mut v: Vec<f64> = s.snapshots.iter().copied().filter(|&t| t <= t_end).collect();
        if v.is_empty() {
            v.push(t_end);
        }
        v
    };
    let start = std::time::Instant::now();
    let mut steps = Vec::new();
    let log = |st: StepInfo| steps.push(st);
    let mut out = match &spec.solver {
        Solver::Moment(model) => {
            let opts = FvOptions { exec: spec.exec, ..FvOptions::new(spec.n_x) };
            let sol = fv_solve_logged(model.clone(), s, &opts, &samples, log)?;
            RunOutput {
                scenario: s.name.clone(),
                solver: spec.solver.clone(),
                t_end,
                snapshots,
                field: sol.field,
                stats: sol.stats,
                steps: Vec::new(),
                min_density: sol.min_density,
                final_rate: Some(sol.final_rate),
                mass: sol.mass,
                anisotropy: Vec::new(),
                stiff: false,
                wall_seconds: 0.0,
            }
        }
        Solver::Reference => {
            if spec.n_mu < 2 {
                return Err(MomentError::Domain("the reference needs at least two angular nodes".into()));
            }
            let stiff = match spec.stiff {
                Some(v) => v,
                None => {
                    let sys = FpSystem::new(s, spec.n_x, spec.n_mu, Exec::Sequential)?;
                    sys.explicit_dt() < 0.25 * sys.advective_dt()
                }
            };
            let opts = FpOptions { stiff, exec: spec.exec, ..FpOptions::new(spec.n_x, spec.n_mu) };
            let sol = fp_solve_logged(s, &opts, &samples, log)?;
            RunOutput {
                scenario: s.name.clone(),
                solver: Solver::Reference,
                t_end,
                snapshots,
                field: sol.field,
                stats: sol.stats,
                steps: Vec::new(),
                min_density: sol.min_value,
                final_rate: None,
                mass: Vec::new(),
                anisotropy: sol.anisotropy,
                stiff,
                wall_seconds: 0.0,
            }
        }
    };
    out.steps = steps;
    out.wall_seconds = start.elapsed().as_secs_f64();
    Ok(out)
}

impl RunOutput {
    pub fn label(&self) -> String {
        self.solver.file_label()
    }

    /// Human-readable log: summary header then one line per accepted step.
    pub fn log_text(&self) -> String {
        let st = &self.stats;
        let mut out = String::new();
        let _ = writeln!(out, "# scenario {}", self.scenario);
        let _ = writeln!(out, "# solver {}", self.solver);
        let _ = writeln!(out, "# cells {}", self.field.x.len());
        let _ = writeln!(out, "# t_end {}", self.t_end);
        if self.solver == Solver::Reference {
            let _ = writeln!(out, "# integrator {}", if self.stiff { "strang-implicit" } else { "rk23" });
        }
        let _ = writeln!(out, "# accepted {} rejected {} rhs_evals {}", st.accepted, st.rejected, st.rhs_evals);
        let _ = writeln!(out, "# projections {}", st.projections);
        let _ = writeln!(out, "# dt_min {:e} dt_max {:e}", st.dt_min_used, st.dt_max_used);
        let _ = writeln!(out, "# min_density {:e}", self.min_density);
        if let Some(r) = self.final_rate {
            let _ = writeln!(out, "# final_rate_l1 {r:e}");
        }
        if let (Some(first), Some(last)) = (self.mass.first(), self.mass.last()) {
            let _ = writeln!(out, "# mass {} -> {} (net inflow {})", first.1, last.1, last.2 - first.2);
        }
        let _ = writeln!(out, "# wall_seconds {:.3}", self.wall_seconds);
        out.push_str("step,t,dt,projected\n");
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "{},{},{:e},{}", i + 1, s.t, s.dt, s.projected);
        }
        out
    }

    /// Writes the snapshot CSVs and `run_<label>.log` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let label = self.label();
        let mut written = Vec::new();
        for &t in &self.snapshots {
            let path = snapshot_path(dir, &label, t);
            fs::write(&path, snapshot_csv(&self.field.x, self.field.snapshot(t)?))?;
            written.push(path);
        }
        let path = dir.join(format!("run_{label}.log"));
        fs::write(&path, self.log_text())?;
        written.push(path);
        Ok(written)
    }
}

/// Models compared against one reference run.
#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub models: Vec<ClosureModel>,
    pub n_x: usize,
    pub n_mu: usize,
    pub t_end: Option<f64>,
    pub samples: usize,
    /// Fan-out over models.
    pub jobs: Exec,
    /// Fan-out inside each solver.
    pub exec: Exec,
}

impl BenchSpec {
    pub fn new(models: Vec<ClosureModel>, n_x: usize, n_mu: usize) -> Self {
        Self { models, n_x, n_mu, t_end: None, samples: DEFAULT_SAMPLES, jobs: Exec::default(), exec: Exec::default() }
    }

    fn run_spec(&self, solver: Solver) -> RunSpec {
        RunSpec {
            n_mu: self.n_mu,
            t_end: self.t_end,
            samples: self.samples,
            exec: self.exec,
            ..RunSpec::new(solver, self.n_x)
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOutput {
    pub scenario: String,
    /// Time of the characteristic errors.
    pub t_star: f64,
    pub reference: DensityField,
    pub runs: Vec<RunOutput>,
    pub rows: Vec<ErrorRow>,
}

/// Runs the reference (unless one is supplied) and every model, then
/// tabulates the relative errors.
pub fn bench(s: &Scenario, spec: &BenchSpec, reference: Option<DensityField>) -> Result<BenchOutput> {
    let t_end = spec.t_end.unwrap_or(s.t_end);
    let t_star = if s.char_time <= t_end { s.char_time } else { t_end };
    let reference = match reference {
        Some(r) => r,
        None => run(s, &spec.run_spec(Solver::Reference))?.field,
    };
    let runs =
        spec.jobs.map_tasks(spec.models.len(), |i| run(s, &spec.run_spec(Solver::Moment(spec.models[i].clone()))));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = runs
        .iter()
        .map(|r| ErrorRow::compute(&r.solver.to_string(), &r.field, &reference, t_star))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchOutput { scenario: s.name.clone(), t_star, reference, runs, rows })
}

/// File holding a reference field inside a bench directory.
pub fn reference_path(dir: &Path) -> PathBuf {
    dir.join("field_fp.csv")
}

/// A stored reference, if present and covering `[0, t_end]` on `n_x` cells.
pub fn load_reference(dir: &Path, n_x: usize, t_end: f64) -> Result<Option<DensityField>> {
    let path = reference_path(dir);
    if !path.exists() {
        return Ok(None);
    }
    let field = read_field_csv(&fs::read_to_string(path)?)?;
    let covers =
        field.x.len() == n_x && field.times.last().is_some_and(|&t| (t - t_end).abs() <= 1e-9 * t_end.max(1.0));
    Ok(covers.then_some(field))
}

impl BenchOutput {
    pub fn title(&self) -> String {
        format!(
            "Relative errors against the Fokker-Planck reference, {} (characteristic at t = {})",
            self.scenario, self.t_star
        )
    }

    /// Writes `table_<scenario>.{csv,txt}`, the reference field and every
    /// model's snapshots and log.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let csv = dir.join(format!("table_{}.csv", self.scenario));
        fs::write(&csv, table_csv(&self.rows))?;
        let txt = dir.join(format!("table_{}.txt", self.scenario));
        fs::write(&txt, table_text(&self.title(), &self.rows))?;
        let reference = reference_path(dir);
        fs::write(&reference, field_csv(&self.reference))?;
        written.extend([csv, txt, reference]);
        for r in &self.runs {
            written.extend(r.write(dir)?);
        }
        Ok(written)
    }
}
