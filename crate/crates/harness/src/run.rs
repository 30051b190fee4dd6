//! Single propagation runs with observable time series.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use laser_magnus::splitting::StepStats;
use laser_magnus::{build_problem, well_occupation, Complex64, LaserField, Overrides, Problem, Stepper};

use crate::config::{Config, FieldFileConfig, SchemeSpec, TableSet};
use crate::error::{HarnessError, Result};
use crate::fieldfile::load_field;

/// What to record after every step besides the final state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Observables {
    pub norm: bool,
    /// Well occupations; ignored by problems without wells.
    pub occupations: bool,
}

impl Observables {
    pub const ALL: Self = Self {
        norm: true,
        occupations: true,
    };
}

/// Everything that defines a run.
#[derive(Clone, Debug, Default)]
pub struct RunSpec {
    pub problem: String,
    /// Grid, final time, field scale and absorber strength. Step count and
    /// knot count are taken from `steps`, `dt` and `knots` instead.
    pub overrides: Overrides,
    pub scheme: String,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub knots: Option<usize>,
    pub field: Option<FieldFileConfig>,
    pub observables: Observables,
}

/// Relative tolerance of `N·h = T`.
const STEP_TOLERANCE: f64 = 1e-12;

/// The step count and size covering `[0, t_final]`, from whichever of
/// `steps` and `dt` is given, or `default_steps`.
pub fn resolve_steps(t_final: f64, steps: Option<usize>, dt: Option<f64>, default_steps: usize) -> Result<(usize, f64)> {
    let n = match (steps, dt) {
        (Some(0), _) => return Err(HarnessError::Request("the step count must be positive".into())),
        (Some(n), None) => n,
        (None, None) => default_steps,
        (_, Some(dt)) => {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(HarnessError::Request(format!("step size {dt} must be positive")));
            }
            let n = (t_final / dt).round().max(1.0) as usize;
            if ((n as f64 * dt) - t_final).abs() > STEP_TOLERANCE * t_final {
                return Err(HarnessError::Request(format!(
                    "step size {dt} does not divide the final time {t_final}"
                )));
            }
            if steps.is_some_and(|s| s != n) {
                return Err(HarnessError::Request(format!(
                    "{} steps of size {dt} do not cover the final time {t_final}",
                    steps.unwrap_or_default()
                )));
            }
            n
        }
    };
    Ok((n, t_final / n as f64))
}

/// A built problem together with the resolved scheme and step layout.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub problem: Arc<Problem>,
    pub scheme: SchemeSpec,
    pub steps: usize,
    pub h: f64,
    pub knots: usize,
}

/// Builds a problem and, when configured, swaps in a tabulated field.
pub fn build(problem: &str, overrides: &Overrides, field: Option<&FieldFileConfig>) -> Result<Problem> {
    let mut problem = build_problem(problem, overrides)?;
    if let Some(f) = field {
        let tabulated = load_field(f, problem.grid().dims())?;
        problem.system = problem.system.with_field(Arc::new(tabulated) as Arc<dyn LaserField>)?;
    }
    Ok(problem)
}

impl RunSpec {
    pub fn from_config(config: &Config) -> Result<Self> {
        let problem = config
            .problem
            .clone()
            .ok_or_else(|| HarnessError::Request("no problem selected (--problem)".into()))?;
        let scheme = config.scheme.clone().unwrap_or_else(|| "S2+OMF85".into());
        Ok(Self {
            problem,
            overrides: Overrides {
                steps: None,
                knots: None,
                ..config.overrides()
            },
            scheme,
            steps: config.steps,
            dt: config.dt,
            knots: config.knots,
            field: config.field.clone(),
            observables: Observables::ALL,
        })
    }

    pub fn prepare(&self, tables: &TableSet) -> Result<Prepared> {
        let scheme = SchemeSpec::parse(&self.scheme, tables)?;
        let problem = build(&self.problem, &self.overrides, self.field.as_ref())?;
        let (steps, h) = resolve_steps(problem.t_final, self.steps, self.dt, problem.steps)?;
        let knots = self.knots.or(scheme.knots).unwrap_or(problem.knots);
        scheme.scheme.check(&problem.system)?;
        Ok(Prepared {
            problem: Arc::new(problem),
            scheme,
            steps,
            h,
            knots,
        })
    }
}

/// Observables at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub norm: Option<f64>,
    pub occupations: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: Vec<Complex64>,
    /// Initial time first, then one sample per step; empty when nothing is
    /// observed.
    pub series: Vec<Sample>,
    pub stats: StepStats,
    pub wall: Duration,
}

fn observe(problem: &Problem, u: &[Complex64], t: f64, what: Observables) -> Result<Sample> {
    let grid = problem.grid();
    let norm = what.norm.then(|| grid.norm(u));
    let occupations = if what.occupations && !problem.centres.is_empty() {
        well_occupation(grid, u, &problem.centres, laser_magnus::problems::WELL_RADIUS)?
    } else {
        Vec::new()
    };
    Ok(Sample { t, norm, occupations })
}

/// `steps` steps of size `h` from the problem's initial state at `t = 0`.
///
/// Fails with a numerical error as soon as the state stops being finite.
pub fn propagate(prepared: &Prepared, what: Observables) -> Result<RunOutput> {
    let Prepared {
        problem,
        scheme,
        steps,
        h,
        knots,
    } = prepared;
    let start = Instant::now();
    let mut stepper = Stepper::new(&problem.system, scheme.scheme.clone(), *knots)?;
    let mut u = problem.initial.clone();
    let recording = what != Observables::default();
    let mut series = Vec::with_capacity(if recording { steps + 1 } else { 0 });
    if recording {
        series.push(observe(problem, &u, 0.0, what)?);
    }
    let time = |n: usize| problem.t_final * n as f64 / *steps as f64;
    for n in 0..*steps {
        let t = time(n);
        stepper.step(&mut u, t, *h)?;
        let norm = problem.grid().norm(&u);
        if !norm.is_finite() {
            return Err(HarnessError::Numerical(format!(
                "{} on {}: state is not finite after step {} (t = {})",
                scheme.text,
                problem.name,
                n + 1,
                time(n + 1)
            )));
        }
        if recording {
            series.push(observe(problem, &u, time(n + 1), what)?);
        }
    }
    Ok(RunOutput {
        state: u,
        series,
        stats: stepper.stats,
        wall: start.elapsed(),
    })
}

/// Writes the time series as columns `t norm P₁ … P_k`.
pub fn write_series(path: &Path, prepared: &Prepared, output: &RunOutput) -> Result<()> {
    let io = |e| HarnessError::io(path, e);
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(f, "# problem: {}", prepared.problem.name).map_err(io)?;
    writeln!(f, "# scheme: {}", prepared.scheme.text).map_err(io)?;
    writeln!(f, "# steps: {} of size {}", prepared.steps, prepared.h).map_err(io)?;
    writeln!(f, "# knots: {}", prepared.knots).map_err(io)?;
    writeln!(f, "# fft_passes: {}", output.stats.fft_passes).map_err(io)?;
    let wells = output.series.first().map_or(0, |s| s.occupations.len());
    let mut header = String::from("# t norm");
    for j in 1..=wells {
        header += &format!(" P{j}");
    }
    writeln!(f, "{header}").map_err(io)?;
    for s in &output.series {
        let mut line = format!("{} {}", s.t, s.norm.unwrap_or(f64::NAN));
        for p in &s.occupations {
            line += &format!(" {p}");
        }
        writeln!(f, "{line}").map_err(io)?;
    }
    f.flush().map_err(io)
}
