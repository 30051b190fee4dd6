//! Command-line interface.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use laser_magnus::problems::{self, absorber, ABSORBER_WIDTH};
use laser_magnus::SpectralGrid;

use crate::calibrate;
use crate::config::{Config, SchemeSpec};
use crate::error::{HarnessError, Result};
use crate::report::emit_reports;
use crate::run::{build, propagate, write_series, RunSpec};
use crate::study::{commit_hash, Reference, Study};

#[derive(Debug, Parser)]
#[command(name = "laser-magnus", version, about = "Magnus-splitting propagators for laser-driven Schrödinger equations")]
pub struct Cli {
    /// TOML file with defaults for every flag, user tables and sweeps.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// ex1, ex2, ex3, ex4_1, ex4_2 or ex5.
    #[arg(long, global = true)]
    pub problem: Option<String>,
    /// Scheme such as S2+OMF76 or S3+OMF85@11; a comma list for `converge`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub scheme: Vec<String>,
    /// Step count; a comma list for `converge`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub steps: Vec<usize>,
    /// Step size; must divide the final time.
    #[arg(long, global = true, conflicts_with = "steps")]
    pub dt: Option<f64>,
    /// Quadrature knots for the laser integrals.
    #[arg(long, global = true)]
    pub knots: Option<usize>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub t_final: Option<f64>,
    #[arg(long, global = true)]
    pub field_scale: Option<f64>,
    #[arg(long, global = true)]
    pub absorber_strength: Option<f64>,
    /// Output file (`run`, `eigs`, `absorber-calibrate`) or directory
    /// (`converge`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate one problem and record norm and occupations per step.
    Run,
    /// Error against a fine reference over a sweep of step counts.
    Converge {
        /// Scheme of the reference run.
        #[arg(long)]
        reference: Option<String>,
        /// Reference steps per step of the finest sweep run.
        #[arg(long)]
        reference_factor: Option<usize>,
    },
    /// Lowest eigenvalues of a one-dimensional problem's potential.
    Eigs {
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Residual mass of free wave packets after crossing the absorber.
    AbsorberCalibrate {
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.15, 0.2, 0.22, 0.25, 0.3, 0.4])]
        strengths: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.45, 0.6, 0.8, 1.0])]
        momenta: Vec<f64>,
        #[arg(long, default_value_t = ABSORBER_WIDTH)]
        width: f64,
    },
}

fn single<T: Clone>(values: &[T], what: &str) -> Result<Option<T>> {
    match values {
        [] => Ok(None),
        [v] => Ok(Some(v.clone())),
        _ => Err(HarnessError::Request(format!("`run` takes a single {what}"))),
    }
}

impl Cli {
    /// Config file values overridden by the flags.
    fn config(&self, lists_allowed: bool) -> Result<Config> {
        let file = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let f = &self.flags;
        let (scheme, steps) = if lists_allowed && (f.scheme.len() > 1 || f.steps.len() > 1) {
            (None, None)
        } else {
            (single(&f.scheme, "scheme")?, single(&f.steps, "step count")?)
        };
        Ok(file.overridden_by(Config {
            problem: f.problem.clone(),
            scheme,
            steps,
            dt: f.dt,
            knots: f.knots,
            grid: f.grid,
            t_final: f.t_final,
            out: f.out.clone(),
            threads: f.threads,
            field_scale: f.field_scale,
            absorber_strength: f.absorber_strength,
            ..Config::default()
        }))
    }
}

/// Runs a command and returns what it prints on success.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Run => run(cli),
        Command::Converge {
            reference,
            reference_factor,
        } => converge(cli, reference.clone(), *reference_factor),
        Command::Eigs { count } => eigs(cli, *count),
        Command::AbsorberCalibrate {
            strengths,
            momenta,
            width,
        } => absorber_calibrate(cli, strengths, momenta, *width),
    }
}

fn run(cli: &Cli) -> Result<String> {
    let config = cli.config(false)?;
    let tables = config.table_set()?;
    let spec = RunSpec::from_config(&config)?;
    let prepared = spec.prepare(&tables)?;
    let out = propagate(&prepared, spec.observables)?;
    if let Some(path) = &config.out {
        write_series(path, &prepared, &out)?;
    }
    let last = out.series.last();
    let mut text = format!(
        "{} on {}: {} steps of {}, {} knots\nfinal norm {}\nfft passes {}\nwall {:.3} s\n",
        prepared.scheme.text,
        prepared.problem.name,
        prepared.steps,
        prepared.h,
        prepared.knots,
        prepared.problem.grid().norm(&out.state),
        out.stats.fft_passes,
        out.wall.as_secs_f64()
    );
    if let Some(s) = last.filter(|s| !s.occupations.is_empty()) {
        let occ: Vec<String> = s.occupations.iter().map(|p| format!("{p:.6}")).collect();
        text += &format!("final occupations {}\n", occ.join(" "));
    }
    Ok(text)
}

fn converge(cli: &Cli, reference: Option<String>, factor: Option<usize>) -> Result<String> {
    let config = cli.config(true)?;
    let tables = config.table_set()?;
    let sweep = config.converge.clone().unwrap_or_default();
    let f = &cli.flags;
    let schemes: Vec<String> = if !f.scheme.is_empty() {
        f.scheme.clone()
    } else if !sweep.schemes.is_empty() {
        sweep.schemes.clone()
    } else {
        config.scheme.iter().cloned().collect()
    };
    let steps: Vec<usize> = if !f.steps.is_empty() { f.steps.clone() } else { sweep.steps.clone() };
    if schemes.is_empty() || steps.is_empty() {
        return Err(HarnessError::Request("`converge` needs schemes and step counts".into()));
    }
    if steps.contains(&0) {
        return Err(HarnessError::Request("step counts must be positive".into()));
    }
    let schemes = schemes.iter().map(|s| SchemeSpec::parse(s, &tables)).collect::<Result<Vec<_>>>()?;
    let reference = SchemeSpec::parse(
        reference.or(sweep.reference).as_deref().unwrap_or("S2+OMF85"),
        &tables,
    )?;
    let factor = factor.or(sweep.reference_factor).unwrap_or(8);
    if factor == 0 {
        return Err(HarnessError::Request("the reference factor must be positive".into()));
    }
    let problem_name = config
        .problem
        .clone()
        .ok_or_else(|| HarnessError::Request("no problem selected (--problem)".into()))?;
    let overrides = laser_magnus::Overrides {
        steps: None,
        knots: None,
        ..config.overrides()
    };
    let mut problem = build(&problem_name, &overrides, config.field.as_ref())?;
    if let Some(k) = config.knots {
        problem.knots = k;
    }
    let study = Study {
        problem: Arc::new(problem),
        schemes,
        reference: Reference {
            scheme: reference,
            steps: steps.iter().max().copied().unwrap_or(1) * factor,
        },
        steps,
        threads: config.threads.unwrap_or(0),
        commit: commit_hash(),
    };
    let reports = study.run()?;
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
    let paths = emit_reports(&reports, &dir)?;
    let mut text = String::new();
    for (r, p) in reports.iter().zip(&paths) {
        let slope = r.slope.map_or("none".to_string(), |s| format!("{s:.2}"));
        text += &format!("{:<20} slope {slope:>6}  -> {}\n", r.meta.scheme, p.display());
        for row in &r.rows {
            text += &format!("  N = {:>6}  h = {:<10.4e} error = {:.3e}\n", row.steps, row.h, row.error);
        }
    }
    Ok(text)
}

fn eigs(cli: &Cli, count: usize) -> Result<String> {
    let config = cli.config(false)?;
    let name = config
        .problem
        .clone()
        .ok_or_else(|| HarnessError::Request("no problem selected (--problem)".into()))?;
    let v: fn(f64) -> (f64, f64) = match name.as_str() {
        "ex1" => problems::v1,
        "ex2" => problems::v2,
        "ex5" => problems::v5,
        _ => {
            return Err(HarnessError::Request(format!(
                "eigenvalues are available for the one-dimensional problems ex1, ex2 and ex5, not '{name}'"
            )))
        }
    };
    let problem = laser_magnus::build_problem(&name, &config.overrides())?;
    let grid = problem.grid();
    let potential: Vec<f64> = grid.nodes(0).iter().map(|&x| v(x).0).collect();
    let energies = problems::energies(grid, &potential, problem.system.epsilon, count)?;
    let text: String = energies.iter().enumerate().map(|(j, e)| format!("{j} {e}\n")).collect();
    if let Some(path) = &config.out {
        std::fs::write(path, &text).map_err(|e| HarnessError::io(path, e))?;
    }
    Ok(text)
}

fn absorber_calibrate(cli: &Cli, strengths: &[f64], momenta: &[f64], width: f64) -> Result<String> {
    let config = cli.config(false)?;
    let points = config.grid.unwrap_or(768);
    let grid = Arc::new(SpectralGrid::new(&[(-240.0, 240.0)], &[points])?);
    let scan = calibrate::scan(&grid, width, strengths, momenta, config.threads.unwrap_or(0))?;
    let mut text = scan.to_text();
    text += &format!("# shipped default {}\n", absorber::DEFAULT_STRENGTH);
    if let Some(path) = &config.out {
        std::fs::write(path, &text).map_err(|e| HarnessError::io(path, e))?;
    }
    Ok(text)
}
