//! Convergence studies: error against a fine reference over a sweep of step
//! counts, run in parallel.

use std::sync::Arc;

use laser_magnus::Problem;
use rayon::prelude::*;

use crate::config::SchemeSpec;
use crate::error::{HarnessError, Result};
use crate::run::{propagate, Observables, Prepared};

/// Errors below this are treated as round-off when they sit at the finest
/// steps of a sweep.
pub const FLOOR: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub steps: usize,
    pub h: f64,
    /// Grid L² distance to the reference state.
    pub error: f64,
    pub wall_seconds: f64,
    pub fft_passes: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportMeta {
    pub problem: String,
    pub scheme: String,
    /// Points per axis.
    pub grid: Vec<usize>,
    pub knots: usize,
    pub reference: String,
    pub commit: String,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub meta: ReportMeta,
    /// Sorted by decreasing step size.
    pub rows: Vec<ConvergenceRow>,
    pub slope: Option<f64>,
}

/// Least-squares slope of `log error` against `log h`.
///
/// Up to two of the smallest-`h` rows are dropped while their error is below
/// [`FLOOR`], since those have reached round-off. `None` when fewer than two
/// usable rows remain.
pub fn fit_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let mut rows: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.error > 0.0 && r.h > 0.0).collect();
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    for _ in 0..2 {
        if rows.last().is_some_and(|r| r.error < FLOOR) {
            rows.pop();
        }
    }
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h.ln(), r.error.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// The fine run all errors are measured against.
#[derive(Clone, Debug)]
pub struct Reference {
    pub scheme: SchemeSpec,
    pub steps: usize,
}

impl Reference {
    pub fn describe(&self) -> String {
        format!("{} with {} steps", self.scheme.text, self.steps)
    }
}

#[derive(Clone, Debug)]
pub struct Study {
    pub problem: Arc<Problem>,
    pub schemes: Vec<SchemeSpec>,
    pub steps: Vec<usize>,
    pub reference: Reference,
    /// Worker threads; 0 uses rayon's default.
    pub threads: usize,
    pub commit: String,
}

fn prepared(problem: &Arc<Problem>, scheme: &SchemeSpec, steps: usize) -> Result<Prepared> {
    if steps == 0 {
        return Err(HarnessError::Request("the step count must be positive".into()));
    }
    scheme.scheme.check(&problem.system)?;
    Ok(Prepared {
        problem: Arc::clone(problem),
        scheme: scheme.clone(),
        steps,
        h: problem.t_final / steps as f64,
        knots: scheme.knots_or(problem.knots),
    })
}

impl Study {
    /// One report per scheme, in the order the schemes were given.
    ///
    /// Every run is sequential inside, so results do not depend on the
    /// thread count.
    pub fn run(&self) -> Result<Vec<ConvergenceReport>> {
        if self.steps.is_empty() {
            return Err(HarnessError::Request("a convergence study needs at least one step count".into()));
        }
        let reference_run = prepared(&self.problem, &self.reference.scheme, self.reference.steps)?;
        let jobs: Vec<(usize, Prepared)> = self
            .schemes
            .iter()
            .enumerate()
            .flat_map(|(i, s)| self.steps.iter().map(move |&n| (i, s, n)))
            .map(|(i, s, n)| Ok((i, prepared(&self.problem, s, n)?)))
            .collect::<Result<_>>()?;

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| HarnessError::Request(format!("thread pool: {e}")))?;
        let threads = pool.current_num_threads();
        let (reference, runs) = pool.install(|| {
            rayon::join(
                || propagate(&reference_run, Observables::default()),
                || {
                    jobs.par_iter()
                        .map(|(i, p)| Ok((*i, p.steps, p.h, propagate(p, Observables::default())?)))
                        .collect::<Result<Vec<_>>>()
                },
            )
        });
        let reference = reference?.state;
        let grid = self.problem.grid();

        let mut reports: Vec<ConvergenceReport> = self
            .schemes
            .iter()
            .map(|s| ConvergenceReport {
                meta: ReportMeta {
                    problem: self.problem.name.clone(),
                    scheme: s.text.clone(),
                    grid: (0..grid.dims()).map(|a| grid.points(a)).collect(),
                    knots: s.knots_or(self.problem.knots),
                    reference: self.reference.describe(),
                    commit: self.commit.clone(),
                    threads,
                },
                rows: Vec::new(),
                slope: None,
            })
            .collect();
        for (i, steps, h, out) in runs? {
            reports[i].rows.push(ConvergenceRow {
                steps,
                h,
                error: grid.distance(&out.state, &reference),
                wall_seconds: out.wall.as_secs_f64(),
                fft_passes: out.stats.fft_passes,
            });
        }
        for r in &mut reports {
            r.rows.sort_by(|a, b| b.h.total_cmp(&a.h));
            r.slope = fit_slope(&r.rows);
        }
        Ok(reports)
    }
}

/// `git rev-parse --short HEAD` in the working directory, or `"unknown"`.
pub fn commit_hash() -> String {
    std::process::Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(h: f64, error: f64) -> ConvergenceRow {
        ConvergenceRow {
            steps: (1.0 / h).round() as usize,
            h,
            error,
            wall_seconds: 0.0,
            fft_passes: 0,
        }
    }

    #[test]
    fn slope_of_an_exact_power_law() {
        let rows: Vec<_> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&h| row(h, 3.0 * h.powi(6))).collect();
        assert!((fit_slope(&rows).unwrap() - 6.0).abs() < 1e-12);
        // Order of the rows does not matter.
        let reversed: Vec<_> = rows.iter().rev().cloned().collect();
        assert!((fit_slope(&reversed).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn round_off_rows_at_the_fine_end_are_dropped() {
        let mut rows: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&h| row(h, h.powi(4))).collect();
        rows.push(row(0.0125, 2e-12));
        rows.push(row(0.00625, 2.1e-12));
        assert!((fit_slope(&rows).unwrap() - 4.0).abs() < 1e-12);
        // At most two are dropped.
        rows.push(row(0.003125, 2.0e-12));
        assert!((fit_slope(&rows).unwrap() - 4.0).abs() > 0.5);
        assert_eq!(fit_slope(&rows[..1]), None);
        assert_eq!(fit_slope(&[]), None);
    }
}
