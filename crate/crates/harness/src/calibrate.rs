//! Absorber strength scan: how much of a free wave packet survives a trip
//! through the absorbing band, for each strength and momentum.

use std::sync::Arc;

use laser_magnus::problems::absorber::residual_mass;
use laser_magnus::SpectralGrid;
use rayon::prelude::*;

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub strength: f64,
    /// Residual mass per momentum, in the order of [`Scan::momenta`].
    pub residual: Vec<f64>,
}

impl ScanRow {
    pub fn worst(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    pub width: f64,
    pub momenta: Vec<f64>,
    pub rows: Vec<ScanRow>,
}

impl Scan {
    /// The strength with the smallest worst-case residual.
    pub fn recommended(&self) -> Option<&ScanRow> {
        self.rows.iter().min_by(|a, b| a.worst().total_cmp(&b.worst()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# absorber width {}\n# strength", self.width);
        for k in &self.momenta {
            s += &format!(" k={k}");
        }
        s.push('\n');
        for r in &self.rows {
            s += &r.strength.to_string();
            for m in &r.residual {
                s += &format!(" {m:.3e}");
            }
            s.push('\n');
        }
        if let Some(best) = self.recommended() {
            s += &format!("# recommended strength {} (worst residual {:.3e})\n", best.strength, best.worst());
        }
        s
    }
}

/// Runs every (strength, momentum) pair on `threads` workers.
pub fn scan(grid: &Arc<SpectralGrid>, width: f64, strengths: &[f64], momenta: &[f64], threads: usize) -> Result<Scan> {
    if strengths.is_empty() || momenta.is_empty() {
        return Err(HarnessError::Request("the scan needs at least one strength and one momentum".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Request(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        strengths
            .par_iter()
            .map(|&strength| {
                let residual = momenta
                    .par_iter()
                    .map(|&k| residual_mass(grid, width, strength, k))
                    .collect::<laser_magnus::Result<Vec<_>>>()?;
                Ok(ScanRow { strength, residual })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Scan {
        width,
        momenta: momenta.to_vec(),
        rows,
    })
}
