//! Fields known only on an equispaced time grid.

use alloc::{format, vec, vec::Vec};

use super::LaserField;
use crate::error::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Piecewise-polynomial interpolant of equispaced samples.
///
/// At time `t` the `degree + 1` samples nearest to `t` are interpolated, so
/// the error is `O(Δt^{degree+1})` for smooth fields. Times outside the
/// sampled window are clamped to its ends.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedField {
    start: f64,
    step: f64,
    dims: usize,
    degree: usize,
    /// Row per sample time.
    samples: Vec<Vec<f64>>,
}

impl TabulatedField {
    pub const DEFAULT_DEGREE: usize = 5;

    pub fn new(start: f64, step: f64, samples: Vec<Vec<f64>>, degree: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Parameter(format!("sample spacing {step} must be positive")));
        }
        if samples.len() < degree + 1 {
            return Err(Error::Parameter(format!(
                "{} samples cannot carry a degree-{degree} interpolant",
                samples.len()
            )));
        }
        let dims = samples[0].len();
        if dims == 0 || samples.iter().any(|s| s.len() != dims) {
            return Err(Error::Parameter("samples have inconsistent component counts".into()));
        }
        Ok(Self {
            start,
            step,
            dims,
            degree,
            samples,
        })
    }

    /// Builds a table from `(t, e)` rows whose times are equispaced.
    pub fn from_rows(rows: &[(f64, Vec<f64>)], degree: usize) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Parameter("a tabulated field needs at least two rows".into()));
        }
        let step = rows[1].0 - rows[0].0;
        for (j, (t, _)) in rows.iter().enumerate() {
            let expected = rows[0].0 + j as f64 * step;
            if (t - expected).abs() > 1e-9 * step.abs().max(1.0) {
                return Err(Error::Parameter(format!("sample times are not equispaced at row {j}")));
            }
        }
        Self::new(rows[0].0, step, rows.iter().map(|r| r.1.clone()).collect(), degree)
    }

    pub fn end(&self) -> f64 {
        self.start + (self.samples.len() - 1) as f64 * self.step
    }
}

impl LaserField for TabulatedField {
    fn dims(&self) -> usize {
        self.dims
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let n = self.samples.len();
        let s = ((t - self.start) / self.step).clamp(0.0, (n - 1) as f64);
        let p = self.degree;
        // Window [first, first+p] centred on s.
        let centre = s - p as f64 / 2.0;
        let first = (centre.round().max(0.0) as usize).min(n - 1 - p);
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut weights = vec![1.0; p + 1];
        for (i, w) in weights.iter_mut().enumerate() {
            for j in 0..=p {
                if j != i {
                    *w *= (s - (first + j) as f64) / (i as f64 - j as f64);
                }
            }
        }
        for (i, w) in weights.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(&self.samples[first + i]) {
                *o += w * v;
            }
        }
    }
}

#[cfg(all(test, feature = "std"))]
mod tests {
    use super::*;

    fn table(step: f64, degree: usize) -> TabulatedField {
        let n = (2.0 / step).round() as usize + 1;
        let samples = (0..n).map(|j| vec![(3.0 * j as f64 * step).sin(), 1.0]).collect();
        TabulatedField::new(0.0, step, samples, degree).unwrap()
    }

    #[test]
    fn reproduces_samples_and_polynomials() {
        let f = table(0.1, 5);
        assert!((f.eval(0.3)[0] - 0.9f64.sin()).abs() < 1e-15);
        assert!((f.eval(1.234)[1] - 1.0).abs() < 1e-14);
        let cubic = TabulatedField::new(
            -1.0,
            0.25,
            (0..9).map(|j| {
                let t = -1.0 + 0.25 * j as f64;
                vec![t * t * t - t]
            }).collect(),
            3,
        )
        .unwrap();
        let t: f64 = 0.41;
        assert!((cubic.eval(t)[0] - (t * t * t - t)).abs() < 1e-14);
    }

    #[test]
    fn converges_at_interpolation_order() {
        let err = |step| {
            let f = table(step, 5);
            (0..200)
                .map(|i| {
                    let t = 0.01 * i as f64 + 0.003;
                    (f.eval(t)[0] - (3.0 * t).sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 40.0, "ratio {ratio}");
    }

    #[test]
    fn validates_input() {
        assert!(TabulatedField::new(0.0, 0.1, vec![vec![1.0]; 3], 5).is_err());
        assert!(TabulatedField::new(0.0, -0.1, vec![vec![1.0]; 8], 5).is_err());
        let rows = vec![(0.0, vec![1.0]), (0.1, vec![1.0]), (0.25, vec![1.0])];
        assert!(TabulatedField::from_rows(&rows, 1).is_err());
    }
}
