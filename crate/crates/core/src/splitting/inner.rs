//! Application of an inner splitting to a state.

use num_complex::Complex64;

use super::tables::{SplitScheme, Stage};
use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

/// The frozen operators `T = λΔ − driftᵀ∇` and `W`, `U` of one step.
#[derive(Clone, Copy, Debug)]
pub struct InnerParts<'a> {
    /// `λ` of `T`, usually `ihε`.
    pub lambda: Complex64,
    /// `drift` of `T`.
    pub drift: &'a [f64],
    /// An outer `e^{−edgeᵀ∇}` on both sides of the splitting. It is folded
    /// into the outermost kinetic stages when the table starts (ends) with
    /// one, and applied on its own otherwise.
    pub edge_drift: Option<&'a [f64]>,
    /// Pointwise `W`.
    pub potential: &'a [Complex64],
    /// Pointwise `U`, needed by compact tables.
    pub gradient: Option<&'a [Complex64]>,
}

/// `u ← S(T, W, U) u` for the splitting `scheme`.
pub fn inner_apply(grid: &SpectralGrid, scheme: &SplitScheme, u: &mut [Complex64], parts: &InnerParts<'_>) -> Result<()> {
    if scheme.is_compact() && parts.gradient.is_none() {
        return Err(Error::MissingGradient);
    }
    let dims = grid.dims();
    let last = scheme.stages.len() - 1;
    let merge_front = matches!(scheme.stages.first(), Some(Stage::Kinetic(_)));
    let merge_back = matches!(scheme.stages.last(), Some(Stage::Kinetic(_)));
    let zero = Complex64::new(0.0, 0.0);
    let mut drift = [0.0; 3];
    if let (Some(edge), false) = (parts.edge_drift, merge_front) {
        grid.exp_kinetic(u, zero, edge)?;
    }
    for (i, stage) in scheme.stages.iter().enumerate() {
        match *stage {
            Stage::Kinetic(a) => {
                for (d, &s) in drift[..dims].iter_mut().zip(parts.drift) {
                    *d = a * s;
                }
                if let Some(edge) = parts.edge_drift {
                    let times = usize::from(i == 0 && merge_front) + usize::from(i == last && merge_back);
                    for (d, &e) in drift[..dims].iter_mut().zip(edge) {
                        *d += times as f64 * e;
                    }
                }
                grid.exp_kinetic(u, parts.lambda * a, &drift[..dims])?;
            }
            Stage::Potential(b) => {
                for (v, w) in u.iter_mut().zip(parts.potential) {
                    *v *= (w * b).exp();
                }
            }
            Stage::Compact { potential: b, gradient: c } => {
                let grad = parts.gradient.ok_or(Error::MissingGradient)?;
                for ((v, w), g) in u.iter_mut().zip(parts.potential).zip(grad) {
                    *v *= (w * b + g * c).exp();
                }
            }
        }
    }
    if let (Some(edge), false) = (parts.edge_drift, merge_back) {
        grid.exp_kinetic(u, zero, edge)?;
    }
    Ok(())
}
