//! FFT backend used by [`crate::spectral`].
//!
//! Transforms are unnormalized in both directions; the grid folds the `1/M`
//! of the inverse into the diagonal symbol it applies between the two.

use alloc::sync::Arc;
use num_complex::Complex64;

/// A planned transform of fixed length `len()`.
///
/// Both methods transform every consecutive chunk of `len()` values in
/// `lines`, whose length is a multiple of `len()`.
pub trait FourierTransform: Send + Sync {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn forward(&self, lines: &mut [Complex64]);
    fn inverse(&self, lines: &mut [Complex64]);
}

/// Produces transforms for the axis lengths of a grid.
pub trait FourierPlanner {
    fn plan(&mut self, len: usize) -> Arc<dyn FourierTransform>;
}

#[cfg(feature = "std")]
pub use self::rust_fft::RustFftPlanner;

#[cfg(feature = "std")]
mod rust_fft {
    use super::{FourierPlanner, FourierTransform};
    use alloc::{sync::Arc, vec};
    use num_complex::Complex64;
    use rustfft::{Fft, FftPlanner};

    /// [`FourierPlanner`] backed by `rustfft`.
    pub struct RustFftPlanner {
        planner: FftPlanner<f64>,
    }

    impl Default for RustFftPlanner {
        fn default() -> Self {
            Self {
                planner: FftPlanner::new(),
            }
        }
    }

    struct Planned {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    }

    impl FourierTransform for Planned {
        fn len(&self) -> usize {
            self.forward.len()
        }

        fn forward(&self, lines: &mut [Complex64]) {
            let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
            self.forward.process_with_scratch(lines, &mut scratch);
        }

        fn inverse(&self, lines: &mut [Complex64]) {
            let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
            self.inverse.process_with_scratch(lines, &mut scratch);
        }
    }

    impl FourierPlanner for RustFftPlanner {
        fn plan(&mut self, len: usize) -> Arc<dyn FourierTransform> {
            Arc::new(Planned {
                forward: self.planner.plan_fft_forward(len),
                inverse: self.planner.plan_fft_inverse(len),
            })
        }
    }
}
