//! Periodic tensor-product collocation grids and Fourier-diagonal operators.
//!
//! Values are stored with axis 0 varying fastest. Every operator here is of
//! the form `F⁻¹ D F` with `D` diagonal in the discrete Fourier basis, so
//! kinetic exponentials are exact up to round-off.

use alloc::{sync::Arc, vec, vec::Vec};
use core::f64::consts::PI;
use core::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{FourierPlanner, FourierTransform};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

struct Axis {
    lower: f64,
    upper: f64,
    points: usize,
    stride: usize,
    spacing: f64,
    /// `π m_k / L` for each bin.
    wavenumber: Vec<f64>,
    /// Same as `wavenumber` with the Nyquist bin zeroed; `c1 = i·first`.
    first: Vec<f64>,
    fft: Arc<dyn FourierTransform>,
}

/// A periodic grid on a box in one to three dimensions.
pub struct SpectralGrid {
    axes: Vec<Axis>,
    len: usize,
    fft_passes: AtomicU64,
}

impl core::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let mut list = f.debug_list();
        for a in &self.axes {
            list.entry(&(a.lower, a.upper, a.points));
        }
        list.finish()
    }
}

/// Signed frequency of FFT bin `k` out of `m`. For even `m` the Nyquist bin
/// maps to `-m/2`.
fn signed_frequency(k: usize, m: usize) -> i64 {
    if 2 * k < m {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

impl SpectralGrid {
    /// Builds a grid with the `rustfft` backend.
    #[cfg(feature = "std")]
    pub fn new(bounds: &[(f64, f64)], points: &[usize]) -> Result<Self> {
        Self::with_planner(bounds, points, &mut crate::fft::RustFftPlanner::default())
    }

    pub fn with_planner(
        bounds: &[(f64, f64)],
        points: &[usize],
        planner: &mut dyn FourierPlanner,
    ) -> Result<Self> {
        let dims = bounds.len();
        if dims == 0 || dims > 3 {
            return Err(Error::Dimension(dims));
        }
        if points.len() != dims {
            return Err(Error::Shape {
                expected: dims,
                found: points.len(),
            });
        }
        let mut axes = Vec::with_capacity(dims);
        let mut stride = 1;
        for (axis, (&(lo, hi), &m)) in bounds.iter().zip(points).enumerate() {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Interval { axis, lo, hi });
            }
            if m < 4 {
                return Err(Error::TooFewPoints { axis, points: m });
            }
            let half = (hi - lo) / 2.0;
            let wavenumber: Vec<f64> = (0..m)
                .map(|k| PI * signed_frequency(k, m) as f64 / half)
                .collect();
            let mut first = wavenumber.clone();
            if m % 2 == 0 {
                first[m / 2] = 0.0;
            }
            axes.push(Axis {
                lower: lo,
                upper: hi,
                points: m,
                stride,
                spacing: (hi - lo) / m as f64,
                wavenumber,
                first,
                fft: planner.plan(m),
            });
            stride *= m;
        }
        Ok(Self {
            axes,
            len: stride,
            fft_passes: AtomicU64::new(0),
        })
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn axis(&self, axis: usize) -> Result<&Axis> {
        self.axes.get(axis).ok_or(Error::Axis {
            axis,
            dims: self.dims(),
        })
    }

    pub fn points(&self, axis: usize) -> usize {
        self.axes[axis].points
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        let a = &self.axes[axis];
        (a.lower, a.upper)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.axes[axis].spacing
    }

    /// Volume element `Π Δx` used by norms and inner products.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    /// The one-dimensional nodes `lo + jΔx` of an axis.
    pub fn nodes(&self, axis: usize) -> Vec<f64> {
        let a = &self.axes[axis];
        (0..a.points).map(|j| a.lower + j as f64 * a.spacing).collect()
    }

    /// Symbol `c2` of `∂²` along an axis, in bin order.
    pub fn second_derivative_symbol(&self, axis: usize) -> Vec<f64> {
        self.axes[axis].wavenumber.iter().map(|k| -k * k).collect()
    }

    /// Imaginary part of the symbol `c1` of `∂` along an axis (Nyquist bin zero).
    pub fn first_derivative_symbol(&self, axis: usize) -> &[f64] {
        &self.axes[axis].first
    }

    /// Writes the coordinates of the point with flat index `index`.
    pub fn point(&self, index: usize, x: &mut [f64]) {
        let mut rest = index;
        for (a, xa) in self.axes.iter().zip(x.iter_mut()) {
            *xa = a.lower + (rest % a.points) as f64 * a.spacing;
            rest /= a.points;
        }
    }

    /// Evaluates `f` at every grid point, in storage order.
    pub fn sample<T>(&self, mut f: impl FnMut(&[f64]) -> T) -> Vec<T> {
        let mut x = [0.0; 3];
        let d = self.dims();
        (0..self.len)
            .map(|i| {
                self.point(i, &mut x[..d]);
                f(&x[..d])
            })
            .collect()
    }

    /// Flattened coordinate `x_axis` at every grid point.
    pub fn coordinate(&self, axis: usize) -> Vec<f64> {
        self.sample(|x| x[axis])
    }

    /// Number of one-dimensional FFT passes (each covering a whole axis of
    /// the state) performed so far.
    pub fn fft_passes(&self) -> u64 {
        self.fft_passes.load(Ordering::Relaxed)
    }

    pub fn reset_fft_passes(&self) {
        self.fft_passes.store(0, Ordering::Relaxed);
    }

    fn check(&self, values: &[Complex64]) -> Result<()> {
        if values.len() == self.len {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.len,
                found: values.len(),
            })
        }
    }

    fn transform_axis(&self, values: &mut [Complex64], axis: usize, forward: bool) {
        self.fft_passes.fetch_add(1, Ordering::Relaxed);
        let a = &self.axes[axis];
        let run = |buf: &mut [Complex64]| {
            if forward {
                a.fft.forward(buf)
            } else {
                a.fft.inverse(buf)
            }
        };
        if a.stride == 1 {
            run(values);
            return;
        }
        // Gather strided lines into contiguous storage and back.
        let (m, s) = (a.points, a.stride);
        let mut lines = vec![ZERO; values.len()];
        for (block, chunk) in values.chunks(m * s).enumerate() {
            for inner in 0..s {
                let line = &mut lines[(block * s + inner) * m..][..m];
                for (k, v) in line.iter_mut().enumerate() {
                    *v = chunk[k * s + inner];
                }
            }
        }
        run(&mut lines);
        for (block, chunk) in values.chunks_mut(m * s).enumerate() {
            for inner in 0..s {
                let line = &lines[(block * s + inner) * m..][..m];
                for (k, v) in line.iter().enumerate() {
                    chunk[k * s + inner] = *v;
                }
            }
        }
    }

    fn forward_all(&self, values: &mut [Complex64]) {
        for axis in 0..self.dims() {
            self.transform_axis(values, axis, true);
        }
    }

    fn inverse_all(&self, values: &mut [Complex64]) {
        for axis in 0..self.dims() {
            self.transform_axis(values, axis, false);
        }
    }

    /// `values ← F⁻¹ D F values` along one axis, with `D` given per bin.
    pub fn apply_diag_fourier(
        &self,
        values: &mut [Complex64],
        axis: usize,
        mut symbol: impl FnMut(usize) -> Complex64,
    ) -> Result<()> {
        self.check(values)?;
        let a = self.axis(axis)?;
        let scale = 1.0 / a.points as f64;
        let d: Vec<Complex64> = (0..a.points).map(|k| symbol(k) * scale).collect();
        self.transform_axis(values, axis, true);
        let (m, s) = (a.points, a.stride);
        for (i, v) in values.iter_mut().enumerate() {
            *v *= d[(i / s) % m];
        }
        self.transform_axis(values, axis, false);
        Ok(())
    }

    /// Multiplies Fourier coefficients by `Π_a f_a[k_a]` (or `Σ_a f_a[k_a]`)
    /// for per-axis factor arrays `f_a`, including the inverse normalization.
    fn apply_separable(&self, values: &mut [Complex64], factors: &[Vec<Complex64>], product: bool) {
        self.forward_all(values);
        let scale = 1.0 / self.len as f64;
        let m0 = self.axes[0].points;
        let f0 = &factors[0];
        for (row, chunk) in values.chunks_mut(m0).enumerate() {
            // Combined factor of axes 1.. for this row.
            let mut rest = row;
            let mut acc = if product { Complex64::new(scale, 0.0) } else { ZERO };
            for (a, f) in self.axes.iter().zip(factors).skip(1) {
                let k = rest % a.points;
                rest /= a.points;
                if product {
                    acc *= f[k];
                } else {
                    acc += f[k];
                }
            }
            if product {
                for (v, f) in chunk.iter_mut().zip(f0) {
                    *v *= acc * f;
                }
            } else {
                for (v, f) in chunk.iter_mut().zip(f0) {
                    *v *= (acc + f) * scale;
                }
            }
        }
        self.inverse_all(values);
    }

    /// `values ← exp(λΔ − driftᵀ∇) values`, exact for any complex `λ`.
    ///
    /// A kinetic stage `e^{a(ihεΔ − sᵀ∇)}` is `λ = a·ihε`, `drift = a·s`.
    pub fn exp_kinetic(&self, values: &mut [Complex64], lambda: Complex64, drift: &[f64]) -> Result<()> {
        self.check(values)?;
        self.check_vector(drift)?;
        let factors: Vec<Vec<Complex64>> = self
            .axes
            .iter()
            .zip(drift)
            .map(|(a, &b)| {
                a.wavenumber
                    .iter()
                    .zip(&a.first)
                    .map(|(&k, &k1)| (lambda * (-k * k) - Complex64::new(0.0, b * k1)).exp())
                    .collect()
            })
            .collect();
        self.apply_separable(values, &factors, true);
        Ok(())
    }

    /// `values ← (λΔ − driftᵀ∇) values`.
    pub fn apply_kinetic(&self, values: &mut [Complex64], lambda: Complex64, drift: &[f64]) -> Result<()> {
        self.check(values)?;
        self.check_vector(drift)?;
        let factors: Vec<Vec<Complex64>> = self
            .axes
            .iter()
            .zip(drift)
            .map(|(a, &b)| {
                a.wavenumber
                    .iter()
                    .zip(&a.first)
                    .map(|(&k, &k1)| lambda * (-k * k) - Complex64::new(0.0, b * k1))
                    .collect()
            })
            .collect();
        self.apply_separable(values, &factors, false);
        Ok(())
    }

    /// `values ← Δ values`.
    pub fn laplacian(&self, values: &mut [Complex64]) -> Result<()> {
        let zero = vec![0.0; self.dims()];
        self.apply_kinetic(values, Complex64::new(1.0, 0.0), &zero)
    }

    /// `values ← ∂_axis values`.
    pub fn derivative(&self, values: &mut [Complex64], axis: usize) -> Result<()> {
        let first = &self.axis(axis)?.first;
        self.apply_diag_fourier(values, axis, |k| Complex64::new(0.0, first[k]))
    }

    /// `values[j] ← exp(phase[j]) values[j]`.
    pub fn exp_potential(&self, values: &mut [Complex64], phase: &[Complex64]) -> Result<()> {
        self.check(values)?;
        self.check(phase)?;
        for (v, p) in values.iter_mut().zip(phase) {
            *v *= p.exp();
        }
        Ok(())
    }

    fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.dims() {
            Ok(())
        } else {
            Err(Error::FieldDimension {
                expected: self.dims(),
                found: v.len(),
            })
        }
    }

    /// Grid-weighted `‖v‖`.
    pub fn norm(&self, values: &[Complex64]) -> f64 {
        (self.cell_volume() * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Grid-weighted `⟨a, b⟩`, antilinear in `a`.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * self.cell_volume()
    }

    /// Grid-weighted `‖a − b‖`.
    pub fn distance(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        (self.cell_volume() * s).sqrt()
    }
}

/// A complex state sampled on a [`SpectralGrid`].
#[derive(Clone, Debug)]
pub struct WaveFunction {
    grid: Arc<SpectralGrid>,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<Complex64>) -> Result<Self> {
        grid.check(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let values = vec![ZERO; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = grid.sample(f);
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        self.grid.norm(&self.values)
    }

    /// Scales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
        n
    }

    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        self.grid.inner(&self.values, &other.values)
    }

    pub fn distance(&self, other: &WaveFunction) -> f64 {
        self.grid.distance(&self.values, &other.values)
    }

    pub fn apply_diag_fourier(&mut self, axis: usize, symbol: impl FnMut(usize) -> Complex64) -> Result<()> {
        self.grid.apply_diag_fourier(&mut self.values, axis, symbol)
    }

    pub fn exp_kinetic(&mut self, lambda: Complex64, drift: &[f64]) -> Result<()> {
        self.grid.exp_kinetic(&mut self.values, lambda, drift)
    }

    pub fn exp_potential(&mut self, phase: &[Complex64]) -> Result<()> {
        self.grid.exp_potential(&mut self.values, phase)
    }
}

#[cfg(all(test, feature = "std"))]
mod tests {
    use super::*;
    use laser_magnus_testkit as tk;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn grid1(lo: f64, hi: f64, m: usize) -> SpectralGrid {
        SpectralGrid::new(&[(lo, hi)], &[m]).unwrap()
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
    }

    #[test]
    fn second_derivative_symbol_in_bin_order() {
        let g = grid1(-10.0, 10.0, 4);
        let c2 = g.second_derivative_symbol(0);
        let k = PI / 10.0;
        let expected = [0.0, -k * k, -4.0 * k * k, -k * k];
        for (a, b) in c2.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        // The Nyquist bin of ∂ is removed, the one of ∂² kept.
        assert_eq!(g.first_derivative_symbol(0)[2], 0.0);
        assert_eq!(g.first_derivative_symbol(0)[3], -k);
    }

    #[test]
    fn dc_bin_and_spacing() {
        let g = grid1(-5.0, 5.0, 1000);
        assert_eq!(g.second_derivative_symbol(0)[0], 0.0);
        assert!((g.spacing(0) - 0.01).abs() < 1e-15);
        assert_eq!(g.nodes(0)[0], -5.0);
    }

    #[test]
    fn rejects_bad_grids() {
        let b = [(-1.0, 1.0); 4];
        assert_eq!(SpectralGrid::new(&b, &[8; 4]).unwrap_err(), Error::Dimension(4));
        assert!(matches!(
            SpectralGrid::new(&[(1.0, 1.0)], &[8]).unwrap_err(),
            Error::Interval { axis: 0, .. }
        ));
        assert!(matches!(
            SpectralGrid::new(&[(0.0, 1.0)], &[3]).unwrap_err(),
            Error::TooFewPoints { .. }
        ));
        let g = grid1(0.0, 1.0, 8);
        let mut v = vec![ZERO; 8];
        assert!(matches!(
            g.apply_diag_fourier(&mut v, 1, |_| ZERO).unwrap_err(),
            Error::Axis { axis: 1, dims: 1 }
        ));
        assert!(matches!(g.exp_potential(&mut v, &[ZERO; 7]).unwrap_err(), Error::Shape { .. }));
    }

    #[test]
    fn identity_symbol_is_identity() {
        let g = SpectralGrid::new(&[(-1.0, 1.0), (0.0, 3.0)], &[8, 6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_state(g.len(), &mut rng);
        for axis in 0..2 {
            let mut v = u.clone();
            g.apply_diag_fourier(&mut v, axis, |_| Complex64::new(1.0, 0.0)).unwrap();
            assert!(tk::max_diff(&u, &v) < 1e-14);
        }
    }

    #[test]
    fn fourier_mode_is_eigenfunction_of_kinetic_exponential() {
        let (l, m, eps, h) = (3.0, 32, 0.7, 0.1);
        let g = grid1(-l, l, m);
        let mode = 5.0;
        let mut v = g.sample(|x| Complex64::from_polar(1.0, PI * mode * x[0] / l));
        let u = v.clone();
        let c2 = g.second_derivative_symbol(0);
        g.apply_diag_fourier(&mut v, 0, |k| (I * h * eps * c2[k]).exp()).unwrap();
        let factor = (-I * h * eps * (PI * mode / l).powi(2)).exp();
        let expected: Vec<_> = u.iter().map(|z| z * factor).collect();
        assert!(tk::max_diff(&v, &expected) < 1e-13);
    }

    #[test]
    fn first_derivative_of_sine() {
        let l = 2.5;
        let g = grid1(-l, l, 16);
        let mut v = g.sample(|x| Complex64::new((PI * x[0] / l).sin(), 0.0));
        g.derivative(&mut v, 0).unwrap();
        let expected = g.sample(|x| Complex64::new(PI / l * (PI * x[0] / l).cos(), 0.0));
        assert!(tk::max_diff(&v, &expected) < 1e-12);
    }

    #[test]
    fn drift_translates_band_limited_gaussian() {
        let g = grid1(-10.0, 10.0, 256);
        let delta = 0.37;
        let gauss = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        let mut v = g.sample(|x| gauss(x[0]));
        g.exp_kinetic(&mut v, ZERO, &[delta]).unwrap();
        let expected = g.sample(|x| gauss(x[0] - delta));
        assert!(tk::max_diff(&v, &expected) < 1e-10);
    }

    #[test]
    fn kinetic_exponential_matches_dense_oracle_1d() {
        let (m, half) = (8, 1.7);
        let g = grid1(-half, half, m);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (d1, d2) = (tk::d1(m, half), tk::d2(m, half));
        for _ in 0..5 {
            let lambda = Complex64::new(rng.gen::<f64>() * 0.05, rng.gen::<f64>() * 0.3);
            let drift = rng.gen::<f64>() - 0.5;
            let gen = &d2 * lambda - &d1 * Complex64::new(drift, 0.0);
            let u = random_state(m, &mut rng);
            let expected = tk::apply(&tk::expm(&gen), &u);
            let mut v = u.clone();
            g.exp_kinetic(&mut v, lambda, &[drift]).unwrap();
            assert!(tk::max_diff(&v, &expected) < 1e-12);
            let mut w = u.clone();
            g.apply_kinetic(&mut w, lambda, &[drift]).unwrap();
            assert!(tk::max_diff(&w, &tk::apply(&gen, &u)) < 1e-12);
        }
    }

    #[test]
    fn kinetic_exponential_matches_dense_oracle_2d() {
        let (m0, m1) = (6, 4);
        let g = SpectralGrid::new(&[(-1.0, 1.0), (0.0, 3.0)], &[m0, m1]).unwrap();
        let (i0, i1) = (tk::CMatrix::identity(m0, m0), tk::CMatrix::identity(m1, m1));
        // Axis 0 varies fastest, so it is the right Kronecker factor.
        let lap = tk::kron(&i1, &tk::d2(m0, 1.0)) + tk::kron(&tk::d2(m1, 1.5), &i0);
        let dx0 = tk::kron(&i1, &tk::d1(m0, 1.0));
        let dx1 = tk::kron(&tk::d1(m1, 1.5), &i0);
        let lambda = Complex64::new(0.0, 0.02);
        let drift = [0.3, -0.2];
        let gen = &lap * lambda - &dx0 * Complex64::new(drift[0], 0.0) - &dx1 * Complex64::new(drift[1], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_state(g.len(), &mut rng);
        let mut v = u.clone();
        g.exp_kinetic(&mut v, lambda, &drift).unwrap();
        assert!(tk::max_diff(&v, &tk::apply(&tk::expm(&gen), &u)) < 1e-12);
        let mut w = u.clone();
        g.laplacian(&mut w).unwrap();
        assert!(tk::max_diff(&w, &tk::apply(&lap, &u)) < 1e-11);
    }

    #[test]
    fn potential_exponential_matches_dense_oracle() {
        let g = grid1(-2.0, 2.0, 8);
        let (h, eps) = (0.3, 0.5);
        let v0 = g.sample(|x| x[0] * x[0] - 0.3 * x[0]);
        let phase: Vec<_> = v0.iter().map(|&v| -I * h / eps * v).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_state(8, &mut rng);
        let mut w = u.clone();
        g.exp_potential(&mut w, &phase).unwrap();
        let expected = tk::apply(&tk::expm(&tk::diag(&phase)), &u);
        assert!(tk::max_diff(&w, &expected) < 1e-13);
    }

    #[test]
    fn spectral_accuracy_of_second_derivative() {
        let err = |m: usize| {
            let g = grid1(-8.0, 8.0, m);
            let mut v = g.sample(|x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
            g.laplacian(&mut v).unwrap();
            let exact = g.sample(|x| {
                let x = x[0];
                Complex64::new((4.0 * x * x - 2.0) * (-x * x).exp(), 0.0)
            });
            tk::max_diff(&v, &exact)
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e1 / e2 > 10.0, "{e1} {e2}");
    }

    #[test]
    fn counts_fft_passes() {
        let g = SpectralGrid::new(&[(-1.0, 1.0), (-1.0, 1.0)], &[8, 8]).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 64];
        g.exp_kinetic(&mut v, I, &[0.0, 0.0]).unwrap();
        assert_eq!(g.fft_passes(), 4);
        g.apply_diag_fourier(&mut v, 1, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(g.fft_passes(), 6);
        g.reset_fft_passes();
        assert_eq!(g.fft_passes(), 0);
    }

    #[test]
    fn wave_function_normalization() {
        let g = Arc::new(grid1(-10.0, 10.0, 128));
        let mut u = WaveFunction::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        u.normalize();
        assert!((u.norm() - 1.0).abs() < 1e-14);
        assert!((u.inner(&u).re - 1.0).abs() < 1e-14);
        assert_eq!(u.distance(&u.clone()), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn unitary_stages_preserve_norm(
            seed in any::<u64>(),
            a in -2.0f64..2.0,
            d0 in -3.0f64..3.0,
            d1 in -3.0f64..3.0,
        ) {
            let g = SpectralGrid::new(&[(-2.0, 2.0), (-1.0, 3.0)], &[16, 10]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = random_state(g.len(), &mut rng);
            let n0 = g.norm(&v);
            g.exp_kinetic(&mut v, Complex64::new(0.0, a), &[d0, d1]).unwrap();
            prop_assert!((g.norm(&v) - n0).abs() <= 1e-12 * n0);
            let phase: Vec<_> = (0..g.len()).map(|_| Complex64::new(0.0, rng.gen::<f64>() * 10.0)).collect();
            g.exp_potential(&mut v, &phase).unwrap();
            prop_assert!((g.norm(&v) - n0).abs() <= 1e-12 * n0);
        }

        #[test]
        fn kinetic_exponentials_compose(
            seed in any::<u64>(),
            a in -1.0f64..1.0,
            b in -1.0f64..1.0,
            s in -2.0f64..2.0,
            t in -2.0f64..2.0,
        ) {
            let g = grid1(-3.0, 3.0, 32);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_state(g.len(), &mut rng);
            let mut split = u.clone();
            g.exp_kinetic(&mut split, Complex64::new(0.0, a), &[s]).unwrap();
            g.exp_kinetic(&mut split, Complex64::new(0.0, b), &[t]).unwrap();
            let mut joint = u;
            g.exp_kinetic(&mut joint, Complex64::new(0.0, a + b), &[s + t]).unwrap();
            prop_assert!(tk::max_diff(&split, &joint) < 1e-12);
        }
    }
}
