//! Spatial data of a problem: grid, potential, field coupling and damping.

use alloc::{format, sync::Arc, vec::Vec};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::LaserField;
use crate::spectral::SpectralGrid;

/// The static potential `V₀` and how the field couples to position.
#[derive(Clone, Debug)]
pub struct Potential {
    /// `V₀` at every grid point.
    pub values: Vec<f64>,
    /// `∂_a V₀`, one array per axis.
    pub gradient: Option<Vec<Vec<f64>>>,
    /// True when `gradient` was obtained by Fourier differentiation of
    /// `values` rather than supplied in closed form.
    pub gradient_is_spectral: bool,
    /// The coordinate `x_a` the field multiplies, per axis. Absorbing layers
    /// replace it by a flattened coordinate.
    pub positions: Vec<Vec<f64>>,
    /// `d x_a / d x_a` for flattened coordinates; `None` means identity.
    pub position_slopes: Option<Vec<Vec<f64>>>,
    /// Absorbing potential `Γ ≤ 0`, entering as `V₀ + iΓ`.
    pub damping: Option<Vec<f64>>,
}

impl Potential {
    /// A potential with a closed-form gradient (or none).
    pub fn new(grid: &SpectralGrid, values: Vec<f64>, gradient: Option<Vec<Vec<f64>>>) -> Result<Self> {
        let potential = Self {
            values,
            gradient,
            gradient_is_spectral: false,
            positions: (0..grid.dims()).map(|a| grid.coordinate(a)).collect(),
            position_slopes: None,
            damping: None,
        };
        potential.validate(grid)?;
        Ok(potential)
    }

    /// Fills in `∇V₀` by Fourier differentiation of the samples.
    ///
    /// Unless the periodic extension of `V₀` is smooth this carries Gibbs
    /// error, which is why the result is flagged.
    pub fn with_spectral_gradient(mut self, grid: &SpectralGrid) -> Result<Self> {
        let mut gradient = Vec::with_capacity(grid.dims());
        for axis in 0..grid.dims() {
            let mut v: Vec<Complex64> = self.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            grid.derivative(&mut v, axis)?;
            gradient.push(v.iter().map(|z| z.re).collect());
        }
        self.gradient = Some(gradient);
        self.gradient_is_spectral = true;
        Ok(self)
    }

    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        let n = grid.len();
        let shape = |found: usize| {
            if found == n {
                Ok(())
            } else {
                Err(Error::Shape { expected: n, found })
            }
        };
        shape(self.values.len())?;
        let axes = |what: &str, arrays: &[Vec<f64>]| -> Result<()> {
            if arrays.len() != grid.dims() {
                return Err(Error::Parameter(format!(
                    "{what} has {} components on a {}-dimensional grid",
                    arrays.len(),
                    grid.dims()
                )));
            }
            arrays.iter().try_for_each(|a| shape(a.len()))
        };
        axes("position", &self.positions)?;
        if let Some(g) = &self.gradient {
            axes("gradient", g)?;
        }
        if let Some(s) = &self.position_slopes {
            axes("position slope", s)?;
        }
        if let Some(d) = &self.damping {
            shape(d.len())?;
        }
        Ok(())
    }

    pub fn gradient(&self) -> Result<&[Vec<f64>]> {
        self.gradient.as_deref().ok_or(Error::MissingGradient)
    }

    /// `Ṽ = V₀ + rᵀx` at point `j`.
    pub fn shifted(&self, r: &[f64], j: usize) -> f64 {
        self.values[j] + self.field_term(r, j)
    }

    /// `rᵀx` at point `j`, with `x` the coupling coordinate.
    pub fn field_term(&self, r: &[f64], j: usize) -> f64 {
        r.iter().zip(&self.positions).map(|(ra, xa)| ra * xa[j]).sum()
    }

    /// `∂_a Ṽ` at point `j`.
    pub fn shifted_gradient(&self, r: &[f64], axis: usize, j: usize) -> Result<f64> {
        let slope = self.position_slopes.as_ref().map_or(1.0, |s| s[axis][j]);
        Ok(self.gradient()?[axis][j] + r[axis] * slope)
    }
}

/// Everything a propagator needs besides the state.
#[derive(Clone)]
pub struct LaserSystem {
    pub grid: Arc<SpectralGrid>,
    pub epsilon: f64,
    pub potential: Potential,
    pub field: Arc<dyn LaserField>,
}

impl core::fmt::Debug for LaserSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LaserSystem")
            .field("grid", &self.grid)
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

impl LaserSystem {
    pub fn new(
        grid: Arc<SpectralGrid>,
        epsilon: f64,
        potential: Potential,
        field: Arc<dyn LaserField>,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Parameter(format!("ε = {epsilon} must be positive")));
        }
        potential.validate(&grid)?;
        if field.dims() != grid.dims() {
            return Err(Error::FieldDimension {
                expected: grid.dims(),
                found: field.dims(),
            });
        }
        Ok(Self {
            grid,
            epsilon,
            potential,
            field,
        })
    }

    /// The same system with another field.
    pub fn with_field(&self, field: Arc<dyn LaserField>) -> Result<Self> {
        Self::new(self.grid.clone(), self.epsilon, self.potential.clone(), field)
    }

    pub fn is_dissipative(&self) -> bool {
        self.potential.damping.is_some()
    }
}
