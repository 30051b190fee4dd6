//! A complex absorbing layer with a flattened potential inside it.
//!
//! Inside a band of width `w` at either end of a one-dimensional periodic
//! domain, functions are blended towards their value at the inner edge of
//! the band,
//!
//! ```text
//! f_mod(x) = (1 − σ(x)) f(x) + σ(x) f(x_edge),
//! ```
//!
//! with `σ` a C² ramp rising from 0 at the inner edge to 1 at the domain
//! boundary, where all its derivatives up to the second vanish. The blend is
//! linear in `f`, so `V_mod + e(t) x_mod` is the flattened `V + e(t) x` for
//! every `t`. The layer also adds the absorbing potential `iΓ` with
//! `Γ = −γσ²`.

use alloc::{format, sync::Arc, vec::Vec};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::ConstantField;
use crate::spectral::SpectralGrid;
use crate::splitting::{Outer, Scheme, SplitScheme, Stepper};
use crate::system::{LaserSystem, Potential};

/// Strength used by the shipped examples. A scan with [`residual_mass`] on
/// the soft Coulomb grid (band width 40) leaves less than `10⁻³` of the mass
/// for every momentum in `[0.3, 1]`, which covers electrons ionised from the
/// fifth state by two to five photons of frequency 0.12. Slower packets are
/// reflected by the ramp, and faster ones outrun it.
pub const DEFAULT_STRENGTH: f64 = 0.22;

fn smoothstep(s: f64) -> (f64, f64) {
    (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
}

/// `σ(s) = S(S(s))` and `dσ/ds` for `s ∈ [0, 1]`.
pub fn ramp(s: f64) -> (f64, f64) {
    let s = s.clamp(0.0, 1.0);
    let (inner, d_inner) = smoothstep(s);
    let (outer, d_outer) = smoothstep(inner);
    (outer, d_outer * d_inner)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbsorberSpec {
    pub width: f64,
    pub strength: f64,
    centre: f64,
    inner_edge: f64,
    nodes: Vec<f64>,
    /// `σ` at every node.
    pub ramp: Vec<f64>,
    /// `dσ/dx` at every node.
    pub ramp_slope: Vec<f64>,
}

impl AbsorberSpec {
    pub fn new(grid: &SpectralGrid, width: f64, strength: f64) -> Result<Self> {
        if grid.dims() != 1 {
            return Err(Error::Parameter(format!(
                "absorbing layers are implemented for one dimension, not {}",
                grid.dims()
            )));
        }
        let (lo, hi) = grid.bounds(0);
        let half = (hi - lo) / 2.0;
        if !(width > 0.0 && width < half) || !(strength >= 0.0) {
            return Err(Error::Parameter(format!(
                "absorber width {width} must lie in (0, {half}) and strength {strength} must be non-negative"
            )));
        }
        let centre = (lo + hi) / 2.0;
        let inner_edge = half - width;
        let nodes = grid.nodes(0).to_vec();
        let (ramp, ramp_slope) = nodes
            .iter()
            .map(|&x| {
                let d = x - centre;
                let (sigma, ds) = ramp((d.abs() - inner_edge) / width);
                (sigma, ds * d.signum() / width)
            })
            .unzip();
        Ok(Self {
            width,
            strength,
            centre,
            inner_edge,
            nodes,
            ramp,
            ramp_slope,
        })
    }

    /// The inner edge of the band on the side of `x`.
    fn edge(&self, x: f64) -> f64 {
        self.centre + self.inner_edge * (x - self.centre).signum()
    }

    /// Flattened samples of `f` and of their derivative, given `f` and `f'`.
    pub fn flatten(&self, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        self.nodes
            .iter()
            .zip(self.ramp.iter().zip(&self.ramp_slope))
            .map(|(&x, (&sigma, &slope))| {
                let (fx, fe) = (f(x), f(self.edge(x)));
                ((1.0 - sigma) * fx + sigma * fe, (1.0 - sigma) * df(x) + slope * (fe - fx))
            })
            .unzip()
    }

    /// `Γ = −γσ²`.
    pub fn damping(&self) -> Vec<f64> {
        self.ramp.iter().map(|s| -self.strength * s * s).collect()
    }

    /// A potential with flattened `V₀`, `∇V₀` and coupling coordinate, plus
    /// the absorbing term.
    pub fn potential(
        &self,
        grid: &SpectralGrid,
        v: impl Fn(f64) -> f64,
        dv: impl Fn(f64) -> f64,
    ) -> Result<Potential> {
        let (values, gradient) = self.flatten(v, dv);
        let (x_mod, x_slope) = self.flatten(|x| x, |_| 1.0);
        let mut pot = Potential::new(grid, values, Some(alloc::vec![gradient]))?;
        pot.positions = alloc::vec![x_mod];
        pot.position_slopes = Some(alloc::vec![x_slope]);
        pot.damping = Some(self.damping());
        pot.validate(grid)?;
        Ok(pot)
    }
}

/// Mass left on the grid after a free wave packet with mean momentum `k`
/// (in units with `ε = 1`) has run through both bands of the layer.
///
/// The packet is a Gaussian centred mid-domain, narrow enough to start
/// clear of the bands. Propagation lasts until its slow edge at
/// `k − 4σ_k` has crossed the inner region and both bands, so the
/// returned value is what the layer reflects or lets through.
pub fn residual_mass(grid: &Arc<SpectralGrid>, width: f64, strength: f64, k: f64) -> Result<f64> {
    let spec = AbsorberSpec::new(grid, width, strength)?;
    let delta = spec.inner_edge / 6.0;
    let spread = 1.0 / (delta * core::f64::consts::SQRT_2);
    let slowest = k - 4.0 * spread;
    if !(slowest > 0.0) {
        return Err(Error::Parameter(format!(
            "momentum {k} is too small to cross the layer (needs k > {})",
            4.0 * spread
        )));
    }
    let potential = spec.potential(grid, |_| 0.0, |_| 0.0)?;
    let system = LaserSystem::new(grid.clone(), 1.0, potential, Arc::new(ConstantField::zero(1)))?;
    let mut u: Vec<Complex64> = spec
        .nodes
        .iter()
        .map(|&x| {
            let d = x - spec.centre;
            Complex64::from_polar((-d * d / (2.0 * delta * delta)).exp(), k * d)
        })
        .collect();
    let n = grid.norm(&u);
    u.iter_mut().for_each(|z| *z /= n);
    // Group velocity of −Δ is 2k.
    let distance = spec.inner_edge + 2.0 * width + 4.0 * delta;
    let t = distance / (2.0 * slowest);
    let h = (0.5 / (k * k)).min(0.25);
    let steps = (t / h).ceil() as usize;
    let mut stepper = Stepper::new(&system, Scheme::new(Outer::S2, Some(SplitScheme::omf85()))?, 3)?;
    stepper.propagate(&mut u, 0.0, h, steps)?;
    Ok(grid.norm(&u).powi(2))
}
