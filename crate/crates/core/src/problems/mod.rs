//! The example problems: double wells driven by sine lobes and a chirped
//! pulse, multi-well traps in two and three dimensions, and a soft Coulomb
//! atom with an absorbing boundary.

use alloc::{boxed::Box, format, string::String, sync::Arc, vec, vec::Vec};

use num_complex::Complex64;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::FourierPlanner;
use crate::field::{LaserField, PolarizedField};
use crate::spectral::SpectralGrid;
use crate::system::{LaserSystem, Potential};

pub mod absorber;
pub mod eigen;
pub mod fields;

pub use absorber::AbsorberSpec;
pub use eigen::{eigenstate, eigenstates, energies};

/// Names accepted by [`build_problem`].
pub const PROBLEMS: [&str; 6] = ["ex1", "ex2", "ex3", "ex4_1", "ex4_2", "ex5"];

/// Well centres of the two-dimensional trap, one row per well.
pub const CENTRES_2D: [[f64; 2]; 4] = [[-0.5, -0.5], [-0.5, 0.5], [core::f64::consts::FRAC_1_SQRT_2, 0.0], [0.0, 0.0]];

/// Well centres of the three-dimensional trap.
pub const CENTRES_3D: [[f64; 3]; 5] = [
    [-0.5, -0.5, -0.5],
    [-0.5, 0.5, -0.5],
    [0.75, 0.0, -0.5],
    [0.0, 0.0, 0.0],
    [0.0, 0.0, 0.75],
];

/// Radius of the wells used for occupation probabilities.
pub const WELL_RADIUS: f64 = 0.2;

/// Width of the absorbing layer of the soft Coulomb problem.
pub const ABSORBER_WIDTH: f64 = 40.0;

/// Adjustments to a problem's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    /// Grid points per axis.
    pub points: Option<usize>,
    pub t_final: Option<f64>,
    /// Gauss–Legendre knots for the field integrals.
    pub knots: Option<usize>,
    /// Number of time steps.
    pub steps: Option<usize>,
    /// Multiplies the laser field; zero switches it off.
    pub field_scale: Option<f64>,
    /// Strength `γ` of the absorbing layer, where there is one.
    pub absorber_strength: Option<f64>,
}

/// A fully specified initial-value problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub system: LaserSystem,
    /// Normalized initial state.
    pub initial: Vec<Complex64>,
    pub t_final: f64,
    pub steps: usize,
    pub knots: usize,
    /// Well centres for occupation probabilities (empty in one dimension).
    pub centres: Vec<Vec<f64>>,
    pub absorber: Option<AbsorberSpec>,
}

impl Problem {
    pub fn step_size(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.system.grid
    }
}

/// `V₁ = x⁴ − 15x²` and its derivative.
pub fn v1(x: f64) -> (f64, f64) {
    (x.powi(4) - 15.0 * x * x, 4.0 * x.powi(3) - 30.0 * x)
}

/// `V₂ = x⁴/5 − 2x²` and its derivative.
pub fn v2(x: f64) -> (f64, f64) {
    (0.2 * x.powi(4) - 2.0 * x * x, 0.8 * x.powi(3) - 4.0 * x)
}

/// `V₅ = 2(1 − 1/√(x² + 1))` and its derivative.
pub fn v5(x: f64) -> (f64, f64) {
    let r = (x * x + 1.0).sqrt();
    (2.0 * (1.0 - 1.0 / r), 2.0 * x / (r * r * r))
}

/// `A ∏_j |x − c_j|²` and its gradient, written into `gradient`.
pub fn product_wells(x: &[f64], prefactor: f64, centres: &[Vec<f64>], gradient: &mut [f64]) -> f64 {
    let sq: Vec<f64> = centres
        .iter()
        .map(|c| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    let value = prefactor * sq.iter().product::<f64>();
    gradient.iter_mut().for_each(|g| *g = 0.0);
    for (j, c) in centres.iter().enumerate() {
        let others: f64 = sq.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, s)| s).product();
        for (axis, g) in gradient.iter_mut().enumerate() {
            *g += prefactor * 2.0 * (x[axis] - c[axis]) * others;
        }
    }
    value
}

/// Samples `(δπ)^{−d/4} exp(−|x − x₀|²/(2δ))` and normalizes it on the grid.
pub fn gaussian(grid: &SpectralGrid, centre: &[f64], delta: f64) -> Vec<Complex64> {
    let d = grid.dims() as f64;
    let amplitude = (delta * core::f64::consts::PI).powf(-d / 4.0);
    let mut u = grid.sample(|x| {
        let r2: f64 = x.iter().zip(centre).map(|(a, b)| (a - b) * (a - b)).sum();
        Complex64::new(amplitude * (-r2 / (2.0 * delta)).exp(), 0.0)
    });
    let n = grid.norm(&u);
    u.iter_mut().for_each(|z| *z /= n);
    u
}

/// `P_j = Δx^d Σ_{|x − c_j| ≤ radius} |u(x)|²` for each centre.
pub fn well_occupation(grid: &SpectralGrid, u: &[Complex64], centres: &[Vec<f64>], radius: f64) -> Result<Vec<f64>> {
    if u.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            found: u.len(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("well radius {radius} must be positive")));
    }
    let d = grid.dims();
    if let Some(c) = centres.iter().find(|c| c.len() != d) {
        return Err(Error::Parameter(format!("centre {c:?} is not {d}-dimensional")));
    }
    let mut p = vec![0.0; centres.len()];
    let mut x = [0.0; 3];
    for (i, z) in u.iter().enumerate() {
        grid.point(i, &mut x[..d]);
        for (pj, c) in p.iter_mut().zip(centres) {
            let r2: f64 = x[..d].iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            if r2 <= radius * radius {
                *pj += z.norm_sqr();
            }
        }
    }
    let dv = grid.cell_volume();
    Ok(p.into_iter().map(|s| s * dv).collect())
}

type Profile = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A one-dimensional potential returning value and derivative.
type Profile1d = fn(f64) -> (f64, f64);

fn polarized(direction: Vec<f64>, scale: f64, profile: fn(f64) -> f64) -> Arc<dyn LaserField> {
    let f: Profile = Box::new(move |t| scale * profile(t));
    Arc::new(PolarizedField::new(direction, f))
}

fn positive(what: &str, value: Option<usize>) -> Result<Option<usize>> {
    match value {
        Some(0) => Err(Error::Parameter(format!("{what} must be positive"))),
        v => Ok(v),
    }
}

/// Builds a named problem with the `rustfft` backend.
#[cfg(feature = "std")]
pub fn build_problem(name: &str, overrides: &Overrides) -> Result<Problem> {
    build_problem_with_planner(name, overrides, &mut crate::fft::RustFftPlanner::default())
}

/// Builds one of [`PROBLEMS`].
pub fn build_problem_with_planner(name: &str, overrides: &Overrides, planner: &mut dyn FourierPlanner) -> Result<Problem> {
    struct Defaults {
        half: f64,
        dims: usize,
        points: usize,
        epsilon: f64,
        t_final: f64,
        steps: usize,
        knots: usize,
    }
    let defaults = match name {
        "ex1" => Defaults { half: 10.0, dims: 1, points: 150, epsilon: 1.0, t_final: 4.0, steps: 4000, knots: 3 },
        "ex2" => Defaults { half: 5.0, dims: 1, points: 1000, epsilon: 1e-2, t_final: 2.5, steps: 2500, knots: 11 },
        "ex3" => Defaults { half: 1.0, dims: 2, points: 150, epsilon: 1e-2, t_final: 2.0, steps: 2000, knots: 11 },
        "ex4_1" | "ex4_2" => Defaults { half: 1.0, dims: 3, points: 150, epsilon: 1e-2, t_final: 2.0, steps: 2000, knots: 11 },
        "ex5" => Defaults { half: 240.0, dims: 1, points: 768, epsilon: 1.0, t_final: 500.0, steps: 1000, knots: 3 },
        _ => return Err(Error::UnknownProblem(name.into())),
    };
    let points = positive("grid points", overrides.points)?.unwrap_or(defaults.points);
    let knots = positive("knot count", overrides.knots)?.unwrap_or(defaults.knots);
    let t_final = overrides.t_final.unwrap_or(defaults.t_final);
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::Parameter(format!("final time {t_final} must be positive")));
    }
    let steps = match positive("step count", overrides.steps)? {
        Some(n) => n,
        // Keep the default step size when only the final time changes.
        None => ((defaults.steps as f64 * t_final / defaults.t_final).round() as usize).max(1),
    };
    let scale = overrides.field_scale.unwrap_or(1.0);
    let bounds = vec![(-defaults.half, defaults.half); defaults.dims];
    let grid = Arc::new(SpectralGrid::with_planner(&bounds, &vec![points; defaults.dims], planner)?);
    let epsilon = defaults.epsilon;

    let one_dimensional = |f: fn(f64) -> (f64, f64)| -> Result<Potential> {
        let nodes = grid.nodes(0);
        let (v, g): (Vec<f64>, Vec<f64>) = nodes.iter().map(|&x| f(x)).unzip();
        Potential::new(&grid, v, Some(vec![g]))
    };
    let wells = |prefactor: f64, centres: &[Vec<f64>]| -> Result<Potential> {
        let d = grid.dims();
        let mut gradient = vec![Vec::with_capacity(grid.len()); d];
        let mut g = [0.0; 3];
        let values = grid.sample(|x| {
            let v = product_wells(x, prefactor, centres, &mut g[..d]);
            for (axis, ga) in gradient.iter_mut().enumerate() {
                ga.push(g[axis]);
            }
            v
        });
        Potential::new(&grid, values, Some(gradient))
    };

    let mut absorber = None;
    let mut centres: Vec<Vec<f64>> = Vec::new();
    let (potential, field, initial) = match name {
        "ex1" | "ex2" => {
            let (v, profile, delta): (Profile1d, fn(f64) -> f64, f64) = if name == "ex1" {
                (v1, fields::e1, 0.2)
            } else {
                (v2, fields::e2, 1e-2)
            };
            (one_dimensional(v)?, polarized(vec![1.0], scale, profile), gaussian(&grid, &[-2.5], delta))
        }
        "ex3" => {
            centres = CENTRES_2D.iter().map(|c| c.to_vec()).collect();
            let pot = wells(2500.0, &centres)?;
            (pot, polarized(vec![0.2, 0.0], scale, fields::e2), gaussian(&grid, &[0.0, 0.0], 1e-3))
        }
        "ex4_1" | "ex4_2" => {
            centres = CENTRES_3D.iter().map(|c| c.to_vec()).collect();
            let pot = wells(40.0, &centres)?;
            let direction = if name == "ex4_1" {
                vec![0.0, 0.0, 0.2]
            } else {
                let a = 0.2 * core::f64::consts::FRAC_1_SQRT_2;
                vec![-a, 0.0, a]
            };
            (pot, polarized(direction, scale, fields::e2), gaussian(&grid, &[0.0, 0.0, 0.0], 1e-3))
        }
        _ => {
            let strength = overrides.absorber_strength.unwrap_or(absorber::DEFAULT_STRENGTH);
            let spec = AbsorberSpec::new(&grid, ABSORBER_WIDTH, strength)?;
            let pot = spec.potential(&grid, |x| v5(x).0, |x| v5(x).1)?;
            let raw: Vec<f64> = grid.nodes(0).iter().map(|&x| v5(x).0).collect();
            let (_, u0) = eigenstate(&grid, &raw, epsilon, 4)?;
            absorber = Some(spec);
            (pot, polarized(vec![1.0], scale, fields::e5), u0)
        }
    };
    let system = LaserSystem::new(grid, epsilon, potential, field)?;
    Ok(Problem {
        name: name.into(),
        system,
        initial,
        t_final,
        steps,
        knots,
        centres,
        absorber,
    })
}
