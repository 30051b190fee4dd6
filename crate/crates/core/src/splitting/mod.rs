//! Magnus-splitting propagators.
//!
//! Every sixth-order scheme has the symmetric shape
//!
//! ```text
//! e^{Θ₄} ≈ e^{L/2} e^{C/2} S(T, W) e^{C/2} e^{L/2}
//! ```
//!
//! where `S` is any inner splitting of `e^{T+W}`:
//!
//! | outer | `C/2`                     | `L/2`          | `T`            | `W`                                   |
//! |-------|---------------------------|----------------|----------------|---------------------------------------|
//! | S1    | `½[Δ, pᵀ∇V₀]` (Lanczos)   | –              | `ihεΔ − sᵀ∇`   | `−ihε⁻¹Ṽ + iε⁻¹qᵀ∇V₀ + c`             |
//! | S2    | `−6h⁻²pᵀ∇`                | –              | `ihεΔ − s̃ᵀ∇`   | as S1                                 |
//! | S3    | `−6h⁻²pᵀ∇`                | `−3ih⁻²ε⁻¹qᵀx` | `ihεΔ − s̃ᵀ∇`   | `−ihε⁻¹Ṽ + 6ih⁻²ε⁻¹qᵀx + c̃`           |
//!
//! The drift exponentials `C/2` of S2 and S3 are merged into the outermost
//! kinetic stages, so these cost no more FFTs than the inner splitting.
//!
//! For S3 the symmetric BCH expansion of `e^{L/2} e^{T+W+C} e^{L/2}` has the
//! correction `−[[T+W, L], T+W]/12 = −(γ/6) qᵀ∇Ṽ` for `L = γh⁻²qᵀx`, so
//! matching `Θ₄` needs `γ = −6iε⁻¹`. With the opposite sign the scheme drops
//! to fourth order.

use alloc::{format, string::String, vec, vec::Vec};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::coefficients::magnus_coefficients;
use crate::field::quadrature::{gauss_legendre, QuadratureRule};
use crate::magnus::lanczos::{LanczosOptions, LanczosWorkspace};
use crate::magnus::{commutator_matvec, MagnusOperator};
use crate::system::LaserSystem;

mod inner;
pub mod tables;

pub use inner::{inner_apply, InnerParts};
pub use tables::{SplitScheme, Stage};

/// The outer structure of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outer {
    /// Strang splitting off the commutator, exponentiated by Lanczos.
    S1,
    /// Commutator-free: the commutator is traded for a drift.
    S2,
    /// Gradient-free variant of S2.
    S3,
    /// Fourth-order Magnus–Strang splitting.
    MaStBM4,
    /// Classical splitting with the potential sampled as time advances.
    TimeOrdered,
    /// `e^{Θ₄}` by Lanczos, no splitting.
    Lanczos,
}

impl Outer {
    pub fn name(self) -> &'static str {
        match self {
            Outer::S1 => "S1",
            Outer::S2 => "S2",
            Outer::S3 => "S3",
            Outer::MaStBM4 => "MaStBM4",
            Outer::TimeOrdered => "TO",
            Outer::Lanczos => "LM",
        }
    }
}

/// A complete propagator choice.
#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    pub outer: Outer,
    pub inner: Option<SplitScheme>,
    /// Used by S1 for `e^{C₁/2}` and by [`Outer::Lanczos`].
    pub lanczos: LanczosOptions,
}

impl Scheme {
    pub fn new(outer: Outer, inner: Option<SplitScheme>) -> Result<Self> {
        let lanczos = match outer {
            Outer::Lanczos => LanczosOptions {
                initial_dim: 8,
                max_dim: 128,
                tolerance: 1e-13,
            },
            _ => LanczosOptions::default(),
        };
        let scheme = Self { outer, inner, lanczos };
        scheme.validate()?;
        Ok(scheme)
    }

    fn validate(&self) -> Result<()> {
        match (&self.inner, self.outer) {
            (Some(_), Outer::Lanczos) => Err(Error::Incompatible("the Lanczos propagator takes no inner table".into())),
            (None, Outer::Lanczos) => Ok(()),
            (None, outer) => Err(Error::Incompatible(format!("{} needs an inner table", outer.name()))),
            (Some(t), Outer::S3) if t.is_compact() => Err(Error::Incompatible(format!(
                "S3 is gradient-free; combining it with the compact table {} defeats its purpose",
                t.name
            ))),
            (Some(t), Outer::TimeOrdered) if t.is_compact() => Err(Error::Incompatible(format!(
                "the time-ordered baseline supports classical tables only, not {}",
                t.name
            ))),
            _ => Ok(()),
        }
    }

    /// Parses `"S2+OMF76"`, `"S1+OMF85+L4"`, `"TO+OMF85"`, `"MaStBM4+BM4"`,
    /// `"LM"` or `"LM+L40"`. Table names are resolved by `tables`; an
    /// `L m` suffix fixes the Lanczos dimension.
    pub fn parse(text: &str, tables: impl Fn(&str) -> Result<SplitScheme>) -> Result<Self> {
        let mut parts = text.split('+').map(str::trim);
        let outer = match parts.next().unwrap_or("").to_ascii_uppercase().as_str() {
            "S1" => Outer::S1,
            "S2" => Outer::S2,
            "S3" => Outer::S3,
            "MASTBM4" | "MASTBM" => Outer::MaStBM4,
            "TO" => Outer::TimeOrdered,
            "LM" => Outer::Lanczos,
            _ => return Err(Error::UnknownScheme(text.into())),
        };
        let mut inner = None;
        let mut fixed_dim = None;
        for part in parts {
            let lanczos_dim = part
                .strip_prefix('L')
                .filter(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
                .and_then(|rest| rest.parse::<usize>().ok());
            match lanczos_dim {
                Some(m) if m > 0 => fixed_dim = Some(m),
                _ if inner.is_none() => inner = Some(tables(part)?),
                _ => return Err(Error::UnknownScheme(text.into())),
            }
        }
        let mut scheme = Self::new(outer, inner)?;
        if let Some(m) = fixed_dim {
            if !matches!(outer, Outer::S1 | Outer::Lanczos) {
                return Err(Error::Incompatible(format!("{} does not use Lanczos", outer.name())));
            }
            scheme.lanczos = LanczosOptions::fixed(m);
        }
        Ok(scheme)
    }

    pub fn label(&self) -> String {
        let mut s = String::from(self.outer.name());
        if let Some(t) = &self.inner {
            s.push('+');
            s.push_str(&t.name);
        }
        if self.lanczos.initial_dim == self.lanczos.max_dim && self.lanczos.tolerance.is_infinite() {
            s.push_str(&format!("+L{}", self.lanczos.initial_dim));
        }
        s
    }

    /// Whether `∇V₀` must be available.
    pub fn needs_gradient(&self) -> bool {
        match self.outer {
            Outer::S1 | Outer::S2 | Outer::Lanczos => true,
            Outer::S3 | Outer::TimeOrdered | Outer::MaStBM4 => self.inner.as_ref().is_some_and(SplitScheme::is_compact),
        }
    }

    /// Checks the scheme against a system before any step is taken.
    pub fn check(&self, system: &LaserSystem) -> Result<()> {
        if self.needs_gradient() && system.potential.gradient.is_none() {
            return Err(Error::MissingGradient);
        }
        if self.outer == Outer::Lanczos && system.is_dissipative() {
            return Err(Error::Incompatible("the Lanczos propagator cannot carry an absorber".into()));
        }
        Ok(())
    }
}

/// Work counters of a [`Stepper`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub steps: u64,
    /// Applications of the Lanczos operator (each costs FFTs).
    pub lanczos_matvecs: u64,
    /// One-dimensional FFT passes over the whole state, counted from the
    /// stage structure: `2d` per kinetic exponential, `4d` per commutator
    /// product and `2d` (plus `4d` with a commutator term) per `Θ₄` product.
    pub fft_passes: u64,
}

/// Advances states with a fixed scheme, reusing buffers between steps.
pub struct Stepper<'a> {
    system: &'a LaserSystem,
    scheme: Scheme,
    knots: usize,
    rule: Option<QuadratureRule>,
    workspace: LanczosWorkspace,
    potential: Vec<Complex64>,
    gradient: Vec<Complex64>,
    pub stats: StepStats,
}

impl<'a> Stepper<'a> {
    /// `knots` is the number of Gauss–Legendre knots for the field integrals.
    pub fn new(system: &'a LaserSystem, scheme: Scheme, knots: usize) -> Result<Self> {
        scheme.check(system)?;
        if knots == 0 {
            return Err(Error::Parameter("at least one quadrature knot is needed".into()));
        }
        let n = system.grid.len();
        Ok(Self {
            system,
            scheme,
            knots,
            rule: None,
            workspace: LanczosWorkspace::new(),
            potential: vec![Complex64::new(0.0, 0.0); n],
            gradient: vec![Complex64::new(0.0, 0.0); n],
            stats: StepStats::default(),
        })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    fn dims(&self) -> u64 {
        self.system.grid.dims() as u64
    }

    pub fn system(&self) -> &LaserSystem {
        self.system
    }

    fn rule(&mut self, h: f64) -> &QuadratureRule {
        let knots = self.knots;
        let stale = self.rule.as_ref().is_none_or(|r| r.h != h);
        if stale {
            self.rule = Some(gauss_legendre(knots, h));
        }
        self.rule.as_ref().expect("rule was just set")
    }

    /// `u ← Φ(t, h) u`, one step from `t` to `t + h`. Negative `h` steps
    /// backwards.
    pub fn step(&mut self, u: &mut [Complex64], t: f64, h: f64) -> Result<()> {
        if u.len() != self.system.grid.len() {
            return Err(Error::Shape {
                expected: self.system.grid.len(),
                found: u.len(),
            });
        }
        if h == 0.0 || !h.is_finite() {
            return Err(Error::Parameter(format!("step size {h} is not usable")));
        }
        self.stats.steps += 1;
        match self.scheme.outer {
            Outer::TimeOrdered => self.time_ordered(u, t, h),
            Outer::Lanczos => {
                let options = self.scheme.lanczos;
                let rule = self.rule(h).clone();
                let op = MagnusOperator::for_step(self.system, t, h, &rule)?;
                let per_product = if op.commutator_multiplier().is_some() { 6 } else { 2 };
                let report = op.exponentiate(u, options, &mut self.workspace)?;
                let matvecs = report.matvecs as u64;
                self.stats.lanczos_matvecs += matvecs;
                self.stats.fft_passes += per_product * self.dims() * matvecs;
                Ok(())
            }
            outer => self.magnus_split(outer, u, t, h),
        }
    }

    /// Advances `steps` equal steps from `t0` to `t0 + steps·h`.
    pub fn propagate(&mut self, u: &mut [Complex64], t0: f64, h: f64, steps: usize) -> Result<()> {
        for n in 0..steps {
            self.step(u, t0 + n as f64 * h, h)?;
        }
        Ok(())
    }

    fn magnus_split(&mut self, outer: Outer, u: &mut [Complex64], t: f64, h: f64) -> Result<()> {
        let system = self.system;
        let (grid, pot, eps) = (&*system.grid, &system.potential, system.epsilon);
        let rule = self.rule(h).clone();
        let c = magnus_coefficients(&*system.field, t, h, eps, &rule);
        let inv_eps = 1.0 / eps;
        let dims = grid.dims();
        let i = Complex64::new(0.0, 1.0);
        let inner = self.scheme.inner.as_ref().expect("validated at construction");

        // W, pointwise.
        let q_term: Vec<f64> = match outer {
            Outer::S1 | Outer::S2 => {
                let grad = pot.gradient()?;
                (0..grid.len())
                    .map(|j| c.q.iter().zip(grad).map(|(q, g)| q * g[j]).sum())
                    .collect()
            }
            Outer::S3 => (0..grid.len()).map(|j| pot.field_term(&c.q, j)).collect(),
            _ => Vec::new(),
        };
        let (scalar, q_factor) = match outer {
            Outer::S1 | Outer::S2 => (c.c, i * inv_eps),
            Outer::S3 => (c.c_tilde, i * 6.0 * inv_eps / (h * h)),
            _ => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        };
        for (j, w) in self.potential.iter_mut().enumerate() {
            let damping = pot.damping.as_ref().map_or(0.0, |g| g[j]);
            *w = Complex64::new(h * inv_eps * damping, -h * inv_eps * pot.shifted(&c.r, j)) + scalar;
            if let Some(q) = q_term.get(j) {
                *w += q_factor * q;
            }
        }
        // U = 2ih³ε⁻¹|∇Ṽ|², compact tables only.
        let compact = inner.is_compact();
        if compact {
            for (j, g) in self.gradient.iter_mut().enumerate() {
                let mut sq = 0.0;
                for axis in 0..dims {
                    let d = pot.shifted_gradient(&c.r, axis, j)?;
                    sq += d * d;
                }
                *g = Complex64::new(0.0, 2.0 * h * h * h * inv_eps * sq);
            }
        }
        let mut drift = [0.0; 3];
        let mut edge = [0.0; 3];
        let has_edge = match outer {
            Outer::S1 => {
                drift[..dims].copy_from_slice(&c.s);
                false
            }
            Outer::S2 | Outer::S3 => {
                drift[..dims].copy_from_slice(&c.s_tilde);
                for (e, p) in edge.iter_mut().zip(&c.p) {
                    *e = 6.0 / (h * h) * p;
                }
                true
            }
            Outer::MaStBM4 => {
                for (e, s) in edge.iter_mut().zip(&c.s) {
                    *e = 0.5 * s;
                }
                true
            }
            _ => unreachable!("handled by step"),
        };
        let parts = InnerParts {
            lambda: i * h * eps,
            drift: &drift[..dims],
            edge_drift: has_edge.then_some(&edge[..dims]),
            potential: &self.potential,
            gradient: compact.then_some(&self.gradient[..]),
        };

        // e^{L₃/2}, pointwise; only S3.
        let half_l: Option<Vec<Complex64>> = (outer == Outer::S3).then(|| {
            (0..grid.len())
                .map(|j| -i * 3.0 * inv_eps / (h * h) * pot.field_term(&c.q, j))
                .collect()
        });
        if let Some(l) = &half_l {
            grid.exp_potential(u, l)?;
        }
        // e^{C₁/2} by Lanczos; only S1.
        let commutator: Option<Vec<f64>> = (outer == Outer::S1 && c.p.iter().any(|&p| p != 0.0)).then(|| {
            let grad = pot.gradient.as_ref().expect("checked");
            (0..grid.len())
                .map(|j| 0.5 * c.p.iter().zip(grad).map(|(p, g)| p * g[j]).sum::<f64>())
                .collect()
        });
        let options = self.scheme.lanczos;
        let half_commutator = |u: &mut [Complex64], ws: &mut LanczosWorkspace| -> Result<u64> {
            let Some(f) = &commutator else { return Ok(0) };
            let v = u.to_vec();
            let report = ws.expm_adaptive(|x, y| commutator_matvec(grid, f, x, y), &v, 1.0, options, u)?;
            Ok(report.matvecs as u64)
        };
        let mut matvecs = half_commutator(u, &mut self.workspace)?;
        inner_apply(grid, inner, u, &parts)?;
        matvecs += half_commutator(u, &mut self.workspace)?;
        let standalone = if has_edge {
            usize::from(!inner.starts_with_kinetic()) + usize::from(!inner.ends_with_kinetic())
        } else {
            0
        };
        let d = dims as u64;
        self.stats.lanczos_matvecs += matvecs;
        self.stats.fft_passes += 2 * d * (inner.kinetic_stages() + standalone) as u64 + 4 * d * matvecs;
        if let Some(l) = &half_l {
            grid.exp_potential(u, l)?;
        }
        Ok(())
    }

    fn time_ordered(&mut self, u: &mut [Complex64], t: f64, h: f64) -> Result<()> {
        let system = self.system;
        let (grid, pot, eps) = (&*system.grid, &system.potential, system.epsilon);
        let inner = self.scheme.inner.as_ref().expect("validated at construction");
        let dims = grid.dims();
        let lambda = Complex64::new(0.0, h * eps);
        let zero_drift = [0.0; 3];
        let inv_eps = 1.0 / eps;
        let mut elapsed = 0.0;
        let mut e = vec![0.0; dims];
        for stage in &inner.stages {
            match *stage {
                Stage::Kinetic(a) => {
                    grid.exp_kinetic(u, lambda * a, &zero_drift[..dims])?;
                    elapsed += a;
                }
                Stage::Potential(b) => {
                    system.field.eval_into(t + elapsed * h, &mut e);
                    for (j, v) in u.iter_mut().enumerate() {
                        let damping = pot.damping.as_ref().map_or(0.0, |g| g[j]);
                        let w = Complex64::new(h * inv_eps * damping, -h * inv_eps * pot.shifted(&e, j));
                        *v *= (w * b).exp();
                    }
                }
                Stage::Compact { .. } => unreachable!("rejected at construction"),
            }
        }
        self.stats.fft_passes += 2 * (dims * inner.kinetic_stages()) as u64;
        Ok(())
    }
}

fn single_step(system: &LaserSystem, scheme: Scheme, u: &mut [Complex64], t: f64, h: f64, knots: usize) -> Result<()> {
    Stepper::new(system, scheme, knots)?.step(u, t, h)
}

/// One S1 step with the given inner table and `knots` quadrature knots.
pub fn step_s1(system: &LaserSystem, inner: &SplitScheme, u: &mut [Complex64], t: f64, h: f64, knots: usize) -> Result<()> {
    single_step(system, Scheme::new(Outer::S1, Some(inner.clone()))?, u, t, h, knots)
}

/// One S2 step.
pub fn step_s2(system: &LaserSystem, inner: &SplitScheme, u: &mut [Complex64], t: f64, h: f64, knots: usize) -> Result<()> {
    single_step(system, Scheme::new(Outer::S2, Some(inner.clone()))?, u, t, h, knots)
}

/// One S3 step.
pub fn step_s3(system: &LaserSystem, inner: &SplitScheme, u: &mut [Complex64], t: f64, h: f64, knots: usize) -> Result<()> {
    single_step(system, Scheme::new(Outer::S3, Some(inner.clone()))?, u, t, h, knots)
}

/// One step of the fourth-order Magnus–Strang scheme around `inner`.
pub fn step_mastbm4(system: &LaserSystem, inner: &SplitScheme, u: &mut [Complex64], t: f64, h: f64, knots: usize) -> Result<()> {
    single_step(system, Scheme::new(Outer::MaStBM4, Some(inner.clone()))?, u, t, h, knots)
}

/// One step of the time-ordered classical splitting.
pub fn step_time_ordered(system: &LaserSystem, inner: &SplitScheme, u: &mut [Complex64], t: f64, h: f64) -> Result<()> {
    single_step(system, Scheme::new(Outer::TimeOrdered, Some(inner.clone()))?, u, t, h, 1)
}
