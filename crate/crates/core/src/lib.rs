//! Sixth-order Magnus-splitting propagators for the Schrödinger equation
//!
//! ```text
//! iε ∂ₜu = [−ε²Δ + V₀(x) + e(t)ᵀx] u
//! ```
//!
//! on periodic tensor grids in one to three dimensions. The laser integrals
//! entering the simplified sixth-order Magnus expansion are kept intact and
//! evaluated with any quadrature, and the exponential of the expansion is
//! approximated by one of three outer splittings that wrap an existing
//! time-independent splitting (classical or compact) of the central
//! exponent.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. In that configuration the caller supplies an FFT through
//! [`fft::FourierPlanner`].

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod field;
pub mod magnus;
pub mod problems;
pub mod spectral;
pub mod system;
pub mod splitting;

pub use error::{Error, Result};
pub use field::{
    coefficients::{magnus_coefficients, mu, MagnusCoefficients},
    quadrature::{bernoulli_rescaled, gauss_legendre, QuadratureRule},
    LaserField,
};
pub use magnus::{
    commutator_matvec,
    lanczos::{lanczos_expm, LanczosOptions, LanczosReport, LanczosWorkspace},
    theta4_lanczos_step, MagnusOperator,
};
pub use num_complex::Complex64;
#[cfg(feature = "std")]
pub use problems::build_problem;
pub use problems::{build_problem_with_planner, well_occupation, Overrides, Problem};
pub use spectral::{SpectralGrid, WaveFunction};
pub use splitting::{
    inner_apply, step_mastbm4, step_s1, step_s2, step_s3, step_time_ordered, InnerParts, Outer, Scheme,
    SplitScheme, Stage, Stepper,
};
pub use system::{LaserSystem, Potential};
