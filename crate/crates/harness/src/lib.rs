//! Driver for the `laser-magnus` propagators: single runs, convergence
//! studies with plain-text reports, eigenvalues and absorber calibration.
//!
//! Exit codes of the binary: 0 on success, 1 for I/O failures, 2 for
//! invalid input and 3 for numerical failures.

pub mod calibrate;
pub mod cli;
pub mod config;
pub mod error;
pub mod fieldfile;
pub mod report;
pub mod run;
pub mod study;

pub use error::{HarnessError, Result};
