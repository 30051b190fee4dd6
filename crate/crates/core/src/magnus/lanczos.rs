//! Krylov approximation of `e^{τA} v` for skew-Hermitian `A`.
//!
//! The Lanczos process runs on the Hermitian `B = iA`, so the projected
//! matrix `T` is real symmetric tridiagonal and
//! `e^{τA} v ≈ ‖v‖ V_m e^{−iτT} e₁`.

use alloc::{vec, vec::Vec};

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::Result;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type MatVec<'a> = dyn FnMut(&[Complex64], &mut [Complex64]) -> Result<()> + 'a;

/// Controls for [`LanczosWorkspace::expm_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// First Krylov dimension tried.
    pub initial_dim: usize,
    /// The dimension doubles until the error estimate passes or this cap is hit.
    pub max_dim: usize,
    /// Target for the a-posteriori error estimate, relative to `‖v‖`.
    pub tolerance: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            initial_dim: 2,
            max_dim: 64,
            tolerance: 1e-12,
        }
    }
}

impl LanczosOptions {
    /// A fixed Krylov dimension with no convergence guard.
    pub fn fixed(m: usize) -> Self {
        Self {
            initial_dim: m,
            max_dim: m,
            tolerance: f64::INFINITY,
        }
    }
}

/// Outcome of one exponentiation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LanczosReport {
    /// Krylov dimension used.
    pub dim: usize,
    pub matvecs: usize,
    /// `‖v‖ τ β_m |[e^{−iτT}]_{m,1}|`; zero after a breakdown.
    pub error_estimate: f64,
    /// The Krylov space became invariant, so the result is exact.
    pub breakdown: bool,
}

/// Reusable storage for the Krylov basis.
#[derive(Clone, Debug, Default)]
pub struct LanczosWorkspace {
    basis: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    scratch: Vec<Complex64>,
    /// Largest overlap `|⟨v_i, v_j⟩|`, `i ≠ j`, accepted into a basis so far.
    pub max_orthogonality_loss: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `e^{−iτT} e₁` for the symmetric tridiagonal `T` given by `alpha`, `beta`.
fn small_exponential(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| {
                    let phase = Complex64::new(0.0, -tau * eig.eigenvalues[l]).exp();
                    phase * eig.eigenvectors[(k, l)] * eig.eigenvectors[(0, l)]
                })
                .sum()
        })
        .collect()
}

impl LanczosWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Extends the Krylov basis by one vector. Returns `false` on breakdown.
    fn extend(&mut self, matvec: &mut MatVec<'_>) -> Result<bool> {
        let j = self.alpha.len();
        let n = self.basis[j].len();
        self.scratch.resize(n, ZERO);
        matvec(&self.basis[j], &mut self.scratch)?;
        // B v = i A v.
        let mut w: Vec<Complex64> = self.scratch.iter().map(|z| Complex64::new(-z.im, z.re)).collect();
        let scale = norm(&w);
        let alpha = dot(&self.basis[j], &w).re;
        for (wi, vi) in w.iter_mut().zip(&self.basis[j]) {
            *wi -= vi * alpha;
        }
        if j > 0 {
            let b = self.beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&self.basis[j - 1]) {
                *wi -= vi * b;
            }
        }
        self.alpha.push(alpha);
        // Full reorthogonalization. Measuring the overlap costs as much as
        // removing it, and even a 1e-8 overlap shows up in the norm once m
        // approaches the dimension. Two passes suffice.
        let mut beta = norm(&w);
        for _ in 0..2 {
            if beta == 0.0 {
                break;
            }
            let coeffs: Vec<Complex64> = self.basis.iter().map(|v| dot(v, &w)).collect();
            let loss = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max) / beta;
            if loss <= 1e-15 {
                break;
            }
            for (c, v) in coeffs.iter().zip(&self.basis) {
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * c;
                }
            }
            beta = norm(&w);
        }
        if beta > 0.0 {
            let after = self.basis.iter().map(|v| dot(v, &w).norm() / beta).fold(0.0, f64::max);
            self.max_orthogonality_loss = self.max_orthogonality_loss.max(after);
        }
        if beta <= 1e-12 * scale.max(f64::MIN_POSITIVE) || beta == 0.0 {
            return Ok(false);
        }
        self.beta.push(beta);
        w.iter_mut().for_each(|x| *x /= beta);
        self.basis.push(w);
        Ok(true)
    }

    /// `out ← e^{τA} v` where `matvec(x, y)` writes `y = A x` for a
    /// skew-Hermitian `A`.
    pub fn expm_adaptive(
        &mut self,
        mut matvec: impl FnMut(&[Complex64], &mut [Complex64]) -> Result<()>,
        v: &[Complex64],
        tau: f64,
        options: LanczosOptions,
        out: &mut [Complex64],
    ) -> Result<LanczosReport> {
        let vnorm = norm(v);
        self.basis.clear();
        self.alpha.clear();
        self.beta.clear();
        if vnorm == 0.0 || tau == 0.0 {
            out.copy_from_slice(v);
            return Ok(LanczosReport::default());
        }
        self.basis.push(v.iter().map(|z| z / vnorm).collect());
        let mut target = options.initial_dim.max(1);
        let cap = options.max_dim.max(target);
        let mut report = LanczosReport::default();
        let y = loop {
            while self.alpha.len() < target && !report.breakdown {
                report.matvecs += 1;
                if !self.extend(&mut matvec)? {
                    report.breakdown = true;
                }
            }
            let y = small_exponential(&self.alpha, &self.beta, tau);
            let m = self.alpha.len();
            report.dim = m;
            report.error_estimate = if report.breakdown {
                0.0
            } else {
                vnorm * tau.abs() * self.beta[m - 1] * y[m - 1].norm()
            };
            if report.breakdown || report.error_estimate <= options.tolerance * vnorm || target >= cap {
                break y;
            }
            target = (2 * target).min(cap);
        };
        out.iter_mut().for_each(|o| *o = ZERO);
        for (yk, vk) in y.iter().zip(&self.basis) {
            let c = yk * vnorm;
            for (o, x) in out.iter_mut().zip(vk) {
                *o += c * x;
            }
        }
        Ok(report)
    }

    /// `e^{τA} v` in a Krylov space of dimension `m` (smaller on breakdown).
    pub fn expm(
        &mut self,
        matvec: impl FnMut(&[Complex64], &mut [Complex64]) -> Result<()>,
        v: &[Complex64],
        tau: f64,
        m: usize,
        out: &mut [Complex64],
    ) -> Result<LanczosReport> {
        self.expm_adaptive(matvec, v, tau, LanczosOptions::fixed(m), out)
    }
}

/// `e^{τA} v` in an `m`-dimensional Krylov space, for skew-Hermitian `A`.
pub fn lanczos_expm(
    matvec: impl FnMut(&[Complex64], &mut [Complex64]) -> Result<()>,
    v: &[Complex64],
    m: usize,
    tau: f64,
) -> Result<Vec<Complex64>> {
    let mut out = vec![ZERO; v.len()];
    LanczosWorkspace::new().expm(matvec, v, tau, m, &mut out)?;
    Ok(out)
}
