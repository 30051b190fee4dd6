//! Laser fields `e(t)` and the per-step integrals the Magnus expansion needs.

use alloc::{boxed::Box, vec, vec::Vec};

pub mod coefficients;
pub mod quadrature;
pub mod tabulated;

/// Closed-form integrals of a field over one step `[t, t+h]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMoments {
    /// `μ_n = ∫₀ʰ B̃_n(h,ζ) e(t+ζ) dζ` for `n = 0..=3`.
    pub mu: [Vec<f64>; 4],
    /// `I₁ = ∫₀ʰ ζ e(t+ζ)ᵀ ∫₀^ζ e(t+ξ) dξ dζ`.
    pub nested: f64,
}

/// A time-dependent field `e: ℝ → ℝᵈ`.
pub trait LaserField: Send + Sync {
    fn dims(&self) -> usize;

    /// Writes `e(t)` into `out`, which has length `dims()`.
    fn eval_into(&self, t: f64, out: &mut [f64]);

    fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dims()];
        self.eval_into(t, &mut out);
        out
    }

    /// Exact step integrals, when known. Quadrature is skipped if this
    /// returns `Some`.
    fn moments(&self, _t: f64, _h: f64) -> Option<FieldMoments> {
        None
    }
}

impl<F: LaserField + ?Sized> LaserField for alloc::sync::Arc<F> {
    fn dims(&self) -> usize {
        (**self).dims()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (**self).eval_into(t, out)
    }
    fn moments(&self, t: f64, h: f64) -> Option<FieldMoments> {
        (**self).moments(t, h)
    }
}

impl<F: LaserField + ?Sized> LaserField for Box<F> {
    fn dims(&self) -> usize {
        (**self).dims()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (**self).eval_into(t, out)
    }
    fn moments(&self, t: f64, h: f64) -> Option<FieldMoments> {
        (**self).moments(t, h)
    }
}

/// `e(t) ≡ e₀`, with exact moments.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField(pub Vec<f64>);

impl ConstantField {
    pub fn zero(dims: usize) -> Self {
        Self(vec![0.0; dims])
    }
}

impl LaserField for ConstantField {
    fn dims(&self) -> usize {
        self.0.len()
    }

    fn eval_into(&self, _t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.0);
    }

    fn moments(&self, _t: f64, h: f64) -> Option<FieldMoments> {
        let zero = vec![0.0; self.0.len()];
        let e2: f64 = self.0.iter().map(|v| v * v).sum();
        Some(FieldMoments {
            mu: [
                self.0.iter().map(|v| v * h).collect(),
                zero.clone(),
                zero.clone(),
                zero,
            ],
            nested: e2 * h * h * h / 3.0,
        })
    }
}

/// `e(t) = f(t)·n` for a fixed polarization vector `n`.
pub struct PolarizedField<P> {
    pub profile: P,
    pub direction: Vec<f64>,
}

impl<P: Fn(f64) -> f64 + Send + Sync> PolarizedField<P> {
    pub fn new(direction: Vec<f64>, profile: P) -> Self {
        Self { profile, direction }
    }
}

impl<P: Fn(f64) -> f64 + Send + Sync> LaserField for PolarizedField<P> {
    fn dims(&self) -> usize {
        self.direction.len()
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let f = (self.profile)(t);
        for (o, n) in out.iter_mut().zip(&self.direction) {
            *o = f * n;
        }
    }
}

/// A field given by a closure writing all components.
pub struct FnField<F> {
    dims: usize,
    f: F,
}

impl<F: Fn(f64, &mut [f64]) + Send + Sync> FnField<F> {
    pub fn new(dims: usize, f: F) -> Self {
        Self { dims, f }
    }
}

impl<F: Fn(f64, &mut [f64]) + Send + Sync> LaserField for FnField<F> {
    fn dims(&self) -> usize {
        self.dims
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (self.f)(t, out)
    }
}
