//! Gauss–Legendre rules on `[0, h]` with the nested weights
//! `w̃_ij = ∫₀ʰ ℓ_i(ζ) ∫₀^ζ ℓ_j(ξ) dξ dζ` for the Lagrange basis `ℓ` on the knots.

use alloc::{vec, vec::Vec};
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// `B̃_n(h, ζ)`, the Bernoulli polynomial `hⁿ B_n(ζ/h)`, for `n ≤ 3`.
pub fn bernoulli_rescaled(n: usize, h: f64, zeta: f64) -> Result<f64> {
    let z = zeta;
    Ok(match n {
        0 => 1.0,
        1 => z - h / 2.0,
        2 => z * z - h * z + h * h / 6.0,
        3 => z * z * z - 1.5 * h * z * z + 0.5 * h * h * z,
        _ => return Err(Error::BernoulliIndex(n)),
    })
}

/// A quadrature rule on `[0, h]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub h: f64,
    pub knots: Vec<f64>,
    pub weights: Vec<f64>,
    /// Nested weights, row-major `k × k`.
    pub nested: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn nested(&self, i: usize, j: usize) -> f64 {
        self.nested[i * self.len() + j]
    }

    /// `Σ w_j f(ζ_j)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.knots.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }

    /// The same rule on `[0, h]` for another `h` (negative allowed).
    pub fn rescaled(&self, h: f64) -> Self {
        let s = h / self.h;
        Self {
            h,
            knots: self.knots.iter().map(|z| z * s).collect(),
            weights: self.weights.iter().map(|w| w * s).collect(),
            nested: self.nested.iter().map(|w| w * s * s).collect(),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
fn legendre_reference(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Three-term recurrence for P_k(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for n in 2..=k {
                let p2 = ((2 * n - 1) as f64 * x * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    (nodes, weights)
}

fn lagrange(knots: &[f64], i: usize, x: f64) -> f64 {
    knots
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &zj)| (x - zj) / (knots[i] - zj))
        .product()
}

/// The `k`-point Gauss–Legendre rule on `[0, h]`.
///
/// For `k = 3` knots, weights and nested weights are the closed forms;
/// otherwise the nested weights are integrated with a `(k+4)`-point rule on
/// each inner and outer interval, which is exact for the polynomial
/// integrands involved.
///
/// # Panics
/// If `k == 0`.
pub fn gauss_legendre(k: usize, h: f64) -> QuadratureRule {
    assert!(k >= 1, "a quadrature rule needs at least one knot");
    if k == 3 {
        return three_point(h);
    }
    let (x, w) = legendre_reference(k);
    let knots: Vec<f64> = x.iter().map(|x| 0.5 * h * (1.0 + x)).collect();
    let weights: Vec<f64> = w.iter().map(|w| 0.5 * h * w).collect();

    let (gx, gw) = legendre_reference(k + 4);
    let mut nested = vec![0.0; k * k];
    for (&xa, &wa) in gx.iter().zip(&gw) {
        let zeta = 0.5 * h * (1.0 + xa);
        let outer_w = 0.5 * h * wa;
        // ∫₀^ζ ℓ_j for every j.
        let mut inner = vec![0.0; k];
        for (&xb, &wb) in gx.iter().zip(&gw) {
            let xi = 0.5 * zeta * (1.0 + xb);
            for (j, acc) in inner.iter_mut().enumerate() {
                *acc += 0.5 * zeta * wb * lagrange(&knots, j, xi);
            }
        }
        for i in 0..k {
            let li = outer_w * lagrange(&knots, i, zeta);
            for j in 0..k {
                nested[i * k + j] += li * inner[j];
            }
        }
    }
    QuadratureRule {
        h,
        knots,
        weights,
        nested,
    }
}

fn three_point(h: f64) -> QuadratureRule {
    let r = (3.0f64 / 5.0).sqrt();
    let s15 = 15.0f64.sqrt();
    let m = [
        25.0,
        40.0 - 12.0 * s15,
        25.0 - 6.0 * s15,
        40.0 + 12.0 * s15,
        64.0,
        40.0 - 12.0 * s15,
        25.0 + 6.0 * s15,
        40.0 + 12.0 * s15,
        25.0,
    ];
    QuadratureRule {
        h,
        knots: vec![0.5 * h * (1.0 - r), 0.5 * h, 0.5 * h * (1.0 + r)],
        weights: vec![5.0 * h / 18.0, 8.0 * h / 18.0, 5.0 * h / 18.0],
        nested: m.iter().map(|v| v * h * h / 648.0).collect(),
    }
}
