//! The step coefficients `r, s, q, p, c` of the sixth-order Magnus operator
//!
//! ```text
//! Θ₄ = ihεΔ − ihε⁻¹(V₀ + rᵀx) − sᵀ∇ + iε⁻¹qᵀ∇V₀ + [Δ, pᵀ∇V₀] + c
//! ```
//!
//! all obtained from the Bernoulli-weighted integrals `μ_n` and the nested
//! integral `I₁` of the field over one step.

use alloc::{borrow::Cow, vec, vec::Vec};

use num_complex::Complex64;

use super::quadrature::{bernoulli_rescaled, QuadratureRule};
use super::{FieldMoments, LaserField};
use crate::error::Result;

/// Per-step coefficient bundle, frozen for all stages of a step.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnusCoefficients {
    pub t: f64,
    pub h: f64,
    pub epsilon: f64,
    /// `μ₀/h`, the mean field.
    pub r: Vec<f64>,
    /// `2μ₁`.
    pub s: Vec<f64>,
    /// `μ₂`.
    pub q: Vec<f64>,
    /// `μ₃/3`.
    pub p: Vec<f64>,
    /// `s − 12h⁻²p`.
    pub s_tilde: Vec<f64>,
    pub c: Complex64,
    /// `c − iε⁻¹qᵀr`.
    pub c_tilde: Complex64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rule_for(rule: &QuadratureRule, h: f64) -> Cow<'_, QuadratureRule> {
    if rule.h == h {
        Cow::Borrowed(rule)
    } else {
        Cow::Owned(rule.rescaled(h))
    }
}

/// Samples `e(t+ζ_j)` at the knots, as one row per knot.
fn samples(field: &dyn LaserField, t: f64, rule: &QuadratureRule) -> Vec<Vec<f64>> {
    rule.knots.iter().map(|z| field.eval(t + z)).collect()
}

/// `Σ_j w_j f(ζ_j) e(t+ζ_j)`.
fn weighted(rule: &QuadratureRule, e: &[Vec<f64>], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; e.first().map_or(0, Vec::len)];
    for ((&z, &w), ej) in rule.knots.iter().zip(&rule.weights).zip(e) {
        let c = w * f(z);
        for (o, v) in out.iter_mut().zip(ej) {
            *o += c * v;
        }
    }
    out
}

/// `μ_n(t,h) = ∫₀ʰ B̃_n(h,ζ) e(t+ζ) dζ` by the quadrature rule.
pub fn mu(n: usize, field: &dyn LaserField, t: f64, h: f64, rule: &QuadratureRule) -> Result<Vec<f64>> {
    bernoulli_rescaled(n, h, 0.0)?;
    let rule = rule_for(rule, h);
    let e = samples(field, t, &rule);
    Ok(weighted(&rule, &e, |z| bernoulli_rescaled(n, h, z).unwrap_or(0.0)))
}

/// Step integrals from the field's closed form, or from the rule.
pub fn field_moments(field: &dyn LaserField, t: f64, h: f64, rule: &QuadratureRule) -> FieldMoments {
    if let Some(m) = field.moments(t, h) {
        return m;
    }
    let rule = rule_for(rule, h);
    let e = samples(field, t, &rule);
    let b = |n| move |z| bernoulli_rescaled(n, h, z).unwrap_or(0.0);
    let k = rule.len();
    let mut nested = 0.0;
    for i in 0..k {
        for j in 0..k {
            nested += rule.nested(i, j) * rule.knots[i] * dot(&e[i], &e[j]);
        }
    }
    FieldMoments {
        mu: [
            weighted(&rule, &e, b(0)),
            weighted(&rule, &e, b(1)),
            weighted(&rule, &e, b(2)),
            weighted(&rule, &e, b(3)),
        ],
        nested,
    }
}

/// The two scalar phases `(c₃₁, c₃₂)` whose sum is `c`.
pub fn phase_parts(moments: &FieldMoments, h: f64, epsilon: f64) -> (Complex64, Complex64) {
    let ie = Complex64::new(0.0, 1.0 / epsilon);
    let total = &moments.mu[0];
    // ∫ζe = μ₁ + (h/2)μ₀
    let first: Vec<f64> = moments.mu[1].iter().zip(total).map(|(a, b)| a + 0.5 * h * b).collect();
    let i1 = moments.nested;
    let c31 = ie * (0.5 * i1 - h / 6.0 * dot(total, total));
    let c32 = ie * (1.5 * i1 - dot(total, &first));
    (c31, c32)
}

/// The pieces `p₁, p₂, p₃` of `p`, each integrated separately by the rule.
pub fn p_parts(field: &dyn LaserField, t: f64, h: f64, rule: &QuadratureRule) -> [Vec<f64>; 3] {
    let rule = rule_for(rule, h);
    let e = samples(field, t, &rule);
    let (h2, h3) = (h * h, h * h * h);
    [
        weighted(&rule, &e, |z| (2.0 * z * z * z - 3.0 * h2 * z + h3) / 36.0),
        weighted(&rule, &e, |z| (8.0 * z * z * z - 9.0 * h * z * z + h3) / 72.0),
        weighted(&rule, &e, |z| (4.0 * z * z * z - 9.0 * h * z * z + 6.0 * h2 * z - h3) / 24.0),
    ]
}

impl MagnusCoefficients {
    pub fn from_moments(moments: &FieldMoments, t: f64, h: f64, epsilon: f64) -> Self {
        let [mu0, mu1, mu2, mu3] = &moments.mu;
        let r: Vec<f64> = mu0.iter().map(|v| v / h).collect();
        let s: Vec<f64> = mu1.iter().map(|v| 2.0 * v).collect();
        let q = mu2.clone();
        let p: Vec<f64> = mu3.iter().map(|v| v / 3.0).collect();
        let s_tilde = s.iter().zip(&p).map(|(s, p)| s - 12.0 / (h * h) * p).collect();
        let (c31, c32) = phase_parts(moments, h, epsilon);
        let c = c31 + c32;
        let c_tilde = c - Complex64::new(0.0, dot(&q, &r) / epsilon);
        Self {
            t,
            h,
            epsilon,
            r,
            s,
            q,
            p,
            s_tilde,
            c,
            c_tilde,
        }
    }

    /// Coefficients of the time-independent problem: the field is switched off.
    pub fn vanishing(dims: usize, t: f64, h: f64, epsilon: f64) -> Self {
        let zero = vec![0.0; dims];
        Self {
            t,
            h,
            epsilon,
            r: zero.clone(),
            s: zero.clone(),
            q: zero.clone(),
            p: zero.clone(),
            s_tilde: zero,
            c: Complex64::new(0.0, 0.0),
            c_tilde: Complex64::new(0.0, 0.0),
        }
    }
}

/// All step coefficients for `[t, t+h]`.
pub fn magnus_coefficients(
    field: &dyn LaserField,
    t: f64,
    h: f64,
    epsilon: f64,
    rule: &QuadratureRule,
) -> MagnusCoefficients {
    MagnusCoefficients::from_moments(&field_moments(field, t, h, rule), t, h, epsilon)
}

#[cfg(all(test, feature = "std"))]
mod tests {
    use super::*;
    use crate::field::quadrature::gauss_legendre;
    use crate::field::{ConstantField, FnField, PolarizedField};
    use laser_magnus_testkit as tk;
    use proptest::prelude::*;

    fn norm(v: &[f64]) -> f64 {
        dot(v, v).sqrt()
    }

    #[test]
    fn mu_of_constant_field() {
        let f = ConstantField(vec![1.5, -0.5]);
        let h = 0.2;
        let rule = gauss_legendre(3, h);
        let f_quad = PolarizedField::new(vec![1.5, -0.5], |_| 1.0);
        let m0 = mu(0, &f_quad, 0.3, h, &rule).unwrap();
        assert!((m0[0] - 0.3).abs() < 1e-16 && (m0[1] + 0.1).abs() < 1e-16);
        for n in 1..=3 {
            let m = mu(n, &f_quad, 0.3, h, &rule).unwrap();
            assert!(norm(&m) <= 1e-14 * h.powi(n as i32 + 1) * norm(&f.0));
        }
        assert!(mu(4, &f, 0.0, h, &rule).is_err());
    }

    #[test]
    fn mu_of_linear_field() {
        let f = PolarizedField::new(vec![1.0], |t| t);
        let m1 = mu(1, &f, 0.0, 1.0, &gauss_legendre(3, 1.0)).unwrap();
        assert!((m1[0] - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn linear_field_coefficients_match_symbolic_integrals() {
        // e(t) = (t, 0): r = ∫ζ = 1/2, s = 2∫(ζ−½)ζ = 1/6, q = ∫B̃₂ζ = 0,
        // p = ⅓∫B̃₃ζ = ⅓(1/5 − 3/8 + 1/6) = −1/360.
        let f = FnField::new(2, |t, out: &mut [f64]| {
            out[0] = t;
            out[1] = 0.0;
        });
        let c = magnus_coefficients(&f, 0.0, 1.0, 1.0, &gauss_legendre(3, 1.0));
        assert!((c.r[0] - 0.5).abs() < 1e-15);
        assert!((c.s[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!(c.q[0].abs() < 1e-15);
        assert!((c.p[0] + 1.0 / 360.0).abs() < 1e-15);
        assert_eq!(c.r[1], 0.0);
    }

    #[test]
    fn constant_field_collapses() {
        let e0 = vec![0.7, -1.3, 0.2];
        let h = 0.05;
        let scale = h * norm(&e0);
        let quad = FnField::new(3, |_, out: &mut [f64]| out.copy_from_slice(&[0.7, -1.3, 0.2]));
        for field in [&quad as &dyn LaserField, &ConstantField(e0.clone())] {
            let c = magnus_coefficients(field, 1.0, h, 0.01, &gauss_legendre(3, h));
            for (a, b) in c.r.iter().zip(&e0) {
                assert!((a - b).abs() < 1e-13 * norm(&e0));
            }
            assert!(norm(&c.s) <= 1e-13 * scale);
            assert!(norm(&c.q) <= 1e-13 * scale);
            assert!(norm(&c.p) <= 1e-13 * scale);
            assert!(c.c.norm() <= 1e-13 * scale / 0.01);
        }
    }

    #[test]
    fn derived_quantities() {
        let f = PolarizedField::new(vec![1.0, 2.0], |t: f64| (3.0 * t).sin() + t * t);
        let (h, eps) = (0.3, 0.2);
        let c = magnus_coefficients(&f, 0.4, h, eps, &gauss_legendre(5, h));
        for i in 0..2 {
            assert_eq!(c.s_tilde[i], c.s[i] - 12.0 / (h * h) * c.p[i]);
        }
        assert_eq!(c.c_tilde, c.c - Complex64::new(0.0, dot(&c.q, &c.r) / eps));
        assert_eq!(c.c.re, 0.0);
    }

    #[test]
    fn mu_matches_adaptive_integration() {
        let g = |t: f64| t.sin() + 0.5 * (0.7 * t).cos() * (-0.1 * t * t).exp();
        let f = PolarizedField::new(vec![1.0], g);
        for &h in &[0.1, 0.05, 0.02] {
            let rule = gauss_legendre(3, h);
            for n in 0..=3 {
                let t = 0.37;
                let oracle = tk::integrate(&|z| bernoulli_rescaled(n, h, z).unwrap() * g(t + z), 0.0, h, 1e-16);
                let m = mu(n, &f, t, h, &rule).unwrap();
                assert!((m[0] - oracle).abs() <= 1e-10, "n={n} h={h} {}", m[0] - oracle);
            }
        }
    }

    #[test]
    fn nested_integral_matches_oracle() {
        let g = |t: f64| (5.0 * t).sin() + 0.3;
        let f = PolarizedField::new(vec![1.0], g);
        let (t, h) = (0.2, 0.25);
        let m = field_moments(&f, t, h, &gauss_legendre(9, h));
        let oracle = tk::nested_integral(&|z| z * g(t + z), &|x| g(t + x), h, 1e-15);
        assert!((m.nested - oracle).abs() < 1e-13);
    }

    #[test]
    fn p_pieces_sum_to_p() {
        let f = FnField::new(2, |t: f64, out: &mut [f64]| {
            out[0] = (4.0 * t).sin();
            out[1] = t.exp();
        });
        let h = 0.4;
        let rule = gauss_legendre(6, h);
        let c = magnus_coefficients(&f, 0.1, h, 1.0, &rule);
        let parts = p_parts(&f, 0.1, h, &rule);
        for (i, p) in c.p.iter().enumerate() {
            let sum = parts[0][i] + parts[1][i] + parts[2][i];
            assert!((sum - p).abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_with_step() {
        let f = PolarizedField::new(vec![1.0], f64::sin);
        let hs: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
        let slope = |get: &dyn Fn(&MagnusCoefficients) -> f64| {
            let pts: Vec<(f64, f64)> = hs
                .iter()
                .map(|&h| {
                    let c = magnus_coefficients(&f, 0.0, h, 1.0, &gauss_legendre(3, h));
                    (h.ln(), get(&c).ln())
                })
                .collect();
            let n = pts.len() as f64;
            let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
            pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
        };
        assert!(slope(&|c| norm(&c.s)) >= 2.9);
        assert!(slope(&|c| norm(&c.q)) >= 4.9);
        assert!(slope(&|c| norm(&c.p)) >= 4.9);
    }

    proptest! {
        #[test]
        fn phase_is_imaginary_and_splits(a in -3.0f64..3.0, w in 0.1f64..8.0, t in 0.0f64..5.0, h in 0.01f64..0.5) {
            let f = PolarizedField::new(vec![1.0, -0.5], move |s: f64| a * (w * s).cos() + s);
            let rule = gauss_legendre(4, h);
            let m = field_moments(&f, t, h, &rule);
            let c = MagnusCoefficients::from_moments(&m, t, h, 0.1);
            let (c31, c32) = phase_parts(&m, h, 0.1);
            prop_assert_eq!(c.c.re, 0.0);
            prop_assert!((c31 + c32 - c.c).norm() <= 1e-14 * (1.0 + c.c.norm()));
        }
    }
}
