use laser_magnus::field::coefficients::{field_moments, p_parts, phase_parts};
use laser_magnus::field::FnField;
use laser_magnus::{bernoulli_rescaled, gauss_legendre, magnus_coefficients, mu, LaserField};
use laser_magnus_testkit as tk;
use proptest::prelude::*;

/// `e(t) = Σ_j a_j t^j` on one axis.
fn polynomial(coeffs: Vec<f64>) -> FnField<impl Fn(f64, &mut [f64]) + Send + Sync> {
    FnField::new(1, move |t: f64, out: &mut [f64]| {
        out[0] = coeffs.iter().rev().fold(0.0, |acc, a| acc * t + a);
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_rules_are_exact_to_degree_2k_minus_1(
        k in 1usize..12,
        h in 0.05f64..3.0,
        coeffs in proptest::collection::vec(-1.0f64..1.0, 24),
    ) {
        let rule = gauss_legendre(k, h);
        let coeffs = &coeffs[..2 * k];
        let got = rule.integrate(|z| coeffs.iter().rev().fold(0.0, |acc, a| acc * z + a));
        let exact: f64 = coeffs.iter().enumerate().map(|(j, a)| a * h.powi(j as i32 + 1) / (j + 1) as f64).sum();
        let scale: f64 = coeffs.iter().enumerate().map(|(j, a)| a.abs() * h.powi(j as i32 + 1)).sum();
        prop_assert!((got - exact).abs() <= 1e-13 * scale);
    }

    #[test]
    fn nested_weights_integrate_products_of_polynomials(
        k in 2usize..8,
        h in 0.1f64..2.0,
        f in proptest::collection::vec(-1.0f64..1.0, 4),
        g in proptest::collection::vec(-1.0f64..1.0, 4),
    ) {
        // Σ w̃_ij f(ζ_i) g(ζ_j) = ∫₀ʰ f ∫₀^ζ g when f, g have degree < k.
        let deg = k.min(4);
        let (f, g) = (f[..deg].to_vec(), g[..deg].to_vec());
        let poly = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, a| acc * z + a);
        let rule = gauss_legendre(k, h);
        let mut got = 0.0;
        for i in 0..k {
            for j in 0..k {
                got += rule.nested(i, j) * poly(&f, rule.knots[i]) * poly(&g, rule.knots[j]);
            }
        }
        let exact = tk::nested_integral(&|z| poly(&f, z), &|z| poly(&g, z), h, 1e-15);
        prop_assert!((got - exact).abs() <= 1e-12 * h * h);
    }

    #[test]
    fn moments_of_polynomial_fields_match_adaptive_integration(
        t in -2.0f64..2.0,
        h in 0.01f64..1.0,
        coeffs in proptest::collection::vec(-2.0f64..2.0, 6),
    ) {
        // A degree-5 field is integrated exactly by the three-point rule
        // against B̃₀ only; higher moments need more knots.
        let field = polynomial(coeffs.clone());
        let rule = gauss_legendre(6, h);
        for n in 0..=3 {
            let got = mu(n, &field, t, h, &rule).unwrap()[0];
            let exact = tk::integrate(&|z| bernoulli_rescaled(n, h, z).unwrap() * field.eval(t + z)[0], 0.0, h, 1e-16);
            let scale = coeffs.iter().map(|a| a.abs()).sum::<f64>() * (1.0 + t.abs() + h).powi(5) * h.powi(n as i32 + 1);
            prop_assert!((got - exact).abs() <= 1e-12 * scale, "n={} {} {}", n, got, exact);
        }
    }

    #[test]
    fn moment_orders_follow_smoothness(t in -1.0f64..1.0, w in 0.5f64..2.0) {
        // μ₁ = O(h³), μ₂ and μ₃ = O(h⁵) on smooth fields. Near a zero of the
        // leading derivative the observed rate only gets steeper.
        let field = FnField::new(1, move |s: f64, out: &mut [f64]| out[0] = (w * s).sin() + 0.5 * (w * s).cos());
        let at = |h: f64| -> [f64; 3] {
            let rule = gauss_legendre(5, h);
            [1, 2, 3].map(|n| mu(n, &field, t, h, &rule).unwrap()[0].abs())
        };
        let (a, b) = (at(1e-2), at(5e-3));
        let expected = [3.0, 5.0, 5.0];
        for n in 0..3 {
            if a[n] > 1e-15 && b[n] > 1e-17 {
                let rate = (a[n] / b[n]).log2();
                prop_assert!(rate > expected[n] - 0.2 || a[n] < 1e-13, "n={} rate {}", n + 1, rate);
            }
        }
    }

    #[test]
    fn phase_splits_into_its_two_integrals(t in -2.0f64..2.0, h in 0.01f64..0.5, eps in 0.01f64..1.0, w in 0.5f64..5.0) {
        let field = FnField::new(2, move |s: f64, out: &mut [f64]| {
            out[0] = (w * s).sin();
            out[1] = 0.3 * (2.0 * w * s + 1.0).cos();
        });
        let rule = gauss_legendre(8, h);
        let (c31, c32) = phase_parts(&field_moments(&field, t, h, &rule), h, eps);
        let c = magnus_coefficients(&field, t, h, eps, &rule).c;
        prop_assert!((c31 + c32 - c).norm() <= 1e-15 * c.norm().max(1e-300) + 1e-300);
        prop_assert!(c31.re == 0.0 && c32.re == 0.0);
        let [p1, p2, p3] = p_parts(&field, t, h, &rule);
        let p = magnus_coefficients(&field, t, h, eps, &rule).p;
        for a in 0..2 {
            prop_assert!((p1[a] + p2[a] + p3[a] - p[a]).abs() <= 1e-13 * h.powi(4));
        }
    }
}
