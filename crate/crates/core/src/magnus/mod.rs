//! The sixth-order Magnus operator `Θ₄` and its exponentiation by Lanczos.

use alloc::{vec, vec::Vec};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::coefficients::{magnus_coefficients, MagnusCoefficients};
use crate::field::quadrature::QuadratureRule;
use crate::spectral::SpectralGrid;
use crate::system::LaserSystem;

pub mod lanczos;

use lanczos::{LanczosOptions, LanczosReport, LanczosWorkspace};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `out ← [Δ, f] u = Δ(f u) − f Δu` for a real multiplier `f`.
pub fn commutator_matvec(grid: &SpectralGrid, f: &[f64], u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
    if f.len() != grid.len() || u.len() != grid.len() || out.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            found: f.len().min(u.len()).min(out.len()),
        });
    }
    let mut lap_u = u.to_vec();
    grid.laplacian(&mut lap_u)?;
    for ((o, &fj), &uj) in out.iter_mut().zip(f).zip(u) {
        *o = uj * fj;
    }
    grid.laplacian(out)?;
    for ((o, &fj), l) in out.iter_mut().zip(f).zip(&lap_u) {
        *o -= l * fj;
    }
    Ok(())
}

/// `Θ₄` for one step, with its pointwise parts assembled once.
pub struct MagnusOperator<'a> {
    system: &'a LaserSystem,
    pub coeffs: MagnusCoefficients,
    /// `−ihε⁻¹(Ṽ + iΓ) + iε⁻¹qᵀ∇V₀`.
    pointwise: Vec<Complex64>,
    /// `pᵀ∇V₀`, absent when `p = 0`.
    commutator: Option<Vec<f64>>,
}

impl<'a> MagnusOperator<'a> {
    pub fn new(system: &'a LaserSystem, coeffs: MagnusCoefficients) -> Result<Self> {
        let pot = &system.potential;
        let grad = pot.gradient()?;
        let (h, inv_eps) = (coeffs.h, 1.0 / system.epsilon);
        let pointwise = (0..system.grid.len())
            .map(|j| {
                let damping = pot.damping.as_ref().map_or(0.0, |g| g[j]);
                let q_grad: f64 = coeffs.q.iter().zip(grad).map(|(q, g)| q * g[j]).sum();
                Complex64::new(h * inv_eps * damping, -h * inv_eps * pot.shifted(&coeffs.r, j) + inv_eps * q_grad)
            })
            .collect();
        let commutator = coeffs.p.iter().any(|&p| p != 0.0).then(|| {
            (0..system.grid.len())
                .map(|j| coeffs.p.iter().zip(grad).map(|(p, g)| p * g[j]).sum())
                .collect()
        });
        Ok(Self {
            system,
            coeffs,
            pointwise,
            commutator,
        })
    }

    /// Assembles the operator for the step `[t, t+h]`.
    pub fn for_step(system: &'a LaserSystem, t: f64, h: f64, rule: &QuadratureRule) -> Result<Self> {
        Self::new(system, magnus_coefficients(&*system.field, t, h, system.epsilon, rule))
    }

    /// The multiplier `pᵀ∇V₀` of the commutator term, if nonzero.
    pub fn commutator_multiplier(&self) -> Option<&[f64]> {
        self.commutator.as_deref()
    }

    /// `out ← (Θ₄ − c) u`; skew-Hermitian without absorbing layers.
    pub fn apply_skew(&self, u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let grid = &*self.system.grid;
        let c = &self.coeffs;
        out.copy_from_slice(u);
        grid.apply_kinetic(out, Complex64::new(0.0, c.h * self.system.epsilon), &c.s)?;
        for ((o, &uj), w) in out.iter_mut().zip(u).zip(&self.pointwise) {
            *o += w * uj;
        }
        if let Some(f) = &self.commutator {
            let mut comm = vec![ZERO; u.len()];
            commutator_matvec(grid, f, u, &mut comm)?;
            for (o, x) in out.iter_mut().zip(&comm) {
                *o += x;
            }
        }
        Ok(())
    }

    /// `out ← Θ₄ u`.
    pub fn apply_theta4(&self, u: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.apply_skew(u, out)?;
        for (o, &uj) in out.iter_mut().zip(u) {
            *o += self.coeffs.c * uj;
        }
        Ok(())
    }

    /// `u ← e^{Θ₄} u`: the scalar `c` as a phase, the rest by Lanczos.
    pub fn exponentiate(
        &self,
        u: &mut [Complex64],
        options: LanczosOptions,
        workspace: &mut LanczosWorkspace,
    ) -> Result<LanczosReport> {
        if self.system.is_dissipative() {
            return Err(Error::Incompatible(
                "Lanczos exponentiation of Θ₄ needs a skew-Hermitian operator; remove the absorber".into(),
            ));
        }
        let v = u.to_vec();
        let report = workspace.expm_adaptive(|x, y| self.apply_skew(x, y), &v, 1.0, options, u)?;
        let phase = self.coeffs.c.exp();
        u.iter_mut().for_each(|z| *z *= phase);
        Ok(report)
    }
}

/// One step of the unsplit Magnus integrator `u ← e^{Θ₄(t,h)} u`.
pub fn theta4_lanczos_step(
    system: &LaserSystem,
    u: &mut [Complex64],
    t: f64,
    h: f64,
    rule: &QuadratureRule,
    options: LanczosOptions,
    workspace: &mut LanczosWorkspace,
) -> Result<LanczosReport> {
    MagnusOperator::for_step(system, t, h, rule)?.exponentiate(u, options, workspace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::quadrature::gauss_legendre;
    use crate::field::{ConstantField, LaserField, PolarizedField};
    use crate::system::Potential;
    use alloc::sync::Arc;
    use core::f64::consts::PI;
    use laser_magnus_testkit as tk;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn system(m: usize, field: Arc<dyn LaserField>, epsilon: f64, seed: u64) -> LaserSystem {
        let grid = Arc::new(SpectralGrid::new(&[(-3.0, 3.0)], &[m]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x = grid.coordinate(0);
        let k = PI / 3.0;
        let v = x.iter().map(|x| a * (k * x).cos() + b * (2.0 * k * x).sin()).collect();
        let g = vec![x
            .iter()
            .map(|x| -a * k * (k * x).sin() + 2.0 * b * k * (2.0 * k * x).cos())
            .collect()];
        let pot = Potential::new(&grid, v, Some(g)).unwrap();
        LaserSystem::new(grid, epsilon, pot, field).unwrap()
    }

    fn wavy_field() -> Arc<dyn LaserField> {
        Arc::new(PolarizedField::new(vec![1.0], |t: f64| 2.0 * (3.0 * t).sin() + t * t))
    }

    fn random_state(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    /// `Θ₄` assembled from dense differentiation matrices.
    fn dense_theta4(system: &LaserSystem, c: &MagnusCoefficients) -> tk::CMatrix {
        let m = system.grid.len();
        let (lo, hi) = system.grid.bounds(0);
        let half = (hi - lo) / 2.0;
        let (h, eps) = (c.h, system.epsilon);
        let pot = &system.potential;
        let x = &pot.positions[0];
        let grad = &pot.gradient.as_ref().unwrap()[0];
        let vt: Vec<f64> = pot.values.iter().zip(x).map(|(v, x)| v + c.r[0] * x).collect();
        let qg: Vec<f64> = grad.iter().map(|g| c.q[0] * g).collect();
        let pg: Vec<f64> = grad.iter().map(|g| c.p[0] * g).collect();
        let d2 = tk::d2(m, half);
        let f = tk::diag_real(&pg);
        tk::d2(m, half) * (I * h * eps) - tk::diag_real(&vt) * (I * h / eps) - tk::d1(m, half) * Complex64::new(c.s[0], 0.0)
            + tk::diag_real(&qg) * (I / eps)
            + (&d2 * &f - &f * &d2)
            + tk::CMatrix::identity(m, m) * c.c
    }

    #[test]
    fn theta4_matches_dense_assembly() {
        for seed in 0..4 {
            let sys = system(8, wavy_field(), 0.3 + 0.2 * seed as f64, seed);
            let h = 0.4;
            let op = MagnusOperator::for_step(&sys, 0.1 * seed as f64, h, &gauss_legendre(3, h)).unwrap();
            assert!(op.commutator_multiplier().is_some());
            let dense = dense_theta4(&sys, &op.coeffs);
            let u = random_state(8, seed + 10);
            let mut out = vec![ZERO; 8];
            op.apply_theta4(&u, &mut out).unwrap();
            let expected = tk::apply(&dense, &u);
            let scale = expected.iter().map(|z| z.norm()).fold(1.0, f64::max);
            assert!(tk::max_diff(&out, &expected) <= 1e-12 * scale, "{}", tk::max_diff(&out, &expected));
        }
    }

    #[test]
    fn skew_part_is_skew_hermitian() {
        let sys = system(8, wavy_field(), 0.5, 3);
        let op = MagnusOperator::for_step(&sys, 0.0, 0.5, &gauss_legendre(3, 0.5)).unwrap();
        let mut a = tk::CMatrix::zeros(8, 8);
        for j in 0..8 {
            let mut e = vec![ZERO; 8];
            e[j] = Complex64::new(1.0, 0.0);
            let mut col = vec![ZERO; 8];
            op.apply_skew(&e, &mut col).unwrap();
            a.set_column(j, &nalgebra::DVector::from_vec(col));
        }
        let defect = (&a + a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let size = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(defect <= 1e-10 * size);
    }

    #[test]
    fn theta4_is_linear() {
        let sys = system(16, wavy_field(), 1.0, 1);
        let op = MagnusOperator::for_step(&sys, 0.0, 0.3, &gauss_legendre(3, 0.3)).unwrap();
        let (u, w) = (random_state(16, 1), random_state(16, 2));
        let (alpha, beta) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
        let combo: Vec<Complex64> = u.iter().zip(&w).map(|(a, b)| alpha * a + beta * b).collect();
        let (mut tu, mut tw, mut tc) = (vec![ZERO; 16], vec![ZERO; 16], vec![ZERO; 16]);
        op.apply_theta4(&u, &mut tu).unwrap();
        op.apply_theta4(&w, &mut tw).unwrap();
        op.apply_theta4(&combo, &mut tc).unwrap();
        let expected: Vec<Complex64> = tu.iter().zip(&tw).map(|(a, b)| alpha * a + beta * b).collect();
        assert!(tk::max_diff(&tc, &expected) < 1e-12 * 50.0);
    }

    #[test]
    fn free_particle_operator() {
        let grid = Arc::new(SpectralGrid::new(&[(-4.0, 4.0)], &[16]).unwrap());
        let pot = Potential::new(&grid, vec![0.0; 16], Some(vec![vec![0.0; 16]])).unwrap();
        let sys = LaserSystem::new(grid.clone(), 0.7, pot, Arc::new(ConstantField::zero(1))).unwrap();
        let h = 0.25;
        let op = MagnusOperator::for_step(&sys, 0.0, h, &gauss_legendre(3, h)).unwrap();
        assert!(op.commutator_multiplier().is_none());
        let kappa = 3.0 * PI / 4.0;
        let u: Vec<Complex64> = grid.coordinate(0).iter().map(|x| Complex64::from_polar(1.0, kappa * x)).collect();
        let mut out = vec![ZERO; 16];
        op.apply_theta4(&u, &mut out).unwrap();
        let factor = -I * h * 0.7 * kappa * kappa;
        let expected: Vec<Complex64> = u.iter().map(|z| z * factor).collect();
        assert!(tk::max_diff(&out, &expected) < 1e-12);

        let mut stepped = u.clone();
        let mut ws = LanczosWorkspace::new();
        theta4_lanczos_step(&sys, &mut stepped, 0.0, h, &gauss_legendre(3, h), LanczosOptions::default(), &mut ws).unwrap();
        let mut kinetic = u.clone();
        grid.exp_kinetic(&mut kinetic, I * h * 0.7, &[0.0]).unwrap();
        assert!(tk::max_diff(&stepped, &kinetic) < 1e-12);
    }

    #[test]
    fn commutator_matches_dense_product() {
        let grid = SpectralGrid::new(&[(-2.0, 2.0)], &[8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = random_state(8, 4);
        let mut out = vec![ZERO; 8];
        commutator_matvec(&grid, &f, &u, &mut out).unwrap();
        let d2 = tk::d2(8, 2.0);
        let fm = tk::diag_real(&f);
        let expected = tk::apply(&(&d2 * &fm - &fm * &d2), &u);
        assert!(tk::max_diff(&out, &expected) < 1e-12);

        let constant = vec![1.7; 8];
        commutator_matvec(&grid, &constant, &u, &mut out).unwrap();
        assert!(out.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn commutator_of_trigonometric_functions() {
        // f = sin(kx), u = cos(2kx): Δ(fu) − fΔu = f''u + 2f'u'.
        let grid = SpectralGrid::new(&[(-1.5, 1.5)], &[32]).unwrap();
        let k = PI / 1.5;
        let x = grid.coordinate(0);
        let f: Vec<f64> = x.iter().map(|x| (k * x).sin()).collect();
        let u: Vec<Complex64> = x.iter().map(|x| Complex64::new((2.0 * k * x).cos(), 0.0)).collect();
        let mut out = vec![ZERO; 32];
        commutator_matvec(&grid, &f, &u, &mut out).unwrap();
        for (j, x) in x.iter().enumerate() {
            let exact = -k * k * (k * x).sin() * (2.0 * k * x).cos() - 4.0 * k * k * (k * x).cos() * (2.0 * k * x).sin();
            assert!((out[j] - exact).norm() < 1e-11);
        }
    }

    #[test]
    fn constant_field_step_matches_dense_exponential() {
        let sys = system(16, Arc::new(ConstantField(vec![0.6])), 0.8, 5);
        let h = 0.2;
        let rule = gauss_legendre(3, h);
        let op = MagnusOperator::for_step(&sys, 0.0, h, &rule).unwrap();
        let dense = dense_theta4(&sys, &op.coeffs);
        let u = random_state(16, 7);
        let expected = tk::apply(&tk::expm(&dense), &u);
        let mut stepped = u.clone();
        let mut ws = LanczosWorkspace::new();
        theta4_lanczos_step(&sys, &mut stepped, 0.0, h, &rule, LanczosOptions::default(), &mut ws).unwrap();
        assert!(tk::max_diff(&stepped, &expected) < 1e-10);
    }

    #[test]
    fn varying_field_step_matches_dense_exponential() {
        let sys = system(16, wavy_field(), 0.8, 6);
        let h = 0.3;
        let rule = gauss_legendre(3, h);
        let op = MagnusOperator::for_step(&sys, 0.2, h, &rule).unwrap();
        let dense = dense_theta4(&sys, &op.coeffs);
        let u = random_state(16, 8);
        let expected = tk::apply(&tk::expm(&dense), &u);
        let mut stepped = u.clone();
        let mut ws = LanczosWorkspace::new();
        let report = theta4_lanczos_step(&sys, &mut stepped, 0.2, h, &rule, LanczosOptions::default(), &mut ws).unwrap();
        assert!(report.error_estimate < 1e-11);
        assert!(tk::max_diff(&stepped, &expected) < 1e-10);
    }

    #[test]
    fn absorber_is_refused() {
        let mut sys = system(8, wavy_field(), 1.0, 0);
        sys.potential.damping = Some(vec![-0.1; 8]);
        let mut u = random_state(8, 0);
        let mut ws = LanczosWorkspace::new();
        let h = 0.1;
        let err = theta4_lanczos_step(&sys, &mut u, 0.0, h, &gauss_legendre(3, h), LanczosOptions::default(), &mut ws);
        assert!(matches!(err, Err(Error::Incompatible(_))));
    }
}
