//! Brute-force oracles for testing the propagators.
//!
//! Nothing here shares code with the library under test: differentiation
//! matrices are summed from their Fourier series, exponentials come from a
//! Taylor series with scaling and squaring, Gauss nodes from the
//! Golub–Welsch eigenproblem and integrals from adaptive bisection of Gauss panels.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;

/// Dense periodic matrix `D[j,l] = (1/M) Σ_k σ(m_k) exp(iκ_k (x_j − x_l))`
/// on `M` equispaced nodes of a box of half-length `half`. `σ` receives the
/// signed frequency `m` and whether it is the Nyquist bin.
pub fn fourier_matrix(m: usize, half: f64, symbol: impl Fn(i64, bool) -> Complex64) -> CMatrix {
    let dx = 2.0 * half / m as f64;
    let freqs: Vec<(i64, bool)> = (0..m)
        .map(|k| {
            let f = if 2 * k < m { k as i64 } else { k as i64 - m as i64 };
            (f, m.is_multiple_of(2) && 2 * k == m)
        })
        .collect();
    DMatrix::from_fn(m, m, |j, l| {
        let diff = (j as f64 - l as f64) * dx;
        freqs
            .iter()
            .map(|&(f, nyq)| {
                let kappa = PI * f as f64 / half;
                symbol(f, nyq) * Complex64::from_polar(1.0, kappa * diff)
            })
            .sum::<Complex64>()
            / m as f64
    })
}

/// First-derivative matrix with the Nyquist mode removed.
pub fn d1(m: usize, half: f64) -> CMatrix {
    fourier_matrix(m, half, |f, nyq| {
        if nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, PI * f as f64 / half)
        }
    })
}

/// Second-derivative matrix.
pub fn d2(m: usize, half: f64) -> CMatrix {
    fourier_matrix(m, half, |f, _| Complex64::new(-(PI * f as f64 / half).powi(2), 0.0))
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_column_slice(values))
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    diag(&values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Matrix exponential by scaling and squaring of a degree-30 Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    let n = a.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn apply(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (a * DVector::from_column_slice(v)).iter().copied().collect()
}

/// Largest entrywise difference.
pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` from the eigen-decomposition
/// of the Jacobi matrix.
pub fn golub_welsch(k: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            let n = i.max(j) as f64;
            n / (4.0 * n * n - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

fn gauss20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    RULE.get_or_init(|| golub_welsch(20))
}

fn gauss_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gauss20();
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(w).map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Adaptive quadrature of `f` over `[a, b]`: a 20-point Gauss panel is
/// bisected until the halves agree with the whole to `tol` (absolute) or to
/// round-off.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (left, right) = (gauss_panel(f, a, m), gauss_panel(f, m, b));
        let diff = (left + right - whole).abs();
        if depth == 0 || diff <= tol || diff <= 1e-15 * (left.abs() + right.abs()) {
            left + right
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1) + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    recurse(f, a, b, gauss_panel(f, a, b), tol, 30)
}

/// `∫₀ʰ g(ζ) ∫₀^ζ k(ξ) dξ dζ` by nested adaptive quadrature.
pub fn nested_integral(g: &dyn Fn(f64) -> f64, k: &dyn Fn(f64) -> f64, h: f64, tol: f64) -> f64 {
    let outer = |z: f64| g(z) * integrate(k, 0.0, z, tol * 1e-2);
    integrate(&outer, 0.0, h, tol)
}

/// Random skew-Hermitian matrix scaled to spectral norm `norm`.
pub fn random_skew_hermitian(n: usize, norm: f64, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.clone().symmetric_eigen();
    let rho = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    h * Complex64::new(0.0, norm / rho)
}

/// Spectral norm of a matrix.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().max()
}
