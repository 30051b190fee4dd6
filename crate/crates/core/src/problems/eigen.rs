//! Stationary states of `H = −ε²Δ + V` on a one-dimensional grid.

use alloc::{format, vec, vec::Vec};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

#[cfg(not(feature = "std"))]
use num_traits::Float;

fn hamiltonian(grid: &SpectralGrid, potential: &[f64], epsilon: f64, count: usize) -> Result<DMatrix<f64>> {
    if grid.dims() != 1 {
        return Err(Error::Parameter(format!(
            "stationary states are computed on one-dimensional grids, not {}",
            grid.dims()
        )));
    }
    let n = grid.len();
    if potential.len() != n {
        return Err(Error::Shape {
            expected: n,
            found: potential.len(),
        });
    }
    if count == 0 || count > n {
        return Err(Error::Parameter(format!("cannot take {count} states of a {n}-point grid")));
    }
    let mut h = DMatrix::<f64>::zeros(n, n);
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        column.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        column[j] = Complex64::new(1.0, 0.0);
        grid.laplacian(&mut column)?;
        for (i, z) in column.iter().enumerate() {
            h[(i, j)] = -epsilon * epsilon * z.re;
        }
        h[(j, j)] += potential[j];
    }
    // Symmetrize away the round-off of the transforms.
    Ok((&h + h.transpose()) * 0.5)
}

/// The lowest `count` eigenpairs of the discretized `H = −ε²Δ + diag(V)`,
/// sorted by energy.
///
/// Each state is normalized on the grid and its largest-magnitude entry is
/// made real and positive, which fixes the sign. `H` is assembled densely by
/// applying the spectral Laplacian to unit vectors.
pub fn eigenstates(
    grid: &SpectralGrid,
    potential: &[f64],
    epsilon: f64,
    count: usize,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let h = hamiltonian(grid, potential, epsilon, count)?;
    let n = h.nrows();
    let eigen = h
        .try_symmetric_eigen(1e-15, 100 * n)
        .ok_or_else(|| Error::EigenSolver(format!("symmetric eigensolver did not converge on {n} points")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let scale = grid.cell_volume().sqrt();
    let mut energies = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);
    for &k in order.iter().take(count) {
        energies.push(eigen.eigenvalues[k]);
        let v = eigen.eigenvectors.column(k);
        let peak = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sign = if peak < 0.0 { -1.0 } else { 1.0 };
        let norm = v.norm() * scale;
        states.push(v.iter().map(|&x| Complex64::new(sign * x / norm, 0.0)).collect());
    }
    Ok((energies, states))
}

/// The lowest `count` energies alone, several times cheaper than
/// [`eigenstates`] on large grids.
pub fn energies(grid: &SpectralGrid, potential: &[f64], epsilon: f64, count: usize) -> Result<Vec<f64>> {
    let h = hamiltonian(grid, potential, epsilon, count)?;
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver(format!("non-finite energy on {} points", values.len())));
    }
    values.sort_by(f64::total_cmp);
    values.truncate(count);
    Ok(values)
}

/// The `k`-th state (counting from zero) and its energy.
pub fn eigenstate(grid: &SpectralGrid, potential: &[f64], epsilon: f64, k: usize) -> Result<(f64, Vec<Complex64>)> {
    let (mut e, mut s) = eigenstates(grid, potential, epsilon, k + 1)?;
    Ok((e.swap_remove(k), s.swap_remove(k)))
}
