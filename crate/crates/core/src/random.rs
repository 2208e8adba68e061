//! Random states and unitaries for property tests and experiments.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::qla::{CMatrix, DensityMatrix};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Full-rank state `GG†/Tr(GG†)` with a square Ginibre matrix `G`.
pub fn density_matrix<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let n: usize = dims.iter().product();
    density_matrix_with_rank(dims, n, rng)
}

/// Induced-measure state of rank at most `rank`.
pub fn density_matrix_with_rank<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = ginibre(n, rank.max(1), rng);
    let mut m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    m /= Complex64::new(tr, 0.0);
    DensityMatrix::from_trusted(dims.to_vec(), m)
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal divided out.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random probability vector drawn uniformly from the simplex.
pub fn distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// `Σ_r p(r) |r⟩⟨r| ⊗ ρ_r` with a classical first register of size
/// `classes` and random quantum states on `quantum_dims`.
pub fn cq_state<R: Rng + ?Sized>(classes: usize, quantum_dims: &[usize], rng: &mut R) -> DensityMatrix {
    let p = distribution(classes, rng);
    let q: usize = quantum_dims.iter().product();
    let n = classes * q;
    let mut m = CMatrix::zeros(n, n);
    for (r, &pr) in p.iter().enumerate() {
        let block = density_matrix(quantum_dims, rng);
        let scaled = block.entries() * Complex64::new(pr, 0.0);
        m.view_mut((r * q, r * q), (q, q)).copy_from(&scaled);
    }
    let mut dims = vec![classes];
    dims.extend_from_slice(quantum_dims);
    DensityMatrix::from_trusted(dims, m)
}
