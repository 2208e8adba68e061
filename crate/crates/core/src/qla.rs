//! Dense complex linear algebra for multi-register quantum states.
//!
//! Registers are laid out in Kronecker order: register 0 is the most
//! significant index. All norms are unhalved (`‖ρ − σ‖₁` ranges over
//! `[0, 2]`) and all logarithms are base 2.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for states and operators.
pub type CMatrix = DMatrix<Complex64>;

/// Default absolute tolerance for the state invariants.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default cap on the total Hilbert space dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Hermitian, positive semidefinite, unit-trace matrix over a list of
/// registers.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: CMatrix,
    tol: f64,
}

impl DensityMatrix {
    /// Validates `entries` against the state invariants at the default tolerance.
    pub fn new(dims: Vec<usize>, entries: CMatrix) -> Result<Self> {
        Self::with_tolerance(dims, entries, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(dims: Vec<usize>, entries: CMatrix, tol: f64) -> Result<Self> {
        check_shape(&dims, &entries)?;
        check_state(&entries, tol)?;
        Ok(Self { dims, entries, tol })
    }

    /// Builds a state from an operator that is known to be a state up to
    /// rounding (results of tensor products, partial traces, mixtures).
    /// The entries are re-symmetrized but not eigen-checked.
    pub(crate) fn from_trusted(dims: Vec<usize>, entries: CMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), entries.nrows());
        Self {
            dims,
            entries: hermitian_part(&entries),
            tol: DEFAULT_TOLERANCE,
        }
    }

    pub fn from_diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let d: usize = dims.iter().product();
        if diag.len() != d {
            return Err(Error::invalid(format!(
                "diagonal has length {} but dims {:?} need {}",
                diag.len(),
                dims,
                d
            )));
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, p) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*p, 0.0);
        }
        Self::new(dims, m)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(dims: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("zero state vector"));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        let d = v.len();
        let m = CMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj());
        Self::new(dims, m)
    }

    /// `|i⟩⟨i|` in the computational basis.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let d: usize = dims.iter().product();
        if index >= d {
            return Err(Error::invalid(format!("basis index {index} out of range {d}")));
        }
        let mut diag = vec![0.0; d];
        diag[index] = 1.0;
        Self::from_diagonal(dims, &diag)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let m = CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        Self::from_trusted(dims, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_registers(&self) -> usize {
        self.dims.len()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = hermitian_eigen(&self.entries).0;
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Same entries, new register layout with the same total dimension.
    pub fn relabel(&self, dims: Vec<usize>) -> Result<Self> {
        check_shape(&dims, &self.entries)?;
        Ok(Self {
            dims,
            entries: self.entries.clone(),
            tol: self.tol,
        })
    }

    /// `U ρ U†` for a unitary on the full space.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::invalid("unitary has the wrong size"));
        }
        let m = unitary * &self.entries * unitary.adjoint();
        Self::with_tolerance(self.dims.clone(), hermitian_part(&m), self.tol.max(1e-9))
    }
}

fn check_shape(dims: &[usize], entries: &CMatrix) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::invalid(format!("register dimensions {dims:?} must be >= 1")));
    }
    let d = dims
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or(Error::DimensionLimit {
            dim: usize::MAX,
            max: DEFAULT_MAX_DIM,
        })?;
    if d > DEFAULT_MAX_DIM {
        return Err(Error::DimensionLimit {
            dim: d,
            max: DEFAULT_MAX_DIM,
        });
    }
    if entries.nrows() != d || entries.ncols() != d {
        return Err(Error::invalid(format!(
            "matrix is {}x{} but dims {:?} need {}x{}",
            entries.nrows(),
            entries.ncols(),
            dims,
            d,
            d
        )));
    }
    Ok(())
}

/// Checks Hermiticity, positivity and unit trace at absolute tolerance `tol`.
pub fn check_state(m: &CMatrix, tol: f64) -> Result<()> {
    let dev = hermiticity_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotOne { trace });
    }
    let min_ev = hermitian_eigen(m)
        .0
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_ev < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: min_ev,
        });
    }
    Ok(())
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigen-decomposition of the Hermitian part of `m`: eigenvalues and the
/// matrix whose columns are the eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `Σ f(λᵢ) |vᵢ⟩⟨vᵢ|` over the eigen-decomposition of a Hermitian matrix.
pub fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (j, lam) in vals.iter().enumerate() {
        let w = Complex64::new(f(*lam), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    scaled * vecs.adjoint()
}

/// Positive square root, with negative rounding noise clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    spectral_map(m, |x| x.max(0.0).sqrt())
}

/// Projector onto the eigenspace of eigenvalues strictly above `threshold`.
pub fn support_projector(m: &CMatrix, threshold: f64) -> CMatrix {
    spectral_map(m, |x| if x > threshold { 1.0 } else { 0.0 })
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// `Re Tr[A B]` without forming the product.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Kronecker product `a ⊗ b`; register lists are concatenated.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn tensor_with_limit(a: &DensityMatrix, b: &DensityMatrix, max_dim: usize) -> Result<DensityMatrix> {
    let d = a
        .dim()
        .checked_mul(b.dim())
        .ok_or(Error::DimensionLimit {
            dim: usize::MAX,
            max: max_dim,
        })?;
    if d > max_dim {
        return Err(Error::DimensionLimit { dim: d, max: max_dim });
    }
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Ok(DensityMatrix {
        dims,
        entries: a.entries.kronecker(&b.entries),
        tol: a.tol.max(b.tol),
    })
}

/// Partial trace over every register not listed in `keep`. The kept
/// registers stay in their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (dims, entries) = partial_trace_raw(&rho.dims, &rho.entries, keep)?;
    Ok(DensityMatrix {
        dims,
        entries,
        tol: rho.tol,
    })
}

/// Partial trace of an arbitrary square operator laid out over `dims`.
pub fn partial_trace_raw(dims: &[usize], m: &CMatrix, keep: &[usize]) -> Result<(Vec<usize>, CMatrix)> {
    if keep.is_empty() {
        return Err(Error::invalid("partial trace needs at least one kept register"));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::invalid(format!(
            "register {bad} out of range for {} registers",
            dims.len()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    if keep.len() == dims.len() {
        return Ok((kept_dims, m.clone()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|r| !keep.contains(r)).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced.iter().map(|&r| dims[r]).product();

    // strides of each register in the full index
    let mut strides = vec![1usize; dims.len()];
    for r in (0..dims.len().saturating_sub(1)).rev() {
        strides[r] = strides[r + 1] * dims[r + 1];
    }
    let compose = |regs: &[usize], mut idx: usize| -> usize {
        let mut full = 0;
        for &r in regs.iter().rev() {
            full += (idx % dims[r]) * strides[r];
            idx /= dims[r];
        }
        full
    };
    let kept_offsets: Vec<usize> = (0..dk).map(|k| compose(&keep, k)).collect();
    let traced_offsets: Vec<usize> = (0..dt).map(|t| compose(&traced, t)).collect();

    let mut out = CMatrix::from_element(dk, dk, ZERO);
    for &t in &traced_offsets {
        for (i, &ki) in kept_offsets.iter().enumerate() {
            for (j, &kj) in kept_offsets.iter().enumerate() {
                out[(i, j)] += m[(ki + t, kj + t)];
            }
        }
    }
    Ok((kept_dims, out))
}

fn same_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dims != b.dims {
        return Err(Error::DimsMismatch {
            left: a.dims.clone(),
            right: b.dims.clone(),
        });
    }
    Ok(())
}

/// Unhalved trace norm `‖a − b‖₁`, in `[0, 2]` for states.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dims(a, b)?;
    Ok(trace_norm(&(&a.entries - &b.entries)))
}

/// `½‖a − b‖₁`, the metric-normalized variant in `[0, 1]`.
pub fn trace_distance_halved(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * trace_distance(a, b)?)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.iter().map(|x| x.abs()).sum()
}

/// Root fidelity `Tr √(√a b √a)`, clamped to `[0, 1]`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dims(a, b)?;
    Ok(fidelity_raw(&a.entries, &b.entries).clamp(0.0, 1.0))
}

/// Root fidelity of two positive operators, without normalization.
pub fn fidelity_raw(a: &CMatrix, b: &CMatrix) -> f64 {
    let s = psd_sqrt(a);
    let m = &s * b * &s;
    hermitian_eigen(&m).0.iter().map(|x| x.max(0.0).sqrt()).sum()
}

/// `√(1 − F²)`, clamped to `[0, 1]`.
pub fn purified_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let f = fidelity(a, b)?;
    Ok((1.0 - f * f).max(0.0).sqrt().clamp(0.0, 1.0))
}

/// `−Σ λ log₂ λ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&hermitian_eigen(&rho.entries).0)
}

pub(crate) fn entropy_of_spectrum(vals: &[f64]) -> f64 {
    vals.iter()
        .filter(|&&x| x > 1e-15)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}
