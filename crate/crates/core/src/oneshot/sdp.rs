//! Small complex-Hermitian semidefinite programs on top of Clarabel.
//!
//! Complex PSD constraints `H = A + iB ⪰ 0` are posed as the real
//! symmetric cone `[[A, −B], [B, A]] ⪰ 0`, which has the same spectrum with
//! every eigenvalue doubled.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus as ClarabelStatus, SupportedConeT,
};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qla::CMatrix;

/// Complex affine expression `c + Σ coeff·x[var]` in the real decision variables.
#[derive(Debug, Clone, Default)]
pub(crate) struct Affine {
    constant: Complex64,
    terms: Vec<(usize, Complex64)>,
}

impl Affine {
    pub fn constant(c: Complex64) -> Self {
        Self {
            constant: c,
            terms: Vec::new(),
        }
    }

    fn var(index: usize, coeff: Complex64) -> Self {
        Self {
            constant: Complex64::new(0.0, 0.0),
            terms: vec![(index, coeff)],
        }
    }

    pub fn plus(mut self, other: Affine) -> Self {
        self.constant += other.constant;
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.constant *= s;
        for t in &mut self.terms {
            t.1 *= s;
        }
        self
    }

    fn conj(mut self) -> Self {
        self.constant = self.constant.conj();
        for t in &mut self.terms {
            t.1 = t.1.conj();
        }
        self
    }

    fn re(&self) -> (f64, Vec<(usize, f64)>) {
        (
            self.constant.re,
            self.terms.iter().map(|&(i, c)| (i, c.re)).collect(),
        )
    }

    fn im(&self) -> (f64, Vec<(usize, f64)>) {
        (
            self.constant.im,
            self.terms.iter().map(|&(i, c)| (i, c.im)).collect(),
        )
    }
}

/// Hermitian `n×n` matrix variable using `n²` real parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HermVar {
    offset: usize,
    n: usize,
}

impl HermVar {
    fn pair_index(&self, i: usize, j: usize) -> usize {
        // position of (i, j), i < j, in row-major strict upper triangle
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> Affine {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Affine::var(self.offset + i, Complex64::new(1.0, 0.0)),
            Less => {
                let base = self.offset + self.n + 2 * self.pair_index(i, j);
                Affine::var(base, Complex64::new(1.0, 0.0)).plus(Affine::var(base + 1, Complex64::new(0.0, 1.0)))
            }
            Greater => self.entry(j, i).conj(),
        }
    }

    pub fn value(&self, x: &[f64]) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(x[self.offset + i], 0.0);
            for j in (i + 1)..n {
                let base = self.offset + n + 2 * self.pair_index(i, j);
                let z = Complex64::new(x[base], x[base + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    pub fn trace_terms(&self) -> Vec<(usize, f64)> {
        (0..self.n).map(|i| (self.offset + i, 1.0)).collect()
    }
}

/// General complex `n×n` matrix variable using `2n²` real parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ComplexVar {
    offset: usize,
    n: usize,
}

impl ComplexVar {
    pub fn entry(&self, i: usize, j: usize) -> Affine {
        let base = self.offset + 2 * (i * self.n + j);
        Affine::var(base, Complex64::new(1.0, 0.0)).plus(Affine::var(base + 1, Complex64::new(0.0, 1.0)))
    }

    /// Real-part-of-trace objective coefficients.
    pub fn re_trace_terms(&self) -> Vec<(usize, f64)> {
        (0..self.n)
            .map(|i| (self.offset + 2 * (i * self.n + i), 1.0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Solved,
    Inaccurate,
    Failed,
}

pub(crate) struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub outcome: Outcome,
}

/// Accumulates a problem `min qᵀx` subject to equalities and Hermitian PSD
/// constraints.
#[derive(Default)]
pub(crate) struct Program {
    nvars: usize,
    objective: Vec<(usize, f64)>,
    eq_rows: Vec<(Vec<(usize, f64)>, f64)>,
    psd: Vec<(usize, Vec<(f64, Vec<(usize, f64)>)>)>,
}

impl Program {
    pub fn herm(&mut self, n: usize) -> HermVar {
        let v = HermVar { offset: self.nvars, n };
        self.nvars += n * n;
        v
    }

    pub fn complex(&mut self, n: usize) -> ComplexVar {
        let v = ComplexVar { offset: self.nvars, n };
        self.nvars += 2 * n * n;
        v
    }

    pub fn minimize(&mut self, terms: Vec<(usize, f64)>) {
        self.objective.extend(terms);
    }

    /// `Σ coeff·x = rhs`.
    pub fn equal(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.eq_rows.push((terms, rhs));
    }

    /// Constrains the Hermitian matrix with upper-triangle entries
    /// `entry(i, j)` (for `i ≤ j`) to be positive semidefinite.
    pub fn psd(&mut self, n: usize, entry: impl Fn(usize, usize) -> Affine) {
        let get = |i: usize, j: usize| if i <= j { entry(i, j) } else { entry(j, i).conj() };
        let big = 2 * n;
        let mut rows = Vec::with_capacity(big * (big + 1) / 2);
        for col in 0..big {
            for row in 0..=col {
                let (c, terms) = if col < n {
                    get(row, col).re()
                } else if row >= n {
                    get(row - n, col - n).re()
                } else {
                    let (c, t) = get(row, col - n).im();
                    (-c, t.into_iter().map(|(i, v)| (i, -v)).collect())
                };
                let scale = if row == col { 1.0 } else { std::f64::consts::SQRT_2 };
                rows.push((
                    scale * c,
                    terms.into_iter().map(|(i, v)| (i, scale * v)).collect(),
                ));
            }
        }
        self.psd.push((big, rows));
    }

    pub fn solve(&self) -> Result<Solution> {
        let n = self.nvars;
        let mut q = vec![0.0; n];
        for &(i, c) in &self.objective {
            q[i] += c;
        }
        let mut rows_idx = Vec::new();
        let mut cols_idx = Vec::new();
        let mut vals = Vec::new();
        let mut b = Vec::new();
        let mut cones = Vec::new();
        let mut row = 0usize;
        let mut push_row = |terms: &[(usize, f64)], rhs: f64, row: &mut usize| {
            // s = b − A x, so a row with terms t and constant c gives s = c + t·x
            for &(i, v) in terms {
                if v != 0.0 {
                    rows_idx.push(*row);
                    cols_idx.push(i);
                    vals.push(-v);
                }
            }
            b.push(rhs);
            *row += 1;
        };
        if !self.eq_rows.is_empty() {
            for (terms, rhs) in &self.eq_rows {
                let neg: Vec<(usize, f64)> = terms.iter().map(|&(i, v)| (i, -v)).collect();
                push_row(&neg, *rhs, &mut row);
            }
            cones.push(SupportedConeT::ZeroConeT(self.eq_rows.len()));
        }
        for (dim, entries) in &self.psd {
            for (c, terms) in entries {
                push_row(terms, *c, &mut row);
            }
            cones.push(SupportedConeT::PSDTriangleConeT(*dim));
        }
        let a = CscMatrix::new_from_triplets(row, n, rows_idx, cols_idx, vals);
        let p = CscMatrix::zeros((n, n));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(200)
            .build()
            .map_err(|e| Error::Numeric(format!("solver settings: {e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings)
            .map_err(|e| Error::Numeric(format!("solver setup: {e:?}")))?;
        solver.solve();
        let outcome = match solver.solution.status {
            ClarabelStatus::Solved => Outcome::Solved,
            ClarabelStatus::AlmostSolved | ClarabelStatus::MaxIterations | ClarabelStatus::InsufficientProgress => {
                Outcome::Inaccurate
            }
            _ => Outcome::Failed,
        };
        Ok(Solution {
            objective: solver.solution.obj_val,
            x: solver.solution.x.clone(),
            outcome,
        })
    }
}

/// A pair of diagonal blocks `(ρₖ, σₖ)` sharing a basis.
pub(crate) struct BlockPair {
    pub rho: CMatrix,
    pub sigma: CMatrix,
}

/// Maximizes the root fidelity `Σₖ F(ρₖ, τₖ)` over block-diagonal `τ` with
/// `0 ⪯ τₖ ⪯ m σₖ` and `Σₖ Tr τₖ = 1`.
pub(crate) fn max_fidelity(blocks: &[BlockPair], m: f64) -> Result<(f64, Vec<CMatrix>, Outcome)> {
    let mut prog = Program::default();
    let mut taus = Vec::with_capacity(blocks.len());
    let mut trace_terms = Vec::new();
    for blk in blocks {
        let n = blk.rho.nrows();
        let tau = prog.herm(n);
        let x = prog.complex(n);
        prog.minimize(x.re_trace_terms().into_iter().map(|(i, v)| (i, -v)).collect());
        let rho = &blk.rho;
        prog.psd(2 * n, |i, j| {
            if j < n {
                Affine::constant(rho[(i, j)])
            } else if i < n {
                x.entry(i, j - n)
            } else {
                tau.entry(i - n, j - n)
            }
        });
        let sigma = &blk.sigma;
        prog.psd(n, |i, j| {
            Affine::constant(sigma[(i, j)] * m).plus(tau.entry(i, j).scaled(-1.0))
        });
        trace_terms.extend(tau.trace_terms());
        taus.push(tau);
    }
    prog.equal(trace_terms, 1.0);
    let sol = prog.solve()?;
    let values = taus.iter().map(|t| t.value(&sol.x)).collect();
    Ok((-sol.objective, values, sol.outcome))
}

/// Minimizes the unhalved trace distance `Σₖ ‖τₖ − ρₖ‖₁` over the same set.
/// `fixed_distance` is the trace mass of `ρ` outside the supplied blocks,
/// which `τ` cannot reach.
pub(crate) fn min_trace_distance(
    blocks: &[BlockPair],
    m: f64,
    fixed_distance: f64,
) -> Result<(f64, Vec<CMatrix>, Outcome)> {
    let mut prog = Program::default();
    let mut taus = Vec::with_capacity(blocks.len());
    let mut trace_terms = Vec::new();
    for blk in blocks {
        let n = blk.rho.nrows();
        let tau = prog.herm(n);
        let pos = prog.herm(n);
        // ‖τ − ρ‖₁ = Tr P + Tr N with N = P − τ + ρ
        prog.minimize(pos.trace_terms().into_iter().map(|(i, v)| (i, 2.0 * v)).collect());
        prog.minimize(tau.trace_terms().into_iter().map(|(i, v)| (i, -v)).collect());
        prog.psd(n, |i, j| pos.entry(i, j));
        let rho = &blk.rho;
        prog.psd(n, |i, j| {
            pos.entry(i, j)
                .plus(tau.entry(i, j).scaled(-1.0))
                .plus(Affine::constant(rho[(i, j)]))
        });
        prog.psd(n, |i, j| tau.entry(i, j));
        let sigma = &blk.sigma;
        prog.psd(n, |i, j| {
            Affine::constant(sigma[(i, j)] * m).plus(tau.entry(i, j).scaled(-1.0))
        });
        trace_terms.extend(tau.trace_terms());
        taus.push(tau);
    }
    prog.equal(trace_terms, 1.0);
    let sol = prog.solve()?;
    let rho_in_blocks: f64 = blocks
        .iter()
        .map(|b| b.rho.diagonal().iter().map(|z| z.re).sum::<f64>())
        .sum();
    let values = taus.iter().map(|t| t.value(&sol.x)).collect();
    Ok((sol.objective + rho_in_blocks + fixed_distance, values, sol.outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qla::fidelity_raw;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_fn(v.len(), v.len(), |i, j| {
            if i == j {
                Complex64::new(v[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn herm_var_roundtrip() {
        let mut p = Program::default();
        let _pad = p.herm(1);
        let h = p.herm(3);
        let x: Vec<f64> = (0..p.nvars).map(|i| i as f64 + 0.5).collect();
        let m = h.value(&x);
        for i in 0..3 {
            for j in 0..3 {
                let e = h.entry(i, j);
                let mut z = e.constant;
                for (k, c) in e.terms {
                    z += c * x[k];
                }
                assert_eq!(z, m[(i, j)]);
            }
        }
    }

    #[test]
    fn unconstrained_fidelity_is_one() {
        let rho = diag(&[0.7, 0.3]);
        let sigma = diag(&[0.5, 0.5]);
        let (f, taus, outcome) = max_fidelity(&[BlockPair { rho: rho.clone(), sigma }], 10.0).unwrap();
        assert_eq!(outcome, Outcome::Solved);
        assert!((f - 1.0).abs() < 1e-6, "{f}");
        assert!((&taus[0] - &rho).norm() < 1e-4);
    }

    #[test]
    fn dominance_limits_fidelity() {
        // τ ⪯ 1·σ with unit trace forces τ = σ
        let rho = diag(&[0.9, 0.1]);
        let sigma = diag(&[0.5, 0.5]);
        let (f, _, _) = max_fidelity(
            &[BlockPair {
                rho: rho.clone(),
                sigma: sigma.clone(),
            }],
            1.0,
        )
        .unwrap();
        assert!((f - fidelity_raw(&rho, &sigma)).abs() < 1e-6);

        let (d, _, _) = min_trace_distance(&[BlockPair { rho, sigma }], 1.0, 0.0).unwrap();
        assert!((d - 0.8).abs() < 1e-6, "{d}");
    }
}
