//! One-shot entropic quantities: smooth hypothesis-testing relative entropy,
//! max relative entropy and their mutual-information versions.
//!
//! Both arguments of every quantity are first split into the finest common
//! block-diagonal structure in the computational basis. Classical registers
//! of cq states then decouple into small independent blocks, and the
//! optimizers can be restricted to block-diagonal operators without loss.

mod sdp;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::{self, CMatrix, DensityMatrix};

use sdp::{BlockPair, Outcome};

/// Entropic value in bits with a dedicated `+∞` sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bits {
    Finite(f64),
    PlusInfinity,
}

impl Bits {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Bits::PlusInfinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Bits::Finite(v) => Some(*v),
            Bits::PlusInfinity => None,
        }
    }

    /// The finite value, or `f64::INFINITY` for the sentinel.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bits::Finite(v) => s.serialize_f64(*v),
            Bits::PlusInfinity => s.serialize_str("+inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Converged,
    MaxIterations,
    Infeasible,
}

/// Optimizer attached to a one-shot value.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Optimal test `0 ⪯ Π ⪯ I` of a hypothesis-testing problem.
    Test(CMatrix),
    /// Optimal smoothed state.
    State(DensityMatrix),
}

#[derive(Debug, Clone)]
pub struct SmoothingResult {
    pub value: Bits,
    pub witness: Witness,
    pub achieved_distance: f64,
    pub status: SolverStatus,
}

/// Split of a state's registers into a left ("A") and right ("B") side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        let mut left = left;
        let mut right = right;
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        if left.is_empty() || right.is_empty() {
            return Err(Error::invalid("both sides of a bipartition must be nonempty"));
        }
        if left.iter().any(|r| right.contains(r)) {
            return Err(Error::invalid(format!(
                "bipartition sides {left:?} and {right:?} overlap"
            )));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// Checks that the sides cover exactly `0..n`.
    pub fn check_covers(&self, n: usize) -> Result<()> {
        let mut all: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        all.sort_unstable();
        if all != (0..n).collect::<Vec<_>>() {
            return Err(Error::invalid(format!(
                "bipartition {:?}:{:?} does not cover registers 0..{n}",
                self.left, self.right
            )));
        }
        Ok(())
    }
}

/// Metric defining the smoothing ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingMetric {
    #[default]
    Purified,
    /// Unhalved trace norm `‖ρ′ − ρ‖₁ ≤ ε`.
    TraceNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneShotConfig {
    /// Eigenvalues of `ρ − tσ` with magnitude below this count as zero.
    pub pencil_tol: f64,
    /// Bisection stops once the bracket on `log₂ m` is narrower than this.
    pub bits_tol: f64,
    pub metric: SmoothingMetric,
    /// Smoothing over normalized states only; the subnormalized ball is not
    /// implemented.
    pub normalized_ball: bool,
}

impl Default for OneShotConfig {
    fn default() -> Self {
        Self {
            pencil_tol: 1e-8,
            bits_tol: 1e-3,
            metric: SmoothingMetric::Purified,
            normalized_ball: true,
        }
    }
}

const STRUCTURE_TOL: f64 = 1e-14;
const SUPPORT_TOL: f64 = 1e-9;

/// Connected components of the sparsity graph of `a` and `b`, skipping
/// indices where both diagonals vanish (those rows are zero for PSD inputs).
fn common_blocks(a: &CMatrix, b: &CMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let active: Vec<bool> = (0..n)
        .map(|i| a[(i, i)].re.abs() > STRUCTURE_TOL || b[(i, i)].re.abs() > STRUCTURE_TOL)
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        if !active[i] {
            continue;
        }
        for j in (i + 1)..n {
            if active[j] && (a[(i, j)].norm() > STRUCTURE_TOL || b[(i, j)].norm() > STRUCTURE_TOL) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        if !active[i] {
            continue;
        }
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn embed_blocks(n: usize, blocks: &[Vec<usize>], parts: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for (idx, part) in blocks.iter().zip(parts) {
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                out[(gi, gj)] = part[(i, j)];
            }
        }
    }
    out
}

fn check_pair(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimsMismatch {
            left: rho.dims().to_vec(),
            right: sigma.dims().to_vec(),
        });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("smoothing parameter {eps} must lie in (0, 1)")));
    }
    Ok(())
}

/// Eigen-decomposition of the pencil `ρ − tσ` restricted to each block,
/// flattened into (eigenvalue, ⟨v|ρ|v⟩, ⟨v|σ|v⟩, block, column).
struct Pencil {
    entries: Vec<(f64, f64, f64, usize, usize)>,
    vectors: Vec<CMatrix>,
}

fn pencil(blocks: &[(CMatrix, CMatrix)], t: f64) -> Pencil {
    let mut entries = Vec::new();
    let mut vectors = Vec::with_capacity(blocks.len());
    for (k, (r, s)) in blocks.iter().enumerate() {
        let m = r - s * Complex64::new(t, 0.0);
        let eig = SymmetricEigen::new(qla::hermitian_part(&m));
        for (c, &lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(c);
            let rv = (v.adjoint() * r * v)[(0, 0)].re;
            let sv = (v.adjoint() * s * v)[(0, 0)].re;
            entries.push((lam, rv, sv, k, c));
        }
        vectors.push(eig.eigenvectors);
    }
    Pencil { entries, vectors }
}

impl Pencil {
    fn accepted_mass(&self) -> f64 {
        self.entries.iter().filter(|e| e.0 > 0.0).map(|e| e.1).sum()
    }

    /// Weighted sum of eigenprojectors, block by block.
    fn operator(&self, weight: impl Fn(f64) -> f64, sizes: &[usize]) -> Vec<CMatrix> {
        let mut parts: Vec<CMatrix> = sizes.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        for &(lam, _, _, k, c) in &self.entries {
            let w = weight(lam);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors[k].column(c);
            parts[k] += (v * v.adjoint()) * Complex64::new(w, 0.0);
        }
        parts
    }
}

/// Smooth hypothesis-testing relative entropy
/// `−log₂ min{Tr[Πσ] : 0 ⪯ Π ⪯ I, Tr[Πρ] ≥ 1 − ε}`.
///
/// The optimal test is a Neyman–Pearson projector `{ρ − tσ > 0}` plus a
/// fractional weight on the (near-)kernel of `ρ − tσ`, with the threshold
/// `t` located by bisection so that `Tr[Πρ] = 1 − ε` exactly.
pub fn d_hypo(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<SmoothingResult> {
    d_hypo_with(rho, sigma, eps, &OneShotConfig::default())
}

pub fn d_hypo_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    cfg: &OneShotConfig,
) -> Result<SmoothingResult> {
    check_pair(rho, sigma)?;
    check_eps(eps)?;
    let n = rho.dim();
    let (r, s) = (rho.entries(), sigma.entries());
    let groups = common_blocks(r, s);
    let blocks: Vec<(CMatrix, CMatrix)> = groups
        .iter()
        .map(|g| (submatrix(r, g), submatrix(s, g)))
        .collect();
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let target = 1.0 - eps;

    // Accepting only the kernel of σ costs nothing under σ.
    let mut ker_parts = Vec::with_capacity(blocks.len());
    let mut ker_mass = 0.0;
    for (rb, sb) in &blocks {
        let ker = qla::spectral_map(sb, |x| if x > SUPPORT_TOL { 0.0 } else { 1.0 });
        ker_mass += qla::trace_product_re(&ker, rb);
        ker_parts.push(ker);
    }
    if ker_mass >= target {
        let c = Complex64::new(target / ker_mass, 0.0);
        let parts: Vec<CMatrix> = ker_parts.into_iter().map(|p| p * c).collect();
        return Ok(SmoothingResult {
            value: Bits::PlusInfinity,
            witness: Witness::Test(embed_blocks(n, &groups, &parts)),
            achieved_distance: 0.0,
            status: SolverStatus::Converged,
        });
    }

    let mut t_lo = 0.0;
    let mut t_hi = 1.0;
    let mut hi_pencil = pencil(&blocks, t_hi);
    let mut guard = 0;
    while hi_pencil.accepted_mass() >= target {
        t_lo = t_hi;
        t_hi *= 2.0;
        hi_pencil = pencil(&blocks, t_hi);
        guard += 1;
        if guard > 1100 {
            return Err(Error::Numeric("Neyman-Pearson threshold search diverged".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (t_lo + t_hi);
        if mid <= t_lo || mid >= t_hi {
            break;
        }
        let p = pencil(&blocks, mid);
        if p.accepted_mass() >= target {
            t_lo = mid;
        } else {
            t_hi = mid;
            hi_pencil = p;
        }
    }

    let tol = cfg.pencil_tol;
    let (mut pos_r, mut pos_s, mut zero_r, mut zero_s) = (0.0, 0.0, 0.0, 0.0);
    for &(lam, rv, sv, _, _) in &hi_pencil.entries {
        if lam > tol {
            pos_r += rv;
            pos_s += sv;
        } else if lam.abs() <= tol {
            zero_r += rv;
            zero_s += sv;
        }
    }
    let (test_parts, test_sigma) = if pos_r + zero_r >= target {
        let c = if zero_r > 0.0 {
            ((target - pos_r) / zero_r).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let parts = hi_pencil.operator(
            |lam| {
                if lam > tol {
                    1.0
                } else if lam.abs() <= tol {
                    c
                } else {
                    0.0
                }
            },
            &sizes,
        );
        (parts, pos_s + c * zero_s)
    } else {
        // Smooth (non-degenerate) crossing: mix the projectors on both
        // sides of the bracket.
        let lo_pencil = pencil(&blocks, t_lo);
        let lo_r = lo_pencil.accepted_mass();
        let lo_s: f64 = lo_pencil.entries.iter().filter(|e| e.0 > 0.0).map(|e| e.2).sum();
        let w = if lo_r > pos_r {
            ((target - pos_r) / (lo_r - pos_r)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let hi_parts = hi_pencil.operator(|lam| if lam > tol { 1.0 - w } else { 0.0 }, &sizes);
        let lo_parts = lo_pencil.operator(|lam| if lam > 0.0 { w } else { 0.0 }, &sizes);
        let parts = hi_parts.into_iter().zip(lo_parts).map(|(a, b)| a + b).collect();
        ((parts), (1.0 - w) * pos_s + w * lo_s)
    };
    let value = if test_sigma > 0.0 {
        Bits::Finite(-test_sigma.log2())
    } else {
        Bits::PlusInfinity
    };
    Ok(SmoothingResult {
        value,
        witness: Witness::Test(embed_blocks(n, &groups, &test_parts)),
        achieved_distance: 0.0,
        status: SolverStatus::Converged,
    })
}

/// `ρ^A ⊗ ρ^B` laid out in the register order of `rho`.
pub fn product_of_marginals(rho: &DensityMatrix, split: &Bipartition) -> Result<DensityMatrix> {
    split.check_covers(rho.num_registers())?;
    let dims = rho.dims();
    let a = qla::partial_trace(rho, split.left())?;
    let b = qla::partial_trace(rho, split.right())?;
    let n = rho.dim();
    let mut strides = vec![1usize; dims.len()];
    for r in (0..dims.len().saturating_sub(1)).rev() {
        strides[r] = strides[r + 1] * dims[r + 1];
    }
    let side_index = |full: usize, regs: &[usize]| -> usize {
        regs.iter()
            .fold(0, |acc, &r| acc * dims[r] + (full / strides[r]) % dims[r])
    };
    let ia: Vec<usize> = (0..n).map(|i| side_index(i, split.left())).collect();
    let ib: Vec<usize> = (0..n).map(|i| side_index(i, split.right())).collect();
    let (ae, be) = (a.entries(), b.entries());
    let m = CMatrix::from_fn(n, n, |i, j| ae[(ia[i], ia[j])] * be[(ib[i], ib[j])]);
    Ok(DensityMatrix::from_trusted(dims.to_vec(), m))
}

/// `D_H^ε(ρ^{AB} ‖ ρ^A ⊗ ρ^B)` in bits.
pub fn i_hypo(rho: &DensityMatrix, split: &Bipartition, eps: f64) -> Result<Bits> {
    let sigma = product_of_marginals(rho, split)?;
    Ok(d_hypo(rho, &sigma, eps)?.value)
}

/// Max relative entropy `log₂ min{m : ρ ⪯ m σ}`; `+∞` when the support of
/// `ρ` leaves the support of `σ`.
pub fn d_max(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Bits> {
    check_pair(rho, sigma)?;
    Ok(d_max_raw(rho.entries(), sigma.entries()))
}

pub(crate) fn d_max_raw(r: &CMatrix, s: &CMatrix) -> Bits {
    let groups = common_blocks(r, s);
    let mut best = 0.0f64;
    for g in &groups {
        let (rb, sb) = (submatrix(r, g), submatrix(s, g));
        let (vals, vecs) = qla::hermitian_eigen(&sb);
        let support: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > SUPPORT_TOL).collect();
        let outside = rb.diagonal().iter().map(|z| z.re).sum::<f64>()
            - support
                .iter()
                .map(|&i| {
                    let v = vecs.column(i);
                    (v.adjoint() * &rb * v)[(0, 0)].re
                })
                .sum::<f64>();
        if outside > SUPPORT_TOL {
            return Bits::PlusInfinity;
        }
        if support.is_empty() {
            continue;
        }
        // Λ^{-1/2} V† ρ V Λ^{-1/2} on supp σ
        let k = support.len();
        let mut w = CMatrix::zeros(rb.nrows(), k);
        for (c, &i) in support.iter().enumerate() {
            let scale = Complex64::new(1.0 / vals[i].sqrt(), 0.0);
            for row in 0..rb.nrows() {
                w[(row, c)] = vecs[(row, i)] * scale;
            }
        }
        let m = w.adjoint() * &rb * &w;
        let top = qla::hermitian_eigen(&m).0.into_iter().fold(f64::NEG_INFINITY, f64::max);
        best = best.max(top);
    }
    if best <= 0.0 {
        return Bits::Finite(f64::NEG_INFINITY);
    }
    Bits::Finite(best.log2())
}

/// Smooth max relative entropy: the least `D_max(ρ′ ‖ σ)` over normalized
/// `ρ′` within distance `ε` of `ρ`.
///
/// Bisects on `λ = log₂ m`; each step solves the convex feasibility problem
/// `{ρ′ ⪰ 0, Tr ρ′ = 1, ρ′ ⪯ mσ}` for the closest state to `ρ`. The returned
/// value is re-verified as `D_max` of the accepted witness.
pub fn d_max_smooth(rho: &DensityMatrix, sigma: &DensityMatrix, eps: f64) -> Result<SmoothingResult> {
    d_max_smooth_with(rho, sigma, eps, &OneShotConfig::default())
}

pub fn d_max_smooth_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps: f64,
    cfg: &OneShotConfig,
) -> Result<SmoothingResult> {
    check_pair(rho, sigma)?;
    check_eps(eps)?;
    if !cfg.normalized_ball {
        return Err(Error::invalid("smoothing over subnormalized states is not supported"));
    }
    let metric = cfg.metric;
    let distance = |a: &DensityMatrix| -> Result<f64> {
        match metric {
            SmoothingMetric::Purified => qla::purified_distance(a, rho),
            SmoothingMetric::TraceNorm => qla::trace_distance(a, rho),
        }
    };

    // D_max ≥ 0 between normalized states, and σ itself attains 0.
    let d_sigma = distance(sigma)?;
    if d_sigma <= eps {
        return Ok(SmoothingResult {
            value: Bits::Finite(0.0),
            witness: Witness::State(sigma.clone()),
            achieved_distance: d_sigma,
            status: SolverStatus::Converged,
        });
    }

    let (r, s) = (rho.entries(), sigma.entries());
    let groups = common_blocks(r, s);
    let mut pairs = Vec::new();
    let mut pair_groups = Vec::new();
    let mut unreachable = 0.0;
    for g in &groups {
        let sb = submatrix(s, g);
        let rb = submatrix(r, g);
        if qla::trace_re(&sb) <= STRUCTURE_TOL {
            unreachable += qla::trace_re(&rb);
            continue;
        }
        pairs.push(BlockPair { rho: rb, sigma: sb });
        pair_groups.push(g.clone());
    }

    let target_fidelity = (1.0 - eps * eps).sqrt();
    let feasible = |lambda: f64| -> Result<(bool, Vec<CMatrix>, Outcome)> {
        let m = lambda.exp2();
        match metric {
            SmoothingMetric::Purified => {
                let (f, taus, outcome) = sdp::max_fidelity(&pairs, m)?;
                Ok((f >= target_fidelity, taus, outcome))
            }
            SmoothingMetric::TraceNorm => {
                let (d, taus, outcome) = sdp::min_trace_distance(&pairs, m, unreachable)?;
                Ok((d <= eps, taus, outcome))
            }
        }
    };

    let mut status = SolverStatus::Converged;
    let mut lo = 0.0f64;
    let (mut hi, mut best): (f64, Option<Vec<CMatrix>>) = match d_max_raw(r, s) {
        Bits::Finite(v) => (v.max(0.0), None),
        Bits::PlusInfinity => {
            // Every state on supp σ satisfies ρ′ ⪯ σ / λ_min⁺(σ).
            let min_pos = pairs
                .iter()
                .flat_map(|p| qla::hermitian_eigen(&p.sigma).0)
                .filter(|&x| x > SUPPORT_TOL)
                .fold(f64::INFINITY, f64::min);
            let top = (1.0 / min_pos).log2() + 1e-6;
            let (ok, taus, outcome) = feasible(top)?;
            if !ok {
                let witness = project_witness(rho.dims(), &pair_groups, &taus, s);
                let achieved = distance(&witness)?;
                return Ok(SmoothingResult {
                    value: Bits::PlusInfinity,
                    witness: Witness::State(witness),
                    achieved_distance: achieved,
                    status: if outcome == Outcome::Failed {
                        SolverStatus::MaxIterations
                    } else {
                        SolverStatus::Infeasible
                    },
                });
            }
            (top, Some(taus))
        }
    };

    while hi - lo > cfg.bits_tol {
        let mid = 0.5 * (lo + hi);
        let (ok, taus, outcome) = feasible(mid)?;
        if outcome == Outcome::Failed {
            status = SolverStatus::MaxIterations;
            lo = mid;
            continue;
        }
        if ok {
            hi = mid;
            best = Some(taus);
        } else {
            lo = mid;
        }
    }

    let witness = match best {
        None => rho.clone(),
        Some(taus) => project_witness(rho.dims(), &pair_groups, &taus, s),
    };
    let value = match d_max_raw(witness.entries(), s) {
        Bits::Finite(v) => Bits::Finite(v.max(0.0)),
        inf => inf,
    };
    let achieved = distance(&witness)?;
    Ok(SmoothingResult {
        value,
        witness: Witness::State(witness),
        achieved_distance: achieved,
        status,
    })
}

/// Assembles solver blocks into a normalized state supported on supp σ.
fn project_witness(dims: &[usize], groups: &[Vec<usize>], taus: &[CMatrix], sigma: &CMatrix) -> DensityMatrix {
    let parts: Vec<CMatrix> = groups
        .iter()
        .zip(taus)
        .map(|(g, tau)| {
            let sb = submatrix(sigma, g);
            let p = qla::support_projector(&sb, SUPPORT_TOL);
            let projected = &p * tau * &p;
            qla::spectral_map(&projected, |x| x.max(0.0))
        })
        .collect();
    let n: usize = dims.iter().product();
    let mut m = embed_blocks(n, groups, &parts);
    let tr = qla::trace_re(&m);
    if tr > 0.0 {
        m /= Complex64::new(tr, 0.0);
    }
    DensityMatrix::from_trusted(dims.to_vec(), m)
}

/// `D_max^ε(ρ^{AB} ‖ ρ^A ⊗ ρ^B)` in bits.
pub fn i_max_smooth(rho: &DensityMatrix, split: &Bipartition, eps: f64) -> Result<f64> {
    Ok(i_max_smooth_detailed(rho, split, eps)?.value.as_f64())
}

pub fn i_max_smooth_detailed(rho: &DensityMatrix, split: &Bipartition, eps: f64) -> Result<SmoothingResult> {
    let sigma = product_of_marginals(rho, split)?;
    d_max_smooth(rho, &sigma, eps)
}

/// Von Neumann mutual information `S(A) + S(B) − S(AB)` in bits.
pub fn mutual_information(rho: &DensityMatrix, split: &Bipartition) -> Result<f64> {
    split.check_covers(rho.num_registers())?;
    let a = qla::partial_trace(rho, split.left())?;
    let b = qla::partial_trace(rho, split.right())?;
    Ok(qla::von_neumann_entropy(&a) + qla::von_neumann_entropy(&b) - qla::von_neumann_entropy(rho))
}

/// Both sides of the smooth max-information chain rule for a tripartite state.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRuleReport {
    pub lhs: f64,
    pub i_max_r_a: f64,
    pub i_max_ra_b: f64,
    pub constant: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Evaluates `I_max^{12ε}(R:AB) ≤ I_max^{ε−γ}(R:A) + I_max^{ε−γ}(RA:B) +
/// 2 log₂(1/ε) + log₂(3/γ²)`. When `12ε ≥ 1` the smoothing ball holds every
/// state, so the left side is 0.
pub fn chain_rule_check(
    phi: &DensityMatrix,
    groups: [&[usize]; 3],
    eps: f64,
    gamma: f64,
) -> Result<ChainRuleReport> {
    check_eps(eps)?;
    if !(gamma > 0.0 && gamma < eps) {
        return Err(Error::invalid(format!("gamma {gamma} must lie in (0, eps)")));
    }
    let [r, a, b] = groups;
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let ra: Vec<usize> = r.iter().chain(a).copied().collect();
    let all = Bipartition::new(r.to_vec(), ab)?;
    all.check_covers(phi.num_registers())?;

    let lhs = if 12.0 * eps >= 1.0 {
        0.0
    } else {
        i_max_smooth(phi, &all, 12.0 * eps)?
    };

    // R:A on the RA marginal, with registers renumbered in order
    let rho_ra = qla::partial_trace(phi, &ra)?;
    let mut ra_sorted = ra.clone();
    ra_sorted.sort_unstable();
    let pos = |x: usize| ra_sorted.iter().position(|&y| y == x).unwrap();
    let split_ra = Bipartition::new(r.iter().map(|&x| pos(x)).collect(), a.iter().map(|&x| pos(x)).collect())?;
    let i_r_a = i_max_smooth(&rho_ra, &split_ra, eps - gamma)?;
    let i_ra_b = i_max_smooth(phi, &Bipartition::new(ra, b.to_vec())?, eps - gamma)?;

    let constant = 2.0 * (1.0 / eps).log2() + (3.0 / (gamma * gamma)).log2();
    let rhs = i_r_a + i_ra_b + constant;
    Ok(ChainRuleReport {
        lhs,
        i_max_r_a: i_r_a,
        i_max_ra_b: i_ra_b,
        constant,
        rhs,
        slack: rhs - lhs,
    })
}
