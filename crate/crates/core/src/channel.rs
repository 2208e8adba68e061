//! Classical-quantum multiple access channels `(x, y) ↦ ρ^{CE}_{x,y}` and
//! their control states.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oneshot::Bipartition;
use crate::qla::{self, CMatrix, DensityMatrix};
use crate::split::FiniteDist;

/// Default cap on `dim C · dim E`.
pub const DEFAULT_MAX_CE_DIM: usize = 16;

const KRAUS_TOL: f64 = 1e-8;

/// On-disk matrix: row-major list of `[re, im]` pairs.
pub type FlatMatrix = Vec<[f64; 2]>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputEntry {
    pub x: String,
    pub y: String,
    pub matrix: FlatMatrix,
}

/// Channel given by Kraus operators acting on encoded inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausFile {
    /// `[dim X′, dim Y′]`.
    pub input_dims: [usize; 2],
    pub operators: Vec<FlatMatrix>,
    /// One encoding state per `x_alphabet` symbol, in order.
    pub x_encodings: Vec<FlatMatrix>,
    pub y_encodings: Vec<FlatMatrix>,
}

/// Parsed but unvalidated channel document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub x_alphabet: Vec<String>,
    pub y_alphabet: Vec<String>,
    pub p_x: Vec<f64>,
    pub p_y: Vec<f64>,
    pub dim_c: usize,
    pub dim_e: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<KrausFile>,
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_json(&text)
    }
}

pub fn flat_to_matrix(flat: &[[f64; 2]], rows: usize, cols: usize) -> Result<CMatrix> {
    if flat.len() != rows * cols {
        return Err(Error::invalid(format!(
            "matrix has {} entries, expected {rows}x{cols}",
            flat.len()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = flat[i * cols + j];
        Complex64::new(re, im)
    }))
}

pub fn matrix_to_flat(m: &CMatrix) -> FlatMatrix {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

/// Validated cq-MAC with outputs on `C ⊗ E`.
#[derive(Debug, Clone, PartialEq)]
pub struct CqMacChannel {
    x_alphabet: Vec<String>,
    y_alphabet: Vec<String>,
    dim_c: usize,
    dim_e: usize,
    /// Row-major over `(x, y)`.
    outputs: Vec<DensityMatrix>,
}

impl CqMacChannel {
    /// Builds a channel from a complete row-major table of outputs.
    pub fn new(
        x_alphabet: Vec<String>,
        y_alphabet: Vec<String>,
        dim_c: usize,
        dim_e: usize,
        outputs: Vec<CMatrix>,
    ) -> Result<Self> {
        let ny = y_alphabet.len();
        if x_alphabet.is_empty() || ny == 0 {
            return Err(Error::invalid("input alphabets must be nonempty"));
        }
        if outputs.len() != x_alphabet.len() * ny {
            return Err(Error::invalid(format!(
                "{} outputs for {}x{} inputs",
                outputs.len(),
                x_alphabet.len(),
                ny
            )));
        }
        let states = outputs
            .into_iter()
            .enumerate()
            .map(|(k, m)| {
                let (x, y) = (&x_alphabet[k / ny], &y_alphabet[k % ny]);
                let entry_err = |reason: String| Error::ChannelEntry {
                    x: x.clone(),
                    y: y.clone(),
                    reason,
                };
                if m.nrows() != dim_c * dim_e || m.ncols() != dim_c * dim_e {
                    return Err(entry_err(format!(
                        "dimension mismatch: {}x{} but dim C * dim E = {}",
                        m.nrows(),
                        m.ncols(),
                        dim_c * dim_e
                    )));
                }
                DensityMatrix::new(vec![dim_c, dim_e], m).map_err(|e| entry_err(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x_alphabet,
            y_alphabet,
            dim_c,
            dim_e,
            outputs: states,
        })
    }

    pub fn x_alphabet(&self) -> &[String] {
        &self.x_alphabet
    }

    pub fn y_alphabet(&self) -> &[String] {
        &self.y_alphabet
    }

    pub fn dim_c(&self) -> usize {
        self.dim_c
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    /// `ρ^{CE}_{x,y}` by alphabet index.
    pub fn output(&self, x: usize, y: usize) -> &DensityMatrix {
        &self.outputs[x * self.y_alphabet.len() + y]
    }

    pub fn output_by_symbol(&self, x: &str, y: &str) -> Result<&DensityMatrix> {
        let xi = position(&self.x_alphabet, x)?;
        let yi = position(&self.y_alphabet, y)?;
        Ok(self.output(xi, yi))
    }

    /// Reduced output on `E`.
    pub fn e_state(&self, x: usize, y: usize) -> DensityMatrix {
        qla::partial_trace(self.output(x, y), &[1]).expect("two-register output")
    }

    /// Reduced output on `C`.
    pub fn c_state(&self, x: usize, y: usize) -> DensityMatrix {
        qla::partial_trace(self.output(x, y), &[0]).expect("two-register output")
    }

    /// Serializes back to the on-disk document with the given priors.
    pub fn to_spec(&self, p_x: &FiniteDist, p_y: &FiniteDist) -> ChannelSpec {
        let mut outputs = Vec::new();
        for (xi, x) in self.x_alphabet.iter().enumerate() {
            for (yi, y) in self.y_alphabet.iter().enumerate() {
                outputs.push(OutputEntry {
                    x: x.clone(),
                    y: y.clone(),
                    matrix: matrix_to_flat(self.output(xi, yi).entries()),
                });
            }
        }
        ChannelSpec {
            x_alphabet: self.x_alphabet.clone(),
            y_alphabet: self.y_alphabet.clone(),
            p_x: p_x.probs().to_vec(),
            p_y: p_y.probs().to_vec(),
            dim_c: self.dim_c,
            dim_e: self.dim_e,
            outputs: Some(outputs),
            kraus: None,
        }
    }
}

fn position(alphabet: &[String], s: &str) -> Result<usize> {
    alphabet
        .iter()
        .position(|a| a == s)
        .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
}

/// A validated channel document: the channel plus its input priors.
#[derive(Debug, Clone)]
pub struct ChannelBundle {
    pub channel: CqMacChannel,
    pub p_x: FiniteDist,
    pub p_y: FiniteDist,
}

impl ChannelBundle {
    pub fn control_state(&self) -> Result<ControlState> {
        build_control_state(&self.channel, &self.p_x, &self.p_y)
    }
}

pub fn validate_channel(spec: &ChannelSpec) -> Result<ChannelBundle> {
    validate_channel_with(spec, DEFAULT_MAX_CE_DIM)
}

/// Checks every invariant of a channel document, naming the offending
/// `(x, y)` entry on failure.
pub fn validate_channel_with(spec: &ChannelSpec, max_ce_dim: usize) -> Result<ChannelBundle> {
    let ce = spec.dim_c * spec.dim_e;
    if ce == 0 {
        return Err(Error::invalid("dim_c and dim_e must be positive"));
    }
    if ce > max_ce_dim {
        return Err(Error::DimensionLimit { dim: ce, max: max_ce_dim });
    }
    let p_x = FiniteDist::new(spec.x_alphabet.clone(), spec.p_x.clone())?;
    let p_y = FiniteDist::new(spec.y_alphabet.clone(), spec.p_y.clone())?;
    let channel = match (&spec.outputs, &spec.kraus) {
        (Some(_), Some(_)) => {
            return Err(Error::invalid("give either `outputs` or `kraus`, not both"));
        }
        (None, None) => return Err(Error::invalid("missing `outputs` table")),
        (None, Some(k)) => {
            let kraus = KrausChannelSpec::from_file(k, [spec.dim_c, spec.dim_e])?;
            realize_kraus(&kraus, &spec.x_alphabet, &spec.y_alphabet)?
        }
        (Some(entries), None) => {
            let (nx, ny) = (spec.x_alphabet.len(), spec.y_alphabet.len());
            let mut table: Vec<Option<CMatrix>> = vec![None; nx * ny];
            for e in entries {
                let entry_err = |reason: String| Error::ChannelEntry {
                    x: e.x.clone(),
                    y: e.y.clone(),
                    reason,
                };
                let xi = position(&spec.x_alphabet, &e.x).map_err(|err| entry_err(err.to_string()))?;
                let yi = position(&spec.y_alphabet, &e.y).map_err(|err| entry_err(err.to_string()))?;
                if e.matrix.len() != ce * ce {
                    return Err(entry_err(format!(
                        "dimension mismatch: {} entries, expected {}",
                        e.matrix.len(),
                        ce * ce
                    )));
                }
                let slot = &mut table[xi * ny + yi];
                if slot.is_some() {
                    return Err(entry_err("duplicate table entry".into()));
                }
                *slot = Some(flat_to_matrix(&e.matrix, ce, ce)?);
            }
            let mut outputs = Vec::with_capacity(nx * ny);
            for (k, m) in table.into_iter().enumerate() {
                outputs.push(m.ok_or_else(|| Error::ChannelEntry {
                    x: spec.x_alphabet[k / ny].clone(),
                    y: spec.y_alphabet[k % ny].clone(),
                    reason: "missing table entry".into(),
                })?);
            }
            CqMacChannel::new(
                spec.x_alphabet.clone(),
                spec.y_alphabet.clone(),
                spec.dim_c,
                spec.dim_e,
                outputs,
            )?
        }
    };
    Ok(ChannelBundle { channel, p_x, p_y })
}

/// Reads and validates a channel file.
pub fn load_channel(path: impl AsRef<Path>) -> Result<ChannelBundle> {
    validate_channel(&ChannelSpec::from_path(path)?)
}

/// Quantum-input channel: Kraus operators `X′ ⊗ Y′ → C ⊗ E` and state
/// encodings of the classical inputs.
#[derive(Debug, Clone)]
pub struct KrausChannelSpec {
    operators: Vec<CMatrix>,
    output_dims: [usize; 2],
    x_encodings: Vec<DensityMatrix>,
    y_encodings: Vec<DensityMatrix>,
}

impl KrausChannelSpec {
    pub fn new(
        operators: Vec<CMatrix>,
        output_dims: [usize; 2],
        x_encodings: Vec<DensityMatrix>,
        y_encodings: Vec<DensityMatrix>,
    ) -> Result<Self> {
        let (Some(sx), Some(sy)) = (x_encodings.first(), y_encodings.first()) else {
            return Err(Error::invalid("encodings must be nonempty"));
        };
        let (dx, dy) = (sx.dim(), sy.dim());
        if x_encodings.iter().any(|s| s.dim() != dx) || y_encodings.iter().any(|s| s.dim() != dy) {
            return Err(Error::invalid("encodings of one sender must share a dimension"));
        }
        let din = dx * dy;
        let dout = output_dims[0] * output_dims[1];
        if operators.is_empty() {
            return Err(Error::invalid("no Kraus operators"));
        }
        let mut sum = CMatrix::zeros(din, din);
        for k in &operators {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::invalid(format!(
                    "Kraus operator is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            sum += k.adjoint() * k;
        }
        let dev = (sum - CMatrix::identity(din, din)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > KRAUS_TOL {
            return Err(Error::invalid(format!(
                "Kraus operators are not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(Self {
            operators,
            output_dims,
            x_encodings,
            y_encodings,
        })
    }

    fn from_file(k: &KrausFile, output_dims: [usize; 2]) -> Result<Self> {
        let [dx, dy] = k.input_dims;
        let dout = output_dims[0] * output_dims[1];
        let operators = k
            .operators
            .iter()
            .map(|m| flat_to_matrix(m, dout, dx * dy))
            .collect::<Result<Vec<_>>>()?;
        let enc = |list: &[FlatMatrix], d: usize| -> Result<Vec<DensityMatrix>> {
            list.iter()
                .map(|m| DensityMatrix::new(vec![d], flat_to_matrix(m, d, d)?))
                .collect()
        };
        Self::new(operators, output_dims, enc(&k.x_encodings, dx)?, enc(&k.y_encodings, dy)?)
    }
}

/// `ρ^{CE}_{x,y} = Σᵢ Kᵢ (σ_x ⊗ σ_y) Kᵢ†`.
pub fn realize_kraus(spec: &KrausChannelSpec, x_alphabet: &[String], y_alphabet: &[String]) -> Result<CqMacChannel> {
    if x_alphabet.len() != spec.x_encodings.len() || y_alphabet.len() != spec.y_encodings.len() {
        return Err(Error::invalid("one encoding per input symbol is required"));
    }
    let mut outputs = Vec::with_capacity(x_alphabet.len() * y_alphabet.len());
    for sx in &spec.x_encodings {
        for sy in &spec.y_encodings {
            let input = sx.entries().kronecker(sy.entries());
            let mut out = CMatrix::zeros(spec.operators[0].nrows(), spec.operators[0].nrows());
            for k in &spec.operators {
                out += k * &input * k.adjoint();
            }
            outputs.push(qla::hermitian_part(&out));
        }
    }
    CqMacChannel::new(
        x_alphabet.to_vec(),
        y_alphabet.to_vec(),
        spec.output_dims[0],
        spec.output_dims[1],
        outputs,
    )
}

/// Named classical register with its marginal law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelRegister {
    pub name: String,
    pub dist: FiniteDist,
}

impl LabelRegister {
    pub fn new(name: impl Into<String>, dist: FiniteDist) -> Self {
        Self { name: name.into(), dist }
    }
}

/// Quantum output register of a control state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Output {
    C,
    E,
}

/// `Σ_l p(l) |l⟩⟨l| ⊗ ρ^{CE}_l` over independent label registers.
#[derive(Debug, Clone)]
pub struct ControlState {
    labels: Vec<LabelRegister>,
    quantum_dims: [usize; 2],
    /// Row-major over label tuples.
    probs: Vec<f64>,
    states: Vec<CMatrix>,
}

impl ControlState {
    /// Builds the product-form state with `state(tuple)` as the conditional
    /// `CE` state of each label tuple.
    pub fn from_product(
        labels: Vec<LabelRegister>,
        quantum_dims: [usize; 2],
        state: impl Fn(&[usize]) -> CMatrix,
    ) -> Result<Self> {
        let sizes: Vec<usize> = labels.iter().map(|l| l.dist.len()).collect();
        let total: usize = sizes.iter().product();
        let dq = quantum_dims[0] * quantum_dims[1];
        let mut probs = Vec::with_capacity(total);
        let mut states = Vec::with_capacity(total);
        for k in 0..total {
            let tuple = unflatten(&sizes, k);
            probs.push(
                tuple
                    .iter()
                    .zip(&labels)
                    .map(|(&i, l)| l.dist.probs()[i])
                    .product(),
            );
            let s = state(&tuple);
            if s.nrows() != dq {
                return Err(Error::invalid(format!(
                    "conditional state has dimension {}, expected {dq}",
                    s.nrows()
                )));
            }
            states.push(s);
        }
        Ok(Self {
            labels,
            quantum_dims,
            probs,
            states,
        })
    }

    pub fn labels(&self) -> &[LabelRegister] {
        &self.labels
    }

    pub fn quantum_dims(&self) -> [usize; 2] {
        self.quantum_dims
    }

    pub fn label_sizes(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.dist.len()).collect()
    }

    pub fn label_index(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::invalid(format!("no label register named {name:?}")))
    }

    /// Conditional `CE` state of a label tuple (alphabet indices).
    pub fn conditional_state(&self, tuple: &[usize]) -> &CMatrix {
        &self.states[flatten(&self.label_sizes(), tuple)]
    }

    /// Probabilities of all label tuples, row-major.
    pub fn label_probs(&self) -> &[f64] {
        &self.probs
    }

    /// Reduced state on the listed labels (ascending register order) and
    /// outputs (`C` before `E`), as a block-diagonal density matrix.
    pub fn reduced(&self, labels: &[usize], outputs: &[Output]) -> Result<DensityMatrix> {
        let mut labels = labels.to_vec();
        labels.sort_unstable();
        labels.dedup();
        if let Some(&bad) = labels.iter().find(|&&l| l >= self.labels.len()) {
            return Err(Error::invalid(format!("label register {bad} out of range")));
        }
        let mut outputs = outputs.to_vec();
        outputs.sort_unstable();
        outputs.dedup();
        if labels.is_empty() && outputs.is_empty() {
            return Err(Error::invalid("reduced state needs at least one register"));
        }
        let keep_q: Vec<usize> = outputs
            .iter()
            .map(|o| match o {
                Output::C => 0,
                Output::E => 1,
            })
            .collect();
        let dq: usize = keep_q.iter().map(|&q| self.quantum_dims[q]).product();
        let sizes = self.label_sizes();
        let kept_sizes: Vec<usize> = labels.iter().map(|&l| sizes[l]).collect();
        let dl: usize = kept_sizes.iter().product();
        let mut blocks = vec![CMatrix::zeros(dq, dq); dl];
        for (k, (p, s)) in self.probs.iter().zip(&self.states).enumerate() {
            if *p == 0.0 {
                continue;
            }
            let tuple = unflatten(&sizes, k);
            let sub: Vec<usize> = labels.iter().map(|&l| tuple[l]).collect();
            let idx = flatten(&kept_sizes, &sub);
            let reduced = if keep_q.is_empty() {
                CMatrix::from_element(1, 1, Complex64::new(qla::trace_re(s), 0.0))
            } else {
                qla::partial_trace_raw(&self.quantum_dims, s, &keep_q)?.1
            };
            blocks[idx] += reduced * Complex64::new(*p, 0.0);
        }
        let n = dl * dq;
        let mut m = CMatrix::zeros(n, n);
        for (b, block) in blocks.iter().enumerate() {
            m.view_mut((b * dq, b * dq), (dq, dq)).copy_from(block);
        }
        let mut dims = kept_sizes;
        dims.extend(keep_q.iter().map(|&q| self.quantum_dims[q]));
        Ok(DensityMatrix::from_trusted(dims, m))
    }

    /// The full state with every label register followed by `C` and `E`.
    pub fn embed(&self) -> Result<DensityMatrix> {
        let all: Vec<usize> = (0..self.labels.len()).collect();
        self.reduced(&all, &[Output::C, Output::E])
    }

    pub fn e_marginal(&self) -> Result<DensityMatrix> {
        self.reduced(&[], &[Output::E])
    }

    /// State and bipartition for `I(left : right, outputs)`, where the
    /// outputs are grouped with the right-hand labels.
    pub fn info_state(
        &self,
        left: &[usize],
        right: &[usize],
        outputs: &[Output],
    ) -> Result<(DensityMatrix, Bipartition)> {
        if left.iter().any(|l| right.contains(l)) {
            return Err(Error::invalid("label sets overlap"));
        }
        let mut all: Vec<usize> = left.iter().chain(right).copied().collect();
        all.sort_unstable();
        all.dedup();
        let rho = self.reduced(&all, outputs)?;
        let pos = |l: &usize| all.iter().position(|a| a == l).expect("label present");
        let lpos: Vec<usize> = left.iter().map(pos).collect();
        let mut rpos: Vec<usize> = right.iter().map(pos).collect();
        let nq = {
            let mut o = outputs.to_vec();
            o.sort_unstable();
            o.dedup();
            o.len()
        };
        rpos.extend(all.len()..all.len() + nq);
        Ok((rho, Bipartition::new(lpos, rpos)?))
    }

    /// Keeps only the listed label registers; dropped labels are absorbed
    /// into the conditional states.
    pub fn marginal_labels(&self, keep: &[usize]) -> Result<ControlState> {
        let sizes = self.label_sizes();
        if keep.iter().any(|&k| k >= sizes.len()) {
            return Err(Error::invalid("label register out of range"));
        }
        let labels: Vec<LabelRegister> = keep.iter().map(|&k| self.labels[k].clone()).collect();
        let kept_sizes: Vec<usize> = keep.iter().map(|&k| sizes[k]).collect();
        let dq = self.quantum_dims[0] * self.quantum_dims[1];
        let mut acc = vec![(0.0, CMatrix::zeros(dq, dq)); kept_sizes.iter().product()];
        for (k, (p, s)) in self.probs.iter().zip(&self.states).enumerate() {
            let tuple = unflatten(&sizes, k);
            let sub: Vec<usize> = keep.iter().map(|&i| tuple[i]).collect();
            let slot = &mut acc[flatten(&kept_sizes, &sub)];
            slot.0 += p;
            slot.1 += s * Complex64::new(*p, 0.0);
        }
        let fallback = &self.states[0];
        ControlState::from_product(labels, self.quantum_dims, |t| {
            let (p, s) = &acc[flatten(&kept_sizes, t)];
            if *p > 0.0 {
                s / Complex64::new(*p, 0.0)
            } else {
                fallback.clone()
            }
        })
    }

    /// The control state of `n` independent uses: each label register `L`
    /// becomes `Lⁿ` over tuples, outputs become `Cⁿ ⊗ Eⁿ`.
    pub fn tensor_power(&self, n: usize) -> Result<ControlState> {
        if n == 0 {
            return Err(Error::invalid("tensor power must be at least 1"));
        }
        let mut current = self.clone();
        for _ in 1..n {
            current = current.tensor_with(self)?;
        }
        Ok(current)
    }

    fn tensor_with(&self, other: &ControlState) -> Result<ControlState> {
        if self.labels.len() != other.labels.len() {
            return Err(Error::invalid("label registers differ"));
        }
        let labels: Vec<LabelRegister> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(a, b)| LabelRegister::new(a.name.clone(), a.dist.product(&b.dist)))
            .collect();
        let [c1, e1] = self.quantum_dims;
        let [c2, e2] = other.quantum_dims;
        let qdims = [c1 * c2, e1 * e2];
        let dim = qdims[0] * qdims[1];
        if dim > qla::DEFAULT_MAX_DIM {
            return Err(Error::DimensionLimit {
                dim,
                max: qla::DEFAULT_MAX_DIM,
            });
        }
        let sizes2 = other.label_sizes();
        // C1 E1 C2 E2 → C1 C2 E1 E2
        let perm = |i: usize| -> usize {
            let (c1i, rest) = (i / (e1 * c2 * e2), i % (e1 * c2 * e2));
            let (e1i, rest) = (rest / (c2 * e2), rest % (c2 * e2));
            let (c2i, e2i) = (rest / e2, rest % e2);
            ((c1i * c2 + c2i) * e1 + e1i) * e2 + e2i
        };
        ControlState::from_product(labels, qdims, |t| {
            let first: Vec<usize> = t.iter().zip(&sizes2).map(|(&i, &s)| i / s).collect();
            let second: Vec<usize> = t.iter().zip(&sizes2).map(|(&i, &s)| i % s).collect();
            let prod = self.conditional_state(&first).kronecker(other.conditional_state(&second));
            let mut out = CMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    out[(perm(i), perm(j))] = prod[(i, j)];
                }
            }
            out
        })
    }
}

/// `(X: p_x, Y: p_y)` control state of a channel.
pub fn build_control_state(ch: &CqMacChannel, p_x: &FiniteDist, p_y: &FiniteDist) -> Result<ControlState> {
    if p_x.alphabet() != ch.x_alphabet() || p_y.alphabet() != ch.y_alphabet() {
        return Err(Error::invalid("input distributions do not match the channel alphabets"));
    }
    ControlState::from_product(
        vec![LabelRegister::new("X", p_x.clone()), LabelRegister::new("Y", p_y.clone())],
        [ch.dim_c, ch.dim_e],
        |t| ch.output(t[0], t[1]).entries().clone(),
    )
}

fn unflatten(sizes: &[usize], mut k: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = k % s;
        k /= s;
    }
    out
}

fn flatten(sizes: &[usize], tuple: &[usize]) -> usize {
    tuple.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}
