//! Monte-Carlo experiments: codebook sampling, covering deviation of
//! block-averaged eavesdropper states and an end-to-end simulation of the
//! block-randomized private code with a pretty-good-measurement decoder.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelBundle, ControlState, CqMacChannel, Output};
use crate::error::{Error, Result};
use crate::oneshot;
use crate::qla::{self, CMatrix, DensityMatrix};
use crate::regions::{self, ToleranceConfig};
use crate::split::{split_distribution, FiniteDist};

/// Default cap on the number of message pairs handed to the decoder.
pub const DEFAULT_MAX_PAIRS: usize = 256;

/// Per-trial generator: `ChaCha8Rng` seeded with `base + index` (wrapping).
pub fn stream_rng(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base.wrapping_add(index))
}

/// Uniform double in `[0, 1)` from the top 53 bits of one `u64`.
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF draw of one symbol index.
fn sample_index(cdf: &[f64], probs: &[f64], rng: &mut impl RngCore) -> usize {
    let u = unit_f64(rng);
    cdf.iter()
        .position(|&c| u < c)
        .unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap_or(0))
}

/// One sender's codebook, stored block after block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook {
    pub alphabet: Vec<String>,
    /// Alphabet indices, `num_blocks * block_size` of them.
    pub symbols: Vec<usize>,
    pub num_blocks: usize,
    pub block_size: usize,
    pub seed: u64,
}

impl Codebook {
    pub fn block(&self, m: usize) -> &[usize] {
        &self.symbols[m * self.block_size..(m + 1) * self.block_size]
    }

    pub fn symbol_names(&self) -> Vec<&str> {
        self.symbols.iter().map(|&i| self.alphabet[i].as_str()).collect()
    }

    /// Relative frequency of every alphabet symbol within block `m`.
    pub fn block_frequencies(&self, m: usize) -> Vec<f64> {
        let mut f = vec![0.0; self.alphabet.len()];
        for &s in self.block(m) {
            f[s] += 1.0;
        }
        let k = self.block_size as f64;
        f.iter_mut().for_each(|v| *v /= k);
        f
    }
}

/// Draws `num_blocks * block_size` iid symbols from `dist`.
pub fn sample_codebook(dist: &FiniteDist, num_blocks: usize, block_size: usize, seed: u64) -> Result<Codebook> {
    if num_blocks == 0 || block_size == 0 {
        return Err(Error::invalid("codebook needs at least one block of at least one symbol"));
    }
    let total = num_blocks
        .checked_mul(block_size)
        .ok_or_else(|| Error::invalid("codebook size overflows"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cdf = dist.cdf();
    let symbols = (0..total)
        .map(|_| sample_index(&cdf, dist.probs(), &mut rng))
        .collect();
    Ok(Codebook {
        alphabet: dist.alphabet().to_vec(),
        symbols,
        num_blocks,
        block_size,
        seed,
    })
}

/// Symbol counts of `k` iid draws from `probs`, via sequential binomials.
pub fn sample_histogram(probs: &[f64], k: u64, rng: &mut impl RngCore) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = k;
    let mut mass = 1.0f64;
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = if q == 0.0 {
            0
        } else {
            Binomial::new(remaining, q).expect("probability in [0, 1]").sample(rng)
        };
        counts[i] = c;
        remaining -= c;
        mass -= p;
    }
    counts
}

/// `‖Σₖ wₖ ρₖ − Σₖ pₖ ρₖ‖₁` over states grouped into classes of bitwise
/// identical matrices. The class weight differences are forced to sum to
/// zero, so coinciding states contribute exactly nothing.
struct DeviationTable {
    classes: Vec<CMatrix>,
    class_of: Vec<usize>,
    class_prob: Vec<f64>,
}

impl DeviationTable {
    fn new(states: Vec<CMatrix>, probs: &[f64]) -> Self {
        let mut classes: Vec<CMatrix> = Vec::new();
        let mut class_of = Vec::with_capacity(states.len());
        for s in states {
            match classes.iter().position(|c| *c == s) {
                Some(i) => class_of.push(i),
                None => {
                    class_of.push(classes.len());
                    classes.push(s);
                }
            }
        }
        let mut class_prob = vec![0.0; classes.len()];
        for (&c, &p) in class_of.iter().zip(probs) {
            class_prob[c] += p;
        }
        Self {
            classes,
            class_of,
            class_prob,
        }
    }

    fn deviation(&self, weights: &[f64]) -> f64 {
        let mut w = vec![0.0; self.classes.len()];
        for (&c, &x) in self.class_of.iter().zip(weights) {
            w[c] += x;
        }
        let diffs: Vec<f64> = w.iter().zip(&self.class_prob).map(|(a, b)| a - b).collect();
        if diffs.len() < 2 {
            return 0.0;
        }
        let first = -diffs[1..].iter().sum::<f64>();
        let d = self.classes[0].nrows();
        let mut op = CMatrix::zeros(d, d);
        for (k, c) in self.classes.iter().enumerate() {
            let coeff = if k == 0 { first } else { diffs[k] };
            if coeff != 0.0 {
                op += c * Complex64::new(coeff, 0.0);
            }
        }
        qla::trace_norm(&op)
    }
}

/// `‖(1/K₁K₂) Σᵢⱼ ρ^E_{xᵢ,yⱼ} − ρ^E‖₁` for explicit symbol blocks.
pub fn covering_deviation(bundle: &ChannelBundle, block_x: &[&str], block_y: &[&str]) -> Result<f64> {
    if block_x.is_empty() || block_y.is_empty() {
        return Err(Error::invalid("covering blocks must be nonempty"));
    }
    let ch = &bundle.channel;
    let freq = |block: &[&str], alphabet: &[String]| -> Result<Vec<f64>> {
        let mut f = vec![0.0; alphabet.len()];
        for s in block {
            let i = alphabet
                .iter()
                .position(|a| a == s)
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
            f[i] += 1.0;
        }
        let k = block.len() as f64;
        Ok(f.into_iter().map(|v| v / k).collect())
    };
    let fx = freq(block_x, ch.x_alphabet())?;
    let fy = freq(block_y, ch.y_alphabet())?;
    let cs = bundle.control_state()?;
    let table = e_table(&cs)?;
    let weights: Vec<f64> = fx.iter().flat_map(|a| fy.iter().map(move |b| a * b)).collect();
    Ok(table.deviation(&weights))
}

fn e_table(cs: &ControlState) -> Result<DeviationTable> {
    let dims = cs.quantum_dims();
    let states = (0..cs.label_probs().len())
        .map(|k| {
            let tuple = unflatten(&cs.label_sizes(), k);
            Ok(qla::partial_trace_raw(&dims, cs.conditional_state(&tuple), &[1])?.1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeviationTable::new(states, cs.label_probs()))
}

fn unflatten(sizes: &[usize], mut k: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = k % s;
        k /= s;
    }
    out
}

/// Guaranteed mean deviation for 1, 2 or 3 independent senders.
pub fn covering_bound(senders: usize, delta: f64) -> Result<f64> {
    match senders {
        1 => Ok(delta),
        2 => Ok(20.0 * delta.powf(0.125)),
        3 => Ok(40.0 * delta.powf(0.125)),
        n => Err(Error::invalid(format!("covering bounds cover 1 to 3 senders, not {n}"))),
    }
}

/// Required `log₂` block sizes, one per label register of `cs`.
///
/// * one label: `I_max^{δ′}(X:E) − log₂ δ + 2`;
/// * two labels `(X, Y)`: `I_max^{δ′}(X:E) + k` and `I_max^{δ′}(Y:EX) + k + c0`;
/// * three labels `(U, V, Y)`: the split-state thresholds, in register order;
///
/// with `k = log₂(3/ε′³) − ¼ log₂ δ`, `δ′ = δ − ε′`, clamped at 0.
pub fn covering_log_thresholds(cs: &ControlState, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    tol.validate()?;
    let dp = tol.delta_prime();
    let imax = |left: &[usize], right: &[usize]| -> Result<f64> {
        let (rho, split) = cs.info_state(left, right, &[Output::E])?;
        oneshot::i_max_smooth_detailed(&rho, &split, dp)?
            .value
            .finite()
            .ok_or_else(|| Error::Numeric("smooth max-information is unbounded".into()))
    };
    let k = tol.covering_constant();
    match cs.labels().len() {
        1 => Ok(vec![(imax(&[0], &[])? - tol.delta.log2() + 2.0).max(0.0)]),
        2 => Ok(vec![
            (imax(&[0], &[])? + k).max(0.0),
            (imax(&[1], &[0])? + k + tol.c0).max(0.0),
        ]),
        3 => {
            let t = regions::secrecy_thresholds(cs, tol)?;
            Ok(vec![t.log_k1, t.log_k3, t.log_k2])
        }
        n => Err(Error::invalid(format!("covering needs 1 to 3 label registers, got {n}"))),
    }
}

/// `2^⌈log⌉`, capped at `2^62`.
pub fn block_size_for(log_k: f64) -> u64 {
    let e = log_k.max(0.0).ceil().min(62.0) as u32;
    1u64 << e
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub senders: usize,
    pub block_sizes: Vec<u64>,
    /// Required `log₂` sizes when supplied by the caller.
    pub required_log_sizes: Option<Vec<f64>>,
    pub meets_thresholds: Option<bool>,
    pub delta: f64,
    pub eps_prime: f64,
    pub trials: usize,
    pub seed: u64,
    pub mean_deviation: f64,
    pub stderr: Option<f64>,
    pub max_deviation: f64,
    pub theoretical_bound: f64,
    pub pass: bool,
    pub warnings: Vec<String>,
}

/// Mean covering deviation over `trials` independent codebooks.
///
/// Each trial draws an iid block of size `Kₗ` for every label register and
/// averages the conditional `E` states over all block tuples; only the
/// block histograms matter, so they are drawn directly as multinomials.
/// Trial `t` uses [`stream_rng`]`(seed, t)`.
pub fn covering_experiment(
    cs: &ControlState,
    block_sizes: &[u64],
    tol: &ToleranceConfig,
    trials: usize,
    seed: u64,
    required_log_sizes: Option<Vec<f64>>,
) -> Result<CoveringReport> {
    let senders = cs.labels().len();
    if block_sizes.len() != senders {
        return Err(Error::invalid(format!(
            "{} block sizes for {senders} label registers",
            block_sizes.len()
        )));
    }
    if block_sizes.contains(&0) {
        return Err(Error::invalid("block sizes must be positive"));
    }
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let bound = covering_bound(senders, tol.delta)?;
    let table = e_table(cs)?;
    let dists: Vec<Vec<f64>> = cs.labels().iter().map(|l| l.dist.probs().to_vec()).collect();
    let sizes = cs.label_sizes();

    let deviations: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let freqs: Vec<Vec<f64>> = dists
                .iter()
                .zip(block_sizes)
                .map(|(p, &k)| {
                    sample_histogram(p, k, &mut rng)
                        .into_iter()
                        .map(|c| c as f64 / k as f64)
                        .collect()
                })
                .collect();
            let weights: Vec<f64> = (0..table.class_of.len())
                .map(|k| {
                    unflatten(&sizes, k)
                        .iter()
                        .zip(&freqs)
                        .map(|(&i, f)| f[i])
                        .product()
                })
                .collect();
            table.deviation(&weights)
        })
        .collect();

    let mean = kahan_sum(&deviations) / trials as f64;
    let stderr = (trials > 1).then(|| {
        let var = kahan_sum(&deviations.iter().map(|d| (d - mean).powi(2)).collect::<Vec<_>>())
            / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    });
    let mut warnings = Vec::new();
    if stderr.is_none() {
        warnings.push("single trial: no standard error, pass judged on one sample".to_string());
    }
    let meets = required_log_sizes.as_ref().map(|req| {
        req.iter()
            .zip(block_sizes)
            .all(|(&r, &k)| (k as f64).log2() >= r - 1e-12)
    });
    if meets == Some(false) {
        warnings.push("block sizes are below the covering thresholds".to_string());
    }
    let pass = mean + 2.0 * stderr.unwrap_or(0.0) <= bound;
    Ok(CoveringReport {
        senders,
        block_sizes: block_sizes.to_vec(),
        required_log_sizes,
        meets_thresholds: meets,
        delta: tol.delta,
        eps_prime: tol.eps_prime,
        trials,
        seed,
        mean_deviation: mean,
        stderr,
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        theoretical_bound: bound,
        pass,
        warnings,
    })
}

fn kahan_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Average error of the pretty-good measurement `Πₖ = S^{-1/2} ρₖ S^{-1/2}`,
/// `S = Σₖ ρₖ`, over equiprobable messages.
pub fn pgm_decode_error(outputs: &[CMatrix]) -> Result<f64> {
    pgm_decode_error_with(outputs, DEFAULT_MAX_PAIRS)
}

pub fn pgm_decode_error_with(outputs: &[CMatrix], max_messages: usize) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::invalid("no messages to decode"));
    }
    if outputs.len() > max_messages {
        return Err(Error::invalid(format!(
            "{} messages exceed the decoder cap of {max_messages}",
            outputs.len()
        )));
    }
    let d = outputs[0].nrows();
    let mut s = CMatrix::zeros(d, d);
    for o in outputs {
        s += o;
    }
    let (vals, _) = qla::hermitian_eigen(&s);
    let top = vals.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return Err(Error::Numeric("decoder normalizer is zero".into()));
    }
    let cut = top * 1e-12;
    let inv_sqrt = qla::spectral_map(&s, |x| if x > cut { 1.0 / x.sqrt() } else { 0.0 });
    let mut success = 0.0;
    for o in outputs {
        let pi = &inv_sqrt * o * &inv_sqrt;
        success += qla::trace_product_re(&pi, o);
    }
    Ok((1.0 - success / outputs.len() as f64).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunTargets {
    /// `49√ε`.
    pub decode_49_sqrt_eps: f64,
    /// `ε^{1/8}`.
    pub decode_eps_1_8: f64,
    /// `40δ^{1/8}`.
    pub secrecy_40_delta_1_8: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub theta: f64,
    pub messages: [usize; 2],
    /// `(K₁, K₂, K₃)`: Alice's `U` and `V` block sizes and Bob's block size.
    pub block_sizes: [usize; 3],
    pub seed: u64,
    pub rates: [f64; 2],
    pub thresholds: regions::SecrecyThresholds,
    pub rate_feasible: bool,
    pub sizes_meet_thresholds: bool,
    pub decoder: String,
    pub decode_error: f64,
    pub secrecy_deviation_max: f64,
    pub secrecy_deviation_mean: f64,
    pub targets: RunTargets,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunParams {
    pub theta: f64,
    /// `(M, N)` message counts for Alice and Bob.
    pub messages: [usize; 2],
    /// `(K₁, K₂, K₃)`.
    pub block_sizes: [usize; 3],
    pub seed: u64,
}

/// Simulates the private code at one `θ`.
///
/// Alice's message `m` selects block `m` of both the `U` codebook (size
/// `K₁`) and the `V` codebook (size `K₃`); she sends `max(u, v)` for a
/// uniformly random pair from those blocks. Bob's message `n` selects block
/// `n` of his codebook (size `K₂`). Codebooks use seeds `seed`, `seed + 1`
/// and `seed + 2` for `U`, `V` and `Y`.
pub fn end_to_end_run(bundle: &ChannelBundle, tol: &ToleranceConfig, params: &RunParams) -> Result<RunReport> {
    tol.validate()?;
    let [m_count, n_count] = params.messages;
    let [k1, k2, k3] = params.block_sizes;
    if m_count == 0 || n_count == 0 {
        return Err(Error::invalid("message counts must be positive"));
    }
    let pairs = m_count * n_count;
    if pairs > DEFAULT_MAX_PAIRS {
        return Err(Error::invalid(format!(
            "{pairs} message pairs exceed the decoder cap of {DEFAULT_MAX_PAIRS}"
        )));
    }
    let ch: &CqMacChannel = &bundle.channel;
    let triple = split_distribution(&bundle.p_x, params.theta)?;
    let book_u = sample_codebook(&triple.p_u, m_count, k1, params.seed)?;
    let book_v = sample_codebook(&triple.p_v, m_count, k3, params.seed.wrapping_add(1))?;
    let book_y = sample_codebook(&bundle.p_y, n_count, k2, params.seed.wrapping_add(2))?;

    let cs = bundle.control_state()?;
    let region = regions::theta_region(&cs, tol, params.theta)?;
    let rates = [(m_count as f64).log2(), (n_count as f64).log2()];
    let rate_feasible = !region.private.is_empty() && region.private.contains(rates, 1e-9);
    let t = region.thresholds;
    let sizes_meet = (k1 as f64).log2() >= t.log_k1 - 1e-12
        && (k2 as f64).log2() >= t.log_k2 - 1e-12
        && (k3 as f64).log2() >= t.log_k3 - 1e-12;
    let mut warnings = Vec::new();
    if !rate_feasible {
        warnings.push("message rates lie outside the private region at this theta".to_string());
    }
    if !sizes_meet {
        warnings.push("block sizes are below the secrecy thresholds".to_string());
    }

    // law of the transmitted x for each of Alice's messages
    let nx = ch.x_alphabet().len();
    let x_freqs: Vec<Vec<f64>> = (0..m_count)
        .map(|m| {
            let fu = cumulative(&book_u.block_frequencies(m));
            let fv = cumulative(&book_v.block_frequencies(m));
            let cdf: Vec<f64> = fu.iter().zip(&fv).map(|(a, b)| a * b).collect();
            (0..nx)
                .map(|i| if i == 0 { cdf[0] } else { cdf[i] - cdf[i - 1] })
                .collect()
        })
        .collect();
    let y_freqs: Vec<Vec<f64>> = (0..n_count).map(|n| book_y.block_frequencies(n)).collect();

    let e_tab = e_table(&cs)?;
    let c_states: Vec<CMatrix> = (0..nx)
        .flat_map(|x| (0..ch.y_alphabet().len()).map(move |y| (x, y)))
        .map(|(x, y)| ch.c_state(x, y).into_entries())
        .collect();
    let mut outputs = Vec::with_capacity(pairs);
    let mut deviations = Vec::with_capacity(pairs);
    for xf in &x_freqs {
        for yf in &y_freqs {
            let weights: Vec<f64> = xf.iter().flat_map(|a| yf.iter().map(move |b| a * b)).collect();
            deviations.push(e_tab.deviation(&weights));
            let mut c = CMatrix::zeros(ch.dim_c(), ch.dim_c());
            for (w, s) in weights.iter().zip(&c_states) {
                if *w != 0.0 {
                    c += s * Complex64::new(*w, 0.0);
                }
            }
            outputs.push(c);
        }
    }
    let decode_error = pgm_decode_error(&outputs)?;
    Ok(RunReport {
        theta: params.theta,
        messages: params.messages,
        block_sizes: params.block_sizes,
        seed: params.seed,
        rates,
        thresholds: t,
        rate_feasible,
        sizes_meet_thresholds: sizes_meet,
        decoder: "PGM stand-in, not the cited decoder".to_string(),
        decode_error,
        secrecy_deviation_max: deviations.iter().copied().fold(0.0, f64::max),
        secrecy_deviation_mean: kahan_sum(&deviations) / deviations.len() as f64,
        targets: RunTargets {
            decode_49_sqrt_eps: 49.0 * tol.eps.sqrt(),
            decode_eps_1_8: tol.eps.powf(0.125),
            secrecy_40_delta_1_8: 40.0 * tol.delta.powf(0.125),
        },
        warnings,
    })
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Uniform block average of a channel's `E` outputs, as a state.
pub fn block_average_e(ch: &CqMacChannel, block_x: &[usize], block_y: &[usize]) -> DensityMatrix {
    let mut avg = CMatrix::zeros(ch.dim_e(), ch.dim_e());
    for &x in block_x {
        for &y in block_y {
            avg += ch.e_state(x, y).entries();
        }
    }
    avg /= Complex64::new((block_x.len() * block_y.len()) as f64, 0.0);
    DensityMatrix::from_trusted(vec![ch.dim_e()], avg)
}
