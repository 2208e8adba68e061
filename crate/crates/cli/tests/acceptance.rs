//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cqmac::channel::{ChannelBundle, CqMacChannel, Output};
use cqmac::mc;
use cqmac::oneshot::{self, Bits};
use cqmac::regions::{self, RateRegion2D, ToleranceConfig};
use cqmac::split::{split_control_state, split_distribution, FiniteDist};
use cqmac::{random, CMatrix, DensityMatrix};

type Outcome = Result<String, String>;

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("hypothesis-testing divergence vs fractional knapsack", c1_hypo_oracle),
        ("smooth max divergence vs Bloch-ball search", c2_smooth_max),
        ("max-information chain rule", c3_chain_rule),
        ("split pushforward reconstruction", c4_split),
        ("split invariance on the qubit channel", c5_invariance),
        ("nine-halfspace projection vs brute force", c6_projection),
        ("covering bounds on shipped channels", c7_covering),
        ("degenerate channels", c8_degenerate),
        ("asymptotic region on XOR/AND channel", c9_asymptotic),
        ("CLI determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2} s)", i + 1)
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn shipped(name: &str) -> PathBuf {
    workspace_root().join("channels").join(name)
}

fn load(name: &str) -> ChannelBundle {
    cqmac::channel::load_channel(shipped(name)).expect("shipped channel loads")
}

fn symbols(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn diag(d: &[f64]) -> CMatrix {
    CMatrix::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn bundle(
    nx: usize,
    ny: usize,
    dim_c: usize,
    dim_e: usize,
    f: impl Fn(usize, usize) -> CMatrix,
) -> ChannelBundle {
    let outputs = (0..nx).flat_map(|x| (0..ny).map(move |y| (x, y))).map(|(x, y)| f(x, y)).collect();
    let channel = CqMacChannel::new(symbols(nx), symbols(ny), dim_c, dim_e, outputs).expect("test channel is valid");
    ChannelBundle {
        channel,
        p_x: FiniteDist::uniform(symbols(nx)).unwrap(),
        p_y: FiniteDist::uniform(symbols(ny)).unwrap(),
    }
}

fn random_probs(rng: &mut ChaCha8Rng, n: usize, zero_chance: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| if rng.gen::<f64>() < zero_chance { 0.0 } else { rng.gen::<f64>() })
            .collect();
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

// ---------------------------------------------------------------- criterion 1

/// `min Σ tᵢqᵢ` subject to `Σ tᵢpᵢ ≥ 1 − ε`, `0 ≤ t ≤ 1`, by greedy filling in
/// decreasing likelihood ratio. Returns `−log₂` of the optimum.
fn knapsack_oracle(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let mut items: Vec<(f64, f64)> = p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(a, b)| (*a, *b)).collect();
    items.sort_by(|a, b| (b.0 * a.1).partial_cmp(&(a.0 * b.1)).unwrap());
    let mut need = 1.0 - eps;
    let mut beta = 0.0;
    for (pi, qi) in items {
        if need <= 0.0 {
            break;
        }
        let take = (need / pi).min(1.0);
        beta += take * qi;
        need -= take * pi;
    }
    if beta == 0.0 {
        f64::INFINITY
    } else {
        -beta.log2()
    }
}

fn c1_hypo_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut infinite = 0;
    for inst in 0..500 {
        let n = rng.gen_range(2..=16);
        let p = random_probs(&mut rng, n, 0.2);
        let q = random_probs(&mut rng, n, 0.2);
        let eps = rng.gen_range(0.01..0.5);
        let expect = knapsack_oracle(&p, &q, eps);
        let mut rho = DensityMatrix::from_diagonal(vec![n], &p).map_err(e)?;
        let mut sigma = DensityMatrix::from_diagonal(vec![n], &q).map_err(e)?;
        // every other instance is rotated into a common non-diagonal basis
        if inst % 2 == 1 {
            let u = random::unitary(n, &mut rng);
            rho = rho.conjugate(&u).map_err(e)?;
            sigma = sigma.conjugate(&u).map_err(e)?;
        }
        let got = oneshot::d_hypo(&rho, &sigma, eps).map_err(e)?.value;
        match got {
            Bits::PlusInfinity => {
                ensure(expect.is_infinite(), || format!("instance {inst}: got +inf, oracle {expect}"))?;
                infinite += 1;
            }
            Bits::Finite(v) => {
                ensure(expect.is_finite(), || format!("instance {inst}: got {v}, oracle +inf"))?;
                worst = worst.max((v - expect).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("max error {worst:.3e} > 1e-9"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}, limit 10 s"))?;
    Ok(format!("500 instances ({infinite} infinite), max error {worst:.2e}"))
}

// ---------------------------------------------------------------- criterion 2

fn bloch_state(r: [f64; 3]) -> DensityMatrix {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 * (1.0 + r[2]), 0.0),
            Complex64::new(0.5 * r[0], -0.5 * r[1]),
            Complex64::new(0.5 * r[0], 0.5 * r[1]),
            Complex64::new(0.5 * (1.0 - r[2]), 0.0),
        ],
    );
    DensityMatrix::new(vec![2], m).expect("Bloch vector inside the ball")
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Purified distance between qubit states from their Bloch vectors.
fn bloch_purified(r: [f64; 3], s: [f64; 3]) -> f64 {
    let root = ((1.0 - dot(r, r)).max(0.0) * (1.0 - dot(s, s)).max(0.0)).sqrt();
    let f2 = 0.5 * (1.0 + dot(r, s) + root);
    (1.0 - f2).max(0.0).sqrt()
}

/// Largest root of `det(τ − λσ) = 0` for Bloch vectors `s` (τ) and `q` (σ).
fn bloch_dmax(s: [f64; 3], q: [f64; 3]) -> f64 {
    let det_t = (1.0 - dot(s, s)).max(0.0) / 4.0;
    let det_s = (1.0 - dot(q, q)) / 4.0;
    let b = (1.0 - dot(s, q)) / 2.0;
    let lam = (b + (b * b - 4.0 * det_t * det_s).max(0.0).sqrt()) / (2.0 * det_s);
    lam.log2().max(0.0)
}

/// Minimum of `D_max(τ‖σ)` over the purified-distance ball of radius `eps`
/// around `ρ`, searched over the ball boundary by direction.
fn ball_search(r: [f64; 3], q: [f64; 3], eps: f64) -> f64 {
    if bloch_purified(r, q) <= eps {
        return 0.0;
    }
    let point = |th: f64, ph: f64| -> [f64; 3] {
        let u = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        // largest step along u staying in the Bloch ball and the smoothing ball
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let s = [r[0] + mid * u[0], r[1] + mid * u[1], r[2] + mid * u[2]];
            if dot(s, s) <= 1.0 && bloch_purified(r, s) <= eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        [r[0] + lo * u[0], r[1] + lo * u[1], r[2] + lo * u[2]]
    };
    let f = |th: f64, ph: f64| bloch_dmax(point(th, ph), q);
    let (nt, np) = (60, 120);
    let mut cands: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..=nt {
        for j in 0..np {
            let th = std::f64::consts::PI * i as f64 / nt as f64;
            let ph = 2.0 * std::f64::consts::PI * j as f64 / np as f64;
            cands.push((f(th, ph), th, ph));
        }
    }
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best = cands[0].0;
    for &(v0, th0, ph0) in cands.iter().take(5) {
        let (mut v, mut th, mut ph) = (v0, th0, ph0);
        let mut step = 0.05;
        while step > 1e-9 {
            let mut moved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let c = f(th + dt, ph + dp);
                if c < v {
                    v = c;
                    th += dt;
                    ph += dp;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.min(v);
    }
    best
}

fn random_bloch(rng: &mut ChaCha8Rng, max_radius: f64) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if dot(v, v) <= max_radius * max_radius {
            return v;
        }
    }
}

fn c2_smooth_max() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let eps = 0.1;
    let eps_grid = [0.01, 0.05, 0.1, 0.2];
    let (mut worst, mut worst_limit) = (0.0f64, 0.0f64);
    for k in 0..50 {
        let r = random_bloch(&mut rng, 0.95);
        let q = random_bloch(&mut rng, 0.9);
        let (rho, sigma) = (bloch_state(r), bloch_state(q));
        let got = oneshot::d_max_smooth(&rho, &sigma, eps).map_err(e)?.value.as_f64();
        let expect = ball_search(r, q, eps);
        ensure((got - expect).abs() <= 5e-3, || format!("pair {k}: got {got}, oracle {expect}"))?;
        worst = worst.max((got - expect).abs());

        let values: Vec<f64> = eps_grid
            .iter()
            .map(|&x| oneshot::d_max_smooth(&rho, &sigma, x).map(|r| r.value.as_f64()))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        ensure(values.windows(2).all(|w| w[1] <= w[0]), || {
            format!("pair {k}: not non-increasing in eps: {values:?}")
        })?;

        let tiny = oneshot::d_max_smooth(&rho, &sigma, 1e-4).map_err(e)?.value.as_f64();
        let exact = oneshot::d_max(&rho, &sigma).map_err(e)?.as_f64();
        ensure((tiny - exact).abs() <= 1e-2, || format!("pair {k}: eps=1e-4 gives {tiny}, d_max {exact}"))?;
        worst_limit = worst_limit.max((tiny - exact).abs());
    }
    Ok(format!(
        "50 pairs, max oracle gap {worst:.2e}, monotone on {eps_grid:?}, max |eps→0 − d_max| {worst_limit:.2e}"
    ))
}

// ---------------------------------------------------------------- criterion 3

fn c3_chain_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut min_slack = f64::INFINITY;
    for k in 0..200 {
        let phi = random::cq_state(2, &[2, 2], &mut rng);
        let rep = oneshot::chain_rule_check(&phi, [&[0], &[1], &[2]], 0.1, 0.05).map_err(e)?;
        ensure(rep.slack >= -1e-2, || format!("state {k}: slack {}", rep.slack))?;
        min_slack = min_slack.min(rep.slack);
    }
    Ok(format!("200 states, min slack {min_slack:.3}"))
}

// ---------------------------------------------------------------- criterion 4

fn c4_split() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        let p = FiniteDist::new(symbols(n), random_probs(&mut rng, n, 0.15)).map_err(e)?;
        for i in 0..=100 {
            let theta = i as f64 / 100.0;
            let s = split_distribution(&p, theta).map_err(e)?;
            for (a, b) in s.pushforward().iter().zip(p.probs()) {
                worst = worst.max((a - b).abs());
            }
        }
        let point = FiniteDist::point_mass(symbols(n), 0).map_err(e)?;
        let s0 = split_distribution(&p, 0.0).map_err(e)?;
        let s1 = split_distribution(&p, 1.0).map_err(e)?;
        ensure(s0.p_u == point && s0.p_v == p, || "theta = 0 is not (point mass, p_x)".into())?;
        ensure(s1.p_u == p && s1.p_v == point, || "theta = 1 is not (p_x, point mass)".into())?;
    }
    ensure(worst <= 1e-10, || format!("max pushforward error {worst:.3e}"))?;
    Ok(format!("20 distributions x 101 thetas, max error {worst:.2e}, endpoints exact"))
}

// ---------------------------------------------------------------- criterion 5

fn c5_invariance() -> Outcome {
    let b = load("qubit_mac.json");
    let tol = ToleranceConfig::default();
    let cs = b.control_state().map_err(e)?;
    let dp = tol.delta_prime();
    let (rho, split) = cs.info_state(&[0, 1], &[], &[Output::E]).map_err(e)?;
    let imax_xy = oneshot::i_max_smooth(&rho, &split, dp).map_err(e)?;
    let ih_xy = regions::sum_rate_term(&cs, tol.eps).map_err(e)?;
    let (mut gap_max, mut gap_h) = (0.0f64, 0.0f64);
    for theta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let s = split_control_state(&cs, theta).map_err(e)?;
        let (rho, split) = s.info_state(&[0, 1, 2], &[], &[Output::E]).map_err(e)?;
        let imax = oneshot::i_max_smooth(&rho, &split, dp).map_err(e)?;
        let ih = regions::sum_rate_term(&s, tol.eps).map_err(e)?;
        ensure((imax - imax_xy).abs() <= 2e-2, || format!("theta {theta}: I_max {imax} vs {imax_xy}"))?;
        ensure((ih - ih_xy).abs() <= 1e-6, || format!("theta {theta}: I_H {ih} vs {ih_xy}"))?;
        gap_max = gap_max.max((imax - imax_xy).abs());
        gap_h = gap_h.max((ih - ih_xy).abs());
    }
    Ok(format!("I_max gap {gap_max:.2e} (value {imax_xy:.4}), I_H gap {gap_h:.2e} (value {ih_xy:.4})"))
}

// ---------------------------------------------------------------- criterion 6

/// Whether some `R₁₀ ∈ [0, R₁]` puts `(R₁₀, R₂, R₁ − R₁₀)` in the seven-halfspace region.
fn brute_force_member(r3: &regions::RateRegion3D, r1: f64, r2: f64, tol: f64) -> bool {
    let mut cands: Vec<f64> = (0..=400).map(|i| r1 * i as f64 / 400.0).collect();
    // breakpoints where a constraint on R₁₀ becomes tight
    for h in &r3.halfspaces {
        let coef = h.a[0] - h.a[2];
        if coef.abs() > 0.0 {
            cands.push((h.b - h.a[1] * r2 - h.a[2] * r1) / coef);
        }
    }
    cands
        .into_iter()
        .filter(|x| x.is_finite())
        .map(|x| x.clamp(0.0, r1))
        .any(|x| r3.contains([x, r2, r1 - x], tol))
}

fn min_slack(r: &RateRegion2D, p: [f64; 2]) -> f64 {
    r.halfspaces
        .iter()
        .map(|h| h.slack(p))
        .chain([p[0], p[1]])
        .fold(f64::INFINITY, f64::min)
}

fn c6_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // noisy classical 3x3 channel, C = |x⟩|y⟩ with uniform noise
    let classical = bundle(3, 3, 9, 1, |x, y| {
        let mut d = vec![0.2 / 9.0; 9];
        d[3 * x + y] += 0.8;
        diag(&d)
    });
    // binary inputs, random mixed ququart outputs on C
    let states: Vec<CMatrix> = (0..4).map(|_| random::density_matrix(&[4], &mut rng).into_entries()).collect();
    let random_q = bundle(2, 2, 4, 1, |x, y| states[2 * x + y].clone());
    let qubit = load("qubit_mac.json");
    let cases = [("classical 3x3", classical, 0.5), ("random ququart", random_q, 0.9), ("qubit_mac", qubit, 0.9)];

    let mut summary = Vec::new();
    for (name, b, eps) in cases {
        let cs = b.control_state().map_err(e)?;
        for theta in [0.3, 0.5] {
            let s = split_control_state(&cs, theta).map_err(e)?;
            let r3 = regions::decode_region_3(&s, eps).map_err(e)?;
            let r2 = regions::project_to_2d(&r3);
            let vmax = r2.vertices.iter().fold([0.0f64, 0.0f64], |m, v| [m[0].max(v[0]), m[1].max(v[1])]);
            ensure(vmax[0] > 0.0 && vmax[1] > 0.0, || format!("{name} theta {theta}: degenerate region {:?}", r2.vertices))?;
            let (mut disagree, mut boundary) = (0, 0);
            for i in 0..50 {
                for j in 0..50 {
                    let p = [1.1 * vmax[0] * i as f64 / 49.0, 1.1 * vmax[1] * j as f64 / 49.0];
                    let nine = r2.contains(p, 0.0);
                    let brute = brute_force_member(&r3, p[0], p[1], 1e-12);
                    if nine != brute {
                        if min_slack(&r2, p).abs() <= 1e-6 {
                            boundary += 1;
                        } else {
                            disagree += 1;
                        }
                    }
                }
            }
            ensure(disagree == 0, || format!("{name} theta {theta}: {disagree} disagreements"))?;
            summary.push(format!("{name}@{theta}: {} vertices, {boundary} boundary", r2.vertices.len()));
        }
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------- criterion 7

fn c7_covering() -> Outcome {
    let tol = ToleranceConfig {
        delta: 0.01,
        eps_prime: 0.005,
        ..ToleranceConfig::default()
    };
    let mut lines = Vec::new();
    let mut failures = 0;
    for file in ["qubit_mac.json", "xor_and.json"] {
        let cs = load(file).control_state().map_err(e)?;
        for senders in 1..=3 {
            let start = Instant::now();
            let state = match senders {
                1 => cs.marginal_labels(&[0]).map_err(e)?,
                2 => cs.clone(),
                _ => split_control_state(&cs, 0.5).map_err(e)?,
            };
            let logs = mc::covering_log_thresholds(&state, &tol).map_err(e)?;
            let sizes: Vec<u64> = logs.iter().map(|&l| mc::block_size_for(l)).collect();
            let rep = mc::covering_experiment(&state, &sizes, &tol, 200, 0, Some(logs)).map_err(e)?;
            let fast = start.elapsed() < Duration::from_secs(60);
            let ok = rep.pass && fast;
            if !ok {
                failures += 1;
            }
            lines.push(format!(
                "{file}/{senders}{}: {:.2e}+2*{:.1e} vs {:.2e}{}",
                if ok { "" } else { " FAILED" },
                rep.mean_deviation,
                rep.stderr.unwrap_or(0.0),
                rep.theoretical_bound,
                if fast { "" } else { " (over 60 s)" }
            ));
        }
    }
    let summary = lines.join("; ");
    if failures == 0 {
        Ok(summary)
    } else {
        Err(format!("{failures} variant(s) failed: {summary}"))
    }
}

// ---------------------------------------------------------------- criterion 8

fn c8_degenerate() -> Outcome {
    let tol = ToleranceConfig::default();
    let e_fixed = diag(&[0.7, 0.3]);
    // C noiseless, E independent of the inputs
    let e_indep = bundle(2, 2, 4, 2, |x, y| {
        let mut c = vec![0.0; 4];
        c[2 * x + y] = 1.0;
        kron(&diag(&c), &e_fixed)
    });
    let cs = e_indep.control_state().map_err(e)?;
    for theta in [0.0, 0.5, 1.0] {
        let t = regions::secrecy_thresholds(&split_control_state(&cs, theta).map_err(e)?, &tol).map_err(e)?;
        let terms = [t.i_max_u_e, t.i_max_y_ue, t.i_max_v_uye];
        ensure(terms.iter().all(|&v| v == 0.0), || format!("theta {theta}: I_max terms {terms:?}"))?;
    }
    for senders in 1..=3 {
        let state = match senders {
            1 => cs.marginal_labels(&[0]).map_err(e)?,
            2 => cs.clone(),
            _ => split_control_state(&cs, 0.5).map_err(e)?,
        };
        let sizes = vec![8u64; senders];
        let rep = mc::covering_experiment(&state, &sizes, &tol, 20, 0, None).map_err(e)?;
        ensure(rep.mean_deviation == 0.0 && rep.max_deviation == 0.0, || {
            format!("{senders} sender(s): deviation {} / {}", rep.mean_deviation, rep.max_deviation)
        })?;
    }

    // C independent of the inputs, E informative
    let c_indep = bundle(2, 2, 2, 4, |x, y| {
        let mut d = vec![0.0; 4];
        d[2 * x + y] = 1.0;
        kron(&diag(&[0.5, 0.5]), &diag(&d))
    });
    let cs = c_indep.control_state().map_err(e)?;
    let rs = regions::private_region_union(&cs, &tol, &regions::theta_grid(5)).map_err(e)?;
    ensure(rs.iter().all(|r| r.private.is_empty()), || "C-independent channel has a nonempty private region".into())?;
    Ok("E-independent: I_max terms 0 and covering deviation 0; C-independent: private region empty".into())
}

// ---------------------------------------------------------------- criterion 9

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `I(A:B)` from a joint table indexed by `(a, b)`.
fn classical_mi(joint: &[Vec<f64>]) -> f64 {
    let pa: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let pb: Vec<f64> = (0..joint[0].len()).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    shannon(&pa) + shannon(&pb) - shannon(&flat)
}

fn c9_asymptotic() -> Outcome {
    let b = load("xor_and.json");
    let cs = b.control_state().map_err(e)?;
    let asym = regions::asymptotic_region(&cs).map_err(e)?;

    // joint tables over (x, y, c, e) with c = x XOR y and e = x AND y
    let mut joint = vec![[[[0.0f64; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            joint[x][y][x ^ y][x & y] = 0.25;
        }
    }
    let table = |a: &dyn Fn(usize, usize, usize, usize) -> usize, na: usize, bf: &dyn Fn(usize, usize, usize, usize) -> usize, nb: usize| {
        let mut t = vec![vec![0.0; nb]; na];
        for x in 0..2 {
            for y in 0..2 {
                for c in 0..2 {
                    for ev in 0..2 {
                        t[a(x, y, c, ev)][bf(x, y, c, ev)] += joint[x][y][c][ev];
                    }
                }
            }
        }
        classical_mi(&t)
    };
    let expect = [
        table(&|x, _, _, _| x, 2, &|_, y, c, _| 2 * y + c, 4),
        table(&|_, y, _, _| y, 2, &|x, _, c, _| 2 * x + c, 4),
        table(&|x, y, _, _| 2 * x + y, 4, &|_, _, c, _| c, 2),
        table(&|x, _, _, _| x, 2, &|_, _, _, ev| ev, 2),
        table(&|_, y, _, _| y, 2, &|_, _, _, ev| ev, 2),
        table(&|x, y, _, _| 2 * x + y, 4, &|_, _, _, ev| ev, 2),
    ];
    let t = asym.terms;
    let got = [t.i_x_yc, t.i_y_xc, t.i_xy_c, t.i_x_e, t.i_y_e, t.i_xy_e];
    for (k, (g, x)) in got.iter().zip(&expect).enumerate() {
        ensure((g - x).abs() <= 1e-9, || format!("term {k}: {g} vs {x}"))?;
    }
    let bounds = [expect[0] - expect[3], expect[1] - expect[4], expect[2] - expect[5]];
    for (h, want) in asym.private.halfspaces.iter().zip(&bounds) {
        ensure((h.b - want).abs() <= 1e-9, || format!("private bound {} vs {want}", h.b))?;
    }

    let eps = ToleranceConfig::default().eps;
    let one = regions::sum_rate_term(&cs, eps).map_err(e)?;
    let two = regions::sum_rate_term(&cs.tensor_power(2).map_err(e)?, eps).map_err(e)? / 2.0;
    let target = expect[2];
    ensure((two - target).abs() < (one - target).abs(), || {
        format!("n=1 {one:.4}, n=2 {two:.4}, I(XY:C) {target:.4}: no movement toward the limit")
    })?;
    Ok(format!(
        "terms match Shannon arithmetic; I_H/n: n=1 {one:.4}, n=2 {two:.4} -> I(XY:C) {target:.4}"
    ))
}

// ---------------------------------------------------------------- criterion 10

fn cli(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_cqmac"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(e)?;
    ensure(status.status.code().is_some(), || "cqmac was killed".into())
}

fn c10_determinism() -> Outcome {
    let channel = shipped("qubit_mac.json");
    let ch = channel.to_str().unwrap();
    let runs: [(&str, Vec<&str>, &[&str]); 2] = [
        ("region", vec!["region", "--channel", ch], &["regions.csv", "report.json"]),
        ("run", vec!["run", "--channel", ch, "--seed", "11"], &["report.json"]),
    ];
    let mut checked = 0;
    for (name, args, files) in runs {
        let a = tempfile::tempdir().map_err(e)?;
        let b = tempfile::tempdir().map_err(e)?;
        cli(&args, a.path())?;
        cli(&args, b.path())?;
        for f in files {
            let x = std::fs::read(a.path().join(f)).map_err(|err| format!("{name}/{f}: {err}"))?;
            let y = std::fs::read(b.path().join(f)).map_err(|err| format!("{name}/{f}: {err}"))?;
            ensure(x == y, || format!("{name}/{f} differs between runs"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} output files byte-identical across repeated runs"))
}
