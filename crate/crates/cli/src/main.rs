//! `cqmac`: rate regions and Monte Carlo checks for private cq-MACs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use cqmac::channel::{load_channel, ChannelBundle, Output};
use cqmac::mc::{self, RunParams};
use cqmac::oneshot;
use cqmac::regions::{self, ToleranceConfig};
use cqmac::split::split_control_state;
use cqmac::{Error, ErrorClass};

const SCHEMA_VERSION: u32 = 1;
const DEFAULT_RUN_CAP_LOG: f64 = 12.0;

#[derive(Parser, Debug)]
#[command(name = "cqmac", version, about = "Private capacity regions of classical-quantum multiple-access channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a channel file.
    Validate(Common),
    /// Entropic quantities at one theta.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
    },
    /// Private region union over a theta grid.
    Region {
        #[command(flatten)]
        common: Common,
        /// Number of evenly spaced theta values on [0, 1].
        #[arg(long, default_value_t = 33)]
        theta_grid: usize,
    },
    /// Monte Carlo check of the covering bounds.
    Cover {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: McArgs,
        /// Number of senders (1, 2 or 3); all three when omitted.
        #[arg(long)]
        senders: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
    },
    /// End-to-end simulation of the private code at one theta.
    Run {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Alice's message count.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Bob's message count.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Channel description (JSON).
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.02)]
    eps_prime: f64,
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    /// Additive constant for the unspecified O(1) threshold terms.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c0: f64,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct McArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Block size for U (or X); defaults to the computed threshold.
    #[arg(long)]
    k1: Option<u64>,
    /// Block size for Y.
    #[arg(long)]
    k2: Option<u64>,
    /// Block size for V.
    #[arg(long)]
    k3: Option<u64>,
}

impl Common {
    fn tolerances(&self) -> ToleranceConfig {
        ToleranceConfig {
            eps: self.eps,
            delta: self.delta,
            eps_prime: self.eps_prime,
            gamma: self.gamma,
            c0: self.c0,
        }
    }

    fn load(&self) -> Result<ChannelBundle, Error> {
        let bundle = load_channel(&self.channel)?;
        self.tolerances().validate()?;
        Ok(bundle)
    }
}

/// A finished command: JSON for stdout and report files, plus pass/fail.
struct Outcome {
    report: Value,
    files: Vec<(&'static str, String)>,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("{}", error_json(&e));
        return ExitCode::from(exit_code(&e));
    }
    let out_dir = match &cli.command {
        Command::Validate(c) => c.out.clone(),
        Command::Entropy { common, .. }
        | Command::Region { common, .. }
        | Command::Cover { common, .. }
        | Command::Run { common, .. } => common.out.clone(),
    };
    let result = execute(&cli.command).and_then(|o| {
        if let Some(dir) = &out_dir {
            for (name, body) in &o.files {
                write_atomic(dir, name, body)?;
            }
        }
        Ok(o)
    });
    match result {
        Ok(o) => {
            // a closed pipe on stdout is not an error for the computation
            let _ = writeln!(std::io::stdout().lock(), "{}", pretty(&o.report).trim_end());
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("CQMAC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("CQMAC_THREADS={raw:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Parse => 2,
        ErrorClass::Validation => 3,
        ErrorClass::Numeric => 4,
    }
}

fn error_json(e: &Error) -> String {
    let class = match e.class() {
        ErrorClass::Parse => "parse",
        ErrorClass::Validation => "validation",
        ErrorClass::Numeric => "numeric",
    };
    json!({ "error": class, "message": e.to_string() }).to_string()
}

fn write_atomic(dir: &Path, name: &str, body: &str) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

fn envelope(command: &str, config: Value, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn execute(cmd: &Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Validate(c) => validate(c),
        Command::Entropy { common, theta } => entropy(common, *theta),
        Command::Region { common, theta_grid } => region(common, *theta_grid),
        Command::Cover {
            common,
            mc,
            senders,
            theta,
        } => cover(common, mc, *senders, *theta),
        Command::Run {
            common,
            mc,
            theta,
            m,
            n,
        } => run(common, mc, *theta, [*m, *n]),
    }
}

fn validate(c: &Common) -> Result<Outcome, Error> {
    let b = load_channel(&c.channel)?;
    let result = json!({
        "status": "ok",
        "x_alphabet": b.channel.x_alphabet(),
        "y_alphabet": b.channel.y_alphabet(),
        "p_x": b.p_x.probs(),
        "p_y": b.p_y.probs(),
        "dim_c": b.channel.dim_c(),
        "dim_e": b.channel.dim_e(),
    });
    let report = envelope("validate", json!({ "channel": c.channel }), result);
    Ok(Outcome {
        files: vec![("validate.json", pretty(&report))],
        report,
        pass: true,
    })
}

fn entropy(c: &Common, theta: f64) -> Result<Outcome, Error> {
    let b = c.load()?;
    let tol = c.tolerances();
    let cs = b.control_state()?;
    let split = split_control_state(&cs, theta)?;
    let decode = regions::decode_terms(&split, tol.eps)?;
    let thresholds = regions::secrecy_thresholds(&split, &tol)?;
    let asym = regions::asymptotic_region(&cs)?;
    let (rho, bip) = cs.info_state(&[0, 1], &[], &[Output::E])?;
    let i_max_xy_e = oneshot::i_max_smooth(&rho, &bip, tol.delta_prime())?;
    let result = json!({
        "theta": theta,
        "decode_terms": decode,
        "decode_offset": tol.decode_offset(),
        "secrecy_thresholds": thresholds,
        "i_max_xy_e": i_max_xy_e,
        "asymptotic": asym.terms,
    });
    let config = json!({ "tolerances": tol, "channel": c.channel, "theta": theta });
    let report = envelope("entropy", config, result);
    Ok(Outcome {
        files: vec![("entropy.json", pretty(&report))],
        report,
        pass: true,
    })
}

fn region(c: &Common, grid: usize) -> Result<Outcome, Error> {
    if grid == 0 {
        return Err(Error::InvalidArgument("--theta-grid must be positive".into()));
    }
    let b = c.load()?;
    let tol = c.tolerances();
    let cs = b.control_state()?;
    let thetas = regions::theta_grid(grid);
    let rs = regions::private_region_union(&cs, &tol, &thetas)?;
    let asym = regions::asymptotic_region(&cs)?;
    let csv = regions::regions_csv(&rs, Some(&asym));
    let per_theta: Vec<Value> = rs
        .iter()
        .map(|r| {
            json!({
                "theta": r.theta,
                "decode_terms": r.decode.terms,
                "thresholds": r.thresholds,
                "private_empty": r.private.is_empty(),
                "private_vertices": r.private.vertices,
            })
        })
        .collect();
    let nonempty = rs.iter().filter(|r| !r.private.is_empty()).count();
    let mut warnings = Vec::new();
    if nonempty == 0 {
        warnings.push("the one-shot private region is empty at every theta; block sizes dominate the decoding terms".to_string());
    }
    let result = json!({
        "theta_grid": thetas,
        "nonempty_thetas": nonempty,
        "regions": per_theta,
        "asymptotic": asym,
        "warnings": warnings,
    });
    let config = json!({ "tolerances": tol, "channel": c.channel, "theta_grid": grid });
    let report = envelope("region", config, result);
    Ok(Outcome {
        files: vec![("regions.csv", csv), ("report.json", pretty(&report))],
        report,
        pass: true,
    })
}

fn cover(c: &Common, m: &McArgs, senders: Option<usize>, theta: f64) -> Result<Outcome, Error> {
    let b = c.load()?;
    let tol = c.tolerances();
    let cs = b.control_state()?;
    let variants: Vec<usize> = match senders {
        Some(s @ 1..=3) => vec![s],
        Some(s) => return Err(Error::InvalidArgument(format!("--senders must be 1, 2 or 3, got {s}"))),
        None => vec![1, 2, 3],
    };
    let mut reports = Vec::new();
    for s in variants {
        let state = match s {
            1 => cs.marginal_labels(&[0])?,
            2 => cs.clone(),
            _ => split_control_state(&cs, theta)?,
        };
        let logs = mc::covering_log_thresholds(&state, &tol)?;
        let overrides: Vec<Option<u64>> = match s {
            1 => vec![m.k1],
            2 => vec![m.k1, m.k2],
            _ => vec![m.k1, m.k3, m.k2],
        };
        let sizes: Vec<u64> = logs
            .iter()
            .zip(&overrides)
            .map(|(l, o)| o.unwrap_or_else(|| mc::block_size_for(*l)))
            .collect();
        reports.push(mc::covering_experiment(&state, &sizes, &tol, m.trials, m.seed, Some(logs))?);
    }
    let pass = reports.iter().all(|r| r.pass);
    let config = json!({
        "tolerances": tol,
        "channel": c.channel,
        "theta": theta,
        "trials": m.trials,
        "seed": m.seed,
        "k1": m.k1, "k2": m.k2, "k3": m.k3,
        "rng": "ChaCha8, trial t seeded with seed + t",
    });
    let report = envelope("cover", config, json!({ "pass": pass, "variants": to_value(&reports) }));
    Ok(Outcome {
        files: vec![("report.json", pretty(&report))],
        report,
        pass,
    })
}

fn run(c: &Common, m: &McArgs, theta: f64, messages: [usize; 2]) -> Result<Outcome, Error> {
    let b = c.load()?;
    let tol = c.tolerances();
    let cs = b.control_state()?;
    let split = split_control_state(&cs, theta)?;
    let t = regions::secrecy_thresholds(&split, &tol)?;
    let capped = |l: f64| mc::block_size_for(l.min(DEFAULT_RUN_CAP_LOG)) as usize;
    let block_sizes = [
        m.k1.map_or_else(|| capped(t.log_k1), |k| k as usize),
        m.k2.map_or_else(|| capped(t.log_k2), |k| k as usize),
        m.k3.map_or_else(|| capped(t.log_k3), |k| k as usize),
    ];
    let params = RunParams {
        theta,
        messages,
        block_sizes,
        seed: m.seed,
    };
    let r = mc::end_to_end_run(&b, &tol, &params)?;
    let pass = r.secrecy_deviation_max <= r.targets.secrecy_40_delta_1_8
        && r.decode_error <= r.targets.decode_49_sqrt_eps;
    let config = json!({
        "tolerances": tol,
        "channel": c.channel,
        "theta": theta,
        "messages": messages,
        "seed": m.seed,
        "k1": m.k1, "k2": m.k2, "k3": m.k3,
        "rng": "ChaCha8, codebooks U, V, Y seeded with seed, seed + 1, seed + 2",
    });
    let report = envelope("run", config, json!({ "pass": pass, "run": to_value(&r) }));
    Ok(Outcome {
        files: vec![("report.json", pretty(&report))],
        report,
        pass,
    })
}
