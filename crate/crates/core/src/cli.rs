//! `anytime-sim` command line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 config schema, 4 runtime.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bounds::{self, BoundsError, ChannelSpec, ThresholdReport};
use crate::code::{CodeError, CodeParams, Encoder, ToeplitzCode};
use crate::control::{self, ControlError, Metric, SimConfig};
use crate::decoder::{self, DecodeError, ReliabilityRun};
use crate::estimation::FeedbackMode;
use crate::gf2::BitVec;
use crate::rng;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Control(ControlError),
}

impl From<ControlError> for CliError {
    fn from(e: ControlError) -> Self {
        match e {
            ControlError::Config { .. } => CliError::Schema(e.to_string()),
            other => CliError::Control(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Schema(_) => EXIT_SCHEMA,
            _ => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "anytime-sim", version, about = "Anytime-reliable codes and control over the erasure channel")]
pub struct Cli {
    /// Master seed; overrides the seed in a config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print rate and exponent thresholds for a plant and channel.
    Bounds(BoundsArgs),
    /// Sample a code from the Toeplitz ensemble and write its file.
    SampleCode(CodeArgs),
    /// Encode a file of messages, one bit string per line.
    Encode(EncodeArgs),
    /// Run closed-loop trials from a JSON config.
    Simulate(SimulateArgs),
    /// Estimate the anytime error profile of a sampled code.
    Reliability(ReliabilityArgs),
    /// Run a code sweep from a JSON config.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Plant coefficients a_1,...,a_m.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a: Vec<f64>,
    /// Channel uses per time step.
    #[arg(long)]
    pub n: u32,
    /// Moment order of the stability notion.
    #[arg(long, default_value_t = 2.0)]
    pub moment: f64,
    /// Erasure probability of a BEC.
    #[arg(long, conflicts_with = "bsc")]
    pub bec: Option<f64>,
    /// Crossover probability of a BSC.
    #[arg(long)]
    pub bsc: Option<f64>,
    /// Density of the parity blocks.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Message bits per step for the code-existence check.
    #[arg(long)]
    pub k: Option<u32>,
    /// Also write bounds.csv to the output directory.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Code file written by `sample-code`.
    #[arg(long)]
    pub code: PathBuf,
    /// Message file: one k-character string of 0/1 per line.
    #[arg(long)]
    pub messages: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the number of trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Index of the sampled code.
    #[arg(long, default_value_t = 0)]
    pub code_index: usize,
}

#[derive(Debug, Args)]
pub struct ReliabilityArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 60)]
    pub horizon: usize,
    #[arg(long, default_value_t = 700)]
    pub trials: usize,
    /// Use this code file instead of sampling one.
    #[arg(long)]
    pub code: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override the number of codes.
    #[arg(long)]
    pub codes: Option<usize>,
    /// Override the number of trials per code.
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

/// Record of one invocation: inputs, seeds and checksums of every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub prng: String,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            tool: "anytime-sim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            prng: rng::PRNG_ID.into(),
            config,
            seeds: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

struct Output {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Output {
    fn new(dir: &Path, manifest: RunManifest) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.manifest.outputs.push(OutputEntry {
            file: name.into(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    fn finish(self) -> Result<PathBuf, CliError> {
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SimConfig, CliError> {
    let mut cfg = SimConfig::from_json(&read(path)?)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn push_report(out: &mut String, csv: &mut String, r: &ThresholdReport) {
    let _ = writeln!(out, "{r}");
    let _ = writeln!(
        csv,
        "{:?},{},{},{},{},{},{}",
        r.formula,
        r.n,
        r.moment,
        r.rate,
        r.rate_bound.map_or(String::new(), |b| b.to_string()),
        r.beta,
        r.k_min()
    );
}

/// Text report for the `bounds` subcommand.
pub fn bounds_report(args: &BoundsArgs) -> Result<(String, String), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let a = &args.a;
    let sr = bounds::spectral_report(a)?;
    let mut out = String::new();
    let mut csv = String::from("formula,n,moment,rate,rate_bound,beta,k_min\n");
    let _ = writeln!(out, "plant a = {a:?}, n = {}", args.n);
    let _ = writeln!(out, "  λ(F)  = {:.5}", sr.lambda);
    let _ = writeln!(out, "  λ(F̄)  = {:.5}", sr.lambda_abs);
    let _ = writeln!(out, "  Fujiwara K(f) = {:.5}", sr.fujiwara);
    let blind = bounds::cuboid_no_feedback(a, args.n, args.moment)?;
    push_report(&mut out, &mut csv, &blind);
    push_report(&mut out, &mut csv, &bounds::cuboid_feedback(a, args.n, args.moment)?);
    if a.len() >= 2 {
        push_report(&mut out, &mut csv, &bounds::ellipsoid_no_feedback(a, args.n, args.moment)?);
        push_report(&mut out, &mut csv, &bounds::ellipsoid_feedback(a, args.n, args.moment)?);
    }
    let mu: Vec<f64> = bounds::polynomial_roots(a)?
        .iter()
        .map(|z| z.norm().powf(1.0 / args.n as f64))
        .collect();
    let (r_star, b_star) = bounds::limiting_values(&mu);
    let _ = writeln!(
        out,
        "limiting values (|λ_i| = μ_i^n, moment 2)\n  R* = {:.6}  β* = {:.6}  (nR* = {:.4}, nβ* = {:.4})",
        r_star,
        b_star,
        r_star * args.n as f64,
        b_star * args.n as f64
    );
    let channel = match (args.bec, args.bsc) {
        (Some(e), _) => Some(ChannelSpec::bec(e)),
        (_, Some(e)) => Some(ChannelSpec::bsc(e)),
        _ => None,
    };
    if let Some(ch) = channel {
        ch.validate()?;
        let zeta = bounds::bhattacharyya(&ch);
        // Without --k, evaluate at the smallest rate the blind cuboid filter needs.
        let k = args.k.map_or(blind.k_min(), u64::from);
        let rate = (k as f64 / args.n as f64).min(1.0);
        let _ = writeln!(out, "channel {:?}({}), ζ = {:.6}", ch.kind, ch.epsilon, zeta);
        let mut code_rows = vec![bounds::toeplitz_thresholds(zeta, args.p, rate)?];
        if ch.kind == bounds::ChannelKind::Bsc {
            code_rows.push(bounds::bsc_thresholds(ch.epsilon, rate)?);
        }
        for t in code_rows {
            let _ = writeln!(
                out,
                "{} (p = {})\n  R_max = {:.6}  β_max(R = {:.4}) = {:.6}  (nβ_max = {:.4}){}",
                t.formula.label(),
                args.p,
                t.rate_max,
                t.rate,
                t.beta_max,
                t.beta_max * args.n as f64,
                if t.achievable { "" } else { "  [rate not achievable]" }
            );
        }
    }
    Ok((out, csv))
}

fn parse_messages(text: &str, k: usize) -> Result<Vec<BitVec>, CliError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            if l.len() != k || !l.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(CliError::Schema(format!(
                    "message {}: expected {k} characters of 0/1, got {l:?}",
                    i + 1
                )));
            }
            Ok(BitVec::from_bools(&l.bytes().map(|b| b == b'1').collect::<Vec<_>>()))
        })
        .collect()
}

fn bit_string(v: &BitVec) -> String {
    v.iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // A second initialization in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("value serializes")
}

pub fn execute(cli: Cli) -> Result<String, CliError> {
    set_threads(cli.threads)?;
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Bounds(args) => {
            let (text, csv) = bounds_report(&args)?;
            if args.csv {
                let mut out = Output::new(&out_dir, RunManifest::new("bounds", serde_json::json!({
                    "a": args.a, "n": args.n, "moment": args.moment,
                    "bec": args.bec, "bsc": args.bsc, "p": args.p, "k": args.k,
                })))?;
                out.write("bounds.csv", &csv)?;
                out.finish()?;
            }
            Ok(text)
        }
        Command::SampleCode(args) => {
            let seed = cli.seed.unwrap_or(0);
            let code = ToeplitzCode::sample(CodeParams::new(args.n, args.k, args.p, seed)?)?;
            let text = code.serialize()?;
            let mut out = Output::new(&out_dir, RunManifest::new("sample-code", serde_json::json!({
                "n": args.n, "k": args.k, "p": args.p,
            })))?;
            out.manifest.seeds.insert("code".into(), seed);
            out.write("code.txt", &text)?;
            out.finish()?;
            Ok(text)
        }
        Command::Encode(args) => {
            let code = ToeplitzCode::parse(&read(&args.code)?)?;
            let messages = parse_messages(&read(&args.messages)?, code.k())?;
            let mut enc = Encoder::new(code);
            let mut csv = String::from("t,message,codeword\n");
            for (t, m) in messages.iter().enumerate() {
                let c = enc.encode_step(m)?;
                let _ = writeln!(csv, "{},{},{}", t + 1, bit_string(m), bit_string(&c));
            }
            Ok(csv)
        }
        Command::Simulate(args) => {
            let mut cfg = load_config(&args.config, cli.seed)?;
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            cfg.validate()?;
            let (summary, runs) = control::run_trials(&cfg, args.code_index)?;
            let mut out = Output::new(&out_dir, RunManifest::new("simulate", to_value(&cfg)))?;
            out.manifest.seeds.insert("master".into(), cfg.seed);
            out.manifest.seeds.insert("code".into(), summary.code_seed);
            out.write("trajectory.csv", &runs[0].to_csv())?;
            let mut per_trial = String::from("trial,sup_abs,lqr_cost,desync_steps,max_delay\n");
            for (j, r) in runs.iter().enumerate() {
                let _ = writeln!(
                    per_trial,
                    "{j},{},{},{},{}",
                    r.sup_abs(),
                    control::lqr_cost(r),
                    r.desync.iter().filter(|&&d| d).count(),
                    r.d.iter().max().unwrap_or(&0)
                );
            }
            out.write("trials.csv", &per_trial)?;
            let metrics = format!(
                "code_seed,trials,horizon,sup_mean_abs,mean_sup_abs,lqr_cost,desync_rate,max_delay,violations\n{},{},{},{},{},{},{},{},{}\n",
                summary.code_seed,
                summary.trials,
                summary.horizon,
                summary.sup_mean_abs,
                summary.mean_sup_abs,
                summary.lqr_cost,
                summary.desync_rate,
                summary.max_delay,
                summary.violations
            );
            out.write("metrics.csv", &metrics)?;
            out.finish()?;
            Ok(format!(
                "code seed {}: {} trials, mean sup|x| = {:.3}, sup mean|x| = {:.3}, LQR cost = {:.3}, desync rate = {:.4}\n",
                summary.code_seed,
                summary.trials,
                summary.mean_sup_abs,
                summary.sup_mean_abs,
                summary.lqr_cost,
                summary.desync_rate
            ))
        }
        Command::Reliability(args) => {
            let master = cli.seed.unwrap_or(0);
            let params = match &args.code {
                Some(path) => ToeplitzCode::parse(&read(path)?)?.params().clone(),
                None => CodeParams::new(args.n, args.k, args.p, rng::derive_seed(master, "code/0"))?,
            };
            if !(0.0..=1.0).contains(&args.epsilon) {
                return Err(CliError::Usage("--epsilon must lie in [0, 1]".into()));
            }
            let run = ReliabilityRun {
                code: params.clone(),
                epsilon: args.epsilon,
                horizon: args.horizon,
                trials: args.trials,
                master_seed: master,
            };
            let curve = decoder::estimate_reliability(&run)?;
            let mut out = Output::new(&out_dir, RunManifest::new("reliability", serde_json::json!({
                "n": params.n, "k": params.k, "p": params.p, "epsilon": args.epsilon,
                "horizon": args.horizon, "trials": args.trials,
            })))?;
            out.manifest.seeds.insert("master".into(), master);
            out.manifest.seeds.insert("code".into(), params.seed);
            out.write("reliability.csv", &curve.to_csv())?;
            let mut delay = String::from("d,count\n");
            for (d, c) in curve.unresolved_delay.iter().enumerate() {
                let _ = writeln!(delay, "{d},{c}");
            }
            out.write("decoder_delay.csv", &delay)?;
            out.finish()?;
            let mut text = format!("{} pooled samples from {} trials\n", curve.samples, curve.trials);
            match curve.fit {
                Some(f) => {
                    let _ = writeln!(
                        text,
                        "log2 tail slope {:.4} per step (β ≈ {:.4} per channel use), η ≈ {:.3}, onset d_o = {}",
                        f.slope, f.beta_per_use, f.eta, f.onset
                    );
                }
                None if curve.tail_count(1) == 0 => text.push_str("no decoding errors observed\n"),
                None => {
                    let _ = writeln!(
                        text,
                        "{} samples in error, too few populated delays for a fit",
                        curve.tail_count(1)
                    );
                }
            }
            Ok(text)
        }
        Command::Sweep(args) => {
            let mut cfg = load_config(&args.config, cli.seed)?;
            if let Some(t) = args.trials {
                cfg.trials = t;
            }
            let mut sweep = cfg
                .sweep
                .clone()
                .ok_or_else(|| CliError::Schema("config has no `sweep` section".into()))?;
            if let Some(c) = args.codes {
                sweep.codes = c;
            }
            cfg.sweep = Some(sweep.clone());
            cfg.validate()?;
            let variants = if sweep.variants.is_empty() {
                vec![control::Variant {
                    bits: cfg.quantizer.bits,
                    delta: Some(cfg.quantizer.delta),
                }]
            } else {
                sweep.variants.clone()
            };
            let mut out = Output::new(&out_dir, RunManifest::new("sweep", to_value(&cfg)))?;
            out.manifest.seeds.insert("master".into(), cfg.seed);
            let mut text = String::new();
            let mut summary = String::from("bits,delta,codes,threshold,fraction_below,median\n");
            for v in &variants {
                let vc = cfg.with_variant(v);
                let result = control::run_code_sweep(&vc, sweep.codes, sweep.metric)?;
                out.write(&format!("sweep_k{}.csv", v.bits), &result.to_csv())?;
                out.write(&format!("cdf_k{}.csv", v.bits), &result.cdf_csv())?;
                let median = median(&result.rows.iter().map(|r| r.1).collect::<Vec<_>>());
                let _ = write!(text, "k = {}", v.bits);
                if vc.mode == FeedbackMode::NoFeedback {
                    let _ = write!(text, ", δ = {}", vc.quantizer.delta);
                }
                let _ = write!(text, ": median {} = {:.3}", metric_name(sweep.metric), median);
                for th in &sweep.thresholds {
                    let frac = result.fraction_below(*th);
                    let _ = write!(text, ", P(< {th}) = {frac:.3}");
                    let _ = writeln!(summary, "{},{},{},{th},{frac},{median}", v.bits, vc.quantizer.delta, sweep.codes);
                }
                if sweep.thresholds.is_empty() {
                    let _ = writeln!(summary, "{},{},{},,,{median}", v.bits, vc.quantizer.delta, sweep.codes);
                }
                text.push('\n');
            }
            out.write("sweep_summary.csv", &summary)?;
            out.finish()?;
            Ok(text)
        }
    }
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::MeanSupAbs => "mean sup|x|",
        Metric::SupMeanAbs => "sup mean|x|",
        Metric::LqrCost => "LQR cost",
    }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
