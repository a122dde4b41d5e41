//! `onebit` command-line interface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use onebit_core::adaptive::{adapt_recover, Encoder, StopReason};
use onebit_core::decoders::{decode_l0_bruteforce, decode_l1, decode_logsum, LogSumConfig};
use onebit_core::model::{
    gen_deviation, gen_gaussian_matrix, gen_sparse_signal, measure, quantize,
    thresholds_from_deviation, DeviationSign, DeviationSpec, SparseSignal,
};
use onebit_core::{Real, RngStream};

use crate::config::{ConfigOverlay, DecoderKind, ExperimentConfig, ExperimentId};
use crate::csvio::{fmt_f64, opt_f64, Csv};
use crate::error::{HarnessError, Result};
use crate::experiments;
use crate::files;

#[derive(Parser)]
#[command(
    name = "onebit",
    about = "One-bit compressed sensing with designable quantization thresholds",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate signals, matrices, or deviation vectors as CSV
    #[command(subcommand)]
    Gen(GenWhat),
    /// Measure a signal and quantize it to one bit per measurement
    Encode(EncodeArgs),
    /// Recover a sparse signal from thresholds and bits
    Decode(DecodeArgs),
    /// Run the closed-loop adaptive quantization scheme
    Adapt(AdaptArgs),
    /// Run a Monte-Carlo experiment and emit CSV
    Experiment(ExperimentArgs),
    /// Re-run a single trial from the seed stored in its output row
    Replay(ReplayArgs),
}

#[derive(Subcommand)]
pub enum GenWhat {
    /// K-sparse signal with standard-normal coefficients (single CSV line)
    Signal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense standard-normal sensing matrix (one CSV line per row)
    Matrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deviation vector from `rademacher:<a>` or `gaussian:<sigma>`
    Deviation {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        dev: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub signal: PathBuf,
    /// Deviation distribution, e.g. `rademacher:0.001`
    #[arg(long)]
    pub dev: String,
    /// tau = y + delta (`plus`, default) or tau = y - delta (`minus`)
    #[arg(long, default_value = "plus")]
    pub offset: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long = "out-tau")]
    pub out_tau: PathBuf,
    #[arg(long = "out-bits")]
    pub out_bits: PathBuf,
    #[arg(long = "out-delta")]
    pub out_delta: Option<PathBuf>,
}

#[derive(Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub tau: PathBuf,
    #[arg(long)]
    pub bits: PathBuf,
    /// l1, logsum, or l0
    #[arg(long, default_value = "l1")]
    pub decoder: String,
    /// Sparsity cap for the l0 decoder
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long = "epsilon-smooth", default_value_t = 0.01)]
    pub epsilon_smooth: f64,
    #[arg(long = "max-outer", default_value_t = 10)]
    pub max_outer: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AdaptArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Ground-truth signal; the CLI simulates the encoder holding y = Ax
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub xi0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub decay: f64,
    #[arg(long, default_value_t = 0.01)]
    pub omega: f64,
    #[arg(long = "max-rounds", default_value_t = 12)]
    pub max_rounds: usize,
    #[arg(long, default_value = "gaussian:1.0")]
    pub dev: String,
    #[arg(long, default_value = "l1")]
    pub decoder: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// fig1 | fig2 | fig3 | fig5 | fig6 | theory | lemma1
    pub id: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub decoder: Option<String>,
    /// Use the reference protocol's trial counts (10^4 / 10^3)
    #[arg(long = "full-scale", default_value_t = false)]
    pub full_scale: bool,
}

#[derive(Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub experiment: String,
    /// Trial seed from the `seed` column of the original run
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub m: Option<usize>,
    /// Cell parameter (a, sigma, or xi0; k for lemma1)
    #[arg(long)]
    pub param: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_dev(s: &str) -> Result<DeviationSpec<Real>> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| HarnessError::config(format!("deviation must be kind:value, got {s:?}")))?;
    let value: f64 = value
        .parse()
        .map_err(|_| HarnessError::config(format!("bad deviation scale {value:?}")))?;
    match kind {
        "rademacher" => Ok(DeviationSpec::rademacher(value)?),
        "gaussian" => Ok(DeviationSpec::gaussian(value)?),
        other => Err(HarnessError::config(format!(
            "unknown deviation kind {other:?}"
        ))),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => files::write_text(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(what) => run_gen(what),
        Command::Encode(args) => run_encode(args),
        Command::Decode(args) => run_decode(args),
        Command::Adapt(args) => run_adapt(args),
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::Replay(args) => run_replay(args),
    }
}

fn run_gen(what: GenWhat) -> Result<()> {
    match what {
        GenWhat::Signal { n, k, seed, out } => {
            let mut rng = RngStream::from_seed(seed);
            let x = gen_sparse_signal::<Real>(n, k, &mut rng)?;
            emit(out.as_ref(), &files::vector_to_string(&x.dense()))
        }
        GenWhat::Matrix {
            rows,
            cols,
            seed,
            out,
        } => {
            let mut rng = RngStream::from_seed(seed);
            let a = gen_gaussian_matrix::<Real>(rows, cols, &mut rng)?;
            emit(out.as_ref(), &files::matrix_to_string(&a))
        }
        GenWhat::Deviation {
            len,
            dev,
            seed,
            out,
        } => {
            let spec = parse_dev(&dev)?;
            let mut rng = RngStream::from_seed(seed);
            let d = gen_deviation(&spec, len, &mut rng)?;
            emit(out.as_ref(), &files::vector_to_string(&d))
        }
    }
}

fn run_encode(args: EncodeArgs) -> Result<()> {
    let a = files::read_matrix(&args.matrix)?;
    let x_dense = files::read_vector(&args.signal)?;
    let x = SparseSignal::from_dense(&x_dense)?;
    let spec = parse_dev(&args.dev)?;
    let sign = match args.offset.as_str() {
        "plus" => DeviationSign::Plus,
        "minus" => DeviationSign::Minus,
        other => {
            return Err(HarnessError::config(format!(
                "offset must be plus|minus, got {other:?}"
            )))
        }
    };
    let mut rng = RngStream::from_seed(args.seed);
    let delta = gen_deviation(&spec, a.rows(), &mut rng)?;
    let y = measure(&a, &x)?;
    let tau = thresholds_from_deviation(&y, &delta, sign)?;
    let round = quantize(&y, &tau)?;
    files::write_text(&args.out_tau, &files::vector_to_string(&tau))?;
    files::write_text(&args.out_bits, &files::bits_to_string(&round.bits))?;
    if let Some(path) = &args.out_delta {
        files::write_text(path, &files::vector_to_string(&delta))?;
    }
    Ok(())
}

fn run_decode(args: DecodeArgs) -> Result<()> {
    let a = files::read_matrix(&args.matrix)?;
    let tau = files::read_vector(&args.tau)?;
    let bits = files::read_bits(&args.bits)?;
    let result = match args.decoder.as_str() {
        "l1" => decode_l1(&a, &tau, &bits)?,
        "logsum" => {
            let cfg = LogSumConfig {
                epsilon_smooth: args.epsilon_smooth,
                max_outer: args.max_outer,
                weight_floor: 0.0,
            };
            decode_logsum(&a, &tau, &bits, &cfg)?
        }
        "l0" => {
            let kmax = args
                .kmax
                .ok_or_else(|| HarnessError::config("--kmax is required for the l0 decoder"))?;
            decode_l0_bruteforce(&a, &tau, &bits, kmax)?
        }
        other => return Err(HarnessError::config(format!("unknown decoder {other:?}"))),
    };
    eprintln!(
        "objective={} outer_iterations={} consistent={}",
        fmt_f64(result.objective),
        result.outer_iterations,
        result.consistency_ok
    );
    emit(args.out.as_ref(), &files::vector_to_string(&result.xhat))
}

fn run_adapt(args: AdaptArgs) -> Result<()> {
    let a = files::read_matrix(&args.matrix)?;
    let x_dense = files::read_vector(&args.signal)?;
    let x = SparseSignal::from_dense(&x_dense)?;
    let y = measure(&a, &x)?;
    let mut enc = Encoder::new(y)?;
    let cfg = onebit_core::adaptive::AdaptiveConfig {
        xi0: args.xi0,
        decay: args.decay,
        omega: args.omega,
        max_rounds: args.max_rounds,
        deviation: parse_dev(&args.dev)?,
        decoder: match args.decoder.as_str() {
            "l1" => onebit_core::adaptive::DecoderChoice::L1,
            "logsum" => onebit_core::adaptive::DecoderChoice::LogSum(LogSumConfig::default()),
            other => return Err(HarnessError::config(format!("unknown decoder {other:?}"))),
        },
    };
    let mut rng = RngStream::from_seed(args.seed);
    let trace = adapt_recover(&mut enc, &a, &cfg, Some(&x), &mut rng).map_err(|abort| {
        HarnessError::AdaptiveAbort {
            round: abort.round,
            cause: abort.cause,
        }
    })?;
    let mut csv = Csv::new(&["round", "xi", "nmse", "l2_change", "stop_reason"]);
    let last = trace.rounds.len() - 1;
    for (i, r) in trace.rounds.iter().enumerate() {
        csv.row(&[
            r.round.to_string(),
            fmt_f64(r.xi),
            opt_f64(r.nmse),
            opt_f64(r.l2_change),
            if i == last {
                match trace.stop_reason {
                    StopReason::Tolerance => "tolerance".into(),
                    StopReason::MaxRounds => "max_rounds".into(),
                }
            } else {
                String::new()
            },
        ]);
    }
    emit(args.out.as_ref(), &csv.finish())
}

/// Resolve an experiment config from defaults, optional JSON overlay, and CLI
/// flags (in increasing precedence).
fn resolve_config(id: ExperimentId, args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default_for(id);
    if let Some(path) = &args.config {
        let overlay = ConfigOverlay::from_file(path)?;
        if let Some(file_id) = overlay.experiment {
            if file_id != id {
                return Err(HarnessError::config(format!(
                    "config file targets {} but the command names {}",
                    file_id.tag(),
                    id.tag()
                )));
            }
        }
        cfg = overlay.apply(cfg);
    }
    if args.full_scale {
        cfg = cfg.full_scale();
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    if let Some(d) = &args.decoder {
        cfg.decoder = DecoderKind::parse(d)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_experiment_cmd(args: ExperimentArgs) -> Result<()> {
    let id = ExperimentId::parse(&args.id)?;
    let cfg = resolve_config(id, &args)?;
    let csv = experiments::run_experiment(&cfg)?;
    if cfg.out.is_none() {
        std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| HarnessError::io("<stdout>", e))?;
    }
    Ok(())
}

fn run_replay(args: ReplayArgs) -> Result<()> {
    let id = ExperimentId::parse(&args.experiment)?;
    let mut cfg = ExperimentConfig::default_for(id);
    if let Some(path) = &args.config {
        cfg = ConfigOverlay::from_file(path)?.apply(cfg);
    }
    let m = args.m.unwrap_or(cfg.m_grid[0]);
    let param = args.param.unwrap_or(cfg.param_grid[0]);
    let csv = experiments::replay(&cfg, m, param, args.seed)?;
    std::io::stdout()
        .write_all(csv.as_bytes())
        .map_err(|e| HarnessError::io("<stdout>", e))
}
