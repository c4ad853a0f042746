use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scm::experiment::{
    execute, replay, ChannelSection, Command, ExperimentConfig, OutputSection, SweepSection,
};
use scm::signal_space::{min_hamming_distance, CodebookScheme, ConstellationKind, ScmVariant};
use scm::simulate::SchemeSpec;
use scm::{Error, Result};

/// Environment variable holding the default worker count.
const WORKERS_ENV: &str = "SCM_WORKERS";

#[derive(Parser)]
#[command(name = "scm", version, about = "Spatial coded modulation simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a spatial codebook with labels, weights and minimum distance.
    Codebook(CodebookArgs),
    /// Monte Carlo BER sweep.
    Ber(RunArgs),
    /// Monte Carlo capacity sweep.
    Capacity(RunArgs),
    /// Capacity lower bound and BER union bound.
    Bounds(RunArgs),
    /// SM(2) + QPSK symbol error rate conditioned on antenna detection.
    ConditionalSer(RunArgs),
    /// Re-run an experiment from its JSON sidecar.
    Replay {
        sidecar: String,
        /// Write to this CSV instead of the recorded path.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct CodebookArgs {
    #[arg(long, value_parser = parse_scheme)]
    scheme: CodebookScheme,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    w: Option<u32>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<ScmVariant>,
    /// Built-in table name or table file.
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment recipe.
    #[arg(long)]
    config: Option<String>,
    /// Output CSV; the sidecar is written next to it.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    min_trials: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    target_errors: Option<u64>,
    /// Fixed trial count (capacity, conditional-ser).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// CSI error variance.
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    n_rx: Option<usize>,
}

fn parse_scheme(s: &str) -> std::result::Result<CodebookScheme, String> {
    serde_json::from_value(serde_json::Value::String(s.to_lowercase()))
        .map_err(|_| format!("unknown scheme `{s}` (scm, sm, gsm, table)"))
}

fn parse_variant(s: &str) -> std::result::Result<ScmVariant, String> {
    serde_json::from_value(serde_json::Value::String(s.to_lowercase()))
        .map_err(|_| format!("unknown variant `{s}` (d3, d4)"))
}

fn workers(flag: Option<usize>) -> Result<usize> {
    if let Some(w) = flag {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v} is not a worker count"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn cmd_codebook(a: &CodebookArgs) -> Result<()> {
    let spec = SchemeSpec {
        codebook: a.scheme,
        m: a.m,
        k: a.k,
        w: a.w,
        variant: a.variant,
        table: a.table.clone(),
        ..SchemeSpec::sm(0, ConstellationKind::Psk, 2)
    };
    let cb = spec.codebook()?;
    println!("label codeword weight");
    for i in 0..cb.len() {
        println!("{} {} {}", cb.label_string(i), cb.codeword_string(i), cb.weight(i));
    }
    println!("dmin={}", min_hamming_distance(&cb)?);
    Ok(())
}

fn resolve(command: Command, a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        // Only the conditional-SER experiment is fully described by flags.
        None if command == Command::ConditionalSer => {
            let snr = a
                .snr
                .clone()
                .ok_or_else(|| Error::Config("--snr is required without --config".into()))?;
            ExperimentConfig {
                scheme: None,
                channel: ChannelSection::rayleigh(a.n_rx.unwrap_or(2)),
                sweep: SweepSection::new(snr),
                vary: None,
                output: None,
            }
        }
        None => return Err(Error::Config(format!("{} needs --config", command.name()))),
    };
    let s = &mut cfg.sweep;
    if let Some(v) = &a.snr {
        s.snr_db = v.clone();
    }
    if let Some(v) = a.seed {
        s.seed = v;
    }
    if let Some(v) = a.min_trials {
        s.min_trials = v;
    }
    if let Some(v) = a.max_trials {
        s.max_trials = v;
    }
    if let Some(v) = a.target_errors {
        s.target_bit_errors = v;
    }
    if let Some(v) = a.trials {
        s.trials = v;
    }
    if let Some(v) = a.quad_nodes {
        s.quad_nodes = v;
    }
    if let Some(v) = a.gamma2 {
        cfg.channel.gamma2 = v;
    }
    if let Some(v) = a.n_rx {
        cfg.channel.n_rx = v;
    }
    if let Some(out) = &a.out {
        cfg.output = Some(OutputSection { path: out.clone() });
    }
    Ok(cfg)
}

fn cmd_run(command: Command, a: &RunArgs) -> Result<()> {
    let cfg = resolve(command, a)?;
    cfg.validate(command)?;
    let path = execute(command, &cfg, workers(a.workers)?)?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Codebook(a) => cmd_codebook(a),
        Cmd::Ber(a) => cmd_run(Command::Ber, a),
        Cmd::Capacity(a) => cmd_run(Command::Capacity, a),
        Cmd::Bounds(a) => cmd_run(Command::Bounds, a),
        Cmd::ConditionalSer(a) => cmd_run(Command::ConditionalSer, a),
        Cmd::Replay { sidecar, out, workers: w } => {
            workers(*w).and_then(|w| replay(sidecar, out.as_deref(), w)).map(|p| println!("{}", p.display()))
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scm: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
