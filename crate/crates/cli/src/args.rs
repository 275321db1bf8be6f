use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "polarforge", version, about = "Polar and PAC code construction, analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Capacity, cutoff rate and Bhattacharyya parameter of a channel.
    Analyze(AnalyzeArgs),
    /// Choose a data index set and print it as JSON.
    Construct(ConstructArgs),
    /// Cumulative capacity and cutoff-rate profiles as CSV.
    Profile(ProfileArgs),
    /// Normal-approximation FER reference curve for the BIAWGN channel.
    Reference(ReferenceArgs),
    /// Monte-Carlo frame error rate simulation.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Channel, e.g. `bec:0.5`, `bsc:0.11`, `biawgn:snr_db=3`.
    pub channel: String,
    /// Also split a 2^m-ary erasure channel with the same erasure probability.
    #[arg(long, value_name = "M")]
    pub mec: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Exact recursion, BEC only.
    ExactBec,
    /// Genie-aided Monte-Carlo estimate.
    Mc,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Bit-channel statistics method; defaults to exact-bec on a BEC.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Monte-Carlo samples.
    #[arg(long, default_value_t = 100_000, value_parser = parse_count)]
    pub samples: u64,
    /// Monte-Carlo seed; falls back to POLARFORGE_SEED, then 1.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Design channel; not needed for the rm rule.
    pub channel: Option<String>,
    #[arg(short = 'N', long = "N", value_name = "N")]
    pub n: usize,
    #[arg(short = 'K', long = "K", value_name = "K")]
    pub k: usize,
    /// Score rule: rm, polar-z or polar-c.
    #[arg(long, default_value = "polar-z")]
    pub rule: String,
    #[command(flatten)]
    pub stats: StatsArgs,
    /// Write the bit-channel statistics as JSON to this file.
    #[arg(long, value_name = "FILE")]
    pub stats_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    pub channel: String,
    #[arg(short = 'N', long = "N", value_name = "N")]
    pub n: usize,
    #[command(flatten)]
    pub stats: StatsArgs,
    /// Write the CSV here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReferenceArgs {
    #[arg(short = 'N', long = "N", value_name = "N")]
    pub n: usize,
    #[arg(short = 'K', long = "K", value_name = "K")]
    pub k: usize,
    /// SNR grid in dB, `start:step:stop` (inclusive) or a single value.
    #[arg(long)]
    pub snr: String,
    /// Drop the ½·log2 N term.
    #[arg(long)]
    pub no_correction: bool,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    /// Channels: `biawgn` together with --snr, or explicit channel strings.
    pub channels: Vec<String>,
    /// Flat key-value TOML file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// SNR grid in dB for `biawgn`, `start:step:stop` inclusive.
    #[arg(long)]
    pub snr: Option<String>,
    /// polar-sc, polar-cascl or pac-fano.
    #[arg(long)]
    pub code: Option<String>,
    #[arg(short = 'N', long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Payload bits per frame.
    #[arg(short = 'K', long = "K", value_name = "K")]
    pub k: Option<usize>,
    /// rm, polar-z or polar-c.
    #[arg(long)]
    pub rule: Option<String>,
    /// Convolution taps, c0 first.
    #[arg(long)]
    pub conv: Option<String>,
    /// Fano metric bias: cutoff (1 − R0 of each bit-channel) or rate-profile.
    #[arg(long)]
    pub bias: Option<String>,
    /// Fano threshold step in bits.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fano forward-move budget per frame.
    #[arg(long, value_parser = parse_count)]
    pub max_visits: Option<u64>,
    /// List size for polar-cascl.
    #[arg(long)]
    pub list: Option<usize>,
    /// CRC width for polar-cascl (0 disables the CRC).
    #[arg(long)]
    pub crc: Option<u32>,
    #[arg(long, value_parser = parse_count)]
    pub min_errors: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    pub max_frames: Option<u64>,
    /// Master seed; falls back to POLARFORGE_SEED, then 1.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Monte-Carlo construction samples.
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<u64>,
    /// Fixed design channel for the construction (default: each point).
    #[arg(long)]
    pub design: Option<String>,
    /// Min-sum check-node approximation.
    #[arg(long)]
    pub min_sum: bool,
    /// Record wall-clock seconds in the output.
    #[arg(long)]
    pub timing: bool,
    /// Write CSV here plus a JSON mirror and a manifest next to it.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Non-negative integer, also accepting forms such as `1e7`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}
