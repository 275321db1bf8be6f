use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use polarforge::bmc::{ChannelModel, MecParams};
use polarforge::pac::{build_data_index_set, RuleKind};
use polarforge::polar::{select_data_indices, CodeDocument};
use polarforge::polarize::{bec_bit_channels, mc_bit_channels, profiles, BitChannelStats};
use polarforge::simkit::{parse_snr_grid, records_to_csv, records_to_json, reference_csv, run_fer};
use serde_json::json;

use crate::args::{AnalyzeArgs, ConstructArgs, Method, ProfileArgs, ReferenceArgs, SimulateArgs, StatsArgs};
use crate::settings::{env_seed, FileConfig, Manifest};

fn parse_channel(s: &str) -> Result<ChannelModel> {
    Ok(s.parse::<ChannelModel>()?)
}

/// Writes `contents` to `path` via a temporary file so a failure never
/// leaves a partial file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let channel = parse_channel(&args.channel)?;
    let info = channel.info();
    let mec = match args.mec {
        Some(m) => {
            let ChannelModel::Bec { erasure } = channel else {
                bail!("--mec needs a BEC channel, got `{}`", args.channel);
            };
            let split = MecParams::new(m, erasure)?.split();
            Some((m, split, split.boost_margin(m)))
        }
        None => None,
    };
    let text = if args.json {
        let mut doc = json!({
            "channel": channel.to_string(),
            "capacity_bits": info.capacity_bits,
            "cutoff_rate_bits": info.cutoff_rate_bits,
            "bhattacharyya": info.bhattacharyya,
        });
        if let Some((m, split, margin)) = mec {
            doc["mec"] = json!({
                "m": m,
                "c_m": split.c_m,
                "r0_m": split.r0_m,
                "c_1": split.c_1,
                "r0_1": split.r0_1,
                "boost_margin": margin,
            });
        }
        serde_json::to_string_pretty(&doc)? + "\n"
    } else {
        let mut s = format!(
            "channel {channel}\nC  = {:.6}\nR0 = {:.6}\nZ  = {:.6}\n",
            info.capacity_bits, info.cutoff_rate_bits, info.bhattacharyya
        );
        if let Some((m, split, margin)) = mec {
            s += &format!(
                "MEC m={m}: C_m = {:.6}, R0_m = {:.6}, C_1 = {:.6}, R0_1 = {:.6}\nboost margin m*R0_1 - R0_m = {:.6}\n",
                split.c_m, split.r0_m, split.c_1, split.r0_1, margin
            );
        }
        s
    };
    emit(None, &text)
}

fn stats_seed(stats: &StatsArgs) -> Result<u64> {
    Ok(match stats.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(1),
    })
}

fn bit_channel_stats(channel: &ChannelModel, n: usize, stats: &StatsArgs) -> Result<BitChannelStats> {
    let method = match (stats.method, channel) {
        (Some(m), _) => m,
        (None, ChannelModel::Bec { .. }) => Method::ExactBec,
        (None, _) => bail!("channel `{channel}` needs a statistics method (--method mc)"),
    };
    Ok(match (method, channel) {
        (Method::ExactBec, ChannelModel::Bec { erasure }) => bec_bit_channels(*erasure, n)?,
        (Method::ExactBec, _) => bail!("--method exact-bec needs a BEC channel, got `{channel}`"),
        (Method::Mc, _) => mc_bit_channels(channel, n, stats.samples, stats_seed(stats)?)?,
    })
}

pub fn construct(args: &ConstructArgs) -> Result<()> {
    let rule: RuleKind = args.rule.parse()?;
    if args.k == 0 || args.k > args.n {
        bail!("K = {} must be between 1 and N = {}", args.k, args.n);
    }
    let (stats, channel) = match (&args.channel, rule) {
        (None, RuleKind::ReedMuller) => (None, None),
        (None, _) => bail!("rule {rule} needs a design channel"),
        (Some(c), _) => {
            let ch = parse_channel(c)?;
            let needs = rule.needs_stats() || args.stats_out.is_some();
            (needs.then(|| bit_channel_stats(&ch, args.n, &args.stats)).transpose()?, Some(ch))
        }
    };
    let spec = match (rule, &stats) {
        (RuleKind::PolarZ, Some(s)) => select_data_indices(s, args.k)?,
        (rule, s) => build_data_index_set(rule.score_rule(s.as_ref())?, args.n, args.k)?,
    };
    if let (Some(path), Some(s)) = (&args.stats_out, &stats) {
        let doc = s.to_document(channel.as_ref());
        write_atomic(path, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    }
    let doc = CodeDocument::new("polar", &spec);
    emit(None, &(serde_json::to_string(&doc)? + "\n"))
}

pub fn profile(args: &ProfileArgs) -> Result<()> {
    let channel = parse_channel(&args.channel)?;
    let stats = bit_channel_stats(&channel, args.n, &args.stats)?;
    emit(args.out.as_deref(), &profiles(&stats, &channel).to_csv())
}

pub fn reference(args: &ReferenceArgs) -> Result<()> {
    if args.k == 0 || args.k > args.n {
        bail!("K = {} must be between 1 and N = {}", args.k, args.n);
    }
    let grid = parse_snr_grid(&args.snr)?;
    emit(args.out.as_deref(), &reference_csv(args.n, args.k, &grid, !args.no_correction)?)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let manifest = Manifest::resolve(args, file)?;
    let config = manifest.sim_config()?;
    let records = run_fer(&config)?;
    let csv = records_to_csv(&records, manifest.timing);
    match &args.out {
        Some(path) => {
            let json = records_to_json(&records, manifest.timing) + "\n";
            write_atomic(&path.with_extension("manifest.toml"), &manifest.to_toml())?;
            write_atomic(&path.with_extension("json"), &json)?;
            write_atomic(path, &csv)
        }
        None => emit(None, &csv),
    }
}
