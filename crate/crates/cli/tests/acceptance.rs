//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p polarforge-cli --test acceptance`; pass criterion
//! numbers as arguments to run a subset.

use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use polarforge::bmc::{ChannelModel, MecParams, LLR_MAX};
use polarforge::pac::{
    build_data_index_set, conv_encode, conv_invert, fano_decode, pac_encode, ConvSpec, FanoParams, PacSpec, RuleKind,
    ScoreRule,
};
use polarforge::polar::{encode, sc_decode, scl_decode, select_data_indices, union_bound, CrcSpec};
use polarforge::polarize::{bec_bit_channels, mc_bit_channels, polar_transform, polarization_fractions};
use polarforge::simkit::{dispersion_fer, parse_snr_grid, run_fer, CodeKind, SimConfig, SimRecord, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_polarforge");

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn all(parts: Vec<Check>) -> Self {
        Self {
            pass: parts.iter().all(|c| c.pass),
            detail: parts
                .iter()
                .map(|c| format!("{}{}", if c.pass { "" } else { "FAILED " }, c.detail))
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check::new(
        (value - target).abs() <= tol,
        format!("{name} = {value:.4} (target {target} ± {tol})"),
    )
}

fn polarforge(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(BIN).args(args).output().expect("run polarforge");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn bits(word: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((word >> i) & 1) as u8).collect()
}

fn random_bits(rng: &mut impl Rng, k: usize) -> Vec<u8> {
    (0..k).map(|_| rng.random::<bool>() as u8).collect()
}

fn perfect_llrs(x: &[u8]) -> Vec<f64> {
    x.iter().map(|&b| if b == 0 { LLR_MAX } else { -LLR_MAX }).collect()
}

fn c1_capacity() -> Check {
    let start = Instant::now();
    let (ok, out, err) = polarforge(&["analyze", "biawgn:snr_db=3", "--json"]);
    let elapsed = start.elapsed();
    if !ok {
        return Check::new(false, format!("analyze failed: {err}"));
    }
    let doc: serde_json::Value = serde_json::from_str(&out).expect("analyze JSON");
    let c = doc["capacity_bits"].as_f64().unwrap_or(f64::NAN);
    Check::all(vec![
        within("C(BIAWGN 3 dB)", c, 0.72, 0.005),
        Check::new(elapsed < Duration::from_secs(1), format!("runtime {:.3}s < 1s", elapsed.as_secs_f64())),
    ])
}

fn c2_profile_endpoints() -> Check {
    let (ok, out, err) = polarforge(&[
        "profile",
        "biawgn:snr_db=3",
        "-N",
        "128",
        "--method",
        "mc",
        "--samples",
        "100000",
        "--seed",
        "1",
    ]);
    if !ok {
        return Check::new(false, format!("profile failed: {err}"));
    }
    let last: Vec<f64> = out
        .lines()
        .last()
        .unwrap_or_default()
        .split(',')
        .map(|s| s.parse().unwrap_or(f64::NAN))
        .collect();
    if last.len() != 5 || last[0] != 128.0 {
        return Check::new(false, format!("unexpected final row {last:?}"));
    }
    Check::all(vec![
        within("sum R0(W_i)", last[2], 86.7, 0.5),
        within("N*R0(W)", last[4], 69.8, 0.2),
        within("[1-C(W)]*N", 128.0 - last[3], 35.8, 0.7),
    ])
}

fn pac_system() -> SystemConfig {
    let mut sys = SystemConfig::new(CodeKind::PacFano, 128, 64);
    sys.rule = RuleKind::ReedMuller;
    sys.conv = "1011011".parse().unwrap();
    sys
}

fn sweep(system: SystemConfig, snrs: &[f64], seed: u64) -> Vec<SimRecord> {
    run_fer(&SimConfig {
        points: snrs.iter().map(|&s| ChannelModel::biawgn_snr_db(s).unwrap()).collect(),
        system,
        min_errors: 100,
        max_frames: 10_000_000,
        seed,
        workers: None,
    })
    .expect("simulation runs")
}

fn c3_pac_band() -> Check {
    let grid = parse_snr_grid("0:0.25:5").unwrap();
    let band: Vec<(f64, f64)> = grid
        .iter()
        .map(|&s| (s, dispersion_fer(128, 64, &ChannelModel::biawgn_snr_db(s).unwrap(), true)))
        .filter(|&(_, r)| (1e-3..=1e-1).contains(&r))
        .collect();
    if band.is_empty() {
        return Check::new(false, "no SNR point with reference FER in [1e-3, 1e-1]");
    }
    let snrs: Vec<f64> = band.iter().map(|&(s, _)| s).collect();
    let records = sweep(pac_system(), &snrs, 2024);
    Check::all(
        band.iter()
            .zip(&records)
            .map(|(&(snr, reference), rec)| {
                let ratio = rec.fer / reference;
                Check::new(
                    rec.errors >= 100 && (1.0 / 3.0..=3.0).contains(&ratio),
                    format!("{snr} dB: FER {:.3e} vs ref {reference:.3e} (x{ratio:.2}, {} errors)", rec.fer, rec.errors),
                )
            })
            .collect(),
    )
}

fn c4_ordering() -> Check {
    let snrs = [1.5, 2.0, 2.5];
    let seed = 99;
    let pac = sweep(pac_system(), &snrs, seed);
    let mut scl = SystemConfig::new(CodeKind::PolarCaScl, 128, 64);
    scl.list_size = 32;
    scl.crc = Some(CrcSpec::crc8());
    let scl = sweep(scl, &snrs, seed);
    let sc = sweep(SystemConfig::new(CodeKind::PolarSc, 128, 64), &snrs, seed);
    let mut parts = Vec::new();
    for i in 0..snrs.len() {
        let (p, l, s) = (&pac[i], &scl[i], &sc[i]);
        if p.errors < 100 || l.errors < 100 || s.errors < 100 {
            continue;
        }
        parts.push(Check::new(
            p.fer < l.fer && l.fer < s.fer,
            format!("{} dB: PAC {:.2e} < CA-SCL {:.2e} < SC {:.2e}", snrs[i], p.fer, l.fer, s.fer),
        ));
    }
    if parts.is_empty() {
        return Check::new(false, "no SNR point with 100 errors for every system");
    }
    Check::all(parts)
}

fn c5_union_bound() -> Check {
    let mut parts = Vec::new();
    for eps in [0.3, 0.5] {
        for (n, k) in [(64usize, 32usize), (128, 64)] {
            let ch = ChannelModel::bec(eps).unwrap();
            let system = SystemConfig::new(CodeKind::PolarSc, n, k);
            let code = system.build(&ch, 5, 0).unwrap().code().clone();
            let bound = union_bound(&bec_bit_channels(eps, n).unwrap(), code.data_indices());
            let rec = &run_fer(&SimConfig {
                points: vec![ch],
                system,
                min_errors: u64::MAX,
                max_frames: 100_000,
                seed: 5,
                workers: None,
            })
            .unwrap()[0];
            let sigma = (rec.fer * (1.0 - rec.fer) / rec.frames as f64).sqrt();
            parts.push(Check::new(
                rec.frames >= 100_000 && rec.fer <= bound + 3.0 * sigma,
                format!("eps {eps} ({n},{k}): FER {:.4} <= bound {bound:.4} + 3σ", rec.fer),
            ));
        }
    }
    Check::all(parts)
}

fn kronecker_row_bit(i: usize, j: usize) -> u8 {
    (j & i == j) as u8
}

fn c6_oracles() -> Check {
    // (a) butterfly vs explicit F^{⊗n}
    let mut a = true;
    for len in [1usize, 2, 4, 8] {
        for word in 0..(1u64 << len) {
            let u = bits(word, len);
            let oracle: Vec<u8> = (0..len)
                .map(|j| (0..len).fold(0, |acc, i| acc ^ (u[i] & kronecker_row_bit(i, j))))
                .collect();
            a &= polar_transform(&u).unwrap() == oracle;
        }
    }
    // (b) BEC recursion vs erasure-pattern enumeration
    let mut b = true;
    for len in [2usize, 4, 8] {
        for eps in [0.2, 0.5, 0.9] {
            let exact = bec_bit_channels(eps, len).unwrap();
            let row = |w: u64| -> u64 {
                (0..len).filter(|&i| (w >> i) & 1 == 1).fold(0u64, |x, i| {
                    x ^ (0..len).filter(|&j| j & i == j).fold(0u64, |r, j| r | 1 << j)
                })
            };
            let mut z = vec![0.0; len];
            for pattern in 0u64..(1 << len) {
                let erased = pattern.count_ones() as i32;
                let p = eps.powi(erased) * (1.0 - eps).powi(len as i32 - erased);
                let seen = !pattern & ((1u64 << len) - 1);
                for (i, zi) in z.iter_mut().enumerate() {
                    let free = len - i - 1;
                    if (0u64..(1 << free)).any(|t| row((1 << i) | (t << (i + 1))) & seen == 0) {
                        *zi += p;
                    }
                }
            }
            b &= (0..len).all(|i| (z[i] - exact.bhattacharyya[i]).abs() < 1e-12);
        }
    }
    // (c) convolution vs upper-triangular Toeplitz product, c = (1,1,1)
    let conv = ConvSpec::new(vec![1, 1, 1]).unwrap();
    let mut c = true;
    for len in [1usize, 2, 4, 8] {
        for word in 0..(1u64 << len) {
            let v = bits(word, len);
            let oracle: Vec<u8> = (0..len)
                .map(|j| (0..len).fold(0, |acc, i| acc ^ (v[i] & (j >= i && j - i < 3) as u8)))
                .collect();
            c &= conv_encode(&v, &conv) == oracle;
        }
    }
    // (d) SCL with L = 1 vs SC on noisy frames
    let stats = mc_bit_channels(&ChannelModel::biawgn_snr_db(1.5).unwrap(), 128, 20_000, 3).unwrap();
    let spec = select_data_indices(&stats, 64).unwrap();
    let ch = ChannelModel::biawgn_snr_db(1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut d_ok = 0;
    for _ in 0..10_000 {
        let x = encode(&random_bits(&mut rng, 64), &spec).unwrap();
        let llrs: Vec<f64> = x.iter().map(|&bit| ch.transmit_llr(bit, &mut rng)).collect();
        d_ok += (scl_decode(&llrs, &spec, 1, None).unwrap() == sc_decode(&llrs, &spec).unwrap()) as usize;
    }
    Check::all(vec![
        Check::new(a, "(a) transform = Kronecker product, N <= 8 exhaustive"),
        Check::new(b, "(b) BEC recursion = erasure enumeration, N <= 8"),
        Check::new(c, "(c) conv_encode = Toeplitz product, N <= 8 exhaustive"),
        Check::new(d_ok == 10_000, format!("(d) SCL(L=1) = SC on {d_ok}/10000 frames")),
    ])
}

fn c7_polarization() -> Check {
    let stats = bec_bit_channels(0.5, 1 << 20).unwrap();
    let (hi, _, lo) = polarization_fractions(&stats, 0.01).unwrap();
    Check::all(vec![within("frac C > 0.99", hi, 0.5, 0.02), within("frac C < 0.01", lo, 0.5, 0.02)])
}

fn c8_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut involution = true;
    let mut linearity = true;
    for n in 1..=14 {
        let len = 1usize << n;
        for _ in 0..20 {
            let u = random_bits(&mut rng, len);
            let v = random_bits(&mut rng, len);
            let tu = polar_transform(&u).unwrap();
            involution &= polar_transform(&tu).unwrap() == u;
            let sum: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
            let tv = polar_transform(&v).unwrap();
            linearity &= polar_transform(&sum).unwrap() == tu.iter().zip(&tv).map(|(a, b)| a ^ b).collect::<Vec<_>>();
        }
    }
    let mut round_trips = true;
    for n in 2..=10 {
        let len = 1usize << n;
        let k = len / 2;
        let code = build_data_index_set(ScoreRule::ReedMuller, len, k).unwrap();
        let pac = PacSpec::new(code.clone(), ConvSpec::default(), FanoParams::default()).unwrap();
        for _ in 0..10 {
            let d = random_bits(&mut rng, k);
            round_trips &= sc_decode(&perfect_llrs(&encode(&d, &code).unwrap()), &code).unwrap() == d;
            round_trips &= fano_decode(&perfect_llrs(&pac_encode(&d, &pac).unwrap()), &pac).unwrap().data == d;
        }
    }
    let mut invert = true;
    for taps in ["1", "11", "111", "1011011", "1100000001"] {
        let conv: ConvSpec = taps.parse().unwrap();
        for len in [1usize, 7, 128, 1000] {
            let v = random_bits(&mut rng, len);
            invert &= conv_invert(&conv_encode(&v, &conv), &conv) == v;
        }
    }
    let mut conservation = true;
    for n in 0..=16 {
        for eps in [0.0, 0.1, 0.37, 0.5, 0.93, 1.0] {
            let s = bec_bit_channels(eps, 1 << n).unwrap();
            conservation &= (s.total_capacity() - (1usize << n) as f64 * (1.0 - eps)).abs() < 1e-9;
        }
    }
    let ascii: Vec<u8> = b"123456789".iter().flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1)).collect();
    let crc = CrcSpec::crc8().remainder(&ascii).iter().fold(0u8, |acc, &b| (acc << 1) | b);
    let mut margin = true;
    for m in 2..=12 {
        for i in 0..=100 {
            let eps = i as f64 / 100.0;
            let s = MecParams::new(m, eps).unwrap().split();
            let g = s.boost_margin(m);
            margin &= if i == 0 || i == 100 { g.abs() < 1e-12 } else { g > 0.0 };
            margin &= (s.c_m - m as f64 * s.c_1).abs() < 1e-12;
        }
    }
    Check::all(vec![
        Check::new(involution, "involution"),
        Check::new(linearity, "linearity"),
        Check::new(round_trips, "SC and PAC round trips"),
        Check::new(invert, "conv_invert round trip"),
        Check::new(conservation, "BEC capacity conservation"),
        Check::new(crc == 0xF4, format!("CRC-8 check value 0x{crc:02X}")),
        Check::new(margin, "MEC boost margin > 0 on (0,1), = 0 at endpoints"),
    ])
}

fn c9_determinism() -> Check {
    let dir = tempfile::tempdir().expect("temp dir");
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let (ok, _, err) = polarforge(&[
        "simulate", "biawgn", "--snr", "1:1:3", "--code", "pac-fano", "--rule", "rm", "-N", "64", "-K", "32",
        "--min-errors", "50", "--samples", "20000", "--seed", "31", "--workers", "1",
        "--out", first.to_str().unwrap(),
    ]);
    if !ok {
        return Check::new(false, format!("simulate failed: {err}"));
    }
    let manifest = first.with_extension("manifest.toml");
    let (ok, _, err) = polarforge(&[
        "simulate", "--config", manifest.to_str().unwrap(), "--workers", "3", "--out", second.to_str().unwrap(),
    ]);
    if !ok {
        return Check::new(false, format!("re-run from manifest failed: {err}"));
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    Check::new(a == b && !a.is_empty(), format!("re-run from manifest with 3 workers: {} bytes, identical = {}", a.len(), a == b))
}

type Criterion = (u32, &'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "BIAWGN capacity at 3 dB", Duration::from_secs(1), c1_capacity),
        (2, "profile endpoints at N = 128, 3 dB", Duration::from_secs(120), c2_profile_endpoints),
        (3, "PAC FER within x3 of the dispersion reference", Duration::from_secs(3600), c3_pac_band),
        (4, "FER ordering PAC < CA-SCL < SC", Duration::from_secs(3600), c4_ordering),
        (5, "SC FER below the union bound on the BEC", Duration::from_secs(300), c5_union_bound),
        (6, "oracle equivalence", Duration::from_secs(60), c6_oracles),
        (7, "BEC(0.5) polarization at N = 2^20", Duration::from_secs(10), c7_polarization),
        (8, "invariant suites", Duration::from_secs(60), c8_invariants),
        (9, "determinism across worker counts", Duration::from_secs(60), c9_determinism),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (id, name, budget, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let check = panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Check::new(false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = check.pass && in_time;
        println!(
            "{} criterion {id}: {name} [{:.1}s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { String::new() } else { format!(" > budget {}s", budget.as_secs()) },
            check.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
