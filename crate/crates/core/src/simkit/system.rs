use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::streams::{derive_seed, frame_stream, Stream};
use crate::bmc::ChannelModel;
use crate::pac::{
    build_data_index_set, pac_encode, Bias, BiasRule, ConvSpec, FanoDecoder, FanoParams, PacSpec, RuleKind,
};
use crate::polar::{encode, select_data_indices, CodeSpec, CrcSpec, ListDecoder, ScDecoder};
use crate::polarize::{bec_bit_channels, mc_bit_channels, BitChannelStats};
use crate::sc::CheckNode;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeKind {
    PolarSc,
    #[serde(rename = "polar-cascl")]
    PolarCaScl,
    PacFano,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::PolarSc => "polar-sc",
            CodeKind::PolarCaScl => "polar-cascl",
            CodeKind::PacFano => "pac-fano",
        })
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "polar-sc" => Ok(CodeKind::PolarSc),
            "polar-cascl" | "polar-scl" => Ok(CodeKind::PolarCaScl),
            "pac-fano" | "pac" => Ok(CodeKind::PacFano),
            other => Err(Error::parse(other, "expected polar-sc, polar-cascl or pac-fano")),
        }
    }
}

/// Everything needed to build a coding system for one channel point.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub kind: CodeKind,
    pub n: usize,
    /// Payload bits per frame (CRC bits come on top for CA-SCL).
    pub k: usize,
    pub rule: RuleKind,
    pub conv: ConvSpec,
    /// Fano parameters; the bias is replaced according to `bias`.
    pub fano: FanoParams,
    pub bias: BiasRule,
    pub list_size: usize,
    pub crc: Option<CrcSpec>,
    pub check: CheckNode,
    /// Channel the code is designed for; `None` designs for each point.
    pub design: Option<ChannelModel>,
    /// Monte-Carlo construction samples for non-BEC design channels.
    pub construction_samples: u64,
}

impl SystemConfig {
    pub fn new(kind: CodeKind, n: usize, k: usize) -> Self {
        Self {
            kind,
            n,
            k,
            rule: match kind {
                CodeKind::PacFano => RuleKind::ReedMuller,
                _ => RuleKind::PolarZ,
            },
            conv: ConvSpec::default(),
            fano: FanoParams::default(),
            bias: BiasRule::default(),
            list_size: 32,
            crc: (kind == CodeKind::PolarCaScl).then(CrcSpec::crc8),
            check: CheckNode::Exact,
            design: None,
            construction_samples: 100_000,
        }
    }

    /// Dimension of the polar code actually built.
    pub fn carrier_k(&self) -> usize {
        match (self.kind, &self.crc) {
            (CodeKind::PolarCaScl, Some(c)) => self.k + c.width(),
            _ => self.k,
        }
    }

    /// Bit-channel statistics for a design channel; exact for the BEC,
    /// Monte-Carlo otherwise.
    pub fn design_stats(&self, design: &ChannelModel, seed: u64) -> Result<BitChannelStats> {
        match *design {
            ChannelModel::Bec { erasure } => bec_bit_channels(erasure, self.n),
            _ => mc_bit_channels(design, self.n, self.construction_samples, seed),
        }
    }

    /// Builds the system for the channel at sweep index `point`.
    pub fn build(&self, channel: &ChannelModel, seed: u64, point: u64) -> Result<System> {
        let carrier = self.carrier_k();
        if self.k == 0 || carrier > self.n {
            return Err(Error::DimensionOutOfRange { k: carrier, n: self.n });
        }
        let pac_needs_stats = self.kind == CodeKind::PacFano && self.bias == BiasRule::Cutoff;
        let stats = if self.rule.needs_stats() || pac_needs_stats {
            let (design, design_point) = match &self.design {
                Some(d) => (d, 0),
                None => (channel, point),
            };
            Some(self.design_stats(design, derive_seed(seed, design_point, Stream::Construction))?)
        } else {
            None
        };
        let code = match (self.kind, self.rule, &stats) {
            (CodeKind::PacFano, rule, stats) => build_data_index_set(rule.score_rule(stats.as_ref())?, self.n, carrier)?,
            (_, RuleKind::PolarZ, Some(stats)) => select_data_indices(stats, carrier)?,
            (_, rule, stats) => build_data_index_set(rule.score_rule(stats.as_ref())?, self.n, carrier)?,
        };
        let crc = match self.kind {
            CodeKind::PolarCaScl => self.crc,
            _ => None,
        };
        let pac = match self.kind {
            CodeKind::PacFano => {
                let mut fano = self.fano.clone();
                fano.bias = match (self.bias, &stats) {
                    (BiasRule::Cutoff, Some(s)) => Bias::cutoff_rate(s),
                    _ => Bias::RateProfile,
                };
                Some(PacSpec::new(code.clone(), self.conv.clone(), fano)?)
            }
            _ => None,
        };
        if self.kind == CodeKind::PolarCaScl && self.list_size == 0 {
            return Err(Error::InvalidArgument("list size must be at least 1".into()));
        }
        Ok(System {
            kind: self.kind,
            k: self.k,
            code,
            crc,
            pac,
            list_size: self.list_size,
            check: self.check,
        })
    }
}

/// A concrete encoder/decoder pair for one channel point.
#[derive(Debug, Clone)]
pub struct System {
    kind: CodeKind,
    k: usize,
    code: CodeSpec,
    crc: Option<CrcSpec>,
    pac: Option<PacSpec>,
    list_size: usize,
    check: CheckNode,
}

/// Per-worker decoder state.
#[allow(clippy::large_enum_variant)]
#[derive(Debug)]
pub enum FrameDecoder {
    Sc(ScDecoder),
    List(ListDecoder),
    Fano(FanoDecoder),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub error: bool,
    /// Forward moves, sequential decoding only.
    pub visits: Option<u64>,
    pub exhausted: bool,
}

impl System {
    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    pub fn pac(&self) -> Option<&PacSpec> {
        self.pac.as_ref()
    }

    pub fn payload_bits(&self) -> usize {
        self.k
    }

    pub fn decoder(&self) -> Result<FrameDecoder> {
        Ok(match (&self.pac, self.kind) {
            (Some(pac), _) => FrameDecoder::Fano(FanoDecoder::new(pac.clone(), self.check)),
            (None, CodeKind::PolarCaScl) => FrameDecoder::List(ListDecoder::new(
                self.code.clone(),
                self.list_size,
                self.crc,
                self.check,
            )?),
            (None, _) => FrameDecoder::Sc(ScDecoder::new(self.code.clone(), self.check)),
        })
    }

    /// Codeword for payload `d`.
    pub fn encode(&self, d: &[u8]) -> Result<Vec<u8>> {
        match (&self.pac, &self.crc) {
            (Some(pac), _) => pac_encode(d, pac),
            (None, Some(crc)) => encode(&crc.attach(d), &self.code),
            (None, None) => encode(d, &self.code),
        }
    }

    /// Payload estimate and decoder statistics for channel LLRs.
    pub fn decode(&self, decoder: &mut FrameDecoder, llrs: &[f64]) -> Result<(Vec<u8>, Option<u64>, bool)> {
        match decoder {
            FrameDecoder::Sc(dec) => Ok((dec.decode(llrs)?, None, false)),
            FrameDecoder::List(dec) => {
                let mut bits = dec.decode(llrs)?;
                bits.truncate(self.k);
                Ok((bits, None, false))
            }
            FrameDecoder::Fano(dec) => {
                let out = dec.decode(llrs)?;
                Ok((out.data, Some(out.visits), out.exhausted))
            }
        }
    }

    /// Simulates frame `frame` of sweep point `point`. The payload and the
    /// channel noise come from separate substreams, and every system of the
    /// same length consumes noise identically, so different systems run
    /// with the same seed see the same noise realisations.
    pub fn run_frame(
        &self,
        decoder: &mut FrameDecoder,
        channel: &ChannelModel,
        seed: u64,
        point: u64,
        frame: u64,
    ) -> Result<FrameOutcome> {
        let mut data_rng = frame_stream(seed, point, frame, Stream::Data);
        let d: Vec<u8> = (0..self.k).map(|_| data_rng.random::<bool>() as u8).collect();
        let x = self.encode(&d)?;
        let mut noise = frame_stream(seed, point, frame, Stream::Noise);
        let llrs: Vec<f64> = x.iter().map(|&b| channel.transmit_llr(b, &mut noise)).collect();
        let (d_hat, visits, exhausted) = self.decode(decoder, &llrs)?;
        Ok(FrameOutcome {
            error: exhausted || d_hat != d,
            visits,
            exhausted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for k in [CodeKind::PolarSc, CodeKind::PolarCaScl, CodeKind::PacFano] {
            assert_eq!(k.to_string().parse::<CodeKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{k}\""));
        }
        assert!("ldpc".parse::<CodeKind>().is_err());
    }

    #[test]
    fn carrier_dimension_includes_crc() {
        let cfg = SystemConfig::new(CodeKind::PolarCaScl, 128, 64);
        assert_eq!(cfg.carrier_k(), 72);
        let sys = cfg.build(&ChannelModel::bec(0.3).unwrap(), 1, 0).unwrap();
        assert_eq!(sys.code().k(), 72);
        assert_eq!(sys.payload_bits(), 64);
        let too_big = SystemConfig::new(CodeKind::PolarCaScl, 64, 60);
        assert!(too_big.build(&ChannelModel::bec(0.3).unwrap(), 1, 0).is_err());
    }

    #[test]
    fn noiseless_frames_decode() {
        let ch = ChannelModel::bsc(0.0).unwrap();
        for kind in [CodeKind::PolarSc, CodeKind::PolarCaScl, CodeKind::PacFano] {
            let mut cfg = SystemConfig::new(kind, 64, 24);
            cfg.design = Some(ChannelModel::bec(0.5).unwrap());
            cfg.list_size = 4;
            let sys = cfg.build(&ch, 3, 0).unwrap();
            let mut dec = sys.decoder().unwrap();
            for frame in 0..5 {
                let out = sys.run_frame(&mut dec, &ch, 3, 0, frame).unwrap();
                assert!(!out.error, "{kind}");
                assert_eq!(out.visits.is_some(), kind == CodeKind::PacFano);
            }
        }
    }

    #[test]
    fn fixed_design_ignores_point() {
        let mut cfg = SystemConfig::new(CodeKind::PolarSc, 64, 32);
        cfg.design = Some(ChannelModel::biawgn_snr_db(2.0).unwrap());
        cfg.construction_samples = 2000;
        let a = cfg.build(&ChannelModel::biawgn_snr_db(1.0).unwrap(), 9, 0).unwrap();
        let b = cfg.build(&ChannelModel::biawgn_snr_db(3.0).unwrap(), 9, 4).unwrap();
        assert_eq!(a.code(), b.code());
    }
}
