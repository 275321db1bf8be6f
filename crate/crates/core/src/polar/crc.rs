use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Non-reflected CRC with zero initial value and zero final XOR, processed
/// bit-serially most-significant-bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    width: u32,
    /// Generator without its leading `x^width` term.
    poly: u64,
}

impl CrcSpec {
    pub fn new(width: u32, poly: u64) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::InvalidArgument(format!("CRC width {width} outside 1..=63")));
        }
        if poly >> width != 0 {
            return Err(Error::InvalidArgument(format!("CRC polynomial {poly:#x} wider than {width} bits")));
        }
        Ok(Self { width, poly })
    }

    /// x⁸ + x² + x + 1.
    pub fn crc8() -> Self {
        Self { width: 8, poly: 0x07 }
    }

    /// Default generator for a given width.
    pub fn with_width(width: u32) -> Result<Self> {
        match width {
            8 => Ok(Self::crc8()),
            // x^16 + x^12 + x^5 + 1
            16 => Self::new(16, 0x1021),
            // x^24 + x^23 + x^21 + x^20 + x^17 + x^15 + x^13 + x^12 + x^8 + x^4 + x^2 + x + 1
            24 => Self::new(24, 0xB2_B117),
            _ => Err(Error::Unsupported(format!("no default CRC polynomial for width {width}"))),
        }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Remainder of `bits(x) · x^width` modulo the generator, MSB first.
    pub fn remainder(&self, bits: &[u8]) -> Vec<u8> {
        let top = self.width - 1;
        let mask = (1u64 << self.width) - 1;
        let mut reg = 0u64;
        for &b in bits {
            let feedback = ((reg >> top) & 1) ^ (b as u64 & 1);
            reg = (reg << 1) & mask;
            if feedback == 1 {
                reg ^= self.poly;
            }
        }
        (0..self.width).rev().map(|s| ((reg >> s) & 1) as u8).collect()
    }

    /// `d` followed by its CRC bits.
    pub fn attach(&self, d: &[u8]) -> Vec<u8> {
        let mut out = d.to_vec();
        out.extend(self.remainder(d));
        out
    }

    /// Whether the trailing `width` bits are the CRC of the rest.
    pub fn check(&self, bits: &[u8]) -> Result<bool> {
        let w = self.width();
        if bits.len() < w {
            return Err(Error::LengthMismatch { expected: w, got: bits.len() });
        }
        let (payload, crc) = bits.split_at(bits.len() - w);
        Ok(self.remainder(payload) == crc)
    }
}

impl Default for CrcSpec {
    fn default() -> Self {
        Self::crc8()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
        bytes.iter().flat_map(|b| (0..8).rev().map(move |s| (b >> s) & 1)).collect()
    }

    /// Schoolbook polynomial long division over GF(2).
    fn long_division(bits: &[u8], width: usize, poly: u64) -> Vec<u8> {
        let mut generator = vec![1u8];
        generator.extend((0..width).rev().map(|s| ((poly >> s) & 1) as u8));
        let mut dividend = bits.to_vec();
        dividend.extend(std::iter::repeat_n(0, width));
        for i in 0..bits.len() {
            if dividend[i] == 1 {
                for (j, g) in generator.iter().enumerate() {
                    dividend[i + j] ^= g;
                }
            }
        }
        dividend[bits.len()..].to_vec()
    }

    #[test]
    fn check_value() {
        let crc = CrcSpec::crc8();
        let bits = bytes_to_bits(b"123456789");
        assert_eq!(crc.remainder(&bits), bytes_to_bits(&[0xF4]));
        assert_eq!(long_division(&bits, 8, 0x07), bytes_to_bits(&[0xF4]));
    }

    #[test]
    fn zero_payload_has_zero_crc() {
        for len in [0, 1, 7, 64] {
            let crc = CrcSpec::crc8();
            let out = crc.attach(&vec![0; len]);
            assert!(out.iter().all(|&b| b == 0));
            assert!(crc.check(&out).unwrap());
        }
    }

    #[test]
    fn matches_long_division() {
        let mut state = 0x1234_5678u32;
        for len in [1usize, 5, 13, 64, 100] {
            let bits: Vec<u8> = (0..len)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 17;
                    state ^= state << 5;
                    (state & 1) as u8
                })
                .collect();
            for spec in [CrcSpec::crc8(), CrcSpec::with_width(16).unwrap(), CrcSpec::with_width(24).unwrap()] {
                assert_eq!(spec.remainder(&bits), long_division(&bits, spec.width(), spec.poly()));
            }
        }
    }

    #[test]
    fn detects_every_single_bit_error() {
        let crc = CrcSpec::crc8();
        let payload: Vec<u8> = (0..64).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let word = crc.attach(&payload);
        assert!(crc.check(&word).unwrap());
        for pos in 0..word.len() {
            let mut bad = word.clone();
            bad[pos] ^= 1;
            assert!(!crc.check(&bad).unwrap(), "flip at {pos} undetected");
        }
    }

    #[test]
    fn short_input_is_an_error() {
        assert!(CrcSpec::crc8().check(&[0, 1, 0]).is_err());
        assert!(CrcSpec::new(8, 0x1FF).is_err());
        assert!(CrcSpec::with_width(5).is_err());
    }
}
