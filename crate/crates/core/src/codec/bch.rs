//! BCH codes protecting the format (15,5) and version (18,6) information.

use core::fmt;

/// Generator for the 15-bit format word.
pub const FORMAT_GENERATOR: u32 = 0x537;
/// XOR mask applied to every format word.
pub const FORMAT_MASK: u32 = 0x5412;
/// Generator for the 18-bit version word.
pub const VERSION_GENERATOR: u32 = 0x1F25;
/// Both information words are decoded up to this many bit flips.
pub const MAX_INFO_FLIPS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BchError {
    MaskOutOfRange(u8),
    VersionOutOfRange(u8),
    /// No valid word within the correction radius.
    Uncorrectable,
}

impl fmt::Display for BchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BchError::MaskOutOfRange(m) => write!(f, "mask id {m} outside 0..=7"),
            BchError::VersionOutOfRange(v) => write!(f, "version {v} carries no version word"),
            BchError::Uncorrectable => f.write_str("information word beyond correction radius"),
        }
    }
}

impl core::error::Error for BchError {}

fn remainder(data: u32, data_bits: u32, generator: u32) -> u32 {
    let gen_degree = 31 - generator.leading_zeros();
    let mut rem = data << gen_degree;
    for i in (0..data_bits).rev() {
        if rem & (1 << (i + gen_degree)) != 0 {
            rem ^= generator << i;
        }
    }
    rem
}

/// Format word for a 2-bit EC indicator and 3-bit mask id.
pub fn bch_encode_format(ec_bits: u8, mask_id: u8) -> Result<u16, BchError> {
    if mask_id > 7 {
        return Err(BchError::MaskOutOfRange(mask_id));
    }
    let data = (((ec_bits & 3) as u32) << 3) | mask_id as u32;
    Ok((((data << 10) | remainder(data, 5, FORMAT_GENERATOR)) ^ FORMAT_MASK) as u16)
}

/// Nearest valid format word within three bit flips, as (ec_bits, mask_id).
pub fn bch_decode_format(word: u16) -> Result<(u8, u8), BchError> {
    decode_format_with_distance(word).map(|(ec, mask, _)| (ec, mask))
}

/// Like [`bch_decode_format`], also returning the Hamming distance.
pub fn decode_format_with_distance(word: u16) -> Result<(u8, u8, u32), BchError> {
    let mut best: Option<(u8, u8, u32)> = None;
    for data in 0..32u8 {
        let (ec, mask) = (data >> 3, data & 7);
        let candidate = bch_encode_format(ec, mask).expect("mask in range");
        let dist = (candidate ^ word).count_ones();
        if best.is_none_or(|(_, _, d)| dist < d) {
            best = Some((ec, mask, dist));
        }
    }
    match best {
        Some(b) if b.2 <= MAX_INFO_FLIPS => Ok(b),
        _ => Err(BchError::Uncorrectable),
    }
}

/// 18-bit version word: 6 data bits above a 12-bit remainder.
pub fn bch_encode_version(version: u8) -> Result<u32, BchError> {
    if !(7..=40).contains(&version) {
        return Err(BchError::VersionOutOfRange(version));
    }
    let data = version as u32;
    Ok((data << 12) | remainder(data, 6, VERSION_GENERATOR))
}

/// Nearest version word (7..=40) within three bit flips.
pub fn bch_decode_version(word: u32) -> Result<u8, BchError> {
    let mut best: Option<(u8, u32)> = None;
    for v in 7..=40u8 {
        let dist = (bch_encode_version(v).expect("in range") ^ word).count_ones();
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((v, dist));
        }
    }
    match best {
        Some((v, d)) if d <= MAX_INFO_FLIPS => Ok(v),
        _ => Err(BchError::Uncorrectable),
    }
}
