use alloc::vec::Vec;
use core::fmt;

use super::bitmap::Bitmap;
use super::grid::GridModel;
use crate::codec::bch::decode_format_with_distance;
use crate::codec::{bch_decode_version, rs_decode_with_limit};
use crate::qr::encode::{MODE_BYTE, PAD_BYTES};
use crate::qr::matrix::{format_positions_primary, format_positions_secondary, version_positions};
use crate::qr::{
    deinterleave, extract_codewords, function_template, mask_bit, symbol_spec, EcLevel, ModuleMatrix, SymbolSpec,
};

/// Where a decode attempt stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureStage {
    Format,
    Rs,
    Structure,
}

impl FailureStage {
    pub const ALL: [FailureStage; 3] = [FailureStage::Format, FailureStage::Rs, FailureStage::Structure];

    pub fn name(self) -> &'static str {
        match self {
            FailureStage::Format => "format",
            FailureStage::Rs => "rs",
            FailureStage::Structure => "structure",
        }
    }
}

impl fmt::Display for FailureStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub payload: Vec<u8>,
    pub version: u8,
    pub ec: EcLevel,
    pub mask_id: u8,
    pub errors_corrected: usize,
}

/// Samples every module of the grid.
pub fn sample_matrix(binary: &Bitmap, g: &GridModel) -> ModuleMatrix {
    let side = g.side;
    let mut modules = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            modules.push(g.sample(binary, x as i32, y as i32));
        }
    }
    ModuleMatrix::from_parts(side, modules, alloc::vec![false; side * side])
}

fn read_word(m: &ModuleMatrix, positions: &[(usize, usize)]) -> u32 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &(x, y))| acc | ((m.get(x, y) as u32) << i))
}

/// Decodes the format word, preferring whichever copy is closer to a
/// codeword.
fn read_format(m: &ModuleMatrix) -> Option<(EcLevel, u8)> {
    [
        read_word(m, &format_positions_primary()),
        read_word(m, &format_positions_secondary(m.side())),
    ]
    .iter()
    .filter_map(|&w| decode_format_with_distance(w as u16).ok())
    .min_by_key(|&(_, _, d)| d)
    .map(|(ec, mask, _)| (EcLevel::from_format_bits(ec), mask))
}

fn version_ok(m: &ModuleMatrix, version: u8) -> bool {
    if version < 7 {
        return true;
    }
    let side = m.side();
    let (a, b): (Vec<_>, Vec<_>) = (0..18).map(|i| version_positions(side, i)).unzip();
    [read_word(m, &a), read_word(m, &b)]
        .iter()
        .any(|&w| bch_decode_version(w) == Ok(version))
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn remaining(&self) -> usize {
        self.bytes.len() * 8 - self.pos
    }

    fn read(&mut self, n: usize) -> u32 {
        let mut v = 0;
        for _ in 0..n {
            let bit = (self.bytes[self.pos >> 3] >> (7 - (self.pos & 7))) & 1;
            v = (v << 1) | bit as u32;
            self.pos += 1;
        }
        v
    }
}

/// Parses one byte-mode segment and insists on a clean terminator, zero
/// bit padding and the alternating pad codewords.
pub fn parse_data(data: &[u8], spec: &SymbolSpec) -> Option<Vec<u8>> {
    let mut r = BitReader { bytes: data, pos: 0 };
    let count_bits = spec.version.byte_count_bits();
    if r.remaining() < 4 + count_bits || r.read(4) != MODE_BYTE {
        return None;
    }
    let len = r.read(count_bits) as usize;
    if len > spec.byte_capacity() || r.remaining() < 8 * len {
        return None;
    }
    let payload: Vec<u8> = (0..len).map(|_| r.read(8) as u8).collect();
    let term = r.remaining().min(4);
    if r.read(term) != 0 {
        return None;
    }
    let align = (8 - r.pos % 8) % 8;
    if r.read(align) != 0 {
        return None;
    }
    let pads = &data[r.pos / 8..];
    pads.iter()
        .zip(PAD_BYTES.iter().cycle())
        .all(|(a, b)| a == b)
        .then_some(payload)
}

/// Reads a symbol of `est_version` through grid `g`.
pub fn decode_grid(binary: &Bitmap, g: &GridModel, est_version: u8) -> Result<Decoded, FailureStage> {
    let m = sample_matrix(binary, g);
    decode_matrix(&m, est_version)
}

/// Decodes an already sampled module matrix.
pub fn decode_matrix(m: &ModuleMatrix, version: u8) -> Result<Decoded, FailureStage> {
    let (ec, mask_id) = read_format(m).ok_or(FailureStage::Format)?;
    if !version_ok(m, version) {
        return Err(FailureStage::Format);
    }
    let spec = symbol_spec(version, ec).map_err(|_| FailureStage::Format)?;
    if spec.side != m.side() {
        return Err(FailureStage::Format);
    }
    let template = function_template(&spec);
    let mut unmasked = m.clone();
    for y in 0..spec.side {
        for x in 0..spec.side {
            if !template.is_function(x, y) && mask_bit(mask_id, x, y) {
                unmasked.set(x, y, !m.get(x, y));
            }
        }
    }
    let codewords = extract_codewords(&unmasked, &template, spec.total_codewords);
    let mut data = Vec::with_capacity(spec.data_codewords());
    let mut errors_corrected = 0;
    for block in deinterleave(&codewords, &spec) {
        let fixed =
            rs_decode_with_limit(&block.to_bytes(), block.ec.len(), block.capacity_t).map_err(|_| FailureStage::Rs)?;
        errors_corrected += fixed.errors_corrected;
        data.extend_from_slice(&fixed.data);
    }
    let payload = parse_data(&data, &spec).ok_or(FailureStage::Structure)?;
    Ok(Decoded {
        payload,
        version,
        ec,
        mask_id,
        errors_corrected,
    })
}
