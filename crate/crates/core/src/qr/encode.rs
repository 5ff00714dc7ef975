//! Byte-mode payload assembly, block interleaving, placement and masking.

use alloc::vec::Vec;

use super::mask::{apply_mask, penalty, MaskChoice};
use super::matrix::{draw_format_bits, draw_function_patterns, function_template, placement_order, ModuleMatrix};
use super::spec::{symbol_spec, EcLevel, SymbolSpec, MAX_VERSION};
use super::QrError;
use crate::codec::CodewordBlock;

pub const MODE_BYTE: u32 = 0b0100;
pub const PAD_BYTES: [u8; 2] = [0xEC, 0x11];

struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter {
            bytes: Vec::new(),
            len: 0,
        }
    }

    fn push(&mut self, value: u32, bits: usize) {
        for i in (0..bits).rev() {
            if self.len.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if (value >> i) & 1 != 0 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
            }
            self.len += 1;
        }
    }
}

/// Data codewords for `payload`: byte-mode header, payload, terminator,
/// zero bits to the byte boundary, then alternating pad codewords.
pub fn encode_payload(payload: &[u8], spec: &SymbolSpec) -> Result<Vec<u8>, QrError> {
    let capacity = spec.byte_capacity();
    if payload.len() > capacity {
        return Err(QrError::CapacityExceeded {
            len: payload.len(),
            capacity,
        });
    }
    let data_bits = spec.data_codewords() * 8;
    let mut w = BitWriter::new();
    w.push(MODE_BYTE, 4);
    w.push(payload.len() as u32, spec.version.byte_count_bits());
    for &b in payload {
        w.push(b as u32, 8);
    }
    let terminator = (data_bits - w.len).min(4);
    w.push(0, terminator);
    let align = (8 - w.len % 8) % 8;
    w.push(0, align);
    let mut bytes = w.bytes;
    let mut pad = PAD_BYTES.iter().cycle();
    while bytes.len() < spec.data_codewords() {
        bytes.push(*pad.next().unwrap());
    }
    Ok(bytes)
}

/// Splits data codewords into blocks and appends RS parity to each.
pub fn make_blocks(data: &[u8], spec: &SymbolSpec) -> Vec<CodewordBlock> {
    assert_eq!(data.len(), spec.data_codewords());
    let mut out = Vec::with_capacity(spec.num_blocks());
    let mut k = 0;
    for shape in spec.blocks() {
        let chunk = data[k..k + shape.data_len].to_vec();
        k += shape.data_len;
        out.push(CodewordBlock::encode(chunk, shape.ec_len, shape.capacity_t));
    }
    out
}

/// Data codewords round-robin across blocks, then parity round-robin.
pub fn interleave(blocks: &[CodewordBlock]) -> Vec<u8> {
    let mut out = Vec::with_capacity(blocks.iter().map(|b| b.len()).sum());
    let max_data = blocks.iter().map(|b| b.data.len()).max().unwrap_or(0);
    for i in 0..max_data {
        for b in blocks {
            if let Some(&c) = b.data.get(i) {
                out.push(c);
            }
        }
    }
    let max_ec = blocks.iter().map(|b| b.ec.len()).max().unwrap_or(0);
    for i in 0..max_ec {
        for b in blocks {
            if let Some(&c) = b.ec.get(i) {
                out.push(c);
            }
        }
    }
    out
}

/// Where each interleaved codeword came from: (block index, index within
/// that block's data-then-parity bytes).
pub fn interleave_map(spec: &SymbolSpec) -> Vec<(usize, usize)> {
    let shapes: Vec<_> = spec.blocks().collect();
    let mut out = Vec::with_capacity(spec.total_codewords);
    let max_data = shapes.iter().map(|s| s.data_len).max().unwrap_or(0);
    for i in 0..max_data {
        for (b, s) in shapes.iter().enumerate() {
            if i < s.data_len {
                out.push((b, i));
            }
        }
    }
    let max_ec = shapes.iter().map(|s| s.ec_len).max().unwrap_or(0);
    for i in 0..max_ec {
        for (b, s) in shapes.iter().enumerate() {
            if i < s.ec_len {
                out.push((b, s.data_len + i));
            }
        }
    }
    out
}

/// Inverse of [`interleave`] for the block layout of `spec`.
pub fn deinterleave(codewords: &[u8], spec: &SymbolSpec) -> Vec<CodewordBlock> {
    assert_eq!(codewords.len(), spec.total_codewords);
    let mut blocks: Vec<CodewordBlock> = spec
        .blocks()
        .map(|s| CodewordBlock {
            data: Vec::with_capacity(s.data_len),
            ec: Vec::with_capacity(s.ec_len),
            capacity_t: s.capacity_t,
        })
        .collect();
    let shapes: Vec<_> = spec.blocks().collect();
    for (&c, &(b, i)) in codewords.iter().zip(interleave_map(spec).iter()) {
        if i < shapes[b].data_len {
            blocks[b].data.push(c);
        } else {
            blocks[b].ec.push(c);
        }
    }
    blocks
}

/// Writes codeword bits along the zigzag order into a matrix that already
/// carries its function patterns. Remainder modules stay light.
pub fn place_codewords(m: &mut ModuleMatrix, codewords: &[u8]) {
    let order = placement_order(m);
    let total_bits = codewords.len() * 8;
    for (i, &(x, y)) in order.iter().enumerate() {
        let dark = i < total_bits && (codewords[i >> 3] >> (7 - (i & 7))) & 1 != 0;
        m.set(x, y, dark);
    }
}

/// Reads `count` codewords back along the zigzag order.
pub fn extract_codewords(m: &ModuleMatrix, function_map: &ModuleMatrix, count: usize) -> Vec<u8> {
    let order = placement_order(function_map);
    let mut out = alloc::vec![0u8; count];
    for (i, &(x, y)) in order.iter().take(count * 8).enumerate() {
        if m.get(x, y) {
            out[i >> 3] |= 0x80 >> (i & 7);
        }
    }
    out
}

/// Places codewords, tries all eight masks and keeps the lowest penalty
/// (lowest id on ties), then writes the format and version words.
pub fn place_and_mask(codewords: &[u8], spec: &SymbolSpec) -> (ModuleMatrix, MaskChoice) {
    assert_eq!(codewords.len(), spec.total_codewords);
    let mut base = ModuleMatrix::new(spec.side);
    draw_function_patterns(&mut base, spec);
    place_codewords(&mut base, codewords);

    let mut best: Option<(ModuleMatrix, MaskChoice)> = None;
    for mask_id in 0..8u8 {
        let mut candidate = base.clone();
        apply_mask(&mut candidate, mask_id);
        draw_format_bits(&mut candidate, spec.ec, mask_id);
        let score = penalty(&candidate);
        if best.as_ref().is_none_or(|(_, c)| score < c.penalty) {
            best = Some((
                candidate,
                MaskChoice {
                    mask_id,
                    penalty: score,
                },
            ));
        }
    }
    best.expect("eight candidates")
}

/// Full pipeline at a fixed version.
pub fn generate_at(payload: &[u8], spec: &SymbolSpec) -> Result<(ModuleMatrix, MaskChoice), QrError> {
    let data = encode_payload(payload, spec)?;
    let blocks = make_blocks(&data, spec);
    Ok(place_and_mask(&interleave(&blocks), spec))
}

/// Smallest version at or above `min_version` whose byte capacity holds
/// `len` bytes.
pub fn smallest_fitting(len: usize, ec: EcLevel, min_version: u8) -> Result<SymbolSpec, QrError> {
    let start = min_version.max(1);
    if start > MAX_VERSION {
        return Err(QrError::VersionOutOfRange(min_version));
    }
    for v in start..=MAX_VERSION {
        let spec = symbol_spec(v, ec)?;
        if len <= spec.byte_capacity() {
            return Ok(spec);
        }
    }
    let capacity = symbol_spec(MAX_VERSION, ec)?.byte_capacity();
    Err(QrError::CapacityExceeded { len, capacity })
}

/// Encodes `payload` into the smallest fitting symbol at or above
/// `min_version`.
pub fn generate(payload: &[u8], ec: EcLevel, min_version: u8) -> Result<ModuleMatrix, QrError> {
    let spec = smallest_fitting(payload.len(), ec, min_version)?;
    generate_at(payload, &spec).map(|(m, _)| m)
}

/// Like [`generate`] but also returns the symbol spec and mask chosen.
pub fn generate_with_spec(
    payload: &[u8],
    ec: EcLevel,
    min_version: u8,
) -> Result<(ModuleMatrix, SymbolSpec, MaskChoice), QrError> {
    let spec = smallest_fitting(payload.len(), ec, min_version)?;
    let (m, mask) = generate_at(payload, &spec)?;
    Ok((m, spec, mask))
}

/// Function-pattern template matching `spec` (no data, no real format word).
pub fn template_for(spec: &SymbolSpec) -> ModuleMatrix {
    function_template(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{bch_decode_format, syndromes};
    use crate::qr::mask::mask_bit;
    use crate::qr::matrix::{format_positions_primary, format_positions_secondary};
    use crate::qr::Version;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn empty_payload_version_one_low() {
        let spec = symbol_spec(1, EcLevel::L).unwrap();
        let data = encode_payload(b"", &spec).unwrap();
        // 0100 | 00000000 | 0000 -> 0x40 0x00, then pads.
        let mut expected = vec![0x40, 0x00];
        for i in 0..17 {
            expected.push(PAD_BYTES[i % 2]);
        }
        assert_eq!(data, expected);
    }

    #[test]
    fn known_payload_bits() {
        // "EAT": 0100 00000011 01000101 01000001 01010100 0000
        let spec = symbol_spec(1, EcLevel::L).unwrap();
        let data = encode_payload(b"EAT", &spec).unwrap();
        assert_eq!(&data[..5], &[0x40, 0x34, 0x54, 0x15, 0x40]);
        assert_eq!(data[5], 0xEC);
    }

    #[test]
    fn capacity_edges() {
        for v in [1u8, 5, 9, 10] {
            for ec in EcLevel::ALL {
                let spec = symbol_spec(v, ec).unwrap();
                let cap = spec.byte_capacity();
                let full = encode_payload(&vec![0xA5; cap], &spec).unwrap();
                assert_eq!(full.len(), spec.data_codewords());
                assert!(!full.ends_with(&[0xEC, 0x11]) || cap == 0);
                assert_eq!(
                    encode_payload(&vec![0; cap + 1], &spec),
                    Err(QrError::CapacityExceeded {
                        len: cap + 1,
                        capacity: cap
                    })
                );
            }
        }
    }

    #[test]
    fn version_ten_uses_sixteen_bit_count() {
        let spec = symbol_spec(10, EcLevel::H).unwrap();
        let data = encode_payload(&[0xFF], &spec).unwrap();
        // 0100 0000000000000001 11111111 0000...
        assert_eq!(&data[..4], &[0x40, 0x00, 0x1F, 0xF0]);
    }

    #[test]
    fn single_block_interleave_is_identity() {
        let b = CodewordBlock::encode(vec![1, 2, 3], 4, 2);
        assert_eq!(interleave(core::slice::from_ref(&b)), b.to_bytes());
    }

    #[test]
    fn two_block_round_robin() {
        let a = CodewordBlock {
            data: vec![1, 2],
            ec: vec![5],
            capacity_t: 0,
        };
        let b = CodewordBlock {
            data: vec![3, 4],
            ec: vec![6],
            capacity_t: 0,
        };
        assert_eq!(interleave(&[a, b]), vec![1, 3, 2, 4, 5, 6]);
    }

    #[test]
    fn blocks_have_zero_syndromes() {
        for v in Version::all() {
            for ec in EcLevel::ALL {
                let spec = symbol_spec(v.value(), ec).unwrap();
                let data = encode_payload(b"abc", &spec).unwrap();
                for b in make_blocks(&data, &spec) {
                    assert!(syndromes(&b.to_bytes(), b.ec.len()).iter().all(|s| s.0 == 0));
                }
            }
        }
    }

    #[test]
    fn generate_picks_smallest_version() {
        let (m, spec, _) = generate_with_spec(b"EAT", EcLevel::L, 1).unwrap();
        assert_eq!(m.side(), 21);
        assert_eq!(spec.version.value(), 1);
        let (_, spec, _) = generate_with_spec(b"EAT", EcLevel::L, 2).unwrap();
        assert_eq!(spec.version.value(), 2);
        let err = generate(&[0u8; 300], EcLevel::L, 1).unwrap_err();
        assert_eq!(
            err,
            QrError::CapacityExceeded {
                len: 300,
                capacity: 271
            }
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(b"https://example.org/x", EcLevel::Q, 1).unwrap();
        let b = generate(b"https://example.org/x", EcLevel::Q, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chosen_mask_is_argmin() {
        let spec = symbol_spec(3, EcLevel::M).unwrap();
        let data = encode_payload(b"argmin check", &spec).unwrap();
        let cw = interleave(&make_blocks(&data, &spec));
        let (_, choice) = place_and_mask(&cw, &spec);
        let mut base = ModuleMatrix::new(spec.side);
        draw_function_patterns(&mut base, &spec);
        place_codewords(&mut base, &cw);
        let scores: Vec<u32> = (0..8)
            .map(|id| {
                let mut c = base.clone();
                apply_mask(&mut c, id);
                draw_format_bits(&mut c, spec.ec, id);
                penalty(&c)
            })
            .collect();
        let min = *scores.iter().min().unwrap();
        let first = scores.iter().position(|&s| s == min).unwrap() as u8;
        assert_eq!(choice.mask_id, first);
        assert_eq!(choice.penalty, min);
    }

    fn read_format(m: &ModuleMatrix, positions: &[(usize, usize); 15]) -> u16 {
        positions
            .iter()
            .enumerate()
            .fold(0u16, |acc, (i, &(x, y))| acc | ((m.get(x, y) as u16) << i))
    }

    #[test]
    fn both_format_copies_decode() {
        for v in Version::all() {
            for ec in EcLevel::ALL {
                let spec = symbol_spec(v.value(), ec).unwrap();
                let (m, choice) = generate_at(b"fmt", &spec).unwrap();
                for copy in [
                    read_format(&m, &format_positions_primary()),
                    read_format(&m, &format_positions_secondary(spec.side)),
                ] {
                    for flips in [0u16, 0b1, 0b1000_0000_0101] {
                        assert_eq!(
                            bch_decode_format(copy ^ flips).unwrap(),
                            (ec.format_bits(), choice.mask_id)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn plain_symbol_has_three_finders_only() {
        let m = generate(b"three corners", EcLevel::M, 2).unwrap();
        let side = m.side();
        let finder_at = |ox: usize, oy: usize| {
            (0..7).all(|dy| {
                (0..7).all(|dx| {
                    let d = (dx as isize - 3).abs().max((dy as isize - 3).abs());
                    m.get(ox + dx, oy + dy) == (d != 2)
                })
            })
        };
        assert!(finder_at(0, 0) && finder_at(side - 7, 0) && finder_at(0, side - 7));
        assert!(!finder_at(side - 7, side - 7));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn deinterleave_inverts_interleave(v in 1u8..=10, ec_i in 0usize..4, seed: u64) {
            let spec = symbol_spec(v, EcLevel::ALL[ec_i]).unwrap();
            let data: Vec<u8> = (0..spec.data_codewords())
                .map(|i| (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) >> 24) as u8)
                .collect();
            let blocks = make_blocks(&data, &spec);
            prop_assert_eq!(deinterleave(&interleave(&blocks), &spec), blocks);
        }

        #[test]
        fn unmask_then_extract_inverts_placement(v in 1u8..=10, ec_i in 0usize..4, bytes in proptest::collection::vec(any::<u8>(), 346)) {
            let spec = symbol_spec(v, EcLevel::ALL[ec_i]).unwrap();
            let cw = &bytes[..spec.total_codewords];
            let (mut m, choice) = place_and_mask(cw, &spec);
            let template = template_for(&spec);
            for (x, y) in placement_order(&template) {
                if mask_bit(choice.mask_id, x, y) {
                    let d = m.get(x, y);
                    m.set(x, y, !d);
                }
            }
            prop_assert_eq!(extract_codewords(&m, &template, spec.total_codewords), cw.to_vec());
        }
    }
}
