//! Static geometry and capacity tables for versions 1 through 10.

use alloc::vec::Vec;
use core::fmt;

use super::QrError;

pub const MIN_VERSION: u8 = 1;
pub const MAX_VERSION: u8 = 10;

/// Error-correction strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EcLevel {
    L,
    M,
    Q,
    H,
}

impl EcLevel {
    pub const ALL: [EcLevel; 4] = [EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    /// Nominal fraction of codewords the level can restore.
    pub fn nominal_recovery(self) -> f64 {
        match self {
            EcLevel::L => 0.07,
            EcLevel::M => 0.15,
            EcLevel::Q => 0.25,
            EcLevel::H => 0.30,
        }
    }

    /// Two-bit indicator stored in the format word.
    pub fn format_bits(self) -> u8 {
        match self {
            EcLevel::L => 0b01,
            EcLevel::M => 0b00,
            EcLevel::Q => 0b11,
            EcLevel::H => 0b10,
        }
    }

    pub fn from_format_bits(bits: u8) -> EcLevel {
        match bits & 3 {
            0b01 => EcLevel::L,
            0b00 => EcLevel::M,
            0b11 => EcLevel::Q,
            _ => EcLevel::H,
        }
    }

    /// The next stronger level, if any.
    pub fn stronger(self) -> Option<EcLevel> {
        match self {
            EcLevel::L => Some(EcLevel::M),
            EcLevel::M => Some(EcLevel::Q),
            EcLevel::Q => Some(EcLevel::H),
            EcLevel::H => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            EcLevel::L => 'L',
            EcLevel::M => 'M',
            EcLevel::Q => 'Q',
            EcLevel::H => 'H',
        }
    }

    pub fn from_char(c: char) -> Option<EcLevel> {
        match c.to_ascii_uppercase() {
            'L' => Some(EcLevel::L),
            'M' => Some(EcLevel::M),
            'Q' => Some(EcLevel::Q),
            'H' => Some(EcLevel::H),
            _ => None,
        }
    }
}

impl fmt::Display for EcLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A symbol version in the supported range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Version(u8);

impl Version {
    pub fn new(v: u8) -> Result<Version, QrError> {
        if (MIN_VERSION..=MAX_VERSION).contains(&v) {
            Ok(Version(v))
        } else {
            Err(QrError::VersionOutOfRange(v))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn side(self) -> usize {
        4 * self.0 as usize + 17
    }

    /// Bits in the byte-mode character count field.
    pub fn byte_count_bits(self) -> usize {
        if self.0 <= 9 {
            8
        } else {
            16
        }
    }

    pub fn all() -> impl Iterator<Item = Version> {
        (MIN_VERSION..=MAX_VERSION).map(Version)
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// Indexed [level][version]; version 0 unused.
const EC_CODEWORDS_PER_BLOCK: [[u8; 11]; 4] = [
    [0, 7, 10, 15, 20, 26, 18, 20, 24, 30, 18],
    [0, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26],
    [0, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24],
    [0, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28],
];

const NUM_BLOCKS: [[u8; 11]; 4] = [
    [0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4],
    [0, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5],
    [0, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8],
    [0, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8],
];

/// Detection-only codewords the standard reserves against misdecodes; only
/// the smallest shapes carry any.
fn misdecode_reservation(version: u8, ec: EcLevel) -> usize {
    match (version, ec) {
        (1, EcLevel::L) => 3,
        (1, EcLevel::M) => 2,
        (1, EcLevel::Q) | (1, EcLevel::H) => 1,
        (2, EcLevel::L) => 2,
        (3, EcLevel::L) => 1,
        _ => 0,
    }
}

/// Coordinates shared by the alignment-pattern rows and columns.
pub fn alignment_coordinates(version: Version) -> Vec<usize> {
    let v = version.value() as usize;
    if v == 1 {
        return Vec::new();
    }
    let count = v / 7 + 2;
    let side = version.side();
    let step = (v * 4 + count * 2 + 1) / (count * 2 - 2) * 2;
    let mut out = Vec::with_capacity(count);
    out.push(6);
    let mut pos = side - 7;
    let mut rest = Vec::with_capacity(count - 1);
    for _ in 0..count - 1 {
        rest.push(pos);
        pos -= step;
    }
    rest.reverse();
    out.extend(rest);
    out
}

/// Modules available for codewords and remainder bits.
pub fn raw_data_modules(version: Version) -> usize {
    let v = version.value() as usize;
    let mut result = (16 * v + 128) * v + 64;
    if v >= 2 {
        let num_align = v / 7 + 2;
        result -= (25 * num_align - 10) * num_align - 55;
        if v >= 7 {
            result -= 36;
        }
    }
    result
}

/// A run of identically shaped RS blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockShape {
    pub count: usize,
    pub data_len: usize,
    pub ec_len: usize,
    pub capacity_t: usize,
}

/// Geometry and capacity of one (version, EC level) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSpec {
    pub version: Version,
    pub side: usize,
    pub ec: EcLevel,
    pub total_codewords: usize,
    pub block_layout: Vec<BlockShape>,
    /// Centers (x, y) of alignment patterns actually drawn.
    pub alignment_centers: Vec<(usize, usize)>,
}

impl SymbolSpec {
    pub fn data_codewords(&self) -> usize {
        self.block_layout.iter().map(|b| b.count * b.data_len).sum()
    }

    pub fn ec_codewords(&self) -> usize {
        self.block_layout.iter().map(|b| b.count * b.ec_len).sum()
    }

    pub fn num_blocks(&self) -> usize {
        self.block_layout.iter().map(|b| b.count).sum()
    }

    /// Per-block shapes in block order.
    pub fn blocks(&self) -> impl Iterator<Item = BlockShape> + '_ {
        self.block_layout.iter().flat_map(|b| core::iter::repeat_n(*b, b.count))
    }

    /// Remainder bits after the last codeword.
    pub fn remainder_bits(&self) -> usize {
        raw_data_modules(self.version) - 8 * self.total_codewords
    }

    /// Largest byte-mode payload this symbol holds.
    pub fn byte_capacity(&self) -> usize {
        let bits = self.data_codewords() * 8;
        let header = 4 + self.version.byte_count_bits();
        let max = (bits - header) / 8;
        let count_limit = (1usize << self.version.byte_count_bits()) - 1;
        max.min(count_limit)
    }

    /// The bottom-right alignment center, present for versions 2 and up.
    pub fn bottom_right_alignment(&self) -> Option<(usize, usize)> {
        if self.version.value() >= 2 {
            Some((self.side - 7, self.side - 7))
        } else {
            None
        }
    }
}

/// Looks up the static record for a version and EC level.
pub fn symbol_spec(version: u8, ec: EcLevel) -> Result<SymbolSpec, QrError> {
    let version = Version::new(version)?;
    let v = version.value() as usize;
    let total_codewords = raw_data_modules(version) / 8;
    let blocks = NUM_BLOCKS[ec.ordinal()][v] as usize;
    let ec_len = EC_CODEWORDS_PER_BLOCK[ec.ordinal()][v] as usize;
    let short_len = total_codewords / blocks;
    let long_count = total_codewords % blocks;
    let short_count = blocks - long_count;
    let capacity_t = (ec_len - misdecode_reservation(version.value(), ec)) / 2;

    let mut block_layout = Vec::new();
    block_layout.push(BlockShape {
        count: short_count,
        data_len: short_len - ec_len,
        ec_len,
        capacity_t,
    });
    if long_count > 0 {
        block_layout.push(BlockShape {
            count: long_count,
            data_len: short_len + 1 - ec_len,
            ec_len,
            capacity_t,
        });
    }

    let coords = alignment_coordinates(version);
    let side = version.side();
    let mut alignment_centers = Vec::new();
    for &y in &coords {
        for &x in &coords {
            let on_finder = (x == 6 && y == 6) || (x == 6 && y == side - 7) || (x == side - 7 && y == 6);
            if !on_finder {
                alignment_centers.push((x, y));
            }
        }
    }

    Ok(SymbolSpec {
        version,
        side,
        ec,
        total_codewords,
        block_layout,
        alignment_centers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_one_medium() {
        let s = symbol_spec(1, EcLevel::M).unwrap();
        assert_eq!(s.side, 21);
        assert_eq!(s.total_codewords, 26);
        assert!(s.alignment_centers.is_empty());
        assert_eq!(s.block_layout[0].capacity_t, 4);
    }

    #[test]
    fn side_formula() {
        assert_eq!(symbol_spec(5, EcLevel::L).unwrap().side, 37);
        for v in Version::all() {
            assert_eq!(
                symbol_spec(v.value(), EcLevel::Q).unwrap().side,
                4 * v.value() as usize + 17
            );
        }
    }

    #[test]
    fn version_two_has_single_bottom_right_alignment() {
        for ec in EcLevel::ALL {
            let s = symbol_spec(2, ec).unwrap();
            assert_eq!(s.alignment_centers, alloc::vec![(18, 18)]);
        }
        for v in 2..=6 {
            assert_eq!(symbol_spec(v, EcLevel::M).unwrap().alignment_centers.len(), 1);
        }
        assert_eq!(symbol_spec(7, EcLevel::M).unwrap().alignment_centers.len(), 6);
    }

    #[test]
    fn out_of_range_versions() {
        assert_eq!(symbol_spec(0, EcLevel::L), Err(QrError::VersionOutOfRange(0)));
        assert_eq!(symbol_spec(11, EcLevel::L), Err(QrError::VersionOutOfRange(11)));
    }

    #[test]
    fn recovery_is_monotone() {
        let r: alloc::vec::Vec<f64> = EcLevel::ALL.iter().map(|e| e.nominal_recovery()).collect();
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn byte_capacity_reference_values() {
        // Byte-mode capacities from the standard's capacity table.
        assert_eq!(symbol_spec(1, EcLevel::L).unwrap().byte_capacity(), 17);
        assert_eq!(symbol_spec(1, EcLevel::H).unwrap().byte_capacity(), 7);
        assert_eq!(symbol_spec(5, EcLevel::Q).unwrap().byte_capacity(), 60);
        assert_eq!(symbol_spec(9, EcLevel::L).unwrap().byte_capacity(), 230);
        assert_eq!(symbol_spec(10, EcLevel::L).unwrap().byte_capacity(), 271);
        assert_eq!(symbol_spec(10, EcLevel::H).unwrap().byte_capacity(), 119);
    }

    // Independent table (total codewords, alignment coordinates, and per
    // level (block size, data codewords, block count) of the short blocks),
    // in M, L, H, Q order.
    #[allow(clippy::type_complexity)]
    const REFERENCE: [(usize, &[usize], [(usize, usize, usize); 4]); 10] = [
        (26, &[], [(26, 16, 1), (26, 19, 1), (26, 9, 1), (26, 13, 1)]),
        (44, &[6, 18], [(44, 28, 1), (44, 34, 1), (44, 16, 1), (44, 22, 1)]),
        (70, &[6, 22], [(70, 44, 1), (70, 55, 1), (35, 13, 2), (35, 17, 2)]),
        (100, &[6, 26], [(50, 32, 2), (100, 80, 1), (25, 9, 4), (50, 24, 2)]),
        (134, &[6, 30], [(67, 43, 2), (134, 108, 1), (33, 11, 2), (33, 15, 2)]),
        (172, &[6, 34], [(43, 27, 4), (86, 68, 2), (43, 15, 4), (43, 19, 4)]),
        (196, &[6, 22, 38], [(49, 31, 4), (98, 78, 2), (39, 13, 4), (32, 14, 2)]),
        (242, &[6, 24, 42], [(60, 38, 2), (121, 97, 2), (40, 14, 4), (40, 18, 4)]),
        (
            292,
            &[6, 26, 46],
            [(58, 36, 3), (146, 116, 2), (36, 12, 4), (36, 16, 4)],
        ),
        (346, &[6, 28, 50], [(69, 43, 4), (86, 68, 2), (43, 15, 6), (43, 19, 6)]),
    ];

    #[test]
    fn matches_reference_table() {
        let order = [EcLevel::M, EcLevel::L, EcLevel::H, EcLevel::Q];
        for (i, (total, coords, levels)) in REFERENCE.iter().enumerate() {
            let v = Version::new(i as u8 + 1).unwrap();
            assert_eq!(&alignment_coordinates(v)[..], *coords, "v{}", v);
            for (ec, &(bs, dw, ns)) in order.iter().zip(levels.iter()) {
                let s = symbol_spec(v.value(), *ec).unwrap();
                assert_eq!(s.total_codewords, *total);
                let short = s.block_layout[0];
                assert_eq!(
                    (short.data_len + short.ec_len, short.data_len, short.count),
                    (bs, dw, ns),
                    "v{v}-{ec}"
                );
                // Long blocks fill the remaining codewords with one extra data byte each.
                let rest = total - bs * ns;
                assert_eq!(rest % (bs + 1), 0);
                assert_eq!(s.num_blocks(), ns + rest / (bs + 1));
            }
        }
    }
}
