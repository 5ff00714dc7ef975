//! Finite-field arithmetic and the error-correcting codes used by QR symbols.

pub mod bch;
pub mod field;
pub mod rs;

use alloc::vec::Vec;

pub use bch::{bch_decode_format, bch_decode_version, bch_encode_format, bch_encode_version, BchError};
pub use field::{field_mul, Gf256};
pub use rs::{rs_decode, rs_decode_with_limit, rs_encode, syndromes, RsDecoded, RsError};

/// One RS block: data codewords, their parity, and how many codeword errors
/// the symbol format allows this block to correct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordBlock {
    pub data: Vec<u8>,
    pub ec: Vec<u8>,
    pub capacity_t: usize,
}

impl CodewordBlock {
    /// Encodes `data` with `ec_count` parity bytes.
    pub fn encode(data: Vec<u8>, ec_count: usize, capacity_t: usize) -> Self {
        let ec = rs_encode(&data, ec_count);
        CodewordBlock { data, ec, capacity_t }
    }

    pub fn len(&self) -> usize {
        self.data.len() + self.ec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Data followed by parity.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.data.clone();
        out.extend_from_slice(&self.ec);
        out
    }
}
