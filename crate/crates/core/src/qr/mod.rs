//! QR symbol construction for versions 1 through 10, byte mode.

pub mod encode;
pub mod mask;
pub mod matrix;
pub mod spec;

use core::fmt;

pub use encode::{
    deinterleave, encode_payload, extract_codewords, generate, generate_at, generate_with_spec, interleave,
    interleave_map, make_blocks, place_and_mask, smallest_fitting,
};
pub use mask::{apply_mask, mask_bit, penalty, MaskChoice};
pub use matrix::{function_template, placement_order, ModuleMatrix};
pub use spec::{symbol_spec, BlockShape, EcLevel, SymbolSpec, Version, MAX_VERSION, MIN_VERSION};

/// Errors from symbol construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QrError {
    VersionOutOfRange(u8),
    CapacityExceeded { len: usize, capacity: usize },
}

impl fmt::Display for QrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QrError::VersionOutOfRange(v) => write!(f, "version {v} outside 1..=10"),
            QrError::CapacityExceeded { len, capacity } => {
                write!(f, "payload of {len} bytes exceeds capacity of {capacity}")
            }
        }
    }
}

impl core::error::Error for QrError {}
