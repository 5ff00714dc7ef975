//! Netpbm and matrix-text IO, JSON reports, parallel trials and the `pqr`
//! command line on top of `pqr-core`.

pub mod cli;
pub mod matrix_text;
pub mod netpbm;
pub mod report;
pub mod trials;

use pqr_core::peacock::PqrArtifact;
use pqr_core::scanner::Bitmap;
use pqr_core::scene::{render_symbol, Rotation};

/// Uncovered render of an artifact, upright or in the diamond orientation
/// (covered corner at the bottom).
pub fn render_artifact(a: &PqrArtifact, scale: usize, diamond: bool) -> Bitmap {
    let rot = if diamond { Rotation::DIAMOND } else { Rotation::UPRIGHT };
    render_symbol(&a.matrix, scale, rot, None)
}
