//! JSON forms of scan reports, trial statistics and peacock artifacts.

use pqr_core::peacock::{Corner, PqrArtifact};
use pqr_core::scanner::{Census, Outcome, ScanReport};
use pqr_core::scene::{TrialConfig, TrialStats};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusJson {
    pub finders: usize,
    pub triples: usize,
    pub decoded: usize,
    pub attempts: usize,
    pub format_failures: usize,
    pub rs_failures: usize,
    pub structure_failures: usize,
}

impl From<&Census> for CensusJson {
    fn from(c: &Census) -> Self {
        CensusJson {
            finders: c.finders,
            triples: c.triples,
            decoded: c.decoded,
            attempts: c.attempts,
            format_failures: c.format_failures,
            rs_failures: c.rs_failures,
            structure_failures: c.structure_failures,
        }
    }
}

/// Decode fields are null unless the outcome is `decoded`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReportJson {
    pub outcome: String,
    pub payload_hex: Option<String>,
    pub version: Option<u8>,
    pub ec: Option<String>,
    pub errors_corrected: Option<usize>,
    pub census: CensusJson,
    pub policy: String,
    pub seed: u64,
}

impl From<&ScanReport> for ScanReportJson {
    fn from(r: &ScanReport) -> Self {
        let (payload_hex, version, ec, errors_corrected) = match &r.outcome {
            Outcome::Decoded {
                payload,
                version,
                ec,
                errors_corrected,
            } => (
                Some(hex::encode(payload)),
                Some(*version),
                Some(ec.as_char().to_string()),
                Some(*errors_corrected),
            ),
            _ => (None, None, None, None),
        };
        ScanReportJson {
            outcome: r.outcome.name().to_string(),
            payload_hex,
            version,
            ec,
            errors_corrected,
            census: (&r.census).into(),
            policy: r.policy.name().to_string(),
            seed: r.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialStatsJson {
    pub trials: usize,
    pub target_hit: usize,
    pub other_hit: usize,
    pub none: usize,
    pub histogram: Vec<usize>,
    pub mode: String,
    pub seed: u64,
    pub codes: usize,
    pub target: usize,
}

impl TrialStatsJson {
    pub fn new(stats: &TrialStats, config: &TrialConfig) -> Self {
        TrialStatsJson {
            trials: stats.trials,
            target_hit: stats.target_hit,
            other_hit: stats.other_hit,
            none: stats.none,
            histogram: stats.histogram.clone(),
            mode: config.mode.name().to_string(),
            seed: config.base_seed,
            codes: config.n_codes,
            target: config.target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDamageJson {
    pub block: usize,
    pub codewords: usize,
    pub capacity_t: usize,
    /// Spare corrections left after the envelope is lost.
    pub margin: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeJson {
    pub corner: String,
    pub side_modules: usize,
    pub cover_center: [f64; 2],
    pub cover_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationJson {
    pub passed: bool,
    pub uncovered_finders: [usize; 2],
    pub uncovered_decodes: usize,
    pub occluded_decodes: usize,
    pub occluded_renders: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeacockReportJson {
    pub payload_hex: String,
    pub version: u8,
    pub side: usize,
    pub ec: String,
    pub requested_ec: String,
    pub ec_substituted: bool,
    pub mask: u8,
    pub feasible: bool,
    pub modules_changed: usize,
    pub per_block: Vec<BlockDamageJson>,
    pub envelope: EnvelopeJson,
    pub fourth_finder_origin: [usize; 2],
    pub fake_alignment_centers: Vec<[usize; 2]>,
    pub distracter_side: usize,
    pub certification: CertificationJson,
}

impl From<&PqrArtifact> for PeacockReportJson {
    fn from(a: &PqrArtifact) -> Self {
        let d = &a.distracter;
        let e = &d.envelope;
        let c = &a.certification;
        PeacockReportJson {
            payload_hex: hex::encode(&a.payload),
            version: a.spec.version.value(),
            side: a.spec.side,
            ec: a.spec.ec.as_char().to_string(),
            requested_ec: a.requested_ec.as_char().to_string(),
            ec_substituted: a.ec_substituted(),
            mask: a.mask_id,
            feasible: a.report.feasible,
            modules_changed: a.report.modules_changed,
            per_block: a
                .report
                .per_block_errors
                .iter()
                .map(|b| BlockDamageJson {
                    block: b.block,
                    codewords: b.codewords,
                    capacity_t: b.capacity_t,
                    margin: b.capacity_t as i64 - b.codewords as i64,
                })
                .collect(),
            envelope: EnvelopeJson {
                corner: match e.corner {
                    Corner::BottomRight => "bottom_right".to_string(),
                },
                side_modules: e.side_modules,
                cover_center: [e.cover_center.0, e.cover_center.1],
                cover_radius: e.cover_radius,
            },
            fourth_finder_origin: [d.fourth_finder_origin.0, d.fourth_finder_origin.1],
            fake_alignment_centers: d.fake_alignment_centers.iter().map(|&(x, y)| [x, y]).collect(),
            distracter_side: d.bbox_side,
            certification: CertificationJson {
                passed: c.passed(),
                uncovered_finders: c.uncovered_finders,
                uncovered_decodes: c.uncovered_decodes,
                occluded_decodes: c.occluded_decodes,
                occluded_renders: c.occluded_renders,
            },
        }
    }
}

/// Pretty JSON with a trailing linefeed.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
