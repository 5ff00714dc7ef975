//! Reference scanner: binarize, locate finders, enumerate triples, fit a
//! grid per triple, decode, and pick a result by policy.

pub mod bitmap;
pub mod decode;
pub mod finder;
pub mod grid;
pub mod tolerances;
pub mod triple;

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use bitmap::{binarize, Bitmap, DARK, LIGHT};
pub use decode::{decode_grid, decode_matrix, Decoded, FailureStage};
pub use finder::{locate_finders, locate_finders_with, FinderCandidate};
pub use grid::{fit_grid, fit_grid_with, AlignmentFit, GridModel, ALIGNMENT_TEMPLATE};
pub use tolerances::Tolerances;
pub use triple::{enumerate_triples, enumerate_triples_in, enumerate_triples_with, TripleHypothesis};

use crate::qr::EcLevel;

/// How a scan chooses among hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Succeed only when exactly one code decodes.
    StrictSingle,
    /// Try hypotheses in a seeded random order and take the first decode.
    Arbitrary,
    /// Try hypotheses in raster order and take the first decode.
    FirstFound,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::StrictSingle => "strict",
            Policy::Arbitrary => "arbitrary",
            Policy::FirstFound => "first",
        }
    }

    pub fn from_name(s: &str) -> Option<Policy> {
        match s {
            "strict" => Some(Policy::StrictSingle),
            "arbitrary" => Some(Policy::Arbitrary),
            "first" => Some(Policy::FirstFound),
            _ => None,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Counts of what the scan saw and tried.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Census {
    pub finders: usize,
    pub triples: usize,
    pub attempts: usize,
    pub decoded: usize,
    pub format_failures: usize,
    pub rs_failures: usize,
    pub structure_failures: usize,
}

impl Census {
    fn record(&mut self, r: &Result<Decoded, FailureStage>) {
        self.attempts += 1;
        match r {
            Ok(_) => self.decoded += 1,
            Err(FailureStage::Format) => self.format_failures += 1,
            Err(FailureStage::Rs) => self.rs_failures += 1,
            Err(FailureStage::Structure) => self.structure_failures += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Decoded {
        payload: Vec<u8>,
        version: u8,
        ec: EcLevel,
        errors_corrected: usize,
    },
    NotFound,
    NoUniqueCode,
    DecodeFailed,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Decoded { .. } => "decoded",
            Outcome::NotFound => "not_found",
            Outcome::NoUniqueCode => "no_unique_code",
            Outcome::DecodeFailed => "decode_failed",
        }
    }

    pub fn payload(&self) -> Option<&[u8]> {
        match self {
            Outcome::Decoded { payload, .. } => Some(payload),
            _ => None,
        }
    }

    pub fn is_decoded(&self) -> bool {
        matches!(self, Outcome::Decoded { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub outcome: Outcome,
    pub census: Census,
    pub policy: Policy,
    pub seed: u64,
}

/// One hypothesis and what became of it.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub triple: TripleHypothesis,
    pub grid: GridModel,
    pub result: Result<Decoded, FailureStage>,
}

/// Everything the scanner finds in a bitmap, with every hypothesis tried.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub finders: Vec<FinderCandidate>,
    pub attempts: Vec<Attempt>,
    pub census: Census,
}

fn attempt(binary: &Bitmap, t: &TripleHypothesis, tol: &Tolerances) -> Attempt {
    let grid = fit_grid_with(binary, t, tol);
    let result = decode_grid(binary, &grid, t.est_version);
    Attempt {
        triple: *t,
        grid,
        result,
    }
}

/// Runs every hypothesis without policy selection.
pub fn inspect(b: &Bitmap) -> Diagnostics {
    inspect_with(b, &Tolerances::DEFAULT)
}

pub fn inspect_with(b: &Bitmap, tol: &Tolerances) -> Diagnostics {
    let binary = binarize(b);
    let finders = locate_finders_with(&binary, tol);
    let triples = enumerate_triples_in(&binary, &finders, tol);
    let mut census = Census {
        finders: finders.len(),
        triples: triples.len(),
        ..Census::default()
    };
    let attempts: Vec<Attempt> = triples.iter().map(|t| attempt(&binary, t, tol)).collect();
    for a in &attempts {
        census.record(&a.result);
    }
    Diagnostics {
        finders,
        attempts,
        census,
    }
}

impl Diagnostics {
    /// The outcome [`scan`] would report under `policy` and `seed`, replayed
    /// over the already evaluated hypotheses. The census counts every
    /// hypothesis.
    pub fn select(&self, policy: Policy, seed: u64) -> ScanReport {
        let outcome = if self.attempts.is_empty() {
            Outcome::NotFound
        } else {
            match policy {
                Policy::StrictSingle => {
                    let wins: Vec<&Attempt> = self.attempts.iter().filter(|a| a.result.is_ok()).collect();
                    match wins.first() {
                        None => Outcome::DecodeFailed,
                        Some(first) => {
                            let p = &first.result.as_ref().unwrap().payload;
                            let unique = wins.iter().all(|a| {
                                &a.result.as_ref().unwrap().payload == p && a.triple.shares_finder(&first.triple)
                            });
                            if unique {
                                decoded_outcome(first.result.clone().unwrap())
                            } else {
                                Outcome::NoUniqueCode
                            }
                        }
                    }
                }
                Policy::Arbitrary | Policy::FirstFound => {
                    let mut order: Vec<usize> = (0..self.attempts.len()).collect();
                    if policy == Policy::Arbitrary {
                        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                    }
                    order
                        .into_iter()
                        .find_map(|i| self.attempts[i].result.clone().ok())
                        .map_or(Outcome::DecodeFailed, decoded_outcome)
                }
            }
        };
        ScanReport {
            outcome,
            census: self.census,
            policy,
            seed,
        }
    }
}

fn decoded_outcome(d: Decoded) -> Outcome {
    Outcome::Decoded {
        payload: d.payload,
        version: d.version,
        ec: d.ec,
        errors_corrected: d.errors_corrected,
    }
}

/// Scans a grayscale bitmap. `seed` only matters for [`Policy::Arbitrary`].
pub fn scan(b: &Bitmap, policy: Policy, seed: u64) -> ScanReport {
    scan_with(b, policy, seed, &Tolerances::DEFAULT)
}

pub fn scan_with(b: &Bitmap, policy: Policy, seed: u64, tol: &Tolerances) -> ScanReport {
    let binary = binarize(b);
    let finders = locate_finders_with(&binary, tol);
    let triples = enumerate_triples_in(&binary, &finders, tol);
    let mut census = Census {
        finders: finders.len(),
        triples: triples.len(),
        ..Census::default()
    };
    let report = |outcome, census| ScanReport {
        outcome,
        census,
        policy,
        seed,
    };
    if triples.is_empty() {
        return report(Outcome::NotFound, census);
    }
    match policy {
        Policy::StrictSingle => {
            let mut wins: Vec<(TripleHypothesis, Decoded)> = Vec::new();
            for t in &triples {
                let a = attempt(&binary, t, tol);
                census.record(&a.result);
                if let Ok(d) = a.result {
                    wins.push((a.triple, d));
                }
            }
            let Some((first_t, first)) = wins.first().cloned() else {
                return report(Outcome::DecodeFailed, census);
            };
            // Several hypotheses of one physical code count as one decode.
            let unique = wins
                .iter()
                .all(|(t, d)| d.payload == first.payload && t.shares_finder(&first_t));
            if unique {
                report(decoded_outcome(first), census)
            } else {
                report(Outcome::NoUniqueCode, census)
            }
        }
        Policy::Arbitrary | Policy::FirstFound => {
            let mut order: Vec<usize> = (0..triples.len()).collect();
            if policy == Policy::Arbitrary {
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            }
            for i in order {
                let a = attempt(&binary, &triples[i], tol);
                census.record(&a.result);
                if let Ok(d) = a.result {
                    return report(decoded_outcome(d), census);
                }
            }
            report(Outcome::DecodeFailed, census)
        }
    }
}
