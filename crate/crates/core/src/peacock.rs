//! Peacocked symbols: a fourth finder and a cluster of fake alignment
//! patterns stamped on the finderless corner. The stamp defeats scanning
//! until a finger covers the corner; the covered area stays inside the
//! error-correction budget so the covered symbol decodes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
use core::fmt;
use libm::ceil;

use crate::qr::{
    function_template, generate_at, interleave_map, placement_order, smallest_fitting, symbol_spec, EcLevel,
    ModuleMatrix, QrError, SymbolSpec, MAX_VERSION,
};
use crate::scanner::grid::alignment_search_order;
use crate::scanner::{inspect, Tolerances, ALIGNMENT_TEMPLATE};
use crate::scene::{render_symbol, Rotation};

/// Lowest version with an alignment pattern to confuse.
pub const MIN_PEACOCK_VERSION: u8 = 2;
/// Scale and finger luminances used by the self-check.
pub const CERTIFY_SCALE: usize = 4;
pub const CERTIFY_LUMINANCES: [u8; 3] = [0, 80, 120];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    BottomRight,
}

/// The square a covering finger is assumed to hide, plus the finger disc
/// itself in module coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcclusionEnvelope {
    pub corner: Corner,
    pub side_modules: usize,
    pub symbol_side: usize,
    pub cover_center: (f64, f64),
    pub cover_radius: f64,
}

impl OcclusionEnvelope {
    /// Whether module (x, y) lies inside the envelope square.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let lo = self.symbol_side - self.side_modules;
        x >= lo && y >= lo && x < self.symbol_side && y < self.symbol_side
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistracterSpec {
    /// Top-left module of the fourth finder.
    pub fourth_finder_origin: (usize, usize),
    pub fake_alignment_centers: Vec<(usize, usize)>,
    pub suppressed_true_centers: Vec<(usize, usize)>,
    /// Side of the square, anchored at the corner, holding every stamped
    /// module.
    pub bbox_side: usize,
    pub envelope: OcclusionEnvelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockDamage {
    pub block: usize,
    /// Codewords with at least one module inside the envelope.
    pub codewords: usize,
    pub capacity_t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DamageReport {
    pub modules_changed: usize,
    pub per_block_errors: Vec<BlockDamage>,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Upright,
    Diamond,
}

/// Results of the construction-time self-scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certification {
    /// Finder candidates on the uncovered upright and diamond renders.
    pub uncovered_finders: [usize; 2],
    /// Hypotheses that decoded on the uncovered renders.
    pub uncovered_decodes: usize,
    /// Covered renders (both orientations, every certify luminance) that
    /// decoded the payload.
    pub occluded_decodes: usize,
    pub occluded_renders: usize,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.uncovered_finders == [4, 4]
            && self.uncovered_decodes == 0
            && self.occluded_decodes == self.occluded_renders
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqrArtifact {
    pub matrix: ModuleMatrix,
    pub payload: Vec<u8>,
    pub spec: SymbolSpec,
    pub distracter: DistracterSpec,
    pub report: DamageReport,
    pub orientation_hint: Orientation,
    pub requested_ec: EcLevel,
    pub mask_id: u8,
    pub certification: Certification,
}

impl PqrArtifact {
    /// Whether the artifact came back at a different EC level than asked.
    pub fn ec_substituted(&self) -> bool {
        self.spec.ec != self.requested_ec
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeacockError {
    /// Version 1 has no alignment pattern.
    VersionTooLow(u8),
    /// The layout does not fit, or the envelope exceeds some block's budget.
    Infeasible,
    CapacityExceeded {
        len: usize,
        capacity: usize,
    },
}

impl fmt::Display for PeacockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeacockError::VersionTooLow(v) => write!(f, "version {v} has no alignment pattern"),
            PeacockError::Infeasible => f.write_str("no feasible distracter at any version and EC level"),
            PeacockError::CapacityExceeded { len, capacity } => {
                write!(f, "payload of {len} bytes exceeds capacity of {capacity}")
            }
        }
    }
}

impl core::error::Error for PeacockError {}

impl From<QrError> for PeacockError {
    fn from(e: QrError) -> Self {
        match e {
            QrError::CapacityExceeded { len, capacity } => PeacockError::CapacityExceeded { len, capacity },
            QrError::VersionOutOfRange(v) => PeacockError::VersionTooLow(v),
        }
    }
}

/// Envelope side for a distracter of side `b`: the bounding square of a
/// disc centered on the distracter that covers it with a one-module margin.
pub fn envelope_side(b: usize) -> usize {
    let half = b as f64 / 2.0;
    ceil(half + (b as f64 + 2.0) / 2.0 * SQRT_2) as usize
}

fn envelope_for(side: usize, b: usize) -> OcclusionEnvelope {
    let e = envelope_side(b);
    let c = side as f64 - b as f64 / 2.0;
    OcclusionEnvelope {
        corner: Corner::BottomRight,
        side_modules: e,
        symbol_side: side,
        cover_center: (c, c),
        cover_radius: e as f64 - b as f64 / 2.0,
    }
}

/// Known module values after stamping; `None` where data shows through.
struct Stamp {
    side: i32,
    cells: Vec<Option<bool>>,
}

impl Stamp {
    fn new(side: usize) -> Self {
        Stamp {
            side: side as i32,
            cells: vec![None; side * side],
        }
    }

    fn get(&self, x: i32, y: i32) -> Option<bool> {
        if (0..self.side).contains(&x) && (0..self.side).contains(&y) {
            self.cells[(y * self.side + x) as usize]
        } else {
            None
        }
    }

    fn set(&mut self, x: i32, y: i32, v: bool) {
        if (0..self.side).contains(&x) && (0..self.side).contains(&y) {
            self.cells[(y * self.side + x) as usize] = Some(v);
        }
    }
}

/// Stamps fakes first, then the fourth finder with its separator, so the
/// finder is intact wherever they meet.
fn stamp(side: usize, fakes: &[(i32, i32)]) -> Stamp {
    let mut s = Stamp::new(side);
    for &(cx, cy) in fakes {
        for dy in -2..=2i32 {
            for dx in -2..=2i32 {
                s.set(cx + dx, cy + dy, dx.abs().max(dy.abs()) != 1);
            }
        }
    }
    let o = side as i32 - 7;
    for dy in -1..7i32 {
        for dx in -1..7i32 {
            let ring = (dx - 3).abs().max((dy - 3).abs());
            s.set(o + dx, o + dy, ring != 2 && ring != 4);
        }
    }
    s
}

fn template_state(s: &Stamp, cx: i32, cy: i32) -> (bool, bool) {
    // (contradicted by a known cell, fully confirmed by known cells)
    let mut broken = false;
    let mut confirmed = true;
    for &(dx, dy, dark) in &ALIGNMENT_TEMPLATE {
        match s.get(cx + dx, cy + dy) {
            Some(v) if v != dark => broken = true,
            Some(_) => {}
            None => confirmed = false,
        }
    }
    (broken, confirmed)
}

/// Side of the corner-anchored square holding every stamped module.
fn layout_bbox(side: usize, fakes: &[(i32, i32)]) -> usize {
    let s = side as i32;
    fakes
        .iter()
        .map(|&(x, y)| (s - (x - 2)).max(s - (y - 2)))
        .fold(8, i32::max) as usize
}

/// Planner ranking: bounding box, asymmetry, negated near displacement,
/// then the two offsets.
type RankKey = (usize, bool, i32, (i32, i32), (i32, i32));

/// Places the fourth finder and fake alignments with the smallest footprint
/// that still confuses the alignment search: every fake sits at least two
/// modules from the true center, one sits within four, and every window
/// offset the scanner would test before reaching a fake is ruled out by
/// stamped modules alone.
pub fn plan_distracter(spec: &SymbolSpec) -> Result<DistracterSpec, PeacockError> {
    let v = spec.version.value();
    if v < MIN_PEACOCK_VERSION {
        return Err(PeacockError::VersionTooLow(v));
    }
    let side = spec.side;
    let s = side as i32;
    let c = s - 7;
    let template = function_template(spec);
    let window = Tolerances::DEFAULT.alignment_window;
    let order = alignment_search_order(window);

    // Single fakes that fit the symbol and avoid other function patterns.
    let singles: Vec<(i32, i32)> = order
        .iter()
        .copied()
        .filter(|&(dx, dy)| dx * dx + dy * dy >= 4)
        .filter(|&(dx, dy)| {
            let (fx, fy) = (c + dx, c + dy);
            (-2..=2).all(|ky| {
                (-2..=2).all(|kx| {
                    let (x, y) = (fx + kx, fy + ky);
                    if !(0..s).contains(&x) || !(0..s).contains(&y) {
                        return false;
                    }
                    let in_true_alignment = (x - c).abs() <= 2 && (y - c).abs() <= 2;
                    in_true_alignment || !template.is_function(x as usize, y as usize)
                })
            })
        })
        .collect();

    let mut best: Option<(RankKey, [(i32, i32); 2])> = None;
    for (i, &a) in singles.iter().enumerate() {
        for &b in &singles[i + 1..] {
            let d2 = |(x, y): (i32, i32)| x * x + y * y;
            if d2(a).min(d2(b)) > 16 {
                continue;
            }
            let fakes = [(c + a.0, c + a.1), (c + b.0, c + b.1)];
            let st = stamp(side, &fakes);
            if !fakes.iter().all(|&(x, y)| {
                let (broken, confirmed) = template_state(&st, x, y);
                !broken && confirmed
            }) {
                continue;
            }
            let first = order.iter().position(|&o| o == a || o == b).unwrap();
            if !order[..first]
                .iter()
                .all(|&(dx, dy)| template_state(&st, c + dx, c + dy).0)
            {
                continue;
            }
            let bbox = layout_bbox(side, &fakes);
            let symmetric = a == (b.1, b.0);
            let near = d2(a).min(d2(b));
            // Smaller box, then mirror pairs, then the larger displacement.
            let key = (bbox, !symmetric, -near, a, b);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, [a, b]));
            }
        }
    }
    let (_, pair) = best.ok_or(PeacockError::Infeasible)?;
    let fakes: Vec<(usize, usize)> = pair
        .iter()
        .map(|&(dx, dy)| ((c + dx) as usize, (c + dy) as usize))
        .collect();
    let fake_i32: Vec<(i32, i32)> = fakes.iter().map(|&(x, y)| (x as i32, y as i32)).collect();
    let bbox = layout_bbox(side, &fake_i32);
    if envelope_side(bbox) > side {
        return Err(PeacockError::Infeasible);
    }
    let d = DistracterSpec {
        fourth_finder_origin: (side - 7, side - 7),
        fake_alignment_centers: fakes,
        suppressed_true_centers: vec![(side - 7, side - 7)],
        bbox_side: bbox,
        envelope: envelope_for(side, bbox),
    };
    if !envelope_damage(spec, &d.envelope)
        .iter()
        .all(|b| b.codewords <= b.capacity_t)
    {
        return Err(PeacockError::Infeasible);
    }
    Ok(d)
}

/// Per-block count of distinct codewords with a module inside `env`.
pub fn envelope_damage(spec: &SymbolSpec, env: &OcclusionEnvelope) -> Vec<BlockDamage> {
    let template = function_template(spec);
    let order = placement_order(&template);
    let map = interleave_map(spec);
    let mut touched = vec![false; spec.total_codewords];
    for (i, &(x, y)) in order.iter().enumerate().take(8 * spec.total_codewords) {
        if env.side_modules > 0 && env.contains(x, y) {
            touched[i / 8] = true;
        }
    }
    let mut out: Vec<BlockDamage> = spec
        .blocks()
        .enumerate()
        .map(|(block, shape)| BlockDamage {
            block,
            codewords: 0,
            capacity_t: shape.capacity_t,
        })
        .collect();
    for (cw, &(block, _)) in map.iter().enumerate() {
        if touched[cw] {
            out[block].codewords += 1;
        }
    }
    out
}

/// Interleaved codeword indices with a module inside `env`.
pub fn envelope_codewords(spec: &SymbolSpec, env: &OcclusionEnvelope) -> Vec<usize> {
    let template = function_template(spec);
    let mut out: Vec<usize> = placement_order(&template)
        .iter()
        .enumerate()
        .take(8 * spec.total_codewords)
        .filter(|(_, &(x, y))| env.side_modules > 0 && env.contains(x, y))
        .map(|(i, _)| i / 8)
        .collect();
    out.dedup();
    out
}

/// Envelope budget of `d` against `spec`, plus how many modules the stamp
/// changes in `matrix`.
pub fn damage_report(matrix: &ModuleMatrix, spec: &SymbolSpec, d: &DistracterSpec) -> DamageReport {
    let per_block_errors = envelope_damage(spec, &d.envelope);
    let feasible = per_block_errors.iter().all(|b| b.codewords <= b.capacity_t);
    let stamped = apply_distracter(matrix, d);
    let modules_changed = matrix
        .modules()
        .iter()
        .zip(stamped.modules())
        .filter(|(a, b)| a != b)
        .count();
    DamageReport {
        modules_changed,
        per_block_errors,
        feasible,
    }
}

/// Stamps the fakes, then the fourth finder and its separator, and marks
/// every stamped module as function.
pub fn apply_distracter(matrix: &ModuleMatrix, d: &DistracterSpec) -> ModuleMatrix {
    let fakes: Vec<(i32, i32)> = d
        .fake_alignment_centers
        .iter()
        .map(|&(x, y)| (x as i32, y as i32))
        .collect();
    let st = stamp(matrix.side(), &fakes);
    let mut out = matrix.clone();
    let side = matrix.side();
    for y in 0..side {
        for x in 0..side {
            if let Some(v) = st.cells[y * side + x] {
                out.set_function(x, y, v);
            }
        }
    }
    out
}

fn certify(matrix: &ModuleMatrix, env: &OcclusionEnvelope, payload: &[u8]) -> Certification {
    let mut c = Certification {
        uncovered_finders: [0, 0],
        uncovered_decodes: 0,
        occluded_decodes: 0,
        occluded_renders: 0,
    };
    for (k, rot) in [Rotation::UPRIGHT, Rotation::DIAMOND].into_iter().enumerate() {
        let diag = inspect(&render_symbol(matrix, CERTIFY_SCALE, rot, None));
        c.uncovered_finders[k] = diag.census.finders;
        c.uncovered_decodes += diag.census.decoded;
        for lum in CERTIFY_LUMINANCES {
            c.occluded_renders += 1;
            let diag = inspect(&render_symbol(matrix, CERTIFY_SCALE, rot, Some((env, lum))));
            let ok = diag.census.decoded > 0
                && diag
                    .attempts
                    .iter()
                    .filter_map(|a| a.result.as_ref().ok())
                    .all(|d| d.payload == payload);
            c.occluded_decodes += ok as usize;
        }
    }
    c
}

/// EC levels to try, preferred first, then stronger ones.
fn ec_ladder(pref: EcLevel) -> Vec<EcLevel> {
    let mut out = vec![pref];
    let mut e = pref;
    while let Some(n) = e.stronger() {
        out.push(n);
        e = n;
    }
    out
}

/// Builds a certified peacocked symbol at the lowest workable version at
/// or above `min_version` (never below 2), trying `ec_preference` before
/// stronger levels at each version.
pub fn peacock(payload: &[u8], ec_preference: EcLevel, min_version: u8) -> Result<PqrArtifact, PeacockError> {
    let smallest = smallest_fitting(payload.len(), ec_preference, 1)?;
    let start = min_version.max(MIN_PEACOCK_VERSION).max(smallest.version.value());
    for v in start..=MAX_VERSION {
        for ec in ec_ladder(ec_preference) {
            let spec = symbol_spec(v, ec)?;
            if payload.len() > spec.byte_capacity() {
                continue;
            }
            let Ok(d) = plan_distracter(&spec) else {
                continue;
            };
            let (plain, mask) = generate_at(payload, &spec)?;
            let report = damage_report(&plain, &spec, &d);
            let matrix = apply_distracter(&plain, &d);
            let certification = certify(&matrix, &d.envelope, payload);
            if !certification.passed() {
                continue;
            }
            return Ok(PqrArtifact {
                matrix,
                payload: payload.to_vec(),
                spec,
                distracter: d,
                report,
                orientation_hint: Orientation::Upright,
                requested_ec: ec_preference,
                mask_id: mask.mask_id,
                certification,
            });
        }
    }
    Err(PeacockError::Infeasible)
}
