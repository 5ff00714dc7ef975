//! Multi-code scenes: placement, rotation, finger occluders, rendering and
//! seeded selection trials.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use core::fmt;
use libm::{ceil, floor};

use crate::peacock::{peacock, OcclusionEnvelope, PeacockError, PqrArtifact};
use crate::qr::{generate, EcLevel, ModuleMatrix, QrError};
use crate::scanner::{inspect, Bitmap, Diagnostics, Policy, DARK, LIGHT};

pub const DEFAULT_QUIET_ZONE: usize = 4;
pub const DEFAULT_OCCLUDER_LUMINANCE: u8 = 80;
/// Gap between neighboring quiet zones in grid layouts, in modules.
pub const GRID_GAP_MODULES: usize = 8;
const SUBSAMPLES: usize = 4;

/// Rotation in 45-degree steps; positive turns clockwise on screen (y down).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rotation(u8);

impl Rotation {
    pub const UPRIGHT: Rotation = Rotation(0);
    pub const DIAMOND: Rotation = Rotation(1);

    /// `None` unless `degrees` is a multiple of 45.
    pub fn from_degrees(degrees: i32) -> Option<Rotation> {
        (degrees % 45 == 0).then(|| Rotation((degrees / 45).rem_euclid(8) as u8))
    }

    pub fn degrees(self) -> u16 {
        self.0 as u16 * 45
    }

    pub fn is_diagonal(self) -> bool {
        self.0 % 2 == 1
    }

    /// (cos, sin).
    pub fn cos_sin(self) -> (f64, f64) {
        let r = FRAC_1_SQRT_2;
        [
            (1.0, 0.0),
            (r, r),
            (0.0, 1.0),
            (-r, r),
            (-1.0, 0.0),
            (-r, -r),
            (0.0, -1.0),
            (r, -r),
        ][self.0 as usize]
    }
}

/// One symbol on the canvas. `origin` is the top-left of the rotated
/// symbol's bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub matrix: ModuleMatrix,
    pub origin: (usize, usize),
    pub scale: usize,
    pub rotation: Rotation,
    pub quiet_zone: usize,
}

impl Placement {
    pub fn new(matrix: ModuleMatrix, origin: (usize, usize), scale: usize, rotation: Rotation) -> Self {
        Placement {
            matrix,
            origin,
            scale,
            rotation,
            quiet_zone: DEFAULT_QUIET_ZONE,
        }
    }

    /// Side of the unrotated symbol plus quiet zone, in pixels.
    pub fn width_px(&self) -> usize {
        (self.matrix.side() + 2 * self.quiet_zone) * self.scale
    }

    /// Side of the axis-aligned bounding box after rotation.
    pub fn bbox_px(&self) -> usize {
        bbox_side(self.width_px(), self.rotation)
    }

    fn center(&self) -> (f64, f64) {
        let half = self.bbox_px() as f64 / 2.0;
        (self.origin.0 as f64 + half, self.origin.1 as f64 + half)
    }

    /// Pixel position of module-space point (x, y).
    pub fn module_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let s = self.scale as f64;
        let half = self.width_px() as f64 / 2.0;
        let lx = (x + self.quiet_zone as f64) * s - half;
        let ly = (y + self.quiet_zone as f64) * s - half;
        let (c, sn) = self.rotation.cos_sin();
        let (cx, cy) = self.center();
        (cx + c * lx - sn * ly, cy + sn * lx + c * ly)
    }

    /// Corners of the quiet-zone square in pixels.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let q = self.quiet_zone as f64;
        let e = self.matrix.side() as f64 + q;
        [
            self.module_to_pixel(-q, -q),
            self.module_to_pixel(e, -q),
            self.module_to_pixel(e, e),
            self.module_to_pixel(-q, e),
        ]
    }

    /// Luminance at a pixel-space point, `None` outside the quiet zone.
    fn sample(&self, px: f64, py: f64, center: (f64, f64), half: f64) -> Option<u8> {
        let (c, s) = self.rotation.cos_sin();
        let (dx, dy) = (px - center.0, py - center.1);
        let lx = c * dx + s * dy + half;
        let ly = -s * dx + c * dy + half;
        let w = 2.0 * half;
        if !(0.0..w).contains(&lx) || !(0.0..w).contains(&ly) {
            return None;
        }
        let scale = self.scale as f64;
        let mx = floor(lx / scale) as isize - self.quiet_zone as isize;
        let my = floor(ly / scale) as isize - self.quiet_zone as isize;
        let side = self.matrix.side() as isize;
        let dark = (0..side).contains(&mx) && (0..side).contains(&my) && self.matrix.get(mx as usize, my as usize);
        Some(if dark { DARK } else { LIGHT })
    }
}

fn bbox_side(width: usize, rotation: Rotation) -> usize {
    if rotation.is_diagonal() {
        ceil(width as f64 * SQRT_2) as usize
    } else {
        width
    }
}

/// An opaque ellipse painted over the scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occluder {
    pub center: (f64, f64),
    pub radii: (f64, f64),
    pub luminance: u8,
}

impl Occluder {
    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let u = (x - self.center.0) / self.radii.0;
        let v = (y - self.center.1) / self.radii.1;
        u * u + v * v <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: usize,
    pub height: usize,
    pub placements: Vec<Placement>,
    pub occluders: Vec<Occluder>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SceneError {
    Overlap(usize, usize),
    OutsideCanvas(usize),
    IndexOutOfRange(usize),
    InvalidTrialConfig,
    Qr(QrError),
    Peacock(PeacockError),
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::Overlap(a, b) => write!(f, "placements {a} and {b} overlap"),
            SceneError::OutsideCanvas(i) => write!(f, "placement {i} extends past the canvas"),
            SceneError::IndexOutOfRange(i) => write!(f, "no placement at index {i}"),
            SceneError::InvalidTrialConfig => f.write_str("need at least two codes and a target below the code count"),
            SceneError::Qr(e) => write!(f, "{e}"),
            SceneError::Peacock(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SceneError {}

/// Separating-axis test on two convex quads; touching counts as apart.
fn quads_overlap(a: &[(f64, f64); 4], b: &[(f64, f64); 4]) -> bool {
    const EPS: f64 = 1e-9;
    for quad in [a, b] {
        for i in 0..4 {
            let (p, q) = (quad[i], quad[(i + 1) % 4]);
            let axis = (q.1 - p.1, p.0 - q.0);
            let proj = |pts: &[(f64, f64); 4]| {
                pts.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &(x, y)| {
                    let d = x * axis.0 + y * axis.1;
                    (lo.min(d), hi.max(d))
                })
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            if ahi <= blo + EPS || bhi <= alo + EPS {
                return false;
            }
        }
    }
    true
}

impl Scene {
    pub fn new(width: usize, height: usize) -> Self {
        Scene {
            width,
            height,
            placements: Vec::new(),
            occluders: Vec::new(),
        }
    }

    /// A canvas exactly fitting one placement at the origin.
    pub fn single(matrix: ModuleMatrix, scale: usize, rotation: Rotation) -> Self {
        let p = Placement::new(matrix, (0, 0), scale, rotation);
        let side = p.bbox_px();
        Scene {
            width: side,
            height: side,
            placements: alloc::vec![p],
            occluders: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let quads: Vec<_> = self.placements.iter().map(|p| p.corners()).collect();
        for (i, p) in self.placements.iter().enumerate() {
            let b = p.bbox_px();
            if p.origin.0 + b > self.width || p.origin.1 + b > self.height {
                return Err(SceneError::OutsideCanvas(i));
            }
            for j in 0..i {
                if quads_overlap(&quads[i], &quads[j]) {
                    return Err(SceneError::Overlap(j, i));
                }
            }
        }
        Ok(())
    }
}

/// Rasterizes the scene with 4x4 supersampling per pixel.
pub fn render(scene: &Scene) -> Result<Bitmap, SceneError> {
    scene.validate()?;
    let mut out = Bitmap::new(scene.width, scene.height, LIGHT);
    let geo: Vec<_> = scene
        .placements
        .iter()
        .map(|p| (p.center(), p.width_px() as f64 / 2.0, p.origin, p.bbox_px()))
        .collect();
    let step = 1.0 / SUBSAMPLES as f64;
    for y in 0..scene.height {
        for x in 0..scene.width {
            let hits: Vec<usize> = geo
                .iter()
                .enumerate()
                .filter(|(_, g)| (g.2 .0..g.2 .0 + g.3).contains(&x) && (g.2 .1..g.2 .1 + g.3).contains(&y))
                .map(|(i, _)| i)
                .collect();
            let near_occluder = scene.occluders.iter().any(|o| {
                let (fx, fy) = (x as f64 + 0.5, y as f64 + 0.5);
                (fx - o.center.0).abs() <= o.radii.0 + 1.0 && (fy - o.center.1).abs() <= o.radii.1 + 1.0
            });
            if hits.is_empty() && !near_occluder {
                continue;
            }
            let mut sum = 0u32;
            for sy in 0..SUBSAMPLES {
                for sx in 0..SUBSAMPLES {
                    let px = x as f64 + (sx as f64 + 0.5) * step;
                    let py = y as f64 + (sy as f64 + 0.5) * step;
                    let mut v = LIGHT;
                    for &i in &hits {
                        if let Some(s) = scene.placements[i].sample(px, py, geo[i].0, geo[i].1) {
                            v = s;
                        }
                    }
                    for o in &scene.occluders {
                        if o.contains(px, py) {
                            v = o.luminance;
                        }
                    }
                    sum += v as u32;
                }
            }
            let n = (SUBSAMPLES * SUBSAMPLES) as u32;
            out.set(x, y, ((sum + n / 2) / n) as u8);
        }
    }
    Ok(out)
}

/// The finger disc for `envelope` on `placement`, in scene pixels.
pub fn envelope_occluder(placement: &Placement, envelope: &OcclusionEnvelope, luminance: u8) -> Occluder {
    let (mx, my) = envelope.cover_center;
    let center = placement.module_to_pixel(mx, my);
    let r = envelope.cover_radius * placement.scale as f64;
    Occluder {
        center,
        radii: (r, r),
        luminance,
    }
}

/// Adds a finger over the damaged corner of placement `index`.
pub fn occlude_corner(scene: &Scene, index: usize, artifact: &PqrArtifact) -> Result<Scene, SceneError> {
    occlude_corner_with(scene, index, artifact, DEFAULT_OCCLUDER_LUMINANCE)
}

pub fn occlude_corner_with(
    scene: &Scene,
    index: usize,
    artifact: &PqrArtifact,
    luminance: u8,
) -> Result<Scene, SceneError> {
    let p = scene.placements.get(index).ok_or(SceneError::IndexOutOfRange(index))?;
    let mut out = scene.clone();
    out.occluders
        .push(envelope_occluder(p, &artifact.distracter.envelope, luminance));
    Ok(out)
}

/// Renders one symbol alone, optionally with its finger.
pub fn render_symbol(
    matrix: &ModuleMatrix,
    scale: usize,
    rotation: Rotation,
    cover: Option<(&OcclusionEnvelope, u8)>,
) -> Bitmap {
    let mut scene = Scene::single(matrix.clone(), scale, rotation);
    if let Some((env, lum)) = cover {
        let o = envelope_occluder(&scene.placements[0], env, lum);
        scene.occluders.push(o);
    }
    render(&scene).expect("single placement always fits")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialMode {
    Plain,
    Pqr,
}

impl TrialMode {
    pub fn name(self) -> &'static str {
        match self {
            TrialMode::Plain => "plain",
            TrialMode::Pqr => "pqr",
        }
    }
}

/// Everything that shapes a batch of selection trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialConfig {
    pub n_codes: usize,
    pub mode: TrialMode,
    pub target: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub scale: usize,
    pub ec: EcLevel,
    pub rotation: Rotation,
    /// Finger luminance in pqr mode; `None` leaves every code uncovered.
    pub occluder_luminance: Option<u8>,
}

impl TrialConfig {
    pub fn new(n_codes: usize, mode: TrialMode, target: usize, trials: usize, base_seed: u64) -> Self {
        TrialConfig {
            n_codes,
            mode,
            target,
            trials,
            base_seed,
            scale: 4,
            ec: EcLevel::M,
            rotation: Rotation::UPRIGHT,
            occluder_luminance: Some(DEFAULT_OCCLUDER_LUMINANCE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialStats {
    pub trials: usize,
    pub target_hit: usize,
    pub other_hit: usize,
    pub none: usize,
    /// Decodes per code index.
    pub histogram: Vec<usize>,
}

impl TrialStats {
    pub fn empty(n_codes: usize) -> Self {
        TrialStats {
            trials: 0,
            target_hit: 0,
            other_hit: 0,
            none: 0,
            histogram: alloc::vec![0; n_codes],
        }
    }

    /// Folds one trial result (index of the decoded code) in.
    pub fn record(&mut self, target: usize, hit: Option<usize>) {
        self.trials += 1;
        match hit {
            Some(i) => {
                self.histogram[i] += 1;
                if i == target {
                    self.target_hit += 1;
                } else {
                    self.other_hit += 1;
                }
            }
            None => self.none += 1,
        }
    }

    pub fn target_accuracy(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.target_hit as f64 / self.trials as f64
        }
    }
}

/// Distinct payload for code `i` of a trial scene.
pub fn trial_payload(i: usize) -> Vec<u8> {
    format!("https://example.org/poster/{i}").into_bytes()
}

/// A rendered trial scene with every hypothesis already evaluated; each
/// trial only replays the seeded selection.
#[derive(Debug, Clone)]
pub struct TrialScene {
    pub config: TrialConfig,
    pub scene: Scene,
    pub payloads: Vec<Vec<u8>>,
    pub diagnostics: Diagnostics,
}

impl TrialScene {
    pub fn build(config: &TrialConfig) -> Result<TrialScene, SceneError> {
        if config.n_codes < 2 || config.target >= config.n_codes {
            return Err(SceneError::InvalidTrialConfig);
        }
        let payloads: Vec<Vec<u8>> = (0..config.n_codes).map(trial_payload).collect();
        let mut matrices = Vec::with_capacity(config.n_codes);
        let mut artifacts: Vec<Option<PqrArtifact>> = Vec::with_capacity(config.n_codes);
        for p in &payloads {
            match config.mode {
                TrialMode::Plain => {
                    matrices.push(generate(p, config.ec, 1).map_err(SceneError::Qr)?);
                    artifacts.push(None);
                }
                TrialMode::Pqr => {
                    let a = peacock(p, config.ec, 2).map_err(SceneError::Peacock)?;
                    matrices.push(a.matrix.clone());
                    artifacts.push(Some(a));
                }
            }
        }
        let mut scene = grid_scene(matrices, config.scale, config.rotation);
        if let (Some(lum), Some(a)) = (config.occluder_luminance, &artifacts[config.target]) {
            scene = occlude_corner_with(&scene, config.target, a, lum)?;
        }
        let bitmap = render(&scene)?;
        Ok(TrialScene {
            config: config.clone(),
            scene,
            payloads,
            diagnostics: inspect(&bitmap),
        })
    }

    /// Index of the code trial `i` selects, if any.
    pub fn run_one(&self, i: usize) -> Option<usize> {
        let seed = self.config.base_seed.wrapping_add(i as u64);
        let report = self.diagnostics.select(Policy::Arbitrary, seed);
        let payload = report.outcome.payload()?;
        self.payloads.iter().position(|p| p.as_slice() == payload)
    }
}

/// Lays symbols out on a grid with [`GRID_GAP_MODULES`] between quiet zones.
pub fn grid_scene(matrices: Vec<ModuleMatrix>, scale: usize, rotation: Rotation) -> Scene {
    let n = matrices.len();
    let mut cols = 1;
    while cols * cols < n {
        cols += 1;
    }
    let rows = n.div_ceil(cols.max(1));
    let q = DEFAULT_QUIET_ZONE;
    let cell = matrices
        .iter()
        .map(|m| bbox_side((m.side() + 2 * q) * scale, rotation))
        .max()
        .unwrap_or(0);
    let gap = GRID_GAP_MODULES * scale;
    let mut scene = Scene::new(cols * cell + (cols + 1) * gap, rows * cell + (rows + 1) * gap);
    for (i, m) in matrices.into_iter().enumerate() {
        let (c, r) = (i % cols, i / cols);
        let origin = (gap + c * (cell + gap), gap + r * (cell + gap));
        scene.placements.push(Placement::new(m, origin, scale, rotation));
    }
    scene
}

/// Runs `config.trials` seeded trials in order.
pub fn run_selection_trials(config: &TrialConfig) -> Result<TrialStats, SceneError> {
    if config.trials == 0 {
        return Ok(TrialStats::empty(config.n_codes));
    }
    let ts = TrialScene::build(config)?;
    let mut stats = TrialStats::empty(config.n_codes);
    for i in 0..config.trials {
        stats.record(config.target, ts.run_one(i));
    }
    Ok(stats)
}
