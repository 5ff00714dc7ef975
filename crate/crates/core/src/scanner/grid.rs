use alloc::vec::Vec;
use libm::floor;

use super::bitmap::{Bitmap, DARK};
use super::tolerances::Tolerances;
use super::triple::TripleHypothesis;

/// Cells an alignment match must show, relative to its center: dark
/// center, light inner ring, and the four dark outer-ring cells on the axes.
pub const ALIGNMENT_TEMPLATE: [(i32, i32, bool); 13] = [
    (0, 0, true),
    (-1, -1, false),
    (0, -1, false),
    (1, -1, false),
    (-1, 0, false),
    (1, 0, false),
    (-1, 1, false),
    (0, 1, false),
    (1, 1, false),
    (2, 0, true),
    (-2, 0, true),
    (0, 2, true),
    (0, -2, true),
];

/// Window offsets in search order: nearest to the projection first, ties
/// broken by row then column.
pub fn alignment_search_order(window: i32) -> Vec<(i32, i32)> {
    let mut v: Vec<(i32, i32)> = (-window..=window)
        .flat_map(|dy| (-window..=window).map(move |dx| (dx, dy)))
        .collect();
    v.sort_by_key(|&(dx, dy)| (dx * dx + dy * dy, dy, dx));
    v
}

/// Outcome of the alignment search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlignmentFit {
    /// Version 1 has no alignment pattern.
    NotSearched,
    NotFound,
    /// Match at `offset` modules from the projected center, refined to
    /// `pixel`.
    Found {
        offset: (i32, i32),
        pixel: (f64, f64),
    },
}

/// Module-to-pixel mapping for one hypothesis. Module coordinates are
/// continuous: module (x, y) spans [x, x+1) x [y, y+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridModel {
    /// Projective coefficients h0..h7 (h8 = 1).
    pub h: [f64; 8],
    pub side: usize,
    pub alignment: AlignmentFit,
}

impl GridModel {
    #[inline]
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let h = &self.h;
        let w = h[6] * x + h[7] * y + 1.0;
        ((h[0] * x + h[1] * y + h[2]) / w, (h[3] * x + h[4] * y + h[5]) / w)
    }

    /// Binary sample at the center of module (x, y); outside the image is
    /// light.
    #[inline]
    pub fn sample(&self, binary: &Bitmap, x: i32, y: i32) -> bool {
        let (px, py) = self.map(x as f64 + 0.5, y as f64 + 0.5);
        binary.is_dark_at(floor(px) as isize, floor(py) as isize)
    }

    pub fn is_projective(&self) -> bool {
        self.h[6] != 0.0 || self.h[7] != 0.0
    }
}

fn affine(side: usize, h: &TripleHypothesis) -> GridModel {
    let d = side as f64 - 7.0;
    let k = h.corner.center;
    let a = h.arm_a.center;
    let b = h.arm_b.center;
    let (ux, uy) = ((a.0 - k.0) / d, (a.1 - k.1) / d);
    let (wx, wy) = ((b.0 - k.0) / d, (b.1 - k.1) / d);
    // p = k + (X - 3.5) u + (Y - 3.5) w
    GridModel {
        h: [ux, wx, k.0 - 3.5 * (ux + wx), uy, wy, k.1 - 3.5 * (uy + wy), 0.0, 0.0],
        side,
        alignment: AlignmentFit::NotSearched,
    }
}

/// Solves for the projective map sending each `src` module point to its
/// `dst` pixel point.
fn homography(src: &[(f64, f64); 4], dst: &[(f64, f64); 4]) -> Option<[f64; 8]> {
    let mut a = [[0.0f64; 9]; 8];
    for i in 0..4 {
        let (x, y) = src[i];
        let (u, v) = dst[i];
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u, u];
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v, v];
    }
    for col in 0..8 {
        let pivot = (col..8).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col];
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                if f != 0.0 {
                    for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    Some(core::array::from_fn(|i| a[i][8] / a[i][i]))
}

fn template_matches(binary: &Bitmap, g: &GridModel, cx: i32, cy: i32) -> bool {
    ALIGNMENT_TEMPLATE
        .iter()
        .all(|&(dx, dy, dark)| g.sample(binary, cx + dx, cy + dy) == dark)
}

/// Dark-pixel centroid within a box of `half` pixels around `p`.
fn centroid(binary: &Bitmap, p: (f64, f64), half: f64) -> Option<(f64, f64)> {
    let x0 = floor(p.0 - half).max(0.0) as usize;
    let y0 = floor(p.1 - half).max(0.0) as usize;
    let x1 = ((floor(p.0 + half) + 1.0).max(0.0) as usize).min(binary.width());
    let y1 = ((floor(p.1 + half) + 1.0).max(0.0) as usize).min(binary.height());
    let (mut n, mut sx, mut sy) = (0usize, 0.0, 0.0);
    for y in y0..y1 {
        for x in x0..x1 {
            let (fx, fy) = (x as f64 + 0.5, y as f64 + 0.5);
            if (fx - p.0).abs() <= half && (fy - p.1).abs() <= half && binary.get(x, y) == DARK {
                n += 1;
                sx += fx;
                sy += fy;
            }
        }
    }
    (n > 0).then(|| (sx / n as f64, sy / n as f64))
}

/// Affine grid from the three finder centers, upgraded to a four-point
/// projective grid when an alignment match is found near the projected
/// bottom-right alignment center.
pub fn fit_grid(binary: &Bitmap, h: &TripleHypothesis) -> GridModel {
    fit_grid_with(binary, h, &Tolerances::DEFAULT)
}

pub fn fit_grid_with(binary: &Bitmap, h: &TripleHypothesis, tol: &Tolerances) -> GridModel {
    let side = 4 * h.est_version as usize + 17;
    let mut g = affine(side, h);
    if h.est_version < 2 {
        return g;
    }
    g.alignment = AlignmentFit::NotFound;
    let c = side as i32 - 7;
    for (dx, dy) in alignment_search_order(tol.alignment_window) {
        if !template_matches(binary, &g, c + dx, c + dy) {
            continue;
        }
        let guess = g.map((c + dx) as f64 + 0.5, (c + dy) as f64 + 0.5);
        let Some(pixel) = centroid(binary, guess, 0.9 * h.est_module_px) else {
            continue;
        };
        let s = side as f64;
        let src = [(3.5, 3.5), (s - 3.5, 3.5), (3.5, s - 3.5), (s - 6.5, s - 6.5)];
        let dst = [h.corner.center, h.arm_a.center, h.arm_b.center, pixel];
        if let Some(coef) = homography(&src, &dst) {
            g.h = coef;
        }
        g.alignment = AlignmentFit::Found {
            offset: (dx, dy),
            pixel,
        };
        break;
    }
    g
}
