//! Finder-pattern detection: 1:1:3:1:1 row scans, cross-checks through the
//! candidate center, and merging of repeated hits.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use libm::floor;

use super::bitmap::Bitmap;
use super::tolerances::Tolerances;

const NOMINAL: [f64; 5] = [1.0, 1.0, 3.0, 1.0, 1.0];

/// A located finder pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinderCandidate {
    /// Sub-pixel center (x, y).
    pub center: (f64, f64),
    pub module_px: f64,
    /// Scan lines that confirmed this candidate (row scans plus the column
    /// cross-check of the first).
    pub hits: usize,
}

/// Checks five run widths against 1:1:3:1:1.
fn ratio_ok(runs: &[f64; 5], tol: f64) -> bool {
    let total: f64 = runs.iter().sum();
    if total < 7.0 {
        return false;
    }
    let unit = total / 7.0;
    runs.iter()
        .zip(NOMINAL.iter())
        .all(|(&r, &n)| (r - n * unit).abs() < tol * n * unit)
}

/// Counts the five runs centered on (x, y) along direction (dx, dy). The
/// start pixel must be dark. Returns the runs and the offset of the center
/// run's midpoint from (x, y) in steps.
fn runs_through(b: &Bitmap, x: isize, y: isize, dx: isize, dy: isize) -> Option<([f64; 5], f64)> {
    if !b.is_dark_at(x, y) {
        return None;
    }
    // Walk one way: core remainder, light ring, dark ring.
    let walk = |sx: isize, sy: isize| -> Option<[usize; 3]> {
        let mut counts = [0usize; 3];
        let (mut cx, mut cy) = (x, y);
        let mut state = 0;
        loop {
            cx += sx;
            cy += sy;
            if !(0..b.width() as isize).contains(&cx) || !(0..b.height() as isize).contains(&cy) {
                return (state == 2).then_some(counts);
            }
            let dark = b.is_dark_at(cx, cy);
            if dark == (state != 1) {
                counts[state] += 1;
                continue;
            }
            if state == 2 {
                return Some(counts);
            }
            state += 1;
            counts[state] += 1;
        }
    };
    let fwd = walk(dx, dy)?;
    let back = walk(-dx, -dy)?;
    let runs = [
        back[2] as f64,
        back[1] as f64,
        (back[0] + fwd[0] + 1) as f64,
        fwd[1] as f64,
        fwd[2] as f64,
    ];
    // Center run spans [-back0, fwd0] in steps.
    let mid = (fwd[0] as f64 - back[0] as f64) / 2.0;
    Some((runs, mid))
}

struct Detection {
    cx: f64,
    cy: f64,
    module: f64,
    count: usize,
}

/// Validates a row hit at (cx, row) and returns its refined center and the
/// four run totals (horizontal, vertical, diagonal, anti-diagonal) in pixels.
fn cross_check(b: &Bitmap, cx: f64, row: usize, h_total: f64, tol: f64) -> Option<(f64, f64, [f64; 4])> {
    let x = floor(cx) as isize;
    let (vruns, vmid) = runs_through(b, x, row as isize, 0, 1)?;
    let v_total: f64 = vruns.iter().sum();
    if !ratio_ok(&vruns, tol) || 5.0 * (v_total - h_total).abs() >= 2.0 * h_total {
        return None;
    }
    let cy = row as f64 + 0.5 + vmid;
    let y = floor(cy) as isize;
    let (hruns, hmid) = runs_through(b, x, y, 1, 0)?;
    if !ratio_ok(&hruns, tol) {
        return None;
    }
    let cx = x as f64 + 0.5 + hmid;
    let xi = floor(cx) as isize;
    let (druns, _) = runs_through(b, xi, y, 1, 1)?;
    let (aruns, _) = runs_through(b, xi, y, 1, -1)?;
    if !ratio_ok(&druns, tol) || !ratio_ok(&aruns, tol) {
        return None;
    }
    let sq2 = core::f64::consts::SQRT_2;
    let totals = [
        hruns.iter().sum::<f64>(),
        v_total,
        druns.iter().sum::<f64>() * sq2,
        aruns.iter().sum::<f64>() * sq2,
    ];
    Some((cx, cy, totals))
}

/// Module size averaged over every row and column crossing the core within
/// one module of the center. A dark run plus its neighbouring light run
/// keeps its width when edges shift, so the outer pairs on each side
/// measure two modules; the center run is skipped.
fn pair_module(b: &Bitmap, cx: f64, cy: f64, module: f64, diagonal: bool) -> f64 {
    let pairs = |r: &[f64; 5]| (r[0] + r[1] + r[3] + r[4]) / 4.0;
    let (mut sum, mut n) = (0.0, 0usize);
    let (xi, yi) = (floor(cx) as isize, floor(cy) as isize);
    let reach = floor(module) as isize;
    for k in -reach..=reach {
        for (x, y, dx, dy) in [(xi, yi + k, 1, 0), (xi + k, yi, 0, 1)] {
            if let Some((runs, _)) = runs_through(b, x, y, dx, dy) {
                sum += pairs(&runs);
                n += 1;
            }
        }
    }
    if n == 0 {
        return module;
    }
    let m = sum / n as f64;
    if diagonal {
        m * FRAC_1_SQRT_2
    } else {
        m
    }
}

/// Whether the finder is turned by 45 degrees: its diagonal runs are then
/// shorter than its row and column runs.
fn is_diagonal(totals: &[f64; 4]) -> bool {
    totals[2] + totals[3] < totals[0] + totals[1]
}

/// Finder candidates of a binarized bitmap, in raster order of their
/// centers.
pub fn locate_finders(binary: &Bitmap) -> Vec<FinderCandidate> {
    locate_finders_with(binary, &Tolerances::DEFAULT)
}

pub fn locate_finders_with(binary: &Bitmap, tol: &Tolerances) -> Vec<FinderCandidate> {
    let mut found: Vec<(Detection, bool)> = Vec::new();
    let w = binary.width();
    for y in 0..binary.height() {
        // Run-length encode the row.
        let mut runs: Vec<(usize, usize, bool)> = Vec::new();
        let mut start = 0;
        for x in 1..=w {
            if x == w || (binary.get(x, y) == super::bitmap::DARK) != (binary.get(start, y) == super::bitmap::DARK) {
                runs.push((start, x - start, binary.get(start, y) == super::bitmap::DARK));
                start = x;
            }
        }
        for win in runs.windows(5) {
            if !win[0].2 {
                continue;
            }
            let widths: [f64; 5] = core::array::from_fn(|i| win[i].1 as f64);
            if !ratio_ok(&widths, tol.run_ratio) {
                continue;
            }
            let h_total: f64 = widths.iter().sum();
            let cx = win[2].0 as f64 + widths[2] / 2.0;
            let Some((cx, cy, totals)) = cross_check(binary, cx, y, h_total, tol.run_ratio) else {
                continue;
            };
            let diagonal = is_diagonal(&totals);
            let shortest = if diagonal {
                totals[2] + totals[3]
            } else {
                totals[0] + totals[1]
            };
            let module = shortest / 14.0;
            let merge = found.iter_mut().find(|(d, _)| {
                let r = tol.merge_radius_modules * d.module.max(module);
                (d.cx - cx) * (d.cx - cx) + (d.cy - cy) * (d.cy - cy) <= r * r
            });
            match merge {
                Some((d, _)) => {
                    let k = d.count as f64;
                    d.cx = (d.cx * k + cx) / (k + 1.0);
                    d.cy = (d.cy * k + cy) / (k + 1.0);
                    d.module = (d.module * k + module) / (k + 1.0);
                    d.count += 1;
                }
                None => found.push((
                    Detection {
                        cx,
                        cy,
                        module,
                        count: 1,
                    },
                    diagonal,
                )),
            }
        }
    }
    let mut out: Vec<FinderCandidate> = found
        .into_iter()
        .map(|(d, diagonal)| FinderCandidate {
            center: (d.cx, d.cy),
            module_px: pair_module(binary, d.cx, d.cy, d.module, diagonal),
            hits: d.count + 1,
        })
        .collect();
    out.sort_by(|a, b| {
        let ka = (floor(a.center.1), floor(a.center.0));
        let kb = (floor(b.center.1), floor(b.center.0));
        ka.partial_cmp(&kb).unwrap_or(core::cmp::Ordering::Equal)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scanner::bitmap::{DARK, LIGHT};

    fn draw_finder(b: &mut Bitmap, ox: usize, oy: usize, s: usize) {
        for my in 0..7 {
            for mx in 0..7 {
                let d = (mx as isize - 3).abs().max((my as isize - 3).abs());
                let v = if d == 2 { LIGHT } else { DARK };
                for py in 0..s {
                    for px in 0..s {
                        b.set(ox + mx * s + px, oy + my * s + py, v);
                    }
                }
            }
        }
    }

    #[test]
    fn blank_has_none() {
        assert!(locate_finders(&Bitmap::new(50, 50, LIGHT)).is_empty());
    }

    #[test]
    fn single_finder_center_and_size() {
        let mut b = Bitmap::new(60, 60, LIGHT);
        draw_finder(&mut b, 10, 12, 4);
        let c = locate_finders(&b);
        assert_eq!(c.len(), 1);
        assert!((c[0].center.0 - 24.0).abs() < 1e-9);
        assert!((c[0].center.1 - 26.0).abs() < 1e-9);
        assert!((c[0].module_px - 4.0).abs() < 1e-9);
        assert!(c[0].hits >= 2);
    }

    #[test]
    fn ratio_tolerance_is_strict_half() {
        assert!(ratio_ok(&[1.0, 1.0, 3.0, 1.0, 1.0], 0.5));
        assert!(!ratio_ok(&[1.0, 1.0, 1.0, 1.0, 1.0], 0.5));
        assert!(!ratio_ok(&[2.0, 1.0, 3.0, 1.0, 1.0], 0.5));
    }
}
