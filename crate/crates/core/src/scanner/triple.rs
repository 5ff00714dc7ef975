use alloc::vec::Vec;
use libm::{ceil, floor, round, sqrt};

use super::bitmap::Bitmap;
use super::finder::FinderCandidate;
use super::tolerances::Tolerances;
use crate::qr::{MAX_VERSION, MIN_VERSION};

/// Three finders assigned to the top-left (`corner`), top-right (`arm_a`)
/// and bottom-left (`arm_b`) positions of one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleHypothesis {
    pub corner: FinderCandidate,
    pub arm_a: FinderCandidate,
    pub arm_b: FinderCandidate,
    /// Indices of the three finders in the candidate list, same order.
    pub indices: [usize; 3],
    pub est_version: u8,
    pub est_module_px: f64,
    /// Estimated side in modules before snapping.
    pub est_dimension: f64,
}

impl TripleHypothesis {
    pub fn shares_finder(&self, other: &TripleHypothesis) -> bool {
        self.indices.iter().any(|i| other.indices.contains(i))
    }
}

fn sub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}

fn norm(v: (f64, f64)) -> f64 {
    sqrt(v.0 * v.0 + v.1 * v.1)
}

/// Side length read off the timing pattern that runs parallel to the segment
/// `from`-`to`, three modules toward `toward`. The line must start and end
/// in the finder rings and alternate in between with runs of one module.
fn timing_side(
    b: &Bitmap,
    from: (f64, f64),
    to: (f64, f64),
    toward: (f64, f64),
    module: f64,
    tol: &Tolerances,
) -> Option<usize> {
    let n = sub(toward, from);
    let ln = norm(n);
    let off = (3.0 * module * n.0 / ln, 3.0 * module * n.1 / ln);
    let p0 = (from.0 + off.0, from.1 + off.1);
    let d = sub(to, from);
    let steps = ceil(4.0 * norm(d)) as usize;
    if steps == 0 {
        return None;
    }
    let mut runs: Vec<(bool, usize)> = Vec::new();
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let (x, y) = (p0.0 + t * d.0, p0.1 + t * d.1);
        let dark = b.is_dark_at(floor(x) as isize, floor(y) as isize);
        match runs.last_mut() {
            Some((c, len)) if *c == dark => *len += 1,
            _ => runs.push((dark, 1)),
        }
    }
    if runs.len() < 9 || !runs[0].0 || !runs[runs.len() - 1].0 {
        return None;
    }
    let inner = &runs[1..runs.len() - 1];
    let mean = inner.iter().map(|r| r.1 as f64).sum::<f64>() / inner.len() as f64;
    if inner.iter().any(|r| (r.1 as f64 - mean).abs() >= tol.run_ratio * mean) {
        return None;
    }
    let pitch = mean * norm(d) / steps as f64;
    if pitch.max(module) / pitch.min(module) > tol.size_ratio {
        return None;
    }
    let side = inner.len() + 14;
    let v = side.checked_sub(17)? / 4;
    ((side - 17).is_multiple_of(4) && (MIN_VERSION as usize..=MAX_VERSION as usize).contains(&v)).then_some(side)
}

/// Tests one corner assignment; `a` and `b` may come in either order.
fn hypothesis(
    binary: Option<&Bitmap>,
    cands: &[FinderCandidate],
    k: usize,
    a: usize,
    b: usize,
    tol: &Tolerances,
) -> Option<TripleHypothesis> {
    let (ck, ca, cb) = (cands[k], cands[a], cands[b]);
    let u = sub(ca.center, ck.center);
    let w = sub(cb.center, ck.center);
    let (lu, lw) = (norm(u), norm(w));
    if lu == 0.0 || lw == 0.0 {
        return None;
    }
    let cos = (u.0 * w.0 + u.1 * w.1) / (lu * lw);
    if cos.abs() > tol.angle_cos || lu.max(lw) / lu.min(lw) > tol.length_ratio {
        return None;
    }
    let sizes = [ck.module_px, ca.module_px, cb.module_px];
    let smax = sizes.iter().cloned().fold(f64::MIN, f64::max);
    let smin = sizes.iter().cloned().fold(f64::MAX, f64::min);
    if smax / smin > tol.size_ratio {
        return None;
    }
    let arm = (lu + lw) / 2.0;
    let mut module = (sizes[0] + sizes[1] + sizes[2]) / 3.0;
    // Both timing patterns, when they read cleanly and agree, fix the side
    // exactly; finder sizes alone are too coarse at 45 degrees.
    let timed = binary.and_then(|bm| {
        let sa = timing_side(bm, ck.center, ca.center, cb.center, module, tol)?;
        let sb = timing_side(bm, ck.center, cb.center, ca.center, module, tol)?;
        (sa == sb).then_some(sa)
    });
    if let Some(side) = timed {
        module = arm / (side as f64 - 7.0);
    }
    let dimension = arm / module + 7.0;
    let v = round((dimension - 17.0) / 4.0);
    if v < MIN_VERSION as f64 || v > MAX_VERSION as f64 {
        return None;
    }
    if (dimension - (4.0 * v + 17.0)).abs() > tol.dimension_modules {
        return None;
    }
    // Right-handed in y-down coordinates: top-right cross bottom-left > 0.
    let (ia, ib) = if u.0 * w.1 - u.1 * w.0 > 0.0 { (a, b) } else { (b, a) };
    Some(TripleHypothesis {
        corner: ck,
        arm_a: cands[ia],
        arm_b: cands[ib],
        indices: [k, ia, ib],
        est_version: v as u8,
        est_module_px: module,
        est_dimension: dimension,
    })
}

/// Every geometrically valid triple over all 3-subsets and corner choices,
/// sized from the finders alone.
pub fn enumerate_triples(cands: &[FinderCandidate]) -> Vec<TripleHypothesis> {
    enumerate_triples_with(cands, &Tolerances::DEFAULT)
}

pub fn enumerate_triples_with(cands: &[FinderCandidate], tol: &Tolerances) -> Vec<TripleHypothesis> {
    collect(None, cands, tol)
}

/// As [`enumerate_triples_with`], but sizes each triple from its timing
/// patterns in `binary` where they can be read.
pub fn enumerate_triples_in(binary: &Bitmap, cands: &[FinderCandidate], tol: &Tolerances) -> Vec<TripleHypothesis> {
    collect(Some(binary), cands, tol)
}

fn collect(binary: Option<&Bitmap>, cands: &[FinderCandidate], tol: &Tolerances) -> Vec<TripleHypothesis> {
    let n = cands.len();
    let mut out: Vec<TripleHypothesis> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for (c, a, b) in [(i, j, k), (j, i, k), (k, i, j)] {
                    if let Some(h) = hypothesis(binary, cands, c, a, b, tol) {
                        if !out.iter().any(|o| o.indices == h.indices) {
                            out.push(h);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(x: f64, y: f64) -> FinderCandidate {
        FinderCandidate {
            center: (x, y),
            module_px: 4.0,
            hits: 2,
        }
    }

    #[test]
    fn fewer_than_three() {
        assert!(enumerate_triples(&[cand(0.0, 0.0), cand(10.0, 0.0)]).is_empty());
    }

    #[test]
    fn plain_symbol_layout() {
        // Version 1: finder centers 14 modules apart.
        let d = 14.0 * 4.0;
        let t = enumerate_triples(&[cand(30.0, 30.0), cand(30.0 + d, 30.0), cand(30.0, 30.0 + d)]);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].indices, [0, 1, 2]);
        assert_eq!(t[0].est_version, 1);
    }

    #[test]
    fn square_of_four_gives_four() {
        let d = 18.0 * 4.0;
        let c = [cand(0.0, 0.0), cand(d, 0.0), cand(0.0, d), cand(d, d)];
        let t = enumerate_triples(&c);
        assert_eq!(t.len(), 4);
        for h in &t {
            let u = sub(h.arm_a.center, h.corner.center);
            let w = sub(h.arm_b.center, h.corner.center);
            assert!(u.0 * w.1 - u.1 * w.0 > 0.0);
            assert_eq!(h.est_version, 2);
        }
    }

    #[test]
    fn dimension_tolerance_rejects_between_versions() {
        // 16 modules apart gives side 23, two away from both 21 and 25.
        let d = 16.0 * 4.0;
        assert!(enumerate_triples(&[cand(0.0, 0.0), cand(d, 0.0), cand(0.0, d)]).is_empty());
    }
}
