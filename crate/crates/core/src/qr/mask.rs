//! Data masks and the four-rule penalty score used to choose between them.

use super::matrix::ModuleMatrix;

pub const PENALTY_N1: u32 = 3;
pub const PENALTY_N2: u32 = 3;
pub const PENALTY_N3: u32 = 40;
pub const PENALTY_N4: u32 = 10;

/// The selected mask and its score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskChoice {
    pub mask_id: u8,
    pub penalty: u32,
}

/// Whether mask `id` inverts the module at column `x`, row `y`.
#[inline]
pub fn mask_bit(id: u8, x: usize, y: usize) -> bool {
    match id {
        0 => (x + y).is_multiple_of(2),
        1 => y.is_multiple_of(2),
        2 => x.is_multiple_of(3),
        3 => (x + y).is_multiple_of(3),
        4 => (x / 3 + y / 2).is_multiple_of(2),
        5 => x * y % 2 + x * y % 3 == 0,
        6 => (x * y % 2 + x * y % 3).is_multiple_of(2),
        7 => ((x + y) % 2 + x * y % 3).is_multiple_of(2),
        _ => panic!("mask id {id} out of range"),
    }
}

/// XORs mask `id` onto every non-function module. Applying it twice undoes it.
pub fn apply_mask(m: &mut ModuleMatrix, id: u8) {
    let side = m.side();
    for y in 0..side {
        for x in 0..side {
            if !m.is_function(x, y) && mask_bit(id, x, y) {
                let v = m.get(x, y);
                m.set(x, y, !v);
            }
        }
    }
}

/// Sum of the four standard penalty rules.
pub fn penalty(m: &ModuleMatrix) -> u32 {
    run_penalty(m) + block_penalty(m) + finder_like_penalty(m) + balance_penalty(m)
}

fn line(m: &ModuleMatrix, horizontal: bool, a: usize) -> impl Fn(usize) -> bool + '_ {
    move |b| if horizontal { m.get(b, a) } else { m.get(a, b) }
}

/// Rule 1: runs of five or more same-colored modules in a row or column.
pub fn run_penalty(m: &ModuleMatrix) -> u32 {
    let side = m.side();
    let mut score = 0;
    for horizontal in [true, false] {
        for a in 0..side {
            let at = line(m, horizontal, a);
            let mut run = 1;
            for b in 1..=side {
                if b < side && at(b) == at(b - 1) {
                    run += 1;
                    continue;
                }
                if run >= 5 {
                    score += PENALTY_N1 + (run - 5);
                }
                run = 1;
            }
        }
    }
    score
}

/// Rule 2: each 2x2 block of one color.
pub fn block_penalty(m: &ModuleMatrix) -> u32 {
    let side = m.side();
    let mut score = 0;
    for y in 0..side - 1 {
        for x in 0..side - 1 {
            let c = m.get(x, y);
            if c == m.get(x + 1, y) && c == m.get(x, y + 1) && c == m.get(x + 1, y + 1) {
                score += PENALTY_N2;
            }
        }
    }
    score
}

/// Rule 3: 1:1:3:1:1 runs with four light modules on one side.
pub fn finder_like_penalty(m: &ModuleMatrix) -> u32 {
    let side = m.side();
    let mut score = 0;
    if side < 11 {
        return 0;
    }
    for horizontal in [true, false] {
        for a in 0..side {
            let at = line(m, horizontal, a);
            for b in 0..=side - 11 {
                let window: [bool; 11] = core::array::from_fn(|k| at(b + k));
                if window == FINDER_LIKE_BEFORE || window == FINDER_LIKE_AFTER {
                    score += PENALTY_N3;
                }
            }
        }
    }
    score
}

/// Rule 4: 10 points per full 5% step away from half dark.
pub fn balance_penalty(m: &ModuleMatrix) -> u32 {
    let side = m.side();
    let total = (side * side) as u64;
    let dark = m.dark_count() as u64;
    let deviation = (dark * 100).abs_diff(total * 50);
    PENALTY_N4 * (deviation / (5 * total)) as u32
}

const FINDER_LIKE_AFTER: [bool; 11] = [true, false, true, true, true, false, true, false, false, false, false];
const FINDER_LIKE_BEFORE: [bool; 11] = [false, false, false, false, true, false, true, true, true, false, true];
