//! The module grid and the fixed function patterns drawn onto it.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::spec::SymbolSpec;
use crate::codec::{bch_encode_format, bch_encode_version};
use crate::qr::EcLevel;

/// Square grid of dark (`true`) and light modules, plus a map of which
/// modules belong to function patterns rather than codeword data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleMatrix {
    side: usize,
    modules: Vec<bool>,
    function_map: Vec<bool>,
}

impl ModuleMatrix {
    /// An all-light grid with no function modules.
    pub fn new(side: usize) -> Self {
        ModuleMatrix {
            side,
            modules: vec![false; side * side],
            function_map: vec![false; side * side],
        }
    }

    /// Builds a matrix from row-major module values; `function_map` may be
    /// all false when only the appearance is known.
    pub fn from_parts(side: usize, modules: Vec<bool>, function_map: Vec<bool>) -> Self {
        assert_eq!(modules.len(), side * side);
        assert_eq!(function_map.len(), side * side);
        ModuleMatrix {
            side,
            modules,
            function_map,
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.modules[y * self.side + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, dark: bool) {
        self.modules[y * self.side + x] = dark;
    }

    #[inline]
    pub fn is_function(&self, x: usize, y: usize) -> bool {
        self.function_map[y * self.side + x]
    }

    /// Sets a module and marks it as part of a function pattern.
    #[inline]
    pub fn set_function(&mut self, x: usize, y: usize, dark: bool) {
        let i = y * self.side + x;
        self.modules[i] = dark;
        self.function_map[i] = true;
    }

    pub fn modules(&self) -> &[bool] {
        &self.modules
    }

    pub fn function_map(&self) -> &[bool] {
        &self.function_map
    }

    pub fn dark_count(&self) -> usize {
        self.modules.iter().filter(|&&d| d).count()
    }

    /// Text form: one line per row, `#` dark, `.` light.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.side * (self.side + 1));
        for y in 0..self.side {
            for x in 0..self.side {
                s.push(if self.get(x, y) { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }
}

/// Draws every function pattern of `spec` with a placeholder format area.
/// Format and version words are written by [`draw_format_bits`] and
/// [`draw_version_bits`].
pub fn draw_function_patterns(m: &mut ModuleMatrix, spec: &SymbolSpec) {
    let side = spec.side;
    for i in 0..side {
        m.set_function(6, i, i % 2 == 0);
        m.set_function(i, 6, i % 2 == 0);
    }
    draw_finder(m, 3, 3);
    draw_finder(m, side - 4, 3);
    draw_finder(m, 3, side - 4);
    for &(x, y) in &spec.alignment_centers {
        draw_alignment(m, x, y);
    }
    // Reserve both format areas; the real word comes later.
    draw_format_bits(m, EcLevel::M, 0);
    draw_version_bits(m, spec);
}

/// 7x7 finder plus its light separator, centered at (cx, cy); parts that
/// fall outside the grid are clipped.
pub fn draw_finder(m: &mut ModuleMatrix, cx: usize, cy: usize) {
    let side = m.side() as isize;
    for dy in -4isize..=4 {
        for dx in -4isize..=4 {
            let (x, y) = (cx as isize + dx, cy as isize + dy);
            if (0..side).contains(&x) && (0..side).contains(&y) {
                let dist = dx.abs().max(dy.abs());
                m.set_function(x as usize, y as usize, dist != 2 && dist != 4);
            }
        }
    }
}

/// 5x5 alignment pattern centered at (cx, cy).
pub fn draw_alignment(m: &mut ModuleMatrix, cx: usize, cy: usize) {
    for dy in -2isize..=2 {
        for dx in -2isize..=2 {
            let x = (cx as isize + dx) as usize;
            let y = (cy as isize + dy) as usize;
            m.set_function(x, y, dx.abs().max(dy.abs()) != 1);
        }
    }
}

/// Positions (x, y) of the first format copy, bit 0 first.
pub fn format_positions_primary() -> [(usize, usize); 15] {
    core::array::from_fn(|i| match i {
        0..=5 => (8, i),
        6 => (8, 7),
        7 => (8, 8),
        8 => (7, 8),
        _ => (14 - i, 8),
    })
}

/// Positions (x, y) of the second format copy, bit 0 first.
pub fn format_positions_secondary(side: usize) -> [(usize, usize); 15] {
    core::array::from_fn(|i| if i < 8 { (side - 1 - i, 8) } else { (8, side - 15 + i) })
}

/// Writes both format copies and the fixed dark module.
pub fn draw_format_bits(m: &mut ModuleMatrix, ec: EcLevel, mask_id: u8) {
    let word = bch_encode_format(ec.format_bits(), mask_id).expect("mask id below 8");
    let side = m.side();
    for (i, &(x, y)) in format_positions_primary().iter().enumerate() {
        m.set_function(x, y, (word >> i) & 1 != 0);
    }
    for (i, &(x, y)) in format_positions_secondary(side).iter().enumerate() {
        m.set_function(x, y, (word >> i) & 1 != 0);
    }
    m.set_function(8, side - 8, true);
}

/// Positions of bit `i` of the version word in the two version blocks:
/// (near top-right, near bottom-left), each as (x, y).
pub fn version_positions(side: usize, i: usize) -> ((usize, usize), (usize, usize)) {
    let a = side - 11 + i % 3;
    let b = i / 3;
    ((a, b), (b, a))
}

/// Writes the version blocks for versions 7 and up.
pub fn draw_version_bits(m: &mut ModuleMatrix, spec: &SymbolSpec) {
    let v = spec.version.value();
    if v < 7 {
        return;
    }
    let word = bch_encode_version(v).expect("version in range");
    for i in 0..18 {
        let bit = (word >> i) & 1 != 0;
        let (p, q) = version_positions(spec.side, i);
        m.set_function(p.0, p.1, bit);
        m.set_function(q.0, q.1, bit);
    }
}

/// A matrix holding only the function patterns of `spec`.
pub fn function_template(spec: &SymbolSpec) -> ModuleMatrix {
    let mut m = ModuleMatrix::new(spec.side);
    draw_function_patterns(&mut m, spec);
    m
}

/// Data modules (x, y) in codeword-bit order: two-column zigzag from the
/// bottom-right, skipping the vertical timing column. Remainder modules come
/// last.
pub fn placement_order(function_map: &ModuleMatrix) -> Vec<(usize, usize)> {
    let side = function_map.side();
    let mut out = Vec::new();
    let mut right = side as isize - 1;
    while right >= 1 {
        if right == 6 {
            right = 5;
        }
        let upward = ((right + 1) & 2) == 0;
        for vert in 0..side {
            let y = if upward { side - 1 - vert } else { vert };
            for j in 0..2 {
                let x = (right - j) as usize;
                if !function_map.is_function(x, y) {
                    out.push((x, y));
                }
            }
        }
        right -= 2;
    }
    out
}
