use alloc::vec;
use alloc::vec::Vec;

pub const DARK: u8 = 0;
pub const LIGHT: u8 = 255;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitmap {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Bitmap {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    /// Wraps existing samples; `None` when the length does not match.
    pub fn from_raw(width: usize, height: usize, pixels: Vec<u8>) -> Option<Self> {
        (pixels.len() == width * height).then_some(Bitmap { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Dark test for a binarized bitmap; out-of-bounds reads as light.
    #[inline]
    pub fn is_dark_at(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.pixels[y as usize * self.width + x as usize] == DARK
    }
}

/// Global midpoint threshold: dark where `2p <= min + max`. A constant
/// image has no contrast and comes out all light.
pub fn binarize(b: &Bitmap) -> Bitmap {
    let (lo, hi) = b
        .pixels
        .iter()
        .fold((u8::MAX, u8::MIN), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    if b.pixels.is_empty() || lo == hi {
        return Bitmap::new(b.width, b.height, LIGHT);
    }
    let sum = lo as u16 + hi as u16;
    let pixels = b
        .pixels
        .iter()
        .map(|&p| if 2 * p as u16 <= sum { DARK } else { LIGHT })
        .collect();
    Bitmap {
        width: b.width,
        height: b.height,
        pixels,
    }
}
