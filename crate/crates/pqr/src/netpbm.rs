//! Netpbm rasters: plain and raw PGM (P2, P5) and PBM (P1, P4), 8-bit
//! samples only.

use std::path::Path;

use pqr_core::scanner::{Bitmap, DARK, LIGHT};
use thiserror::Error;

/// Longest line written in the plain (ASCII) formats.
const PLAIN_LINE_MAX: usize = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    P1,
    P2,
    P4,
    P5,
}

impl Format {
    pub fn magic(self) -> &'static str {
        match self {
            Format::P1 => "P1",
            Format::P2 => "P2",
            Format::P4 => "P4",
            Format::P5 => "P5",
        }
    }

    /// PBM formats carry one bit per pixel, 1 = black.
    pub fn is_bitmap(self) -> bool {
        matches!(self, Format::P1 | Format::P4)
    }

    /// Raw format for a `.pbm` or `.pgm` extension; anything else is PGM.
    pub fn for_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("pbm") => Format::P4,
            _ => Format::P5,
        }
    }
}

#[derive(Debug, Error)]
pub enum NetpbmError {
    #[error("not a supported netpbm file (expected P1, P2, P4 or P5)")]
    BadMagic,
    #[error("malformed header: {0}")]
    Header(&'static str),
    #[error("maxval {0} outside 1..=255")]
    Maxval(u32),
    #[error("raster data ends early")]
    Truncated,
    #[error("sample {value} above maxval {maxval}")]
    Sample { value: u32, maxval: u32 },
    #[error("samples do not match the {width}x{height} header")]
    Size { width: usize, height: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One decoded netpbm image. PBM samples are 0 (white) or 1 (black); PGM
/// samples run from 0 (black) to `maxval` (white).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub format: Format,
    pub width: usize,
    pub height: usize,
    pub maxval: u8,
    pub samples: Vec<u8>,
}

impl Raster {
    pub fn new(format: Format, width: usize, height: usize, maxval: u8, samples: Vec<u8>) -> Result<Self, NetpbmError> {
        if width == 0 || height == 0 {
            return Err(NetpbmError::Header("zero dimension"));
        }
        if samples.len() != width * height {
            return Err(NetpbmError::Size { width, height });
        }
        let maxval = if format.is_bitmap() { 1 } else { maxval };
        if maxval == 0 {
            return Err(NetpbmError::Maxval(0));
        }
        if let Some(&value) = samples.iter().find(|&&s| s > maxval) {
            return Err(NetpbmError::Sample {
                value: value as u32,
                maxval: maxval as u32,
            });
        }
        Ok(Raster {
            format,
            width,
            height,
            maxval,
            samples,
        })
    }

    /// Converts a luminance bitmap. PBM output thresholds at the midpoint
    /// (below 128 is black), which is lossless for 0/255 renders.
    pub fn from_bitmap(b: &Bitmap, format: Format) -> Raster {
        let samples = if format.is_bitmap() {
            b.pixels().iter().map(|&p| u8::from(p < 128)).collect()
        } else {
            b.pixels().to_vec()
        };
        Raster {
            format,
            width: b.width(),
            height: b.height(),
            maxval: if format.is_bitmap() { 1 } else { 255 },
            samples,
        }
    }

    /// Luminance bitmap with gray levels stretched to 0..=255.
    pub fn to_bitmap(&self) -> Bitmap {
        let px: Vec<u8> = if self.format.is_bitmap() {
            self.samples
                .iter()
                .map(|&s| if s == 1 { DARK } else { LIGHT })
                .collect()
        } else if self.maxval == 255 {
            self.samples.clone()
        } else {
            let m = self.maxval as u32;
            self.samples
                .iter()
                .map(|&s| ((s as u32 * 255 + m / 2) / m) as u8)
                .collect()
        };
        Bitmap::from_raw(self.width, self.height, px).expect("dimensions checked on construction")
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("{}\n{} {}\n", self.format.magic(), self.width, self.height).into_bytes();
        if !self.format.is_bitmap() {
            out.extend_from_slice(format!("{}\n", self.maxval).as_bytes());
        }
        match self.format {
            Format::P5 => out.extend_from_slice(&self.samples),
            Format::P4 => {
                for row in self.samples.chunks(self.width) {
                    for byte in row.chunks(8) {
                        let packed = byte.iter().enumerate().fold(0u8, |acc, (i, &s)| acc | (s << (7 - i)));
                        out.push(packed);
                    }
                }
            }
            Format::P1 | Format::P2 => {
                for row in self.samples.chunks(self.width) {
                    let mut line = String::new();
                    for s in row {
                        let tok = s.to_string();
                        if !line.is_empty() && line.len() + 1 + tok.len() > PLAIN_LINE_MAX {
                            out.extend_from_slice(line.as_bytes());
                            out.push(b'\n');
                            line.clear();
                        }
                        if !line.is_empty() {
                            line.push(' ');
                        }
                        line.push_str(&tok);
                    }
                    out.extend_from_slice(line.as_bytes());
                    out.push(b'\n');
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Raster, NetpbmError> {
        let mut c = Cursor { bytes, pos: 0 };
        let format = match bytes.get(..2) {
            Some(b"P1") => Format::P1,
            Some(b"P2") => Format::P2,
            Some(b"P4") => Format::P4,
            Some(b"P5") => Format::P5,
            _ => return Err(NetpbmError::BadMagic),
        };
        c.pos = 2;
        if !c.peek().is_some_and(|b| b.is_ascii_whitespace() || b == b'#') {
            return Err(NetpbmError::BadMagic);
        }
        let width = c.header_number()? as usize;
        let height = c.header_number()? as usize;
        if width == 0 || height == 0 {
            return Err(NetpbmError::Header("zero dimension"));
        }
        let maxval = if format.is_bitmap() {
            1
        } else {
            match c.header_number()? {
                m @ 1..=255 => m as u8,
                m => return Err(NetpbmError::Maxval(m)),
            }
        };
        let n = width
            .checked_mul(height)
            .ok_or(NetpbmError::Header("dimensions overflow"))?;
        let samples = match format {
            Format::P5 | Format::P4 => {
                // Exactly one whitespace byte separates header and data.
                if !c.peek().is_some_and(|b| b.is_ascii_whitespace()) {
                    return Err(NetpbmError::Header("missing separator before raster"));
                }
                c.pos += 1;
                let data = &bytes[c.pos..];
                if format == Format::P5 {
                    data.get(..n).ok_or(NetpbmError::Truncated)?.to_vec()
                } else {
                    let stride = width.div_ceil(8);
                    let data = data.get(..stride * height).ok_or(NetpbmError::Truncated)?;
                    data.chunks(stride)
                        .flat_map(|row| (0..width).map(move |x| (row[x / 8] >> (7 - x % 8)) & 1))
                        .collect()
                }
            }
            Format::P2 => (0..n)
                .map(|_| {
                    let v = c.number()?;
                    if v > maxval as u32 {
                        return Err(NetpbmError::Sample {
                            value: v,
                            maxval: maxval as u32,
                        });
                    }
                    Ok(v as u8)
                })
                .collect::<Result<_, _>>()?,
            Format::P1 => (0..n)
                .map(|_| {
                    c.skip_space();
                    match c.peek() {
                        Some(b @ (b'0' | b'1')) => {
                            c.pos += 1;
                            Ok(b - b'0')
                        }
                        Some(_) => Err(NetpbmError::Header("PBM sample other than 0 or 1")),
                        None => Err(NetpbmError::Truncated),
                    }
                })
                .collect::<Result<_, _>>()?,
        };
        Raster::new(format, width, height, maxval, samples)
    }

    pub fn read(path: &Path) -> Result<Raster, NetpbmError> {
        Raster::decode(&std::fs::read(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), NetpbmError> {
        std::fs::write(path, self.encode())?;
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while let Some(b) = self.peek() {
            if b == b'#' {
                while self.peek().is_some_and(|b| b != b'\n' && b != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32, NetpbmError> {
        self.skip_space();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.peek().is_none() {
                NetpbmError::Truncated
            } else {
                NetpbmError::Header("expected a decimal number")
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| NetpbmError::Header("number too large"))
    }

    fn header_number(&mut self) -> Result<u32, NetpbmError> {
        self.number().map_err(|e| match e {
            NetpbmError::Truncated => NetpbmError::Header("header ends early"),
            e => e,
        })
    }
}
