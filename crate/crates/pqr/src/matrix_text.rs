//! Module matrices as text: one line per row, `#` dark, `.` light, every
//! line ending in a linefeed, no quiet zone.

use pqr_core::qr::ModuleMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixTextError {
    #[error("empty matrix")]
    Empty,
    #[error("last row is not linefeed-terminated")]
    Unterminated,
    #[error("row {row} has {len} modules, expected {side}")]
    RowLength { row: usize, len: usize, side: usize },
    #[error("row {row}: unexpected character {ch:?}")]
    BadChar { row: usize, ch: char },
}

pub fn print(m: &ModuleMatrix) -> String {
    m.to_text()
}

/// Parses text written by [`print`]. Function-pattern flags are not
/// recorded in the text, so every module comes back as data.
pub fn parse(text: &str) -> Result<ModuleMatrix, MatrixTextError> {
    if text.is_empty() {
        return Err(MatrixTextError::Empty);
    }
    let body = text.strip_suffix('\n').ok_or(MatrixTextError::Unterminated)?;
    let rows: Vec<&str> = body.split('\n').collect();
    let side = rows.len();
    let mut modules = Vec::with_capacity(side * side);
    for (row, line) in rows.iter().enumerate() {
        let len = line.chars().count();
        if len != side {
            return Err(MatrixTextError::RowLength { row, len, side });
        }
        for ch in line.chars() {
            modules.push(match ch {
                '#' => true,
                '.' => false,
                ch => return Err(MatrixTextError::BadChar { row, ch }),
            });
        }
    }
    Ok(ModuleMatrix::from_parts(side, modules, vec![false; side * side]))
}
