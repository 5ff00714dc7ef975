//! Reed-Solomon coding over GF(256) with generator roots alpha^0 .. alpha^(k-1).
//!
//! Codewords are stored most-significant coefficient first: byte `i` of an
//! `n`-byte block is the coefficient of `x^(n-1-i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::field::Gf256;

/// Reasons an RS block could not be corrected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsError {
    /// The block is shorter than its parity section.
    BadLength,
    /// The error locator has no consistent set of roots inside the block.
    Uncorrectable,
    /// A consistent correction exists but needs more errors than allowed.
    TooManyErrors { found: usize, limit: usize },
}

impl fmt::Display for RsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RsError::BadLength => f.write_str("block shorter than its parity section"),
            RsError::Uncorrectable => f.write_str("error locator could not be resolved"),
            RsError::TooManyErrors { found, limit } => {
                write!(f, "{found} errors located, limit is {limit}")
            }
        }
    }
}

impl core::error::Error for RsError {}

/// Successful decode of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsDecoded {
    pub data: Vec<u8>,
    pub errors_corrected: usize,
}

/// Generator polynomial prod (x - alpha^i) for i in 0..degree, highest
/// coefficient first (the leading 1 included).
pub fn generator_poly(degree: usize) -> Vec<Gf256> {
    let mut g = vec![Gf256::ONE];
    for i in 0..degree {
        let root = Gf256::exp(i);
        let mut next = vec![Gf256::ZERO; g.len() + 1];
        for (j, &c) in g.iter().enumerate() {
            next[j] += c;
            next[j + 1] += c * root;
        }
        g = next;
    }
    g
}

/// Parity bytes for `data`: the remainder of data(x) * x^ec_count divided by
/// the generator polynomial.
pub fn rs_encode(data: &[u8], ec_count: usize) -> Vec<u8> {
    assert!(ec_count >= 1, "ec_count must be positive");
    let gen = generator_poly(ec_count);
    let mut rem = vec![Gf256::ZERO; ec_count];
    for &b in data {
        let factor = Gf256(b) + rem[0];
        rem.rotate_left(1);
        rem[ec_count - 1] = Gf256::ZERO;
        for (r, &g) in rem.iter_mut().zip(&gen[1..]) {
            *r += g * factor;
        }
    }
    rem.into_iter().map(u8::from).collect()
}

/// Syndromes S_j = r(alpha^j) for j in 0..ec_count.
pub fn syndromes(received: &[u8], ec_count: usize) -> Vec<Gf256> {
    (0..ec_count)
        .map(|j| {
            let x = Gf256::exp(j);
            received.iter().fold(Gf256::ZERO, |acc, &b| acc * x + Gf256(b))
        })
        .collect()
}

/// Decodes with the full correction radius floor(ec_count / 2).
pub fn rs_decode(received: &[u8], ec_count: usize) -> Result<RsDecoded, RsError> {
    rs_decode_with_limit(received, ec_count, ec_count / 2)
}

/// Decodes, refusing any correction that needs more than `max_errors`
/// codeword changes.
pub fn rs_decode_with_limit(received: &[u8], ec_count: usize, max_errors: usize) -> Result<RsDecoded, RsError> {
    let n = received.len();
    if ec_count == 0 || n < ec_count || n > 255 {
        return Err(RsError::BadLength);
    }
    let data_len = n - ec_count;
    let synd = syndromes(received, ec_count);
    if synd.iter().all(|s| s.0 == 0) {
        return Ok(RsDecoded {
            data: received[..data_len].to_vec(),
            errors_corrected: 0,
        });
    }

    let locator = berlekamp_massey(&synd);
    let degree = locator.len() - 1;
    if degree == 0 || 2 * degree > ec_count {
        return Err(RsError::Uncorrectable);
    }

    // Chien search: byte i sits at power p = n-1-i; it is in error when
    // locator(alpha^-p) == 0.
    let mut positions = Vec::with_capacity(degree);
    for i in 0..n {
        let p = n - 1 - i;
        let x_inv = Gf256::exp(255 - p % 255);
        if poly_eval_low(&locator, x_inv).0 == 0 {
            positions.push(i);
        }
    }
    if positions.len() != degree {
        return Err(RsError::Uncorrectable);
    }
    if degree > max_errors {
        return Err(RsError::TooManyErrors {
            found: degree,
            limit: max_errors,
        });
    }

    // Forney with first consecutive root 0:
    // e = X * omega(X^-1) / locator'(X^-1).
    let mut omega = poly_mul_low(&synd, &locator);
    omega.truncate(ec_count);
    let derivative: Vec<Gf256> = locator
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| if k % 2 == 1 { c } else { Gf256::ZERO })
        .collect();

    let mut corrected = received.to_vec();
    for &i in &positions {
        let p = n - 1 - i;
        let x = Gf256::exp(p);
        let x_inv = Gf256::exp(255 - p % 255);
        let denom = poly_eval_low(&derivative, x_inv);
        if denom.0 == 0 {
            return Err(RsError::Uncorrectable);
        }
        let magnitude = x * (poly_eval_low(&omega, x_inv) / denom);
        corrected[i] ^= magnitude.0;
    }

    if syndromes(&corrected, ec_count).iter().any(|s| s.0 != 0) {
        return Err(RsError::Uncorrectable);
    }
    Ok(RsDecoded {
        data: corrected[..data_len].to_vec(),
        errors_corrected: degree,
    })
}

// Polynomials below are lowest coefficient first.

fn poly_eval_low(poly: &[Gf256], x: Gf256) -> Gf256 {
    poly.iter().rev().fold(Gf256::ZERO, |acc, &c| acc * x + c)
}

fn poly_mul_low(a: &[Gf256], b: &[Gf256]) -> Vec<Gf256> {
    let mut out = vec![Gf256::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Error locator polynomial (lowest coefficient first, constant term 1),
/// trimmed to its true degree.
fn berlekamp_massey(synd: &[Gf256]) -> Vec<Gf256> {
    let mut c = vec![Gf256::ONE];
    let mut b = vec![Gf256::ONE];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last = Gf256::ONE;

    for n in 0..synd.len() {
        let mut d = synd[n];
        for i in 1..=len.min(c.len() - 1) {
            d += c[i] * synd[n - i];
        }
        if d.0 == 0 {
            shift += 1;
            continue;
        }
        let coef = d / last;
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, Gf256::ZERO);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] += coef * bi;
        }
        if 2 * len <= n {
            len = n + 1 - len;
            b = prev;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(len + 1);
    while c.len() > 1 && c[c.len() - 1].0 == 0 {
        c.pop();
    }
    c
}
