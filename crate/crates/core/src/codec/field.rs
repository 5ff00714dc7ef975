//! GF(2^8) arithmetic over the QR reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign};

/// Reduction polynomial (bit pattern, including the x^8 term).
pub const REDUCTION_POLY: u16 = 0x11D;

/// Primitive element used as the generator root.
pub const GENERATOR: u8 = 2;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= REDUCTION_POLY;
        }
        i += 1;
    }
    // Doubled so that exp[log a + log b] never needs a modulo.
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

/// An element of GF(256).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    /// `alpha^power`, with the exponent taken modulo 255.
    #[inline]
    pub fn exp(power: usize) -> Gf256 {
        Gf256(TABLES.exp[power % 255])
    }

    /// Discrete logarithm base alpha; `None` for zero.
    #[inline]
    pub fn log(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(TABLES.log[self.0 as usize] as usize)
        }
    }

    /// Multiplicative inverse; zero has none.
    #[inline]
    pub fn inv(self) -> Option<Gf256> {
        self.log().map(|l| Gf256(TABLES.exp[255 - l]))
    }

    pub fn pow(self, n: usize) -> Gf256 {
        match self.log() {
            None if n == 0 => Gf256::ONE,
            None => Gf256::ZERO,
            Some(l) => Gf256::exp(l * (n % 255)),
        }
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf256({:#04x})", self.0)
    }
}

impl From<u8> for Gf256 {
    fn from(v: u8) -> Self {
        Gf256(v)
    }
}

impl From<Gf256> for u8 {
    fn from(v: Gf256) -> Self {
        v.0
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

/// Division; panics on a zero divisor.
impl Div for Gf256 {
    type Output = Gf256;
    #[inline]
    fn div(self, rhs: Gf256) -> Gf256 {
        let r = rhs.log().expect("division by zero in GF(256)");
        match self.log() {
            None => Gf256::ZERO,
            Some(l) => Gf256(TABLES.exp[l + 255 - r]),
        }
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        field_mul(self, rhs)
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = field_mul(*self, rhs);
    }
}

/// Product of two field elements.
#[inline]
pub fn field_mul(a: Gf256, b: Gf256) -> Gf256 {
    match (a.log(), b.log()) {
        (Some(la), Some(lb)) => Gf256(TABLES.exp[la + lb]),
        _ => Gf256::ZERO,
    }
}
