//! Arithmetic over GF(2^8), the byte field used by the erasure coder.
//!
//! Elements are bytes. Addition is XOR; multiplication is carried out
//! through log/exp tables built once at compile time from the primitive
//! polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D) with generator 2. Every
//! nonzero element is a power of the generator, so `a * b` becomes
//! `EXP[LOG[a] + LOG[b]]`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub, SubAssign};

/// Primitive polynomial for the field, including the x^8 term.
pub const PRIMITIVE_POLY: u16 = 0x11D;

/// Generator whose powers enumerate all 255 nonzero elements.
pub const GENERATOR: u8 = 2;

/// Number of nonzero elements; also the multiplicative group order.
pub const GROUP_ORDER: usize = 255;

// EXP is doubled so that `EXP[la + lb]` never needs a `% 255`:
// la + lb <= 508 < 510.
static EXP: [u8; 510] = build_exp_table();
static LOG: [u8; 256] = build_log_table();

const fn build_exp_table() -> [u8; 510] {
    let mut table = [0u8; 510];
    let mut value: u16 = 1;
    let mut i = 0;
    while i < GROUP_ORDER {
        table[i] = value as u8;
        table[i + GROUP_ORDER] = value as u8;
        value <<= 1;
        if value & 0x100 != 0 {
            value ^= PRIMITIVE_POLY;
        }
        i += 1;
    }
    table
}

const fn build_log_table() -> [u8; 256] {
    let exp = build_exp_table();
    let mut table = [0u8; 256];
    let mut i = 0;
    while i < GROUP_ORDER {
        table[exp[i] as usize] = i as u8;
        i += 1;
    }
    // LOG[0] is never read on the multiplication fast path (zero operands
    // short-circuit), so its value is immaterial.
    table
}

/// An element of GF(2^8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    /// Multiplicative inverse; `None` for zero, which has no inverse.
    #[inline]
    pub fn inv(self) -> Option<Gf256> {
        if self.0 == 0 {
            None
        } else {
            Some(Gf256(EXP[GROUP_ORDER - LOG[self.0 as usize] as usize]))
        }
    }

    /// `self` raised to a non-negative integer power.
    pub fn pow(self, mut exp: u32) -> Gf256 {
        if exp == 0 {
            return Gf256::ONE;
        }
        if self.0 == 0 {
            return Gf256::ZERO;
        }
        let mut acc = Gf256::ONE;
        let mut base = self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }
}

impl From<u8> for Gf256 {
    fn from(byte: u8) -> Self {
        Gf256(byte)
    }
}

// Clippy flags mixed operators inside arithmetic impls; in a binary
// field they are the definition (addition is XOR, division multiplies
// by the inverse), so the lints are silenced for this block.
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

// Characteristic 2: subtraction and addition coincide.
impl Sub for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Gf256) -> Gf256 {
        self + rhs
    }
}

impl SubAssign for Gf256 {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn sub_assign(&mut self, rhs: Gf256) {
        *self += rhs;
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        Gf256(EXP[LOG[self.0 as usize] as usize + LOG[rhs.0 as usize] as usize])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

/// Division panics on a zero divisor, mirroring integer division. Use
/// [`Gf256::inv`] when the divisor is not statically known to be nonzero.
impl Div for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Gf256) -> Gf256 {
        let inv = rhs.inv().expect("division by zero in GF(2^8)");
        self * inv
    }
}

/// `acc[i] += coeff * src[i]` over whole byte slices, the inner loop of
/// block encoding and decoding.
pub fn mul_acc_slice(acc: &mut [u8], src: &[u8], coeff: Gf256) {
    debug_assert_eq!(acc.len(), src.len());
    if coeff.0 == 0 {
        return;
    }
    if coeff.0 == 1 {
        for (a, s) in acc.iter_mut().zip(src) {
            *a ^= s;
        }
        return;
    }
    let log_c = LOG[coeff.0 as usize] as usize;
    for (a, s) in acc.iter_mut().zip(src) {
        if *s != 0 {
            *a ^= EXP[log_c + LOG[*s as usize] as usize];
        }
    }
}
