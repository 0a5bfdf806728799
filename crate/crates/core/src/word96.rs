// SPDX-License-Identifier: Apache-2.0

//! Fixed-width 96-bit words.
//!
//! Every value exchanged or stored by the protocols (pseudonyms, keys,
//! nonces, submessages) is a 96-bit unsigned integer. Addition and
//! subtraction wrap mod 2^96 and rotation amounts are taken mod 96 over the
//! full width of the amount operand.

use std::fmt;
use std::ops::{Add, BitAnd, BitOr, BitXor, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Word length in bits. Also the rotation modulus.
pub const BITS: u32 = 96;

const MASK: u128 = (1u128 << BITS) - 1;

/// Number of hex digits in the canonical text form.
pub const HEX_DIGITS: usize = 24;

/// A 96-bit unsigned word with wrap-around arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word96(u128);

/// The protocol constant π, the first 96 bits of the fractional expansion.
pub const PI: Word96 = Word96(0x3243F6A8885A308D313198A2);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseWordError {
    #[error("expected {HEX_DIGITS} hex digits, got {0}")]
    Length(usize),
    #[error("invalid hex digit in {0:?}")]
    Digit(String),
}

impl Word96 {
    pub const ZERO: Word96 = Word96(0);
    pub const ONE: Word96 = Word96(1);
    pub const MAX: Word96 = Word96(MASK);

    /// Builds a word from the low 96 bits of `value`.
    pub const fn new(value: u128) -> Self {
        Word96(value & MASK)
    }

    /// Returns `None` if `value` does not fit in 96 bits.
    pub const fn checked_new(value: u128) -> Option<Self> {
        if value > MASK {
            None
        } else {
            Some(Word96(value))
        }
    }

    pub const fn get(self) -> u128 {
        self.0
    }

    pub const fn from_parts(high: u32, low: u64) -> Self {
        Word96(((high as u128) << 64) | low as u128)
    }

    pub const fn wrapping_add(self, rhs: Word96) -> Word96 {
        Word96(self.0.wrapping_add(rhs.0) & MASK)
    }

    pub const fn wrapping_sub(self, rhs: Word96) -> Word96 {
        Word96(self.0.wrapping_sub(rhs.0) & MASK)
    }

    /// Multiplication by a small scalar, mod 2^96.
    pub const fn wrapping_mul_small(self, k: u64) -> Word96 {
        Word96(self.0.wrapping_mul(k as u128) & MASK)
    }

    pub const fn shr1(self) -> Word96 {
        Word96(self.0 >> 1)
    }

    /// Residue of the full word modulo 96.
    pub const fn mod96(self) -> u8 {
        (self.0 % BITS as u128) as u8
    }

    /// Circular left shift of `self` by `amount mod 96` positions.
    pub const fn rotl(self, amount: Word96) -> Word96 {
        self.rotl_by(amount.mod96() as u32)
    }

    /// Inverse of [`Word96::rotl`] for the same amount.
    pub const fn rotr(self, amount: Word96) -> Word96 {
        let r = amount.mod96() as u32;
        if r == 0 {
            self
        } else {
            self.rotl_by(BITS - r)
        }
    }

    /// Left rotation by `r` positions; `r` must already be below 96.
    pub const fn rotl_by(self, r: u32) -> Word96 {
        if r == 0 {
            self
        } else {
            Word96(((self.0 << r) | (self.0 >> (BITS - r))) & MASK)
        }
    }

    pub fn to_hex(self) -> String {
        format!("{:024x}", self.0)
    }
}

impl From<u64> for Word96 {
    fn from(v: u64) -> Self {
        Word96(v as u128)
    }
}

impl Add for Word96 {
    type Output = Word96;
    fn add(self, rhs: Word96) -> Word96 {
        self.wrapping_add(rhs)
    }
}

impl Sub for Word96 {
    type Output = Word96;
    fn sub(self, rhs: Word96) -> Word96 {
        self.wrapping_sub(rhs)
    }
}

impl BitXor for Word96 {
    type Output = Word96;
    fn bitxor(self, rhs: Word96) -> Word96 {
        Word96(self.0 ^ rhs.0)
    }
}

impl BitOr for Word96 {
    type Output = Word96;
    fn bitor(self, rhs: Word96) -> Word96 {
        Word96(self.0 | rhs.0)
    }
}

impl BitAnd for Word96 {
    type Output = Word96;
    fn bitand(self, rhs: Word96) -> Word96 {
        Word96(self.0 & rhs.0)
    }
}

impl fmt::Display for Word96 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:024x}", self.0)
    }
}

impl fmt::Debug for Word96 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:024x}", self.0)
    }
}

impl fmt::LowerHex for Word96 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl FromStr for Word96 {
    type Err = ParseWordError;

    /// Accepts exactly 24 hex digits, case-insensitive, with an optional
    /// `0x` prefix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix("0x").unwrap_or(s);
        if digits.len() != HEX_DIGITS {
            return Err(ParseWordError::Length(digits.len()));
        }
        if !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ParseWordError::Digit(s.to_owned()));
        }
        u128::from_str_radix(digits, 16)
            .map(Word96)
            .map_err(|_| ParseWordError::Digit(s.to_owned()))
    }
}

impl Serialize for Word96 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Word96 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The original nonlinear mixing function.
///
/// `Z = X; repeat 32 times: Z = (Z >> 1) + Z + Z + Y`, every step mod 2^96.
/// Note that `mixbits_original(0, 0) == 0`.
pub fn mixbits_original(x: Word96, y: Word96) -> Word96 {
    let mut z = x;
    for _ in 0..32 {
        z = z.shr1() + z + z + y;
    }
    z
}

/// The modified mixing function with the loop index folded in.
///
/// `Z = X; for i in 0..32: Z = (Z + i) + Z + Z + Y`, every step mod 2^96.
/// Its output on two zero inputs is nonzero and not a multiple of 96.
pub fn mixbits_modified(x: Word96, y: Word96) -> Word96 {
    let mut z = x;
    for i in 0..32u64 {
        z = (z + Word96::from(i)) + z + z + y;
    }
    z
}
