//! Dyadic assembly stages `t = .t1 t2 ... tL` on the circle `[0,1)` mod 1.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A point `numerator / 2^level` of the circle, kept exact at any depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicStage {
    numerator: BigUint,
    level: u32,
}

impl DyadicStage {
    /// Builds a stage, reducing the numerator modulo `2^level`.
    pub fn new(numerator: BigUint, level: u32) -> Self {
        assert!(level > 0, "stage level must be positive");
        let modulus = BigUint::one() << level;
        DyadicStage {
            numerator: numerator % modulus,
            level,
        }
    }

    pub fn from_u64(numerator: u64, level: u32) -> Self {
        Self::new(BigUint::from(numerator), level)
    }

    pub fn zero(level: u32) -> Self {
        Self::new(BigUint::zero(), level)
    }

    /// Parses a binary expansion such as `"101001"`, with or without the leading dot.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let digits = bits.strip_prefix('.').unwrap_or(bits);
        if digits.is_empty() || !digits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::MalformedStage(bits.to_string()));
        }
        let numerator = BigUint::parse_bytes(digits.as_bytes(), 2)
            .ok_or_else(|| Error::MalformedStage(bits.to_string()))?;
        Ok(Self::new(numerator, digits.len() as u32))
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Binary digit `t_i`, 1-based.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.level as usize, "bit index out of range");
        let shift = self.level as u64 - i as u64;
        self.numerator.bit(shift) as u8
    }

    pub fn bits(&self) -> String {
        (1..=self.level as usize)
            .map(|i| if self.bit(i) == 1 { '1' } else { '0' })
            .collect()
    }

    /// Position of the last 1 in the binary expansion; 1 for `t = 0`.
    pub fn bit_length(&self) -> usize {
        match self.numerator.trailing_zeros() {
            None => 1,
            Some(tz) => self.level as usize - tz as usize,
        }
    }

    /// Moves one step of size `1/2^level` forward (`+1`) or backward (`-1`), mod 1.
    pub fn step(&self, exp: i8) -> Self {
        let modulus = BigUint::one() << self.level;
        let numerator = if exp > 0 {
            (&self.numerator + 1u32) % &modulus
        } else if self.numerator.is_zero() {
            modulus - 1u32
        } else {
            &self.numerator - 1u32
        };
        DyadicStage {
            numerator,
            level: self.level,
        }
    }

    /// The same point written with `extra` more binary digits.
    pub fn refine(&self, extra: u32) -> Self {
        DyadicStage {
            numerator: &self.numerator << extra,
            level: self.level + extra,
        }
    }

    /// Drops the final digit; exact only when that digit is 0.
    /// Drops the last digit.
    pub fn truncate(&self) -> Self {
        assert!(self.level > 1, "cannot truncate a one-digit stage");
        DyadicStage {
            numerator: &self.numerator >> 1u32,
            level: self.level - 1,
        }
    }

    pub fn coarsen(&self) -> Option<Self> {
        if self.level <= 1 || self.numerator.bit(0) {
            return None;
        }
        Some(DyadicStage {
            numerator: &self.numerator >> 1u32,
            level: self.level - 1,
        })
    }
}

/// Bit length of the residue `sum / 2^level` (mod 1) for a signed integer sum.
pub fn bit_length_of_sum(sum: i64, level: u32) -> usize {
    if sum == 0 {
        return 1;
    }
    let tz = sum.unsigned_abs().trailing_zeros();
    if tz >= level {
        1
    } else {
        (level - tz) as usize
    }
}

impl fmt::Display for DyadicStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ".{}", self.bits())
    }
}

impl FromStr for DyadicStage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_bits(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_length_examples() {
        assert_eq!(DyadicStage::from_bits(".0").unwrap().bit_length(), 1);
        assert_eq!(DyadicStage::from_bits(".101001").unwrap().bit_length(), 6);
        assert_eq!(DyadicStage::from_bits(".101000").unwrap().bit_length(), 3);
        assert_eq!(DyadicStage::zero(6).bit_length(), 1);
    }

    #[test]
    fn step_wraps_around() {
        let last = DyadicStage::from_bits("111").unwrap();
        assert!(last.step(1).is_zero());
        assert_eq!(DyadicStage::zero(3).step(-1), last);
    }

    #[test]
    fn sum_bit_length_matches_stage() {
        for level in 1..8u32 {
            for s in -40i64..40 {
                let m = 1i64 << level;
                let stage = DyadicStage::from_u64(s.rem_euclid(m) as u64, level);
                assert_eq!(bit_length_of_sum(s, level), stage.bit_length(), "s={s} level={level}");
            }
        }
    }

    #[test]
    fn bits_round_trip() {
        let s = DyadicStage::from_bits("0010110").unwrap();
        assert_eq!(s.bits(), "0010110");
        assert_eq!(s.to_string(), ".0010110");
        assert_eq!(s.refine(2).bits(), "001011000");
        assert_eq!(s.refine(1).coarsen().unwrap(), s);
    }
}
