//! Exact dyadic rationals `p / 2^q` for weights, lengths and distances.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// `num / 2^exp`, kept in lowest terms (odd numerator, or zero with `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Dyadic {
        let mut d = Dyadic {
            num: num.into(),
            exp,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Dyadic {
        Dyadic::new(1, 0)
    }

    /// `1 / 2^k`.
    pub fn pow2_inv(k: u32) -> Dyadic {
        Dyadic::new(1, k)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.sign() == Sign::Plus
    }

    /// Division by `2^k`.
    pub fn halve(&self, k: u32) -> Dyadic {
        Dyadic::new(self.num.clone(), self.exp + k)
    }

    /// Multiplication by `2^k`.
    pub fn double(&self, k: u32) -> Dyadic {
        if k <= self.exp {
            Dyadic::new(self.num.clone(), self.exp - k)
        } else {
            Dyadic::new(&self.num << (k - self.exp), 0)
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exp.max(other.exp);
        (
            &self.num << (e - self.exp),
            &other.num << (e - other.exp),
            e,
        )
    }

    pub fn to_f64(&self) -> f64 {
        // Shift the numerator down to 64 significant bits first so huge exponents stay finite.
        let bits = self.num.bits();
        let drop = bits.saturating_sub(64) as u32;
        let mantissa = (&self.num >> drop).to_f64().unwrap_or(0.0);
        mantissa * 2f64.powi(drop as i32 - self.exp as i32)
    }

    /// Decimal expansion truncated toward zero after `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let negative = self.num.is_negative();
        let scaled = self.num.abs() * BigInt::from(10u32).pow(digits as u32);
        let (int_part, _) = scaled.div_rem(&(BigInt::from(1) << self.exp));
        let s = int_part.to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (whole, frac) = s.split_at(s.len() - digits);
        format!("{}{}.{}", if negative { "-" } else { "" }, whole, frac)
    }

    /// The `"p/2^q"` rendering.
    pub fn to_fraction(&self) -> String {
        format!("{}/2^{}", self.num, self.exp)
    }

    pub fn parse_fraction(text: &str) -> Option<Dyadic> {
        let (p, q) = text.trim().split_once("/2^")?;
        Some(Dyadic::new(p.parse::<BigInt>().ok()?, q.parse::<u32>().ok()?))
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_fraction())
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_fraction())
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Add<&Dyadic> for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        &self + rhs
    }
}

impl Sub<&Dyadic> for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        &self - rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> std::iter::Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 9).exponent(), 0);
        assert_eq!(Dyadic::new(3, 0).double(2), Dyadic::new(12, 0));
    }

    #[test]
    fn arithmetic_and_order() {
        let a = Dyadic::new(1, 1);
        let b = Dyadic::new(1, 2);
        assert_eq!(&a + &b, Dyadic::new(3, 2));
        assert_eq!(&b - &a, Dyadic::new(-1, 2));
        assert!(b < a);
        assert_eq!(a.halve(3), Dyadic::new(1, 4));
    }

    #[test]
    fn renderings() {
        let d = Dyadic::new(11, 4);
        assert_eq!(d.to_fraction(), "11/2^4");
        assert_eq!(d.to_decimal(12), "0.687500000000");
        assert_eq!(Dyadic::new(-1, 1).to_decimal(3), "-0.500");
        assert_eq!(Dyadic::parse_fraction("11/2^4"), Some(d.clone()));
        assert!((d.to_f64() - 0.6875).abs() < 1e-15);
        assert!((Dyadic::new(3, 2000).to_f64()).abs() < 1e-300);
    }
}
