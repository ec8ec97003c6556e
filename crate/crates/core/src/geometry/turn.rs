//! Exact angular positions.
//!
//! Points of the Bergman tree sit at angles `k / 2^n` of a full turn with
//! `n` in the hundreds, far past what an `f64` angle can separate. Every
//! `f64` is itself a dyadic rational, so angles are stored as an exact
//! dyadic fraction of a turn and only *differences* are rounded to `f64`.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

/// An angle as an exact dyadic fraction `num / 2^bits` of a turn, reduced
/// to `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Turn {
    num: BigUint,
    bits: u32,
}

/// `m * 2^e` without intermediate overflow or premature underflow.
pub(crate) fn ldexp(m: f64, e: i64) -> f64 {
    let mut x = m;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Turn {
    pub fn zero() -> Self {
        Turn {
            num: BigUint::zero(),
            bits: 0,
        }
    }

    /// `k / 2^n` of a turn, reduced mod 1.
    pub fn dyadic(k: i64, n: u32) -> Self {
        let modulus = BigInt::from(1u8) << n;
        let mut v = BigInt::from(k) % &modulus;
        if v.sign() == Sign::Minus {
            v += &modulus;
        }
        Turn {
            num: v.to_biguint().expect("reduced value is nonnegative"),
            bits: n,
        }
        .normalized()
    }

    /// `num / 2^bits` of a turn, reduced mod 1.
    pub fn from_ratio(num: &BigUint, bits: u32) -> Self {
        let modulus = BigUint::from(1u8) << bits;
        Turn {
            num: num % modulus,
            bits,
        }
        .normalized()
    }

    /// `floor(self · 2^n)`, the index of the level-`n` dyadic interval
    /// containing `self`.
    pub(crate) fn dyadic_floor(&self, n: u32) -> BigUint {
        if n >= self.bits {
            &self.num << (n - self.bits)
        } else {
            &self.num >> (self.bits - n)
        }
    }

    /// Exact conversion of an `f64` fraction of a turn, reduced mod 1.
    pub fn from_turns(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite angle");
        if x < 0.0 {
            return Turn::from_turns(-x).neg();
        }
        // exact for finite x >= 0
        let x = x - x.floor();
        if x == 0.0 {
            return Turn::zero();
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let (mant, exp) = if raw_exp == 0 {
            (bits & ((1 << 52) - 1), -1074)
        } else {
            ((bits & ((1 << 52) - 1)) | (1 << 52), raw_exp - 1075)
        };
        Turn {
            num: BigUint::from(mant),
            bits: (-exp) as u32,
        }
        .normalized()
    }

    /// `-self` mod 1.
    pub fn neg(&self) -> Turn {
        if self.num.is_zero() {
            return Turn::zero();
        }
        let modulus = BigUint::from(1u8) << self.bits;
        Turn {
            num: modulus - &self.num,
            bits: self.bits,
        }
        .normalized()
    }

    pub fn from_radians(theta: f64) -> Self {
        Turn::from_turns(theta / TAU)
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.bits = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.bits as u64) as u32;
        if tz > 0 {
            self.num >>= tz;
            self.bits -= tz;
        }
        self
    }

    /// Denominator exponent: the value is `num / 2^bits`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Nearest `f64` fraction of a turn in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        let v = big_to_f64(&BigInt::from(self.num.clone()), self.bits);
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    }

    pub fn radians(&self) -> f64 {
        self.turns() * TAU
    }

    /// `self + other` mod 1, exact.
    pub fn add(&self, other: &Turn) -> Turn {
        let bits = self.bits.max(other.bits);
        let a = &self.num << (bits - self.bits);
        let b = &other.num << (bits - other.bits);
        let modulus = BigUint::from(1u8) << bits;
        let mut s = a + b;
        if s >= modulus {
            s -= modulus;
        }
        Turn { num: s, bits }.normalized()
    }

    /// `self + offset` mod 1 where `offset` is an `f64` number of turns.
    pub fn add_turns(&self, offset: f64) -> Turn {
        if offset == 0.0 {
            return self.clone();
        }
        self.add(&Turn::from_turns(offset))
    }

    pub fn add_radians(&self, offset: f64) -> Turn {
        self.add_turns(offset / TAU)
    }

    /// Signed difference `self - other` in turns, reduced to `[-1/2, 1/2)`
    /// and rounded once to `f64`.
    pub fn diff(&self, other: &Turn) -> f64 {
        let bits = self.bits.max(other.bits);
        let a = BigInt::from(&self.num << (bits - self.bits));
        let b = BigInt::from(&other.num << (bits - other.bits));
        let modulus = BigInt::from(1u8) << bits;
        let mut d = (a - b) % &modulus;
        // d in (-modulus, modulus); bring to [-modulus/2, modulus/2)
        let half = &modulus >> 1;
        if d >= half {
            d -= &modulus;
        } else if d < -half.clone() {
            d += &modulus;
        }
        if bits == 0 {
            return 0.0;
        }
        big_to_f64(&d, bits)
    }

    /// Signed difference in radians, in `[-π, π)`.
    pub fn diff_radians(&self, other: &Turn) -> f64 {
        self.diff(other) * TAU
    }

    /// Compares positions within `[0, 1)`.
    pub fn cmp_position(&self, other: &Turn) -> Ordering {
        let bits = self.bits.max(other.bits);
        let a = &self.num << (bits - self.bits);
        let b = &other.num << (bits - other.bits);
        a.cmp(&b)
    }
}

/// `d / 2^bits` rounded to f64.
fn big_to_f64(d: &BigInt, bits: u32) -> f64 {
    if d.is_zero() {
        return 0.0;
    }
    let len = d.bits();
    let shift = len.saturating_sub(64);
    let top = d >> shift;
    let m = top.to_f64().expect("64-bit value fits in f64");
    ldexp(m, shift as i64 - bits as i64)
}

impl Default for Turn {
    fn default() -> Self {
        Turn::zero()
    }
}

impl fmt::Debug for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits <= 64 {
            write!(f, "Turn({})", self.turns())
        } else {
            write!(f, "Turn({}/2^{})", self.num, self.bits)
        }
    }
}

impl fmt::Display for Turn {
    /// `num/2^bits`, parseable by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.bits)
    }
}

impl std::str::FromStr for Turn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, bits) = s
            .split_once("/2^")
            .ok_or_else(|| format!("expected `num/2^bits`, got `{s}`"))?;
        let num: BigUint = num.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let bits: u32 = bits.trim().parse().map_err(|e| format!("bad exponent: {e}"))?;
        let modulus = BigUint::from(1u8) << bits;
        Ok(Turn {
            num: num % modulus,
            bits,
        }
        .normalized())
    }
}
