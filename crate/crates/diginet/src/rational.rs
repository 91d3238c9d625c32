//! Exact number support.
//!
//! [`Rational`] is the public carrier for exact values. Inner loops work with
//! [`Dyadic`], a fixed-width `num / 2^exp` type that covers every Haar
//! coefficient of a point set on a dyadic grid, and convert at the boundary.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `2^e` as an exact rational; `e` may be negative.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Formats as `num/den`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing a [`Rational`] as a `num/den` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&format_rational(r)),
                None => s.serialize_str(""),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let s = String::deserialize(d)?;
            if s.is_empty() {
                return Ok(None);
            }
            parse_rational(&s).map(Some).map_err(serde::de::Error::custom)
        }
    }
}

/// Exact value `num / 2^exp`, kept normalized (`num` odd, or zero with `exp = 0`).
///
/// Arithmetic panics on `i128` overflow rather than wrapping; the sizes used
/// by this crate stay far below that.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

fn try_shl(x: i128, s: u32) -> Option<i128> {
    if x == 0 {
        return Some(0);
    }
    if s >= 127 {
        return None;
    }
    let y = x << s;
    (y >> s == x).then_some(y)
}

fn shl_exact(x: i128, s: u32) -> i128 {
    if x == 0 {
        return 0;
    }
    assert!(s < 127, "dyadic shift {s} overflows");
    let y = x << s;
    assert!(y >> s == x, "dyadic overflow shifting {x} by {s}");
    y
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        Dyadic { num: num >> tz, exp: exp - tz }
    }

    /// `num * 2^e` for any integer exponent.
    pub fn scaled(num: i128, e: i32) -> Self {
        if e >= 0 {
            Self::new(shl_exact(num, e as u32), 0)
        } else {
            Self::new(num, e.unsigned_abs())
        }
    }

    pub fn pow2(e: i32) -> Self {
        Self::scaled(1, e)
    }

    pub fn from_int(v: i128) -> Self {
        Self::new(v, 0)
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn signum(&self) -> i32 {
        self.num.signum() as i32
    }

    /// Numerator over the common denominator `2^exp`, which must be at least `self.exp`.
    pub fn numer_at(&self, exp: u32) -> i128 {
        assert!(exp >= self.exp, "exponent {exp} below {}", self.exp);
        shl_exact(self.num, exp - self.exp)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::one() << self.exp)
    }

    /// Converts an exact rational; fails unless its denominator is a power of two.
    pub fn try_from_rational(r: &Rational) -> Option<Self> {
        let d = r.denom();
        if d.bits() == 0 || d.magnitude().count_ones() != 1 {
            return None;
        }
        let exp = (d.bits() - 1) as u32;
        let num = r.numer().to_i128()?;
        Some(Dyadic::new(num, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 * (-(self.exp as f64)).exp2()
    }

    pub fn square(&self) -> Self {
        *self * *self
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = self.numer_at(e);
        let b = rhs.numer_at(e);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow in add"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    #[allow(clippy::suspicious_arithmetic_impl)] // exponents add
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let num = self.num.checked_mul(rhs.num).expect("dyadic overflow in mul");
        Dyadic::new(num, self.exp + rhs.exp)
    }
}

impl Mul<i128> for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: i128) -> Dyadic {
        self * Dyadic::from_int(rhs)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.signum() != other.signum() {
            return self.signum().cmp(&other.signum());
        }
        let e = self.exp.max(other.exp);
        match (try_shl(self.num, e - self.exp), try_shl(other.num, e - other.exp)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl From<Dyadic> for Rational {
    fn from(d: Dyadic) -> Rational {
        d.to_rational()
    }
}

/// Serialized as the exact rational string `"num/den"`.
impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.to_rational()))
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        let r = parse_rational(&s).map_err(serde::de::Error::custom)?;
        Dyadic::try_from_rational(&r).ok_or_else(|| serde::de::Error::custom(format!("{s} is not dyadic")))
    }
}

/// Exact sum of many dyadic values without `i128` limits.
#[derive(Clone, Debug, Default)]
pub struct DyadicAccumulator {
    acc: BigInt,
    exp: u32,
}

impl DyadicAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, d: Dyadic) {
        self.add_scaled(d.numer(), d.exp());
    }

    /// Adds `num / 2^exp`.
    pub fn add_scaled(&mut self, num: i128, exp: u32) {
        if num == 0 {
            return;
        }
        if exp > self.exp {
            self.acc <<= exp - self.exp;
            self.exp = exp;
        }
        self.acc += BigInt::from(num) << (self.exp - exp);
    }

    /// Adds `num / 2^exp` for a big numerator.
    pub fn add_big(&mut self, num: &BigInt, exp: u32) {
        if exp > self.exp {
            self.acc <<= exp - self.exp;
            self.exp = exp;
        }
        self.acc += num << (self.exp - exp);
    }

    pub fn merge(&mut self, other: &DyadicAccumulator) {
        self.add_big(&other.acc, other.exp);
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.acc.clone(), BigInt::one() << self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_signs() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-3), ratio(1, 8));
        assert_eq!(pow2(0), int(1));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("2663/294912").unwrap(), ratio(2663, 294912));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&ratio(10, -4)), "-5/2");
    }

    #[test]
    fn dyadic_normalizes_and_adds() {
        let a = Dyadic::new(6, 3);
        assert_eq!((a.numer(), a.exp()), (3, 2));
        let b = Dyadic::pow2(-4) + Dyadic::pow2(-2);
        assert_eq!(b.to_rational(), ratio(5, 16));
        assert_eq!((Dyadic::pow2(-1) - Dyadic::pow2(-1)), Dyadic::ZERO);
        assert_eq!(Dyadic::pow2(3).to_rational(), int(8));
        assert_eq!((Dyadic::new(3, 2) * Dyadic::new(-5, 1)).to_rational(), ratio(-15, 8));
    }

    #[test]
    fn dyadic_order() {
        let mut v = vec![Dyadic::new(3, 2), Dyadic::new(-1, 0), Dyadic::new(1, 100), Dyadic::ZERO];
        v.sort();
        assert_eq!(v, vec![Dyadic::new(-1, 0), Dyadic::ZERO, Dyadic::new(1, 100), Dyadic::new(3, 2)]);
        assert!(Dyadic::new(1, 120) < Dyadic::new(1, 119));
        assert!(Dyadic::from_int(1 << 100) > Dyadic::new(1, 120));
    }

    #[test]
    fn dyadic_rational_round_trip() {
        let d = Dyadic::new(-57, 10);
        assert_eq!(Dyadic::try_from_rational(&d.to_rational()), Some(d));
        assert_eq!(Dyadic::try_from_rational(&ratio(1, 3)), None);
    }

    #[test]
    fn accumulator() {
        let mut acc = DyadicAccumulator::new();
        acc.add(Dyadic::new(1, 3));
        acc.add(Dyadic::new(1, 200));
        acc.add(Dyadic::new(-1, 200));
        acc.add(Dyadic::from_int(2));
        assert_eq!(acc.value(), ratio(17, 8));
    }
}
