//! Exact arithmetic over Q and over quadratic extensions Q(sqrt(s)).
//!
//! Leg lengths are either rational or of the form `a + b*sqrt(s)` with
//! rational `a`, `b` and a fixed non-negative rational radicand `s`. All
//! comparisons are decided exactly; no floating point is consulted for
//! signs or orderings.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses "p/q", an integer, or a finite decimal ("1.25", "-0.125")
/// into an exact rational. Decimals are read digit-exactly, never via f64.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = || Error::Parse {
        input: input.to_string(),
        expected: "an integer, a fraction p/q, or a finite decimal",
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let frac: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let whole = int_digits.magnitude() * scale.magnitude() + frac.magnitude();
        let signed = if negative {
            -BigInt::from(whole)
        } else {
            BigInt::from(whole)
        };
        return Ok(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from(n))
}

/// Renders an exact rational as a fixed-point decimal with `digits` places,
/// rounding half away from zero. Used for deterministic CSV output.
pub fn format_rational_decimal(x: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled_num = x.numer() * &scale;
    let den = x.denom().clone();
    let (mut q, r) = scaled_num.div_rem(&den);
    let twice_rem = r.magnitude() * 2u32;
    if twice_rem >= *den.magnitude() {
        if x.is_negative() {
            q -= 1;
        } else if twice_rem > BigUint::zero() {
            q += 1;
        }
    }
    let negative = q.is_negative();
    let mag = q.magnitude().to_string();
    let mag = if mag.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
    } else {
        mag
    };
    let split = mag.len() - digits;
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{mag}")
    } else {
        format!("{sign}{}.{}", &mag[..split], &mag[split..])
    }
}

/// Exact square root of a non-negative rational, when it exists.
fn rational_sqrt(s: &Rational) -> Option<Rational> {
    if s.is_negative() {
        return None;
    }
    let num = s.numer().magnitude();
    let den = s.denom().magnitude();
    let rn = num.sqrt();
    let rd = den.sqrt();
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        Some(Rational::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

/// An element `a + b*sqrt(s)` of Q or of a real quadratic extension.
///
/// Invariants: `s >= 0`; if `s` is a perfect rational square or `b = 0`
/// the value is stored in pure rational form (`b = 0`, `s = 0`). Two
/// scalars can be combined or ordered only when at least one is rational
/// or their radicands agree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticScalar {
    a: Rational,
    b: Rational,
    s: Rational,
}

impl QuadraticScalar {
    pub fn new(a: Rational, b: Rational, s: Rational) -> Result<Self> {
        if b.is_zero() || s.is_zero() {
            return Ok(Self::from_rational(a));
        }
        if s.is_negative() {
            return Err(Error::NegativeRadicand(s.to_string()));
        }
        if let Some(root) = rational_sqrt(&s) {
            return Ok(Self::from_rational(a + b * root));
        }
        Ok(Self { a, b, s })
    }

    pub fn from_rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            s: Rational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from(BigInt::from(n)))
    }

    pub fn sqrt_of(s: Rational) -> Result<Self> {
        if s.is_negative() {
            return Err(Error::NegativeRadicand(s.to_string()));
        }
        Self::new(Rational::zero(), Rational::one(), s)
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coefficient(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &Rational {
        &self.s
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Exact sign: -1, 0, or +1. For mixed-sign `a` and `b*sqrt(s)` the
    /// decision reduces to comparing `a^2` against `b^2 * s`.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = rational_sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        let asq = &self.a * &self.a;
        let bsq_s = &self.b * &self.b * &self.s;
        match asq.cmp(&bsq_s) {
            Ordering::Equal => 0,
            Ordering::Greater => sa,
            Ordering::Less => sb,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    fn merged_radicand(&self, other: &Self) -> Result<Rational> {
        if self.b.is_zero() {
            Ok(other.s.clone())
        } else if other.b.is_zero() || self.s == other.s {
            Ok(self.s.clone())
        } else {
            Err(Error::MixedRadicands(
                self.s.to_string(),
                other.s.to_string(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let s = self.merged_radicand(other)?;
        Self::new(&self.a + &other.a, &self.b + &other.b, s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let s = self.merged_radicand(other)?;
        Self::new(&self.a - &other.a, &self.b - &other.b, s)
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            s: self.s.clone(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            a: &self.a * factor,
            b: &self.b * factor,
            s: self.s.clone(),
        }
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        Self {
            a: &self.a + r,
            b: self.b.clone(),
            s: self.s.clone(),
        }
    }

    /// Exact total order within one extension (or against rationals).
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        let diff = self.sub(other)?;
        Ok(match diff.sign() {
            0 => Ordering::Equal,
            x if x < 0 => Ordering::Less,
            _ => Ordering::Greater,
        })
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.a.to_f64().unwrap_or(f64::NAN);
        if !self.b.is_zero() {
            v += self.b.to_f64().unwrap_or(f64::NAN) * self.s.to_f64().unwrap_or(f64::NAN).sqrt();
        }
        v
    }

    fn cmp_integer(&self, k: &BigInt) -> Ordering {
        let shifted = Self {
            a: &self.a - Rational::from(k.clone()),
            b: self.b.clone(),
            s: self.s.clone(),
        };
        match shifted.sign() {
            0 => Ordering::Equal,
            x if x < 0 => Ordering::Less,
            _ => Ordering::Greater,
        }
    }

    /// Exact floor. Irrational values start from an f64 estimate and are
    /// corrected by exact integer comparisons, so boundary cases cannot
    /// be decided by rounding error.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let est = self.to_f64();
        let mut m = BigInt::from_f64(if est.is_finite() { est.floor() } else { 0.0 })
            .unwrap_or_else(BigInt::zero);
        while self.cmp_integer(&(&m + 1)) != Ordering::Less {
            m += 1;
        }
        while self.cmp_integer(&m) == Ordering::Less {
            m -= 1;
        }
        m
    }

    /// Exact ceiling, via `ceil(x) = -floor(-x)`.
    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

impl fmt::Display for QuadraticScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let root = if self.b.is_one() {
            format!("sqrt({})", self.s)
        } else if (-&self.b).is_one() {
            format!("-sqrt({})", self.s)
        } else {
            format!("{}*sqrt({})", self.b, self.s)
        };
        if self.a.is_zero() {
            write!(f, "{root}")
        } else if self.b.is_negative() {
            write!(f, "{}{root}", self.a)
        } else {
            write!(f, "{}+{root}", self.a)
        }
    }
}

impl fmt::Debug for QuadraticScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
