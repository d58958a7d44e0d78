//! Length vectors for planar linkages whose last leg is telescopic.
//!
//! A vector holds n >= 3 positive lengths; legs may be rational or
//! `a + b*sqrt(s)` with a single radicand shared across the vector. The
//! telescopic leg is always the last entry. Subset classification is
//! against the half-perimeter: strictly below is short, equal is median,
//! strictly above is long. A vector is generic when no signed sum of its
//! lengths vanishes, equivalently when no subset is median.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, QuadraticScalar, Rational};

/// Largest n for which exhaustive subset enumeration is permitted.
pub const ENUM_CAP: usize = 24;

/// Largest scaled total allowed for bitset subset-sum genericity checks.
const GENERIC_DP_LIMIT: u64 = 100_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SubsetClass {
    Short,
    Median,
    Long,
}

impl fmt::Display for SubsetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetClass::Short => write!(f, "short"),
            SubsetClass::Median => write!(f, "median"),
            SubsetClass::Long => write!(f, "long"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct LengthVector {
    legs: Vec<QuadraticScalar>,
}

impl LengthVector {
    pub fn new(legs: Vec<QuadraticScalar>) -> Result<Self> {
        if legs.len() < 3 {
            return Err(Error::OutOfRange {
                param: "n",
                value: legs.len().to_string(),
                range: "n >= 3 legs".into(),
            });
        }
        let mut radicand: Option<&Rational> = None;
        for (i, leg) in legs.iter().enumerate() {
            if !leg.is_positive() {
                return Err(Error::OutOfRange {
                    param: "length",
                    value: format!("legs[{i}] = {leg}"),
                    range: "strictly positive".into(),
                });
            }
            if !leg.is_rational() {
                match radicand {
                    None => radicand = Some(leg.radicand()),
                    Some(s) if s == leg.radicand() => {}
                    Some(s) => {
                        return Err(Error::MixedRadicands(
                            s.to_string(),
                            leg.radicand().to_string(),
                        ))
                    }
                }
            }
        }
        Ok(Self { legs })
    }

    /// Parses a comma-separated list of lengths; each entry is a rational
    /// literal or `sqrt(X)` with X rational.
    pub fn parse(input: &str) -> Result<Self> {
        let mut legs = Vec::new();
        for item in input.split(',') {
            legs.push(parse_length(item)?);
        }
        Self::new(legs)
    }

    pub fn n(&self) -> usize {
        self.legs.len()
    }

    pub fn legs(&self) -> &[QuadraticScalar] {
        &self.legs
    }

    pub fn telescopic(&self) -> &QuadraticScalar {
        self.legs.last().unwrap()
    }

    pub fn fixed(&self) -> &[QuadraticScalar] {
        &self.legs[..self.legs.len() - 1]
    }

    pub fn total(&self) -> QuadraticScalar {
        let mut acc = QuadraticScalar::zero();
        for leg in &self.legs {
            acc = acc.add(leg).expect("validated radicands");
        }
        acc
    }

    pub fn half_perimeter(&self) -> QuadraticScalar {
        self.total().scale(&Rational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Index of the largest fixed leg; ties resolve to the smallest index.
    pub fn max_fixed_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.legs.len() - 1 {
            if self.legs[i]
                .compare(&self.legs[best])
                .expect("validated radicands")
                == Ordering::Greater
            {
                best = i;
            }
        }
        best
    }

    /// Classifies the subset given by 0-based leg indices against the
    /// half-perimeter.
    pub fn classify_subset(&self, members: &[usize]) -> Result<SubsetClass> {
        let mut seen = vec![false; self.legs.len()];
        let mut sum = QuadraticScalar::zero();
        for &i in members {
            if i >= self.legs.len() {
                return Err(Error::OutOfRange {
                    param: "subset index",
                    value: i.to_string(),
                    range: format!("0..{}", self.legs.len()),
                });
            }
            if seen[i] {
                return Err(Error::OutOfRange {
                    param: "subset index",
                    value: format!("{i} (repeated)"),
                    range: "distinct indices".into(),
                });
            }
            seen[i] = true;
            sum = sum.add(&self.legs[i]).expect("validated radicands");
        }
        let doubled = sum.scale(&Rational::from(BigInt::from(2)));
        Ok(match doubled.sub(&self.total()).expect("validated radicands").sign() {
            x if x < 0 => SubsetClass::Short,
            0 => SubsetClass::Median,
            _ => SubsetClass::Long,
        })
    }

    /// Same vector with the fixed legs sorted ascending (the telescopic
    /// leg stays last).
    pub fn sorted_fixed(&self) -> Self {
        let mut fixed: Vec<QuadraticScalar> = self.fixed().to_vec();
        fixed.sort_by(|a, b| a.compare(b).expect("validated radicands"));
        fixed.push(self.telescopic().clone());
        Self { legs: fixed }
    }

    /// True when no signed sum of the lengths vanishes. Decided by a
    /// bitset subset-sum sweep for rational vectors and by exhaustive
    /// enumeration otherwise; a single irrational leg makes the vector
    /// generic outright since its radical coefficient cannot cancel.
    pub fn is_generic(&self) -> Result<bool> {
        let irrational = self.legs.iter().filter(|l| !l.is_rational()).count();
        if irrational == 1 {
            return Ok(true);
        }
        let view = ScaledView::build(&self.legs)?;
        if irrational == 0 {
            let total = view.total_rat;
            if total <= GENERIC_DP_LIMIT as i128 {
                let weights: Vec<u64> = view.rat.iter().map(|&w| w as u64).collect();
                return Ok(!has_half_sum(&weights, total as u64));
            }
        }
        if self.legs.len() > ENUM_CAP {
            return Err(Error::Capacity(format!(
                "genericity check needs a scaled perimeter <= {GENERIC_DP_LIMIT} or n <= {ENUM_CAP}, got n = {}",
                self.legs.len()
            )));
        }
        Ok(!view.median_exists())
    }
}

impl fmt::Display for LengthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, leg) in self.legs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{leg}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LengthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for LengthVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_length(item: &str) -> Result<QuadraticScalar> {
    let t = item.trim();
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|rest| rest.strip_suffix(')')) {
        return QuadraticScalar::sqrt_of(parse_rational(inner)?);
    }
    Ok(QuadraticScalar::from_rational(parse_rational(t)?))
}

/// The margin structure of a vector: the smallest nonzero |signed sum|
/// and whether any signed sum is exactly zero.
pub struct SignedSumMargin {
    pub min_nonzero: QuadraticScalar,
    pub has_zero: bool,
}

/// Scans all sign assignments of the given legs (up to the global sign
/// flip) and reports the margin. O(2^(n-1)); capped at ENUM_CAP legs.
pub fn min_abs_signed_sum(legs: &[QuadraticScalar]) -> Result<SignedSumMargin> {
    if legs.is_empty() || legs.len() > ENUM_CAP {
        return Err(Error::Capacity(format!(
            "signed-sum scan handles 1..={ENUM_CAP} legs, got {}",
            legs.len()
        )));
    }
    let view = ScaledView::build(legs)?;
    let mut best: Option<(i128, i128)> = None;
    let mut has_zero = false;
    // value for subset S (legs flipped negative): T - 2*sigma(S); leg 0
    // stays positive, which covers every sign pattern up to global flip
    let m = legs.len() - 1;
    let mut sx = 0i128;
    let mut sy = 0i128;
    let mut consider = |x: i128, y: i128, best: &mut Option<(i128, i128)>| {
        match view.sign_of(x, y) {
            0 => has_zero = true,
            s => {
                let (ax, ay) = if s < 0 { (-x, -y) } else { (x, y) };
                let better = match best {
                    None => true,
                    Some((bx, by)) => view.sign_of(ax - *bx, ay - *by) < 0,
                };
                if better {
                    *best = Some((ax, ay));
                }
            }
        }
    };
    consider(view.total_rat, view.total_irr, &mut best);
    for i in 1u64..(1u64 << m) {
        let bit = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        let leg = bit + 1;
        if gray >> bit & 1 == 1 {
            sx += view.rat[leg];
            sy += view.irr[leg];
        } else {
            sx -= view.rat[leg];
            sy -= view.irr[leg];
        }
        consider(view.total_rat - 2 * sx, view.total_irr - 2 * sy, &mut best);
    }
    let (bx, by) = best.expect("at least the full sum is nonzero");
    Ok(SignedSumMargin {
        min_nonzero: view.reconstruct(bx, by),
        has_zero,
    })
}

/// Integer view of a leg list: all rational parts and radical
/// coefficients scaled by the common denominator, plus the radicand as
/// an integer pair. Signs of `x + y*sqrt(p/q)` are decided in i128 with
/// a big-integer fallback when squares overflow.
pub(crate) struct ScaledView {
    pub rat: Vec<i128>,
    pub irr: Vec<i128>,
    pub rad_num: i128,
    pub rad_den: i128,
    pub total_rat: i128,
    pub total_irr: i128,
    denominator: BigInt,
}

impl ScaledView {
    pub fn build(legs: &[QuadraticScalar]) -> Result<Self> {
        let mut den = BigInt::one();
        for leg in legs {
            den = den.lcm(leg.rational_part().denom());
            if !leg.is_rational() {
                den = den.lcm(leg.radical_coefficient().denom());
            }
        }
        let overflow = || {
            Error::Capacity(
                "leg denominators scale the vector beyond 128-bit integers; reduce them".into(),
            )
        };
        let to_scaled = |r: &Rational| -> Result<i128> {
            let scaled = r.numer() * (&den / r.denom());
            scaled.to_i128().ok_or_else(overflow)
        };
        let mut rat = Vec::with_capacity(legs.len());
        let mut irr = Vec::with_capacity(legs.len());
        let mut radicand = Rational::zero();
        for leg in legs {
            rat.push(to_scaled(leg.rational_part())?);
            irr.push(if leg.is_rational() {
                0
            } else {
                radicand = leg.radicand().clone();
                to_scaled(leg.radical_coefficient())?
            });
        }
        let rad_num = radicand.numer().to_i128().ok_or_else(overflow)?;
        let rad_den = radicand.denom().to_i128().ok_or_else(overflow)?;
        let mut total_rat = 0i128;
        let mut total_irr = 0i128;
        for i in 0..rat.len() {
            total_rat = total_rat.checked_add(rat[i]).ok_or_else(overflow)?;
            total_irr = total_irr.checked_add(irr[i]).ok_or_else(overflow)?;
        }
        // headroom so 2*sigma - T and pairwise differences cannot overflow
        let cap = i128::MAX / 8;
        if total_rat.abs() > cap || total_irr.abs() > cap {
            return Err(overflow());
        }
        Ok(Self {
            rat,
            irr,
            rad_num,
            rad_den,
            total_rat,
            total_irr,
            denominator: den,
        })
    }

    /// Sign of `x + y*sqrt(rad)` with x, y in units of the common
    /// denominator.
    pub fn sign_of(&self, x: i128, y: i128) -> i8 {
        if y == 0 {
            return sgn(x);
        }
        if x == 0 {
            return sgn(y);
        }
        if (x > 0) == (y > 0) {
            return sgn(x);
        }
        let lhs = x
            .checked_mul(x)
            .and_then(|v| v.checked_mul(self.rad_den));
        let rhs = y
            .checked_mul(y)
            .and_then(|v| v.checked_mul(self.rad_num));
        let ord = match (lhs, rhs) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => {
                let l = BigInt::from(x) * BigInt::from(x) * BigInt::from(self.rad_den);
                let r = BigInt::from(y) * BigInt::from(y) * BigInt::from(self.rad_num);
                l.cmp(&r)
            }
        };
        match ord {
            Ordering::Equal => 0,
            Ordering::Greater => sgn(x),
            Ordering::Less => sgn(y),
        }
    }

    /// Rebuilds the exact scalar `(x + y*sqrt(rad)) / denominator`.
    pub fn reconstruct(&self, x: i128, y: i128) -> QuadraticScalar {
        let den = Rational::from(self.denominator.clone());
        let a = Rational::from(BigInt::from(x)) / den.clone();
        let b = Rational::from(BigInt::from(y)) / den;
        let s = Rational::new(BigInt::from(self.rad_num), BigInt::from(self.rad_den.max(1)));
        QuadraticScalar::new(a, b, s).expect("non-negative radicand by construction")
    }

    /// True when some subset sums to exactly half the total. Walks the
    /// 2^(n-1) subsets avoiding leg 0; complements cover the rest.
    pub fn median_exists(&self) -> bool {
        let m = self.rat.len() - 1;
        let mut sx = 0i128;
        let mut sy = 0i128;
        if self.sign_of(self.total_rat, self.total_irr) == 0 {
            return true;
        }
        for i in 1u64..(1u64 << m) {
            let bit = i.trailing_zeros() as usize;
            let gray = i ^ (i >> 1);
            let leg = bit + 1;
            if gray >> bit & 1 == 1 {
                sx += self.rat[leg];
                sy += self.irr[leg];
            } else {
                sx -= self.rat[leg];
                sy -= self.irr[leg];
            }
            if self.sign_of(2 * sx - self.total_rat, 2 * sy - self.total_irr) == 0 {
                return true;
            }
        }
        false
    }
}

fn sgn(x: i128) -> i8 {
    match x.cmp(&0) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Bitset subset-sum reachability: can the weights hit total/2 exactly?
pub(crate) fn has_half_sum(weights: &[u64], total: u64) -> bool {
    if total % 2 == 1 {
        return false;
    }
    let half = (total / 2) as usize;
    let words = half / 64 + 1;
    let mut bits = vec![0u64; words];
    bits[0] = 1;
    for &w in weights {
        let w = w as usize;
        if w > half {
            continue;
        }
        let word_shift = w / 64;
        let bit_shift = w % 64;
        for i in (word_shift..words).rev() {
            let mut v = bits[i - word_shift] << bit_shift;
            if bit_shift > 0 && i > word_shift {
                v |= bits[i - word_shift - 1] >> (64 - bit_shift);
            }
            bits[i] |= v;
        }
    }
    bits[half / 64] >> (half % 64) & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(spec: &str) -> LengthVector {
        LengthVector::parse(spec).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for spec in ["1,1,1/2", "1,1,1,2", "1/4,1/4,1/4,1/4,2,sqrt(8)", "1,2,sqrt(9/2)"] {
            let v = lv(spec);
            assert_eq!(LengthVector::parse(&v.to_string()).unwrap(), v);
        }
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(LengthVector::parse("1,1").is_err());
        assert!(LengthVector::parse("1,0,1").is_err());
        assert!(LengthVector::parse("1,-2,1").is_err());
        assert!(LengthVector::parse("1,sqrt(2),sqrt(3)").is_err());
        assert!(LengthVector::parse("1,1,sqrt(-2)").is_err());
        assert!(LengthVector::parse("").is_err());
        // sqrt(4) normalizes to the rational 2, so no radicand clash
        assert!(LengthVector::parse("1,sqrt(4),sqrt(2)").is_ok());
    }

    #[test]
    fn classification_against_half_perimeter() {
        let v = lv("1,1,1,2");
        // half-perimeter 5/2
        assert_eq!(v.classify_subset(&[0]).unwrap(), SubsetClass::Short);
        assert_eq!(v.classify_subset(&[3]).unwrap(), SubsetClass::Short);
        assert_eq!(v.classify_subset(&[0, 1, 3]).unwrap(), SubsetClass::Long);
        let w = lv("1,1,1,1");
        assert_eq!(w.classify_subset(&[0, 1]).unwrap(), SubsetClass::Median);
        assert!(v.classify_subset(&[0, 0]).is_err());
        assert!(v.classify_subset(&[9]).is_err());
    }

    #[test]
    fn max_fixed_index_breaks_ties_low() {
        assert_eq!(lv("1,3,2,5").max_fixed_index(), 1);
        assert_eq!(lv("2,3,3,1").max_fixed_index(), 1);
        assert_eq!(lv("3,1,1,1").max_fixed_index(), 0);
        assert_eq!(lv("1,1,1,9").max_fixed_index(), 0);
    }

    #[test]
    fn genericity_detection() {
        assert!(!lv("1,1,1,1").is_generic().unwrap());
        assert!(lv("1,1,1,2").is_generic().unwrap());
        assert!(lv("1,1,1,1/2").is_generic().unwrap());
        // single irrational leg is generic outright
        assert!(lv("1,1,1,sqrt(2)").is_generic().unwrap());
        // two irrational legs that cancel are degenerate
        assert!(!lv("sqrt(2),sqrt(2),1,1").is_generic().unwrap());
        // odd scaled total can never split in half
        assert!(lv("1,2,3,5").is_generic().unwrap());
        // {1,2,3} hits the half-perimeter 6 exactly
        assert!(!lv("1,2,3,6").is_generic().unwrap());
    }

    #[test]
    fn sorted_fixed_keeps_telescopic_last() {
        let v = lv("3,1,2,1/2").sorted_fixed();
        assert_eq!(v.to_string(), "1,2,3,1/2");
    }

    #[test]
    fn margin_scan_finds_smallest_gap() {
        let v = lv("1,1,1,2");
        let m = min_abs_signed_sum(v.legs()).unwrap();
        assert!(!m.has_zero);
        // 1+1+1-2 = 1 is the closest approach to zero
        assert_eq!(m.min_nonzero, QuadraticScalar::from_integer(1));

        let w = lv("1,1,1,1");
        assert!(min_abs_signed_sum(w.legs()).unwrap().has_zero);

        let x = lv("1,1,1,1/2");
        let mx = min_abs_signed_sum(x.legs()).unwrap();
        assert!(!mx.has_zero);
        assert_eq!(
            mx.min_nonzero,
            QuadraticScalar::from_rational(Rational::new(BigInt::from(1), BigInt::from(2)))
        );
    }

    #[test]
    fn scaled_view_sign_agrees_with_exact() {
        let legs = lv("1/4,1/4,1/4,1/4,2,sqrt(8)");
        let view = ScaledView::build(legs.legs()).unwrap();
        // total = 3 + sqrt(8) > 0
        assert_eq!(view.sign_of(view.total_rat, view.total_irr), 1);
        // 3 - sqrt(8) > 0, sign decided by 9 vs 8
        assert_eq!(view.sign_of(view.total_rat, -view.total_irr), 1);
        // reconstruct returns the exact scalar
        let rec = view.reconstruct(view.total_rat, view.total_irr);
        assert_eq!(rec, legs.total());
    }
}
