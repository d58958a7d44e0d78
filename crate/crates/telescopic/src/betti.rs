//! Betti profiles of the configuration space.
//!
//! For a generic vector the homology is free abelian with ranks
//! b_k = c_k + d_{n-3-k}; the profile also carries the total rank and
//! the Euler characteristic. Disconnection (two components, each a
//! torus times a disk) happens exactly when the two largest fixed legs
//! other than the designated maximum jointly outweigh the rest.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::counts::{count_ckdk_dp, count_ckdk_enum, SubsetCounts};
use crate::error::{Error, Result};
use crate::linkage::{min_abs_signed_sum, LengthVector, SubsetClass, ENUM_CAP};
use crate::scalar::QuadraticScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiProfile {
    pub n: usize,
    /// Dimension of the configuration space, n - 3.
    pub dimension: usize,
    /// b_k for k = 0..=n-2; entries beyond the dimension are zero except
    /// in the degenerate regime where the telescopic leg dominates.
    pub b: Vec<BigUint>,
    pub total: BigUint,
    pub euler: BigInt,
    pub generic: bool,
}

/// Assembles the profile from subset counts via b_k = c_k + d_{n-3-k}.
pub fn betti_profile(counts: &SubsetCounts) -> BettiProfile {
    let n = counts.n;
    let mut b = vec![BigUint::zero(); n - 1];
    for (k, slot) in b.iter_mut().enumerate() {
        *slot = counts.c[k].clone();
        if n >= 3 + k {
            let j = n - 3 - k;
            *slot += &counts.d[j];
        }
    }
    let total: BigUint = b.iter().sum();
    let mut euler = BigInt::zero();
    for (k, rank) in b.iter().enumerate() {
        let signed = BigInt::from(rank.clone());
        if k % 2 == 0 {
            euler += signed;
        } else {
            euler -= signed;
        }
    }
    BettiProfile {
        n,
        dimension: n.saturating_sub(3),
        b,
        total,
        euler,
        generic: counts.generic,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Auto,
    Enumeration,
    SubsetSum,
}

/// Computes the profile with the requested engine; Auto enumerates when
/// n is small enough and falls back to the subset-sum table otherwise.
pub fn profile_with_engine(lv: &LengthVector, engine: Engine) -> Result<BettiProfile> {
    let counts = match engine {
        Engine::Enumeration => count_ckdk_enum(lv)?,
        Engine::SubsetSum => count_ckdk_dp(lv)?,
        Engine::Auto => {
            if lv.n() <= ENUM_CAP {
                count_ckdk_enum(lv)?
            } else {
                count_ckdk_dp(lv)?
            }
        }
    };
    Ok(betti_profile(&counts))
}

/// Disconnection test for n > 3: with the fixed legs sorted ascending,
/// the space splits into two components exactly when the second and
/// third largest fixed legs together are long.
pub fn is_disconnected(lv: &LengthVector) -> Result<bool> {
    let n = lv.n();
    if n <= 3 {
        return Err(Error::OutOfRange {
            param: "n",
            value: n.to_string(),
            range: "n > 3 for the disconnection test".into(),
        });
    }
    let sorted = lv.sorted_fixed();
    let class = sorted.classify_subset(&[n - 4, n - 3])?;
    Ok(class == SubsetClass::Long)
}

/// Checks that every candidate telescopic length below the smallest
/// nonzero signed sum of the fixed legs yields one and the same Betti
/// profile (the space has stabilized to the small-leg regime).
pub fn small_leg_stability(
    fixed: &[QuadraticScalar],
    candidates: &[QuadraticScalar],
) -> Result<bool> {
    if fixed.len() < 2 {
        return Err(Error::OutOfRange {
            param: "fixed legs",
            value: fixed.len().to_string(),
            range: ">= 2 legs".into(),
        });
    }
    if candidates.is_empty() {
        return Err(Error::OutOfRange {
            param: "candidates",
            value: "0 values".into(),
            range: ">= 1 telescopic candidate".into(),
        });
    }
    let margin = min_abs_signed_sum(fixed)?;
    if margin.has_zero {
        return Err(Error::NonGeneric(
            "a signed sum of the fixed legs vanishes; the small-leg regime is undefined".into(),
        ));
    }
    let mut reference: Option<BettiProfile> = None;
    for candidate in candidates {
        if !candidate.is_positive()
            || candidate.compare(&margin.min_nonzero)? != std::cmp::Ordering::Less
        {
            return Err(Error::OutOfRange {
                param: "telescopic candidate",
                value: candidate.to_string(),
                range: format!("(0, {}) exclusive", margin.min_nonzero),
            });
        }
        let mut legs = fixed.to_vec();
        legs.push(candidate.clone());
        let profile = profile_with_engine(&LengthVector::new(legs)?, Engine::Enumeration)?;
        match &reference {
            None => reference = Some(profile),
            Some(first) => {
                if *first != profile {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, Rational};
    use num_bigint::BigInt;

    fn lv(spec: &str) -> LengthVector {
        LengthVector::parse(spec).unwrap()
    }

    fn nums(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn profile(spec: &str) -> BettiProfile {
        profile_with_engine(&lv(spec), Engine::Auto).unwrap()
    }

    #[test]
    fn worked_profiles() {
        let p = profile("1,1,1,2");
        assert_eq!(p.b, nums(&[1, 2, 0]));
        assert_eq!(p.total, BigUint::from(3u32));
        assert_eq!(p.euler, BigInt::from(-1));
        assert_eq!(p.dimension, 1);
        assert!(p.generic);

        let q = profile("1,1,1,1/2");
        assert_eq!(q.b, nums(&[2, 0, 0]));
        assert_eq!(q.total, BigUint::from(2u32));
        assert_eq!(q.euler, BigInt::from(2));

        let tri = profile("1,1,1/2");
        assert_eq!(tri.b, nums(&[1, 0]));
    }

    #[test]
    fn dominant_telescopic_leg_keeps_the_whole_torus() {
        // the telescopic leg exceeds the fixed perimeter, so the radius
        // constraint never binds and the space is the full torus
        let p = profile("1,1,1,10");
        assert_eq!(p.b, nums(&[1, 2, 1]));
        assert_eq!(p.euler, BigInt::from(0));
    }

    #[test]
    fn empty_space_when_a_fixed_leg_dominates() {
        let p = profile("1,1,10,1/2");
        assert_eq!(p.b, nums(&[0, 0, 0]));
        assert_eq!(p.total, BigUint::zero());
    }

    #[test]
    fn disconnection_matches_two_heavy_legs() {
        assert!(is_disconnected(&lv("1,1,5,5,5,1/2")).unwrap());
        assert!(!is_disconnected(&lv("1,1,1,2")).unwrap());
        assert!(is_disconnected(&lv("1,1,1,1/2")).unwrap());
        assert!(is_disconnected(&lv("1,1,1/2")).is_err());

        let split = profile("1,1,5,5,5,1/2");
        assert_eq!(split.b, nums(&[2, 4, 2, 0, 0]));
        // 2 * C(n-4, k) with n = 6
        assert_eq!(split.b[0], BigUint::from(2u32));
        assert_eq!(split.b[1], BigUint::from(4u32));
    }

    #[test]
    fn small_leg_profiles_stabilize() {
        let fixed: Vec<QuadraticScalar> = ["1", "2", "4"]
            .iter()
            .map(|s| QuadraticScalar::from_rational(parse_rational(s).unwrap()))
            .collect();
        // signed sums of (1,2,4): minimum nonzero magnitude is 1
        let candidates: Vec<QuadraticScalar> = ["1/2", "1/4", "1/8"]
            .iter()
            .map(|s| QuadraticScalar::from_rational(parse_rational(s).unwrap()))
            .collect();
        assert!(small_leg_stability(&fixed, &candidates).unwrap());

        let too_big = [QuadraticScalar::from_rational(
            Rational::new(BigInt::from(3), BigInt::from(2)),
        )];
        assert!(small_leg_stability(&fixed, &too_big).is_err());

        let degenerate: Vec<QuadraticScalar> = ["1", "2", "3"]
            .iter()
            .map(|s| QuadraticScalar::from_rational(parse_rational(s).unwrap()))
            .collect();
        assert!(small_leg_stability(&degenerate, &candidates).is_err());
    }
}
