//! Subset-counting engines.
//!
//! For a vector with largest fixed leg at index i* (ties to the smallest
//! index) and telescopic leg last, the quantities counted by cardinality
//! k+1 are:
//!
//!   c_k: subsets containing i* but not the telescopic leg whose sum is
//!        at most the half-perimeter (short or median);
//!   d_k: subsets containing both i* and the telescopic leg whose sum is
//!        strictly below the half-perimeter;
//!   alpha_k: subsets containing the telescopic leg that are strictly
//!        short.
//!
//! Three engines produce c and d: exhaustive enumeration (any scalar,
//! n <= 24), a cardinality-stratified subset-sum table (rational lengths),
//! and a closed form for the mean-field family of N equal short legs, one
//! field leg h, and telescopic radius sqrt(2v + h^2).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linkage::{has_half_sum, LengthVector, ScaledView, ENUM_CAP};
use crate::scalar::{QuadraticScalar, Rational};

/// Largest scaled total perimeter accepted by the subset-sum engine.
const DP_LIMIT: u64 = 100_000_000;
/// Largest table size (cardinality rows times sum columns) for the
/// subset-sum engine.
const DP_CELL_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetCounts {
    pub n: usize,
    /// c_k for k = 0..=n-2.
    pub c: Vec<BigUint>,
    /// d_k for k = 0..=n-2; d_0 is always zero.
    pub d: Vec<BigUint>,
    /// 0-based index of the designated largest fixed leg.
    pub max_fixed_index: usize,
    /// False when some subset is median (a signed sum vanishes).
    pub generic: bool,
}

impl SubsetCounts {
    pub fn total(&self) -> BigUint {
        self.c.iter().chain(self.d.iter()).sum()
    }
}

/// Exhaustive engine: one pass over the 2^(n-2) subsets of the fixed
/// legs other than i*, evaluating both the c and the d condition. Every
/// median pair has a representative containing i*, so the same pass
/// decides genericity.
pub fn count_ckdk_enum(lv: &LengthVector) -> Result<SubsetCounts> {
    let n = lv.n();
    if n > ENUM_CAP {
        return Err(Error::EnumerationCap { n, cap: ENUM_CAP });
    }
    let view = ScaledView::build(lv.legs())?;
    let i_star = lv.max_fixed_index();
    let free: Vec<usize> = (0..n - 1).filter(|&i| i != i_star).collect();
    let m = free.len();

    let mut c_acc = vec![0u64; n - 1];
    let mut d_acc = vec![0u64; n - 1];
    let mut median_seen = false;

    let star_x = view.rat[i_star];
    let star_y = view.irr[i_star];
    let tel_x = view.rat[n - 1];
    let tel_y = view.irr[n - 1];

    let mut sx = 0i128;
    let mut sy = 0i128;
    let mut k = 0usize;
    let visit = |sx: i128, sy: i128, k: usize, c_acc: &mut [u64], d_acc: &mut [u64], median: &mut bool| {
        let cx = 2 * (sx + star_x) - view.total_rat;
        let cy = 2 * (sy + star_y) - view.total_irr;
        match view.sign_of(cx, cy) {
            s if s < 0 => c_acc[k] += 1,
            0 => {
                c_acc[k] += 1;
                *median = true;
            }
            _ => {}
        }
        let dx = cx + 2 * tel_x;
        let dy = cy + 2 * tel_y;
        match view.sign_of(dx, dy) {
            s if s < 0 => {
                if k < n - 2 {
                    d_acc[k + 1] += 1;
                }
            }
            0 => *median = true,
            _ => {}
        }
    };

    visit(sx, sy, k, &mut c_acc, &mut d_acc, &mut median_seen);
    for i in 1u64..(1u64 << m) {
        let bit = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        let leg = free[bit];
        if gray >> bit & 1 == 1 {
            sx += view.rat[leg];
            sy += view.irr[leg];
            k += 1;
        } else {
            sx -= view.rat[leg];
            sy -= view.irr[leg];
            k -= 1;
        }
        visit(sx, sy, k, &mut c_acc, &mut d_acc, &mut median_seen);
    }

    Ok(SubsetCounts {
        n,
        c: c_acc.into_iter().map(BigUint::from).collect(),
        d: d_acc.into_iter().map(BigUint::from).collect(),
        max_fixed_index: i_star,
        generic: !median_seen,
    })
}

/// Subset-sum engine for rational vectors: one table over (cardinality,
/// scaled sum) for the free legs, then c_k and d_k are prefix sums of
/// row k and row k-1 under their respective bounds.
pub fn count_ckdk_dp(lv: &LengthVector) -> Result<SubsetCounts> {
    let n = lv.n();
    for (i, leg) in lv.legs().iter().enumerate() {
        if !leg.is_rational() {
            return Err(Error::DpRequiresRational { index: i });
        }
    }
    let view = ScaledView::build(lv.legs())?;
    let total = view.total_rat;
    if total > DP_LIMIT as i128 {
        return Err(Error::Capacity(format!(
            "scaled total perimeter {total} exceeds the subset-sum limit {DP_LIMIT}"
        )));
    }
    let weights: Vec<i128> = view.rat.clone();
    let i_star = lv.max_fixed_index();
    let free: Vec<usize> = (0..n - 1).filter(|&i| i != i_star).collect();
    let m = free.len();

    // sigma <= bound_c  <=>  2(sigma + w*) <= T
    // sigma <= bound_d  <=>  2(sigma + w* + w_tel) < T
    let bound_c = (total - 2 * weights[i_star]).div_euclid(2);
    let bound_d = (total - 2 * weights[i_star] - 2 * weights[n - 1] - 1).div_euclid(2);

    let mut c = vec![BigUint::zero(); n - 1];
    let mut d = vec![BigUint::zero(); n - 1];
    let generic = !has_half_sum(
        &weights.iter().map(|&w| w as u64).collect::<Vec<_>>(),
        total as u64,
    );

    if bound_c >= 0 {
        let width = bound_c as usize + 1;
        let cells = (m as u128 + 1) * width as u128;
        if cells > DP_CELL_LIMIT {
            return Err(Error::Capacity(format!(
                "subset-sum table would need {cells} cells (limit {DP_CELL_LIMIT})"
            )));
        }
        let mut rows = vec![vec![BigUint::zero(); width]; m + 1];
        rows[0][0] = BigUint::one();
        for &leg in &free {
            let w = weights[leg] as usize;
            if w > bound_c as usize {
                continue;
            }
            for k in (0..m).rev() {
                let (lo, hi) = rows.split_at_mut(k + 1);
                let src = &lo[k];
                let dst = &mut hi[0];
                for sigma in 0..=(bound_c as usize - w) {
                    if !src[sigma].is_zero() {
                        dst[sigma + w] += &src[sigma];
                    }
                }
            }
        }
        for k in 0..=m {
            c[k] = rows[k].iter().sum();
        }
        if bound_d >= 0 {
            let hi = (bound_d as usize).min(bound_c as usize);
            for k in 1..=n - 2 {
                if k - 1 < m {
                    d[k] = rows[k - 1][..=hi].iter().sum();
                }
            }
        }
    }

    Ok(SubsetCounts {
        n,
        c,
        d,
        max_fixed_index: i_star,
        generic,
    })
}

/// alpha_k: strictly short subsets of cardinality k+1 containing the
/// telescopic leg. Exhaustive; n <= 24.
pub fn count_alpha(lv: &LengthVector) -> Result<Vec<BigUint>> {
    let n = lv.n();
    if n > ENUM_CAP {
        return Err(Error::EnumerationCap { n, cap: ENUM_CAP });
    }
    let view = ScaledView::build(lv.legs())?;
    let tel_x = view.rat[n - 1];
    let tel_y = view.irr[n - 1];
    let m = n - 1;
    let mut acc = vec![0u64; n - 1];
    let mut sx = 0i128;
    let mut sy = 0i128;
    let mut k = 0usize;
    let visit = |sx: i128, sy: i128, k: usize, acc: &mut [u64]| {
        if k <= n - 2
            && view.sign_of(
                2 * (sx + tel_x) - view.total_rat,
                2 * (sy + tel_y) - view.total_irr,
            ) < 0
        {
            acc[k] += 1;
        }
    };
    visit(sx, sy, k, &mut acc);
    for i in 1u64..(1u64 << m) {
        let bit = i.trailing_zeros() as usize;
        let gray = i ^ (i >> 1);
        if gray >> bit & 1 == 1 {
            sx += view.rat[bit];
            sy += view.irr[bit];
            k += 1;
        } else {
            sx -= view.rat[bit];
            sy -= view.irr[bit];
            k -= 1;
        }
        visit(sx, sy, k, &mut acc);
    }
    Ok(acc.into_iter().map(BigUint::from).collect())
}

/// Parameter checks shared by every mean-field entry point. Returns the
/// admissible energy interval [a_v, b_v] for the field h.
pub(crate) fn xy_validate(n_rotators: usize, h: &Rational, v: &Rational) -> Result<(Rational, Rational)> {
    if n_rotators < 2 {
        return Err(Error::OutOfRange {
            param: "N",
            value: n_rotators.to_string(),
            range: "N >= 2 rotators".into(),
        });
    }
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n_rotators as u64));
    if !h.is_positive() || *h <= inv_n {
        return Err(Error::OutOfRange {
            param: "h",
            value: h.to_string(),
            range: format!("h > 1/N = {inv_n}"),
        });
    }
    let (a, b) = xy_interval(h);
    if *v < a || *v > b {
        return Err(Error::OutOfRange {
            param: "v",
            value: v.to_string(),
            range: format!("[{a}, {b}] for h = {h}"),
        });
    }
    Ok((a, b))
}

/// Admissible energy interval: a_v = -h^2/2 for h <= 1, 1/2 - h beyond;
/// b_v = h + 1/2.
pub(crate) fn xy_interval(h: &Rational) -> (Rational, Rational) {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let a = if *h <= Rational::one() {
        -(h * h) * &half
    } else {
        &half - h
    };
    let b = h + half;
    (a, b)
}

pub(crate) struct XyCutoffs {
    /// Largest k with k/N <= p_v; c_k = C(N,k) for k <= kc.
    pub kc: i64,
    /// Largest i with i/N < (1-h-r)/2; d_{i+1} = C(N,i) for i <= id_max.
    pub id_max: i64,
    pub generic: bool,
}

/// Exact cutoffs for the mean-field family. Irrational radius means the
/// vector is automatically generic; rational radius reduces the median
/// search to four exact divisibility checks.
pub(crate) fn xy_cutoffs(n_rotators: usize, h: &Rational, v: &Rational) -> Result<XyCutoffs> {
    xy_validate(n_rotators, h, v)?;
    let n_big = Rational::from(BigInt::from(n_rotators as u64));
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let two = Rational::from(BigInt::from(2));
    let radius = QuadraticScalar::sqrt_of(&two * v + h * h)?;
    let one_minus_h = Rational::one() - h;
    let p = radius.add_rational(&one_minus_h).scale(&half);
    let q = radius.neg().add_rational(&one_minus_h).scale(&half);

    let np = p.scale(&n_big);
    let kc = np
        .floor()
        .to_i64()
        .expect("p*N is bounded by N")
        .clamp(-1, n_rotators as i64);
    let nq = q.scale(&n_big);
    let id_max = (nq.ceil().to_i64().expect("q*N is bounded by N") - 1)
        .clamp(-1, n_rotators as i64 - 1);

    let generic = if !radius.is_rational() {
        true
    } else {
        let rho = radius.as_rational().unwrap().clone();
        let s_star = (Rational::one() + h + &rho) * &half;
        let mut median = false;
        for take_h in [false, true] {
            for take_r in [false, true] {
                let mut rest = s_star.clone();
                if take_h {
                    rest -= h;
                }
                if take_r {
                    rest -= &rho;
                }
                let j = &rest * &n_big;
                if j.is_integer() && !j.is_negative() && j <= n_big {
                    median = true;
                }
            }
        }
        !median
    };

    Ok(XyCutoffs {
        kc,
        id_max,
        generic,
    })
}

/// Closed-form engine for the mean-field family: N legs of length 1/N,
/// one field leg h > 1/N, telescopic radius sqrt(2v + h^2). All subsets
/// of equal cardinality through the field leg share one sum, so each
/// count is a plain binomial gated by an exact cutoff.
pub fn count_ckdk_xy_closed(n_rotators: usize, h: &Rational, v: &Rational) -> Result<SubsetCounts> {
    let cut = xy_cutoffs(n_rotators, h, v)?;
    let bign = n_rotators as u64;
    let len = n_rotators + 1;
    let mut c = vec![BigUint::zero(); len];
    let mut d = vec![BigUint::zero(); len];
    for_each_binomial(bign, bign, |k, value| {
        if (k as i64) <= cut.kc {
            c[k as usize] = value.clone();
        }
        if (k as i64) <= cut.id_max {
            d[k as usize + 1] = value.clone();
        }
    });
    Ok(SubsetCounts {
        n: n_rotators + 2,
        c,
        d,
        max_fixed_index: n_rotators,
        generic: cut.generic,
    })
}

/// Streams C(n,0), C(n,1), ..., C(n,upto) without materializing the row.
pub(crate) fn for_each_binomial(n: u64, upto: u64, mut f: impl FnMut(u64, &BigUint)) {
    let mut value = BigUint::one();
    f(0, &value);
    let mut k = 0u64;
    while k < upto.min(n) {
        value = value * (n - k) / (k + 1);
        k += 1;
        f(k, &value);
    }
}

/// Single binomial coefficient, using the shorter side.
pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut value = BigUint::one();
    for i in 0..k {
        value = value * (n - i) / (i + 1);
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(spec: &str) -> LengthVector {
        LengthVector::parse(spec).unwrap()
    }

    fn nums(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn enumeration_matches_worked_examples() {
        let a = count_ckdk_enum(&lv("1,1,1/2")).unwrap();
        assert_eq!(a.c, nums(&[1, 0]));
        assert_eq!(a.d, nums(&[0, 0]));
        assert_eq!(a.max_fixed_index, 0);
        assert!(a.generic);

        let b = count_ckdk_enum(&lv("1,1,1,1/2")).unwrap();
        assert_eq!(b.c, nums(&[1, 0, 0]));
        assert_eq!(b.d, nums(&[0, 1, 0]));

        let c = count_ckdk_enum(&lv("1,1,1,2")).unwrap();
        assert_eq!(c.c, nums(&[1, 2, 0]));
        assert_eq!(c.d, nums(&[0, 0, 0]));

        let d = count_ckdk_enum(&lv("1,1,5,5,5,1/2")).unwrap();
        assert_eq!(d.c, nums(&[1, 2, 1, 0, 0]));
        assert_eq!(d.d, nums(&[0, 1, 2, 1, 0]));
        assert_eq!(d.max_fixed_index, 2);
    }

    #[test]
    fn engines_agree_on_rational_vectors() {
        for spec in [
            "1,1,1/2",
            "1,1,1,1/2",
            "1,1,1,2",
            "1,1,5,5,5,1/2",
            "3/4,5/4,1,7/4,1/2",
            "2,2,3,3,5,7,1/4",
            "1,1,1,1", // non-generic
            "1,2,3,6", // non-generic
        ] {
            let v = lv(spec);
            let e = count_ckdk_enum(&v).unwrap();
            let d = count_ckdk_dp(&v).unwrap();
            assert_eq!(e, d, "engines disagree on {spec}");
        }
    }

    #[test]
    fn dp_rejects_irrational_legs() {
        let v = lv("1,1,1,sqrt(2)");
        assert!(matches!(
            count_ckdk_dp(&v),
            Err(Error::DpRequiresRational { index: 3 })
        ));
    }

    #[test]
    fn alpha_counts_strictly_short_telescopic_subsets() {
        assert_eq!(count_alpha(&lv("1,1,1,1/2")).unwrap(), nums(&[1, 3, 0]));
        assert_eq!(count_alpha(&lv("1,1,1,2")).unwrap(), nums(&[1, 0, 0]));
        assert_eq!(count_alpha(&lv("1,1,1/2")).unwrap(), nums(&[1, 0]));
    }

    #[test]
    fn xy_closed_form_matches_hand_computation() {
        let h = Rational::from(BigInt::from(2));
        let v = Rational::zero();
        let counts = count_ckdk_xy_closed(4, &h, &v).unwrap();
        assert_eq!(counts.n, 6);
        assert_eq!(counts.c, nums(&[1, 4, 6, 0, 0]));
        assert_eq!(counts.d, nums(&[0, 0, 0, 0, 0]));
        assert_eq!(counts.max_fixed_index, 4);
        assert!(!counts.generic);
        assert_eq!(counts.total(), BigUint::from(11u32));
    }

    #[test]
    fn xy_closed_form_matches_enumeration() {
        let cases = [
            (3usize, Rational::new(BigInt::one(), BigInt::from(2)), Rational::new(BigInt::one(), BigInt::from(4))),
            (5, Rational::from(BigInt::from(2)), Rational::new(BigInt::from(-1), BigInt::one())),
            (6, Rational::new(BigInt::from(3), BigInt::from(4)), Rational::new(BigInt::from(-1), BigInt::from(8))),
            (4, Rational::from(BigInt::from(2)), Rational::new(BigInt::from(5), BigInt::from(2))),
        ];
        for (n_rot, h, v) in cases {
            let closed = count_ckdk_xy_closed(n_rot, &h, &v).unwrap();
            let eps = Rational::new(BigInt::one(), BigInt::from(n_rot as u64));
            let two = Rational::from(BigInt::from(2));
            let mut legs = vec![QuadraticScalar::from_rational(eps); n_rot];
            legs.push(QuadraticScalar::from_rational(h.clone()));
            legs.push(QuadraticScalar::sqrt_of(&two * &v + &h * &h).unwrap());
            let vector = LengthVector::new(legs).unwrap();
            let enumerated = count_ckdk_enum(&vector).unwrap();
            assert_eq!(closed, enumerated, "N={n_rot} h={h} v={v}");
        }
    }

    #[test]
    fn xy_validation_errors_name_the_parameter() {
        let h = Rational::new(BigInt::one(), BigInt::from(8));
        let v = Rational::zero();
        // h = 1/8 <= 1/N for N = 4
        let err = count_ckdk_xy_closed(4, &h, &v).unwrap_err();
        assert!(err.to_string().contains('h'), "{err}");

        let h = Rational::from(BigInt::from(2));
        let v = Rational::from(BigInt::from(3));
        let err = count_ckdk_xy_closed(4, &h, &v).unwrap_err();
        assert!(err.to_string().contains('v'), "{err}");

        let err = count_ckdk_xy_closed(1, &h, &Rational::zero()).unwrap_err();
        assert!(err.to_string().contains('N'), "{err}");
    }

    #[test]
    fn telescopic_growth_moves_counts_monotonically() {
        let small = count_ckdk_enum(&lv("1,1,1,1/2")).unwrap();
        let large = count_ckdk_enum(&lv("1,1,1,2")).unwrap();
        for k in 0..3 {
            assert!(small.c[k] <= large.c[k]);
            assert!(small.d[k] >= large.d[k]);
        }
    }

    #[test]
    fn binomial_helpers() {
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(binomial(10, 7), BigUint::from(120u32));
        assert_eq!(binomial(5, 9), BigUint::zero());
        let mut row = Vec::new();
        for_each_binomial(6, 6, |_, v| row.push(v.clone()));
        assert_eq!(row, nums(&[1, 6, 15, 20, 15, 6, 1]));
    }
}
