//! The anti-ferromagnetic mean-field rotator family.
//!
//! N rotators of weight 1/N, an external field leg h > 1/N, and a
//! telescopic leg of radius r = sqrt(2v + h^2) parametrized by the
//! energy density v. The admissible energies form [a_v, b_v] with
//! a_v = -h^2/2 (h <= 1) or 1/2 - h (h >= 1) and b_v = h + 1/2. The
//! total Betti number b grows like exp(n tau(v)) where tau is the
//! Shannon entropy of p_v = (1 - h + r)/2 below v = 0 and ln 2 above;
//! tau'' jumps by 1/h^2 across v = 0.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::counts::{binomial, for_each_binomial, xy_cutoffs, xy_interval, xy_validate};
use crate::error::{Error, Result};
use crate::linkage::LengthVector;
use crate::logsum::{ln_biguint, ln_partial_binomial_sum, log_sum_exp};
use crate::scalar::{QuadraticScalar, Rational};

/// Exact big-integer paths refuse rotor counts past this size; the
/// log-space mode has no such limit.
pub const EXACT_LIMIT: usize = 100_000;

#[derive(Clone, Debug)]
pub struct XYParams {
    n_rotators: usize,
    field: Rational,
    energy: Rational,
}

impl XYParams {
    pub fn new(n_rotators: usize, field: Rational, energy: Rational) -> Result<Self> {
        xy_validate(n_rotators, &field, &energy)?;
        Ok(Self {
            n_rotators,
            field,
            energy,
        })
    }

    pub fn n_rotators(&self) -> usize {
        self.n_rotators
    }

    pub fn field(&self) -> &Rational {
        &self.field
    }

    pub fn energy(&self) -> &Rational {
        &self.energy
    }

    /// Number of legs of the underlying linkage.
    pub fn n(&self) -> usize {
        self.n_rotators + 2
    }

    pub fn counts(&self) -> Result<crate::counts::SubsetCounts> {
        crate::counts::count_ckdk_xy_closed(self.n_rotators, &self.field, &self.energy)
    }

    /// The explicit length vector (1/N, ..., 1/N, h, r). Requires r > 0.
    pub fn length_vector(&self) -> Result<LengthVector> {
        let radius = magnetization_radius(&self.field, &self.energy)?;
        if !radius.is_positive() {
            return Err(Error::OutOfRange {
                param: "v",
                value: self.energy.to_string(),
                range: "v > -h^2/2 so the telescopic radius is positive".into(),
            });
        }
        let eps = Rational::new(BigInt::from(1), BigInt::from(self.n_rotators as u64));
        let mut legs = vec![QuadraticScalar::from_rational(eps); self.n_rotators];
        legs.push(QuadraticScalar::from_rational(self.field.clone()));
        legs.push(radius);
        LengthVector::new(legs)
    }
}

/// Admissible energy interval [a_v, b_v] for a field h > 0.
pub fn v_interval(h: &Rational) -> Result<(Rational, Rational)> {
    if !h.is_positive() {
        return Err(Error::OutOfRange {
            param: "h",
            value: h.to_string(),
            range: "h > 0".into(),
        });
    }
    Ok(xy_interval(h))
}

/// Telescopic radius r = sqrt(2v + h^2); defined whenever 2v + h^2 >= 0.
pub fn magnetization_radius(h: &Rational, v: &Rational) -> Result<QuadraticScalar> {
    if !h.is_positive() {
        return Err(Error::OutOfRange {
            param: "h",
            value: h.to_string(),
            range: "h > 0".into(),
        });
    }
    let two = Rational::from(BigInt::from(2));
    let arg = &two * v + h * h;
    if arg.is_negative() {
        return Err(Error::OutOfRange {
            param: "v",
            value: v.to_string(),
            range: format!("v >= -h^2/2 = {}", -(h * h) / two),
        });
    }
    QuadraticScalar::sqrt_of(arg)
}

/// Occupation fraction p_v = (1 - h + r)/2, an exact quadratic scalar
/// in [0, 1] over the admissible interval.
pub fn p_of_v(h: &Rational, v: &Rational) -> Result<QuadraticScalar> {
    if !h.is_positive() {
        return Err(Error::OutOfRange {
            param: "h",
            value: h.to_string(),
            range: "h > 0".into(),
        });
    }
    let (a, b) = xy_interval(h);
    if v < &a || v > &b {
        return Err(Error::OutOfRange {
            param: "v",
            value: v.to_string(),
            range: format!("[{a}, {b}] for h = {h}"),
        });
    }
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let one_minus_h = Rational::from(BigInt::from(1)) - h;
    Ok(magnetization_radius(h, v)?
        .add_rational(&one_minus_h)
        .scale(&half))
}

/// Analytic growth rate: Shannon entropy H(p_v) below v = 0, ln 2 at and
/// above. Defined on the open interval (a_v, b_v).
pub fn tau_analytic(h: &Rational, v: &Rational) -> Result<f64> {
    if !h.is_positive() {
        return Err(Error::OutOfRange {
            param: "h",
            value: h.to_string(),
            range: "h > 0".into(),
        });
    }
    let (a, b) = xy_interval(h);
    if v <= &a || v >= &b {
        return Err(Error::OutOfRange {
            param: "v",
            value: v.to_string(),
            range: format!("({a}, {b}) open interval for h = {h}"),
        });
    }
    if !v.is_negative() {
        return Ok(std::f64::consts::LN_2);
    }
    let p = p_of_v(h, v)?.to_f64();
    Ok(-p * p.ln() - (1.0 - p) * (1.0 - p).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BettiMode {
    Exact,
    LogSpace,
}

#[derive(Clone, Debug)]
pub struct TotalBetti {
    /// Present in exact mode only.
    pub exact: Option<BigUint>,
    /// ln b in either mode.
    pub ln: f64,
}

/// Total Betti number b = sum_k c_k + sum_k d_k: the binomial prefix up
/// to the c cutoff plus the prefix up to the d cutoff.
pub fn total_betti_xy(params: &XYParams, mode: BettiMode) -> Result<TotalBetti> {
    let cut = xy_cutoffs(params.n_rotators, &params.field, &params.energy)?;
    let n = params.n_rotators as u64;
    match mode {
        BettiMode::Exact => {
            if params.n_rotators > EXACT_LIMIT {
                return Err(Error::Capacity(format!(
                    "exact mode supports N <= {EXACT_LIMIT}; use the log-space mode"
                )));
            }
            let hi = cut.kc.max(cut.id_max).max(0) as u64;
            let mut b = BigUint::zero();
            for_each_binomial(n, hi.min(n), |k, value| {
                if (k as i64) <= cut.kc {
                    b += value;
                }
                if (k as i64) <= cut.id_max {
                    b += value;
                }
            });
            let ln = ln_biguint(&b);
            Ok(TotalBetti { exact: Some(b), ln })
        }
        BettiMode::LogSpace => {
            let ln_c = ln_partial_binomial_sum(n, cut.kc);
            let ln_d = ln_partial_binomial_sum(n, cut.id_max);
            Ok(TotalBetti {
                exact: None,
                ln: log_sum_exp(ln_c, ln_d),
            })
        }
    }
}

/// Empirical growth rate ln(b)/n with n = N + 2 legs.
pub fn tau_empirical(params: &XYParams, mode: BettiMode) -> Result<f64> {
    let b = total_betti_xy(params, mode)?;
    Ok(b.ln / params.n() as f64)
}

#[derive(Clone, Debug)]
pub struct EulerGrowth {
    pub chi: BigInt,
    /// -1, 0, or +1.
    pub sign: i8,
    /// ln|chi| / n; -inf when chi = 0.
    pub ln_abs_over_n: f64,
}

/// Exact Euler characteristic via the alternating prefix identity
/// sum_{k<=m} (-1)^k C(N,k) = (-1)^m C(N-1,m), split over the c and d
/// contributions.
pub fn euler_growth_xy(params: &XYParams) -> Result<EulerGrowth> {
    if params.n_rotators > EXACT_LIMIT {
        return Err(Error::Capacity(format!(
            "exact Euler characteristic supports N <= {EXACT_LIMIT}"
        )));
    }
    let cut = xy_cutoffs(params.n_rotators, &params.field, &params.energy)?;
    let n = params.n_rotators as u64;
    let alt_prefix = |m: i64| -> BigInt {
        if m < 0 {
            return BigInt::zero();
        }
        let value = BigInt::from(binomial(n - 1, m as u64));
        if m % 2 == 0 {
            value
        } else {
            -value
        }
    };
    let alt_c = alt_prefix(cut.kc);
    let alt_d = alt_prefix(cut.id_max);
    // chi = alt_c - (-1)^(N-1) alt_d
    let chi = if (params.n_rotators - 1).is_multiple_of(2) {
        alt_c - alt_d
    } else {
        alt_c + alt_d
    };
    let sign = match chi.sign() {
        num_bigint::Sign::Minus => -1i8,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    };
    let ln_abs_over_n = if sign == 0 {
        f64::NEG_INFINITY
    } else {
        ln_biguint(chi.magnitude()) / params.n() as f64
    };
    Ok(EulerGrowth {
        chi,
        sign,
        ln_abs_over_n,
    })
}

/// A uniform rational grid of energies, endpoints included.
#[derive(Clone, Debug)]
pub struct VGrid {
    from: Rational,
    to: Rational,
    steps: usize,
}

impl VGrid {
    pub fn new(from: Rational, to: Rational, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::OutOfRange {
                param: "steps",
                value: steps.to_string(),
                range: ">= 2 grid points".into(),
            });
        }
        if from >= to {
            return Err(Error::OutOfRange {
                param: "v-from",
                value: from.to_string(),
                range: format!("strictly below v-to = {to}"),
            });
        }
        Ok(Self { from, to, steps })
    }

    pub fn points(&self) -> Vec<Rational> {
        let span = &self.to - &self.from;
        let den = Rational::from(BigInt::from(self.steps as u64 - 1));
        (0..self.steps)
            .map(|i| &self.from + &span * Rational::from(BigInt::from(i as u64)) / &den)
            .collect()
    }

    pub fn spacing(&self) -> Rational {
        (&self.to - &self.from) / Rational::from(BigInt::from(self.steps as u64 - 1))
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn require_inside(&self, h: &Rational) -> Result<()> {
        let (a, b) = v_interval(h)?;
        if self.from <= a {
            return Err(Error::OutOfRange {
                param: "v-from",
                value: self.from.to_string(),
                range: format!("strictly above a_v = {a}"),
            });
        }
        if self.to >= b {
            return Err(Error::OutOfRange {
                param: "v-to",
                value: self.to.to_string(),
                range: format!("strictly below b_v = {b}"),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KinkEstimate {
    /// Grid index where the second-difference jump peaks.
    pub index: usize,
    pub v: f64,
    /// |D2[i+1] - D2[i-1]| at the peak: the estimated jump of tau''.
    pub second_diff_jump: f64,
    /// |left - right| of second-order one-sided slopes at the peak.
    pub slope_mismatch: f64,
}

#[derive(Clone, Debug)]
pub struct KinkReport {
    pub spacing: f64,
    pub analytic: KinkEstimate,
    /// One estimate per requested rotor count, on tau_empirical curves.
    pub empirical: Vec<(usize, KinkEstimate)>,
}

/// Estimates the location and size of the second-derivative jump of a
/// sampled curve. Needs at least 5 points.
fn kink_estimate(vs: &[f64], taus: &[f64], spacing: f64) -> KinkEstimate {
    let n = vs.len();
    let d2: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                f64::NAN
            } else {
                (taus[i + 1] - 2.0 * taus[i] + taus[i - 1]) / (spacing * spacing)
            }
        })
        .collect();
    let mut best_index = 2;
    let mut best_jump = f64::NEG_INFINITY;
    for i in 2..=n - 3 {
        let jump = (d2[i + 1] - d2[i - 1]).abs();
        if jump > best_jump {
            best_jump = jump;
            best_index = i;
        }
    }
    let i = best_index;
    let left = (3.0 * taus[i] - 4.0 * taus[i - 1] + taus[i - 2]) / (2.0 * spacing);
    let right = (-3.0 * taus[i] + 4.0 * taus[i + 1] - taus[i + 2]) / (2.0 * spacing);
    KinkEstimate {
        index: i,
        v: vs[i],
        second_diff_jump: best_jump,
        slope_mismatch: (left - right).abs(),
    }
}

/// Scans tau across the grid and reports the kink of the analytic curve
/// and of each empirical curve ln(b)/n.
pub fn kink_scan(h: &Rational, grid: &VGrid, n_list: &[usize]) -> Result<KinkReport> {
    grid.require_inside(h)?;
    if grid.steps < 5 {
        return Err(Error::OutOfRange {
            param: "steps",
            value: grid.steps.to_string(),
            range: ">= 5 grid points for kink detection".into(),
        });
    }
    let points = grid.points();
    let vs: Vec<f64> = points.iter().map(|v| v.to_f64().unwrap()).collect();
    let spacing = grid.spacing().to_f64().unwrap();
    let analytic_taus: Vec<f64> = points
        .iter()
        .map(|v| tau_analytic(h, v))
        .collect::<Result<_>>()?;
    let analytic = kink_estimate(&vs, &analytic_taus, spacing);
    let mut empirical = Vec::new();
    for &n_rot in n_list {
        let taus: Vec<f64> = points
            .iter()
            .map(|v| {
                tau_empirical(
                    &XYParams::new(n_rot, h.clone(), v.clone())?,
                    BettiMode::LogSpace,
                )
            })
            .collect::<Result<_>>()?;
        empirical.push((n_rot, kink_estimate(&vs, &taus, spacing)));
    }
    Ok(KinkReport {
        spacing,
        analytic,
        empirical,
    })
}

#[derive(Clone, Debug)]
pub struct RateCell {
    pub n_rotators: usize,
    pub tau: f64,
    pub sigma_sign: i8,
    pub sigma: f64,
}

#[derive(Clone, Debug)]
pub struct RateRow {
    pub v: Rational,
    pub p_v: f64,
    pub tau_analytic: f64,
    pub cells: Vec<RateCell>,
}

/// Tabulates analytic and empirical growth rates across a grid: tau from
/// the log-space sums, sigma (Euler growth) from the exact alternating
/// identity.
pub fn rate_curve(h: &Rational, grid: &VGrid, n_list: &[usize]) -> Result<Vec<RateRow>> {
    grid.require_inside(h)?;
    let mut rows = Vec::with_capacity(grid.steps);
    for v in grid.points() {
        let mut cells = Vec::with_capacity(n_list.len());
        for &n_rot in n_list {
            let params = XYParams::new(n_rot, h.clone(), v.clone())?;
            let tau = tau_empirical(&params, BettiMode::LogSpace)?;
            let euler = euler_growth_xy(&params)?;
            cells.push(RateCell {
                n_rotators: n_rot,
                tau,
                sigma_sign: euler.sign,
                sigma: euler.ln_abs_over_n,
            });
        }
        rows.push(RateRow {
            p_v: p_of_v(h, &v)?.to_f64(),
            tau_analytic: tau_analytic(h, &v)?,
            v,
            cells,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::betti::betti_profile;
    use crate::scalar::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn interval_endpoints() {
        assert_eq!(v_interval(&rat("2")).unwrap(), (rat("-3/2"), rat("5/2")));
        assert_eq!(v_interval(&rat("1/2")).unwrap(), (rat("-1/8"), rat("1")));
        assert_eq!(v_interval(&rat("1")).unwrap(), (rat("-1/2"), rat("3/2")));
        assert!(v_interval(&rat("0")).is_err());
    }

    #[test]
    fn occupation_fraction() {
        let p = p_of_v(&rat("2"), &rat("0")).unwrap();
        assert_eq!(p.as_rational().unwrap(), &rat("1/2"));
        let p = p_of_v(&rat("2"), &rat("5/2")).unwrap();
        assert_eq!(p.as_rational().unwrap(), &rat("1"));
        let p = p_of_v(&rat("2"), &rat("-3/2")).unwrap();
        assert_eq!(p.as_rational().unwrap(), &rat("0"));
        let p = p_of_v(&rat("2"), &rat("-1")).unwrap();
        assert!((p.to_f64() - 0.20710678118654752).abs() < 1e-15);
        assert!(p_of_v(&rat("2"), &rat("3")).is_err());
    }

    #[test]
    fn analytic_rate_values() {
        let ln2 = std::f64::consts::LN_2;
        assert_eq!(tau_analytic(&rat("2"), &rat("0")).unwrap(), ln2);
        assert_eq!(tau_analytic(&rat("2"), &rat("1")).unwrap(), ln2);
        let t = tau_analytic(&rat("2"), &rat("-1")).unwrap();
        assert!((t - 0.5100980575778081).abs() < 1e-12, "{t}");
        assert!(tau_analytic(&rat("2"), &rat("5/2")).is_err());
        assert!(tau_analytic(&rat("2"), &rat("-3/2")).is_err());
    }

    #[test]
    fn total_betti_matches_hand_count() {
        let params = XYParams::new(4, rat("2"), rat("0")).unwrap();
        let b = total_betti_xy(&params, BettiMode::Exact).unwrap();
        assert_eq!(b.exact.unwrap(), BigUint::from(11u32));
        let lb = total_betti_xy(&params, BettiMode::LogSpace).unwrap();
        assert!((lb.ln - (11.0f64).ln()).abs() < 1e-9);
        assert!(
            (tau_empirical(&params, BettiMode::Exact).unwrap() - (11.0f64).ln() / 6.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn saturated_interval_gives_full_power_of_two() {
        let params = XYParams::new(100, rat("2"), rat("5/2")).unwrap();
        let b = total_betti_xy(&params, BettiMode::Exact).unwrap();
        assert_eq!(b.exact.unwrap(), BigUint::from(1u32) << 100);
    }

    #[test]
    fn euler_identity_agrees_with_profile() {
        let cases = [
            (4usize, "2", "0"),
            (4, "1/2", "-1/10"),
            (7, "1/2", "-1/16"),
            (9, "2", "-1"),
            (12, "3/4", "1/4"),
            (5, "2", "5/2"),
        ];
        for (n_rot, h, v) in cases {
            let params = XYParams::new(n_rot, rat(h), rat(v)).unwrap();
            let growth = euler_growth_xy(&params).unwrap();
            let profile = betti_profile(&params.counts().unwrap());
            assert_eq!(growth.chi, profile.euler, "N={n_rot} h={h} v={v}");
        }
        let params = XYParams::new(4, rat("1/2"), rat("-1/10")).unwrap();
        assert_eq!(euler_growth_xy(&params).unwrap().chi, BigInt::from(-2));
    }

    #[test]
    fn grid_points_are_exact() {
        let grid = VGrid::new(rat("-1/10"), rat("1/10"), 5).unwrap();
        let pts = grid.points();
        assert_eq!(
            pts,
            vec![rat("-1/10"), rat("-1/20"), rat("0"), rat("1/20"), rat("1/10")]
        );
        assert_eq!(grid.spacing(), rat("1/20"));
        assert!(VGrid::new(rat("1"), rat("0"), 5).is_err());
        assert!(VGrid::new(rat("0"), rat("1"), 1).is_err());
    }

    #[test]
    fn kink_scan_finds_the_transition() {
        let grid = VGrid::new(rat("-1/10"), rat("1/10"), 21).unwrap();
        let report = kink_scan(&rat("1"), &grid, &[64]).unwrap();
        // dv = 1/100; the analytic jump is 1/h^2 = 1
        assert_eq!(report.analytic.v, 0.0);
        assert!((report.analytic.second_diff_jump - 1.0).abs() < 0.1);
        assert!(report.analytic.slope_mismatch < 1e-3);
        assert_eq!(report.empirical.len(), 1);

        let outside = VGrid::new(rat("-1"), rat("1/10"), 21).unwrap();
        assert!(kink_scan(&rat("1"), &outside, &[]).is_err());
        let tiny = VGrid::new(rat("-1/10"), rat("1/10"), 4).unwrap();
        assert!(kink_scan(&rat("1"), &tiny, &[]).is_err());
    }

    #[test]
    fn rate_curve_rows_are_complete() {
        let grid = VGrid::new(rat("-1"), rat("2"), 7).unwrap();
        let rows = rate_curve(&rat("2"), &grid, &[16, 64]).unwrap();
        assert_eq!(rows.len(), 7);
        for row in &rows {
            assert_eq!(row.cells.len(), 2);
            assert!(row.tau_analytic > 0.0);
            for cell in &row.cells {
                assert!(cell.tau > 0.0);
                assert!(cell.sigma_sign.abs() <= 1);
            }
        }
        // tau_empirical approaches tau_analytic from below as N grows
        let last = &rows[0];
        assert!(last.cells[1].tau > last.cells[0].tau * 0.8);
    }
}
