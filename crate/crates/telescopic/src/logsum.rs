//! Log-space partial binomial sums.
//!
//! ln sum_{k<=m} C(n,k) evaluated without big integers: backward ratio
//! recursion from the cutoff term (terms decay geometrically away from
//! the mode, so ~sqrt(n) terms suffice), Kahan-compensated, with the
//! complement trick 2^n - sum for cutoffs past the midpoint.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// ln sum_{k=0..=m} C(n,k); m < 0 gives -inf, m >= n gives n ln 2.
pub fn ln_partial_binomial_sum(n: u64, m: i64) -> f64 {
    if m < 0 {
        return f64::NEG_INFINITY;
    }
    let m = m as u64;
    if m >= n {
        return n as f64 * std::f64::consts::LN_2;
    }
    if 2 * m < n {
        ln_partial_low(n, m)
    } else {
        // sum = 2^n - sum_{k <= n-m-1} C(n,k)
        let ln_low = ln_partial_low(n, n - m - 1);
        let ln_total = n as f64 * std::f64::consts::LN_2;
        ln_total + (-(ln_low - ln_total).exp()).ln_1p()
    }
}

/// Backward accumulation for m below the midpoint: successive term
/// ratios C(n,k-1)/C(n,k) = k/(n-k+1) < 1 shrink the tail until it
/// falls out of f64 relevance.
fn ln_partial_low(n: u64, m: u64) -> f64 {
    let ln_top = ln_choose(n, m);
    let mut rest = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    let mut term = 1.0f64;
    let mut k = m;
    while k > 0 {
        term *= k as f64 / (n - k + 1) as f64;
        if term < 1e-18 {
            break;
        }
        let y = term - comp;
        let t = rest + y;
        comp = (t - rest) - y;
        rest = t;
        k -= 1;
    }
    ln_top + rest.ln_1p()
}

pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Natural log of a big natural number; zero maps to -inf.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
