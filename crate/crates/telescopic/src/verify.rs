//! Self-check suites covering the contract of the crate end to end:
//! engine agreement, index identities, the disconnection rule, the
//! numerical grid oracle, the mean-field closed form, rate values and
//! convergence, kink detection, strong-field collapse, the binomial
//! sandwich, and small-leg stability.
//!
//! Output is deterministic for a fixed seed: summaries and failure
//! lines never embed wall-clock readings. Time budgets are still
//! enforced; exceeding one adds a fixed failure line.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::betti::{
    betti_profile, is_disconnected, profile_with_engine, small_leg_stability, Engine,
};
use crate::counts::{
    binomial, count_alpha, count_ckdk_dp, count_ckdk_enum, count_ckdk_xy_closed, xy_cutoffs,
};
use crate::error::{Error, Result};
use crate::linkage::{min_abs_signed_sum, LengthVector, SubsetClass};
use crate::oracle::{grid_b0, GridConfig};
use crate::scalar::{QuadraticScalar, Rational};
use crate::xy::{
    kink_scan, tau_analytic, tau_empirical, total_betti_xy, v_interval, BettiMode, VGrid, XYParams,
};

pub const CRITERIA: [&str; 11] = [
    "engine-equivalence",
    "index-identities",
    "disconnection-rule",
    "grid-oracle",
    "xy-closed-form",
    "tau-values",
    "tau-convergence",
    "kink-detection",
    "strong-field-collapse",
    "betti-sandwich",
    "small-leg-stability",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Seed for every sampler; identical seeds give identical reports.
    pub seed: u64,
    /// Shrinks trial counts and skips latency checks.
    pub quick: bool,
    /// Overrides the per-suite trial count where one applies.
    pub trials_override: Option<usize>,
    /// Runs only the named criteria when present.
    pub suites: Option<Vec<String>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            quick: false,
            trials_override: None,
            suites: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub passed: bool,
    pub summary: String,
    pub failures: Vec<String>,
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<Vec<CriterionOutcome>> {
    type Suite = fn(&VerifyConfig) -> CriterionOutcome;
    let table: [(&str, Suite); 11] = [
        ("engine-equivalence", suite_engine_equivalence),
        ("index-identities", suite_index_identities),
        ("disconnection-rule", suite_disconnection_rule),
        ("grid-oracle", suite_grid_oracle),
        ("xy-closed-form", suite_xy_closed_form),
        ("tau-values", suite_tau_values),
        ("tau-convergence", suite_tau_convergence),
        ("kink-detection", suite_kink_detection),
        ("strong-field-collapse", suite_strong_field_collapse),
        ("betti-sandwich", suite_betti_sandwich),
        ("small-leg-stability", suite_small_leg_stability),
    ];
    if let Some(named) = &cfg.suites {
        for name in named {
            if !table.iter().any(|(id, _)| id == name) {
                return Err(Error::Parse {
                    input: name.clone(),
                    expected: "a criterion id: engine-equivalence, index-identities, \
                               disconnection-rule, grid-oracle, xy-closed-form, tau-values, \
                               tau-convergence, kink-detection, strong-field-collapse, \
                               betti-sandwich, or small-leg-stability",
                });
            }
        }
    }
    let selected = |id: &str| {
        cfg.suites
            .as_ref()
            .is_none_or(|names| names.iter().any(|n| n == id))
    };
    Ok(table
        .iter()
        .filter(|(id, _)| selected(id))
        .map(|(_, suite)| suite(cfg))
        .collect())
}

/// One line per criterion, then indented failure details.
pub fn render_text(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("criterion {}: {}  {}\n", o.id, status, o.summary));
        for f in &o.failures {
            out.push_str(&format!("    - {f}\n"));
        }
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    out.push_str(&format!(
        "{} of {} criteria passed\n",
        outcomes.len() - failed,
        outcomes.len()
    ));
    out
}

fn outcome(id: &'static str, summary: String, failures: Vec<String>) -> CriterionOutcome {
    CriterionOutcome {
        id,
        passed: failures.is_empty(),
        summary,
        failures,
    }
}

fn suite_rng(cfg: &VerifyConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn trials(cfg: &VerifyConfig, full: usize) -> usize {
    if let Some(t) = cfg.trials_override {
        return t.max(1);
    }
    if cfg.quick {
        (full / 10).max(5)
    } else {
        full
    }
}

fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Legs sharing one random denominator, numerators in 1..=num_max.
fn sample_vector(rng: &mut ChaCha8Rng, n: usize, den_range: (i64, i64), num_range: (i64, i64)) -> LengthVector {
    let den = rng.gen_range(den_range.0..=den_range.1);
    let legs: Vec<QuadraticScalar> = (0..n)
        .map(|_| QuadraticScalar::from_rational(rat(rng.gen_range(num_range.0..=num_range.1), den)))
        .collect();
    LengthVector::new(legs).expect("positive rational legs are always valid")
}

fn push_err(failures: &mut Vec<String>, context: impl std::fmt::Display, err: impl std::fmt::Display) {
    failures.push(format!("{context}: {err}"));
}

fn suite_engine_equivalence(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut rng = suite_rng(cfg, 1);
    let trials = trials(cfg, 200);
    let mut failures = Vec::new();
    let started = Instant::now();
    for _ in 0..trials {
        let n = rng.gen_range(3..=16);
        let lv = sample_vector(&mut rng, n, (1, 6), (1, 30));
        let by_enum = match count_ckdk_enum(&lv) {
            Ok(c) => c,
            Err(e) => {
                push_err(&mut failures, &lv, e);
                continue;
            }
        };
        let by_dp = match count_ckdk_dp(&lv) {
            Ok(c) => c,
            Err(e) => {
                push_err(&mut failures, &lv, e);
                continue;
            }
        };
        if by_enum.c != by_dp.c
            || by_enum.d != by_dp.d
            || by_enum.generic != by_dp.generic
            || by_enum.max_fixed_index != by_dp.max_fixed_index
        {
            failures.push(format!(
                "{lv}: engines disagree (enumeration c={:?} d={:?} generic={}, subset-sum c={:?} d={:?} generic={})",
                by_enum.c, by_enum.d, by_enum.generic, by_dp.c, by_dp.d, by_dp.generic
            ));
            continue;
        }
        if betti_profile(&by_enum) != betti_profile(&by_dp) {
            failures.push(format!("{lv}: engines agree on counts but not on profiles"));
        }
    }
    if !cfg.quick && started.elapsed() > Duration::from_secs(10) {
        failures.push("engine comparison exceeded the 10 second budget".into());
    }
    outcome(
        "engine-equivalence",
        format!("enumeration and subset-sum engines agree on {trials} random vectors"),
        failures,
    )
}

fn suite_index_identities(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut rng = suite_rng(cfg, 2);
    let trials = trials(cfg, 200);
    let mut failures = Vec::new();
    'trial: for _ in 0..trials {
        let n = rng.gen_range(4..=12);
        // generic vector whose telescopic leg is strictly shorter than the
        // largest fixed leg, fixed legs sorted ascending
        let mut attempts = 0;
        let (lv, merged_sum, merged_diff) = loop {
            attempts += 1;
            if attempts > 500 {
                failures.push(format!("sampler found no generic vector with n={n}"));
                continue 'trial;
            }
            let den = rng.gen_range(1..=5);
            let mut nums: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(1..=24)).collect();
            nums.sort_unstable();
            let max_num = nums[n - 2];
            if max_num < 2 {
                continue;
            }
            let tel = rng.gen_range(1..=max_num - 1);
            let mut legs: Vec<QuadraticScalar> = nums
                .iter()
                .map(|&x| QuadraticScalar::from_rational(rat(x, den)))
                .collect();
            legs.push(QuadraticScalar::from_rational(rat(tel, den)));
            let lv = LengthVector::new(legs).expect("positive rational legs");
            match lv.is_generic() {
                Ok(true) => {}
                Ok(false) => continue,
                Err(e) => {
                    push_err(&mut failures, &lv, e);
                    continue 'trial;
                }
            }
            let mut with_sum: Vec<QuadraticScalar> = nums[..n - 2]
                .iter()
                .map(|&x| QuadraticScalar::from_rational(rat(x, den)))
                .collect();
            let mut with_diff = with_sum.clone();
            with_sum.push(QuadraticScalar::from_rational(rat(max_num + tel, den)));
            with_diff.push(QuadraticScalar::from_rational(rat(max_num - tel, den)));
            break (
                lv,
                LengthVector::new(with_sum).expect("positive rational legs"),
                LengthVector::new(with_diff).expect("positive rational legs"),
            );
        };
        let counts = match count_ckdk_enum(&lv) {
            Ok(c) => c,
            Err(e) => {
                push_err(&mut failures, &lv, e);
                continue;
            }
        };
        let alpha_sum = match count_alpha(&merged_sum) {
            Ok(a) => a,
            Err(e) => {
                push_err(&mut failures, &merged_sum, e);
                continue;
            }
        };
        let alpha_diff = match count_alpha(&merged_diff) {
            Ok(a) => a,
            Err(e) => {
                push_err(&mut failures, &merged_diff, e);
                continue;
            }
        };
        if !counts.d[0].is_zero() {
            failures.push(format!("{lv}: d_0 = {} but must vanish", counts.d[0]));
        }
        for k in 1..=n - 2 {
            if counts.d[k] != alpha_sum[k - 1] {
                failures.push(format!(
                    "{lv}: d_{k} = {} but the merged-sum vector gives {}",
                    counts.d[k],
                    alpha_sum[k - 1]
                ));
            }
        }
        for (k, (have, want)) in counts.c.iter().zip(&alpha_diff).enumerate().take(n - 2) {
            if have != want {
                failures.push(format!(
                    "{lv}: c_{k} = {have} but the merged-difference vector gives {want}"
                ));
            }
        }
        if !counts.c[n - 2].is_zero() {
            failures.push(format!(
                "{lv}: c_{} = {} but must vanish",
                n - 2,
                counts.c[n - 2]
            ));
        }
    }
    outcome(
        "index-identities",
        format!("merged-leg count identities hold on {trials} random generic vectors"),
        failures,
    )
}

fn suite_disconnection_rule(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut rng = suite_rng(cfg, 3);
    let trials = trials(cfg, 200);
    let mut failures = Vec::new();
    let mut disconnected_seen = 0usize;
    'trial: for _ in 0..trials {
        let mut attempts = 0;
        let lv = loop {
            attempts += 1;
            if attempts > 2000 {
                failures.push("sampler found no generic nonempty vector".into());
                continue 'trial;
            }
            let n = rng.gen_range(4..=10);
            let lv = sample_vector(&mut rng, n, (1, 5), (1, 20));
            let nonempty = matches!(
                lv.classify_subset(&[lv.max_fixed_index()]),
                Ok(SubsetClass::Short)
            );
            if nonempty && matches!(lv.is_generic(), Ok(true)) {
                break lv;
            }
        };
        let profile = match profile_with_engine(&lv, Engine::Enumeration) {
            Ok(p) => p,
            Err(e) => {
                push_err(&mut failures, &lv, e);
                continue;
            }
        };
        let b0 = profile.b[0].to_usize().unwrap_or(usize::MAX);
        let rule = match is_disconnected(&lv) {
            Ok(r) => r,
            Err(e) => {
                push_err(&mut failures, &lv, e);
                continue;
            }
        };
        if rule != (b0 == 2) {
            failures.push(format!(
                "{lv}: two-longest-legs rule says disconnected={rule} but b_0 = {b0}"
            ));
            continue;
        }
        if rule {
            disconnected_seen += 1;
            let n = lv.n();
            for (k, b) in profile.b.iter().enumerate() {
                let expected = if k <= n - 4 {
                    binomial((n - 4) as u64, k as u64) * 2u32
                } else {
                    BigUint::zero()
                };
                if *b != expected {
                    failures.push(format!(
                        "{lv}: disconnected but b_{k} = {b}, expected {expected}"
                    ));
                }
            }
        } else if b0 != 1 {
            failures.push(format!("{lv}: connected nonempty space with b_0 = {b0}"));
        }
    }
    outcome(
        "disconnection-rule",
        format!(
            "two-longest-legs rule matches b_0 on {trials} nonempty vectors ({disconnected_seen} disconnected)"
        ),
        failures,
    )
}

fn suite_grid_oracle(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut rng = suite_rng(cfg, 4);
    let trials = trials(cfg, 50);
    let mut failures = Vec::new();
    let mut refined = 0usize;
    let started = Instant::now();
    let twenty = rat(20, 1);
    'trial: for _ in 0..trials {
        let mut attempts = 0;
        let (lv, margin) = loop {
            attempts += 1;
            if attempts > 10_000 {
                failures.push("sampler found no well-margined vector".into());
                continue 'trial;
            }
            let n = rng.gen_range(4..=6);
            let lv = sample_vector(&mut rng, n, (2, 4), (3, 6));
            let info = match min_abs_signed_sum(lv.legs()) {
                Ok(i) => i,
                Err(e) => {
                    push_err(&mut failures, &lv, e);
                    continue 'trial;
                }
            };
            if info.has_zero {
                continue;
            }
            // genericity margin of at least 5% of the half perimeter
            let wide = matches!(
                info.min_nonzero.scale(&twenty).compare(&lv.half_perimeter()),
                Ok(std::cmp::Ordering::Greater) | Ok(std::cmp::Ordering::Equal)
            );
            if wide {
                break (lv, info.min_nonzero.to_f64());
            }
        };
        let exact = match profile_with_engine(&lv, Engine::Enumeration) {
            Ok(p) => p.b[0].to_usize().unwrap_or(usize::MAX),
            Err(e) => {
                push_err(&mut failures, &lv, e);
                continue;
            }
        };
        let threshold = Some(margin * 0.99);
        let dims = lv.n() - 2;
        let base = match dims {
            2 => GridConfig {
                resolution: 64,
                rounds: 2,
                margin_threshold: threshold,
            },
            3 => GridConfig {
                resolution: 32,
                rounds: 2,
                margin_threshold: threshold,
            },
            _ => GridConfig {
                resolution: 24,
                rounds: 1,
                margin_threshold: threshold,
            },
        };
        let (result, used_retry) = match grid_b0(&lv, &base) {
            Ok(r) => (Ok(r), false),
            Err(Error::Inconclusive { .. }) if dims == 4 => {
                let retry = GridConfig {
                    resolution: 32,
                    rounds: 1,
                    margin_threshold: threshold,
                };
                (grid_b0(&lv, &retry), true)
            }
            Err(e) => (Err(e), false),
        };
        match result {
            Ok(r) => {
                if used_retry || r.counts.len() > 2 {
                    refined += 1;
                }
                if r.components != exact {
                    failures.push(format!(
                        "{lv}: grid converged to {} components but b_0 = {exact} (resolutions {:?}, counts {:?})",
                        r.components, r.resolutions, r.counts
                    ));
                }
            }
            Err(e) => push_err(&mut failures, &lv, e),
        }
    }
    if refined * 10 >= trials.max(1) && trials >= 10 {
        failures.push(format!(
            "{refined} of {trials} runs needed refinement beyond the first doubling (budget is under 10%)"
        ));
    }
    if !cfg.quick && started.elapsed() > Duration::from_secs(300) {
        failures.push("grid comparison exceeded the 5 minute budget".into());
    }
    outcome(
        "grid-oracle",
        format!("grid component counts match exact b_0 on {trials} vectors ({refined} needed refinement)"),
        failures,
    )
}

fn suite_xy_closed_form(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut failures = Vec::new();
    let n_list: &[usize] = if cfg.quick {
        &[2, 3, 5, 8, 12]
    } else {
        &[2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 17, 20]
    };
    let v_count = if cfg.quick { 7 } else { 13 };
    let mut checked = 0usize;
    for h in [rat(1, 2), rat(2, 1)] {
        let vs = match interior_points(&h, v_count) {
            Ok(vs) => vs,
            Err(e) => {
                push_err(&mut failures, "interval", e);
                continue;
            }
        };
        // rational-radius spot values probe the exact median logic
        let mut all_vs = vs;
        if h == rat(1, 2) {
            all_vs.push(rat(0, 1));
        } else {
            all_vs.push(rat(-7, 8));
        }
        for v in &all_vs {
            for &n_rot in n_list {
                if h <= rat(1, n_rot as i64) {
                    continue;
                }
                checked += 1;
                if let Err(msg) = closed_form_matches(n_rot, &h, v) {
                    failures.push(msg);
                }
            }
        }
    }
    outcome(
        "xy-closed-form",
        format!("closed form matches subset enumeration at {checked} parameter points"),
        failures,
    )
}

fn interior_points(h: &Rational, count: usize) -> Result<Vec<Rational>> {
    let (a, b) = v_interval(h)?;
    let span = &b - &a;
    Ok((1..=count)
        .map(|j| &a + &span * rat(j as i64, count as i64 + 1))
        .collect())
}

fn closed_form_matches(n_rot: usize, h: &Rational, v: &Rational) -> std::result::Result<(), String> {
    let label = || format!("N={n_rot} h={h} v={v}");
    let closed = count_ckdk_xy_closed(n_rot, h, v).map_err(|e| format!("{}: {e}", label()))?;
    let lv = XYParams::new(n_rot, h.clone(), v.clone())
        .and_then(|p| p.length_vector())
        .map_err(|e| format!("{}: {e}", label()))?;
    let listed = count_ckdk_enum(&lv).map_err(|e| format!("{}: {e}", label()))?;
    if closed.c != listed.c || closed.d != listed.d {
        return Err(format!(
            "{}: closed form c={:?} d={:?}, enumeration c={:?} d={:?}",
            label(),
            closed.c,
            closed.d,
            listed.c,
            listed.d
        ));
    }
    if closed.generic != listed.generic || closed.max_fixed_index != listed.max_fixed_index {
        return Err(format!(
            "{}: closed form generic={} i*={}, enumeration generic={} i*={}",
            label(),
            closed.generic,
            closed.max_fixed_index,
            listed.generic,
            listed.max_fixed_index
        ));
    }
    Ok(())
}

fn suite_tau_values(cfg: &VerifyConfig) -> CriterionOutcome {
    let _ = cfg;
    let mut failures = Vec::new();
    let ln2 = std::f64::consts::LN_2;
    for h in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        for v in [rat(0, 1), rat(1, 2)] {
            match tau_analytic(&h, &v) {
                Ok(t) if t == ln2 => {}
                Ok(t) => failures.push(format!(
                    "tau(h={h}, v={v}) = {t:.17} but must equal ln 2 exactly"
                )),
                Err(e) => push_err(&mut failures, format!("tau(h={h}, v={v})"), e),
            }
        }
        match crate::xy::p_of_v(&h, &rat(0, 1)) {
            Ok(p) => {
                if p.as_rational() != Some(&rat(1, 2)) {
                    failures.push(format!("p(h={h}, v=0) = {p} but must be 1/2 exactly"));
                }
            }
            Err(e) => push_err(&mut failures, format!("p(h={h}, v=0)"), e),
        }
    }
    let frozen = [
        (rat(2, 1), rat(-1, 1), 0.5100980575778081),
        (rat(1, 1), rat(-1, 4), 0.649618619387195),
        (rat(1, 2), rat(-1, 16), 0.6823852134556563),
    ];
    for (h, v, reference) in frozen {
        match tau_analytic(&h, &v) {
            Ok(t) if (t - reference).abs() < 1e-12 => {}
            Ok(t) => failures.push(format!(
                "tau(h={h}, v={v}) = {t:.16} but the reference value is {reference:.16}"
            )),
            Err(e) => push_err(&mut failures, format!("tau(h={h}, v={v})"), e),
        }
    }
    // continuity from the left at the transition
    match tau_analytic(&rat(2, 1), &rat(-1, 1_000_000_000)) {
        Ok(t) if (t - ln2).abs() < 1e-12 => {}
        Ok(t) => failures.push(format!(
            "tau just below the transition is {t:.17}, not within 1e-12 of ln 2"
        )),
        Err(e) => push_err(&mut failures, "tau near v=0", e),
    }
    // finite-size anchor against the frozen reference
    match XYParams::new(4096, rat(2, 1), rat(-1, 1))
        .and_then(|p| tau_empirical(&p, BettiMode::LogSpace))
    {
        Ok(t) if (t - 0.5100980575778081).abs() < 0.01 => {}
        Ok(t) => failures.push(format!(
            "empirical rate at N=4096 is {t:.6}, more than 0.01 from the limit"
        )),
        Err(e) => push_err(&mut failures, "empirical rate at N=4096", e),
    }
    outcome(
        "tau-values",
        "analytic rate matches frozen references and equals ln 2 at and above the transition"
            .into(),
        failures,
    )
}

fn suite_tau_convergence(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut failures = Vec::new();
    let h = rat(2, 1);
    let sizes = [64usize, 256, 1024, 4096];
    for v in [rat(-7, 5), rat(-21, 20), rat(-7, 10), rat(-7, 20)] {
        let limit = match tau_analytic(&h, &v) {
            Ok(t) => t,
            Err(e) => {
                push_err(&mut failures, format!("tau(h={h}, v={v})"), e);
                continue;
            }
        };
        let mut errs = Vec::new();
        for &n_rot in &sizes {
            match XYParams::new(n_rot, h.clone(), v.clone())
                .and_then(|p| tau_empirical(&p, BettiMode::LogSpace))
            {
                Ok(t) => errs.push((t - limit).abs()),
                Err(e) => push_err(&mut failures, format!("N={n_rot} v={v}"), e),
            }
        }
        if errs.len() == sizes.len() {
            for w in errs.windows(2) {
                if w[1] >= w[0] {
                    failures.push(format!(
                        "v={v}: finite-size errors {errs:?} are not strictly decreasing"
                    ));
                    break;
                }
            }
            if errs[errs.len() - 1] >= 0.01 {
                failures.push(format!(
                    "v={v}: error {} at N=4096 is not below 0.01",
                    errs[errs.len() - 1]
                ));
            }
        }
    }
    if !cfg.quick {
        match XYParams::new(1_000_000, rat(2, 1), rat(-1, 1)) {
            Ok(params) => {
                let mut best = Duration::MAX;
                let mut sink = 0.0f64;
                for _ in 0..3 {
                    let t0 = Instant::now();
                    match total_betti_xy(&params, BettiMode::LogSpace) {
                        Ok(b) => sink += b.ln,
                        Err(e) => {
                            push_err(&mut failures, "log-space total at N=1000000", e);
                            break;
                        }
                    }
                    best = best.min(t0.elapsed());
                }
                if !sink.is_finite() {
                    failures.push("log-space total at N=1000000 is not finite".into());
                }
                if best > Duration::from_millis(10) {
                    failures
                        .push("log-space total at N=1000000 exceeded the 10ms budget".into());
                }
            }
            Err(e) => push_err(&mut failures, "parameters at N=1000000", e),
        }
    }
    outcome(
        "tau-convergence",
        "finite-size rates approach the analytic limit monotonically at 4 energies".into(),
        failures,
    )
}

fn suite_kink_detection(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut failures = Vec::new();
    for h in [rat(1, 1), rat(2, 1)] {
        let hf = h.to_f64().unwrap();
        // the second derivative jumps by 1/h^2 at v = 0
        let expected = 1.0 / (hf * hf);
        let fine = VGrid::new(rat(-1, 20), rat(1, 20), 101)
            .and_then(|grid| kink_scan(&h, &grid, &[]));
        match fine {
            Ok(report) => {
                let a = report.analytic;
                if a.v.abs() > 1e-12 {
                    failures.push(format!(
                        "h={h}: analytic kink located at v={} instead of 0",
                        a.v
                    ));
                }
                if (a.second_diff_jump - expected).abs() > 0.10 * expected {
                    failures.push(format!(
                        "h={h}: second-difference jump {} is more than 10% from {expected}",
                        a.second_diff_jump
                    ));
                }
                if a.slope_mismatch >= 1e-4 {
                    failures.push(format!(
                        "h={h}: one-sided slopes differ by {} at the kink (bound 1e-4)",
                        a.slope_mismatch
                    ));
                }
            }
            Err(e) => push_err(&mut failures, format!("fine scan at h={h}"), e),
        }
        let n_emp = if cfg.quick { 100_000 } else { 1_000_000 };
        let coarse = VGrid::new(rat(-1, 5), rat(1, 5), 41)
            .and_then(|grid| kink_scan(&h, &grid, &[n_emp]));
        match coarse {
            Ok(report) => {
                let (_, e) = report.empirical[0];
                if e.v.abs() > 0.010_001 {
                    failures.push(format!(
                        "h={h}: empirical kink at N={n_emp} located at v={} (expected within one step of 0)",
                        e.v
                    ));
                }
                if (e.second_diff_jump - expected).abs() > 0.15 * expected {
                    failures.push(format!(
                        "h={h}: empirical second-difference jump {} is more than 15% from {expected}",
                        e.second_diff_jump
                    ));
                }
            }
            Err(e) => push_err(&mut failures, format!("coarse scan at h={h}"), e),
        }
    }
    outcome(
        "kink-detection",
        "rate curves show the second-derivative jump at v=0 for h in {1, 2}".into(),
        failures,
    )
}

fn suite_strong_field_collapse(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    let small_ns: &[usize] = if cfg.quick { &[3, 5, 8] } else { &[3, 4, 5, 6, 7, 8, 9, 10, 11, 12] };
    for h in [rat(3, 2), rat(2, 1), rat(4, 1)] {
        let vs = match interior_points(&h, 7) {
            Ok(vs) => vs,
            Err(e) => {
                push_err(&mut failures, format!("interval at h={h}"), e);
                continue;
            }
        };
        for v in &vs {
            for &n_rot in small_ns {
                checked += 1;
                if let Err(msg) = strong_field_point(n_rot, &h, v, true) {
                    failures.push(msg);
                }
            }
        }
    }
    let big_ns: &[usize] = if cfg.quick { &[50, 200] } else { &[20, 50, 100, 200, 500] };
    let h = rat(2, 1);
    match interior_points(&h, 9) {
        Ok(vs) => {
            for v in &vs {
                for &n_rot in big_ns {
                    checked += 1;
                    if let Err(msg) = strong_field_point(n_rot, &h, v, false) {
                        failures.push(msg);
                    }
                }
            }
        }
        Err(e) => push_err(&mut failures, "interval at h=2", e),
    }
    outcome(
        "strong-field-collapse",
        format!("upper counts vanish and b = c at {checked} strong-field points"),
        failures,
    )
}

fn strong_field_point(
    n_rot: usize,
    h: &Rational,
    v: &Rational,
    cross_check: bool,
) -> std::result::Result<(), String> {
    let label = || format!("N={n_rot} h={h} v={v}");
    let closed = count_ckdk_xy_closed(n_rot, h, v).map_err(|e| format!("{}: {e}", label()))?;
    if closed.d.iter().any(|d| !d.is_zero()) {
        return Err(format!(
            "{}: d = {:?} does not vanish for h > 1",
            label(),
            closed.d
        ));
    }
    let profile = betti_profile(&closed);
    if profile.b != closed.c {
        return Err(format!(
            "{}: profile {:?} differs from the c vector {:?}",
            label(),
            profile.b,
            closed.c
        ));
    }
    if cross_check {
        let lv = XYParams::new(n_rot, h.clone(), v.clone())
            .and_then(|p| p.length_vector())
            .map_err(|e| format!("{}: {e}", label()))?;
        let listed = count_ckdk_enum(&lv).map_err(|e| format!("{}: {e}", label()))?;
        if listed.c != closed.c || listed.d != closed.d {
            return Err(format!(
                "{}: closed form and enumeration disagree",
                label()
            ));
        }
    }
    Ok(())
}

fn suite_betti_sandwich(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut failures = Vec::new();
    let h = rat(2, 1);
    let sizes: &[usize] = if cfg.quick { &[100, 500] } else { &[100, 500, 1000] };
    let mut checked = 0usize;
    for &n_rot in sizes {
        for v in [rat(-7, 5), rat(-21, 20), rat(-7, 10), rat(-7, 20)] {
            checked += 1;
            let label = format!("N={n_rot} v={v}");
            let total = XYParams::new(n_rot, h.clone(), v.clone())
                .and_then(|p| total_betti_xy(&p, BettiMode::Exact));
            let total = match total {
                Ok(t) => t.exact.expect("exact mode carries the integer"),
                Err(e) => {
                    push_err(&mut failures, &label, e);
                    continue;
                }
            };
            let m = match xy_cutoffs(n_rot, &h, &v) {
                Ok(cut) => cut.kc,
                Err(e) => {
                    push_err(&mut failures, &label, e);
                    continue;
                }
            };
            if m < 1 {
                failures.push(format!("{label}: cutoff {m} leaves no sandwich to test"));
                continue;
            }
            let mid = binomial(n_rot as u64, m as u64);
            let upper = &mid * BigUint::from(n_rot as u64 + 2);
            if total <= mid || total >= upper {
                failures.push(format!(
                    "{label}: total {total} is not strictly between C(N,{m}) = {mid} and (N+2)C(N,{m}) = {upper}"
                ));
            }
        }
        for v in [rat(0, 1), rat(1, 1), rat(2, 1)] {
            checked += 1;
            let label = format!("N={n_rot} v={v}");
            let total = XYParams::new(n_rot, h.clone(), v.clone())
                .and_then(|p| total_betti_xy(&p, BettiMode::Exact));
            let total = match total {
                Ok(t) => t.exact.expect("exact mode carries the integer"),
                Err(e) => {
                    push_err(&mut failures, &label, e);
                    continue;
                }
            };
            let lo = BigUint::one() << (n_rot - 1);
            let hi = BigUint::one() << (n_rot + 1);
            if total < lo || total > hi {
                failures.push(format!(
                    "{label}: total {total} is outside [2^(N-1), 2^(N+1)]"
                ));
            }
        }
    }
    outcome(
        "betti-sandwich",
        format!("binomial sandwich brackets the total Betti number at {checked} points"),
        failures,
    )
}

fn suite_small_leg_stability(cfg: &VerifyConfig) -> CriterionOutcome {
    let mut rng = suite_rng(cfg, 11);
    let trials = trials(cfg, 50);
    let mut failures = Vec::new();
    'trial: for _ in 0..trials {
        let mut attempts = 0;
        let (fixed, margin) = loop {
            attempts += 1;
            if attempts > 2000 {
                failures.push("sampler found no margined fixed legs".into());
                continue 'trial;
            }
            let m = rng.gen_range(2..=6);
            let den = rng.gen_range(1..=5);
            let fixed: Vec<QuadraticScalar> = (0..m)
                .map(|_| QuadraticScalar::from_rational(rat(rng.gen_range(1..=20), den)))
                .collect();
            match min_abs_signed_sum(&fixed) {
                Ok(info) if !info.has_zero => break (fixed, info.min_nonzero),
                Ok(_) => continue,
                Err(e) => {
                    push_err(&mut failures, "margin scan", e);
                    continue 'trial;
                }
            }
        };
        let margin_rat = margin
            .as_rational()
            .expect("rational legs give a rational margin")
            .clone();
        let candidates: Vec<QuadraticScalar> = [rat(1, 2), rat(1, 3), rat(1, 7), rat(9, 10)]
            .into_iter()
            .map(|f| QuadraticScalar::from_rational(&margin_rat * f))
            .collect();
        let label = || {
            format!(
                "fixed ({})",
                fixed
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        match small_leg_stability(&fixed, &candidates) {
            Ok(true) => {}
            Ok(false) => failures.push(format!(
                "{}: profiles changed below the margin {margin_rat}",
                label()
            )),
            Err(e) => push_err(&mut failures, label(), e),
        }
    }
    outcome(
        "small-leg-stability",
        format!("profiles are unchanged below the margin for {trials} random leg sets"),
        failures,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg(suites: &[&str]) -> VerifyConfig {
        VerifyConfig {
            seed: 42,
            quick: true,
            trials_override: None,
            suites: Some(suites.iter().map(|s| s.to_string()).collect()),
        }
    }

    #[test]
    fn quick_pass_on_sampling_suites() {
        let cfg = quick_cfg(&[
            "engine-equivalence",
            "index-identities",
            "disconnection-rule",
            "small-leg-stability",
        ]);
        let outcomes = run_verify(&cfg).unwrap();
        assert_eq!(outcomes.len(), 4);
        for o in &outcomes {
            assert!(o.passed, "{}: {:?}", o.id, o.failures);
        }
    }

    #[test]
    fn quick_pass_on_rate_suites() {
        let cfg = quick_cfg(&["tau-values", "tau-convergence"]);
        let outcomes = run_verify(&cfg).unwrap();
        for o in &outcomes {
            assert!(o.passed, "{}: {:?}", o.id, o.failures);
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = quick_cfg(&["no-such-suite"]);
        assert!(run_verify(&cfg).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = quick_cfg(&["engine-equivalence", "disconnection-rule"]);
        let a = render_text(&run_verify(&cfg).unwrap());
        let b = render_text(&run_verify(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.contains("criterion engine-equivalence: PASS"));
        assert!(a.ends_with("2 of 2 criteria passed\n"));
    }

    #[test]
    fn suite_selection_runs_in_canonical_order() {
        let cfg = VerifyConfig {
            suites: Some(vec![
                "tau-values".to_string(),
                "engine-equivalence".to_string(),
            ]),
            quick: true,
            ..VerifyConfig::default()
        };
        let outcomes = run_verify(&cfg).unwrap();
        assert_eq!(outcomes[0].id, "engine-equivalence");
        assert_eq!(outcomes[1].id, "tau-values");
    }
}
