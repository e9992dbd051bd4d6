//! Greedy sign selection: `s_{N+1} = +1` exactly when `sigma_N <= tau`.
//!
//! Partial sums are carried in `BigFloat` at a fixed working precision with
//! a running bound on the accumulated rounding error; a run whose error is
//! not small against its smallest residual is rejected with a precision
//! suggestion (or retried, via [`greedy_run_auto`]). An exact rational mode
//! exists for cross-checking.

use std::fmt;
use std::str::FromStr;

use astro_float::BigFloat;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, RM};
use crate::error::{Error, Result};
use crate::exact_core::{signed_sum, ExactRational, SignVector};

pub const DEFAULT_GREEDY_PRECISION: usize = 256;
pub const MIN_PRECISION: usize = 64;
/// Largest `n_max` accepted by the exact rational mode.
pub const EXACT_MODE_MAX_N: u64 = 5000;
/// Residuals at every `N` up to here are kept by [`GreedyRun::checkpoints`].
pub const DENSE_CHECKPOINTS: u64 = 1000;
const MAX_AUTO_PRECISION: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConstant {
    Pi,
    E,
    Sqrt2,
    Log2,
    EulerGamma,
}

impl NamedConstant {
    pub const ALL: [NamedConstant; 5] = [
        NamedConstant::Pi,
        NamedConstant::E,
        NamedConstant::Sqrt2,
        NamedConstant::Log2,
        NamedConstant::EulerGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedConstant::Pi => "pi",
            NamedConstant::E => "e",
            NamedConstant::Sqrt2 => "sqrt2",
            NamedConstant::Log2 => "log2",
            NamedConstant::EulerGamma => "euler_gamma",
        }
    }

    pub fn value(self, precision: usize) -> BigFloat {
        match self {
            NamedConstant::Pi => bigfloat::pi(precision),
            NamedConstant::E => bigfloat::e(precision),
            NamedConstant::Sqrt2 => bigfloat::sqrt_2(precision),
            NamedConstant::Log2 => bigfloat::ln_2(precision),
            NamedConstant::EulerGamma => bigfloat::euler_gamma(precision),
        }
    }
}

/// Target of a greedy run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GreedyTarget {
    Rational(ExactRational),
    Constant(NamedConstant),
}

impl GreedyTarget {
    pub fn to_bigfloat(&self, precision: usize) -> BigFloat {
        match self {
            GreedyTarget::Rational(r) => bigfloat::from_rational(r, precision),
            GreedyTarget::Constant(c) => c.value(precision),
        }
    }

    pub fn to_f64(&self) -> f64 {
        bigfloat::to_f64(&self.to_bigfloat(128))
    }

    pub fn as_rational(&self) -> Option<&ExactRational> {
        match self {
            GreedyTarget::Rational(r) => Some(r),
            GreedyTarget::Constant(_) => None,
        }
    }
}

impl fmt::Display for GreedyTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreedyTarget::Rational(r) => write!(f, "{r}"),
            GreedyTarget::Constant(c) => f.write_str(c.name()),
        }
    }
}

impl FromStr for GreedyTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let named = match t.to_ascii_lowercase().as_str() {
            "pi" => Some(NamedConstant::Pi),
            "e" => Some(NamedConstant::E),
            "sqrt2" | "sqrt(2)" => Some(NamedConstant::Sqrt2),
            "log2" | "ln2" | "log(2)" => Some(NamedConstant::Log2),
            "gamma" | "euler_gamma" | "euler" => Some(NamedConstant::EulerGamma),
            _ => None,
        };
        match named {
            Some(c) => Ok(GreedyTarget::Constant(c)),
            None => t.parse::<ExactRational>().map(GreedyTarget::Rational).map_err(|_| {
                Error::Parse(format!(
                    "target '{s}' is neither a rational nor one of pi, e, sqrt2, log2, euler_gamma"
                ))
            }),
        }
    }
}

impl From<ExactRational> for GreedyTarget {
    fn from(r: ExactRational) -> Self {
        GreedyTarget::Rational(r)
    }
}

impl From<NamedConstant> for GreedyTarget {
    fn from(c: NamedConstant) -> Self {
        GreedyTarget::Constant(c)
    }
}

/// A complete greedy run. Per-`N` vectors are indexed by `N - 1`.
#[derive(Clone, Debug)]
pub struct GreedyRun {
    pub tau: GreedyTarget,
    pub n_max: u64,
    /// Working precision in bits; `None` for an exact run.
    pub precision_bits: Option<usize>,
    pub signs: SignVector,
    /// `sigma_N - tau`, rounded to `f64` after the comparison work is done.
    pub deviations: Vec<f64>,
    /// `|sigma_N - tau| <= 1/N`, decided at working precision.
    pub within_envelope: Vec<bool>,
    /// `|sigma_N - tau| >= 1/(2(N+1))`, decided at working precision.
    pub above_half_gap: Vec<bool>,
    /// `(N, log|sigma_N - tau| / (log N)^2)` at each new smallest residual,
    /// from `N = 2`.
    pub record_lows: Vec<(u64, f64)>,
    /// Bound on the accumulated rounding error of any `sigma_N - tau`.
    pub error_bound: f64,
}

/// One output row.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    pub residual: f64,
    /// `log residual / (log N)^2`; `NaN` at `N = 1` and for zero residuals.
    pub ratio: f64,
}

impl GreedyRun {
    pub fn residual(&self, n: u64) -> f64 {
        self.deviations[(n - 1) as usize].abs()
    }

    pub fn ratio(&self, n: u64) -> f64 {
        decay_ratio(n, self.residual(n))
    }

    pub fn sigma_is_below_or_at_target(&self, n: u64) -> bool {
        self.deviations[(n - 1) as usize] <= 0.0
    }

    /// Every `N <= 1000`, record lows, powers of two and `n_max`.
    pub fn checkpoints(&self) -> Vec<Checkpoint> {
        let lows: std::collections::BTreeSet<u64> =
            self.record_lows.iter().map(|&(n, _)| n).collect();
        (1..=self.n_max)
            .filter(|&n| {
                n <= DENSE_CHECKPOINTS || n.is_power_of_two() || n == self.n_max || lows.contains(&n)
            })
            .map(|n| Checkpoint {
                n,
                residual: self.residual(n),
                ratio: self.ratio(n),
            })
            .collect()
    }

    /// `N >= from` where the residual exceeds `1/N`.
    pub fn envelope_violations(&self, from: u64) -> Vec<u64> {
        (from.max(1)..=self.n_max)
            .filter(|&n| !self.within_envelope[(n - 1) as usize])
            .collect()
    }

    /// For each block `[2^j, 2^{j+1})` with `j <= j_max` and `2^{j+1} - 1 <=
    /// n_max`, whether some `N` in it has residual `>= 1/(2(N+1))`.
    pub fn dyadic_blocks(&self, j_max: u32) -> Vec<(u32, bool)> {
        (0..=j_max)
            .take_while(|&j| (1u64 << (j + 1)) - 1 <= self.n_max)
            .map(|j| {
                let lo = 1u64 << j;
                let hi = (1u64 << (j + 1)) - 1;
                (j, (lo..=hi).any(|n| self.above_half_gap[(n - 1) as usize]))
            })
            .collect()
    }

    /// Re-derives each sign from the stored deviations.
    pub fn sign_rule_holds(&self) -> bool {
        let s = self.signs.entries();
        if s[0] != if self.tau_is_nonnegative() { 1 } else { -1 } {
            return false;
        }
        (1..self.n_max as usize).all(|i| {
            let expected = if self.deviations[i - 1] <= 0.0 { 1 } else { -1 };
            s[i] == expected
        })
    }

    fn tau_is_nonnegative(&self) -> bool {
        match &self.tau {
            GreedyTarget::Rational(r) => !r.numer().is_negative(),
            GreedyTarget::Constant(_) => true,
        }
    }
}

fn decay_ratio(n: u64, residual: f64) -> f64 {
    if n < 2 || residual <= 0.0 {
        return f64::NAN;
    }
    let ln = (n as f64).ln();
    residual.ln() / (ln * ln)
}

/// Working precision expected to suffice up to `n_max`: twice the bits of
/// the typical smallest residual `exp(-(log n)^2 / log 4)`, plus slack for
/// `n` accumulated roundings.
pub fn suggested_precision(n_max: u64) -> usize {
    let n = n_max.max(2) as f64;
    let ln = n.ln();
    let residual_bits = ln * ln / (4f64.ln() * std::f64::consts::LN_2);
    let bits = 2.0 * (residual_bits + n.log2() + 8.0);
    (bits.ceil() as usize).max(MIN_PRECISION).next_multiple_of(64)
}

/// Greedy run at fixed working precision.
pub fn greedy_run(tau: &GreedyTarget, n_max: u64, precision_bits: usize) -> Result<GreedyRun> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be >= 1"));
    }
    if precision_bits < MIN_PRECISION {
        return Err(Error::domain(format!("precision must be >= {MIN_PRECISION} bits")));
    }
    let needed = suggested_precision(n_max);
    if needed > precision_bits {
        return Err(Error::Precision {
            have: precision_bits,
            suggested: needed,
            reason: format!("estimated smallest residual up to N = {n_max}"),
        });
    }
    let p = precision_bits;
    let u = 2f64.powi(-(p as i32));
    let target = tau.to_bigfloat(p);
    let tau_err = if target.inexact() { 2.0 * u * tau.to_f64().abs() } else { 0.0 };
    let one = BigFloat::from_u64(1, p);

    let len = n_max as usize;
    let mut signs = Vec::with_capacity(len);
    let mut deviations = Vec::with_capacity(len);
    let mut within_envelope = Vec::with_capacity(len);
    let mut above_half_gap = Vec::with_capacity(len);
    let mut record_lows = Vec::new();
    let mut sigma = BigFloat::from_u64(0, p);
    let mut sum_err = 0.0f64;
    let mut best = f64::INFINITY;
    let mut worst_margin: Option<(f64, u64)> = None;

    // Set after an exact resolution: the next comparison is already known.
    let mut forced: Option<bool> = None;
    for n in 1..=n_max {
        let below = forced
            .take()
            .unwrap_or_else(|| sigma.cmp(&target).is_none_or(|c| c <= 0));
        let term = one.div(&BigFloat::from_u64(n, p), p, RM);
        if term.inexact() {
            sum_err += u / n as f64;
        }
        sigma = if below {
            sigma.add(&term, p, RM)
        } else {
            sigma.sub(&term, p, RM)
        };
        signs.push(if below { 1i8 } else { -1 });
        if sigma.inexact() {
            sum_err += u * (bigfloat::to_f64(&sigma).abs() + 1.0);
        }
        let dev = sigma.sub(&target, p, RM);
        let r = dev.abs();
        let rf = bigfloat::to_f64(&r);
        let err = if dev.inexact() { sum_err + tau_err + u * rf } else { 0.0 };
        let ambiguous = err > 0.0 && err >= rf * 2f64.powi(-(p as i32) / 2);
        let (dev_f, in_envelope, above_half) = match (ambiguous, tau.as_rational()) {
            (true, Some(t)) => {
                // Rational targets can tie exactly; settle the step in exact
                // arithmetic and resynchronise the float state.
                let exact = signed_sum(&SignVector::new(signs.clone())?);
                let d = &exact - t;
                forced = Some(!d.numer().is_positive());
                sigma = exact.to_bigfloat(p);
                sum_err = u * (exact.to_f64().abs() + 1.0);
                let ra = d.abs();
                (
                    d.to_f64(),
                    &ra * &ExactRational::from_integer(n) <= ExactRational::one(),
                    &ra * &ExactRational::from_integer(2 * (n + 1)) >= ExactRational::one(),
                )
            }
            _ => {
                if ambiguous && worst_margin.is_none_or(|(m, _)| rf < m) {
                    worst_margin = Some((rf, n));
                }
                let r_times_n = r.mul(&BigFloat::from_u64(n, p), p, RM);
                let scaled = r.mul(&BigFloat::from_u64(2 * (n + 1), p), p, RM);
                (
                    bigfloat::to_f64(&dev),
                    r_times_n.cmp(&one).is_some_and(|c| c <= 0),
                    scaled.cmp(&one).is_some_and(|c| c >= 0),
                )
            }
        };
        within_envelope.push(in_envelope);
        above_half_gap.push(above_half);
        deviations.push(dev_f);
        if n >= 2 && dev_f.abs() < best {
            best = dev_f.abs();
            record_lows.push((n, decay_ratio(n, best)));
        }
    }
    if let Some((r, n)) = worst_margin {
        let bits_needed = if r > 0.0 {
            (2.0 * ((sum_err + tau_err).log2() + p as f64 - r.log2())).ceil() as usize
        } else {
            2 * p
        };
        return Err(Error::Precision {
            have: p,
            suggested: bits_needed.max(p + 64).next_multiple_of(64),
            reason: format!("rounding error not below 2^(-P/2) times the residual {r:e} at N = {n}"),
        });
    }
    Ok(GreedyRun {
        tau: tau.clone(),
        n_max,
        precision_bits: Some(p),
        signs: SignVector::new(signs)?,
        deviations,
        within_envelope,
        above_half_gap,
        record_lows,
        error_bound: sum_err + tau_err,
    })
}

/// [`greedy_run`] starting at `initial_precision` and raising the precision
/// until the error accounting passes.
pub fn greedy_run_auto(tau: &GreedyTarget, n_max: u64, initial_precision: usize) -> Result<GreedyRun> {
    let mut p = initial_precision.max(suggested_precision(n_max));
    loop {
        match greedy_run(tau, n_max, p) {
            Err(Error::Precision { suggested, .. }) if suggested <= MAX_AUTO_PRECISION => {
                p = suggested.max(p + 64);
            }
            other => return other,
        }
    }
}

/// Greedy run in exact rational arithmetic; the cross-check oracle.
pub fn greedy_run_exact(tau: &ExactRational, n_max: u64) -> Result<GreedyRun> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be >= 1"));
    }
    if n_max > EXACT_MODE_MAX_N {
        return Err(Error::Resource {
            what: "exact greedy run".into(),
            requested: n_max as u128,
            cap: EXACT_MODE_MAX_N as u128,
        });
    }
    let t = tau.as_big_rational();
    let mut sigma = BigRational::zero();
    let len = n_max as usize;
    let mut signs = Vec::with_capacity(len);
    let mut deviations = Vec::with_capacity(len);
    let mut within_envelope = Vec::with_capacity(len);
    let mut above_half_gap = Vec::with_capacity(len);
    let mut record_lows = Vec::new();
    let mut best = f64::INFINITY;
    for n in 1..=n_max {
        let below = &sigma <= t;
        let term = BigRational::new(1.into(), n.into());
        if below {
            sigma += term;
        } else {
            sigma -= term;
        }
        signs.push(if below { 1i8 } else { -1 });
        let dev = ExactRational::from(&sigma - t);
        let r = dev.abs();
        within_envelope.push(&r * &ExactRational::from_integer(n) <= ExactRational::one());
        above_half_gap.push(&r * &ExactRational::from_integer(2 * (n + 1)) >= ExactRational::one());
        let dev_f = dev.to_f64();
        deviations.push(dev_f);
        if n >= 2 && dev_f.abs() < best {
            best = dev_f.abs();
            record_lows.push((n, decay_ratio(n, best)));
        }
    }
    Ok(GreedyRun {
        tau: GreedyTarget::Rational(tau.clone()),
        n_max,
        precision_bits: None,
        signs: SignVector::new(signs)?,
        deviations,
        within_envelope,
        above_half_gap,
        record_lows,
        error_bound: 0.0,
    })
}

/// `min_{10 <= N <= n_max} log|sigma_N - tau| / (log N)^2`.
pub fn greedy_decay_exponent(run: &GreedyRun) -> Result<f64> {
    if run.n_max < 100 {
        return Err(Error::precondition("the decay proxy needs n_max >= 100"));
    }
    Ok((10..=run.n_max)
        .map(|n| run.ratio(n))
        .filter(|r| !r.is_nan())
        .fold(f64::INFINITY, f64::min))
}

/// Twenty targets of mixed type in `[-2, 2]` used for panel checks.
pub fn standard_panel() -> Vec<GreedyTarget> {
    let mut v: Vec<GreedyTarget> = NamedConstant::ALL
        .iter()
        .filter(|&&c| c != NamedConstant::Pi && c != NamedConstant::E)
        .map(|&c| c.into())
        .collect();
    for (p, q) in [
        (0, 1),
        (1, 3),
        (-1, 3),
        (1, 2),
        (-1, 1),
        (3, 2),
        (-5, 7),
        (2, 1),
        (-3, 4),
        (11, 10),
        (7, 5),
        (-13, 8),
        (1, 1000),
        (5, 9),
        (-17, 10),
        (99, 70),
        (1, 7),
    ] {
        v.push(ExactRational::from_ratio(p, q).into());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> GreedyTarget {
        ExactRational::zero().into()
    }

    #[test]
    fn exact_ties_with_inexact_terms() {
        // 1 + 1/2 - 1/3 = 7/6 exactly, but 1/3 is rounded in binary.
        let tau = ExactRational::from_ratio(7, 6);
        let run = greedy_run(&tau.clone().into(), 50, 256).unwrap();
        assert_eq!(run.deviations[2], 0.0);
        assert_eq!(run.signs.entries()[3], 1);
        assert_eq!(run.signs, greedy_run_exact(&tau, 50).unwrap().signs);
    }

    #[test]
    fn small_runs_by_hand() {
        let run = greedy_run(&zero(), 4, 256).unwrap();
        assert_eq!(run.signs.entries(), &[1, -1, -1, -1]);
        assert!((run.deviations[3] + 1.0 / 12.0).abs() < 1e-16);
        let run = greedy_run(&zero(), 1, 256).unwrap();
        assert_eq!(run.signs.entries(), &[1]);
        assert_eq!(run.residual(1), 1.0);
    }

    #[test]
    fn exact_ties_take_plus() {
        let half: GreedyTarget = ExactRational::from_ratio(1, 2).into();
        let run = greedy_run(&half, 3, 128).unwrap();
        // sigma_2 = 1/2 = tau exactly, so s_3 = +1
        assert_eq!(run.signs.entries(), &[1, -1, 1]);
        assert_eq!(run.deviations[1], 0.0);
    }

    #[test]
    fn log2_starts_alternating() {
        let run = greedy_run(&NamedConstant::Log2.into(), 12, 256).unwrap();
        assert_eq!(&run.signs.entries()[..4], &[1, -1, 1, -1]);
    }

    #[test]
    fn target_parsing() {
        assert_eq!("pi".parse::<GreedyTarget>().unwrap(), NamedConstant::Pi.into());
        assert_eq!(
            "7/3".parse::<GreedyTarget>().unwrap(),
            ExactRational::from_ratio(7, 3).into()
        );
        assert_eq!(
            "0.25".parse::<GreedyTarget>().unwrap(),
            ExactRational::from_ratio(1, 4).into()
        );
        assert!("banana".parse::<GreedyTarget>().is_err());
    }

    #[test]
    fn named_constant_values() {
        let approx = [
            (NamedConstant::Pi, std::f64::consts::PI),
            (NamedConstant::E, std::f64::consts::E),
            (NamedConstant::Sqrt2, std::f64::consts::SQRT_2),
            (NamedConstant::Log2, std::f64::consts::LN_2),
            (NamedConstant::EulerGamma, 0.5772156649015329),
        ];
        for (c, v) in approx {
            assert!((GreedyTarget::from(c).to_f64() - v).abs() < 1e-15, "{}", c.name());
        }
    }

    #[test]
    fn precision_precheck() {
        let err = greedy_run(&zero(), 100_000, 128).unwrap_err();
        match err {
            Error::Precision { have, suggested, .. } => {
                assert_eq!(have, 128);
                assert!(suggested > 256);
            }
            e => panic!("{e}"),
        }
        assert!(greedy_run(&zero(), 10, 32).is_err());
        assert!(greedy_run(&zero(), 0, 128).is_err());
    }

    #[test]
    fn auto_precision_runs() {
        let run = greedy_run_auto(&NamedConstant::Sqrt2.into(), 3000, 64).unwrap();
        assert!(run.precision_bits.unwrap() >= suggested_precision(3000));
        assert!(run.sign_rule_holds());
    }

    #[test]
    fn exact_mode_agrees_with_float() {
        let tau = ExactRational::from_ratio(-5, 7);
        let exact = greedy_run_exact(&tau, 600).unwrap();
        let float = greedy_run(&tau.into(), 600, 256).unwrap();
        assert_eq!(exact.signs, float.signs);
        assert_eq!(exact.within_envelope, float.within_envelope);
        for (a, b) in exact.deviations.iter().zip(&float.deviations) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
        }
        assert!(greedy_run_exact(&ExactRational::zero(), EXACT_MODE_MAX_N + 1).is_err());
    }

    #[test]
    fn decay_exponent_is_a_minimum() {
        let run = greedy_run(&zero(), 1000, 256).unwrap();
        let proxy = greedy_decay_exponent(&run).unwrap();
        assert!(proxy < 0.0);
        assert!(proxy <= run.ratio(1000));
        let short = greedy_run(&zero(), 50, 128).unwrap();
        assert!(matches!(greedy_decay_exponent(&short), Err(Error::Precondition(_))));
    }

    #[test]
    fn checkpoints_thin_after_dense_range() {
        let run = greedy_run(&NamedConstant::Log2.into(), 3000, 256).unwrap();
        let cps = run.checkpoints();
        assert!(cps.iter().take(1000).enumerate().all(|(i, c)| c.n == i as u64 + 1));
        assert!(cps.iter().any(|c| c.n == 2048));
        assert_eq!(cps.last().unwrap().n, 3000);
        assert!(cps.len() <= 1000 + run.record_lows.len() + 2 + 1);
        for &(n, _) in &run.record_lows {
            assert!(cps.iter().any(|c| c.n == n));
        }
    }

    #[test]
    fn panel_has_twenty_targets() {
        let p = standard_panel();
        assert_eq!(p.len(), 20);
        assert!(p.iter().all(|t| t.to_f64().abs() <= 2.0));
    }
}
