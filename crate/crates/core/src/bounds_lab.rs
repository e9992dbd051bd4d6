//! Finite checks of the counting arguments behind the upper and lower
//! bounds for `m_N`: the sets `S_k(N, delta, x)`, the cosine-product bound,
//! divisor-window sums, divisor power sums, two exact identities, and the
//! six-term collision count behind the exponent `0.665`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, BigFloat, RM};
use crate::density::rho_n;
use crate::error::{Error, Result};
use crate::exact_core::ExactRational;
use crate::minsearch::{distinct_sums, DEFAULT_MAX_HALF_SIZE};

/// Parameters shared by the `S_k` checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundProbe {
    pub n: u64,
    pub k: u32,
    pub delta: f64,
    pub x: f64,
    /// Growth parameter: `x >= e^{a k^2}`.
    pub a: f64,
    /// `delta = d 2^{-(k+1)}` in the `S_1` floor check.
    pub d: f64,
    /// Threshold factor in `n >= eta k (x/d)^{1/(k+1)}`.
    pub eta: f64,
}

impl BoundProbe {
    pub fn new(n: u64, k: u32, delta: f64, x: f64) -> Self {
        BoundProbe {
            n,
            k,
            delta,
            x,
            a: 4f64.ln(),
            d: delta * 2f64.powi(k as i32 + 1),
            eta: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 {
            return Err(Error::domain("N and k must be >= 1"));
        }
        if !(0.0..0.5).contains(&self.delta) {
            return Err(Error::domain(format!("delta = {} outside [0, 1/2)", self.delta)));
        }
        if !(self.x >= 0.0 && self.x.is_finite()) {
            return Err(Error::domain("x must be finite and >= 0"));
        }
        if ![self.a, self.d, self.eta].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("a, d and eta must be finite"));
        }
        Ok(())
    }
}

fn exact(x: f64) -> Result<BigRational> {
    Ok(ExactRational::from_f64(x)?.into_big_rational())
}

/// `||num/den|| >= delta`, exactly.
fn distance_at_least(num: &BigInt, den: &BigInt, delta: &BigRational) -> bool {
    let r = num.mod_floor(den);
    let dist = (&r).min(&(den - &r)).clone();
    dist * delta.denom() >= delta.numer() * den
}

/// `#{n <= N : ||x / n^k|| >= delta}`.
///
/// `x / n^k` is tried in `f64` with a rounding bound and recomputed exactly
/// when the fractional part is too close to `delta` or the value too large
/// for its fractional part to be meaningful. Indices with `n^k > x / delta`
/// contribute nothing and are skipped.
pub fn s_k_count(probe: &BoundProbe) -> Result<u64> {
    probe.validate()?;
    if probe.delta == 0.0 {
        return Ok(probe.n);
    }
    let last = ((probe.x / probe.delta).powf(1.0 / probe.k as f64).floor() + 2.0).min(probe.n as f64);
    let last = last.max(0.0) as u64;
    let x = exact(probe.x)?;
    let delta = exact(probe.delta)?;
    let k = probe.k;
    let eps = (k as f64 + 3.0) * f64::EPSILON;
    let count = (1..=last)
        .into_par_iter()
        .filter(|&n| {
            let y = probe.x / (n as f64).powi(k as i32);
            if y < 2f64.powi(40) {
                let fr = y - y.floor();
                let dist = fr.min(1.0 - fr);
                let err = y * eps + 4.0 * f64::EPSILON;
                if (dist - probe.delta).abs() > err {
                    return dist >= probe.delta;
                }
            }
            let nk = BigInt::from(n).pow(k);
            distance_at_least(x.numer(), &(x.denom() * nk), &delta)
        })
        .count();
    Ok(count as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoBound {
    /// `|rho_N(x)|`.
    pub lhs: f64,
    /// `exp(-(pi^2 delta^2 / 2) #S_1(N, delta, x))`.
    pub rhs: f64,
    pub count: u64,
    pub holds: bool,
}

/// `|rho_N(x)| <= exp(-(pi^2 delta^2 / 2) #S_1(N, delta, x))`.
///
/// Compared in the log domain; near-ties are re-decided at 256 bits.
pub fn rho_bound_check(probe: &BoundProbe) -> Result<RhoBound> {
    if probe.k != 1 {
        return Err(Error::domain("the cosine-product bound uses k = 1"));
    }
    let count = s_k_count(probe)?;
    let lhs = rho_n(probe.x, probe.n)?.abs();
    let log_rhs = -(PI * PI * probe.delta * probe.delta / 2.0) * count as f64;
    let rhs = log_rhs.exp();
    let holds = if lhs == 0.0 {
        true
    } else {
        let gap = log_rhs - lhs.ln();
        if gap.abs() > 1e-9 * (1.0 + log_rhs.abs()) {
            gap >= 0.0
        } else {
            rho_bound_precise(probe, count)
        }
    };
    Ok(RhoBound { lhs, rhs, count, holds })
}

fn rho_bound_precise(probe: &BoundProbe, count: u64) -> bool {
    let p = 256;
    let pi = bigfloat::pi(p);
    let x = bigfloat::from_f64(probe.x, p);
    let mut prod = BigFloat::from_u64(1, p);
    for n in 1..=probe.n {
        let arg = pi.mul(&x, p, RM).div(&BigFloat::from_u64(n, p), p, RM);
        prod = prod.mul(&bigfloat::cos(&arg, p), p, RM);
    }
    let lhs = prod.abs();
    if lhs.is_zero() {
        return true;
    }
    let d = bigfloat::from_f64(probe.delta, p);
    let exponent = pi
        .mul(&pi, p, RM)
        .mul(&d, p, RM)
        .mul(&d, p, RM)
        .mul(&BigFloat::from_u64(count, p), p, RM)
        .div(&BigFloat::from_u64(2, p), p, RM)
        .neg();
    let rhs = bigfloat::exp(&exponent, p);
    lhs.cmp(&rhs).is_some_and(|c| c <= 0)
}

/// Number of pairs `(m, n)` with `m` an integer in `(x - h, x + h)`, `n | m`
/// and `N/2 <= n <= N`. Each `n` contributes the multiples of `n` in the
/// window, counted exactly.
pub fn divisor_window_sum(x: f64, n: u64, half_width: f64) -> Result<u64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain("x must be positive and finite"));
    }
    if !(half_width >= 0.0 && half_width.is_finite()) {
        return Err(Error::domain("half width must be finite and >= 0"));
    }
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    let xr = exact(x)?;
    let hr = exact(half_width)?;
    let lo = &xr - &hr;
    let hi = &xr + &hr;
    let first = n.div_ceil(2);
    let total: u64 = (first..=n)
        .into_par_iter()
        .map(|d| {
            let d = BigInt::from(d);
            // multiples d j with lo < d j < hi: j in (lo/d, hi/d)
            let above = (&lo / BigRational::from_integer(d.clone())).floor().to_integer() + 1u32;
            let below = (&hi / BigRational::from_integer(d)).ceil().to_integer() - 1u32;
            if below >= above {
                (below - above + 1u32).to_u64().unwrap_or(u64::MAX)
            } else {
                0
            }
        })
        .sum();
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sandwich {
    /// `N/2 - D(x, N, delta N)`.
    pub lower: f64,
    pub count: u64,
    /// `N - D(x, N, delta N / 2)`.
    pub upper: f64,
    pub lower_strict: bool,
    pub upper_strict: bool,
    pub upper_weak: bool,
}

impl Sandwich {
    pub fn holds_strictly(&self) -> bool {
        self.lower_strict && self.upper_strict
    }
}

/// `N/2 - D(x, N, delta N) < #S_1(N, delta, x) < N - D(x, N, delta N / 2)`.
///
/// The upper inequality can be attained with equality (for instance when
/// `delta N` is too small for any window to hold an integer); both the
/// strict and the non-strict forms are reported.
pub fn sandwich(x: f64, n: u64, delta: f64) -> Result<Sandwich> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::domain("delta must lie in (0, 1/2)"));
    }
    let count = s_k_count(&BoundProbe::new(n, 1, delta, x))?;
    let wide = divisor_window_sum(x, n, delta * n as f64)?;
    let narrow = divisor_window_sum(x, n, delta * n as f64 / 2.0)?;
    let lower = n as f64 / 2.0 - wide as f64;
    let upper = n as f64 - narrow as f64;
    // compare 2 count against N - 2 wide to stay in integers
    let lower_strict = 2 * count as i128 > n as i128 - 2 * wide as i128;
    let upper_strict = (count as i128) < n as i128 - narrow as i128;
    let upper_weak = (count as i128) <= n as i128 - narrow as i128;
    Ok(Sandwich {
        lower,
        count,
        upper,
        lower_strict,
        upper_strict,
        upper_weak,
    })
}

/// `delta = 4 sqrt(log x) / (pi sqrt N)`, the choice made when bounding
/// `rho_N(x)` on `[N, e^{N/8}]`.
pub fn regime_delta(x: f64, n: u64) -> f64 {
    4.0 * x.ln().sqrt() / (PI * (n as f64).sqrt())
}

/// Random `(x, N, delta)` with `N in [64, 400]`, `x in [N, e^{N/8}]`
/// (log-uniform, capped at `1e15`) and `delta = regime_delta(x, N)`.
pub fn random_sandwich_probes(count: usize, seed: u64) -> Vec<(f64, u64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n: u64 = rng.gen_range(64..=400);
            let lo = (n as f64).ln();
            let hi = (n as f64 / 8.0).min(15.0 * 10f64.ln()).max(lo);
            let x = rng.gen_range(lo..=hi).exp().round().max(n as f64);
            (x, n, regime_delta(x, n))
        })
        .collect()
}

/// Random probes with `N <= 200`, `delta in (0, 1/2)`, `x in [0, 1000]`.
pub fn random_rho_probes(count: usize, seed: u64) -> Vec<BoundProbe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=200);
            let mut delta: f64 = rng.gen_range(0.0..0.5);
            if delta == 0.0 {
                delta = 0.25;
            }
            let x = if rng.gen_bool(0.2) {
                rng.gen_range(0..=1000) as f64
            } else {
                rng.gen_range(0.0..=1000.0)
            };
            BoundProbe::new(n, 1, delta, x)
        })
        .collect()
}

fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn sigma_from_factors(factors: &[(u64, u32)], s: f64) -> f64 {
    factors
        .iter()
        .map(|&(p, e)| {
            let ps = (p as f64).powf(s);
            let mut term = 1.0;
            let mut acc = 1.0;
            for _ in 0..e {
                term *= ps;
                acc += term;
            }
            acc
        })
        .product()
}

/// `sigma_s(m) = sum_{d | m} d^s`.
pub fn sigma_power_sum(m: u64, s: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("sigma_s(0) is undefined"));
    }
    Ok(sigma_from_factors(&factorize(m), s))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RamanujanScan {
    pub max_value: f64,
    pub argmax: u64,
}

/// `max_{3 <= m <= m_max} log sigma_{-s}(m) log log m / (log m)^{1-s}`.
pub fn ramanujan_ratio_scan(m_max: u64, s: f64) -> Result<RamanujanScan> {
    if m_max < 3 {
        return Err(Error::domain("m_max must be >= 3"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain("s must lie in (0, 1)"));
    }
    let spf = smallest_prime_factors(m_max);
    let best = (3..=m_max)
        .into_par_iter()
        .map(|m| {
            let mut factors: Vec<(u64, u32)> = Vec::new();
            let mut r = m;
            while r > 1 {
                let p = spf[r as usize] as u64;
                let mut e = 0;
                while r % p == 0 {
                    r /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            let lm = (m as f64).ln();
            let v = sigma_from_factors(&factors, -s).ln() * lm.ln() / lm.powf(1.0 - s);
            (v, m)
        })
        .reduce_with(|p, q| if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p })
        .expect("nonempty range");
    Ok(RamanujanScan {
        max_value: best.0,
        argmax: best.1,
    })
}

fn smallest_prime_factors(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactComparison {
    pub lhs: ExactRational,
    pub rhs: ExactRational,
    pub equal: bool,
}

/// `sum_{j=0}^m (-1)^j C(m, j) / (x + j) = m! / (x (x+1) ... (x+m))`.
pub fn partial_fraction_identity(m: u32, x: &ExactRational) -> Result<ExactComparison> {
    let xr = x.as_big_rational();
    for j in 0..=m {
        if (xr + BigRational::from_integer(j.into())).is_zero() {
            return Err(Error::domain(format!("x = -{j} is a pole")));
        }
    }
    let mut lhs = BigRational::zero();
    let mut binom = BigInt::one();
    let mut denom_prod = BigRational::one();
    for j in 0..=m {
        let shifted = xr + BigRational::from_integer(j.into());
        let term = BigRational::from_integer(binom.clone()) / &shifted;
        if j % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
        denom_prod *= shifted;
        binom = binom * (m - j) / (j + 1);
    }
    let factorial: BigInt = (1..=m).map(BigInt::from).product();
    let rhs = BigRational::from_integer(factorial) / denom_prod;
    Ok(ExactComparison {
        equal: lhs == rhs,
        lhs: lhs.into(),
        rhs: rhs.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapCheck {
    /// `1/n^k - 1/(n (n+1) ... (n+k-1))`.
    pub gap: ExactRational,
    /// `k^2 / (2 n^{k+1})`.
    pub bound: ExactRational,
    pub holds: bool,
}

/// `0 <= 1/n^k - 1/(n(n+1)...(n+k-1)) < k^2 / (2 n^{k+1})`, exactly.
pub fn power_vs_factorial_gap(n: u64, k: u32) -> Result<GapCheck> {
    if n == 0 || k == 0 {
        return Err(Error::domain("n and k must be >= 1"));
    }
    let nb = BigInt::from(n);
    let power = nb.pow(k);
    let rising: BigInt = (0..k as u64).map(|i| BigInt::from(n + i)).product();
    let gap = BigRational::new(BigInt::one(), power.clone()) - BigRational::new(BigInt::one(), rising);
    let bound = BigRational::new(BigInt::from(k as u64 * k as u64), 2 * power * &nb);
    let holds = !gap.is_negative() && gap < bound;
    Ok(GapCheck {
        gap: gap.into(),
        bound: bound.into(),
        holds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkLowerBound {
    pub count: u64,
    /// `((1/2 - delta)(2^{-1/k} - (3/2) e^{-a}) - (2/3)^k) x^{1/k}`.
    pub bound: f64,
    pub holds: bool,
}

/// `#S_k(N, delta, x) >=` the lower bound above, for
/// `x in [e^{a k^2}, N^k]`, `delta in (0, 1/2)`, `N > e^{a k}`.
pub fn s_k_lower_bound_check(probe: &BoundProbe) -> Result<SkLowerBound> {
    probe.validate()?;
    let k = probe.k as f64;
    if !(probe.delta > 0.0) {
        return Err(Error::precondition("delta must be positive"));
    }
    if !(probe.a > 0.0) {
        return Err(Error::precondition("a must be positive"));
    }
    let x_min = (probe.a * k * k).exp();
    let ln_x = probe.x.ln();
    let slack = 1e-12 * probe.a * k * k;
    if ln_x < probe.a * k * k - slack || ln_x > k * (probe.n as f64).ln() + slack {
        return Err(Error::precondition(format!(
            "x = {} outside [e^(a k^2), N^k] = [{x_min:e}, {}^{}]",
            probe.x, probe.n, probe.k
        )));
    }
    if (probe.n as f64) <= (probe.a * k).exp() {
        return Err(Error::precondition("need N > e^(a k)"));
    }
    let factor = (0.5 - probe.delta) * (2f64.powf(-1.0 / k) - 1.5 * (-probe.a).exp()) - (2.0f64 / 3.0).powf(k);
    let bound = factor * (ln_x / k).exp();
    let count = s_k_count(probe)?;
    Ok(SkLowerBound {
        count,
        bound,
        holds: count as f64 >= bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k: u32,
    pub probes: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkSweep {
    pub rows: Vec<SweepRow>,
    /// Smallest `k` from which every swept `k` had no failures.
    pub k_min: Option<u32>,
}

/// Random admissible probes for each `k` in `k_lo..=k_hi`. The growth
/// parameter `a` is drawn so that `e^{a k}` stays below about `10^6`,
/// which keeps the direct count at desk scale.
pub fn s_k_lower_bound_sweep(k_lo: u32, k_hi: u32, per_k: usize, seed: u64) -> Result<SkSweep> {
    if k_lo == 0 || k_hi < k_lo {
        return Err(Error::domain("need 1 <= k_lo <= k_hi"));
    }
    let mut rows = Vec::new();
    for k in k_lo..=k_hi {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let kf = k as f64;
        let a_hi = (13.0 / kf).min(1.5);
        let probes: Vec<BoundProbe> = (0..per_k)
            .map(|_| {
                let a = rng.gen_range(0.5 * a_hi..=a_hi);
                let root = (a * kf).exp() * rng.gen_range(1.0..1.5);
                let n = (root * rng.gen_range(1.0..1.2)).ceil() as u64 + 1;
                let delta = rng.gen_range(0.01..0.45);
                let mut p = BoundProbe::new(n, k, delta, root.powf(kf));
                p.a = a;
                p
            })
            .collect();
        let results: Vec<Result<SkLowerBound>> = probes.par_iter().map(s_k_lower_bound_check).collect();
        let mut failures = 0;
        for r in results {
            if !r?.holds {
                failures += 1;
            }
        }
        rows.push(SweepRow { k, probes: per_k, failures });
    }
    let k_min = rows
        .iter()
        .rev()
        .take_while(|r| r.failures == 0)
        .last()
        .map(|r| r.k);
    Ok(SkSweep { rows, k_min })
}

#[derive(Clone, Debug, PartialEq)]
pub struct S1Floor {
    pub feasible: bool,
    pub count: u64,
    /// `x^{1/k} / 200`.
    pub floor: f64,
    pub holds: bool,
    pub note: String,
}

/// `#S_1(N, 2^{-k}/20, x) >= x^{1/k} / 200` for `x in [4^{k^2}, N^k/(k-1)!]`,
/// `N >= k 4^k`. An empty admissible `x` range is reported as infeasible.
pub fn s_1_floor_check(n: u64, k: u32, x: f64) -> Result<S1Floor> {
    if k < 2 {
        return Err(Error::domain("k must be >= 2"));
    }
    let kf = k as f64;
    let ln_lo = kf * kf * 4f64.ln();
    let ln_fact: f64 = (1..k).map(|i| (i as f64).ln()).sum();
    let ln_hi = kf * (n as f64).ln() - ln_fact;
    let n_min = kf * 4f64.powi(k as i32);
    let floor = (x.ln() / kf).exp() / 200.0;
    if (n as f64) < n_min || ln_lo > ln_hi {
        return Ok(S1Floor {
            feasible: false,
            count: 0,
            floor,
            holds: false,
            note: format!("range infeasible at desk scale for k = {k}, N = {n}"),
        });
    }
    let ln_x = x.ln();
    if ln_x < ln_lo - 1e-12 || ln_x > ln_hi + 1e-12 {
        return Err(Error::precondition(format!(
            "x = {x} outside [4^(k^2), N^k/(k-1)!]"
        )));
    }
    let delta = 2f64.powi(-(k as i32)) / 20.0;
    let count = s_k_count(&BoundProbe::new(n, 1, delta, x))?;
    Ok(S1Floor {
        feasible: true,
        count,
        floor,
        holds: count as f64 >= floor,
        note: "asymptotic in k; small k is evidence only".into(),
    })
}

/// Multipliers of the six-term blocks `{k, 2k, 3k, 4k, 6k, 12k}`.
pub const TUPLE_MULTIPLIERS: [u64; 6] = [1, 2, 3, 4, 6, 12];

/// Distinct numerators over 12 of `sum_i s_i / m_i` for the six multipliers.
pub fn tuple_values() -> Vec<i64> {
    let weights: Vec<i64> = TUPLE_MULTIPLIERS.iter().map(|&m| 12 / m as i64).collect();
    let mut v: Vec<i64> = (0u32..64)
        .map(|p| {
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| if p >> i & 1 == 1 { -w } else { *w })
                .sum()
        })
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn tuple_value_count() -> u64 {
    tuple_values().len() as u64
}

/// `k = 2^{3a} 3^{2b} m` with `gcd(m, 6) = 1`.
pub fn is_admissible(k: u64) -> bool {
    if k == 0 {
        return false;
    }
    let v2 = k.trailing_zeros();
    let mut r = k >> v2;
    let mut v3 = 0;
    while r.is_multiple_of(3) {
        r /= 3;
        v3 += 1;
    }
    v2.is_multiple_of(3) && v3 % 2 == 0
}

/// Whether the blocks `{k, 2k, ..., 12k}` for admissible `k` with
/// `12k <= limit` are pairwise disjoint.
pub fn tuples_disjoint(limit: u64) -> Result<bool> {
    if limit > 1 << 32 {
        return Err(Error::Resource {
            what: "tuple disjointness bitmap".into(),
            requested: limit as u128,
            cap: 1 << 32,
        });
    }
    let mut seen = vec![false; limit as usize + 1];
    for k in (1..=limit / 12).filter(|&k| is_admissible(k)) {
        for m in TUPLE_MULTIPLIERS {
            let v = (k * m) as usize;
            if seen[v] {
                return Ok(false);
            }
            seen[v] = true;
        }
    }
    Ok(true)
}

/// Counts `m <= bound` coprime to 6.
fn coprime_to_6(bound: u64) -> u64 {
    bound - bound / 2 - bound / 3 + bound / 6
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleDensity {
    pub n: u64,
    /// `#{k admissible : 12k <= n}`.
    pub count: u64,
    /// `n / 28`.
    pub expected: f64,
    pub ratio: f64,
}

pub fn admissible_density(n: u64) -> Result<AdmissibleDensity> {
    if n < 12 {
        return Err(Error::domain("n must be >= 12"));
    }
    let top = n / 12;
    let mut count = 0u64;
    let mut p8 = 1u64;
    while p8 <= top {
        let mut p9 = 1u64;
        while p8 * p9 <= top {
            count += coprime_to_6(top / (p8 * p9));
            p9 *= 9;
        }
        p8 *= 8;
    }
    let expected = n as f64 / 28.0;
    Ok(AdmissibleDensity {
        n,
        count,
        expected,
        ratio: count as f64 / expected,
    })
}

/// `(22/28) log 2 + (1/28) log 29`: 22 free signs per 28 integers plus one
/// factor 29 per six-term block.
pub fn alpha_consistent() -> f64 {
    22.0 / 28.0 * std::f64::consts::LN_2 + 29f64.ln() / 28.0
}

/// `(23/28) log 2 + (1/28) log 29`, the other reading of the exponent.
pub fn alpha_alternative() -> f64 {
    23.0 / 28.0 * std::f64::consts::LN_2 + 29f64.ln() / 28.0
}

/// Largest `N` for [`cardinality_bound_check`].
pub const CARDINALITY_MAX_N: u32 = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct Cardinality {
    pub n: u32,
    pub count: u64,
    pub two_pow: u64,
    /// `e^{0.665 N}`.
    pub exp_bound: f64,
    /// `log(count) / N`.
    pub exponent: f64,
    pub symmetric: bool,
}

/// Exact `#S_N` from the deduplicated half-table merge.
pub fn cardinality_bound_check(n: u32) -> Result<Cardinality> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    if n > CARDINALITY_MAX_N {
        return Err(Error::Resource {
            what: format!("exact distinct-sum count at N = {n}"),
            requested: 1u128 << n,
            cap: 1u128 << CARDINALITY_MAX_N,
        });
    }
    let d = distinct_sums(n, DEFAULT_MAX_HALF_SIZE)?;
    Ok(Cardinality {
        n,
        count: d.count,
        two_pow: 1u64 << n,
        exp_bound: (0.665 * n as f64).exp(),
        exponent: (d.count as f64).ln() / n as f64,
        symmetric: d.symmetric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_k_count_examples() {
        assert_eq!(s_k_count(&BoundProbe::new(17, 1, 0.0, 3.3)).unwrap(), 17);
        assert_eq!(s_k_count(&BoundProbe::new(4, 1, 0.2, 1.0)).unwrap(), 3);
        assert!(s_k_count(&BoundProbe::new(4, 1, 0.5, 1.0)).is_err());
    }

    #[test]
    fn s_k_count_large_x_uses_exact_path() {
        // x = 2^70: x/n is an integer for powers of two only
        let x = 2f64.powi(70);
        let c = s_k_count(&BoundProbe::new(16, 1, 0.1, x)).unwrap();
        let direct = (1..=16u64)
            .filter(|&n| {
                let r = (BigInt::one() << 70usize).mod_floor(&BigInt::from(n));
                let d = r.clone().min(BigInt::from(n) - r);
                d * 10 >= BigInt::from(n)
            })
            .count() as u64;
        assert_eq!(c, direct);
    }

    #[test]
    fn rho_bound_examples() {
        let r = rho_bound_check(&BoundProbe::new(10, 1, 0.3, 0.0)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.count, r.holds), (1.0, 1.0, 0, true));
        let r = rho_bound_check(&BoundProbe::new(40, 1, 0.25, PI)).unwrap();
        assert!(r.holds);
        let r = rho_bound_check(&BoundProbe::new(5, 1, 0.1, 60.0)).unwrap();
        assert!(r.holds);
        assert!(rho_bound_check(&BoundProbe::new(5, 2, 0.1, 60.0)).is_err());
    }

    #[test]
    fn divisor_window_examples() {
        assert_eq!(divisor_window_sum(0.5, 10, 0.25).unwrap(), 0);
        assert_eq!(divisor_window_sum(100.0, 10, 5.0).unwrap(), 8);
        // open window: 95 and 105 are excluded
        assert_eq!(divisor_window_sum(100.0, 10, 5.0).unwrap(), divisor_window_sum(100.0, 10, 4.5).unwrap());
        assert!(divisor_window_sum(-1.0, 10, 1.0).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_power_sum(1, 0.37).unwrap(), 1.0);
        assert!((sigma_power_sum(6, -1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(sigma_power_sum(12, 0.0).unwrap(), 6.0);
        assert!(sigma_power_sum(0, 1.0).is_err());
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn ramanujan_scan_small() {
        let one = ramanujan_ratio_scan(3, 0.5).unwrap();
        let l3 = 3f64.ln();
        let expected = (1.0 + 3f64.powf(-0.5)).ln() * l3.ln() / l3.powf(0.5);
        assert!((one.max_value - expected).abs() < 1e-15);
        let a = ramanujan_ratio_scan(1000, 0.5).unwrap().max_value;
        let b = ramanujan_ratio_scan(2000, 0.5).unwrap().max_value;
        assert!(b >= a);
    }

    #[test]
    fn identity_examples() {
        let r = partial_fraction_identity(0, &ExactRational::from_integer(5)).unwrap();
        assert_eq!(r.lhs, ExactRational::from_ratio(1, 5));
        assert!(r.equal);
        let r = partial_fraction_identity(1, &ExactRational::from_integer(3)).unwrap();
        assert_eq!(r.lhs, ExactRational::from_ratio(1, 12));
        assert!(r.equal);
        assert!(partial_fraction_identity(7, &ExactRational::from_ratio(2, 3)).unwrap().equal);
        assert!(partial_fraction_identity(4, &ExactRational::from_integer(-3)).is_err());
    }

    #[test]
    fn gap_examples() {
        let g = power_vs_factorial_gap(9, 1).unwrap();
        assert!(g.gap.is_zero() && g.holds);
        assert_eq!(g.bound, ExactRational::from_ratio(1, 162));
        let g = power_vs_factorial_gap(3, 2).unwrap();
        assert_eq!(g.gap, ExactRational::from_ratio(1, 36));
        assert_eq!(g.bound, ExactRational::from_ratio(2, 27));
        assert!(g.holds);
    }

    #[test]
    fn sk_lower_bound_at_k10() {
        let mut p = BoundProbe::new((1 << 20) + 1, 10, 0.05, 2f64.powi(200));
        p.a = 4f64.ln();
        let r = s_k_lower_bound_check(&p).unwrap();
        assert!(r.bound > 0.0 && r.holds, "{r:?}");
    }

    #[test]
    fn sk_lower_bound_preconditions() {
        let mut p = BoundProbe::new(10, 3, 0.1, 5.0);
        p.a = 1.0;
        assert!(matches!(s_k_lower_bound_check(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn s1_floor_examples() {
        let r = s_1_floor_check(32, 2, 256.0).unwrap();
        assert!(r.feasible && r.holds && r.count >= 1);
        assert!((r.floor - 0.08).abs() < 1e-15);
        let r = s_1_floor_check(192, 3, 4f64.powi(9)).unwrap();
        assert!(r.feasible);
        let r = s_1_floor_check(100, 5, 1e20).unwrap();
        assert!(!r.feasible);
    }

    #[test]
    fn tuple_examples() {
        let v = tuple_values();
        assert_eq!(v.len(), 29);
        assert!(v.iter().all(|x| x % 2 == 0));
        assert_eq!((v[0], v[28]), (-28, 28));
        assert!(tuples_disjoint(10_000).unwrap());
    }

    #[test]
    fn admissible_examples() {
        assert!(is_admissible(1) && !is_admissible(2) && is_admissible(8) && is_admissible(9) && !is_admissible(3));
        assert_eq!(admissible_density(12).unwrap().count, 1);
        assert_eq!(admissible_density(24).unwrap().count, 1);
        let n = 100_000;
        let direct = (1..=n / 12).filter(|&k| is_admissible(k)).count() as u64;
        assert_eq!(admissible_density(n).unwrap().count, direct);
    }

    #[test]
    fn alpha_values() {
        assert!((alpha_consistent() - 0.664877).abs() < 1e-6);
        assert!((alpha_alternative() - 0.689631).abs() < 1e-6);
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(cardinality_bound_check(1).unwrap().count, 2);
        assert_eq!(cardinality_bound_check(3).unwrap().count, 8);
        let c = cardinality_bound_check(12).unwrap();
        assert!(c.count < 4096 && c.symmetric);
        assert!(cardinality_bound_check(27).is_err());
    }
}
