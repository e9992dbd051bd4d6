//! Exact minimal distance `m_N(tau) = min |sigma - tau|` over all signed
//! harmonic sums of length `N`, by meet-in-the-middle.
//!
//! The index range `1..=N` is split at `R`. Each half is enumerated as
//! integer numerators over a common denominator `D` (a multiple of `L_N`
//! and of the denominator of `tau`), sorted, and the closest cross pair to
//! `tau * D` is found by a monotone sweep. Numerators live in `i128` when
//! they fit, otherwise in `BigInt`.
//!
//! Sign convention: the full sum is `a + b` with `a` drawn from the first
//! half and `b` from the second, and the sweep minimizes `|a + b - t|`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Debug;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bigfloat;
use crate::error::{Error, Result};
use crate::exact_core::{harmonic, signed_sum, ExactRational, LcmCache, SignVector};

/// Per-half entry cap (`2^26`, a balanced split at `N = 52`).
pub const DEFAULT_MAX_HALF_SIZE: u64 = 1 << 26;

/// `m_N * L_N` for `N = 1..=64`, published reference values.
pub const REFERENCE_TABLE: [u64; 64] = [
    1, 1, 1, 1, 7, 3, 11, 13, 11, 11, 23, 23, 607, 251, 251, 125, //
    97, 97, 3767, 3767, 3767, 2285, 24319, 24319, 71559, 4261, 13703, 13703, 872843, 872843,
    17424097, 13828799, //
    902339, 7850449, 7850449, 7850449, 10683197, 68185267, 37728713, 37728713, 740674333,
    740674333, 1774907231, 1774907231, 1774907231, 1699239271, 3103390393, 3103390393, //
    421936433719, 175378178867, 8643193037, 8643193037, 461784703049, 461784703049,
    461784703049, 461784703049, 514553001783, 116096731427, 2810673355099, 2810673355099,
    4723651835663, 136420009515743, 136420009515743, 23093515509397,
];

/// Reference `m_N * L_N` for `1 <= n <= 64`.
pub fn reference_value(n: u32) -> Option<u64> {
    REFERENCE_TABLE.get((n as usize).checked_sub(1)?).copied()
}

/// Integer type used for half-sum numerators.
pub trait Numerator: Clone + Ord + Send + Sync + Debug + 'static {
    fn from_bigint(v: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl Numerator for i128 {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    #[inline]
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl Numerator for BigInt {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// All signed sums over one contiguous index range, as numerators over a
/// shared denominator, sorted ascending. Each entry carries its sign
/// pattern (bit `i` set means index `start + i` has sign `-1`).
#[derive(Clone, Debug)]
pub struct HalfSumTable<K> {
    denominator: BigInt,
    start: u32,
    len: u32,
    entries: Vec<(K, u32)>,
    generated: u64,
}

impl<K: Numerator> HalfSumTable<K> {
    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// First index covered (1-based).
    pub fn start(&self) -> u32 {
        self.start
    }

    /// Number of indices covered; may be zero.
    pub fn range_len(&self) -> u32 {
        self.len
    }

    pub fn entries(&self) -> &[(K, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Count before any deduplication, always `2^range_len`.
    pub fn generated(&self) -> u64 {
        self.generated
    }

    pub fn numerators(&self) -> impl Iterator<Item = &K> + '_ {
        self.entries.iter().map(|(k, _)| k)
    }

    /// Collapses equal numerators, keeping the smallest pattern as witness.
    pub fn dedup(&mut self) {
        self.entries.dedup_by(|later, earlier| later.0 == earlier.0);
    }

    /// The signs this table's pattern assigns to its index range.
    pub fn pattern_signs(&self, pattern: u32) -> Vec<i8> {
        (0..self.len)
            .map(|i| if pattern >> i & 1 == 1 { -1 } else { 1 })
            .collect()
    }

    /// Table of the negated sums, sorted ascending.
    fn negated(&self) -> Self {
        let zero = K::zero();
        let mut entries: Vec<(K, u32)> = self
            .entries
            .iter()
            .rev()
            .map(|(k, p)| (zero.sub(k), !p & mask(self.len)))
            .collect();
        // negation reverses order; only tie order among equal values can differ
        entries.par_sort_unstable();
        HalfSumTable {
            denominator: self.denominator.clone(),
            start: self.start,
            len: self.len,
            entries,
            generated: self.generated,
        }
    }
}

fn mask(len: u32) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

/// Enumerates all `2^len` signed sums over indices `start..start+len`,
/// scaled by `denominator`.
///
/// Generation is sharded on the top sign bits; within a shard a Gray code
/// flips one sign per step, moving the numerator by `2 * denominator / n`.
pub fn enumerate_half<K: Numerator>(
    start: u32,
    len: u32,
    denominator: &BigInt,
    max_half_size: u64,
) -> Result<HalfSumTable<K>> {
    if start == 0 {
        return Err(Error::domain("index ranges are 1-based"));
    }
    let size = 1u128 << len.min(127);
    if len >= 32 || size > max_half_size as u128 {
        return Err(Error::Resource {
            what: format!("half table over {len} indices"),
            requested: size,
            cap: max_half_size as u128,
        });
    }
    let mut weights = Vec::with_capacity(len as usize);
    let mut total = <BigInt as Zero>::zero();
    for n in start..start + len {
        let (q, r) = denominator.div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(Error::contract(format!(
                "denominator {denominator} is not divisible by {n}"
            )));
        }
        total += &q;
        weights.push(q);
    }
    let headroom = &total * 4u32;
    if K::from_bigint(&headroom).is_none() {
        return Err(Error::contract("numerators do not fit the chosen integer width"));
    }
    let weights: Vec<K> = weights.iter().map(|w| K::from_bigint(w).unwrap()).collect();
    let doubled: Vec<K> = weights.iter().map(|w| w.add(w)).collect();

    let len_us = len as usize;
    let shard_bits = if len_us >= 12 { 6.min(len_us) } else { 0 };
    let low_bits = len_us - shard_bits;
    let shard_len = 1usize << low_bits;
    let mut entries: Vec<(K, u32)> = vec![(K::zero(), 0); 1usize << len_us];
    entries
        .par_chunks_mut(shard_len)
        .enumerate()
        .for_each(|(shard, out)| {
            let high = shard as u32;
            let mut sum = K::zero();
            for (i, w) in weights.iter().enumerate() {
                let negative = i >= low_bits && (high >> (i - low_bits)) & 1 == 1;
                sum = if negative { sum.sub(w) } else { sum.add(w) };
            }
            let base = if low_bits >= 32 { 0 } else { high << low_bits };
            let mut gray = 0u32;
            out[0] = (sum.clone(), base);
            for (g, slot) in out.iter_mut().enumerate().skip(1) {
                let bit = g.trailing_zeros();
                if gray >> bit & 1 == 0 {
                    sum = sum.sub(&doubled[bit as usize]);
                } else {
                    sum = sum.add(&doubled[bit as usize]);
                }
                gray ^= 1 << bit;
                *slot = (sum.clone(), base | gray);
            }
        });
    // (numerator, pattern) pairs are distinct, so the order is deterministic
    entries.par_sort_unstable();
    Ok(HalfSumTable {
        denominator: denominator.clone(),
        start,
        len,
        entries,
        generated: 1u64 << len,
    })
}

/// Best cross pair found by [`closest_pair`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosestPair<K> {
    /// `|a + b - t|`, a numerator over the shared denominator.
    pub distance: K,
    pub a_index: usize,
    pub b_index: usize,
    pub steps: u64,
}

/// Minimizes `|x + y - t|` over `x` in `a`, `y` in `b`.
///
/// For each `x` the optimum sits next to the crossing point of `x + y = t`
/// in `b`, which moves monotonically down as `x` grows; chunks of `a` are
/// swept in parallel. Ties are broken by the combined sign pattern (second
/// half first, so the smallest overall pattern wins), which makes the
/// witness independent of the thread count and equal to the exhaustive
/// scan's choice once tables are deduplicated.
pub fn closest_pair<K: Numerator>(
    a: &HalfSumTable<K>,
    b: &HalfSumTable<K>,
    t: &K,
) -> Result<ClosestPair<K>> {
    if a.denominator != b.denominator {
        return Err(Error::contract("half tables use different denominators"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::contract("half tables must be nonempty"));
    }
    let chunk = (a.len() / (4 * rayon::current_num_threads()).max(1)).max(1 << 14);
    let best = a
        .entries
        .par_chunks(chunk)
        .enumerate()
        .map(|(ci, xs)| sweep_chunk(ci * chunk, xs, &b.entries, t))
        .reduce_with(|p, q| {
            let steps = p.steps + q.steps;
            let winner = if key(&q, a, b) < key(&p, a, b) { q } else { p };
            ClosestPair { steps, ..winner }
        })
        .expect("nonempty table");
    Ok(best)
}

fn key<'a, K: Numerator>(p: &'a ClosestPair<K>, a: &HalfSumTable<K>, b: &HalfSumTable<K>) -> (&'a K, u32, u32) {
    (&p.distance, b.entries[p.b_index].1, a.entries[p.a_index].1)
}

fn sweep_chunk<K: Numerator>(offset: usize, xs: &[(K, u32)], ys: &[(K, u32)], t: &K) -> ClosestPair<K> {
    let mut best = None;
    let first = &xs[0].0;
    // first index with x + y >= t
    let mut j = ys.partition_point(|(y, _)| first.add(y) < *t);
    let mut steps = 0u64;
    for (i, (x, pa)) in xs.iter().enumerate() {
        while j > 0 && x.add(&ys[j - 1].0) >= *t {
            j -= 1;
            steps += 1;
        }
        steps += 1;
        if j > 0 {
            let d = t.sub(&x.add(&ys[j - 1].0));
            consider(&mut best, d, (offset + i, *pa), (j - 1, ys[j - 1].1));
        }
        if j < ys.len() {
            let d = x.add(&ys[j].0).sub(t);
            consider(&mut best, d, (offset + i, *pa), (j, ys[j].1));
        }
    }
    let (mut best, _, _) = best.expect("nonempty chunk");
    best.steps = steps;
    best
}

fn consider<K: Numerator>(
    best: &mut Option<(ClosestPair<K>, u32, u32)>,
    d: K,
    (i, pa): (usize, u32),
    (j, pb): (usize, u32),
) {
    let better = match best {
        None => true,
        Some((b, qa, qb)) => (&d, pb, pa) < (&b.distance, *qb, *qa),
    };
    if better {
        *best = Some((
            ClosestPair {
                distance: d,
                a_index: i,
                b_index: j,
                steps: 0,
            },
            pa,
            pb,
        ));
    }
}

/// Search parameters.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: u32,
    pub tau: ExactRational,
    /// `R`: the first half covers `1..=R`. `None` balances the halves.
    pub split: Option<u32>,
    pub max_half_size: u64,
    /// Run inside a dedicated pool of this many threads.
    pub threads: Option<usize>,
    /// Collapse duplicate numerators before the sweep.
    pub dedup: bool,
}

impl SearchConfig {
    pub fn new(n: u32) -> Self {
        SearchConfig {
            n,
            tau: ExactRational::zero(),
            split: None,
            max_half_size: DEFAULT_MAX_HALF_SIZE,
            threads: None,
            dedup: true,
        }
    }

    pub fn with_tau(mut self, tau: ExactRational) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_split(mut self, split: u32) -> Self {
        self.split = Some(split);
        self
    }

    pub fn with_max_half_size(mut self, cap: u64) -> Self {
        self.max_half_size = cap;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    /// The effective split, checked against the size cap.
    pub fn resolved_split(&self) -> Result<u32> {
        if self.n == 0 {
            return Err(Error::domain("N must be >= 1"));
        }
        let split = self.split.unwrap_or(self.n.div_ceil(2));
        if split == 0 || split > self.n {
            return Err(Error::domain(format!(
                "split R = {split} outside [1, {}]",
                self.n
            )));
        }
        let larger = split.max(self.n - split);
        let requested = 1u128 << larger.min(127);
        if larger >= 32 || requested > self.max_half_size as u128 {
            return Err(Error::Resource {
                what: format!("half table for N = {} split at R = {split}", self.n),
                requested,
                cap: self.max_half_size as u128,
            });
        }
        Ok(split)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub split: u32,
    pub generated: (u64, u64),
    pub distinct: (u64, u64),
    pub sweep_steps: u64,
    pub fixed_width: bool,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub n: u32,
    pub tau: ExactRational,
    /// The exact minimum distance.
    pub m_value: ExactRational,
    /// `m_value * L_N`; an integer when `tau = 0`.
    pub m_times_lcm: ExactRational,
    pub witness: SignVector,
    pub stats: SearchStats,
}

fn common_denominator(n: u32, tau: &ExactRational) -> (BigInt, BigInt) {
    let l = BigInt::from(LcmCache::new(n as usize).get(n as usize).clone());
    let den = l.lcm(tau.denom());
    (l, den)
}

fn fits_fixed_width(n: u32, den: &BigInt, t: &BigInt) -> bool {
    let bound = harmonic(n as u64).map(|h| h.ceil()).unwrap_or_else(|_| BigInt::one());
    let worst = (den * bound + t.abs()) * 4u32;
    worst.bits() < 126
}

fn run_in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Exact `m_N(tau)` with a witness sign vector.
pub fn min_abs(config: &SearchConfig) -> Result<SearchResult> {
    let split = config.resolved_split()?;
    run_in_pool(config.threads, || min_abs_inner(config, split))?
}

fn min_abs_inner(config: &SearchConfig, split: u32) -> Result<SearchResult> {
    let started = Instant::now();
    let n = config.n;
    let (l, den) = common_denominator(n, &config.tau);
    let t = config.tau.numer() * (&den / config.tau.denom());
    let fixed = fits_fixed_width(n, &den, &t);
    let (distance, witness, mut stats) = if fixed {
        search_halves::<i128>(config, split, &den, &t)?
    } else {
        search_halves::<BigInt>(config, split, &den, &t)?
    };
    stats.fixed_width = fixed;
    let m_value = ExactRational::new(distance, den)?;
    let check = (&signed_sum(&witness) - &config.tau).abs();
    if check != m_value {
        return Err(Error::contract(format!(
            "witness {witness} gives distance {check}, search reported {m_value}"
        )));
    }
    let m_times_lcm = &m_value * &ExactRational::from_integer(l);
    stats.wall_time = started.elapsed();
    Ok(SearchResult {
        n,
        tau: config.tau.clone(),
        m_value,
        m_times_lcm,
        witness,
        stats,
    })
}

fn search_halves<K: Numerator>(
    config: &SearchConfig,
    split: u32,
    den: &BigInt,
    t: &BigInt,
) -> Result<(BigInt, SignVector, SearchStats)> {
    let mut a = enumerate_half::<K>(1, split, den, config.max_half_size)?;
    let mut b = enumerate_half::<K>(split + 1, config.n - split, den, config.max_half_size)?;
    if config.dedup {
        a.dedup();
        b.dedup();
    }
    let t_k = K::from_bigint(t).ok_or_else(|| Error::contract("target does not fit"))?;
    let best = closest_pair(&a, &b, &t_k)?;
    let mut signs = a.pattern_signs(a.entries[best.a_index].1);
    signs.extend(b.pattern_signs(b.entries[best.b_index].1));
    let witness = SignVector::new(signs)?;
    let stats = SearchStats {
        split,
        generated: (a.generated(), b.generated()),
        distinct: (a.len() as u64, b.len() as u64),
        sweep_steps: best.steps,
        ..Default::default()
    };
    Ok((best.distance.to_bigint(), witness, stats))
}

/// Largest `N` accepted by [`brute_force_min`].
pub const BRUTE_FORCE_MAX_N: u32 = 24;

/// Exhaustive scan of all `2^n` sign vectors; the reference oracle for
/// [`min_abs`].
pub fn brute_force_min(n: u32, tau: &ExactRational) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Resource {
            what: format!("exhaustive scan over N = {n}"),
            requested: 1u128 << n,
            cap: 1u128 << BRUTE_FORCE_MAX_N,
        });
    }
    let started = Instant::now();
    let (l, den) = common_denominator(n, tau);
    let t = tau.numer() * (&den / tau.denom());
    let (distance, pattern) = if fits_fixed_width(n, &den, &t) {
        let (d, p) = scan_all::<i128>(n, &den, &t)?;
        (BigInt::from(d), p)
    } else {
        scan_all::<BigInt>(n, &den, &t)?
    };
    let witness = SignVector::from_pattern(n as usize, pattern);
    let m_value = ExactRational::new(distance, den)?;
    let check = (&signed_sum(&witness) - tau).abs();
    if check != m_value {
        return Err(Error::contract("exhaustive witness does not reproduce its distance"));
    }
    Ok(SearchResult {
        n,
        tau: tau.clone(),
        m_times_lcm: &m_value * &ExactRational::from_integer(l),
        m_value,
        witness,
        stats: SearchStats {
            split: n,
            generated: (1u64 << n, 1),
            distinct: (1u64 << n, 1),
            sweep_steps: 1u64 << n,
            fixed_width: false,
            wall_time: started.elapsed(),
        },
    })
}

fn scan_all<K: Numerator>(n: u32, den: &BigInt, t: &BigInt) -> Result<(K, u64)> {
    let weights: Vec<K> = (1..=n)
        .map(|k| K::from_bigint(&(den / k)).expect("checked width"))
        .collect();
    let t = K::from_bigint(t).expect("checked width");
    let shard_bits = if n >= 12 { 6 } else { 0 };
    let low = (n - shard_bits) as usize;
    let best = (0u64..1 << shard_bits)
        .into_par_iter()
        .map(|high| {
            let mut sum = K::zero();
            for (i, w) in weights.iter().enumerate() {
                let neg = i >= low && (high >> (i - low)) & 1 == 1;
                sum = if neg { sum.sub(w) } else { sum.add(w) };
            }
            let base = high << low;
            let dist = |s: &K| if *s >= t { s.sub(&t) } else { t.sub(s) };
            let mut best = (dist(&sum), base);
            let mut gray = 0u64;
            for g in 1u64..1 << low {
                let bit = g.trailing_zeros() as usize;
                let w2 = weights[bit].add(&weights[bit]);
                sum = if gray >> bit & 1 == 0 { sum.sub(&w2) } else { sum.add(&w2) };
                gray ^= 1 << bit;
                let cand = (dist(&sum), base | gray);
                if cand < best {
                    best = cand;
                }
            }
            best
        })
        .reduce_with(|p, q| if q < p { q } else { p })
        .expect("at least one shard");
    Ok(best)
}

/// One point of the `log m_N / log L_N` series.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioPoint {
    pub n: u32,
    pub m_times_lcm: ExactRational,
    pub m_value: ExactRational,
    /// `NaN` at `N = 1`, where `log L_1 = 0`.
    pub ratio: f64,
}

/// `log m_N / log L_N` from the exact search, for plotting against `-1/2`.
pub fn log_ratio(n: u32, m_value: &ExactRational) -> f64 {
    let l = LcmCache::new(n as usize).get(n as usize).clone();
    if l.is_one() {
        return f64::NAN;
    }
    bigfloat::ln_rational(m_value) / bigfloat::ln_biguint(&l)
}

pub fn ratio_series(n_max: u32, base: &SearchConfig) -> Result<Vec<RatioPoint>> {
    (1..=n_max)
        .map(|n| {
            let cfg = SearchConfig {
                n,
                tau: ExactRational::zero(),
                split: None,
                ..base.clone()
            };
            let r = min_abs(&cfg)?;
            Ok(RatioPoint {
                n,
                ratio: log_ratio(n, &r.m_value),
                m_times_lcm: r.m_times_lcm,
                m_value: r.m_value,
            })
        })
        .collect()
}

/// Number of sign vectors of length `n` whose sum lies in the open interval
/// `(lo, hi)`, counted exactly with the half tables (no deduplication).
pub fn count_in_open_interval(
    n: u32,
    lo: &ExactRational,
    hi: &ExactRational,
    max_half_size: u64,
) -> Result<u64> {
    if lo >= hi {
        return Err(Error::domain(format!("empty or inverted interval ({lo}, {hi})")));
    }
    let split = SearchConfig::new(n)
        .with_max_half_size(max_half_size)
        .resolved_split()?;
    let l = BigInt::from(LcmCache::new(n as usize).get(n as usize).clone());
    let limit = &l * harmonic(n as u64)?.ceil() + 1u32;
    let clamp = |v: BigInt| v.max(-&limit).min(limit.clone());
    let lo_int = (lo.numer() * &l).div_floor(lo.denom()) + 1u32;
    let hi_int = {
        let scaled = hi.numer() * &l;
        let (q, r) = scaled.div_mod_floor(hi.denom());
        let ceil = if r.is_zero() { q } else { q + 1u32 };
        clamp(ceil) - 1u32
    };
    let lo_int = clamp(lo_int);
    if lo_int > hi_int {
        return Ok(0);
    }
    if !fits_fixed_width(n, &l, &limit) {
        return Err(Error::Resource {
            what: format!("exact counting at N = {n}"),
            requested: 1u128 << n.min(127),
            cap: max_half_size as u128,
        });
    }
    let a = enumerate_half::<i128>(1, split, &l, max_half_size)?;
    let b = enumerate_half::<i128>(split + 1, n - split, &l, max_half_size)?;
    let lo_i = lo_int.to_i128().expect("clamped");
    let hi_i = hi_int.to_i128().expect("clamped");
    let ys: Vec<i128> = b.numerators().copied().collect();
    let chunk = (a.len() / (4 * rayon::current_num_threads()).max(1)).max(1 << 12);
    let total = a
        .entries
        .par_chunks(chunk)
        .map(|xs| {
            let x0 = xs[0].0;
            // first y with x + y >= lo, and first y with x + y > hi
            let mut p_lo = ys.partition_point(|&y| x0 + y < lo_i);
            let mut p_hi = ys.partition_point(|&y| x0 + y <= hi_i);
            let mut count = 0u64;
            for &(x, _) in xs {
                while p_lo > 0 && x + ys[p_lo - 1] >= lo_i {
                    p_lo -= 1;
                }
                while p_hi > 0 && x + ys[p_hi - 1] > hi_i {
                    p_hi -= 1;
                }
                count += (p_hi - p_lo) as u64;
            }
            count
        })
        .sum();
    Ok(total)
}

/// Cardinality and symmetry of the set of all signed sums of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctSums {
    pub n: u32,
    pub count: u64,
    /// The sorted value list equals its own negation.
    pub symmetric: bool,
}

/// Counts distinct values of `sum s_k / k` by a k-way merge of the
/// deduplicated half tables, checking `S = -S` along the way.
pub fn distinct_sums(n: u32, max_half_size: u64) -> Result<DistinctSums> {
    let split = SearchConfig::new(n)
        .with_max_half_size(max_half_size)
        .resolved_split()?;
    let l = BigInt::from(LcmCache::new(n as usize).get(n as usize).clone());
    if !fits_fixed_width(n, &l, &<BigInt as Zero>::zero()) {
        return Err(Error::Resource {
            what: format!("distinct-sum merge at N = {n}"),
            requested: 1u128 << n.min(127),
            cap: max_half_size as u128,
        });
    }
    let mut a = enumerate_half::<i128>(1, split, &l, max_half_size)?;
    let mut b = enumerate_half::<i128>(split + 1, n - split, &l, max_half_size)?;
    a.dedup();
    b.dedup();
    let (na, nb) = (a.negated(), b.negated());
    let mut up = SumMerge::new(&a, &b);
    let mut down = SumMerge::new(&na, &nb);
    let mut count = 0u64;
    let mut symmetric = true;
    loop {
        match (up.next_distinct(), down.next_distinct()) {
            (None, None) => break,
            (Some(u), Some(d)) => {
                count += 1;
                if u != d {
                    symmetric = false;
                }
            }
            _ => {
                symmetric = false;
                count += 1;
            }
        }
    }
    Ok(DistinctSums { n, count, symmetric })
}

struct SumMerge<'a> {
    xs: Vec<i128>,
    ys: &'a [(i128, u32)],
    heap: BinaryHeap<Reverse<(i128, usize, usize)>>,
    last: Option<i128>,
}

impl<'a> SumMerge<'a> {
    fn new(a: &HalfSumTable<i128>, b: &'a HalfSumTable<i128>) -> Self {
        let xs: Vec<i128> = a.numerators().copied().collect();
        let ys = &b.entries[..];
        let heap = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Reverse((x + ys[0].0, i, 0)))
            .collect();
        SumMerge { xs, ys, heap, last: None }
    }

    fn next_distinct(&mut self) -> Option<i128> {
        while let Some(Reverse((v, i, j))) = self.heap.pop() {
            if j + 1 < self.ys.len() {
                self.heap.push(Reverse((self.xs[i] + self.ys[j + 1].0, i, j + 1)));
            }
            if self.last.map_or(Ordering::Less, |p| p.cmp(&v)) == Ordering::Less {
                self.last = Some(v);
                return Some(v);
            }
        }
        None
    }
}
