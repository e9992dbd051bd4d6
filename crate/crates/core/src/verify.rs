//! Verification suites behind `signed-harmonics verify`.
//!
//! Each check reports pass/fail with a short numeric detail. Details never
//! include timings, so a suite's output is byte-identical across runs and
//! thread counts.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bigfloat;
use crate::bounds_lab::{self, BoundProbe};
use crate::density::{self, DistributionQuery, GaussianBump, QuadratureSpec};
use crate::error::{Error, Result};
use crate::exact_core::{harmonic, numerator_over_lcm, ExactRational, LcmCache, SignVector};
use crate::greedy::{self, GreedyTarget, NamedConstant};
use crate::minsearch::{brute_force_min, min_abs, SearchConfig, SearchResult, REFERENCE_TABLE};
use crate::output::format_real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Table,
    Lemmas,
    Density,
    Greedy,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Table => "table",
            Suite::Lemmas => "lemmas",
            Suite::Density => "density",
            Suite::Greedy => "greedy",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Suite::Table),
            "lemmas" => Ok(Suite::Lemmas),
            "density" => Ok(Suite::Density),
            "greedy" => Ok(Suite::Greedy),
            "all" => Ok(Suite::All),
            _ => Err(Error::Parse(format!(
                "unknown suite '{s}' (table, lemmas, density, greedy, all)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

struct Report {
    suite: &'static str,
    out: Vec<CheckOutcome>,
}

impl Report {
    fn new(suite: &'static str) -> Self {
        Report { suite, out: Vec::new() }
    }

    fn add(&mut self, check: &str, passed: bool, detail: impl Into<String>) {
        self.out.push(CheckOutcome {
            suite: self.suite,
            check: check.into(),
            passed,
            detail: detail.into(),
        });
    }
}

pub const VERIFY_SEED: u64 = 20240229;

pub fn run_suite(suite: Suite, max_half_size: u64) -> Result<Vec<CheckOutcome>> {
    match suite {
        Suite::Table => table_suite(max_half_size),
        Suite::Lemmas => lemma_suite(),
        Suite::Density => density_suite(),
        Suite::Greedy => greedy_suite(),
        Suite::All => {
            let mut v = table_suite(max_half_size)?;
            v.extend(lemma_suite()?);
            v.extend(density_suite()?);
            v.extend(greedy_suite()?);
            Ok(v)
        }
    }
}

/// `count` rationals `p/q` in `[-2, 2]` with `q <= 60`.
pub fn random_targets(count: usize, seed: u64) -> Vec<ExactRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q: i64 = rng.gen_range(1..=60);
            let p: i64 = rng.gen_range(-2 * q..=2 * q);
            ExactRational::from_ratio(p, q)
        })
        .collect()
}

fn table_suite(max_half_size: u64) -> Result<Vec<CheckOutcome>> {
    let mut r = Report::new("table");
    let results: Vec<SearchResult> = (1..=40)
        .map(|n| min_abs(&SearchConfig::new(n).with_max_half_size(max_half_size)))
        .collect::<Result<_>>()?;
    let mismatches: Vec<u32> = results
        .iter()
        .filter(|res| res.m_times_lcm != ExactRational::from_integer(REFERENCE_TABLE[res.n as usize - 1]))
        .map(|res| res.n)
        .collect();
    r.add(
        "golden-table-n40",
        mismatches.is_empty(),
        format!("{} of 40 rows match; mismatches {mismatches:?}", 40 - mismatches.len()),
    );

    let mut taus = vec![ExactRational::zero()];
    taus.extend(random_targets(50, VERIFY_SEED));
    let mut oracle_fail = Vec::new();
    let mut split_fail = Vec::new();
    for n in 1..=20u32 {
        let splits: Vec<u32> = [n / 3, n / 2, 2 * n / 3].iter().map(|&s| s.clamp(1, n)).collect();
        for tau in &taus {
            let brute = brute_force_min(n, tau)?;
            let cfg = SearchConfig::new(n).with_tau(tau.clone()).with_max_half_size(max_half_size);
            if min_abs(&cfg)?.m_value != brute.m_value {
                oracle_fail.push(format!("{n}@{tau}"));
            }
            for &s in &splits {
                if min_abs(&cfg.clone().with_split(s))?.m_value != brute.m_value {
                    split_fail.push(format!("{n}@{tau}/R={s}"));
                }
            }
        }
    }
    r.add(
        "oracle-equivalence",
        oracle_fail.is_empty(),
        format!("N <= 20 x {} targets; failures {oracle_fail:?}", taus.len()),
    );
    r.add(
        "split-independence",
        split_fail.is_empty(),
        format!("R in floor(N/3), floor(N/2), floor(2N/3); failures {split_fail:?}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED + 1);
    let mut even = Vec::new();
    for n in [10usize, 50, 100] {
        let l = BigInt::from(LcmCache::new(n).get(n).clone());
        for _ in 0..1000 {
            let s = SignVector::new((0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect())?;
            if numerator_over_lcm(&s, &l)?.is_even() {
                even.push(n);
            }
        }
    }
    let below = results.iter().filter(|res| res.m_times_lcm < ExactRational::one()).count();
    r.add(
        "parity",
        even.is_empty() && below == 0,
        format!("3000 random vectors, {} even numerators; {below} computed N with m_N L_N < 1", even.len()),
    );

    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for res in &results[9..] {
        let n = res.n as f64;
        let log_m = bigfloat::ln_rational(&res.m_value);
        let log_bound = -(n.ln() * n.ln()) / 4f64.ln();
        worst = worst.max(log_m - log_bound);
        if log_m >= log_bound {
            violations.push(res.n);
        }
    }
    r.add(
        "upper-bound-10-40",
        violations.is_empty(),
        format!("max log m_N - bound = {}; violations {violations:?}", format_real(round6(worst))),
    );

    let same = results[18].m_value == results[19].m_value && results[19].m_value == results[20].m_value;
    r.add("repeat-19-21", same, format!("m_19 = m_20 = m_21 = {}", results[18].m_value));

    let rises: Vec<u32> = results
        .windows(2)
        .filter(|w| w[1].m_value > w[0].m_value)
        .map(|w| w[0].n)
        .collect();
    r.add(
        "not-monotone",
        !rises.is_empty(),
        format!("m_(N+1) > m_N at N = {rises:?}"),
    );
    Ok(r.out)
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn lemma_suite() -> Result<Vec<CheckOutcome>> {
    let mut r = Report::new("lemmas");
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED + 2);
    let mut id_fail = 0;
    let mut id_total = 0;
    for m in 0..=12u32 {
        let mut done = 0;
        while done < 50 {
            let q: i64 = rng.gen_range(1..=97);
            let p: i64 = rng.gen_range(-40 * q..=40 * q);
            let x = ExactRational::from_ratio(p, q);
            if x.is_integer() && p <= 0 && -p / q <= m as i64 {
                continue;
            }
            if !bounds_lab::partial_fraction_identity(m, &x)?.equal {
                id_fail += 1;
            }
            done += 1;
            id_total += 1;
        }
    }
    r.add("partial-fractions", id_fail == 0, format!("{id_total} cases, {id_fail} failures"));

    let mut gap_fail = 0;
    for n in 1..=1000u64 {
        for k in 1..=20u32 {
            if !bounds_lab::power_vs_factorial_gap(n, k)?.holds {
                gap_fail += 1;
            }
        }
    }
    r.add("power-vs-rising", gap_fail == 0, format!("n <= 1000, k <= 20, {gap_fail} failures"));

    let probes = bounds_lab::random_rho_probes(1000, VERIFY_SEED + 3);
    let mut rho_fail = 0;
    for p in &probes {
        if !bounds_lab::rho_bound_check(p)?.holds {
            rho_fail += 1;
        }
    }
    r.add("rho-bound", rho_fail == 0, format!("1000 probes, {rho_fail} failures"));

    let mut sw_fail = 0;
    let mut weak_fail = 0;
    for (x, n, d) in bounds_lab::random_sandwich_probes(100, VERIFY_SEED + 4) {
        let s = bounds_lab::sandwich(x, n, d)?;
        if !s.holds_strictly() {
            sw_fail += 1;
        }
        if !(s.lower_strict && s.upper_weak) {
            weak_fail += 1;
        }
    }
    r.add(
        "divisor-sandwich",
        sw_fail == 0,
        format!("100 probes, {sw_fail} strict failures, {weak_fail} non-strict failures"),
    );

    let ram = bounds_lab::ramanujan_ratio_scan(1_000_000, 0.5)?;
    r.add(
        "divisor-power-envelope",
        ram.max_value < 10.0,
        format!("max {} at m = {}", format_real(round6(ram.max_value)), ram.argmax),
    );

    let count = bounds_lab::tuple_value_count();
    r.add("tuple-values", count == 29, format!("{count} distinct values"));
    let disjoint = bounds_lab::tuples_disjoint(1_000_000)?;
    r.add("tuple-disjointness", disjoint, "blocks with 12k <= 10^6");
    let dens = bounds_lab::admissible_density(10_000_000)?;
    r.add(
        "admissible-density",
        (dens.ratio - 1.0).abs() <= 0.05,
        format!("{} vs {}", dens.count, format_real(round6(dens.expected))),
    );
    let mut card_detail = Vec::new();
    let mut card_ok = true;
    for n in 1..=24u32 {
        let c = bounds_lab::cardinality_bound_check(n)?;
        card_ok &= c.symmetric && c.count % 2 == 0 && c.count <= c.two_pow;
        if n == 12 {
            card_ok &= c.count < 4096;
            card_detail.push(format!("#S_12 = {}", c.count));
        }
        if n == 24 {
            card_detail.push(format!("#S_24 = {}", c.count));
        }
    }
    r.add("cardinality-symmetry", card_ok, card_detail.join("; "));

    let mut p = BoundProbe::new((1 << 20) + 1, 10, 0.05, 2f64.powi(200));
    p.a = 4f64.ln();
    let sk = bounds_lab::s_k_lower_bound_check(&p)?;
    r.add(
        "s-k-lower-bound-k10",
        sk.holds,
        format!("count {} vs bound {}", sk.count, format_real(sk.bound.floor())),
    );
    let sweep = bounds_lab::s_k_lower_bound_sweep(8, 16, 20, VERIFY_SEED + 5)?;
    let fails: usize = sweep.rows.iter().map(|row| row.failures).sum();
    r.add(
        "s-k-lower-bound-sweep",
        fails == 0,
        format!("k in 8..=16, 20 probes each, {fails} failures, k_min {:?}", sweep.k_min),
    );
    let f2 = bounds_lab::s_1_floor_check(32, 2, 256.0)?;
    let f3 = bounds_lab::s_1_floor_check(192, 3, 4f64.powi(9))?;
    r.add(
        "s-1-floor",
        f2.holds && f3.holds,
        format!("k=2: {} >= {:.4}; k=3: {} >= {:.4}", f2.count, f2.floor, f3.count, f3.floor),
    );
    Ok(r.out)
}

/// Quadrature tolerance used by the density checks.
pub const DENSITY_TOL: f64 = 1e-8;

fn density_suite() -> Result<Vec<CheckOutcome>> {
    let mut r = Report::new("density");
    let spec = QuadratureSpec::default().with_tol(DENSITY_TOL);
    let g0 = density::g_density(0.0, &spec)?;
    let g2 = density::g_density(2.0, &spec)?;
    r.add("g-at-0", g0 > 0.2499 && g0 < 0.25, format!("g(0) = {}", format_real(g0)));
    r.add("g-at-2", g2 > 0.12499 && g2 <= 0.125, format!("g(2) = {}", format_real(g2)));

    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED + 6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x: f64 = rng.gen_range(-4.0..4.0);
        worst = worst.max((density::g_density(x, &spec)? - density::g_density(-x, &spec)?).abs());
    }
    r.add("g-symmetry", worst <= 2.0 * DENSITY_TOL, format!("max |g(x) - g(-x)| = {worst:e}"));

    let mass = density::g_mass(8.0, &spec)?;
    r.add(
        "g-normalization",
        (mass - 1.0).abs() <= 1e-6,
        format!("mass on [-8, 8] = {}", format_real(mass)),
    );

    let integral = density::g_interval_integral(-0.05, 0.05, &spec)?;
    let mut devs = Vec::new();
    for n in [12u32, 16, 20, 24] {
        let p = density::distribution_probability(&DistributionQuery::exact(n, -0.05, 0.05))?;
        devs.push((n, (p.probability - integral).abs() / integral));
    }
    let last = devs[3].1;
    r.add(
        "local-limit-n24",
        last <= 0.05,
        format!("relative deviation {last:.3e} at N = 24"),
    );
    let decreasing = devs.windows(2).all(|w| w[1].1 < w[0].1);
    let trail: Vec<String> = devs.iter().map(|(n, d)| format!("{n}: {d:.3e}")).collect();
    r.add("local-limit-decreasing", decreasing, trail.join(", "));

    let id = density::expected_value_identity_check(10, &GaussianBump { center: 0.0, width: 1.0 })?;
    r.add("fourier-identity-n10", id.diff <= 1e-8, format!("|lhs - rhs| = {:e}", id.diff));

    let (x, m) = density::rho_n_grid_max(40, 40.0, 64000.0, 200_001)?;
    r.add(
        "rho-40-decay",
        m < 1e-3,
        format!("max |rho_40| on [40, 64000] = {m:.4e} at x = {x:.4}"),
    );

    let mut sym_ok = true;
    for n in [9u32, 14, 20] {
        for (a, b) in [(0.1, 0.7), (-0.3, 1.2), (0.0, 2.0)] {
            let p = density::distribution_probability(&DistributionQuery::exact(n, a, b))?;
            let q = density::distribution_probability(&DistributionQuery::exact(n, -b, -a))?;
            sym_ok &= p.count == q.count;
        }
    }
    r.add("distribution-symmetry", sym_ok, "N in {9, 14, 20}, three intervals");

    let mut top_ok = true;
    for n in [5u32, 12, 22] {
        let h = harmonic(n as u64)?.to_f64();
        let p = density::distribution_probability(&DistributionQuery::exact(n, h - 1e-9, h + 1e-9))?;
        top_ok &= p.count == 1;
    }
    r.add("max-is-harmonic", top_ok, "P(|X_N - H_N| < 1e-9) = 2^-N for N in {5, 12, 22}");
    Ok(r.out)
}

fn greedy_suite() -> Result<Vec<CheckOutcome>> {
    let mut r = Report::new("greedy");
    let targets: Vec<GreedyTarget> = vec![
        NamedConstant::Sqrt2.into(),
        NamedConstant::Log2.into(),
        NamedConstant::EulerGamma.into(),
        ExactRational::zero().into(),
        ExactRational::from_ratio(7, 3).into(),
    ];
    for tau in &targets {
        let run = greedy::greedy_run(tau, (1 << 14) - 1, greedy::DEFAULT_GREEDY_PRECISION)?;
        let viol: Vec<u64> = run.envelope_violations(10).into_iter().filter(|&n| n <= 10_000).collect();
        let proxy = (2..=10_000u64).map(|n| run.ratio(n)).fold(f64::INFINITY, f64::min);
        let blocks = run.dyadic_blocks(13);
        let missing: Vec<u32> = blocks.iter().filter(|b| !b.1).map(|b| b.0).collect();
        r.add(
            &format!("envelope-{tau}"),
            viol.is_empty(),
            format!("N in [10, 10^4], violations {:?}", &viol[..viol.len().min(5)]),
        );
        r.add(
            &format!("decay-proxy-{tau}"),
            proxy <= -0.5,
            format!("min log r / (log N)^2 = {}", format_real(round6(proxy))),
        );
        r.add(
            &format!("dyadic-blocks-{tau}"),
            blocks.len() == 14 && missing.is_empty(),
            format!("{} blocks, without a large residual {missing:?}", blocks.len()),
        );
        r.add(&format!("sign-rule-{tau}"), run.sign_rule_holds(), "signs re-derived from residuals");
    }
    let mut panel_bad = Vec::new();
    for tau in greedy::standard_panel() {
        let run = greedy::greedy_run(&tau, 10_000, greedy::DEFAULT_GREEDY_PRECISION)?;
        if !run.envelope_violations(10).is_empty() {
            panel_bad.push(tau.to_string());
        }
    }
    r.add("envelope-panel", panel_bad.is_empty(), format!("20 targets, failing {panel_bad:?}"));
    let mut exact_bad = Vec::new();
    for tau in [ExactRational::zero(), ExactRational::from_ratio(7, 3), ExactRational::from_ratio(-5, 7)] {
        let exact = greedy::greedy_run_exact(&tau, 2000)?;
        let float = greedy::greedy_run(&tau.clone().into(), 2000, greedy::DEFAULT_GREEDY_PRECISION)?;
        if exact.signs != float.signs {
            exact_bad.push(tau.to_string());
        }
    }
    r.add("exact-agreement", exact_bad.is_empty(), format!("N <= 2000, mismatches {exact_bad:?}"));
    Ok(r.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in [Suite::Table, Suite::Lemmas, Suite::Density, Suite::Greedy, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("tables".parse::<Suite>().is_err());
    }

    #[test]
    fn random_targets_are_seeded_and_bounded() {
        let a = random_targets(50, 3);
        assert_eq!(a, random_targets(50, 3));
        let two = ExactRational::from_integer(2);
        assert!(a.iter().all(|t| t.abs() <= two));
    }
}
