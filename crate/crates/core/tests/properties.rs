use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use signed_harmonics::bounds_lab;
use signed_harmonics::density::{self, DistributionQuery};
use signed_harmonics::exact_core::{harmonic, numerator_over_lcm, signed_sum};
use signed_harmonics::greedy::{self, GreedyTarget};
use signed_harmonics::minsearch::{self, SearchConfig};
use signed_harmonics::{ExactRational, SignVector};

fn rational() -> impl Strategy<Value = ExactRational> {
    (1i64..=120).prop_flat_map(|q| (-2 * q..=2 * q, Just(q))).prop_map(|(p, q)| ExactRational::from_ratio(p, q))
}

fn signs(max_len: usize) -> impl Strategy<Value = SignVector> {
    prop::collection::vec(prop::bool::ANY, 1..=max_len)
        .prop_map(|v| SignVector::new(v.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap())
}

fn lcm_upto(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}

/// Sign rule replayed in exact rationals.
fn greedy_oracle(tau: &BigRational, n_max: u64) -> Vec<i8> {
    let mut sigma = BigRational::zero();
    (1..=n_max)
        .map(|n| {
            let step = BigRational::new(BigInt::one(), BigInt::from(n));
            if sigma <= *tau {
                sigma += step;
                1
            } else {
                sigma -= step;
                -1
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_agrees_with_exhaustive_scan(n in 1u32..=16, tau in rational(), split in 0u32..=16) {
        let brute = minsearch::brute_force_min(n, &tau).unwrap();
        let cfg = SearchConfig::new(n).with_tau(tau.clone()).with_split(split.clamp(1, n));
        let got = minsearch::min_abs(&cfg).unwrap();
        prop_assert_eq!(&got.m_value, &brute.m_value);
        prop_assert_eq!(got.witness, brute.witness);
    }

    #[test]
    fn witness_reproduces_minimum(n in 1u32..=30, tau in rational()) {
        let r = minsearch::min_abs(&SearchConfig::new(n).with_tau(tau.clone())).unwrap();
        prop_assert_eq!(r.witness.len(), n as usize);
        prop_assert_eq!((&signed_sum(&r.witness) - &tau).abs(), r.m_value);
    }

    #[test]
    fn minimum_is_at_least_one_over_lcm(n in 1u32..=32) {
        let r = minsearch::min_abs(&SearchConfig::new(n)).unwrap();
        prop_assert!(r.m_times_lcm >= ExactRational::one());
        prop_assert!(r.m_times_lcm.is_integer());
        prop_assert!(r.m_times_lcm.numer().is_odd());
    }

    #[test]
    fn numerators_over_lcm_are_odd(s in signs(150)) {
        let l = lcm_upto(s.len());
        let num = numerator_over_lcm(&s, &l).unwrap();
        prop_assert!(num.is_odd());
        let direct = signed_sum(&s);
        prop_assert_eq!(direct.as_big_rational(), &BigRational::new(num, l));
    }

    #[test]
    fn negating_signs_negates_the_sum(s in signs(60)) {
        prop_assert_eq!(signed_sum(&s.negated()), -signed_sum(&s));
        prop_assert!(signed_sum(&s).abs() <= harmonic(s.len() as u64).unwrap());
    }

    #[test]
    fn greedy_follows_sign_rule(tau in rational(), n_max in 1u64..=400) {
        let run = greedy::greedy_run(&GreedyTarget::Rational(tau.clone()), n_max, 256).unwrap();
        prop_assert_eq!(run.signs.entries(), &greedy_oracle(tau.as_big_rational(), n_max)[..]);
        prop_assert!(run.sign_rule_holds());
        let exact = greedy::greedy_run_exact(&tau, n_max).unwrap();
        prop_assert_eq!(exact.signs, run.signs);
    }

    #[test]
    fn greedy_stays_in_envelope(tau in rational(), n_max in 10u64..=3000) {
        let run = greedy::greedy_run(&GreedyTarget::Rational(tau), n_max, 256).unwrap();
        prop_assert!(run.envelope_violations(10).is_empty());
    }

    #[test]
    fn rho_is_even_and_bounded(x in -50.0f64..50.0, n in 1u64..=200) {
        let a = density::rho_n(x, n).unwrap();
        let b = density::rho_n(-x, n).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.abs() <= 1.0);
    }

    #[test]
    fn exact_probability_matches_enumeration(n in 1u32..=12, a in -3.0f64..3.0, w in 0.0f64..3.0) {
        let b = a + w;
        let p = density::distribution_probability(&DistributionQuery::exact(n, a, b)).unwrap();
        let lo = BigRational::from_float(a).unwrap();
        let hi = BigRational::from_float(b).unwrap();
        let mut hits = 0u64;
        for pat in 0u64..1 << n {
            let s = signed_sum(&SignVector::from_pattern(n as usize, pat));
            let v = s.as_big_rational();
            if *v > lo && *v < hi {
                hits += 1;
            }
        }
        prop_assert_eq!(p.count, hits);
        prop_assert_eq!(p.probability, hits as f64 / (1u64 << n) as f64);
    }

    #[test]
    fn interval_probability_is_symmetric(n in 1u32..=18, a in -3.0f64..3.0, w in 0.0f64..3.0) {
        let p = density::distribution_probability(&DistributionQuery::exact(n, a, a + w)).unwrap();
        let q = density::distribution_probability(&DistributionQuery::exact(n, -a - w, -a)).unwrap();
        prop_assert_eq!(p.count, q.count);
    }

    #[test]
    fn partial_fractions_hold(m in 0u32..=15, p in -400i64..400, q in 1i64..40) {
        prop_assume!(!(p % q == 0 && p <= 0 && -p / q <= m as i64));
        let c = bounds_lab::partial_fraction_identity(m, &ExactRational::from_ratio(p, q)).unwrap();
        prop_assert!(c.equal);
    }

    #[test]
    fn power_gap_is_bounded(n in 1u64..5000, k in 1u32..=25) {
        let g = bounds_lab::power_vs_factorial_gap(n, k).unwrap();
        prop_assert!(g.holds);
        prop_assert!(!g.gap.as_big_rational().is_negative());
    }

    #[test]
    fn tuple_blocks_are_disjoint_for_admissible_pairs(k1 in 1u64..50_000, k2 in 1u64..50_000) {
        prop_assume!(k1 != k2 && bounds_lab::is_admissible(k1) && bounds_lab::is_admissible(k2));
        let b1: Vec<u64> = bounds_lab::TUPLE_MULTIPLIERS.iter().map(|m| m * k1).collect();
        prop_assert!(bounds_lab::TUPLE_MULTIPLIERS.iter().all(|m| !b1.contains(&(m * k2))));
    }
}

#[test]
fn distinct_sums_are_symmetric() {
    for n in 1..=18u32 {
        let d = minsearch::distinct_sums(n, minsearch::DEFAULT_MAX_HALF_SIZE).unwrap();
        assert!(d.symmetric, "N = {n}");
        assert!(d.count <= 1 << n);
    }
}
