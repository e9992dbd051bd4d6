//! Exact arithmetic foundation: harmonic numbers, `lcm{1..n}`, signed sums
//! and the odd-numerator fact that keeps every signed sum away from zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::{self, BigFloat, RM};
use crate::error::{Error, Result};

/// An exact rational number, always stored reduced with a positive
/// denominator so that equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den)).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    /// The exact value of a finite `f64` (every float is a dyadic rational).
    pub fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(ExactRational)
            .ok_or_else(|| Error::domain(format!("{x} is not finite")))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big_rational(self) -> BigRational {
        self.0
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("reciprocal of zero"));
        }
        Ok(ExactRational(self.0.recip()))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            bigfloat::to_f64(&bigfloat::from_rational(self, 64))
        })
    }

    pub fn to_bigfloat(&self, precision: usize) -> BigFloat {
        bigfloat::from_rational(self, precision)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        ExactRational::from_integer(v)
    }
}

impl fmt::Display for ExactRational {
    /// `p` for integers, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `p/q`, integers, and decimal literals such as `-0.125` or
    /// `1.5e-3`; all are converted exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return ExactRational::new(p, q).map_err(|_| bad());
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let mut value = if scale >= 0 {
            BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
        };
        if neg {
            value = -value;
        }
        Ok(ExactRational(value))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactRational", 2)?;
        st.serialize_field("num", &self.numer().to_string())?;
        st.serialize_field("den", &self.denom().to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: String,
            den: String,
        }
        let raw = Raw::deserialize(d)?;
        let num: BigInt = raw.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = raw.den.parse().map_err(serde::de::Error::custom)?;
        ExactRational::new(num, den).map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

/// A choice of signs `(s_1, ..., s_N)`, each `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("sign vector must have length >= 1"));
        }
        if let Some(bad) = entries.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::domain(format!("sign entries must be +1 or -1, got {bad}")));
        }
        Ok(SignVector(entries))
    }

    pub fn all_plus(n: usize) -> Self {
        SignVector(vec![1; n.max(1)])
    }

    /// Alternating `+1, -1, +1, ...`.
    pub fn alternating(n: usize) -> Self {
        SignVector((0..n.max(1)).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect())
    }

    /// Builds from a bit pattern: bit `i` set means entry `i` is `-1`.
    pub fn from_pattern(len: usize, pattern: u64) -> Self {
        SignVector((0..len).map(|i| if pattern >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    /// Sign of `s_n` for 1-based `n`.
    pub fn sign(&self, n: usize) -> i8 {
        self.0[n - 1]
    }

    pub fn negated(&self) -> Self {
        SignVector(self.0.iter().map(|s| -s).collect())
    }

    pub fn concat(&self, other: &SignVector) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SignVector(v)
    }
}

impl fmt::Display for SignVector {
    /// Renders as a string of `+` and `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::Parse(format!("sign strings use '+' and '-', got {c:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        SignVector::new(entries)
    }
}

/// `L_n = lcm{1, ..., n}` for all `n <= n_max`, built by prime-power
/// detection.
#[derive(Clone, Debug)]
pub struct LcmCache {
    values: Vec<BigUint>,
}

impl LcmCache {
    pub fn new(n_max: usize) -> Self {
        let n_max = n_max.max(1);
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(BigUint::one()); // L_0, unused
        values.push(BigUint::one());
        let bases = prime_power_bases(n_max);
        for n in 2..=n_max {
            let prev = &values[n - 1];
            let next = match bases[n] {
                0 => prev.clone(),
                p => prev * p,
            };
            values.push(next);
        }
        LcmCache { values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> &BigUint {
        &self.values[n]
    }
}

/// `bases[n] = p` when `n = p^k` for a prime `p`, else `0`.
pub fn prime_power_bases(n_max: usize) -> Vec<u32> {
    let mut bases = vec![0u32; n_max + 1];
    let mut composite = vec![false; n_max + 1];
    for p in 2..=n_max {
        if composite[p] {
            continue;
        }
        let mut m = p * p;
        while m <= n_max {
            composite[m] = true;
            m += p;
        }
        let mut q = p;
        loop {
            bases[q] = p as u32;
            match q.checked_mul(p) {
                Some(next) if next <= n_max => q = next,
                _ => break,
            }
        }
    }
    bases
}

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> Result<ExactRational> {
    if n == 0 {
        return Err(Error::domain("harmonic number needs n >= 1"));
    }
    let l = BigInt::from(lcm_upto(n)?);
    let num = (1..=n).fold(BigInt::zero(), |acc, k| acc + &l / k);
    ExactRational::new(num, l)
}

pub fn lcm_upto(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("lcm_upto needs n >= 1"));
    }
    Ok(LcmCache::new(n as usize).get(n as usize).clone())
}

/// `sigma_N = sum s_n / n`, exact.
pub fn signed_sum(signs: &SignVector) -> ExactRational {
    let n = signs.len() as u64;
    let l = BigInt::from(lcm_upto(n).expect("nonempty sign vector"));
    let num = numerator_over_lcm(signs, &l).expect("L_N is divisible by every n <= N");
    ExactRational::new(num, l).expect("positive denominator")
}

/// The integer `sum (L / n) s_n`. With `L = L_N` it is always odd.
pub fn numerator_over_lcm(signs: &SignVector, l: &BigInt) -> Result<BigInt> {
    if !l.is_positive() {
        return Err(Error::domain("L must be positive"));
    }
    let mut acc = BigInt::zero();
    for (i, &s) in signs.entries().iter().enumerate() {
        let n = BigInt::from(i as u64 + 1);
        let (q, r) = l.div_rem(&n);
        if !r.is_zero() {
            return Err(Error::domain(format!("L = {l} is not divisible by {n}")));
        }
        if s > 0 {
            acc += q;
        } else {
            acc -= q;
        }
    }
    Ok(acc)
}

/// Chebyshev's `psi(n) = sum_{p^k <= n} log p` at `precision` bits.
pub fn chebyshev_psi(n: u64, precision: usize) -> BigFloat {
    let w = precision + 32;
    let bases = prime_power_bases(n as usize);
    let mut acc = BigFloat::from_u64(0, w);
    for &p in bases.iter().filter(|&&p| p != 0) {
        let lp = bigfloat::ln(&BigFloat::from_u64(p as u64, w), w);
        acc = acc.add(&lp, w, RM);
    }
    let mut out = acc;
    out.set_precision(precision, RM).expect("precision change");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gcd_fold_lcm(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), ExactRational::from_ratio(1, 1));
        assert_eq!(harmonic(2).unwrap(), ExactRational::from_ratio(3, 2));
        assert_eq!(harmonic(4).unwrap(), ExactRational::from_ratio(25, 12));
        assert!(matches!(harmonic(0), Err(Error::Domain(_))));
    }

    #[test]
    fn harmonic_increments_by_reciprocal() {
        let mut prev = harmonic(1).unwrap();
        for n in 2..=200i64 {
            let h = harmonic(n as u64).unwrap();
            assert_eq!(&h - &prev, ExactRational::from_ratio(1, n));
            prev = h;
        }
    }

    #[test]
    fn lcm_matches_gcd_folding() {
        assert_eq!(lcm_upto(1).unwrap(), BigUint::from(1u32));
        assert_eq!(lcm_upto(5).unwrap(), BigUint::from(60u32));
        assert_eq!(lcm_upto(10).unwrap(), BigUint::from(2520u32));
        let cache = LcmCache::new(300);
        for n in 1..=300u64 {
            assert_eq!(cache.get(n as usize), &gcd_fold_lcm(n), "n = {n}");
        }
    }

    #[test]
    fn lcm_steps_are_prime_powers() {
        let cache = LcmCache::new(500);
        let bases = prime_power_bases(500);
        for (n, &base) in bases.iter().enumerate().skip(2) {
            let ratio = cache.get(n) / cache.get(n - 1);
            let expected = if base == 0 { 1 } else { base };
            assert_eq!(ratio, BigUint::from(expected), "n = {n}");
        }
    }

    #[test]
    fn signed_sum_examples() {
        assert_eq!(signed_sum(&"+".parse().unwrap()), ExactRational::from_ratio(1, 1));
        assert_eq!(signed_sum(&"+-".parse().unwrap()), ExactRational::from_ratio(1, 2));
        assert_eq!(signed_sum(&SignVector::all_plus(4)), harmonic(4).unwrap());
    }

    #[test]
    fn numerator_examples() {
        let one = numerator_over_lcm(&"+".parse().unwrap(), &BigInt::from(1)).unwrap();
        assert_eq!(one, BigInt::from(1));
        let seven = numerator_over_lcm(&"+-+-".parse().unwrap(), &BigInt::from(12)).unwrap();
        assert_eq!(seven, BigInt::from(7));
        assert!(numerator_over_lcm(&"+-+-".parse().unwrap(), &BigInt::from(10)).is_err());
    }

    #[test]
    fn alternating_sum_tracks_log2() {
        let l = BigInt::from(lcm_upto(2000).unwrap());
        let ln2 = std::f64::consts::LN_2;
        let mut num = BigInt::zero();
        for n in 1..=2000u64 {
            let term = &l / n;
            if n % 2 == 1 {
                num += term;
            } else {
                num -= term;
            }
            if n % 97 == 0 || n == 2000 {
                let v = ExactRational::new(num.clone(), l.clone()).unwrap();
                assert!((v.to_f64() - ln2).abs() <= 1.0 / n as f64, "n = {n}");
                assert_eq!(v, signed_sum(&SignVector::alternating(n as usize)));
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(bigfloat::to_f64(&chebyshev_psi(1, 128)), 0.0);
        assert_eq!(bigfloat::to_f64(&chebyshev_psi(2, 128)), std::f64::consts::LN_2);
        let psi10 = bigfloat::to_f64(&chebyshev_psi(10, 128));
        assert!((psi10 - 2520f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn psi_exponentiates_to_lcm() {
        let precision = 192;
        for n in [17u64, 100, 1000, 10_000] {
            let psi = chebyshev_psi(n, precision);
            let l = bigfloat::from_biguint(&lcm_upto(n).unwrap(), precision + 64);
            let lnl = bigfloat::ln(&l, precision);
            let diff = bigfloat::to_f64(&psi.sub(&lnl, precision, RM)).abs();
            let rel = diff / bigfloat::to_f64(&psi);
            assert!(rel < 2f64.powi(-(precision as i32) + 8), "n = {n}: rel {rel:e}");
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("3/6".parse::<ExactRational>().unwrap(), ExactRational::from_ratio(1, 2));
        assert_eq!("-0.125".parse::<ExactRational>().unwrap(), ExactRational::from_ratio(-1, 8));
        assert_eq!("1.5e-3".parse::<ExactRational>().unwrap(), ExactRational::from_ratio(3, 2000));
        assert_eq!("12".parse::<ExactRational>().unwrap(), ExactRational::from_integer(12));
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("pi".parse::<ExactRational>().is_err());
        assert_eq!(ExactRational::from_ratio(-7, 3).to_string(), "-7/3");
    }

    #[test]
    fn sign_vector_validation() {
        assert!(SignVector::new(vec![]).is_err());
        assert!(SignVector::new(vec![1, 0]).is_err());
        let v: SignVector = "+--+".parse().unwrap();
        assert_eq!(v.to_string(), "+--+");
        assert_eq!(SignVector::from_pattern(4, 0b0110), v);
    }

    proptest! {
        #[test]
        fn numerator_over_lcm_is_odd(
            entries in prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 1..=100)
        ) {
            let signs = SignVector::new(entries).unwrap();
            let l = BigInt::from(lcm_upto(signs.len() as u64).unwrap());
            let num = numerator_over_lcm(&signs, &l).unwrap();
            prop_assert!(num.is_odd());
            let sum = signed_sum(&signs);
            prop_assert_eq!(sum.abs(), ExactRational::new(num.abs(), l.clone()).unwrap());
            prop_assert!(sum.abs() >= ExactRational::new(BigInt::one(), l).unwrap());
        }

        #[test]
        fn rational_json_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = ExactRational::from_ratio(p, q);
            let s = serde_json::to_string(&r).unwrap();
            prop_assert_eq!(serde_json::from_str::<ExactRational>(&s).unwrap(), r);
        }
    }
}
