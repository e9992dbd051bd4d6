//! Helpers around [`astro_float::BigFloat`]: conversions from exact values,
//! a per-thread constant cache, and the handful of named constants the
//! greedy and lcm code need.

use std::cell::RefCell;

pub use astro_float::BigFloat;
use astro_float::{Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::Signed;

use crate::exact_core::ExactRational;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 128;

pub const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache allocation"));
}

/// Runs `f` with this thread's constant cache.
pub fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

pub fn from_f64(x: f64, precision: usize) -> BigFloat {
    BigFloat::from_f64(x, precision)
}

pub fn from_u64(x: u64, precision: usize) -> BigFloat {
    BigFloat::from_u64(x, precision)
}

/// Converts an integer; exact when `precision` covers its bit length.
pub fn from_biguint(v: &BigUint, precision: usize) -> BigFloat {
    let words = v.to_u64_digits();
    if words.is_empty() {
        return BigFloat::from_u64(0, precision);
    }
    let e = (words.len() * 64) as i32;
    let mut f = BigFloat::from_words(&words, Sign::Pos, e);
    if f.mantissa_max_bit_len().unwrap_or(0) != precision {
        f.set_precision(precision, RM).expect("precision change");
    }
    f
}

pub fn from_bigint(v: &BigInt, precision: usize) -> BigFloat {
    let f = from_biguint(v.magnitude(), precision);
    if v.is_negative() {
        f.neg()
    } else {
        f
    }
}

/// Correctly rounded `num / den`.
pub fn from_rational(r: &ExactRational, precision: usize) -> BigFloat {
    let guard = precision + 64;
    let num_bits = r.numer().bits() as usize + 64;
    let den_bits = r.denom().bits() as usize + 64;
    let num = from_bigint(r.numer(), num_bits.max(guard));
    let den = from_bigint(r.denom(), den_bits.max(guard));
    num.div(&den, precision, RM)
}

/// Nearest `f64` (truncating below the second mantissa word).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let (words, _, sign, exponent, _) = x.as_raw_parts().expect("finite value");
    let top = words[words.len() - 1] as f64;
    let next = if words.len() >= 2 {
        words[words.len() - 2] as f64
    } else {
        0.0
    };
    // value = 0.m * 2^e with m read as a fraction of the top word
    let mant = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let v = ldexp(mant, exponent);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Natural logarithm of a positive integer, evaluated at 128 bits and
/// returned as `f64`.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let p = DEFAULT_PRECISION.max(v.bits() as usize + 64);
    let f = from_biguint(v, p);
    to_f64(&with_consts(|cc| f.ln(DEFAULT_PRECISION, RM, cc)))
}

/// Natural logarithm of a positive rational at 128 bits.
pub fn ln_rational(r: &ExactRational) -> f64 {
    let f = from_rational(r, DEFAULT_PRECISION + 64);
    to_f64(&with_consts(|cc| f.ln(DEFAULT_PRECISION, RM, cc)))
}

pub fn ln(x: &BigFloat, precision: usize) -> BigFloat {
    with_consts(|cc| x.ln(precision, RM, cc))
}

pub fn exp(x: &BigFloat, precision: usize) -> BigFloat {
    with_consts(|cc| x.exp(precision, RM, cc))
}

pub fn cos(x: &BigFloat, precision: usize) -> BigFloat {
    with_consts(|cc| x.cos(precision, RM, cc))
}

pub fn pi(precision: usize) -> BigFloat {
    with_consts(|cc| cc.pi(precision, RM))
}

pub fn e(precision: usize) -> BigFloat {
    with_consts(|cc| cc.e(precision, RM))
}

pub fn ln_2(precision: usize) -> BigFloat {
    with_consts(|cc| cc.ln_2(precision, RM))
}

pub fn sqrt_2(precision: usize) -> BigFloat {
    BigFloat::from_u64(2, precision).sqrt(precision, RM)
}

/// Euler–Mascheroni constant by the Brent–McMillan series.
///
/// With `m` chosen so that `e^{-4m} < 2^{-precision}`, the ratio of the two
/// Bessel-type sums gives the constant to the requested precision.
pub fn euler_gamma(precision: usize) -> BigFloat {
    let w = precision + 64;
    let m = ((precision as f64) * std::f64::consts::LN_2 / 4.0).ceil() as u64 + 2;
    let terms = (3.6 * m as f64).ceil() as u64 + 8;
    let mf = BigFloat::from_u64(m, w);
    let m2 = mf.mul(&mf, w, RM);
    let mut a = ln(&mf, w).neg();
    let mut b = BigFloat::from_u64(1, w);
    let mut u = a.clone();
    let mut v = b.clone();
    for k in 1..=terms {
        let kf = BigFloat::from_u64(k, w);
        let k2 = kf.mul(&kf, w, RM);
        b = b.mul(&m2, w, RM).div(&k2, w, RM);
        a = a.mul(&m2, w, RM).div(&kf, w, RM).add(&b, w, RM).div(&kf, w, RM);
        u = u.add(&a, w, RM);
        v = v.add(&b, w, RM);
    }
    let mut g = u.div(&v, w, RM);
    g.set_precision(precision, RM).expect("precision change");
    g
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &BigFloat, digits: usize) -> String {
    let bits = ((digits as f64) * 3.3219280948873626).ceil() as usize + 8;
    let mut y = x.clone();
    y.set_precision(bits.max(64), RM).expect("precision change");
    with_consts(|cc| y.format(astro_float::Radix::Dec, RM, cc))
        .unwrap_or_else(|_| format!("{:e}", to_f64(x)))
}
