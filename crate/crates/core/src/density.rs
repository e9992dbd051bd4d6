//! The product `rho_N(x) = prod_{n<=N} cos(pi x / n)`, its limit `rho`, the
//! density `g` of `X = sum s_n / n` with random signs, and the distribution
//! of the finite sums `X_N`.
//!
//! Everything here is evaluated in `f64`. `rho` is oscillation-bounded and
//! collapses double-exponentially, so the quadrature for `g` needs care
//! with panels rather than extra bits.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_core::ExactRational;
use crate::minsearch::{count_in_open_interval, DEFAULT_MAX_HALF_SIZE};

/// `cos(pi y)`, exactly zero at half-integers.
pub fn cospi(y: f64) -> f64 {
    let mut r = y.abs() % 2.0;
    if r > 1.0 {
        r = 2.0 - r;
    }
    let (r, sign) = if r > 0.5 { (1.0 - r, -1.0) } else { (r, 1.0) };
    if r == 0.5 {
        return 0.0;
    }
    let v = if r > 0.25 { (PI * (0.5 - r)).sin() } else { (PI * r).cos() };
    sign * v
}

/// `prod_{k=1}^{n} cos(pi x / k)`.
pub fn rho_n(x: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("rho_N needs N >= 1"));
    }
    Ok(rho_partial(x, 1, n))
}

fn rho_partial(x: f64, from: u64, to: u64) -> f64 {
    let mut p = 1.0;
    for k in from..=to {
        p *= cospi(x / k as f64);
        if p == 0.0 {
            break;
        }
    }
    p
}

/// Even Bernoulli numbers `B_2, B_4, ..., B_30`.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Coefficients of `-log cos z = sum_k c_k z^{2k}`:
/// `c_k = 2^{2k-1} (2^{2k} - 1) |B_{2k}| / (k (2k)!)`.
fn log_cos_coefficients() -> [f64; 15] {
    let mut c = [0.0; 15];
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = i as i32 + 1;
        let two_k = 2.0f64.powi(2 * k);
        c[i] = two_k / 2.0 * (two_k - 1.0) * b.abs() / (k as f64 * factorial(2 * k as u32));
    }
    c
}

/// Hurwitz zeta `sum_{j>=0} (a+j)^{-s}` for `s >= 2`, `a >= 16`, by
/// Euler-Maclaurin at the left endpoint.
fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    let mut total = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)...(s+2i-2) times a^{-s-2i+1} / (2i)!
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (i, b) in BERNOULLI.iter().take(10).enumerate() {
        let i = i as u32 + 1;
        let term = b / factorial(2 * i) * rising * power;
        total += term;
        if term.abs() < 1e-18 * total.abs() {
            break;
        }
        rising *= (s + 2.0 * i as f64 - 1.0) * (s + 2.0 * i as f64);
        power /= a * a;
    }
    total
}

/// Where the direct product stops in [`rho_inf`].
pub fn rho_truncation(x: f64) -> u64 {
    64u64.max((4.0 * PI * x.abs()).ceil() as u64)
}

/// `rho(x) = prod_{n>=1} cos(pi x / n)`.
///
/// The product is taken directly up to `rho_truncation(x)`; the remaining
/// factors have arguments below `1/4` and enter through
/// `exp(-sum_k c_k (pi x)^{2k} zeta(2k, N+1))`, which converges
/// geometrically with ratio below `(2 / (4 pi))^2`. The result is
/// accurate to a few hundred ulps relative to `|rho(x)|`, which is far
/// inside any `tol` accepted here.
pub fn rho_inf(x: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    let n = rho_truncation(x);
    let head = rho_partial(x, 1, n);
    if head == 0.0 {
        return Ok(0.0);
    }
    Ok(head * rho_tail_factor(x, n))
}

fn rho_tail_factor(x: f64, n: u64) -> f64 {
    let z2 = (PI * x) * (PI * x);
    let a = n as f64 + 1.0;
    let mut log_tail = 0.0;
    let mut zk = z2;
    for (i, c) in log_cos_coefficients().iter().enumerate() {
        let s = 2.0 * (i as f64 + 1.0);
        let term = c * zk * hurwitz_zeta(s, a);
        log_tail += term;
        if term.abs() < 1e-18 * log_tail.abs().max(1e-300) {
            break;
        }
        zk *= z2;
    }
    (-log_tail).exp()
}

/// Quadrature settings for [`g_density`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Initial truncation of the `u` integral.
    pub u_max: f64,
    /// Largest `u_max` the automatic extension may reach.
    pub u_max_cap: f64,
    pub nodes_per_panel: usize,
    /// Target absolute error.
    pub tol: f64,
    /// Grow `u_max` until `|rho(2u)| < tol / 100` on `[u_max - 1, u_max]`.
    pub auto_extend: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            u_max: 6.0,
            u_max_cap: 64.0,
            nodes_per_panel: 16,
            tol: 1e-12,
            auto_extend: true,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn window_max(&self, u_end: f64) -> f64 {
        (0..=128)
            .map(|i| u_end - i as f64 / 128.0)
            .map(|u| rho_inf(2.0 * u, self.tol).unwrap_or(1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The `u_max` actually used, after extension.
    pub fn resolved_u_max(&self) -> Result<f64> {
        if !(self.tol > 0.0) || self.nodes_per_panel == 0 || !(self.u_max >= 1.0) {
            return Err(Error::Config(
                "quadrature needs tol > 0, at least one node and u_max >= 1".into(),
            ));
        }
        let target = self.tol / 100.0;
        let mut u = self.u_max;
        loop {
            if self.window_max(u) < target {
                return Ok(u);
            }
            if !self.auto_extend || u + 1.0 > self.u_max_cap {
                return Err(Error::Config(format!(
                    "|rho(2u)| is not below {target:e} near u_max = {u}; raise u_max"
                )));
            }
            u += 1.0;
        }
    }

    fn rule(&self) -> Result<GaussLegendre> {
        GaussLegendre::new(self.nodes_per_panel.max(2))
            .map_err(|e| Error::Config(format!("Gauss-Legendre rule: {e}")))
    }
}

/// Integrates `f` over `[0, u_max]` on panels no wider than `width`,
/// summing in panel order.
fn panel_integral(rule: &GaussLegendre, u_max: f64, width: f64, f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let panels = (u_max / width).ceil().max(1.0) as usize;
    let h = u_max / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, &f))
        .collect();
    parts.iter().sum()
}

/// `g(x) = 2 int_0^inf cos(2 pi u x) rho(2u) du`.
pub fn g_density(x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let u_max = spec.resolved_u_max()?;
    g_with(x, spec, u_max, &spec.rule()?)
}

fn g_with(x: f64, spec: &QuadratureSpec, u_max: f64, rule: &GaussLegendre) -> Result<f64> {
    let width = 1.0 / (2.0 * (1.0 + x.abs()));
    let tol = spec.tol;
    let v = panel_integral(rule, u_max, width, |u| {
        cospi(2.0 * u * x) * rho_inf(2.0 * u, tol).unwrap_or(f64::NAN)
    });
    Ok(2.0 * v)
}

/// `x_min, x_min + step, ...` up to `x_max` (inclusive when it lands on
/// the grid up to rounding).
pub fn grid(x_min: f64, x_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(x_max >= x_min) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::domain("need finite x_min <= x_max and step > 0"));
    }
    let count = ((x_max - x_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| x_min + i as f64 * step).collect())
}

/// `(x, g(x))` for each `x`.
pub fn g_curve(xs: &[f64], spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    let u_max = spec.resolved_u_max()?;
    let rule = spec.rule()?;
    xs.iter().map(|&x| Ok((x, g_with(x, spec, u_max, &rule)?))).collect()
}

/// `int_a^b g(x) dx`, via the sine kernel
/// `2 int_0^inf rho(2u) (sin 2 pi u b - sin 2 pi u a) / (2 pi u) du`.
pub fn g_interval_integral(a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(a < b) {
        return Err(Error::domain(format!("empty or inverted interval ({a}, {b})")));
    }
    let u_max = spec.resolved_u_max()?;
    let rule = spec.rule()?;
    let width = 1.0 / (2.0 * (1.0 + a.abs().max(b.abs())));
    let tol = spec.tol;
    let kernel = |u: f64, c: f64| {
        let t = 2.0 * PI * u * c;
        if t.abs() < 1e-4 {
            c * (1.0 - t * t / 6.0)
        } else {
            t.sin() / (2.0 * PI * u)
        }
    };
    let v = panel_integral(&rule, u_max, width, |u| {
        rho_inf(2.0 * u, tol).unwrap_or(f64::NAN) * (kernel(u, b) - kernel(u, a))
    });
    Ok(2.0 * v)
}

/// Total mass of `g` on `[-half_width, half_width]`.
pub fn g_mass(half_width: f64, spec: &QuadratureSpec) -> Result<f64> {
    g_interval_integral(-half_width, half_width, spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionMode {
    Exact,
    MonteCarlo,
}

/// Largest `N` for exact distribution queries.
pub const EXACT_DISTRIBUTION_MAX_N: u32 = 30;
pub const MIN_MC_SAMPLES: u64 = 1000;
const MC_SHARD: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionQuery {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub mode: DistributionMode,
    pub samples: u64,
    pub seed: u64,
}

impl DistributionQuery {
    pub fn exact(n: u32, a: f64, b: f64) -> Self {
        DistributionQuery {
            n,
            a,
            b,
            mode: DistributionMode::Exact,
            samples: 0,
            seed: 0,
        }
    }

    pub fn monte_carlo(n: u32, a: f64, b: f64, samples: u64, seed: u64) -> Self {
        DistributionQuery {
            n,
            a,
            b,
            mode: DistributionMode::MonteCarlo,
            samples,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityEstimate {
    pub probability: f64,
    /// `count / 2^N` in exact mode.
    pub exact: Option<ExactRational>,
    pub count: u64,
    /// Binomial standard error in Monte Carlo mode.
    pub std_error: Option<f64>,
}

/// `P[X_N in (a, b)]`, exactly by meet-in-the-middle counting or by
/// sampling.
pub fn distribution_probability(q: &DistributionQuery) -> Result<ProbabilityEstimate> {
    if !(q.a < q.b) {
        return Err(Error::domain(format!("empty or inverted interval ({}, {})", q.a, q.b)));
    }
    if q.n == 0 {
        return Err(Error::domain("N must be >= 1"));
    }
    match q.mode {
        DistributionMode::Exact => {
            if q.n > EXACT_DISTRIBUTION_MAX_N {
                return Err(Error::Resource {
                    what: format!("exact distribution at N = {}", q.n),
                    requested: 1u128 << q.n,
                    cap: 1u128 << EXACT_DISTRIBUTION_MAX_N,
                });
            }
            let lo = ExactRational::from_f64(q.a)?;
            let hi = ExactRational::from_f64(q.b)?;
            let count = count_in_open_interval(q.n, &lo, &hi, DEFAULT_MAX_HALF_SIZE)?;
            let exact = ExactRational::new(count.into(), num_bigint::BigInt::from(1) << q.n as usize)?;
            Ok(ProbabilityEstimate {
                probability: exact.to_f64(),
                exact: Some(exact),
                count,
                std_error: None,
            })
        }
        DistributionMode::MonteCarlo => {
            if q.samples < MIN_MC_SAMPLES {
                return Err(Error::domain(format!(
                    "Monte Carlo needs at least {MIN_MC_SAMPLES} samples"
                )));
            }
            let count = monte_carlo_count(q.n, q.a, q.b, q.samples, q.seed);
            let p = count as f64 / q.samples as f64;
            Ok(ProbabilityEstimate {
                probability: p,
                exact: None,
                count,
                std_error: Some((p * (1.0 - p) / q.samples as f64).sqrt()),
            })
        }
    }
}

/// Shard `i` draws from stream `i` of a generator keyed by `seed`, so the
/// count does not depend on scheduling.
fn monte_carlo_count(n: u32, a: f64, b: f64, samples: u64, seed: u64) -> u64 {
    let recips: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let shards = samples.div_ceil(MC_SHARD);
    (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let take = MC_SHARD.min(samples - shard * MC_SHARD);
            let mut hits = 0u64;
            for _ in 0..take {
                let mut s = 0.0;
                for block in recips.chunks(64) {
                    let bits: u64 = rng.gen();
                    for (i, r) in block.iter().enumerate() {
                        if bits >> i & 1 == 1 {
                            s -= r;
                        } else {
                            s += r;
                        }
                    }
                }
                if a < s && s < b {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

/// Gaussian test function `Phi(y) = exp(-pi (y - c)^2 / w^2)`, whose
/// transform `int Phi(y) e^{-2 pi i xi y} dy` is
/// `w exp(-pi w^2 xi^2) e^{-2 pi i xi c}`. It is not compactly supported
/// but is below `1e-300` beyond `15 w` from its centre.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: f64,
    pub width: f64,
}

impl GaussianBump {
    pub fn eval(&self, y: f64) -> f64 {
        let d = (y - self.center) / self.width;
        (-PI * d * d).exp()
    }

    /// Real part of the transform (the imaginary part integrates to zero
    /// against the even `rho_N(2 xi)`).
    pub fn transform_re(&self, xi: f64) -> f64 {
        self.width * (-PI * self.width * self.width * xi * xi).exp() * cospi(2.0 * xi * self.center)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    /// Average of `Phi(sigma)` over all `2^N` sign vectors.
    pub lhs: f64,
    /// `int transform(xi) rho_N(2 xi) d xi`.
    pub rhs: f64,
    pub diff: f64,
}

pub const IDENTITY_MAX_N: u32 = 20;

/// Compares `E[Phi(X_N)]` by enumeration with its Fourier-side integral.
pub fn expected_value_identity_check(n: u32, bump: &GaussianBump) -> Result<IdentityCheck> {
    if n == 0 || n > IDENTITY_MAX_N {
        return Err(Error::domain(format!("N must lie in [1, {IDENTITY_MAX_N}]")));
    }
    if !(bump.width > 0.0) {
        return Err(Error::domain("bump width must be positive"));
    }
    let recips: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let top: f64 = recips.iter().sum();
    let lhs = {
        let mut s = top;
        let mut gray = 0u64;
        let mut acc = bump.eval(s);
        for g in 1u64..1 << n {
            let bit = g.trailing_zeros() as usize;
            if gray >> bit & 1 == 0 {
                s -= 2.0 * recips[bit];
            } else {
                s += 2.0 * recips[bit];
            }
            gray ^= 1 << bit;
            acc += bump.eval(s);
        }
        acc / (1u64 << n) as f64
    };
    // exp(-pi w^2 xi^2) < 1e-20 past xi_max
    let xi_max = (46.0 / PI).sqrt() / bump.width;
    let width = 1.0 / (4.0 * (1.0 + bump.center.abs() + top));
    let rule = GaussLegendre::new(16).map_err(|e| Error::Config(e.to_string()))?;
    let rhs = 2.0
        * panel_integral(&rule, xi_max, width, |xi| {
            bump.transform_re(xi) * rho_partial(2.0 * xi, 1, n as u64)
        });
    Ok(IdentityCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
    })
}

/// `(x, rho_N(x) / x)` for each nonzero `x`.
pub fn rho_over_x_curve(n: u64, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    xs.iter()
        .filter(|&&x| x != 0.0)
        .map(|&x| Ok((x, rho_n(x, n)? / x)))
        .collect()
}

/// `max |rho_N(x)|` over `points` equally spaced `x` in `[lo, hi]`, with
/// the maximizing `x`.
pub fn rho_n_grid_max(n: u64, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)> {
    if points < 2 || !(hi > lo) {
        return Err(Error::domain("need hi > lo and at least two points"));
    }
    let vals: Vec<(f64, f64)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (x, rho_partial(x, 1, n).abs())
        })
        .collect();
    Ok(vals
        .into_iter()
        .fold((lo, -1.0), |best, v| if v.1 > best.1 { v } else { best }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cospi_values() {
        assert_eq!(cospi(0.5), 0.0);
        assert_eq!(cospi(-1.5), 0.0);
        assert_eq!(cospi(1.0), -1.0);
        assert_eq!(cospi(2.0), 1.0);
        for &y in &[0.1, 0.3, 0.7, 1.2, -3.4, 17.9] {
            assert!((cospi(y) - (PI * y).cos()).abs() < 1e-14, "{y}");
        }
    }

    #[test]
    fn rho_n_examples() {
        assert_eq!(rho_n(0.0, 7).unwrap(), 1.0);
        assert_eq!(rho_n(0.5, 1).unwrap(), 0.0);
        let v = rho_n(1.0 / 3.0, 2).unwrap();
        assert!((v - 0.5 * 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(rho_n(1.0, 0).is_err());
    }

    #[test]
    fn rho_inf_examples() {
        assert_eq!(rho_inf(0.0, 1e-12).unwrap(), 1.0);
        assert_eq!(rho_inf(1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(rho_inf(2.5, 1e-12).unwrap(), 0.0);
        assert!(rho_inf(0.3, 0.0).is_err());
    }

    /// `log |rho_M(x)|` extrapolated in `1/M` from `M`, `2M`, `4M`.
    fn richardson_log_rho(x: f64, m: u64) -> (f64, f64) {
        let l = |k: u64| (1..=k).map(|n| cospi(x / n as f64).abs().ln()).sum::<f64>();
        let (a, b, c) = (l(m), l(2 * m), l(4 * m));
        let sign = rho_n(x, m).unwrap().signum();
        (sign, (8.0 * c - 6.0 * b + a) / 3.0)
    }

    #[test]
    fn rho_inf_matches_extrapolated_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(0.0..5.0);
            let (sign, log_ref) = richardson_log_rho(x, 100_000);
            let reference = sign * log_ref.exp();
            let got = rho_inf(x, 1e-12).unwrap();
            assert!((got - reference).abs() <= 1e-9, "x = {x}: {got} vs {reference}");
        }
    }

    #[test]
    fn log_cos_coefficients_match_series() {
        let c = log_cos_coefficients();
        let expected = [0.5, 1.0 / 12.0, 1.0 / 45.0, 17.0 / 2520.0, 31.0 / 14175.0, 691.0 / 935550.0];
        for (a, b) in c.iter().zip(expected) {
            assert!((a - b).abs() < 1e-16, "{a} vs {b}");
        }
        let z: f64 = 0.2;
        let series: f64 = c.iter().enumerate().map(|(i, ck)| ck * z.powi(2 * (i as i32 + 1))).sum();
        assert!((series + z.cos().ln()).abs() < 1e-17);
    }

    #[test]
    fn hurwitz_zeta_reference_values() {
        // 30-digit values from an independent arbitrary-precision library
        for &(s, a, v) in &[
            (2.0, 65.0, 0.015_503_565_439_338_93),
            (4.0, 65.0, 0.000_001_242_073_835_795_559_6),
            (6.0, 100.0, 2.050_499_953_343_33e-11),
            (12.0, 70.0, 4.969_128_336_694_613e-22),
        ] {
            let z = hurwitz_zeta(s, a);
            assert!((z - v).abs() < 1e-14 * v, "s={s} a={a}: {z} vs {v}");
        }
    }

    #[test]
    fn quadrature_spec_validation() {
        let bad = QuadratureSpec { tol: 0.0, ..Default::default() };
        assert!(matches!(g_density(0.0, &bad), Err(Error::Config(_))));
        let tight = QuadratureSpec { u_max: 1.0, auto_extend: false, ..Default::default() };
        assert!(matches!(tight.resolved_u_max(), Err(Error::Config(_))));
    }

    #[test]
    fn small_exact_probabilities() {
        let p = distribution_probability(&DistributionQuery::exact(1, 0.5, 1.5)).unwrap();
        assert_eq!(p.exact, Some(ExactRational::from_ratio(1, 2)));
        let p = distribution_probability(&DistributionQuery::exact(2, 0.0, 2.0)).unwrap();
        assert_eq!(p.exact, Some(ExactRational::from_ratio(1, 2)));
        assert!(distribution_probability(&DistributionQuery::exact(2, 1.0, 1.0)).is_err());
        assert!(distribution_probability(&DistributionQuery::exact(31, 0.0, 1.0)).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let q = DistributionQuery::monte_carlo(12, -0.1, 0.1, 50_000, 7);
        let a = distribution_probability(&q).unwrap();
        let b = distribution_probability(&q).unwrap();
        assert_eq!(a, b);
        let exact = distribution_probability(&DistributionQuery::exact(12, -0.1, 0.1)).unwrap();
        let se = a.std_error.unwrap();
        assert!((a.probability - exact.probability).abs() < 5.0 * se);
        let few = DistributionQuery::monte_carlo(12, -0.1, 0.1, 10, 7);
        assert!(distribution_probability(&few).is_err());
    }

    #[test]
    fn identity_check_small_cases() {
        let far = expected_value_identity_check(8, &GaussianBump { center: 100.0, width: 1.0 }).unwrap();
        assert_eq!(far.lhs, 0.0);
        assert!(far.rhs.abs() < 1e-12);
        let bump = GaussianBump { center: 0.0, width: 0.7 };
        let one = expected_value_identity_check(1, &bump).unwrap();
        assert_eq!(one.lhs, bump.eval(1.0));
        assert!(one.diff < 1e-12);
        assert!(expected_value_identity_check(21, &bump).is_err());
    }

    #[test]
    fn curves_have_requested_shape() {
        let xs = grid(0.0, 64000.0, 640.0).unwrap();
        assert_eq!(xs.len(), 101);
        let c = rho_over_x_curve(40, &xs).unwrap();
        assert_eq!(c.len(), 100);
        assert_eq!(c[99].0, 64000.0);
        assert_eq!(grid(-4.0, 4.0, 0.05).unwrap().len(), 161);
        let (x, m) = rho_n_grid_max(10, 0.0, 1.0, 11).unwrap();
        assert_eq!((x, m), (0.0, 1.0));
    }
}
