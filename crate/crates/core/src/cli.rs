//! `signed-harmonics` command-line front end.
//!
//! Every subcommand builds an [`OutputRecord`] and renders it as CSV or JSON.
//! Exit codes: 0 ok, 1 verification failure, 2 usage or input, 3 resources.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds_lab::{self, BoundProbe};
use crate::density::{self, DistributionQuery, QuadratureSpec};
use crate::error::{Error, Result};
use crate::exact_core::ExactRational;
use crate::greedy::{self, GreedyTarget};
use crate::minsearch::{self, SearchConfig, DEFAULT_MAX_HALF_SIZE};
use crate::output::{Cell, ColumnKind, Format, OutputRecord};
use crate::verify::{self, Suite};

use ColumnKind::{Bool as B, Exact as X, Real as R, Text as T};

#[derive(Debug, Parser)]
#[command(name = "signed-harmonics", version, about = "Signed harmonic sums: minima, greedy runs, densities and bounds")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true, env = "SIGNED_HARMONICS_THREADS")]
    pub threads: Option<usize>,

    /// Cap on entries per half-sum table.
    #[arg(long, global = true, env = "SIGNED_HARMONICS_MAX_HALF_SIZE", default_value_t = DEFAULT_MAX_HALF_SIZE)]
    pub max_half_size: u64,

    /// Include wall time in the output record.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rational(s: &str) -> std::result::Result<ExactRational, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_target(s: &str) -> std::result::Result<GreedyTarget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum of |sum s_n/n - tau| over all sign choices.
    Minsum {
        #[arg(long)]
        n: u32,
        /// Target as p/q or a decimal literal.
        #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_rational)]
        tau: ExactRational,
        /// Size of the first half (default ceil(N/2)).
        #[arg(long)]
        split: Option<u32>,
    },
    /// m_N * L_N for N = 1..n_max at tau = 0, with the log-ratio column.
    Table {
        #[arg(long)]
        n_max: u32,
    },
    /// Greedy sign choice towards tau.
    Greedy {
        /// Rational, decimal, or one of pi, e, sqrt2, log2, euler_gamma.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_target)]
        tau: GreedyTarget,
        #[arg(long)]
        n_max: u64,
        /// Working precision in bits; without it the run escalates from 256 bits as needed.
        #[arg(long, env = "SIGNED_HARMONICS_PRECISION_BITS")]
        precision: Option<usize>,
    },
    /// Sampled curve of the limit density g or of rho_N(x)/x.
    Density(DensityArgs),
    /// P[X_N in (a, b)] for random signs, with the limit-density comparison.
    Prob(ProbArgs),
    /// Auxiliary counting and divisor bounds.
    Bounds {
        #[command(subcommand)]
        verb: BoundsVerb,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    G,
    RhoOverX,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value = "g")]
    pub curve: Curve,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Quadrature tolerance for g.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Product length for rho-over-x.
    #[arg(long, default_value_t = 40)]
    pub n: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbMode {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ProbMode,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub x: f64,
    /// Scale in exp(a k^2); defaults to log 4.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

impl ProbeArgs {
    fn probe(&self) -> BoundProbe {
        let mut p = BoundProbe::new(self.n, self.k, self.delta, self.x);
        if let Some(a) = self.a {
            p.a = a;
        }
        if let Some(d) = self.d {
            p.d = d;
        }
        if let Some(eta) = self.eta {
            p.eta = eta;
        }
        p
    }
}

#[derive(Debug, Subcommand)]
pub enum BoundsVerb {
    /// Size of S_k for one probe.
    Skcount(ProbeArgs),
    /// The rho-bound inequality (k = 1) for one probe.
    Rhobound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        x: f64,
    },
    /// Divisor-window count with its lower and upper bounds.
    Dsum {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
    },
    /// max sigma_{-s}(m) / exp((log m)^(1-s)) over m <= m_max.
    Sigma {
        #[arg(long)]
        m_max: u64,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
    },
    /// Exact partial-fraction identity at rational x.
    Identity {
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        x: ExactRational,
    },
    /// Exact gap between 1/n^k and 1/(n (n+1) ... (n+k-1)).
    Ntok {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
    },
    /// Number of distinct values in the 6-tuple family.
    Tuples,
    /// Density of admissible k up to n.
    DensityOfD {
        #[arg(long)]
        n: u64,
    },
    /// Exact number of distinct signed sums of length n.
    Cardinality {
        #[arg(long)]
        n: u32,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, passed)) => match emit(&cli, &text) {
            Ok(()) => {
                if passed {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the parsed command and renders its record. The flag is false when a
/// verification suite reported a failure.
pub fn execute(cli: &Cli) -> Result<(String, bool)> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // A pool that already exists (repeated in-process calls) is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let (mut rec, passed) = build_record(cli)?;
    if cli.timing {
        rec.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok((rec.render(cli.format)?, passed))
}

fn build_record(cli: &Cli) -> Result<(OutputRecord, bool)> {
    let rec = match &cli.command {
        Command::Minsum { n, tau, split } => cmd_minsum(cli, *n, tau, *split)?,
        Command::Table { n_max } => cmd_table(cli, *n_max)?,
        Command::Greedy { tau, n_max, precision } => cmd_greedy(tau, *n_max, *precision)?,
        Command::Density(a) => cmd_density(a)?,
        Command::Prob(a) => cmd_prob(a)?,
        Command::Bounds { verb } => cmd_bounds(verb)?,
        Command::Verify { suite } => return cmd_verify(cli, *suite),
    };
    Ok((rec, true))
}

fn cmd_minsum(cli: &Cli, n: u32, tau: &ExactRational, split: Option<u32>) -> Result<OutputRecord> {
    let mut cfg = SearchConfig::new(n)
        .with_tau(tau.clone())
        .with_max_half_size(cli.max_half_size);
    if let Some(s) = split {
        cfg = cfg.with_split(s);
    }
    let res = minsearch::min_abs(&cfg)?;
    let mut rec = OutputRecord::new(
        "minsum",
        &[
            ("n", X),
            ("tau", X),
            ("m_value", X),
            ("m_times_lcm", X),
            ("witness", T),
            ("split", X),
            ("generated_a", X),
            ("generated_b", X),
            ("distinct_a", X),
            ("distinct_b", X),
            ("sweep_steps", X),
        ],
    );
    rec.param("n", n).param("tau", tau).param("max_half_size", cli.max_half_size);
    if let Some(s) = split {
        rec.param("split", s);
    }
    let st = &res.stats;
    rec.push(vec![
        Cell::int(n),
        Cell::Exact(res.tau.clone()),
        Cell::Exact(res.m_value.clone()),
        Cell::Exact(res.m_times_lcm.clone()),
        Cell::text(res.witness.to_string()),
        Cell::int(st.split),
        Cell::int(st.generated.0),
        Cell::int(st.generated.1),
        Cell::int(st.distinct.0),
        Cell::int(st.distinct.1),
        Cell::int(st.sweep_steps),
    ])?;
    Ok(rec)
}

fn cmd_table(cli: &Cli, n_max: u32) -> Result<OutputRecord> {
    let base = SearchConfig::new(1).with_max_half_size(cli.max_half_size);
    let series = minsearch::ratio_series(n_max, &base)?;
    let mut rec = OutputRecord::new(
        "table",
        &[
            ("n", X),
            ("m_times_lcm", X),
            ("m_value", X),
            ("ratio", R),
            ("reference_match", T),
        ],
    );
    rec.param("n_max", n_max).param("max_half_size", cli.max_half_size);
    for p in series {
        let check = match minsearch::reference_value(p.n) {
            Some(v) => (p.m_times_lcm == ExactRational::from_integer(v)).to_string(),
            None => "n/a".into(),
        };
        rec.push(vec![
            Cell::int(p.n),
            Cell::Exact(p.m_times_lcm),
            Cell::Exact(p.m_value),
            Cell::real(p.ratio),
            Cell::text(check),
        ])?;
    }
    Ok(rec)
}

fn cmd_greedy(tau: &GreedyTarget, n_max: u64, precision: Option<usize>) -> Result<OutputRecord> {
    let run = match precision {
        Some(p) => greedy::greedy_run(tau, n_max, p)?,
        None => greedy::greedy_run_auto(tau, n_max, greedy::DEFAULT_GREEDY_PRECISION)?,
    };
    let mut rec = OutputRecord::new(
        "greedy",
        &[("n", X), ("sign", T), ("residual", R), ("ratio", R), ("within_envelope", B)],
    );
    rec.param("tau", tau).param("n_max", n_max);
    if let Some(p) = run.precision_bits {
        rec.param("precision_bits", p);
    }
    rec.param("error_bound", crate::output::format_real(run.error_bound));
    for c in run.checkpoints() {
        let i = (c.n - 1) as usize;
        let sign = if run.signs.entries()[i] > 0 { "+" } else { "-" };
        rec.push(vec![
            Cell::int(c.n),
            Cell::text(sign),
            Cell::real(c.residual),
            Cell::real(c.ratio),
            Cell::Bool(run.within_envelope[i]),
        ])?;
    }
    Ok(rec)
}

fn cmd_density(a: &DensityArgs) -> Result<OutputRecord> {
    let xs = density::grid(a.x_min, a.x_max, a.step)?;
    let mut rec;
    let points = match a.curve {
        Curve::G => {
            rec = OutputRecord::new("density", &[("x", R), ("g", R)]);
            rec.param("curve", "g").param("tol", a.tol);
            density::g_curve(&xs, &QuadratureSpec::default().with_tol(a.tol))?
        }
        Curve::RhoOverX => {
            rec = OutputRecord::new("density", &[("x", R), ("rho_over_x", R)]);
            rec.param("curve", "rho-over-x").param("n", a.n);
            density::rho_over_x_curve(a.n, &xs)?
        }
    };
    rec.param("x_min", a.x_min).param("x_max", a.x_max).param("step", a.step);
    for (x, v) in points {
        rec.push(vec![Cell::real(x), Cell::real(v)])?;
    }
    Ok(rec)
}

fn cmd_prob(a: &ProbArgs) -> Result<OutputRecord> {
    let integral = density::g_interval_integral(a.a, a.b, &QuadratureSpec::default())?;
    let rel = |p: f64| (p - integral).abs() / integral;
    let mut rec;
    match a.mode {
        ProbMode::Exact => {
            let est = density::distribution_probability(&DistributionQuery::exact(a.n, a.a, a.b))?;
            rec = OutputRecord::new(
                "prob",
                &[
                    ("n", X),
                    ("count", X),
                    ("probability_exact", X),
                    ("probability", R),
                    ("g_integral", R),
                    ("relative_deviation", R),
                ],
            );
            let exact = est
                .exact
                .clone()
                .ok_or_else(|| Error::contract("exact mode returned no exact probability"))?;
            rec.push(vec![
                Cell::int(a.n),
                Cell::int(est.count),
                Cell::Exact(exact),
                Cell::real(est.probability),
                Cell::real(integral),
                Cell::real(rel(est.probability)),
            ])?;
        }
        ProbMode::Mc => {
            let q = DistributionQuery::monte_carlo(a.n, a.a, a.b, a.samples, a.seed);
            let est = density::distribution_probability(&q)?;
            rec = OutputRecord::new(
                "prob",
                &[
                    ("n", X),
                    ("samples", X),
                    ("count", X),
                    ("probability", R),
                    ("std_error", R),
                    ("g_integral", R),
                    ("relative_deviation", R),
                ],
            );
            rec.seed = Some(a.seed);
            rec.push(vec![
                Cell::int(a.n),
                Cell::int(a.samples),
                Cell::int(est.count),
                Cell::real(est.probability),
                Cell::real(est.std_error.unwrap_or(f64::NAN)),
                Cell::real(integral),
                Cell::real(rel(est.probability)),
            ])?;
        }
    }
    rec.param("n", a.n).param("a", a.a).param("b", a.b);
    rec.param("mode", if a.mode == ProbMode::Exact { "exact" } else { "mc" });
    Ok(rec)
}

fn cmd_bounds(verb: &BoundsVerb) -> Result<OutputRecord> {
    let mut rec;
    match verb {
        BoundsVerb::Skcount(p) => {
            let probe = p.probe();
            rec = OutputRecord::new("bounds skcount", &[("n", X), ("k", X), ("x", R), ("count", X)]);
            let c = bounds_lab::s_k_count(&probe)?;
            rec.push(vec![Cell::int(p.n), Cell::int(p.k), Cell::real(p.x), Cell::int(c)])?;
        }
        BoundsVerb::Rhobound { n, delta, x } => {
            let r = bounds_lab::rho_bound_check(&BoundProbe::new(*n, 1, *delta, *x))?;
            rec = OutputRecord::new("bounds rhobound", &[("lhs", R), ("rhs", R), ("count", X), ("holds", B)]);
            rec.push(vec![Cell::real(r.lhs), Cell::real(r.rhs), Cell::int(r.count), Cell::Bool(r.holds)])?;
        }
        BoundsVerb::Dsum { x, n, delta } => {
            let s = bounds_lab::sandwich(*x, *n, *delta)?;
            rec = OutputRecord::new(
                "bounds dsum",
                &[
                    ("lower", R),
                    ("count", X),
                    ("upper", R),
                    ("lower_strict", B),
                    ("upper_strict", B),
                    ("upper_weak", B),
                ],
            );
            rec.param("x", x).param("n", n).param("delta", delta);
            rec.push(vec![
                Cell::real(s.lower),
                Cell::int(s.count),
                Cell::real(s.upper),
                Cell::Bool(s.lower_strict),
                Cell::Bool(s.upper_strict),
                Cell::Bool(s.upper_weak),
            ])?;
        }
        BoundsVerb::Sigma { m_max, s } => {
            let scan = bounds_lab::ramanujan_ratio_scan(*m_max, *s)?;
            rec = OutputRecord::new("bounds sigma", &[("m_max", X), ("s", R), ("max_ratio", R), ("argmax", X)]);
            rec.push(vec![Cell::int(*m_max), Cell::real(*s), Cell::real(scan.max_value), Cell::int(scan.argmax)])?;
        }
        BoundsVerb::Identity { m, x } => {
            let c = bounds_lab::partial_fraction_identity(*m, x)?;
            rec = OutputRecord::new("bounds identity", &[("m", X), ("x", X), ("lhs", X), ("rhs", X), ("equal", B)]);
            rec.push(vec![Cell::int(*m), Cell::Exact(x.clone()), Cell::Exact(c.lhs), Cell::Exact(c.rhs), Cell::Bool(c.equal)])?;
        }
        BoundsVerb::Ntok { n, k } => {
            let g = bounds_lab::power_vs_factorial_gap(*n, *k)?;
            rec = OutputRecord::new("bounds ntok", &[("n", X), ("k", X), ("gap", X), ("bound", X), ("holds", B)]);
            rec.push(vec![Cell::int(*n), Cell::int(*k), Cell::Exact(g.gap), Cell::Exact(g.bound), Cell::Bool(g.holds)])?;
        }
        BoundsVerb::Tuples => {
            rec = OutputRecord::new("bounds tuples", &[("count", X)]);
            rec.push(vec![Cell::int(bounds_lab::tuple_value_count())])?;
        }
        BoundsVerb::DensityOfD { n } => {
            let d = bounds_lab::admissible_density(*n)?;
            rec = OutputRecord::new("bounds density-of-d", &[("n", X), ("count", X), ("expected", R), ("ratio", R)]);
            rec.push(vec![Cell::int(d.n), Cell::int(d.count), Cell::real(d.expected), Cell::real(d.ratio)])?;
        }
        BoundsVerb::Cardinality { n } => {
            let c = bounds_lab::cardinality_bound_check(*n)?;
            rec = OutputRecord::new(
                "bounds cardinality",
                &[("n", X), ("count", X), ("two_pow", X), ("exp_bound", R), ("exponent", R), ("symmetric", B)],
            );
            rec.push(vec![
                Cell::int(c.n),
                Cell::int(c.count),
                Cell::int(c.two_pow),
                Cell::real(c.exp_bound),
                Cell::real(c.exponent),
                Cell::Bool(c.symmetric),
            ])?;
        }
    }
    Ok(rec)
}

fn cmd_verify(cli: &Cli, suite: Suite) -> Result<(OutputRecord, bool)> {
    let outcomes = verify::run_suite(suite, cli.max_half_size)?;
    let mut rec = OutputRecord::new("verify", &[("suite", T), ("check", T), ("passed", B), ("detail", T)]);
    rec.param("suite", suite);
    let passed = outcomes.iter().all(|o| o.passed);
    for o in outcomes {
        rec.push(vec![Cell::text(o.suite), Cell::text(o.check), Cell::Bool(o.passed), Cell::text(o.detail)])?;
    }
    Ok((rec, passed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<(String, bool)> {
        let cli = Cli::try_parse_from(std::iter::once("signed-harmonics").chain(args.iter().copied()))
            .map_err(|e| Error::Parse(e.to_string()))?;
        execute(&cli)
    }

    #[test]
    fn command_tree_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn minsum_rows() {
        let (out, ok) = exec(&["minsum", "--n", "13"]).unwrap();
        assert!(ok);
        let line = out.lines().nth(1).unwrap();
        assert_eq!(line.split(',').nth(3), Some("607"));
        let (out, _) = exec(&["minsum", "--n", "1", "--tau", "0"]).unwrap();
        assert!(out.lines().nth(1).unwrap().starts_with("1,0,1,1,+,"));
    }

    #[test]
    fn negative_and_decimal_targets_parse() {
        let (out, _) = exec(&["minsum", "--n", "6", "--tau", "-0.25"]).unwrap();
        assert!(out.lines().nth(1).unwrap().starts_with("6,-1/4,"));
        let (out, _) = exec(&["minsum", "--n", "6", "--tau", "-1/3"]).unwrap();
        assert!(out.lines().nth(1).unwrap().starts_with("6,-1/3,"));
        let (out, _) = exec(&["minsum", "--n", "6", "--tau", "-0.25"]).unwrap();
        assert!(out.lines().nth(1).unwrap().starts_with("6,-1/4,"));
        assert!(exec(&["minsum", "--n", "6", "--tau", "x/2"]).is_err());
    }

    #[test]
    fn greedy_small_runs() {
        let (out, _) = exec(&["greedy", "--tau", "0", "--n-max", "4"]).unwrap();
        let signs: String = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(signs, "+---");
        let (out, _) = exec(&["greedy", "--tau", "1", "--n-max", "1"]).unwrap();
        assert_eq!(out.lines().nth(1).unwrap().split(',').nth(2), Some("0.0"));
        assert!(exec(&["greedy", "--tau", "tau", "--n-max", "4"]).is_err());
    }

    #[test]
    fn tuples_and_timing() {
        let (out, _) = exec(&["bounds", "tuples"]).unwrap();
        assert_eq!(out, "count\n29\n");
        let (out, _) = exec(&["--format", "json", "--timing", "bounds", "tuples"]).unwrap();
        assert!(out.contains("timing_ms"));
        let (out, _) = exec(&["--format", "json", "bounds", "tuples"]).unwrap();
        assert!(!out.contains("timing_ms"));
    }
}
