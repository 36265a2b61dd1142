//! `noiseflow`: exact verification driver and seeded experiment runner.
//!
//! A failed check exits with status 1. Invalid input or an exceeded budget
//! exits with status 2.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noiseflow::experiments::{
    clt_report, g2_limit_report, g3_limit_report, micro_block_report, poisson_block_report,
    spectral_profile, trap_deviation_report, trap_waiting_report, web_report,
};
use noiseflow::flow::{
    alive_chord_binomial_check, conditional_c_law, flow_law_with, path_identity_report,
    snake_aggregate_law, standard_generators, verify_flow_laws, Model,
};
use noiseflow::limits::BUDGET_ENV;
use noiseflow::mc::DEFAULT_SEED;
use noiseflow::scalar::parse_rational;
use noiseflow::walsh::{named_observable, verify_walsh_layer, Observable, ObservableKind};
use noiseflow::web::{
    flow_property_exhaustive, lemma74_random_suite, mean_critical_count_exact,
    resampling_identities, theorem79_check, zero_spectral_identity, SubsetMode,
};
use noiseflow::{Check, Limits, Rational, Report, Result};

#[derive(Parser, Debug)]
#[command(
    name = "noiseflow",
    version,
    about = "Exact verification and seeded experiments for noise, flows and webs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed of every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo sample count; each experiment has its own default.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the artifact here and the per-check summary to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest support of an exact law kept during a DP.
    #[arg(long, global = true, env = BUDGET_ENV)]
    budget: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact identities in rational arithmetic.
    #[command(subcommand)]
    Verify(Verify),
    /// Scaling experiments with statistical thresholds.
    #[command(subcommand)]
    Run(Run),
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Exact flow laws and the identities derived from them.
    Flows {
        #[arg(long, default_value_t = 10)]
        t: usize,
        /// Escape probabilities as `num/den`.
        #[arg(long, value_delimiter = ',', default_value = "1/2,1/3", value_parser = rational_arg)]
        p: Vec<Rational>,
    },
    /// Trapped-chain occupation identity over subsets of `{1..n}`.
    Theorem79 {
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Every subset; the default unless `--subsets` is given.
        #[arg(long, conflicts_with = "subsets")]
        all_subsets: bool,
        /// Number of subsets drawn with the master seed.
        #[arg(long)]
        subsets: Option<usize>,
        /// Also check the resampling and zero-set spectral identities.
        #[arg(long)]
        identities: bool,
    },
    /// Projection bound on random blocked-cell instances plus the tight case.
    Lemma74 {
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
    /// Exact Walsh-layer identities on random rational observables.
    Walsh {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8,12")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Chord selection against the sticky flow law.
    Snake {
        #[arg(long, default_value_t = 8)]
        t: usize,
        #[arg(long, value_delimiter = ',', default_value = "1/2,1/3", value_parser = rational_arg)]
        p: Vec<Rational>,
    },
    /// Trap deviation bound and the rescaled waiting law.
    Trap {
        #[arg(long, default_value_t = 12)]
        t: usize,
        /// Trap depths for the exhaustive deviation bound.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        m: Vec<i64>,
        #[arg(long, default_value_t = 5)]
        wait_m: i64,
        #[arg(long, default_value_t = 1024)]
        wait_t: usize,
        /// Exhaustive part only.
        #[arg(long)]
        exact_only: bool,
    },
    /// Every exact check of the acceptance suite.
    All,
}

#[derive(Subcommand, Debug)]
enum Run {
    /// KS distance of the rescaled walk endpoint to the normal law.
    Clt {
        #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
        i: Vec<usize>,
    },
    /// Radial G2 statistic against its limit law.
    G2limit {
        #[arg(long, default_value_t = 2048)]
        i: usize,
    },
    /// Sticky flow samples against the limit law.
    G3limit {
        #[arg(long, default_value_t = 4096)]
        i: usize,
    },
    /// Window products under per-coordinate and block noise.
    Microblock {
        #[arg(long, default_value_t = 4096)]
        i: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Defaults to `e^{-1}`.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 4)]
        blocks: usize,
    },
    /// Counts of a rare sign pattern against the Poisson law.
    Poisson {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        t_span: usize,
    },
    /// Web flow property and mean number of critical points.
    Web {
        #[arg(long, default_value_t = 6)]
        horizon: usize,
        #[arg(long, default_value_t = 8)]
        flow_circumference: usize,
        #[arg(long, default_value_t = 6)]
        circumference: usize,
        #[arg(long, default_value_t = 3)]
        t: usize,
    },
    /// Spectral mass by cardinality and by dyadic cells.
    Profile {
        /// `{"n": .., "values": [..]}`; overrides `--generator`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Named generator such as `majority` or `parity`.
        #[arg(long, default_value = "majority")]
        generator: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
}

/// Absorbs `parts` into one report; a single part is emitted unchanged.
fn bundle(name: &str, seed: Option<u64>, mut parts: Vec<Report>) -> Report {
    if parts.len() == 1 {
        return parts.pop().expect("one part");
    }
    let mut out = Report::new(name);
    out.seed = seed;
    for part in parts {
        out.absorb(part);
    }
    out
}

fn renamed(mut r: Report, name: String) -> Report {
    r.name = name;
    r
}

fn flows(t: usize, ps: &[Rational], limits: &Limits) -> Result<Vec<Report>> {
    let mut parts = vec![verify_flow_laws(t, ps, limits)?];
    for p in ps {
        parts.push(renamed(
            conditional_c_law(t, p, limits)?,
            format!("conditional_c.p{p}"),
        ));
    }
    parts.push(path_identity_report(t, limits)?);
    Ok(parts)
}

fn snake(t: usize, ps: &[Rational], limits: &Limits) -> Result<Vec<Report>> {
    let mut parts = Vec::new();
    for p in ps {
        let mut r = renamed(
            alive_chord_binomial_check(t, p, limits)?,
            format!("snake.p{p}"),
        );
        let aggregate = snake_aggregate_law(t, p, limits)?;
        let flow = flow_law_with(&standard_generators(Model::G3, p, 1)?, t, limits)?;
        let diffs = aggregate.differences(&flow).len();
        r.push(Check::equal_counts(
            format!("t{t}.aggregate_vs_flow_law"),
            diffs as i64,
            0,
        ));
        parts.push(r);
    }
    Ok(parts)
}

fn theorem79(n: usize, mode: SubsetMode, identities: bool, limits: &Limits) -> Result<Vec<Report>> {
    let mut parts = vec![theorem79_check(n, mode, limits)?];
    if identities {
        parts.push(resampling_identities(n, mode, limits)?);
        parts.push(zero_spectral_identity(n, limits)?);
    }
    Ok(parts)
}

fn walsh(ns: &[usize], trials: usize, seed: u64, limits: &Limits) -> Result<Vec<Report>> {
    ns.iter()
        .map(|&n| {
            Ok(renamed(
                verify_walsh_layer(n, trials, seed ^ n as u64, limits)?,
                format!("walsh.n{n}"),
            ))
        })
        .collect()
}

/// The exhaustive half of the web checks, without Monte Carlo.
fn web_exact(
    horizon: usize,
    flow_circ: usize,
    circumference: usize,
    t: usize,
    limits: &Limits,
) -> Result<Report> {
    let (fields, failures) = flow_property_exhaustive(horizon, flow_circ, limits)?;
    let mut r = Report::new("web_exact")
        .param("flow_horizon", horizon)
        .param("flow_circumference", flow_circ)
        .param("circumference", circumference)
        .param("t", t);
    r.push(Check::equal_counts(
        format!("flow_property.T{horizon}.N{flow_circ}"),
        i64::try_from(failures).unwrap_or(i64::MAX),
        0,
    ));
    r.stat("fields", i64::try_from(fields).unwrap_or(i64::MAX));
    r.stat(
        "exact_mean",
        mean_critical_count_exact(circumference, 0, t, limits)?,
    );
    Ok(r)
}

fn verify_all(seed: u64, limits: &Limits) -> Result<Vec<Report>> {
    let ps = [
        Rational::new(1.into(), 2.into()),
        Rational::new(1.into(), 3.into()),
    ];
    let mut parts = Vec::new();
    for t in 0..=12 {
        parts.push(renamed(
            verify_flow_laws(t, &ps, limits)?,
            format!("flows.t{t}"),
        ));
    }
    parts.push(path_identity_report(14, limits)?);
    for t in 0..=8 {
        for p in &ps {
            parts.push(renamed(
                conditional_c_law(t, p, limits)?,
                format!("conditional_c.t{t}.p{p}"),
            ));
        }
        for r in snake(t, &ps, limits)? {
            let name = format!("{}.t{t}", r.name);
            parts.push(renamed(r, name));
        }
    }
    for n in 1..=10 {
        parts.push(renamed(
            theorem79_check(n, SubsetMode::All, limits)?,
            format!("theorem79.n{n}"),
        ));
    }
    for n in 1..=8 {
        parts.push(renamed(
            resampling_identities(n, SubsetMode::All, limits)?,
            format!("resampling.n{n}"),
        ));
        parts.push(renamed(
            zero_spectral_identity(n, limits)?,
            format!("zero_spectral.n{n}"),
        ));
    }
    parts.push(lemma74_random_suite(200, seed, limits)?);
    parts.extend(walsh(&(0..=12).collect::<Vec<_>>(), 3, seed, limits)?);
    let rho = (-1.0f64).exp();
    parts.push(renamed(
        micro_block_report(4096, 1.0, rho, 4, limits)?,
        "microblock.i4096".into(),
    ));
    parts.push(renamed(
        micro_block_report(8, 0.5f64.sqrt(), rho, 2, limits)?,
        "microblock.i8".into(),
    ));
    parts.push(trap_deviation_report(12, &[2, 3], limits)?);
    parts.push(web_exact(6, 8, 6, 3, limits)?);
    Ok(parts)
}

fn execute(command: Command, common: &Common, limits: &Limits) -> Result<Report> {
    let seed = common.seed;
    let samples = |default: usize| common.samples.unwrap_or(default);
    let report = match command {
        Command::Verify(v) => match v {
            Verify::Flows { t, p } => bundle("verify.flows", None, flows(t, &p, limits)?),
            Verify::Theorem79 {
                n,
                subsets,
                identities,
                ..
            } => {
                let mode = match subsets {
                    Some(count) => SubsetMode::Sample { count, seed },
                    None => SubsetMode::All,
                };
                let seeded = subsets.map(|_| seed);
                bundle(
                    "verify.theorem79",
                    seeded,
                    theorem79(n, mode, identities, limits)?,
                )
            }
            Verify::Lemma74 { instances } => lemma74_random_suite(instances, seed, limits)?,
            Verify::Walsh { n, trials } => {
                bundle("verify.walsh", Some(seed), walsh(&n, trials, seed, limits)?)
            }
            Verify::Snake { t, p } => bundle("verify.snake", None, snake(t, &p, limits)?),
            Verify::Trap {
                t,
                m,
                wait_m,
                wait_t,
                exact_only,
            } => {
                let mut parts = vec![trap_deviation_report(t, &m, limits)?];
                if !exact_only {
                    parts.push(trap_waiting_report(wait_m, wait_t, samples(10_000), seed)?);
                }
                bundle("verify.trap", (!exact_only).then_some(seed), parts)
            }
            Verify::All => bundle("verify.all", Some(seed), verify_all(seed, limits)?),
        },
        Command::Run(r) => match r {
            Run::Clt { i } => clt_report(&i)?,
            Run::G2limit { i } => g2_limit_report(i)?,
            Run::G3limit { i } => g3_limit_report(i, samples(10_000), seed)?,
            Run::Microblock {
                i,
                lambda,
                rho,
                blocks,
            } => micro_block_report(
                i,
                lambda,
                rho.unwrap_or_else(|| (-1.0f64).exp()),
                blocks,
                limits,
            )?,
            Run::Poisson { n, t_span } => poisson_block_report(n, t_span, samples(10_000), seed)?,
            Run::Web {
                horizon,
                flow_circumference,
                circumference,
                t,
            } => web_report(
                (horizon, flow_circumference),
                circumference,
                t,
                samples(100_000),
                seed,
                limits,
            )?,
            Run::Profile {
                input,
                generator,
                n,
                level,
            } => {
                let f = match input {
                    Some(path) => {
                        let text = fs::read_to_string(&path).map_err(|e| {
                            noiseflow::Error::InvalidParameter(format!(
                                "cannot read {}: {e}",
                                path.display()
                            ))
                        })?;
                        Observable::from_json(&text)?
                    }
                    None => named_observable(generator.parse::<ObservableKind>()?, n, seed)?,
                };
                spectral_profile(&f, level, limits)?
            }
        },
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut limits = Limits::default();
    if let Some(cap) = cli.common.budget {
        limits.support_cap = cap;
    }
    let report = match execute(cli.command, &cli.common, &limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let artifact = match cli.common.format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv(),
    };
    let summary = report.summary();
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, artifact) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            print!("{summary}");
        }
        None => {
            print!("{artifact}");
            eprint!("{summary}");
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
