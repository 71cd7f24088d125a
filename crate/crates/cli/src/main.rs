//! `dehnlab`: filling areas, walk counts, cogrowth and mean Dehn functions of
//! finitely presented abelian groups.

mod output;

use std::io::{self, BufRead, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dehnlab::area::{area_closed, AreaOptions, OracleConfig};
use dehnlab::binomial::ln_biguint;
use dehnlab::cogrowth::f_recurrence;
use dehnlab::combing::{CombingKind, GeodesicCombing};
use dehnlab::counting::{
    closed_walk_closed_form_z2, closed_walk_series, nonbacktracking_counts, walk_counts,
    CountOptions, K_ONE_SIDED, K_TWO_SIDED, RNG_ALGORITHM,
};
use dehnlab::dehnstats::{
    closed_word_stats, dehn_from_stats, lazy_mean_from_stats, mean_from_stats, osmean_exact,
    osmean_sampled, smean_from_stats, smean_sampled, DehnKind, DehnReport, DehnValue, EnumOptions,
    SampleOptions,
};
use dehnlab::presentation::AbelianPresentation;
use dehnlab::words::Word;
use dehnlab::{Error, Execution};

use output::{Emit, Sink};

fn long_version() -> String {
    format!(
        "{}\nrng: {RNG_ALGORITHM}\nK one-sided: {K_ONE_SIDED}\nK two-sided: {K_TWO_SIDED}\n\
         combing default: staircase on free abelian groups, bfs-lex otherwise",
        env!("CARGO_PKG_VERSION")
    )
}

#[derive(Parser, Debug)]
#[command(name = "dehnlab", version, long_version = long_version(), about)]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Areas of closed words read from standard input, one per line.
    Area(AreaArgs),
    /// Walk counts by endpoint.
    Count(CountArgs),
    /// Closed walk and non-backtracking closed walk counts.
    Cogrowth(CogrowthArgs),
    /// Dehn function and mean Dehn functions.
    Dehn(DehnArgs),
}

#[derive(Args, Debug, Serialize)]
struct GroupArgs {
    /// Builtin name (z1..z8, z10 = Z/10Z, zxz2, z/<n>) or presentation file.
    #[arg(long, default_value = "z2")]
    group: String,
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    /// Extra letters the area search may use (default: twice the longest relator).
    #[arg(long)]
    oracle_slack: Option<usize>,
    /// Nodes the area search may expand before reporting bounds.
    #[arg(long, default_value_t = OracleConfig::default().max_nodes)]
    oracle_max_nodes: u64,
}

impl OracleArgs {
    fn options(&self, exec: Execution) -> AreaOptions {
        AreaOptions {
            oracle: OracleConfig {
                slack: self.oracle_slack,
                max_nodes: self.oracle_max_nodes,
            },
            exec,
            ..AreaOptions::default()
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct AreaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    #[serde(flatten)]
    oracle: OracleArgs,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    nonbacktracking: bool,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    emit: Emit,
    /// Largest number of DP states.
    #[arg(long, default_value_t = CountOptions::default().max_states)]
    max_states: u64,
}

#[derive(Args, Debug, Serialize)]
struct CogrowthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long)]
    n_max: u64,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    emit: Emit,
    #[arg(long, default_value_t = CountOptions::default().max_states)]
    max_states: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum KindArg {
    #[value(name = "D")]
    #[serde(rename = "D")]
    D,
    Mean,
    Smean,
    Osmean,
    Lazy,
}

impl From<KindArg> for DehnKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::D => DehnKind::Dehn,
            KindArg::Mean => DehnKind::Mean,
            KindArg::Smean => DehnKind::Smean,
            KindArg::Osmean => DehnKind::Osmean,
            KindArg::Lazy => DehnKind::LazyMean,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CombingArg {
    Staircase,
    BfsLex,
}

#[derive(Args, Debug, Serialize)]
struct DehnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Word length; with `--n-min` the last of a range.
    #[arg(long)]
    n: u64,
    /// First length of a range of rows.
    #[arg(long)]
    n_min: Option<u64>,
    /// Enumerate every word.
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Estimate from this many sampled words.
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Combing closing open paths (default depends on the group).
    #[arg(long, value_enum)]
    combing: Option<CombingArg>,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    emit: Emit,
    /// Largest `(2r)^n` an exact enumeration may cover.
    #[arg(long, default_value_t = EnumOptions::default().max_words)]
    max_words: u64,
    /// Words rejection sampling may draw in total.
    #[arg(long, default_value_t = SampleOptions::default().max_trials)]
    max_trials: u64,
    #[command(flatten)]
    #[serde(flatten)]
    oracle: OracleArgs,
}

/// Failure with the process exit status it maps to.
#[derive(Debug)]
enum Failure {
    Config(String),
    Budget(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            match e {
                Error::InvalidParameter(_) | Error::Parse(_) | Error::LetterOutOfRange(..) => {
                    Failure::Config(e.to_string())
                }
                _ => Failure::Other(e.to_string()),
            }
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Config(m) => (2, m),
                Failure::Budget(m) => (3, m),
                Failure::Other(m) => (1, m),
            };
            eprintln!("dehnlab: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    let exec = Execution::default();
    let mut sink = Sink::new(cli.out.clone());
    match &cli.command {
        Command::Area(a) => area(a, &cli.command, exec, &mut sink),
        Command::Count(a) => count(a, &cli.command, exec, &mut sink),
        Command::Cogrowth(a) => cogrowth(a, &cli.command, exec, &mut sink),
        Command::Dehn(a) => dehn(a, &cli.command, exec, &mut sink),
    }?;
    sink.finish()
}

fn load_group(spec: &str) -> Outcome<AbelianPresentation> {
    if let Some(p) = AbelianPresentation::builtin(spec) {
        return Ok(p);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Failure::Config(format!("group {spec:?}: not builtin and unreadable: {e}")))?;
    AbelianPresentation::parse(&text).map_err(|e| Failure::Config(format!("group {spec:?}: {e}")))
}

fn area(a: &AreaArgs, cmd: &Command, exec: Execution, sink: &mut Sink) -> Outcome<()> {
    let p = load_group(&a.group.group)?;
    let opts = a.oracle.options(exec);
    let mut input = String::new();
    io::stdin().lock().read_to_string(&mut input)?;
    let mut rows = Vec::new();
    for (i, line) in input.as_bytes().lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let w: Word = line
            .parse()
            .map_err(|e| Failure::Config(format!("line {}: {e}", i + 1)))?;
        let res = area_closed(&p, &w, &opts).map_err(|e| match e {
            Error::NotClosed(_) | Error::LazyWord | Error::LetterOutOfRange(..) => {
                Failure::Config(format!("line {}: {e}", i + 1))
            }
            e => e.into(),
        })?;
        rows.push(vec![
            w.to_string(),
            res.lower.to_string(),
            res.upper.to_string(),
            res.exact.to_string(),
        ]);
    }
    sink.csv(cmd, &p, &["word", "lower", "upper", "exact"], &rows)
}

fn count(a: &CountArgs, cmd: &Command, exec: Execution, sink: &mut Sink) -> Outcome<()> {
    let p = load_group(&a.group.group)?;
    let opts = CountOptions {
        max_states: a.max_states,
        exec,
    };
    let table = if a.nonbacktracking {
        nonbacktracking_counts(&p, a.n, &opts)?
    } else {
        walk_counts(&p, a.n, &opts)?
    };
    match a.emit {
        Emit::Csv => {
            let rows: Vec<Vec<String>> = table
                .counts
                .iter()
                .map(|(v, c)| vec![a.n.to_string(), v.to_string(), c.to_string()])
                .collect();
            sink.csv(cmd, &p, &["n", "vertex", "count"], &rows)
        }
        Emit::Json => sink.json(cmd, &p, &table),
    }
}

#[derive(Serialize)]
struct CogrowthRow {
    n: u64,
    g_n: String,
    f_n: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

fn cogrowth(a: &CogrowthArgs, cmd: &Command, exec: Execution, sink: &mut Sink) -> Outcome<()> {
    let p = load_group(&a.group.group)?;
    let r = p.rank();
    let (g, f) = if p.is_standard_z2() {
        let f = f_recurrence(a.n_max.div_ceil(2) as usize);
        let g = (0..=a.n_max).map(closed_walk_closed_form_z2).collect();
        let f = (0..=a.n_max)
            .map(|n| {
                f.coeff(n as usize)
                    .to_biguint()
                    .expect("counts are non-negative")
            })
            .collect();
        (g, f)
    } else {
        let opts = CountOptions {
            max_states: a.max_states,
            exec,
        };
        (
            closed_walk_series(&p, a.n_max, false, &opts)?,
            closed_walk_series(&p, a.n_max, true, &opts)?,
        )
    };
    let base = ((2 * r - 1) as f64).ln();
    let rows: Vec<CogrowthRow> = g
        .iter()
        .zip(&f)
        .enumerate()
        .map(|(n, (g_n, f_n))| {
            // f_n n / (2r-1)^n in log space
            let ratio = (n > 0).then(|| {
                if f_n.bits() == 0 {
                    0.0
                } else {
                    (ln_biguint(f_n) + (n as f64).ln() - n as f64 * base).exp()
                }
            });
            CogrowthRow {
                n: n as u64,
                g_n: g_n.to_string(),
                f_n: f_n.to_string(),
                ratio,
            }
        })
        .collect();
    match a.emit {
        Emit::Csv => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.g_n.clone(),
                        r.f_n.clone(),
                        r.ratio.map(output::float).unwrap_or_default(),
                    ]
                })
                .collect();
            sink.csv(cmd, &p, &["n", "g_n", "f_n", "ratio"], &rows)
        }
        Emit::Json => sink.json(cmd, &p, &rows),
    }
}

fn dehn(a: &DehnArgs, cmd: &Command, exec: Execution, sink: &mut Sink) -> Outcome<()> {
    let p = load_group(&a.group.group)?;
    let kind = DehnKind::from(a.kind);
    let n_min = a.n_min.unwrap_or(a.n);
    if n_min > a.n {
        return Err(Failure::Config("--n-min exceeds --n".into()));
    }
    let area = a.oracle.options(exec);
    let combing = match a.combing {
        None => GeodesicCombing::default_for(&p),
        Some(c) => {
            let k = match c {
                CombingArg::Staircase => CombingKind::Staircase,
                CombingArg::BfsLex => CombingKind::BfsLex,
            };
            GeodesicCombing::new(&p, k)?
        }
    };
    let reports: Vec<DehnReport> = match (a.samples, a.exact) {
        (Some(samples), _) => {
            let seed = a
                .seed
                .ok_or_else(|| Failure::Config("--samples needs --seed".into()))?;
            let opts = SampleOptions {
                max_trials: a.max_trials,
                area,
                exec,
                ..SampleOptions::default()
            };
            (n_min..=a.n)
                .map(|n| match kind {
                    DehnKind::Osmean => osmean_sampled(&p, &combing, n, samples, seed, &opts),
                    DehnKind::Smean => smean_sampled(&p, n, samples, seed, &opts),
                    _ => Err(Error::InvalidParameter(format!(
                        "sampling supports osmean and smean, not {kind}"
                    ))),
                })
                .collect::<Result<_, _>>()?
        }
        (None, true) => {
            let opts = EnumOptions {
                max_words: a.max_words,
                area,
                exec,
            };
            if kind == DehnKind::Osmean {
                (n_min..=a.n)
                    .map(|n| osmean_exact(&p, &combing, n, &opts))
                    .collect::<Result<_, _>>()?
            } else {
                let stats = closed_word_stats(&p, a.n, &opts)?;
                let all = match kind {
                    DehnKind::Dehn => dehn_from_stats(&stats),
                    DehnKind::Smean => stats.iter().map(smean_from_stats).collect(),
                    DehnKind::Mean => (0..stats.len())
                        .map(|i| mean_from_stats(&stats[..=i]))
                        .collect(),
                    DehnKind::LazyMean => (0..stats.len())
                        .map(|i| lazy_mean_from_stats(&stats[..=i]))
                        .collect(),
                    DehnKind::Osmean => unreachable!(),
                };
                all.into_iter().skip(n_min as usize).collect()
            }
        }
        (None, false) => return Err(Failure::Config("pass --exact or --samples".into())),
    };
    match a.emit {
        Emit::Csv => {
            let rows: Vec<Vec<String>> = reports.iter().map(dehn_row).collect();
            sink.csv(
                cmd,
                &p,
                &[
                    "n",
                    "kind",
                    "value",
                    "lower",
                    "upper",
                    "samples",
                    "seed",
                    "normalized",
                ],
                &rows,
            )
        }
        Emit::Json => sink.json(cmd, &p, &reports),
    }
}

fn dehn_row(r: &DehnReport) -> Vec<String> {
    let (value, lower, upper, samples, seed) = match &r.value {
        DehnValue::Exact(q) => (
            q.to_string(),
            q.to_string(),
            q.to_string(),
            String::new(),
            String::new(),
        ),
        DehnValue::Bounds { lower, upper } => (
            String::new(),
            lower.to_string(),
            upper.to_string(),
            String::new(),
            String::new(),
        ),
        DehnValue::Sampled(s) => (
            output::float(s.estimate),
            output::float(s.ci_low),
            output::float(s.ci_high),
            s.samples.to_string(),
            s.seed.to_string(),
        ),
    };
    vec![
        r.n.to_string(),
        r.kind.to_string(),
        value,
        lower,
        upper,
        samples,
        seed,
        r.normalized.map(output::float).unwrap_or_default(),
    ]
}
