//! `pcn-lab`: classification, sufficient conditions, case-analysis pipelines,
//! exact counts and certificates for primitive completely normal elements.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use pcn_core::arith::{FactorBudget, RobinConstant};
use pcn_core::bounds::{
    self, evaluate, lm_ranges, pipeline_theorem0, pipeline_theorem1, table2, BoundsError,
    ConditionId, EvalOptions, LmPair, LmqTriple, NqPair, Params, Table1Row, Theorem0Config,
    Theorem0Result, Theorem1Config, Theorem1Result,
};
use pcn_core::chars::{chars_selftest, CharError};
use pcn_core::classify::classify_pair;
use pcn_core::search::{
    check_counts, count_cn_pcn, find_pcn, verify_certificate, CountConfig, PcnCertificate,
    SearchConfig, SearchError, Strategy, ENUMERATION_CAP, TRIAL_BUDGET,
};

use report::{csv_block, csv_sections, ok, Envelope, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser)]
#[command(
    name = "pcn-lab",
    version,
    about = "Primitive completely normal elements of finite fields"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Output format
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "text",
        env = "PCN_LAB_FORMAT"
    )]
    format: Format,
    /// Starting precision of real enclosures (raised automatically until verdicts separate)
    #[arg(long, global = true, default_value_t = 64, env = "PCN_LAB_PRECISION_BITS",
          value_parser = clap::value_parser!(u32).range(8..))]
    precision_bits: u32,
    /// Largest field `count` will enumerate; `search` is exhaustive below it
    #[arg(long, global = true, default_value_t = ENUMERATION_CAP, env = "PCN_LAB_ENUMERATION_CAP",
          value_parser = clap::value_parser!(u64).range(1..))]
    enumeration_cap: u64,
    /// Pollard rho iterations per composite cofactor [default: 10^7; 2*10^8 for thm0 and table2]
    #[arg(long, global = true, env = "PCN_LAB_FACTORING_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    factoring_budget: Option<u64>,
    /// Seed for random search
    #[arg(long, global = true, default_value_t = 0, env = "PCN_LAB_SEED")]
    seed: u64,
    /// Trial budget for search
    #[arg(long, global = true, default_value_t = TRIAL_BUDGET, env = "PCN_LAB_MAX_TRIALS",
          value_parser = clap::value_parser!(u64).range(1..))]
    max_trials: u64,
    /// Largest n scanned for Table 1
    #[arg(long, global = true, default_value_t = 1212, env = "PCN_LAB_N_MAX",
          value_parser = clap::value_parser!(u64).range(2..))]
    n_max: u64,
    /// q0 is the least prime power >= n + q0_offset
    #[arg(long, global = true, default_value_t = 2, env = "PCN_LAB_Q0_OFFSET",
          value_parser = clap::value_parser!(u64).range(1..))]
    q0_offset: u64,
    /// Upper end of the Robin crossover scan
    #[arg(long, global = true, default_value_t = 5000, env = "PCN_LAB_ROBIN_SCAN_LIMIT",
          value_parser = clap::value_parser!(u64).range(3..))]
    robin_scan_limit: u64,
    /// Worker threads (0: one per core)
    #[arg(long, global = true, default_value_t = 0, env = "PCN_LAB_THREADS")]
    threads: usize,
    /// Print the statement and method behind each verdict
    #[arg(long, global = true, env = "PCN_LAB_EXPLAIN")]
    explain: bool,
}

/// Settings that determine a command's output (thread count does not).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub format: Format,
    pub precision_bits: u32,
    pub enumeration_cap: u64,
    pub factoring_budget: Option<u64>,
    pub seed: u64,
    pub max_trials: u64,
    pub n_max: u64,
    pub q0_offset: u64,
    pub robin_scan_limit: u64,
    pub explain: bool,
}

impl From<&RunArgs> for RunConfig {
    fn from(a: &RunArgs) -> Self {
        RunConfig {
            format: a.format,
            precision_bits: a.precision_bits,
            enumeration_cap: a.enumeration_cap,
            factoring_budget: a.factoring_budget,
            seed: a.seed,
            max_trials: a.max_trials,
            n_max: a.n_max,
            q0_offset: a.q0_offset,
            robin_scan_limit: a.robin_scan_limit,
            explain: a.explain,
        }
    }
}

impl RunConfig {
    fn budget(&self) -> FactorBudget {
        self.factoring_budget
            .map(FactorBudget::new)
            .unwrap_or_default()
    }

    fn opts(&self) -> EvalOptions {
        EvalOptions {
            precision_bits: self.precision_bits,
            budget: self.budget(),
        }
    }

    fn thm1(&self) -> Theorem1Config {
        Theorem1Config {
            n_max: self.n_max,
            q0_offset: self.q0_offset,
            robin_scan_limit: self.robin_scan_limit,
            opts: self.opts(),
        }
    }

    fn thm0(&self) -> Theorem0Config {
        let d = Theorem0Config::default();
        Theorem0Config {
            opts: EvalOptions {
                precision_bits: self.precision_bits,
                budget: self
                    .factoring_budget
                    .map(FactorBudget::new)
                    .unwrap_or(d.opts.budget),
            },
            ..d
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PipelineKind {
    Thm1,
    Thm0,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RobinArg {
    ExpGamma,
    Exp0578,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Is every normal element of F_{q^n} over F_q completely normal?
    Classify {
        q: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Evaluate one sufficient condition: pair conditions take `q n`, triple
    /// conditions `l m q`, Robin forms `l m`
    Bounds {
        condition: String,
        params: Vec<u64>,
        /// Constant in the Robin-substituted COND2_ROBIN
        #[arg(long, value_enum, default_value = "exp-gamma")]
        robin_constant: RobinArg,
    },
    /// Run a full case analysis
    Pipeline {
        #[arg(value_enum)]
        which: PipelineKind,
    },
    /// Count CN_q(n) and PCN_q(n) by enumeration
    Count {
        q: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Find and certify a primitive completely normal element
    Search {
        q: u64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// [default: exhaustive when q^n is within the enumeration cap, else random]
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Independent random streams
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        streams: u32,
    },
    /// Check a certificate file (`-` for standard input)
    Verify { file: PathBuf },
    /// Character sums, Gauss sums and characteristic functions on F_{p^{en}}
    CharsSelftest {
        p: u64,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        e: u32,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// The (n, q0, q1) table of the q > n analysis
    Table1,
    /// Residual pairs of both analyses, compared with the printed list
    Table2,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Chars(#[from] CharError),
    #[error(transparent)]
    Arith(#[from] pcn_core::arith::ArithError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.run.threads > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.run.threads)
            .build_global();
    }
    let config = RunConfig::from(&cli.run);
    match dispatch(&cli.command, &config) {
        Ok(outcome) => {
            let (out, err) = outcome.render(config.format, config.explain);
            print!("{out}");
            eprint!("{err}");
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Classify { q, n } => classify(*q, *n, cfg),
        Command::Bounds {
            condition,
            params,
            robin_constant,
        } => bound(condition, params, *robin_constant, cfg),
        Command::Pipeline {
            which: PipelineKind::Thm1,
        } => thm1(cfg),
        Command::Pipeline {
            which: PipelineKind::Thm0,
        } => thm0(cfg),
        Command::Count { q, n } => count(*q, *n, cfg),
        Command::Search {
            q,
            n,
            strategy,
            streams,
        } => search(*q, *n, *strategy, *streams, cfg),
        Command::Verify { file } => verify(file, cfg),
        Command::CharsSelftest { p, e, n } => selftest(*p, *e, *n, cfg),
        Command::Table1 => table_1(cfg),
        Command::Table2 => table_2(cfg),
    }
}

fn classify(q: u64, n: u64, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = classify_pair(q, n)?;
    let explain = vec![
        "F_{q^n}/F_q is completely basic iff every prime r | n has r not dividing ord_{(n/r)'}(q), \
         where ' removes all factors p"
            .to_string(),
        "m = 1, m | q - 1, and n prime or a prime square are sufficient and reported before the general test, \
         m being the p-free part of n"
            .to_string(),
    ];
    let mut o = Outcome::new("classify", cfg, &c, explain);
    let (basic, reason) = match c.verdict {
        pcn_core::classify::BasicVerdict::CompletelyBasic(r) => ("true", r.as_str()),
        pcn_core::classify::BasicVerdict::NotCompletelyBasic => ("false", ""),
    };
    o.csv = csv_block(
        &["q", "n", "m", "completely_basic", "reason"],
        [vec![
            q.to_string(),
            n.to_string(),
            c.m.to_string(),
            basic.into(),
            reason.into(),
        ]],
    );
    o.text = format!("{}\n", c.verdict);
    Ok(o)
}

fn parse_params(cond: ConditionId, v: &[u64]) -> Result<Params, CliError> {
    let kind = cond.params_kind();
    let bad = || {
        CliError::Usage(format!(
            "{} takes {kind} parameters ({})",
            cond.name(),
            param_names(kind)
        ))
    };
    let small = |x: u64| u32::try_from(x).map_err(|_| bad());
    match (kind, v) {
        ("pair", &[q, n]) => Ok(Params::Pair { q, n }),
        ("triple", &[l, m, q]) => Ok(Params::Triple { l: small(l)?, m, q }),
        ("degree", &[l, m]) => Ok(Params::Degree { l: small(l)?, m }),
        _ => Err(bad()),
    }
}

fn param_names(kind: &str) -> &'static str {
    match kind {
        "pair" => "q n",
        "triple" => "l m q",
        _ => "l m",
    }
}

fn bound(
    name: &str,
    params: &[u64],
    robin: RobinArg,
    cfg: &RunConfig,
) -> Result<Outcome, CliError> {
    let cond = ConditionId::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = ConditionId::ALL.iter().map(|c| c.name()).collect();
        CliError::Usage(format!(
            "unknown condition {name:?}; expected one of {}",
            names.join(", ")
        ))
    })?;
    let params = parse_params(cond, params)?;
    let robin = match robin {
        RobinArg::ExpGamma => RobinConstant::ExpGamma,
        RobinArg::Exp0578 => RobinConstant::Exp0578,
    };
    let r = evaluate(cond, params, robin, cfg.opts())?;
    let explain = vec![
        format!("{}: {}", cond.name(), cond.formula()),
        if r.exact {
            "verdict by exact rational comparison; the enclosures are for display".to_string()
        } else {
            format!(
                "verdict by interval enclosures of both sides that separate at {} bits",
                r.lhs.precision_bits.max(r.rhs.precision_bits)
            )
        },
    ];
    let mut o = Outcome::new("bounds", cfg, &r, explain);
    o.failed = !r.holds;
    let p = params_text(&r.params);
    o.csv = csv_block(
        &[
            "condition",
            "params",
            "relation",
            "lhs_lower",
            "lhs_upper",
            "rhs_lower",
            "rhs_upper",
            "holds",
        ],
        [vec![
            cond.name().to_string(),
            p.clone(),
            format!("{:?}", r.relation).to_lowercase(),
            format!("{:e}", r.lhs.lower_f64()),
            format!("{:e}", r.lhs.upper_f64()),
            format!("{:e}", r.rhs.lower_f64()),
            format!("{:e}", r.rhs.upper_f64()),
            r.holds.to_string(),
        ]],
    );
    o.text = format!(
        "{} at {}: {}\n  lhs in [{:e}, {:e}]\n  rhs in [{:e}, {:e}]\n",
        cond.name(),
        p,
        if r.holds { "holds" } else { "fails" },
        r.lhs.lower_f64(),
        r.lhs.upper_f64(),
        r.rhs.lower_f64(),
        r.rhs.upper_f64()
    );
    Ok(o)
}

fn params_text(p: &Params) -> String {
    match *p {
        Params::Pair { q, n } => format!("q={q} n={n}"),
        Params::Triple { l, m, q } => format!("l={l} m={m} q={q}"),
        Params::Degree { l, m } => format!("l={l} m={m}"),
    }
}

fn table1_csv(rows: &[Table1Row]) -> String {
    csv_block(
        &["n", "q0", "q1"],
        rows.iter()
            .map(|r| vec![r.n.to_string(), r.q0.to_string(), r.q1.to_string()]),
    )
}

fn pairs_csv(v: &[NqPair]) -> String {
    csv_block(
        &["n", "q"],
        v.iter().map(|p| vec![p.n.to_string(), p.q.to_string()]),
    )
}

fn triples_csv(v: &[LmqTriple]) -> String {
    csv_block(
        &["l", "m", "q"],
        v.iter()
            .map(|t| vec![t.l.to_string(), t.m.to_string(), t.q.to_string()]),
    )
}

fn pairs_text(v: &[NqPair]) -> String {
    v.iter()
        .map(|p| format!("({},{})", p.n, p.q))
        .collect::<Vec<_>>()
        .join(" ")
}

fn triples_text(v: &[LmqTriple]) -> String {
    v.iter()
        .map(|t| format!("({},{},{})", t.l, t.m, t.q))
        .collect::<Vec<_>>()
        .join(" ")
}

fn lm_text(v: &[LmPair], step: u64) -> String {
    lm_ranges(v, step)
        .into_iter()
        .map(|(l, a, b)| {
            if a == b {
                format!("({l},{a})")
            } else {
                format!("({l},{a}..{b})")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn robin_label(c: RobinConstant) -> &'static str {
    match c {
        RobinConstant::ExpGamma => "e^gamma",
        RobinConstant::Exp0578 => "e^0.578",
    }
}

fn thm1_explain() -> Vec<String> {
    vec![
        "table1: for n not prime or a prime square, q0 is the least prime power >= n + 2 and q1 the least \
         prime power from which COND2 holds for all larger q; rows are the n where COND2 fails at q0"
            .into(),
        "region: all prime powers q with q0 <= q < q1 per row".into(),
        "cond3_c16_survivors: region pairs where COND3 with W(q') <= c_{q',16} q^(n/16) fails".into(),
        "cond3_exact_w_survivors: of those, pairs where COND3 fails with W(q') from the factorization of q^n - 1"
            .into(),
        "not_completely_basic: survivors that the completely-basic criterion does not settle".into(),
        "robin crossover: last n <= scan limit where COND2_ROBIN fails at q = n + 2".into(),
    ]
}

fn thm1_text(r: &Theorem1Result) -> String {
    let mut s = format!("table1 ({} rows)\n", r.table1.len());
    for row in &r.table1 {
        s += &format!("{:>5} {:>5} {:>6}\n", row.n, row.q0, row.q1);
    }
    s += &format!("region pairs: {}\n", r.region.len());
    s += &format!("cond3 (c16) survivors: {}\n", r.after_c16.len());
    s += &format!("cond3 (exact W) survivors: {}\n", r.after_exact_w.len());
    s += &format!(
        "not completely basic: {}  {}\n",
        r.after_basic_filter.len(),
        pairs_text(&r.after_basic_filter)
    );
    for c in &r.robin {
        let last = c.last_violation.map_or("none".into(), |n| n.to_string());
        s += &format!(
            "cond2 robin ({}) last violation up to {}: {last}\n",
            robin_label(c.constant),
            c.scan_limit
        );
    }
    let other = if r.config.q0_offset == 2 { 1 } else { 2 };
    let alt: Vec<String> = r
        .q0_reading_diff
        .iter()
        .filter(|x| !r.table1.contains(x))
        .map(|x| format!("({},{},{})", x.n, x.q0, x.q1))
        .collect();
    if !alt.is_empty() {
        s += &format!(
            "rows that differ with q0 >= n + {other}: {}\n",
            alt.join(" ")
        );
    }
    s
}

fn thm1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = pipeline_theorem1(cfg.thm1())?;
    let mut o = Outcome::new("pipeline thm1", cfg, &r, thm1_explain());
    let counts = csv_block(
        &["stage", "count"],
        [
            ("region", r.region.len()),
            ("cond3_c16_survivors", r.after_c16.len()),
            ("cond3_exact_w_survivors", r.after_exact_w.len()),
            ("not_completely_basic", r.after_basic_filter.len()),
        ]
        .map(|(a, b)| vec![a.to_string(), b.to_string()]),
    );
    o.csv = format!("{}\n{counts}", table1_csv(&r.table1));
    o.text = thm1_text(&r);
    Ok(o)
}

fn thm0_text(r: &Theorem0Result) -> String {
    let mut s = String::new();
    s += &format!(
        "p odd, Robin-form exceptions ({}): {}\n",
        r.podd_robin_exceptions.len(),
        lm_text(&r.podd_robin_exceptions, 1)
    );
    s += &format!("p odd triples: {}\n", triples_text(&r.podd_triples));
    s += &format!(
        "p odd triples, every characteristic: {}\n",
        triples_text(&r.podd_triples_all)
    );
    s += &format!(
        "p odd, not completely basic: {}\n",
        triples_text(&r.podd_all_nonbasic)
    );
    s += &format!(
        "p = 2, Robin-form exceptions ({}): {}\n",
        r.p2_robin_exceptions.len(),
        lm_text(&r.p2_robin_exceptions, 2)
    );
    s += &format!("p = 2 triples: {}\n", triples_text(&r.p2_triples));
    s += &format!(
        "p = 2, not completely basic: {}\n",
        triples_text(&r.p2_nonbasic)
    );
    let last = r
        .a12_robin_last_violation
        .map_or("none".into(), |m| m.to_string());
    s += &format!("a = 12 Robin form, last violation: {last}\n");
    s += &format!("a = 12 exceptions: {}\n", r.a12_exceptions.len());
    s += &format!(
        "a = 12 after m | q - 1 filter: {}\n",
        r.a12_after_filter.len()
    );
    s += &format!(
        "a = 12 main inequality failures: {}\n",
        triples_text(&r.a12_main_failures)
    );
    s
}

fn thm0(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = pipeline_theorem0(cfg.thm0())?;
    let explain = vec![
        "n = p^l m with p not dividing m; each family first scans the Robin form in (l, m), then the exact \
         condition at prime powers q > m"
            .into(),
        "p odd: COND_2_P_ODD, q scanned upward from max(m + 2, 7), stopping at the first q that satisfies it; \
         the all-characteristics list scans each characteristic separately"
            .into(),
        "p = 2, l >= 2: COND_3_P2 at powers of 2 with q >= max(m + 1, 8)".into(),
        "p = 2, l = 1: COND_A12 at q >= max(m + 2, 8), then the m | q - 1 filter, then the exact inequality \
         with CN bounded by the general formula"
            .into(),
    ];
    let mut o = Outcome::new("pipeline thm0", cfg, &r, explain);
    let lm_csv = |v: &[LmPair]| {
        csv_block(
            &["l", "m"],
            v.iter().map(|x| vec![x.l.to_string(), x.m.to_string()]),
        )
    };
    let counts = csv_block(
        &["stage", "count"],
        [
            ("p_odd_robin_exceptions", r.podd_robin_exceptions.len()),
            ("p_odd_triples", r.podd_triples.len()),
            ("p_odd_not_completely_basic", r.podd_all_nonbasic.len()),
            ("p2_robin_exceptions", r.p2_robin_exceptions.len()),
            ("p2_triples", r.p2_triples.len()),
            ("p2_not_completely_basic", r.p2_nonbasic.len()),
            ("a12_exceptions", r.a12_exceptions.len()),
            ("a12_after_m_divides_q_minus_1", r.a12_after_filter.len()),
            ("a12_main_inequality_failures", r.a12_main_failures.len()),
        ]
        .map(|(a, b)| vec![a.to_string(), b.to_string()]),
    );
    o.csv = csv_sections(&[
        ("stage counts", counts),
        ("p_odd_robin_exceptions", lm_csv(&r.podd_robin_exceptions)),
        ("p_odd_triples", triples_csv(&r.podd_triples)),
        (
            "p_odd_triples_all_characteristics",
            triples_csv(&r.podd_triples_all),
        ),
        (
            "p_odd_not_completely_basic",
            triples_csv(&r.podd_all_nonbasic),
        ),
        ("p2_robin_exceptions", lm_csv(&r.p2_robin_exceptions)),
        ("p2_triples", triples_csv(&r.p2_triples)),
        ("p2_not_completely_basic", triples_csv(&r.p2_nonbasic)),
        ("a12_exceptions", triples_csv(&r.a12_exceptions)),
        (
            "a12_after_m_divides_q_minus_1",
            triples_csv(&r.a12_after_filter),
        ),
        (
            "a12_main_inequality_failures",
            triples_csv(&r.a12_main_failures),
        ),
    ]);
    o.text = thm0_text(&r);
    Ok(o)
}

fn table_1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = bounds::table1(cfg.n_max, cfg.q0_offset, cfg.opts())?;
    let mut o = Outcome::new("table1", cfg, &rows, thm1_explain()[..1].to_vec());
    o.csv = table1_csv(&rows);
    o.text = rows
        .iter()
        .map(|r| format!("{:>5} {:>5} {:>6}\n", r.n, r.q0, r.q1))
        .collect();
    Ok(o)
}

fn table_2(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t1 = pipeline_theorem1(cfg.thm1())?;
    let t0 = pipeline_theorem0(cfg.thm0())?;
    let t = table2(&t1, &t0);
    let explain = vec![
        "pairs: union of the pairs left by the q > n analysis and the non-completely-basic triples left by \
         the q > m analysis, as (n, q) with n = p^l m"
            .into(),
    ];
    let mut o = Outcome::new("table2", cfg, &t, explain);
    o.csv = pairs_csv(&t.pairs);
    let mut s = format!("pairs ({}): {}\n", t.pairs.len(), pairs_text(&t.pairs));
    s += &format!(
        "printed but not derived: {}\n",
        pairs_text(&t.printed_not_derived)
    );
    s += &format!(
        "derived but not printed: {}\n",
        pairs_text(&t.derived_not_printed)
    );
    s += &format!(
        "printed more than once: {}\n",
        pairs_text(&t.printed_duplicates)
    );
    o.text = s;
    Ok(o)
}

fn count(q: u64, n: u64, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let count_cfg = CountConfig {
        enumeration_cap: cfg.enumeration_cap,
        budget: cfg.budget(),
    };
    let r = count_cn_pcn(q, n, &count_cfg)?;
    let checks = check_counts(&r, cfg.budget())?;
    #[derive(Serialize)]
    struct CountResult<'a> {
        counts: &'a pcn_core::search::CountReport,
        checks: &'a pcn_core::search::CountChecks,
    }
    let explain = vec![
        "x is normal over F_{q^l} iff gcd(X^{n/l} - 1, sum_i x^{q^{li}} X^i) = 1; CN counts x normal over \
         F_{q^l} for every l | n, l < n"
            .into(),
        "PCN also requires x^{(q^n-1)/r} != 1 for every prime r | q^n - 1".into(),
        "checks: #primitive = phi(q^n - 1); #normal over F_{q^l} = phi_l(X^{n/l} - 1); CN >= every positive \
         lower bound (general, ip1, ip2, ip3 where defined); |PCN - theta(q') CN| <= q^{n/2} W(q') theta(q') \
         prod_l W_l theta_l; PCN > 0; classifier verdict = (CN = #normal over F_q)"
            .into(),
    ];
    let mut o = Outcome::new(
        "count",
        cfg,
        &CountResult {
            counts: &r,
            checks: &checks,
        },
        explain,
    );
    o.failed = !checks.pass();
    o.csv = csv_block(
        &["q", "n", "size", "primitive", "cn", "pcn", "checks"],
        [vec![
            q.to_string(),
            n.to_string(),
            r.size.to_string(),
            r.primitive.to_string(),
            r.cn.to_string(),
            r.pcn.to_string(),
            ok(checks.pass()).to_string(),
        ]],
    );
    let mut s = format!("q = {q}, n = {n}: {} elements\n", r.size);
    s += &format!(
        "primitive: {} [{}]\n",
        r.primitive,
        ok(checks.primitive_count)
    );
    for c in &r.normal {
        s += &format!("normal over F_(q^{}): {}\n", c.l, c.count);
    }
    s += &format!("normal counts match phi_l [{}]\n", ok(checks.normal_counts));
    s += &format!("CN = {}\nPCN = {}\n", r.cn, r.pcn);
    for b in &checks.bounds {
        s += &format!(
            "CN >= {:?} bound {} [{}]\n",
            b.variant,
            b.bound,
            ok(b.holds)
        );
    }
    s += &format!("two-sided estimate [{}]\n", ok(checks.two_sided));
    s += &format!("PCN > 0 [{}]\n", ok(checks.pcn_positive));
    s += &format!(
        "classifier agrees with the counts [{}]\n",
        ok(checks.classifier_agrees)
    );
    o.text = s;
    Ok(o)
}

fn search(
    q: u64,
    n: u64,
    strategy: Option<StrategyArg>,
    streams: u32,
    cfg: &RunConfig,
) -> Result<Outcome, CliError> {
    let strategy = match strategy {
        Some(StrategyArg::Exhaustive) => Strategy::Exhaustive,
        Some(StrategyArg::Random) => Strategy::Random,
        None => {
            let small = u32::try_from(n)
                .ok()
                .and_then(|n| q.checked_pow(n))
                .is_some_and(|s| s <= cfg.enumeration_cap);
            if small {
                Strategy::Exhaustive
            } else {
                Strategy::Random
            }
        }
    };
    let sc = SearchConfig {
        strategy,
        seed: cfg.seed,
        streams,
        max_trials: cfg.max_trials,
        budget: cfg.budget(),
    };
    let cert = find_pcn(q, n, &sc)?;
    let explain = vec![
        "primitive: x^{(q^n-1)/r} != 1 for every prime r | q^n - 1, tested first".into(),
        "completely normal: gcd(X^{n/l} - 1, sum_i x^{q^{li}} X^i) = 1 for every l | n, l < n".into(),
        format!("strategy {strategy}: exhaustive scans coordinate indices upward from 1; random draws uniform \
                 nonzero elements from ChaCha8 streams (seed, stream)"),
    ];
    let mut o = Outcome::new("search", cfg, &cert, explain);
    let element: Vec<String> = cert.element.iter().map(u64::to_string).collect();
    let opt = |x: Option<u64>| x.map_or(String::new(), |v| v.to_string());
    o.csv = csv_block(
        &["q", "n", "strategy", "seed", "stream", "trial", "element"],
        [vec![
            q.to_string(),
            n.to_string(),
            strategy.to_string(),
            opt(cert.search.seed),
            opt(cert.search.stream),
            cert.search.trial.to_string(),
            element.join(" "),
        ]],
    );
    let modulus: Vec<String> = cert.modulus.iter().map(u64::to_string).collect();
    let mut s = format!(
        "F_{{{q}^{n}}} = F_{}[x]/(f), f coefficients (ascending): {}\n",
        cert.p,
        modulus.join(" ")
    );
    s += &format!("element coordinates: {}\n", element.join(" "));
    s += &format!(
        "found by {} search, trial {}{}\n",
        strategy,
        cert.search.trial,
        match (cert.search.seed, cert.search.stream) {
            (Some(seed), Some(stream)) => format!(", seed {seed}, stream {stream}"),
            _ => String::new(),
        }
    );
    s += &format!(
        "primes of q^n - 1 checked: {}\n",
        cert.primitivity_checks.len()
    );
    let ls: Vec<String> = cert
        .normality_divisors
        .iter()
        .map(|c| c.l.to_string())
        .collect();
    s += &format!("subfields checked (l): {}\n", ls.join(" "));
    o.text = s;
    Ok(o)
}

/// A certificate file holds either a bare certificate or a `search` envelope.
fn read_certificate(file: &PathBuf) -> Result<PcnCertificate, CliError> {
    let text = if file.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io("stdin".into(), e))?
    } else {
        std::fs::read_to_string(file).map_err(|e| CliError::Io(file.display().to_string(), e))?
    };
    if let Ok(c) = PcnCertificate::from_json(&text) {
        return Ok(c);
    }
    serde_json::from_str::<Envelope<PcnCertificate>>(&text)
        .map(|e| e.result)
        .map_err(|e| CliError::Usage(format!("{} is not a certificate: {e}", file.display())))
}

fn verify(file: &PathBuf, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cert = read_certificate(file)?;
    let v = verify_certificate(&cert);
    let explain = vec![
        "rebuilds F_p[x]/(f) from the certificate, checks f is irreducible of degree e n, every listed factor \
         is prime and their product is q^n - 1, recomputes every power test and every gcd test, and compares \
         them with the recorded outcomes"
            .into(),
    ];
    let mut o = Outcome::new("verify", cfg, &v, explain);
    o.failed = !v.valid;
    o.csv = csv_block(
        &["valid", "code", "detail"],
        if v.valid {
            vec![vec!["true".to_string(), String::new(), String::new()]]
        } else {
            v.rejections
                .iter()
                .map(|r| vec!["false".to_string(), code_name(r.code), r.detail.clone()])
                .collect()
        },
    );
    let mut s = format!("{}\n", if v.valid { "valid" } else { "invalid" });
    for r in &v.rejections {
        s += &format!("  {}: {}\n", code_name(r.code), r.detail);
    }
    o.text = s;
    Ok(o)
}

fn code_name(c: pcn_core::search::RejectionCode) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn selftest(p: u64, e: u32, n: u32, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = chars_selftest(p, e, n)?;
    let explain = vec![
        "orthogonality: sum_x chi(x) and sum_x psi(x) vanish for nontrivial characters within 1e-9 |group|, \
         and the dual sums likewise"
            .into(),
        "Gauss sums: |G(chi, psi)| = q^{n/2} within 1e-6 relative for every pair of nontrivial characters".into(),
        "omega equals the primitivity indicator and Omega_l the normality indicator over F_{q^l} within 1e-9 \
         at every point"
            .into(),
        "additive characters of F-order F number phi_l(F) for every F | X^{n/l} - 1".into(),
        "sum_x prod_l Omega_l(x) = CN and sum_x omega(x) prod_l Omega_l(x) = PCN".into(),
    ];
    let mut o = Outcome::new("chars-selftest", cfg, &r, explain);
    o.failed = !r.pass;
    let f = &r.field;
    let v = &r.view;
    let rows: Vec<(String, String, bool)> = [
        (
            "orthogonality".to_string(),
            format!(
                "{:e}",
                f.orthogonality
                    .mult_max_dev
                    .max(f.orthogonality.add_max_dev)
            ),
            f.orthogonality.pass,
        ),
        (
            "gauss".to_string(),
            format!("{:e}", f.gauss.max_rel_dev),
            f.gauss.pass,
        ),
        (
            "omega".to_string(),
            format!("{:e}", f.omega.max_dev),
            f.omega.pass,
        ),
    ]
    .into_iter()
    .chain(v.normality.iter().map(|x| {
        (
            format!("normality_l{}", x.l),
            format!("{:e}", x.max_dev),
            x.pass,
        )
    }))
    .chain(v.orders.iter().map(|x| {
        (
            format!("order_counts_l{}", x.l),
            x.mismatches.len().to_string(),
            x.pass,
        )
    }))
    .chain([(
        "identity".to_string(),
        format!("{:e}", (v.identity.cn_sum - v.identity.cn as f64).abs()),
        v.identity.pass,
    )])
    .collect();
    o.csv = csv_block(
        &["check", "deviation", "pass"],
        rows.iter()
            .map(|(a, b, c)| vec![a.clone(), b.clone(), c.to_string()]),
    );
    let mut s = format!(
        "F_{{{p}^{}}} viewed over F_{{{}}}: {}\n",
        e * n,
        v.q,
        ok(r.pass)
    );
    for (a, b, c) in &rows {
        s += &format!("  {a:<18} {b:>12} [{}]\n", ok(*c));
    }
    o.text = s;
    Ok(o)
}
