//! The `modgen` command line: sampling, exact totals, success-rate and
//! uniformity statistics, and the self-test grid.
//!
//! Exit codes: 0 ok, 2 usage, 3 give-up, 4 verification mismatch,
//! 5 uniformity failure.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use crate::counting::{load_or_build, CountingError, StackSizes, StackTable, WeightRule};
use crate::diagram::Diagram;
use crate::oracle::{
    chi_square_uniformity, count_class, enumerate_class, multiplicity_histogram, DiagramClass,
    OracleError, Verdict, ENUMERATION_CAP,
};
use crate::sampler::{sample_batch, success_rate, BatchConfig, SampleError};
use crate::selftest::{self, SelftestConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GAVE_UP: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_NOT_UNIFORM: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "modgen", version, about = "Uniform random k-noncrossing modular diagrams and cores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample diagrams.
    Gen(GenArgs),
    /// Print the exact number of target diagrams.
    Count(CountArgs),
    /// Acceptance rate of single attempts, as CSV.
    StatsSuccess(StatsSuccessArgs),
    /// Sample against the enumerated class and test uniformity.
    StatsUniformity(StatsUniformityArgs),
    /// Check tables, bijections and normalization against brute force.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Arcs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Unrestricted,
    StackCorrected,
}

impl From<Rule> for WeightRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Unrestricted => WeightRule::Unrestricted,
            Rule::StackCorrected => WeightRule::StackCorrected,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClassArgs {
    /// Maximum crossing size plus one: diagrams have no k-crossing.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    pub k: u64,
    /// Minimum stack length.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub sigma: u64,
    /// Cores (every stack of length one) instead of σ-modular diagrams.
    #[arg(long)]
    pub core: bool,
}

impl ClassArgs {
    fn k(&self) -> usize {
        self.k as usize
    }

    fn sigma(&self) -> usize {
        self.sigma as usize
    }

    fn sizes(&self) -> StackSizes {
        if self.core {
            StackSizes::Single
        } else {
            StackSizes::AtLeast(self.sigma())
        }
    }

    fn class(&self) -> DiagramClass {
        if self.core {
            DiagramClass::Core
        } else {
            DiagramClass::SigmaModular
        }
    }

    // cores are reported with sigma 1
    fn reported_sigma(&self) -> usize {
        if self.core {
            1
        } else {
            self.sigma()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restarts allowed per sample before giving up (0 = unlimited).
    #[arg(long, default_value_t = 1_000_000)]
    pub max_restarts: u64,
    #[arg(long, value_enum, default_value_t = Rule::Unrestricted)]
    pub rule: Rule,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Directory for cached tables.
    #[arg(long)]
    pub table_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Output file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub class: ClassArgs,
    /// Also count by enumeration and compare.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub table_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StatsSuccessArgs {
    /// Lengths to measure: comma-separated values or inclusive ranges
    /// `lo..hi`, e.g. `10..60,80`.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_lengths)]
    pub n: Vec<Lengths>,
    /// Stride within each `lo..hi` range.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub step: u64,
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 100_000)]
    pub attempts: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One item of an `--n` list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lengths {
    One(usize),
    Range(usize, usize),
}

fn parse_lengths(s: &str) -> Result<Lengths, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once("..") {
        None => num(s).map(Lengths::One),
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(format!("empty range {lo}..{hi}"));
            }
            Ok(Lengths::Range(lo, hi))
        }
    }
}

fn expand_lengths(items: &[Lengths], step: usize) -> Vec<usize> {
    items
        .iter()
        .flat_map(|&l| match l {
            Lengths::One(n) => vec![n],
            Lengths::Range(lo, hi) => (lo..=hi).step_by(step).collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct StatsUniformityArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub class: ClassArgs,
    /// Samples to draw (default: 200 per diagram in the class).
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub alpha: f64,
    /// Exit with status 5 unless the test passes and every diagram is seen.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Largest length checked against enumeration.
    #[arg(long, default_value_t = ENUMERATION_CAP)]
    pub max_n: usize,
    #[arg(long)]
    pub table_cache: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    GaveUp(String),
    Mismatch(String),
    NotUniform,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::GaveUp(_) => EXIT_GAVE_UP,
            Failure::Mismatch(_) => EXIT_MISMATCH,
            Failure::NotUniform => EXIT_NOT_UNIFORM,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::Cache(_)
            | CountingError::Json(_)
            | CountingError::NegativeResidual { .. } => Failure::Mismatch(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::GaveUp(_) => Failure::GaveUp(e.to_string()),
            SampleError::Normalization { .. } => Failure::Mismatch(e.to_string()),
            SampleError::Counting(c) => c.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command, writing to
/// `stdout` and `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Gen(a) => run_gen(&a, stdout),
        Command::Count(a) => run_count(&a, stdout),
        Command::StatsSuccess(a) => run_stats_success(&a, stdout),
        Command::StatsUniformity(a) => run_stats_uniformity(&a, stdout),
        Command::Selftest(a) => run_selftest(&a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::GaveUp(m) | Failure::Mismatch(m) => {
                    let _ = writeln!(stderr, "modgen: {m}");
                }
                Failure::NotUniform => {
                    let _ = writeln!(stderr, "modgen: uniformity check failed");
                }
            }
            f.code()
        }
    }
}

fn with_output(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn table_for(n: usize, class: &ClassArgs, cache: Option<&Path>) -> Result<StackTable, Failure> {
    Ok(load_or_build(cache, n, class.k(), class.sizes())?)
}

fn batch_config(s: &SamplingArgs) -> BatchConfig {
    BatchConfig {
        rule: s.rule.into(),
        max_restarts: s.max_restarts,
        verify: false,
        parallelism: s.threads,
    }
}

#[derive(Serialize)]
struct GenRecord<'a> {
    n: usize,
    k: usize,
    sigma: usize,
    arcs: Vec<[usize; 2]>,
    attempts: u64,
    seed: &'a str,
}

fn run_gen(a: &GenArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let table = table_for(a.n, &a.class, a.sampling.table_cache.as_deref())?;
    let batch = sample_batch(&table, a.count, a.sampling.seed, batch_config(&a.sampling))?;
    with_output(a.out.as_deref(), stdout, |w| {
        for (i, s) in batch.samples.iter().enumerate() {
            match a.format {
                Format::Jsonl => {
                    let seed = format!("{}:{i}", a.sampling.seed);
                    let rec = GenRecord {
                        n: a.n,
                        k: a.class.k(),
                        sigma: a.class.reported_sigma(),
                        arcs: s.diagram.arcs().iter().map(|&(i, j)| [i, j]).collect(),
                        attempts: s.attempts,
                        seed: &seed,
                    };
                    serde_json::to_writer(&mut *w, &rec)?;
                    writeln!(w)?;
                }
                Format::Arcs => writeln!(w, "{}", s.diagram)?,
            }
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct CountRecord {
    n: usize,
    k: usize,
    sigma: usize,
    class: DiagramClass,
    total: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matches: Option<bool>,
}

fn run_count(a: &CountArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let table = table_for(a.n, &a.class, a.table_cache.as_deref())?;
    let total = table.total().clone();
    let oracle: Option<BigUint> = if a.oracle {
        if a.n > ENUMERATION_CAP {
            return Err(Failure::Usage(format!(
                "--oracle needs n <= {ENUMERATION_CAP}"
            )));
        }
        Some(count_class(a.n, a.class.k(), a.class.sigma(), a.class.class())?)
    } else {
        None
    };
    let matches = oracle.as_ref().map(|o| *o == total);
    let rec = CountRecord {
        n: a.n,
        k: a.class.k(),
        sigma: a.class.reported_sigma(),
        class: a.class.class(),
        total: total.to_string(),
        oracle: oracle.map(|o| o.to_string()),
        matches,
    };
    serde_json::to_writer(&mut *stdout, &rec)?;
    writeln!(stdout)?;
    if matches == Some(false) {
        return Err(Failure::Mismatch("table total differs from enumeration".into()));
    }
    Ok(())
}

fn run_stats_success(a: &StatsSuccessArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let lengths = expand_lengths(&a.n, a.step as usize);
    let mut rows = Vec::with_capacity(lengths.len());
    for n in lengths {
        let table = table_for(n, &a.class, a.sampling.table_cache.as_deref())?;
        let stats = success_rate(&table, a.attempts, a.sampling.seed, batch_config(&a.sampling))?;
        rows.push((n, stats));
    }
    with_output(a.out.as_deref(), stdout, |w| {
        writeln!(w, "n,attempts,successes,rate")?;
        for (n, s) in &rows {
            writeln!(w, "{n},{},{},{:.6}", s.attempts, s.successes, s.success_rate())?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct UniformityReport {
    n: usize,
    k: usize,
    sigma: usize,
    class: DiagramClass,
    seed: u64,
    categories: usize,
    samples: u64,
    attempts: u64,
    statistic: f64,
    degrees_of_freedom: usize,
    alpha: f64,
    critical_value: f64,
    verdict: Verdict,
    unseen: usize,
    /// Sample count of each diagram, in enumeration order.
    multiplicities: Vec<u64>,
    /// Number of diagrams drawn exactly `m` times, keyed by `m`.
    histogram: std::collections::BTreeMap<u64, u64>,
}

fn run_stats_uniformity(a: &StatsUniformityArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if a.n > ENUMERATION_CAP {
        return Err(Failure::Usage(format!("n must be at most {ENUMERATION_CAP}")));
    }
    let targets = enumerate_class(a.n, a.class.k(), a.class.sigma(), a.class.class())?;
    let index: HashMap<&Diagram, usize> = targets.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let count = a.count.unwrap_or(200 * targets.len());
    let table = table_for(a.n, &a.class, a.sampling.table_cache.as_deref())?;
    let batch = sample_batch(&table, count, a.sampling.seed, batch_config(&a.sampling))?;
    let mut observed = vec![0u64; targets.len()];
    for s in &batch.samples {
        match index.get(&s.diagram) {
            Some(&i) => observed[i] += 1,
            None => {
                return Err(Failure::Mismatch(format!(
                    "sampled diagram outside the class: {}",
                    s.diagram
                )))
            }
        }
    }
    let chi = chi_square_uniformity(&observed, a.alpha)?;
    let unseen = observed.iter().filter(|&&o| o == 0).count();
    let report = UniformityReport {
        n: a.n,
        k: a.class.k(),
        sigma: a.class.reported_sigma(),
        class: a.class.class(),
        seed: a.sampling.seed,
        categories: chi.categories,
        samples: chi.samples,
        attempts: batch.stats.attempts,
        statistic: chi.statistic,
        degrees_of_freedom: chi.degrees_of_freedom,
        alpha: chi.alpha,
        critical_value: chi.critical_value,
        verdict: chi.verdict,
        unseen,
        histogram: multiplicity_histogram(&observed),
        multiplicities: observed,
    };
    with_output(a.out.as_deref(), stdout, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    if a.check && (report.verdict == Verdict::Fail || unseen > 0) {
        return Err(Failure::NotUniform);
    }
    Ok(())
}

fn run_selftest(a: &SelftestArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if a.max_n > ENUMERATION_CAP {
        return Err(Failure::Usage(format!("--max-n must be at most {ENUMERATION_CAP}")));
    }
    let config = SelftestConfig {
        max_n: a.max_n,
        roundtrip_max_n: a.max_n.min(10),
        ..Default::default()
    };
    let checks = selftest::run(config, a.table_cache.as_deref());
    write!(stdout, "{}", selftest::summary(&checks))?;
    if checks.iter().all(|c| c.passed()) {
        writeln!(stdout, "all checks passed")?;
        Ok(())
    } else {
        Err(Failure::Mismatch("self-test found mismatches".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["modgen"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn count_examples() {
        let (code, out, _) = call(&["count", "--n", "4", "--k", "2", "--sigma", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"total\":\"2\""), "{out}");
        let (_, out, _) = call(&["count", "--n", "4", "--k", "3", "--core", "--oracle"]);
        assert!(out.contains("\"total\":\"9\"") && out.contains("\"matches\":true"), "{out}");
        let (_, out, _) = call(&["count", "--n", "2", "--k", "2", "--core"]);
        assert!(out.contains("\"total\":\"2\""));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["gen", "--n", "4", "--k", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["gen", "--n", "4", "--sigma", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["gen"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["count", "--n", "20", "--oracle"]).0, EXIT_USAGE);
    }

    #[test]
    fn gen_degenerate_and_arcs_format() {
        let (code, out, _) = call(&["gen", "--n", "0", "--count", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
        assert!(out.contains("\"arcs\":[]"));
        let (_, out, _) = call(&["gen", "--n", "4", "--k", "2", "--count", "2", "--format", "arcs"]);
        for line in out.lines() {
            assert!(line == "4:" || line == "4: 1-4 2-3", "{line}");
        }
    }

    #[test]
    fn give_up_exits_3() {
        let (code, _, err) = call(&[
            "gen", "--n", "40", "--k", "3", "--core", "--count", "50", "--max-restarts", "1",
        ]);
        assert_eq!(code, EXIT_GAVE_UP, "{err}");
    }

    #[test]
    fn stats_success_csv() {
        let (code, out, _) = call(&["stats-success", "--n", "4,6", "--k", "2", "--attempts", "500"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "n,attempts,successes,rate");
        assert_eq!(lines[1], "4,500,500,1.000000");
        assert_eq!(lines.len(), 3);
        let (_, out, _) = call(&[
            "stats-success", "--n", "4..10,20", "--step", "3", "--k", "2", "--attempts", "10",
        ]);
        let ns: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(ns, ["4", "7", "10", "20"]);
        assert_eq!(call(&["stats-success", "--n", "9..3"]).0, EXIT_USAGE);
    }

    #[test]
    fn uniformity_inconclusive_when_small() {
        let (code, out, _) = call(&[
            "stats-uniformity", "--n", "10", "--k", "3", "--count", "10", "--check",
        ]);
        assert!(out.contains("\"verdict\": \"inconclusive\""), "{out}");
        // ten samples cannot cover every diagram
        assert_eq!(code, EXIT_NOT_UNIFORM);
    }

    #[test]
    fn small_selftest_passes() {
        let (code, out, _) = call(&["selftest", "--max-n", "6"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("all checks passed"));
    }
}
