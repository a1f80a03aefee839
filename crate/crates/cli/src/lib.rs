//! The `exact-rand` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | a conformance check failed                |
//! | 2    | invalid flags or unsupported distribution |
//! | 3    | sampler or I/O error                      |

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use exact_rand::conformance::{self, Check, DiscreteSampler, DEFAULT_SEED};
use exact_rand::creal::{to_decimal, Decimal};
use exact_rand::entropy::{
    read_tape, write_tape, BitSource, RecordingSource, SeededSource, TapeSource,
};
use exact_rand::lazyreal::{max2, LazyUniform};
use exact_rand::{samplers, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SAMPLER: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "exact-rand",
    version,
    about = "Exact random variates and their conformance checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples and print them as decimals.
    Sample(SampleArgs),
    /// Run the conformance suite.
    Check(CheckArgs),
    /// Print exact probability brackets by exhausting all entropy tapes.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Uniform,
    Max2,
    Gaussian,
    HalfGaussian,
    Exponential,
    Laplace,
    GaussianInt,
    HalfExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    JsonLines,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub dist: Dist,
    #[arg(short = 'n', long = "count", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Fractional decimal digits per value.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub digits: u32,
    #[arg(long, default_value_t = DEFAULT_SEED, conflicts_with = "replay")]
    pub seed: u64,
    /// Laplace rate exponent: the rate is `2^eps_exp`.
    #[arg(long, allow_hyphen_values = true)]
    pub eps_exp: Option<i64>,
    /// Laplace location, as an exact decimal literal.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Write every consumed entropy bit to this tape file.
    #[arg(long, conflicts_with = "replay")]
    pub record: Option<PathBuf>,
    /// Read entropy from this tape file instead of the seeded generator.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Run only the named checks or check families; repeatable.
    #[arg(long)]
    pub only: Vec<String>,
    /// Override every sampling check's trial count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads per check.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub jobs: u64,
    /// Run the negative controls instead; succeeds when every one fails.
    #[arg(long)]
    pub negative_controls: bool,
    #[arg(long, value_enum, default_value_t = Format::JsonLines)]
    pub format: Format,
    /// List check names and exit.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumDist {
    HalfExp,
    GaussianInt,
    Choose3,
    ExponentialInt,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, value_enum)]
    pub dist: EnumDist,
    /// Outcome count for `choose3`.
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(0..=28))]
    pub depth: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = if e.use_stderr() {
                e.render().to_string()
            } else {
                e.to_string()
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Sample(a) => run_sample(&a, out, err),
        Command::Check(a) => run_check(&a, out, err),
        Command::Enumerate(a) => run_enumerate(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_SAMPLER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_SAMPLER,
            message: e.to_string(),
        }
    }
}

/// One emitted sample.
struct Row {
    value: String,
    k: Option<u64>,
    frac: Option<LazyUniform>,
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn draw_row<S: BitSource>(
    dist: Dist,
    digits: u32,
    eps_exp: i64,
    mu: &Decimal,
    src: &mut S,
) -> exact_rand::Result<Row> {
    let real = |value| Row {
        value,
        k: None,
        frac: None,
    };
    Ok(match dist {
        Dist::Uniform => {
            let u = exact_rand::CReal::of_uniform(LazyUniform::new());
            real(to_decimal(&u, digits, src)?)
        }
        Dist::Max2 => {
            let u = exact_rand::CReal::of_uniform(max2(src)?);
            real(to_decimal(&u, digits, src)?)
        }
        Dist::Gaussian => {
            let g = samplers::gaussian(src)?;
            real(to_decimal(&g, digits, src)?)
        }
        Dist::HalfGaussian => {
            let h = samplers::half_gaussian(src)?;
            Row {
                value: to_decimal(&h.to_creal(), digits, src)?,
                k: Some(h.k),
                frac: Some(h.frac),
            }
        }
        Dist::Exponential => {
            let e = samplers::neg_exponential(src)?;
            Row {
                value: to_decimal(&e.to_creal(), digits, src)?,
                k: Some(e.k),
                frac: Some(e.frac),
            }
        }
        Dist::Laplace => {
            let l = samplers::laplace(src, eps_exp, &mu.to_creal())?;
            real(to_decimal(&l, digits, src)?)
        }
        Dist::GaussianInt => real(samplers::gaussian_int(src)?.to_string()),
        Dist::HalfExp => real(samplers::bernoulli_half_exp(src)?.to_string()),
    })
}

fn write_row(
    out: &mut dyn Write,
    format: Format,
    index: u64,
    row: &Row,
    raw: bool,
) -> io::Result<()> {
    let frac = row
        .frac
        .as_ref()
        .map(|f| format!("0.{}", bit_string(&f.prefix())));
    match format {
        Format::Text => match (row.k, &frac) {
            (Some(k), Some(f)) => writeln!(out, "{}\tk={k}\tfrac={f}", row.value),
            _ => writeln!(out, "{}", row.value),
        },
        Format::Csv => {
            if index == 0 {
                if raw {
                    writeln!(out, "index,value,k,frac_prefix")?;
                } else {
                    writeln!(out, "index,value")?;
                }
            }
            match (row.k, &frac) {
                (Some(k), Some(f)) => writeln!(out, "{index},{},{k},{f}", row.value),
                _ => writeln!(out, "{index},{}", row.value),
            }
        }
        Format::JsonLines => {
            let obj = match (row.k, &frac) {
                (Some(k), Some(f)) => {
                    json!({"index": index, "value": row.value, "k": k, "frac_prefix": f})
                }
                _ => json!({"index": index, "value": row.value}),
            };
            writeln!(out, "{obj}")
        }
    }
}

fn emit_rows<S: BitSource>(
    a: &SampleArgs,
    eps_exp: i64,
    mu: &Decimal,
    src: &mut S,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let raw = matches!(a.dist, Dist::Exponential | Dist::HalfGaussian);
    for i in 0..a.count {
        let row = draw_row(a.dist, a.digits, eps_exp, mu, src)?;
        write_row(out, a.format, i, &row, raw)?;
    }
    Ok(())
}

/// Runs `sample`.
pub fn run_sample(
    a: &SampleArgs,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Result<i32, Failure> {
    if a.dist != Dist::Laplace && (a.eps_exp.is_some() || a.mu.is_some()) {
        return Err(Failure::usage(
            "--eps-exp and --mu apply only to --dist laplace",
        ));
    }
    let eps_exp = a.eps_exp.unwrap_or(0);
    let mu: Decimal = match &a.mu {
        Some(text) => text.parse()?,
        None => Decimal::zero(),
    };
    let mut buffered = BufWriter::new(out);
    let outcome = if let Some(path) = &a.replay {
        let bits = read_tape(BufReader::new(File::open(path)?))?;
        emit_rows(a, eps_exp, &mu, &mut TapeSource::new(bits), &mut buffered)
    } else {
        let mut src = RecordingSource::new(SeededSource::new(a.seed));
        let result = emit_rows(a, eps_exp, &mu, &mut src, &mut buffered);
        if let Some(path) = &a.record {
            write_tape(BufWriter::new(File::create(path)?), src.log())?;
        }
        result
    };
    buffered.flush()?;
    outcome.map(|()| EXIT_OK)
}

fn selected_checks(a: &CheckArgs) -> Result<Vec<Check>, Failure> {
    let pool = if a.negative_controls {
        conformance::negative_controls()
    } else {
        conformance::default_suite()
    };
    if a.only.is_empty() {
        return Ok(pool);
    }
    for name in &a.only {
        if !pool.iter().any(|c| c.matches(name)) {
            return Err(Failure::usage(format!(
                "no check named {name:?}; see --list"
            )));
        }
    }
    Ok(pool
        .into_iter()
        .filter(|c| a.only.iter().any(|name| c.matches(name)))
        .collect())
}

/// Runs `check`.
pub fn run_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let checks = selected_checks(a)?;
    if a.list {
        for c in &checks {
            writeln!(out, "{}", c.name)?;
        }
        return Ok(EXIT_OK);
    }
    let mut all_ok = true;
    for check in &checks {
        let check = match (a.trials, check.trials()) {
            (Some(n), Some(recommended)) => {
                if n < recommended {
                    writeln!(
                        err,
                        "warning: {} runs {n} trials, below the recommended {recommended}",
                        check.name
                    )?;
                }
                check.with_trials(n)
            }
            _ => check.clone(),
        };
        let report = check.run(a.seed, a.jobs as usize)?;
        let ok = check.succeeded(&report);
        all_ok &= ok;
        match a.format {
            Format::JsonLines => writeln!(out, "{}", report.to_json())?,
            Format::Text | Format::Csv => {
                let verdict = match (ok, check.expect_fail) {
                    (true, false) => "PASS",
                    (true, true) => "PASS (rejected as expected)",
                    (false, false) => "FAIL",
                    (false, true) => "FAIL (control was not rejected)",
                };
                if a.format == Format::Csv {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        report.name,
                        report.statistic,
                        report.threshold,
                        report.pass,
                        report.undecided
                    )?;
                } else {
                    writeln!(
                        out,
                        "{verdict}\t{}\tstatistic={:.6}\tthreshold={:.6}\ttrials={}\tundecided={}",
                        report.name,
                        report.statistic,
                        report.threshold,
                        report.trials,
                        report.undecided
                    )?;
                }
            }
        }
        out.flush()?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Runs `enumerate`.
pub fn run_enumerate(a: &EnumerateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.dist != EnumDist::Choose3 && a.m.is_some() {
        return Err(Failure::usage("--m applies only to --dist choose3"));
    }
    let sampler = match a.dist {
        EnumDist::HalfExp => DiscreteSampler::HalfExp,
        EnumDist::GaussianInt => DiscreteSampler::GaussianInt,
        EnumDist::ExponentialInt => DiscreteSampler::NegExpInt,
        EnumDist::Choose3 => match a.m {
            Some(m) if m >= 2 => DiscreteSampler::Choose3 { m },
            _ => return Err(Failure::usage("choose3 needs --m of at least 2")),
        },
    };
    let e = conformance::enumerate_exact(&sampler, a.depth)?;
    let mut rows: Vec<(Option<String>, Option<String>, String)> = e
        .brackets
        .iter()
        .map(|b| {
            (
                Some(b.outcome.to_string()),
                Some(b.lower.to_string()),
                b.residual.to_string(),
            )
        })
        .collect();
    rows.push((None, None, e.residual.to_string()));
    if a.format == Format::Csv {
        writeln!(out, "outcome,lower,residual")?;
    }
    for (outcome, lower, residual) in rows {
        match a.format {
            Format::Text => writeln!(
                out,
                "{}\t{}\t{residual}",
                outcome.as_deref().unwrap_or("residual"),
                lower.as_deref().unwrap_or("-")
            )?,
            Format::Csv => writeln!(
                out,
                "{},{},{residual}",
                outcome.as_deref().unwrap_or(""),
                lower.as_deref().unwrap_or("")
            )?,
            Format::JsonLines => writeln!(
                out,
                "{}",
                json!({"outcome": outcome, "lower": lower, "residual": residual})
            )?,
        }
    }
    Ok(EXIT_OK)
}
