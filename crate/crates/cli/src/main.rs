use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use amseq::counterexamples::{build_example6, build_omega_half};
use amseq::numerics::{Exact, LogReal, NumericMode, Scalar};
use amseq::regularity::{
    check_ratio_admissibility, hat, invert_am_values, seq_from_concavity, seq_from_ratio,
};
use amseq::seq::{ConcavitySeq, RatioSeq, SeqDocument, SeqSpec, Tail};
use amseq::step::StepSeq;
use amseq::verify::{all_passed, reports_to_csv, reports_to_json, run_suite, CheckConfig, SuiteConfig};
use amseq::{Error, Index, Seq};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPABILITY: u8 = 3;

#[derive(Parser)]
#[command(name = "amseq", version, about = "Arithmetic-mean calculus for monotone null sequences")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Arithmetic backend.
    #[arg(long, value_enum, default_value_t = Mode::Log, global = true)]
    mode: Mode,
    /// Dense horizon for dumps and checks.
    #[arg(long, default_value_t = 10_000, global = true)]
    horizon: u64,
    /// Relative tolerance for log-mode comparisons.
    #[arg(long, default_value_t = 1e-9, global = true)]
    tol: f64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; CSV dumps carry `n,log_value,value` columns.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Omit the generation timestamp from reports.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Seed for sampled index pairs.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Rational,
    Log,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sequence or construction.
    Gen(GenArgs),
    /// Apply an operator to a serialized sequence.
    Transform(TransformArgs),
    /// Run a verification suite.
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenFamily {
    OmegaP,
    LogPower,
    IteratedLog,
    Step,
    FromRatio,
    FromConcavity,
    Example6,
    OmegaHalf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: GenFamily,
    /// Exponent of `n^{-p}`, or of `log n` for log-power.
    #[arg(long)]
    p: Option<f64>,
    /// Exponent of `log log n` for log-power.
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Comma-separated step levels, largest first.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<f64>,
    /// Comma-separated last indices of all but the final step.
    #[arg(long, value_delimiter = ',')]
    breakpoints: Vec<String>,
    /// JSON array of ratio or concavity values.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Stages of a construction.
    #[arg(long)]
    stages: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Am,
    Am2,
    AmPow,
    Ampliation,
    Ratio,
    Concavity,
    Hat,
    InvertAm,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(value_enum)]
    op: Op,
    /// Serialized sequence.
    #[arg(long = "in")]
    input: PathBuf,
    /// Order for am-pow.
    #[arg(long, default_value_t = 1)]
    order: u32,
    /// Repetition factor for ampliation.
    #[arg(long, default_value_t = 2)]
    factor: u64,
}

#[derive(Args)]
struct CheckArgs {
    /// lemmas, example6, omega-half, hat, coherence, all or empty.
    suite: String,
    /// Subject ids; repeat for several.
    #[arg(long = "subject")]
    subjects: Vec<String>,
    /// Check ids of the lemma suite; repeat for several.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Stages of the constructions under test.
    #[arg(long)]
    stages: Option<usize>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_capability() || matches!(e, Error::UnreachableBound(_)) {
            EXIT_CAPABILITY
        } else {
            EXIT_USAGE
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

impl Global {
    fn numeric_mode(&self) -> NumericMode {
        match self.mode {
            Mode::Rational => NumericMode::Rational,
            Mode::Log => NumericMode::Log,
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.horizon < 10 {
            return Err(usage("--horizon must be at least 10"));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(usage("--tol must lie in (0, 1e-3]"));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.global.validate().and_then(|()| match &cli.command {
        Command::Gen(args) => gen(&cli.global, args),
        Command::Transform(args) => transform(&cli.global, args),
        Command::Check(args) => check(&cli.global, args),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn csv_rows(rows: impl IntoIterator<Item = (u64, LogReal)>) -> String {
    let mut out = String::from("n,log_value,value\n");
    for (n, v) in rows {
        let value = v.value();
        let linear = if value.is_normal() || v.is_zero() { value.to_string() } else { String::new() };
        writeln!(out, "{n},{},{linear}", v.ln() + 0.0).unwrap();
    }
    out
}

fn json_pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn write_seq(g: &Global, s: &Seq) -> Result<u8, Failure> {
    let text = match g.format {
        Format::Json => json_pretty(&SeqDocument { spec: s.spec(), horizon: Index::new(g.horizon) }),
        Format::Csv => {
            let values = s.dense_log(g.horizon as usize)?;
            csv_rows((1..).zip(values))
        }
    };
    for w in s.warnings() {
        eprintln!("warning: {w}");
    }
    g.emit(&text)?;
    Ok(0)
}

fn write_values(g: &Global, label: &str, values: &[LogReal]) -> Result<u8, Failure> {
    let text = match g.format {
        Format::Json => {
            let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            json_pretty(&serde_json::json!({ "kind": label, "log_values": logs }))
        }
        Format::Csv => csv_rows((1..).zip(values.iter().copied())),
    };
    g.emit(&text)?;
    Ok(0)
}

fn read_numbers(path: &PathBuf) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: expected a JSON array of numbers: {e}", path.display())))
}

fn from_ratio<T: Scalar>(values: &[f64], g: &Global) -> Result<Seq, Failure> {
    let r = RatioSeq::<T>::from_f64(values)?;
    let verdict = check_ratio_admissibility(&r, values.len());
    if let Some(n) = verdict.first_violation {
        return Err(usage(format!("not an admissible ratio sequence: violation at n = {n}")));
    }
    let s = seq_from_ratio(&r)?;
    let _ = g;
    Ok(s)
}

fn from_concavity<T: Scalar>(values: &[f64]) -> Result<Seq, Failure> {
    let c = ConcavitySeq::<T>::from_f64(values)?;
    Ok(seq_from_concavity(&c)?)
}

fn gen(g: &Global, args: &GenArgs) -> Result<u8, Failure> {
    let need_p = || args.p.ok_or_else(|| usage("--p is required"));
    let s = match args.family {
        GenFamily::OmegaP => Seq::power(need_p()?)?,
        GenFamily::LogPower => Seq::log_power(need_p()?, args.q)?,
        GenFamily::IteratedLog => Seq::iterated_log(),
        GenFamily::Step => {
            let levels: Vec<LogReal> = args.levels.iter().map(|&x| LogReal::new(x)).collect();
            let bps = args
                .breakpoints
                .iter()
                .map(|b| b.parse::<Index>())
                .collect::<Result<Vec<_>, _>>()?;
            Seq::step(StepSeq::from_steps(levels, bps)?)
        }
        GenFamily::FromRatio | GenFamily::FromConcavity => {
            let path = args.file.as_ref().ok_or_else(|| usage("--file is required"))?;
            let values = read_numbers(path)?;
            match (args.family, g.numeric_mode()) {
                (GenFamily::FromRatio, NumericMode::Log) => from_ratio::<LogReal>(&values, g)?,
                (GenFamily::FromRatio, NumericMode::Rational) => from_ratio::<Exact>(&values, g)?,
                (_, NumericMode::Log) => from_concavity::<LogReal>(&values)?,
                (_, NumericMode::Rational) => from_concavity::<Exact>(&values)?,
            }
        }
        GenFamily::Example6 => {
            let params = build_example6(args.stages.unwrap_or(8))?;
            g.emit(&json_pretty(&params))?;
            return Ok(0);
        }
        GenFamily::OmegaHalf => {
            let params = build_omega_half(args.stages.unwrap_or(4))?;
            g.emit(&json_pretty(&params))?;
            return Ok(0);
        }
    };
    write_seq(g, &s)
}

fn read_seq(path: &PathBuf) -> Result<Seq, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let spec: SeqSpec = match serde_json::from_str::<SeqDocument>(&text) {
        Ok(doc) => doc.spec,
        Err(_) => serde_json::from_str(&text).map_err(|e| usage(format!("{}: not a sequence: {e}", path.display())))?,
    };
    Ok(Seq::from_spec(&spec)?)
}

fn invert<T: Scalar>(s: &Seq, n: usize) -> Result<Vec<LogReal>, Failure> {
    let x: Vec<T> = s.dense(n)?;
    Ok(invert_am_values(&x)?.iter().map(T::to_log).collect())
}

fn transform(g: &Global, args: &TransformArgs) -> Result<u8, Failure> {
    let s = read_seq(&args.input)?;
    let n = g.horizon as usize;
    match args.op {
        Op::Am => write_seq(g, &s.am()),
        Op::Am2 => write_seq(g, &s.am_pow(2)),
        Op::AmPow => write_seq(g, &s.am_pow(args.order)),
        Op::Ampliation => write_seq(g, &s.ampliation(args.factor)?),
        Op::Ratio => {
            let r: Vec<LogReal> = match g.numeric_mode() {
                NumericMode::Log => s.ratio_of_regularity::<LogReal>(n)?.values().to_vec(),
                NumericMode::Rational => s.ratio_of_regularity::<Exact>(n)?.values().iter().map(Exact::to_log).collect(),
            };
            write_values(g, "ratio", &r)
        }
        Op::Concavity => {
            let c: Vec<LogReal> = match g.numeric_mode() {
                NumericMode::Log => s.concavity_ratio::<LogReal>(n)?.values().to_vec(),
                NumericMode::Rational => s.concavity_ratio::<Exact>(n)?.values().iter().map(Exact::to_log).collect(),
            };
            write_values(g, "concavity", &c)
        }
        Op::Hat => {
            let h = hat(&s)?;
            let values: Vec<LogReal> = h.dense(g.horizon)?.into_iter().map(|(_, _, v)| v).collect();
            write_values(g, "hat", &values)
        }
        Op::InvertAm => {
            let values = match g.numeric_mode() {
                NumericMode::Log => invert::<LogReal>(&s, n)?,
                NumericMode::Rational => invert::<Exact>(&s, n)?,
            };
            write_seq(g, &Seq::table(values, Tail::Undefined)?)
        }
    }
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn check(g: &Global, args: &CheckArgs) -> Result<u8, Failure> {
    let sc = SuiteConfig {
        suite: args.suite.clone(),
        subjects: args.subjects.clone(),
        checks: args.checks.clone(),
        config: CheckConfig { mode: g.numeric_mode(), horizon: g.horizon, tol: g.tol, seed: g.seed },
        stages: args.stages,
    };
    let reports = run_suite(&sc).map_err(|e| match e {
        Error::Config(m) => usage(m),
        other => other.into(),
    })?;
    let text = match g.format {
        Format::Json => {
            let body = reports_to_json(&reports);
            if g.no_timestamp {
                format!("{{\n\"reports\": {body}\n}}\n")
            } else {
                format!("{{\n\"generated_at\": {},\n\"reports\": {body}\n}}\n", timestamp())
            }
        }
        Format::Csv => {
            let body = reports_to_csv(&reports);
            if g.no_timestamp {
                body
            } else {
                format!("# generated_at {}\n{body}", timestamp())
            }
        }
    };
    g.emit(&text)?;
    Ok(if all_passed(&reports) { 0 } else { EXIT_FAIL })
}
