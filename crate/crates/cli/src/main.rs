//! `qgauss`: build R-matrices and L-operators, run verification suites,
//! export coefficient tables.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgauss_core::export::{export_gauss, export_lpair, GaussJson};
use qgauss_core::gauss::{partial_decompose, series_of, Sign};
use qgauss_core::loperator::{build_evaluation_pair, EvalParams};
use qgauss_core::report::bundle_json;
use qgauss_core::{
    run, with_field, Convention, EngineError, Field, FieldTask, Param, RMatrix, RatFunc, Rational, RunConfig, Suite,
    Verdict, VerificationReport,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qgauss", version, about = "Exact checks for the trigonometric gl(n) R-matrix, its L-operators and their Gauss decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the R-matrix R(z).
    BuildR,
    /// Run verification suites (`all` selects every suite).
    Check {
        #[arg(required = true, value_name = "SUITE")]
        suites: Vec<String>,
    },
    /// Partial Gauss factors K, k, e, f of the evaluation L-operators.
    Decompose,
    /// Coefficient tables of the evaluation L-operators.
    Export,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// Rank n of gl(n).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Truncation order N; series are compared on [-N, N].
    #[arg(long, global = true)]
    order: Option<i64>,
    #[arg(long, global = true, value_parser = ["literal", "corrected"])]
    convention: Option<String>,
    /// `symbolic` or a rational value such as `3/2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// Evaluation point: `symbolic` or a nonzero rational value.
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file (atomically) instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Settings after merging the config file under the flags.
struct Settings {
    run: RunConfig,
    format: Format,
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key = value", path.display(), k + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Failure::Usage(format!("{key}: {e}")))
}

fn parse_suites(list: &[String]) -> Result<Vec<Suite>, Failure> {
    let mut out = Vec::new();
    for s in list.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        if s == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(parse("suite", s)?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn settings(opts: &Opts, suites: Option<&[String]>) -> Result<Settings, Failure> {
    let mut file = match &opts.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let mut set = |key: &str, flag: Option<String>| {
        if let Some(v) = flag {
            file.insert(key.to_string(), v);
        }
    };
    set("n", opts.n.map(|v| v.to_string()));
    set("order", opts.order.map(|v| v.to_string()));
    set("convention", opts.convention.clone());
    set("q", opts.q.clone());
    set("a", opts.a.clone());
    set("format", opts.format.map(|f| if f == Format::Json { "json" } else { "text" }.to_string()));
    set("output", opts.output.as_ref().map(|p| p.display().to_string()));
    set("suites", suites.map(|s| s.join(",")));

    let mut run = RunConfig::default();
    let mut format = Format::Text;
    let mut output = None;
    for (key, value) in &file {
        match key.as_str() {
            "n" => run.n = parse(key, value)?,
            "order" => run.order = parse(key, value)?,
            "convention" => run.convention = parse::<Convention>(key, value)?,
            "q" => run.q = parse(key, value)?,
            "a" => run.a = parse(key, value)?,
            "threads" => run.threads = Some(parse(key, value)?),
            "max_n" => run.max_n = parse(key, value)?,
            "suites" => run.suites = parse_suites(std::slice::from_ref(value))?,
            "format" => {
                format = Format::from_str(value, true).map_err(|e| Failure::Usage(format!("format: {e}")))?;
            }
            "output" => output = Some(PathBuf::from(value)),
            other => return Err(Failure::Usage(format!("unknown config key {other:?}"))),
        }
    }
    run.validate().map_err(Failure::Usage)?;
    Ok(Settings { run, format, output })
}

/// Write to a sibling temporary file, then rename over the target.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn emit(settings: &Settings, mut text: String) -> Result<(), Failure> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &settings.output {
        Some(p) => write_atomic(p, &text).map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("tables serialize")
}

fn report_text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.summary_line());
        out.push('\n');
    }
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    out.push_str(&format!(
        "{} checks: {} passed, {} failed, {} skipped\n",
        reports.len(),
        count(Verdict::Pass),
        count(Verdict::Fail),
        count(Verdict::Skipped)
    ));
    out
}

fn check(settings: &Settings) -> Result<bool, Failure> {
    let reports = run(&settings.run)?;
    let text = match settings.format {
        Format::Json => bundle_json(&reports),
        Format::Text => report_text(&reports),
    };
    emit(settings, text)?;
    Ok(reports.iter().all(|r| r.verdict != Verdict::Fail))
}

fn build_r(settings: &Settings) -> Result<(), Failure> {
    let cfg = &settings.run;
    let (json, text) = match &cfg.q {
        Param::Symbolic => r_output(RMatrix::build(cfg.n, cfg.convention, RatFunc::<Rational>::var())?, &["q"]),
        Param::Value(q) => r_output(RMatrix::build(cfg.n, cfg.convention, q.clone())?, &[]),
    };
    emit(settings, if settings.format == Format::Json { json } else { text })
}

fn r_output<F: Field>(r: RMatrix<F>, names: &[&str]) -> (String, String) {
    let j = r.to_json(names);
    let mut text = format!("R(z), n = {}, {} convention\n", j.n, j.convention.name());
    for (i, row) in j.entries.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if v != "0" {
                text.push_str(&format!("({i}, {k})  {v}\n"));
            }
        }
    }
    (json_text(&j), text)
}

/// Evaluation L-pair at `a`, handed to `Then`.
struct WithPair<'a> {
    cfg: &'a RunConfig,
    format: Format,
    decompose: bool,
}

impl FieldTask for WithPair<'_> {
    type Output = Result<String, Failure>;

    fn run<F: Field>(self, q: F, a: F, names: &[&str]) -> Self::Output {
        let r = RMatrix::build(self.cfg.n, self.cfg.convention, q)?;
        let lp = build_evaluation_pair(&EvalParams::new(self.cfg.n, a, self.cfg.order)?, &r)?;
        if !self.decompose {
            let j = export_lpair(&lp, names);
            return Ok(match self.format {
                Format::Json => json_text(&j),
                Format::Text => {
                    let mut t = format!("L-operators, n = {}, order {}, variables {:?}\n", j.n, j.order, j.variables);
                    t.push_str(&table_text("L+", &j.lplus));
                    t.push_str(&table_text("L-", &j.lminus));
                    t
                }
            });
        }
        if lp.n < 2 {
            return Err(Failure::Usage("decompose needs n >= 2".into()));
        }
        let size = lp.n * lp.dim;
        let mut out: BTreeMap<String, GaussJson> = BTreeMap::new();
        for (s, sign) in [(&lp.lplus, Sign::Plus), (&lp.lminus, Sign::Minus)] {
            let fac = partial_decompose(&series_of(s, size, sign), lp.n, lp.dim, sign)?;
            out.insert(sign.name().to_string(), export_gauss(&fac, names));
        }
        Ok(match self.format {
            Format::Json => json_text(&out),
            Format::Text => {
                let mut t = String::new();
                for (sign, g) in &out {
                    for (block, table) in &g.blocks {
                        t.push_str(&table_text(&format!("{block} ({sign})"), table));
                    }
                }
                t
            }
        })
    }
}

fn table_text(title: &str, t: &qgauss_core::export::SeriesTable) -> String {
    let mut s = format!("{title}: {}x{}, exponents {}..{}\n", t.rows, t.cols, t.window[0], t.window[1]);
    for e in &t.entries {
        s.push_str(&format!("  ({}, {}) z^{}  {}\n", e.i, e.j, e.exponent, e.value));
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let suites = match &cli.command {
        Command::Check { suites } => Some(suites.as_slice()),
        _ => None,
    };
    let result = settings(&cli.opts, suites).and_then(|s| match &cli.command {
        Command::Check { .. } => check(&s),
        Command::BuildR => build_r(&s).map(|_| true),
        Command::Decompose | Command::Export => {
            let task = WithPair { cfg: &s.run, format: s.format, decompose: matches!(cli.command, Command::Decompose) };
            let text = with_field(&s.run.q, &s.run.a, task)?;
            emit(&s, text).map(|_| true)
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Usage(m)) => {
            eprintln!("qgauss: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("qgauss: internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
