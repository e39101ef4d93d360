//! Command-line front end: the manifold description language, report
//! documents and the subcommand pipelines.

pub mod commands;
pub mod dsl;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kenmotsu_core::numeric::DEFAULT_DIGITS;
use kenmotsu_core::soliton::Mode;
use kenmotsu_core::Geometry;

use commands::{parse_flag, CliError, Context, ParamArgs, Potential};
use dsl::{builtin, parse_manifold_dsl, ManifoldDocument, BUILTINS};
use report::{emit_report, Format, Report};

/// Environment variable holding the number of fractional digits used for
/// numeric spot evaluations.
pub const PRECISION_VAR: &str = "KENMOTSU_PRECISION";

const MAX_DIGITS: u32 = 1000;

#[derive(Parser, Debug)]
#[command(name = "kenmotsu", version, about = "Exact curvature and soliton analysis of framed almost contact metric manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every structural, Kenmotsu and identity check.
    Check {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Brackets, connection, curvature and Ricci tables.
    Curvature {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate the soliton equation for a vector or gradient potential.
    Soliton {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        output: Output,
    },
    /// Torse-forming, conformal Killing and Killing tests for a vector field.
    ClassifyVector {
        #[command(flatten)]
        source: Source,
        /// `xi`, a frame field, a declared vector or `EXPR d COORD + ...`.
        #[arg(long)]
        vector: String,
        #[command(flatten)]
        output: Output,
    },
    /// Closed-form soliton constants and their consistency.
    Theorems {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        params: Params,
        /// Also compare the Laplacian identity with the divergence of this field.
        #[arg(long)]
        vector: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Full pipeline: checks, tables, declared soliton blocks and theorems.
    Example {
        #[command(flatten)]
        source: OptionalSource,
        /// Field for the Laplacian comparison; defaults to the first declared vector.
        #[arg(long)]
        vector: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// A shipped manifold description.
    #[arg(long, value_parser = BUILTINS)]
    builtin: Option<String>,
    /// A manifold description file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptionalSource {
    /// A shipped manifold description (default kenmotsu5).
    #[arg(long, value_parser = BUILTINS)]
    builtin: Option<String>,
    /// A manifold description file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct PotentialArgs {
    /// Potential field: `xi`, a frame field, a declared vector or `EXPR d COORD + ...`.
    #[arg(long)]
    vector: Option<String>,
    /// Gradient potential: a declared function or an expression.
    #[arg(long)]
    function: Option<String>,
}

#[derive(Args, Debug)]
struct Params {
    /// Ricci coefficient (default: the symbol alpha).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Scalar curvature coefficient (default: the symbol beta).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Lie derivative coefficient (default: the symbol k).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Soliton constant; selects exact mode by default.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Use the *-Ricci tensor (true) or the Ricci tensor (false).
    #[arg(long, action = clap::ArgAction::Set)]
    star: Option<bool>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Trace,
    XiTrace,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

impl Output {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Text => Format::Text,
            FormatArg::Structured => Format::Structured,
        }
    }
}

impl Params {
    fn parse(&self) -> Result<ParamArgs, CliError> {
        let get = |flag: &str, v: &Option<String>| v.as_deref().map(|t| parse_flag(flag, t)).transpose();
        Ok(ParamArgs {
            alpha: get("alpha", &self.alpha)?,
            beta: get("beta", &self.beta)?,
            k: get("k", &self.k)?,
            lambda: get("lambda", &self.lambda)?,
            mode: self.mode.map(|m| match m {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Trace => Mode::Trace,
                ModeArg::XiTrace => Mode::XiTrace,
            }),
            star: self.star,
        })
    }
}

/// Exit status and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Parses the precision variable; `None` selects the default.
pub fn parse_precision(value: Option<&str>) -> Result<u32, String> {
    match value {
        None => Ok(DEFAULT_DIGITS),
        Some(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|d| *d <= MAX_DIGITS)
            .ok_or_else(|| format!("{PRECISION_VAR} must be an integer between 0 and {MAX_DIGITS}, got `{v}`")),
    }
}

fn load(builtin_name: Option<&str>, file: Option<&PathBuf>) -> Result<(String, ManifoldDocument), CliError> {
    let (label, text) = match (builtin_name, file) {
        (Some(name), _) => (
            format!("builtin:{name}"),
            builtin(name).expect("validated by clap").to_string(),
        ),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), text)
        }
        (None, None) => ("builtin:kenmotsu5".into(), builtin("kenmotsu5").expect("shipped").to_string()),
    };
    let doc = parse_manifold_dsl(&text).map_err(|e| CliError(format!("{label}: {e}")))?;
    Ok((label, doc))
}

/// Runs one command line (including the program name) with the given
/// precision setting.
pub fn run<I, T>(args: I, precision: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::error(2, text)
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let digits = match parse_precision(precision) {
        Ok(d) => d,
        Err(e) => return Outcome::error(2, format!("error: {e}\n")),
    };
    match execute(cli.command, digits) {
        Ok((report, format, ok)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: emit_report(&report, format),
            stderr: String::new(),
        },
        Err(e) => Outcome::error(2, format!("error: {e}\n")),
    }
}

fn execute(command: Command, digits: u32) -> Result<(Report, Format, bool), CliError> {
    let (name, source, output) = match &command {
        Command::Check { source, output } => ("check", (source.builtin.as_deref(), source.file.as_ref()), output),
        Command::Curvature { source, output } => ("curvature", (source.builtin.as_deref(), source.file.as_ref()), output),
        Command::Soliton { source, output, .. } => ("soliton", (source.builtin.as_deref(), source.file.as_ref()), output),
        Command::ClassifyVector { source, output, .. } => {
            ("classify-vector", (source.builtin.as_deref(), source.file.as_ref()), output)
        }
        Command::Theorems { source, output, .. } => ("theorems", (source.builtin.as_deref(), source.file.as_ref()), output),
        Command::Example { source, output, .. } => ("example", (source.builtin.as_deref(), source.file.as_ref()), output),
    };
    let format = output.format();
    let (label, doc) = load(source.0, source.1)?;
    let manifold = doc.build(name != "check")?;
    let geom = Geometry::new(manifold)?;
    let ctx = Context::new(&doc, &geom, digits);
    let mut report = Report::new(name, &label, &doc.source);
    report.insert("manifold", ctx.manifold_summary());
    let mut ok = true;
    match &command {
        Command::Check { .. } => report.push_checks(ctx.checks()?),
        Command::Curvature { .. } => ctx.curvature(&mut report),
        Command::Soliton { potential, params, .. } => {
            let potential = match (&potential.vector, &potential.function) {
                (Some(v), _) => Potential::Vector(v.clone()),
                (None, Some(f)) => Potential::Function(f.clone()),
                (None, None) => unreachable!("required by clap"),
            };
            let (section, success) = ctx.soliton(&potential, &params.parse()?)?;
            report.insert("soliton", section);
            ok = success;
        }
        Command::ClassifyVector { vector, .. } => {
            report.insert("classification", ctx.classify_vector(vector)?);
        }
        Command::Theorems { params, vector, .. } => {
            let (section, checks) = ctx.theorems(&params.parse()?, vector.as_deref())?;
            report.insert("theorems", section);
            report.push_checks(checks);
        }
        Command::Example { vector, .. } => {
            report.push_checks(ctx.checks()?);
            report.push_checks(ctx.example_checks()?);
            ctx.curvature(&mut report);
            let (solitons, checks) = ctx.document_solitons()?;
            report.insert("solitons", solitons);
            report.push_checks(checks);
            let vector = vector
                .clone()
                .or_else(|| doc.content.vectors.first().map(|v| v.name.clone()));
            let (section, checks) = ctx.theorems(&ParamArgs::default(), vector.as_deref())?;
            report.insert("theorems", section);
            report.push_checks(checks);
        }
    }
    let ok = ok && report.checks_pass();
    Ok((report, format, ok))
}
