use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dynr::document::save_algebra;
use dynr::suite::{run_suite, AlgebraSpec, ReportFormat, RunConfig, VerificationReport};

/// Numerical certification of dynamical r-matrices.
#[derive(Parser)]
#[command(name = "dynr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a Lie algebra.
    Algebra {
        #[command(subcommand)]
        command: AlgebraCommand,
    },
    /// Run verification checks and emit a report.
    Verify(VerifyArgs),
    /// Work with existing reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Print dimension, basis and invariant residuals.
    Info {
        /// sl2, sl3, gl2 or file:<path>.
        #[arg(long, default_value = "sl2")]
        algebra: String,
        /// Print the algebra as a JSON document instead.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Re-emit a JSON report as JSON or CSV.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F64,
    F32,
}

#[derive(Args)]
struct VerifyArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sl2, sl3, gl2 or file:<path>.
    #[arg(long)]
    algebra: Option<String>,
    /// canonical:tau=…, pl:nu=…, cayley1, zero or custom:<file>.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated check names, or `all`.
    #[arg(long)]
    checks: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    tol_analytic: Option<String>,
    #[arg(long)]
    tol_fd: Option<String>,
    /// Check against this invariant constant instead of the family's.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
}

/// Usage or domain problems, reported with exit code 2.
struct UsageError(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Algebra { command: AlgebraCommand::Info { algebra, json } } => algebra_info(&algebra, json).map(|_| true),
        Command::Verify(args) => verify(args),
        Command::Report { command: ReportCommand::Convert { input, format, out } } => convert(&input, format, out).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn usage<T>(r: Result<T>) -> Result<T, UsageError> {
    r.map_err(UsageError)
}

fn algebra_info(spec: &str, json: bool) -> Result<(), UsageError> {
    usage((|| {
        let l = spec.parse::<AlgebraSpec>()?.build::<f64>()?;
        if json {
            println!("{}", save_algebra(&l));
            return Ok(());
        }
        let inv = l.invariant_residuals();
        println!("algebra:   {spec}");
        println!("kind:      {:?}", l.kind());
        println!("dimension: {}", l.dim());
        println!("field:     {:?}", l.field());
        match l.rep_dim() {
            Some(n) => println!("rep dim:   {n}"),
            None => println!("rep dim:   none"),
        }
        println!("basis:     {}", l.labels().join(" "));
        println!("residuals: antisymmetry {:.2e}, jacobi {:.2e}, invariance {:.2e}, form symmetry {:.2e}, duality {:.2e}",
            inv.antisymmetry, inv.jacobi, inv.invariance, inv.symmetry_of_form, inv.duality);
        println!("gram inverse condition: {:.3e}", inv.gram_inverse_condition);
        Ok(())
    })())
}

fn build_config(args: &VerifyArgs) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(p) = &args.config {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        config.apply_text(&text).with_context(|| format!("in {}", p.display()))?;
    }
    let flags = [
        ("algebra", &args.algebra),
        ("family", &args.family),
        ("checks", &args.checks),
        ("samples", &args.samples),
        ("seed", &args.seed),
        ("tol_analytic", &args.tol_analytic),
        ("tol_fd", &args.tol_fd),
        ("mu", &args.mu),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
        }
    }
    if let Some(out) = &args.out {
        config.out = Some(out.clone());
    }
    if let Some(f) = args.format {
        config.format = f.into();
    }
    // fail early on inputs no check could use
    config.algebra.build::<f64>().context("loading the algebra")?;
    config.family.load::<f64>().context("loading the family")?;
    Ok(config)
}

fn verify(args: VerifyArgs) -> Result<bool, UsageError> {
    let config = usage(build_config(&args))?;
    let report = match args.precision {
        Precision::F64 => run_suite::<f64>(&config),
        Precision::F32 => run_suite::<f32>(&config),
    };
    for s in &report.results {
        let verdict = if s.passed { "pass" } else { "FAIL" };
        let detail = s.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default();
        eprintln!("{verdict}  {:<13} max {:.3e}  tol {:.1e}  points {}{detail}", s.check_name, s.max_abs, s.tolerance, s.points_evaluated);
    }
    usage(write_report(&report, config.format, config.out.as_ref()))?;
    Ok(report.passed)
}

fn write_report(report: &VerificationReport, format: ReportFormat, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => report.emit(format, path)?,
        None => print!("{}", report.render(format)?),
    }
    Ok(())
}

fn convert(input: &PathBuf, format: Format, out: Option<PathBuf>) -> Result<(), UsageError> {
    usage((|| {
        let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
        let report = VerificationReport::from_json(&text).context("parsing the report")?;
        if report.results.is_empty() {
            bail!("report has no results");
        }
        write_report(&report, format.into(), out.as_ref())
    })())
}
