//! Command-line front end.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::DislocationLog;
use crate::grcf::{grcf_with, GrcfOptions};
use crate::grcfid::grcfid_with;
use crate::io::{
    format_complex, parse_complex_list, read_json, read_system, to_json, FactorFile,
    LeftFactorFile, RegionFile, RightFactorFile, SystemFile,
};
use crate::postproc::{
    eliminate_nondynamic, minimal_denominator, minimal_left_denominator, right_from_left,
    to_left_factorization, LeftMethod,
};
use crate::region::{RegionSpec, Tolerances};
use crate::system::{DescriptorSystem, Domain};
use crate::verify::{check_rcf, pole_report, PoleReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "descfact",
    version,
    about = "Coprime factorizations of descriptor systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Right coprime factorization with proper stable factors.
    Grcf(ProperArgs),
    /// Left coprime factorization with proper stable factors.
    Glcf(ProperArgs),
    /// Right coprime factorization with an inner denominator.
    Grcfid(InnerArgs),
    /// Left coprime factorization with an inner denominator.
    Glcfid(InnerArgs),
    /// Poles with controllability and observability flags.
    Poles(PolesArgs),
    /// Checks a factor file against the system it was computed from.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// System file (JSON).
    system: PathBuf,
    /// Output file; standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, env = "DESCFACT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Fail instead of warning when a feedback gain exceeds the limit.
    #[arg(long)]
    strict_gain: bool,
    /// Gain limit factor: gains above kappa*||A||/||B|| are flagged.
    #[arg(long)]
    gain_kappa: Option<f64>,
    /// Keep simple infinite eigenvalues in the factor realization.
    #[arg(long)]
    keep_nondynamic: bool,
    /// Fail unless the denominator has the least possible McMillan degree.
    #[arg(long)]
    mindeg_den: bool,
}

#[derive(Args, Debug)]
struct ProperArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: EngineArgs,
    /// Stability degree; defaults to -0.05 (continuous) or 0.95 (discrete).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Desired poles as a comma-separated list such as "-1,-2+1i,-2-1i".
    #[arg(long, allow_hyphen_values = true)]
    poles: Option<String>,
}

#[derive(Args, Debug)]
struct InnerArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct PolesArgs {
    #[command(flatten)]
    common: Common,
    /// Stability degree separating good and bad poles.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "inner")]
    alpha: Option<f64>,
    /// Classify against the open stability domain.
    #[arg(long)]
    inner: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Factor file produced by one of the factorization commands.
    factors: PathBuf,
    /// Number of probe points.
    #[arg(long, default_value_t = 16)]
    samples: usize,
}

/// Runs the command line `argv` (program name first) and returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("descfact: {err}");
            exit_code(&err)
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoSolution(_) => EXIT_NO_SOLUTION,
        Error::DimensionMismatch(_) | Error::NonFiniteEntry { .. } | Error::InvalidRegion(_) => {
            EXIT_USAGE
        }
        _ => EXIT_NUMERICAL,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Grcf(args) => proper(args, false),
        Command::Glcf(args) => proper(args, true),
        Command::Grcfid(args) => inner(args, false),
        Command::Glcfid(args) => inner(args, true),
        Command::Poles(args) => poles(args),
        Command::Verify(args) => verify(args),
    }
}

fn default_alpha(domain: Domain) -> f64 {
    match domain {
        Domain::Continuous => -0.05,
        Domain::Discrete => 0.95,
    }
}

fn tolerances(sys: &DescriptorSystem, common: &Common, engine: Option<&EngineArgs>) -> Tolerances {
    let mut tol = Tolerances::for_system(sys);
    tol.seed = common.seed;
    if let Some(kappa) = engine.and_then(|e| e.gain_kappa) {
        tol.gain_kappa = kappa;
    }
    tol
}

fn proper(args: ProperArgs, left: bool) -> Result<i32> {
    let sys = read_system(&args.common.system)?;
    let alpha = args.alpha.unwrap_or_else(|| default_alpha(sys.domain()));
    let region = match &args.poles {
        Some(list) => RegionSpec::assign(sys.domain(), alpha, parse_complex_list(list)?)?,
        None => RegionSpec::stabilize(sys.domain(), alpha)?,
    };
    let tol = tolerances(&sys, &args.common, Some(&args.engine));
    factorize(&sys, &region, &tol, &args.common, &args.engine, left)
}

fn inner(args: InnerArgs, left: bool) -> Result<i32> {
    let sys = read_system(&args.common.system)?;
    let region = RegionSpec::inner(sys.domain());
    let tol = tolerances(&sys, &args.common, Some(&args.engine));
    factorize(&sys, &region, &tol, &args.common, &args.engine, left)
}

fn factorize(
    sys: &DescriptorSystem,
    region: &RegionSpec,
    tol: &Tolerances,
    common: &Common,
    engine: &EngineArgs,
    left: bool,
) -> Result<i32> {
    let opts = GrcfOptions {
        strict_gain: engine.strict_gain,
    };
    let inner = region.mode() == crate::region::PoleMode::Inner;
    let (file, den_order, target) = if left {
        let method = if inner {
            LeftMethod::Inner
        } else {
            LeftMethod::Proper(region.clone())
        };
        let (f, log) = to_left_factorization(sys, &method, tol, &opts, engine.keep_nondynamic)?;
        let den = minimal_left_denominator(&f, tol.rank_tol)?;
        let target = pole_report(&sys.dual(), region, tol)?.n_bad;
        summarize("left", f.order(), den.order(), &log);
        let file = FactorFile::Left {
            region: RegionFile::from_region(region),
            realization: LeftFactorFile::from_factors(&f),
            minimal_denominator: SystemFile::from_system(&den),
            log,
        };
        (file, den.order(), target)
    } else {
        let (f, log) = if inner {
            grcfid_with(sys, tol, &opts)?
        } else {
            grcf_with(sys, region, tol, &opts)?
        };
        let den = minimal_denominator(&f, tol.rank_tol)?;
        let f = if engine.keep_nondynamic {
            f
        } else {
            eliminate_nondynamic(&f)?
        };
        let target = pole_report(sys, region, tol)?.n_bad;
        summarize("right", f.order(), den.order(), &log);
        let file = FactorFile::Right {
            region: RegionFile::from_region(region),
            realization: RightFactorFile::from_factors(&f),
            minimal_denominator: SystemFile::from_system(&den),
            log,
        };
        (file, den.order(), target)
    };
    emit(common.output.as_deref(), &file)?;
    if engine.mindeg_den && den_order != target {
        eprintln!(
            "descfact: denominator order {den_order} differs from the {target} controllable bad poles"
        );
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

fn summarize(side: &str, order: usize, den_order: usize, log: &DislocationLog) {
    eprintln!(
        "{side} factorization: order {order}, minimal denominator order {den_order}, {} poles assigned, {} deflated, {} gain warnings",
        log.assigned_pole_count(),
        log.deflated_count(),
        log.warnings()
    );
}

#[derive(Serialize)]
struct PolesOutput {
    summary: String,
    #[serde(flatten)]
    report: PoleReport,
}

fn poles(args: PolesArgs) -> Result<i32> {
    let sys = read_system(&args.common.system)?;
    let region = if args.inner {
        RegionSpec::inner(sys.domain())
    } else {
        let alpha = args.alpha.unwrap_or_else(|| default_alpha(sys.domain()));
        RegionSpec::stabilize(sys.domain(), alpha)?
    };
    let tol = tolerances(&sys, &args.common, None);
    let report = pole_report(&sys, &region, &tol)?;
    let summary = pole_summary(&report);
    eprintln!("poles {summary}, n_b = {}", report.n_bad);
    emit(
        args.common.output.as_deref(),
        &PolesOutput { summary, report },
    )?;
    Ok(EXIT_OK)
}

/// `{λ1, λ2, ∞×k}` listing of the finite poles and the higher-order infinite ones.
pub fn pole_summary(report: &PoleReport) -> String {
    let mut items: Vec<String> = report
        .finite
        .iter()
        .map(|p| format_complex(p.value))
        .collect();
    match report.infinite_higher {
        0 => {}
        1 => items.push("∞".into()),
        k => items.push(format!("∞×{k}")),
    }
    format!("{{{}}}", items.join(", "))
}

fn verify(args: VerifyArgs) -> Result<i32> {
    let sys = read_system(&args.common.system)?;
    let file: FactorFile = read_json(&args.factors)?;
    let tol = tolerances(&sys, &args.common, None);
    let report = match &file {
        FactorFile::Right {
            region,
            realization,
            ..
        } => {
            let f = realization.to_factors()?;
            check_dims(f.outputs(), f.inputs(), &sys)?;
            check_rcf(
                &sys,
                &f,
                &region.to_region(sys.domain())?,
                &tol,
                args.samples,
            )?
        }
        FactorFile::Left {
            region,
            realization,
            ..
        } => {
            let f = right_from_left(&realization.to_factors()?);
            let dual = sys.dual();
            check_dims(f.outputs(), f.inputs(), &dual)?;
            check_rcf(
                &dual,
                &f,
                &region.to_region(sys.domain())?,
                &tol,
                args.samples,
            )?
        }
    };
    emit(args.common.output.as_deref(), &report)?;
    if report.passed {
        eprintln!("verification passed (max error {:.3e})", report.max_error);
        Ok(EXIT_OK)
    } else {
        eprintln!("verification failed (max error {:.3e})", report.max_error);
        Ok(EXIT_VERIFY)
    }
}

fn check_dims(p: usize, m: usize, sys: &DescriptorSystem) -> Result<()> {
    if p != sys.outputs() || m != sys.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "factors are {p}x{m} but the system is {}x{}",
            sys.outputs(),
            sys.inputs()
        )));
    }
    Ok(())
}

fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = to_json(value);
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::DimensionMismatch(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::DimensionMismatch(format!("cannot write to stdout: {e}"))),
    }
}
