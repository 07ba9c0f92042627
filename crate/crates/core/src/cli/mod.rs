//! Command-line front end. `run` takes the argument list and the two output
//! streams so commands can be driven in-process by tests.
//!
//! Exit codes: 0 success/pass, 1 a requested check failed, 2 input error.

pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cycles::{enumerate_cycles, rank_tuples};
use crate::network::{canonicalize, parse_network, serialize_network, symmetric_two_cell, CellNetwork};
use crate::oracle::{
    check_duality, check_inclusion, check_support_match, default_floor, default_step,
    default_tolerance, sample_directions, sample_region, Mode,
};
use crate::point::GdofPoint;
use crate::polytope::build_constraints;
use crate::rational::Rational;
use crate::regime::{is_ctin, is_tin, verify_converse_steps};

use sweep::{render, run_sweep, write_sweep_csv, Range, SweepOutput, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Seed for the pseudo-random verification directions.
pub const DIRECTION_SEED: u64 = 0x6d63_7469_6e00;

#[derive(Debug, Parser)]
#[command(name = "mctin", version, about = "Multi-cell TIN GDoF regions, regimes and oracle checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report CTIN and TIN regime membership with every violated condition.
    Classify { network: PathBuf },
    /// Export the polyhedral region as CSV (one row per constraint).
    Region {
        network: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Membership of a point, or the weighted sum-GDoF optimum.
    Query {
        network: PathBuf,
        #[arg(value_enum)]
        mode: QueryMode,
        /// Comma-separated rationals in canonical user order (cell-major).
        /// For `maxsum`, weights; defaults to all ones.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
    },
    /// Regime and sum-GDoF map over the symmetric two-cell family.
    Sweep(SweepArgs),
    /// Run oracle cross-checks against the polyhedral region.
    Verify(VerifyArgs),
    /// Emit a symmetric two-cell network file.
    Example {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryMode {
    Member,
    Maxsum,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "0")]
    pub alpha_min: String,
    #[arg(long, default_value = "1")]
    pub alpha_max: String,
    #[arg(long, default_value = "1/50")]
    pub alpha_step: String,
    #[arg(long, default_value = "0")]
    pub beta_min: String,
    #[arg(long, default_value = "1")]
    pub beta_max: String,
    #[arg(long, default_value = "1/50")]
    pub beta_step: String,
    /// Subset of regime,sum_gdof,ia_gap.
    #[arg(long, value_delimiter = ',', default_value = "regime,sum_gdof,ia_gap")]
    pub outputs: Vec<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub network: PathBuf,
    #[arg(long)]
    pub inclusion: bool,
    #[arg(long)]
    pub support: bool,
    #[arg(long)]
    pub duality: bool,
    #[arg(long = "converse-steps")]
    pub converse_steps: bool,
    #[arg(long)]
    pub all: bool,
    /// Grid step for the power exponents (default 1/20).
    #[arg(long)]
    pub step: Option<String>,
    /// Lowest power exponent (default: minus the largest strength).
    #[arg(long, allow_hyphen_values = true)]
    pub floor: Option<String>,
    /// Support/duality tolerance (default: four grid steps).
    #[arg(long)]
    pub tolerance: Option<String>,
    /// Number of pseudo-random directions added to the unit and all-ones ones.
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
    /// Add this point to the uplink cloud before the inclusion check.
    #[arg(long, allow_hyphen_values = true)]
    pub inject_point: Option<String>,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<i32, InputError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Classify { network } => cmd_classify(&network, out),
        Command::Region { network, output } => cmd_region(&network, output.as_deref(), out),
        Command::Query {
            network,
            mode,
            values,
        } => cmd_query(&network, mode, values.as_deref(), out),
        Command::Sweep(args) => cmd_sweep(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Example {
            alpha,
            beta,
            output,
        } => cmd_example(&alpha, &beta, output.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn parse_q(text: &str, what: &str) -> Result<Rational, InputError> {
    text.parse::<Rational>()
        .map_err(|e| InputError(format!("{what}: {e}")))
}

fn parse_list(text: &str) -> Result<Vec<Rational>, InputError> {
    text.split(',')
        .map(|s| parse_q(s, "value list"))
        .collect()
}

/// Reads and canonicalizes a network file, noting any reordering.
fn load(path: &Path, out: &mut dyn Write) -> Result<CellNetwork, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    let net = parse_network(&text)?;
    let (canon, perm) = canonicalize(&net);
    if !perm.is_identity() {
        writeln!(
            out,
            "note: users reordered by direct strength; canonical rank -> input rank per cell: {:?}",
            perm.0
        )?;
    }
    Ok(canon)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn sink<'a>(path: Option<&Path>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, InputError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| InputError(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(out),
    })
}

fn cmd_classify(path: &Path, out: &mut dyn Write) -> CmdResult {
    let net = load(path, out)?;
    let ctin = is_ctin(&net)?;
    let tin = is_tin(&net)?;
    writeln!(out, "CTIN: {}, TIN: {}", yes_no(ctin.regime_holds), yes_no(tin.regime_holds))?;
    for (name, report) in [("CTIN", &ctin), ("TIN", &tin)] {
        if !report.violations.is_empty() {
            writeln!(out, "{name} violations ({}):", report.violations.len())?;
            for v in &report.violations {
                writeln!(out, "  {v}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_region(path: &Path, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let net = load(path, &mut io::sink())?;
    let cs = build_constraints(&net)?;
    let mut w = sink(output, out)?;
    cs.write_csv(&mut w)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn cmd_query(path: &Path, mode: QueryMode, values: Option<&str>, out: &mut dyn Write) -> CmdResult {
    let net = load(path, out)?;
    let cs = build_constraints(&net)?;
    let n = net.user_total();
    let values = match values {
        Some(v) => parse_list(v)?,
        None if mode == QueryMode::Maxsum => vec![Rational::ONE; n],
        None => return Err(InputError("member query needs --values".into())),
    };
    if values.len() != n {
        return Err(InputError(format!(
            "dimension mismatch: network has {n} users, got {} values",
            values.len()
        )));
    }
    match mode {
        QueryMode::Member => {
            let d = GdofPoint::new(&net, values)?;
            let m = cs.is_member(&d)?;
            if m.member {
                writeln!(out, "member")?;
            } else {
                writeln!(out, "not member; violated constraints ({}):", m.violated.len())?;
                for &i in &m.violated {
                    let c = &cs.constraints()[i];
                    writeln!(out, "  {}: {} > {}", c.provenance, c.lhs(d.values()), c.bound)?;
                }
            }
        }
        QueryMode::Maxsum => {
            let (opt, arg) = cs.max_weighted(&values)?;
            writeln!(out, "{opt}")?;
            writeln!(out, "argmax: {arg}")?;
        }
    }
    Ok(EXIT_OK)
}

fn parse_outputs(names: &[String]) -> Result<Vec<SweepOutput>, InputError> {
    names
        .iter()
        .map(|s| match s.trim() {
            "regime" => Ok(SweepOutput::Regime),
            "sum_gdof" => Ok(SweepOutput::SumGdof),
            "ia_gap" => Ok(SweepOutput::IaGap),
            other => Err(InputError(format!("unknown sweep output `{other}`"))),
        })
        .collect()
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let spec = SweepSpec {
        alpha: Range {
            min: parse_q(&args.alpha_min, "alpha-min")?,
            max: parse_q(&args.alpha_max, "alpha-max")?,
            step: parse_q(&args.alpha_step, "alpha-step")?,
        },
        beta: Range {
            min: parse_q(&args.beta_min, "beta-min")?,
            max: parse_q(&args.beta_max, "beta-max")?,
            step: parse_q(&args.beta_step, "beta-step")?,
        },
        outputs: parse_outputs(&args.outputs)?,
    };
    let rows = run_sweep(&spec)?;
    let mut w = sink(args.output.as_deref(), out)?;
    write_sweep_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn cmd_example(alpha: &str, beta: &str, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let net = symmetric_two_cell(parse_q(alpha, "alpha")?, parse_q(beta, "beta")?)?;
    let mut w = sink(output, out)?;
    w.write_all(serialize_network(&net).as_bytes())?;
    w.flush()?;
    Ok(EXIT_OK)
}

fn fmt_direction(w: &[Rational]) -> String {
    let parts: Vec<String> = w.iter().map(|v| render(*v)).collect();
    format!("({})", parts.join(","))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let net = load(&args.network, out)?;
    let all = args.all || !(args.inclusion || args.support || args.duality || args.converse_steps);
    let step = match &args.step {
        Some(s) => parse_q(s, "step")?,
        None => default_step(),
    };
    let floor = match &args.floor {
        Some(s) => parse_q(s, "floor")?,
        None => default_floor(&net),
    };
    let tolerance = match &args.tolerance {
        Some(s) => parse_q(s, "tolerance")?,
        None => default_tolerance(step),
    };
    if !tolerance.is_positive() {
        return Err(InputError("tolerance must be positive".into()));
    }
    let injected = match &args.inject_point {
        Some(text) => Some(GdofPoint::new(&net, parse_list(text)?)?),
        None => None,
    };

    let ctin = is_ctin(&net)?.regime_holds;
    if !ctin {
        writeln!(
            out,
            "warning: network is outside the CTIN regime; the region carries no optimality claim"
        )?;
    }
    let cs = build_constraints(&net)?;
    let directions = sample_directions(net.user_total(), args.directions, DIRECTION_SEED);
    let mut failures: Vec<String> = Vec::new();

    let need_cloud = all || args.inclusion || args.support;
    let imac_cloud = if need_cloud {
        let mut cloud = sample_region(&net, Mode::Imac, step, floor)?;
        if let Some(p) = &injected {
            cloud.insert(p)?;
        }
        Some(cloud)
    } else {
        None
    };

    if all || args.inclusion {
        let cloud = imac_cloud.as_ref().expect("cloud built");
        let r = check_inclusion(cloud, &cs)?;
        if r.passed() {
            writeln!(out, "inclusion: pass ({} points)", r.points_checked)?;
        } else {
            let (pt, prov) = r.offender.clone().expect("failure has an offender");
            writeln!(
                out,
                "inclusion: FAIL ({} of {} points outside; worst excess {} at {} on {})",
                r.violating_points,
                r.points_checked,
                render(r.max_violation.expect("failure has an excess")),
                pt,
                prov
            )?;
            failures.push(format!("inclusion (constraint {prov})"));
        }
    }

    if all || args.support {
        let cloud = imac_cloud.as_ref().expect("cloud built");
        let r = check_support_match(cloud, &cs, &directions, tolerance)?;
        let worst = r.max_gap().unwrap_or(Rational::ZERO);
        if r.passed() {
            writeln!(
                out,
                "support: pass ({} directions, max gap {}, tolerance {})",
                r.rows.len(),
                render(worst),
                render(tolerance)
            )?;
        } else {
            writeln!(out, "support: FAIL (tolerance {})", render(tolerance))?;
            for row in r.rows.iter().filter(|r| !r.within_tolerance) {
                writeln!(
                    out,
                    "  direction {}: region {} cloud {} gap {}",
                    fmt_direction(&row.direction),
                    render(row.polytope_optimum),
                    render(row.cloud_maximum),
                    render(row.gap)
                )?;
            }
            failures.push("support".into());
        }
    }

    if all || args.duality {
        let r = check_duality(&net, step, floor, &directions, tolerance)?;
        let worst = r.rows.iter().map(|x| x.gap).max().unwrap_or(Rational::ZERO);
        if r.passed() {
            writeln!(
                out,
                "duality: pass ({} directions, max gap {}, tolerance {})",
                r.rows.len(),
                render(worst),
                render(tolerance)
            )?;
        } else {
            writeln!(out, "duality: FAIL (tolerance {})", render(tolerance))?;
            for row in r.rows.iter().filter(|r| !r.within_tolerance) {
                writeln!(
                    out,
                    "  direction {}: IMAC {} IBC {} gap {}",
                    fmt_direction(&row.direction),
                    render(row.imac_maximum),
                    render(row.ibc_maximum),
                    render(row.gap)
                )?;
            }
            failures.push("duality".into());
        }
    }

    if all || args.converse_steps {
        let mut checked = 0usize;
        let mut failed = Vec::new();
        for cycle in enumerate_cycles(net.cell_count()) {
            for ranks in rank_tuples(&net, &cycle)? {
                let r = verify_converse_steps(&net, &cycle, &ranks)?;
                checked += r.checks.len();
                for f in r.failures() {
                    failed.push(format!("{cycle} ranks {ranks:?}: {} ({} < {})", f.description, f.lhs, f.rhs));
                }
            }
        }
        if failed.is_empty() {
            writeln!(out, "converse-steps: pass ({checked} inequalities)")?;
        } else {
            writeln!(out, "converse-steps: FAIL ({} of {checked} inequalities)", failed.len())?;
            for f in &failed {
                writeln!(out, "  {f}")?;
            }
            failures.push("converse-steps".into());
        }
    }

    if failures.is_empty() {
        writeln!(out, "all checks passed")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "failed: {}", failures[0])?;
        Ok(EXIT_CHECK_FAILED)
    }
}
