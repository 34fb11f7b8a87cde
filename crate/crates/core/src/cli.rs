//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the arguments, configuration or input
//! are invalid, 2 when a computation or I/O fails.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::Error;
use crate::exec::{self, Execution};
use crate::horton::{verify_strong_horton, zeta_by_recursion};
use crate::newick::{parse_tree, serialize_tree};
use crate::report::{Cell, Format, Report, Table};
use crate::sampler::{
    estimate, prune_invariance_check, sample_trees, SamplerConfig, SideBranchDistribution,
};
use crate::tokunaga::{RootMethod, TokunagaSequence};
use crate::tree::horton_statistics;

pub const THREADS_ENV: &str = "HORTONLAB_THREADS";
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "hortonlab",
    version,
    about = "Horton-Strahler statistics of self-similar binary trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected Horton numbers and the Horton exponent of a Tokunaga sequence.
    Predict(PredictArgs),
    /// Branch and side-branch counts of a Newick tree.
    Analyze(AnalyzeArgs),
    /// Monte Carlo estimates from Independent Random Attachment trees.
    Simulate(SimulateArgs),
    /// Convergence of N_k[K] / N_1[K] towards R^(1-k).
    Verify(VerifyArgs),
    /// Tokunaga coefficients before and after one pruning.
    Prunecheck(PrunecheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    Geometric,
    Shallow,
    Differentiated,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DistArg {
    Poisson,
    Geometric,
    Deterministic,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long = "T1", allow_negative_numbers = true)]
    t1: Option<f64>,
    #[arg(long = "T2", allow_negative_numbers = true)]
    t2: Option<f64>,
    /// Comma-separated T_1,T_2,... for the explicit family.
    #[arg(long = "T", allow_hyphen_values = true)]
    terms: Option<String>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat TOML file of default values; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long = "K")]
    order: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long = "K")]
    order: Option<u32>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    dist: Option<DistArg>,
    /// Also write every sampled tree, one Newick document per line.
    #[arg(long)]
    emit_trees: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long = "Kmax")]
    k_max: Option<u32>,
    #[arg(long = "jmax")]
    j_max: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PrunecheckArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long = "K")]
    order: Option<u32>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    dist: Option<DistArg>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum TermList {
    Text(String),
    Values(Vec<f64>),
}

/// Contents of a `--config` file. Keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<Family>,
    a: Option<f64>,
    c: Option<f64>,
    #[serde(rename = "T1")]
    t1: Option<f64>,
    #[serde(rename = "T2")]
    t2: Option<f64>,
    #[serde(rename = "T")]
    terms: Option<TermList>,
    #[serde(rename = "K")]
    order: Option<u32>,
    #[serde(rename = "Kmax")]
    k_max: Option<u32>,
    jmax: Option<u32>,
    samples: Option<u64>,
    seed: Option<u64>,
    dist: Option<DistArg>,
    format: Option<FormatArg>,
    out: Option<PathBuf>,
    input: Option<PathBuf>,
    #[serde(rename = "emit-trees", alias = "emit_trees")]
    emit_trees: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(format!("IO_ERROR: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(format!("INVALID_CONFIG: {}", msg.into()))
}

fn load_config(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("IO_ERROR: {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> CliResult<T> {
    flag.or(file)
        .ok_or_else(|| invalid(format!("missing required value --{name}")))
}

fn parse_terms(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| invalid(format!("--T entry {s:?} is not a number")))
        })
        .collect()
}

/// Sequence plus the effective family parameters, for echoing.
fn resolve_family(
    args: &FamilyArgs,
    file: &FileConfig,
    report: &mut Report,
) -> CliResult<TokunagaSequence> {
    let family = required(args.family, file.family, "family")?;
    let a = args.a.or(file.a);
    let c = args.c.or(file.c);
    let need =
        |v: Option<f64>, name: &str| v.ok_or_else(|| invalid(format!("--family needs --{name}")));
    let seq = match family {
        Family::Geometric | Family::Differentiated => {
            let (a, c) = (need(a, "a")?, need(c, "c")?);
            report.config("family", format!("{family:?}").to_lowercase());
            report.config("a", a);
            report.config("c", c);
            if family == Family::Geometric {
                TokunagaSequence::geometric(a, c)?
            } else {
                TokunagaSequence::differentiated(a, c)?
            }
        }
        Family::Shallow => {
            let t1 = need(args.t1.or(file.t1), "T1")?;
            let t2 = need(args.t2.or(file.t2), "T2")?;
            report.config("family", "shallow");
            report.config("T1", t1);
            report.config("T2", t2);
            TokunagaSequence::shallow(t1, t2)?
        }
        Family::Explicit => {
            let terms = match (&args.terms, &file.terms) {
                (Some(text), _) => parse_terms(text)?,
                (None, Some(TermList::Text(text))) => parse_terms(text)?,
                (None, Some(TermList::Values(v))) => v.clone(),
                (None, None) => return Err(invalid("--family explicit needs --T")),
            };
            let joined: Vec<String> = terms
                .iter()
                .map(|t| crate::report::format_real(*t))
                .collect();
            report.config("family", "explicit");
            report.config("T", joined.join(";"));
            TokunagaSequence::explicit(terms)?
        }
    };
    Ok(seq)
}

fn resolve_dist(flag: Option<DistArg>, file: Option<DistArg>) -> SideBranchDistribution {
    match flag.or(file).unwrap_or(DistArg::Poisson) {
        DistArg::Poisson => SideBranchDistribution::Poisson,
        DistArg::Geometric => SideBranchDistribution::Geometric,
        DistArg::Deterministic => SideBranchDistribution::Deterministic,
    }
}

fn dist_name(d: SideBranchDistribution) -> &'static str {
    match d {
        SideBranchDistribution::Poisson => "poisson",
        SideBranchDistribution::Geometric => "geometric",
        SideBranchDistribution::Deterministic => "deterministic",
    }
}

fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

struct Output {
    format: Format,
    path: Option<PathBuf>,
}

fn resolve_output(args: &OutputArgs, file: &FileConfig) -> Output {
    let format = match args.format.or(file.format).unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    Output {
        format,
        path: args.out.clone().or_else(|| file.out.clone()),
    }
}

fn predict(args: &PredictArgs) -> CliResult<(Report, Output)> {
    let file = load_config(args.output.config.as_deref())?;
    let output = resolve_output(&args.output, &file);
    let mut report = Report::new("predict");
    let seq = resolve_family(&args.family, &file, &mut report)?;
    let order = required(args.order, file.order, "K")?;
    report.config("K", order);
    let table = zeta_by_recursion(&seq, order)?;
    let exponent = seq.horton_exponent(ROOT_TOL)?;
    report.summary("R", exponent.r);
    report.summary("w0", exponent.w0);
    report.summary(
        "method",
        match exponent.method {
            RootMethod::ClosedForm => "closed_form",
            RootMethod::Bisection => "bisection",
        },
    );
    report.summary("residual", exponent.residual);
    let mut t = Table::new("zeta", &["k", "zeta_k", "xi_k", "R_pow_1_minus_k"]);
    for k in 1..=order {
        let i = k as usize - 1;
        t.push(vec![
            k.into(),
            table.zeta[i].into(),
            table.xi[i].into(),
            exponent.r.powi(1 - k as i32).into(),
        ]);
    }
    report.tables.push(t);
    Ok((report, output))
}

fn analyze(args: &AnalyzeArgs) -> CliResult<(Report, Output)> {
    let file = load_config(args.output.config.as_deref())?;
    let output = resolve_output(&args.output, &file);
    let input = required(args.input.clone(), file.input.clone(), "input")?;
    let text = fs::read_to_string(&input)
        .map_err(|e| CliError::Runtime(format!("IO_ERROR: {}: {e}", input.display())))?;
    let tree = parse_tree(&text)?;
    let stats = horton_statistics(&tree)?;
    let mut report = Report::new("analyze");
    report.config("input", input.display().to_string());
    report.summary("order", stats.order);
    report.summary("nodes", tree.len() as u64);
    report.summary("leaves", tree.leaf_count() as u64);
    let mut branches = Table::new("branches", &["k", "N_k"]);
    for k in 1..=stats.order {
        branches.push(vec![k.into(), stats.branches(k).into()]);
    }
    let mut sides = Table::new("side_branches", &["i", "j", "N_ij"]);
    for i in 1..=stats.order {
        for j in i + 1..=stats.order {
            sides.push(vec![i.into(), j.into(), stats.side_branches(i, j).into()]);
        }
    }
    report.tables.push(branches);
    report.tables.push(sides);
    Ok((report, output))
}

fn effective_seed(flag: Option<u64>, file: Option<u64>) -> u64 {
    flag.or(file).unwrap_or_else(rand::random)
}

fn simulate(args: &SimulateArgs, stderr: &mut dyn Write) -> CliResult<(Report, Output)> {
    let file = load_config(args.output.config.as_deref())?;
    let output = resolve_output(&args.output, &file);
    let mut report = Report::new("simulate");
    let seq = resolve_family(&args.family, &file, &mut report)?;
    let order = required(args.order, file.order, "K")?;
    let samples = required(args.samples, file.samples, "samples")?;
    let seed = effective_seed(args.seed, file.seed);
    let dist = resolve_dist(args.dist, file.dist);
    report.config("K", order);
    report.config("samples", samples);
    report.config("seed", seed);
    report.config("dist", dist_name(dist));
    writeln!(stderr, "seed={seed}")?;
    let config = SamplerConfig::new(seq.clone(), order, samples, seed).with_distribution(dist);
    config.validate()?;
    let threads = thread_cap()?;
    let emit = args.emit_trees.clone().or_else(|| file.emit_trees.clone());
    if let Some(path) = &emit {
        report.config("emit-trees", path.display().to_string());
        let trees = exec::with_thread_cap(threads, || sample_trees(&config, Execution::Parallel))?;
        let mut text = String::new();
        for t in &trees {
            text.push_str(&serialize_tree(t)?);
            text.push('\n');
        }
        fs::write(path, text)?;
    }
    let sim = exec::with_thread_cap(threads, || estimate(&config, Execution::Parallel))?;
    let theory = zeta_by_recursion(&seq, order)?;
    let mut branches = Table::new("branches", &["k", "mean_Nk", "se_Nk", "theory_Nk"]);
    for (i, e) in sim.mean_nk.iter().enumerate() {
        branches.push(vec![
            (i as u32 + 1).into(),
            e.mean.into(),
            e.se.into(),
            theory.zeta[i].into(),
        ]);
    }
    let mut sides = Table::new(
        "side_branches",
        &["i", "j", "mean_Nij", "se_Nij", "T_hat_ij", "T_theory"],
    );
    for p in &sim.pairs {
        sides.push(vec![
            p.i.into(),
            p.j.into(),
            p.mean.into(),
            p.se.into(),
            p.t_hat.into(),
            seq.term(p.j - p.i).into(),
        ]);
    }
    report.tables.push(branches);
    report.tables.push(sides);
    Ok((report, output))
}

fn verify(args: &VerifyArgs) -> CliResult<(Report, Output)> {
    let file = load_config(args.output.config.as_deref())?;
    let output = resolve_output(&args.output, &file);
    let mut report = Report::new("verify");
    let seq = resolve_family(&args.family, &file, &mut report)?;
    let k_max = required(args.k_max, file.k_max, "Kmax")?;
    let j_max = args.j_max.or(file.jmax).unwrap_or(6.min(k_max));
    report.config("Kmax", k_max);
    report.config("jmax", j_max);
    let rep = verify_strong_horton(&seq, k_max, j_max)?;
    report.summary("R_estimate", rep.r_estimate);
    report.summary(
        "R_theory",
        rep.r_theory.map_or(Cell::Text(String::new()), Cell::Real),
    );
    report.summary("diverged", rep.diverged);
    report.summary(
        "status",
        if rep.diverged {
            format!("no convergence detected up to Kmax={k_max}")
        } else {
            "converged".to_string()
        },
    );
    let r = rep.r_theory.unwrap_or(rep.r_estimate);
    let mut ratios = Table::new("ratios", &["K", "ratio", "R_estimate_error"]);
    for (i, ratio) in rep.ratio_sequence.iter().enumerate() {
        ratios.push(vec![
            (i as u32 + 1).into(),
            (*ratio).into(),
            (ratio - r).abs().into(),
        ]);
    }
    let mut xi = Table::new("xi", &["j", "R_pow_1_minus_j", "error"]);
    for &(j, err) in &rep.per_j_errors {
        xi.push(vec![j.into(), r.powi(1 - j as i32).into(), err.into()]);
    }
    report.tables.push(ratios);
    report.tables.push(xi);
    Ok((report, output))
}

fn prunecheck(args: &PrunecheckArgs, stderr: &mut dyn Write) -> CliResult<(Report, Output)> {
    let file = load_config(args.output.config.as_deref())?;
    let output = resolve_output(&args.output, &file);
    let mut report = Report::new("prunecheck");
    let seq = resolve_family(&args.family, &file, &mut report)?;
    let order = required(args.order, file.order, "K")?;
    let samples = required(args.samples, file.samples, "samples")?;
    let seed = effective_seed(args.seed, file.seed);
    let dist = resolve_dist(args.dist, file.dist);
    report.config("K", order);
    report.config("samples", samples);
    report.config("seed", seed);
    report.config("dist", dist_name(dist));
    writeln!(stderr, "seed={seed}")?;
    let config = SamplerConfig::new(seq, order, samples, seed).with_distribution(dist);
    let threads = thread_cap()?;
    let rep = exec::with_thread_cap(threads, || {
        prune_invariance_check(&config, Execution::Parallel)
    })?;
    report.summary("identity_violations", rep.identity_violations);
    report.summary("max_discrepancy_se", rep.max_discrepancy_se);
    report.summary("max_theory_discrepancy_se", rep.max_theory_discrepancy_se);
    let mut t = Table::new(
        "tokunaga",
        &[
            "i",
            "j",
            "T_hat_pruned",
            "se_pruned",
            "T_hat_direct",
            "se_direct",
            "T_theory",
            "z_direct",
            "z_theory",
        ],
    );
    for p in &rep.pairs {
        t.push(vec![
            p.i.into(),
            p.j.into(),
            p.t_hat_pruned.into(),
            p.se_pruned.into(),
            p.t_hat_direct.into(),
            p.se_direct.into(),
            p.t_theory.into(),
            p.z_direct.into(),
            p.z_theory.into(),
        ]);
    }
    report.tables.push(t);
    Ok((report, output))
}

fn emit(report: &Report, output: &Output, stdout: &mut dyn Write) -> CliResult<()> {
    match &output.path {
        Some(path) => {
            let mut buf = Vec::new();
            report.write(output.format, &mut buf)?;
            fs::write(path, buf)?;
        }
        None => report.write(output.format, stdout)?,
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Predict(a) => predict(a),
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a, stderr),
        Command::Verify(a) => verify(a),
        Command::Prunecheck(a) => prunecheck(a, stderr),
    }
    .and_then(|(report, output)| emit(&report, &output, stdout));
    match result {
        Ok(()) => 0,
        Err(CliError::Validation(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}
