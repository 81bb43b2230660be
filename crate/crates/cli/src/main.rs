//! Command-line front end: exact completion-time distributions, analytical
//! bounds, Monte Carlo estimates, NBU checks, and bound-vs-exact comparison
//! sweeps, all emitted as plot-ready CSV.

mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use linkwait::{
    check_nbu, check_tolerance, completion_pmf, completion_pmf_to_tail, deterministic_swap_bounds,
    estimate, gen_upper_mean, harmonic_number, markov_baseline, mean_of, repeater_bounds,
    switch_bounds, three_over_two, tree_mean_upper, tree_tail_upper, BoundReport, Error, GenModel,
    RepeaterSpec,
};

use input::{Grid, InlineSpec, Source};
use report::{num, Csv};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: malformed spec, document, or parameter (exit code 2).
    Input(String),
    /// Truncation budget exhausted; partial output was written (exit code 3).
    Resource(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "linkwait",
    version,
    about = "Completion-time analysis for tree-structured entanglement-distribution protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form mean and tail bounds for a configuration
    Bounds(BoundsArgs),
    /// Exact completion-time distribution (CSV of t,mass plus a tail record)
    Exact(ExactArgs),
    /// Monte Carlo estimate: mean, standard error, empirical co-CDF
    Simulate(SimulateArgs),
    /// Bound-vs-exact comparison: mean sweeps over a grid, or tail curves
    Compare(CompareArgs),
    /// NBU check on the exact completion-time law
    CheckNbu(CheckNbuArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Protocol document (UTF-8 JSON) to analyze
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Built-in spec: repeater:n=..,p_gen=..,p_swap=.. | switch:k=..,p_fuse=..,arm_p=.. |
    /// chain:segments=..,p_gen=.. | generate:p=..
    #[arg(long, value_name = "SPEC")]
    spec: Option<String>,
}

impl SourceArgs {
    fn resolve(&self) -> Result<Source, CliError> {
        Source::from_args(self.input.clone(), self.spec.as_deref())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Discrete,
    Exponential,
}

impl From<ModelArg> for GenModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Discrete => GenModel::Discrete,
            ModelArg::Exponential => GenModel::Exponential,
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Elementary-link model used by the closed forms
    #[arg(long, value_enum, default_value_t = ModelArg::Discrete)]
    model: ModelArg,
    /// Relative tolerance for any exact subcomputation a bound needs
    #[arg(long, value_name = "TOL", default_value_t = 1e-6)]
    rel_tol: f64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Truncation horizon in timesteps
    #[arg(long = "t-max", value_name = "INT")]
    t_max: u64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of independent samples
    #[arg(long, value_name = "INT")]
    samples: u64,
    /// Seed of the counter-based sample streams
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Mean-comparison sweep grid, e.g. p_swap=0.2:1.0:0.1
    #[arg(long, value_name = "PARAM=START:STOP:STEP", conflicts_with = "tail")]
    grid: Option<String>,
    /// Emit tail curves (exact co-CDF vs bound curves) instead of a mean sweep
    #[arg(long)]
    tail: bool,
    /// Horizon for --tail (chosen automatically when omitted)
    #[arg(long = "t-max", value_name = "INT")]
    t_max: Option<u64>,
    /// Relative tolerance of the exact means in a sweep
    #[arg(long, value_name = "TOL", default_value_t = 1e-4)]
    rel_tol: f64,
    /// Keep every k-th tail row
    #[arg(long, value_name = "INT", default_value_t = 1)]
    stride: u64,
    #[arg(long, value_enum, default_value_t = ModelArg::Discrete)]
    model: ModelArg,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckNbuArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Truncation horizon (chosen automatically when omitted)
    #[arg(long = "t-max", value_name = "INT")]
    t_max: Option<u64>,
    /// Violation tolerance (defaults to rounding slack plus twice the tail)
    #[arg(long, value_name = "TOL")]
    tolerance: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::CheckNbu(args) => cmd_check_nbu(args),
    }
}

fn provenance_of(report: &BoundReport, quantity: &str) -> String {
    report
        .provenance
        .iter()
        .find(|(q, _)| *q == quantity)
        .map(|(_, tag)| tag.to_string())
        .unwrap_or_default()
}

fn tail_curve_rows(csv: &mut Csv, report: &BoundReport) {
    let up = &report.tail_upper;
    let tag = provenance_of(report, "tail_upper");
    csv.row(&["tail_upper_prefactor_log".into(), num(up.prefactor_log), tag.clone()]);
    csv.row(&["tail_upper_rate".into(), num(up.rate), tag.clone()]);
    csv.row(&["tail_upper_valid_from".into(), num(up.valid_from), tag]);
    if let Some(lo) = &report.tail_lower {
        let tag = provenance_of(report, "tail_lower");
        csv.row(&["tail_lower_rate".into(), num(lo.rate), tag.clone()]);
        csv.row(&["tail_lower_valid_from".into(), num(lo.valid_from), tag]);
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode, CliError> {
    let source = args.source.resolve()?;
    let model: GenModel = args.model.into();
    let model_name = match model {
        GenModel::Discrete => "discrete",
        GenModel::Exponential => "exponential",
    };
    let config = format!(
        "command=bounds spec={} model={model_name}",
        source.describe()
    );
    let mut csv = Csv::new(&config, &[]);
    csv.header(&["quantity", "value", "provenance"]);

    match source.inline() {
        Some(&InlineSpec::Repeater { n, p_gen, p_swap }) => {
            let spec = RepeaterSpec::new(n, p_gen, p_swap, model)?;
            let report = repeater_bounds(&spec)?;
            csv.row(&[
                "mean_lower".into(),
                num(report.mean_lower),
                provenance_of(&report, "mean_lower"),
            ]);
            csv.row(&[
                "mean_upper".into(),
                num(report.mean_upper),
                provenance_of(&report, "mean_upper"),
            ]);
            csv.row(&[
                "three_over_two".into(),
                num(three_over_two(&spec)),
                "classical-estimate".into(),
            ]);
            let (markov_lo, markov_hi, _) = markov_baseline(&spec, 0);
            csv.row(&["markov_mean_lower".into(), num(markov_lo), "markov-baseline".into()]);
            csv.row(&["markov_mean_upper".into(), num(markov_hi), "markov-baseline".into()]);
            tail_curve_rows(&mut csv, &report);
            if report.degenerate {
                csv.row(&["degenerate".into(), "1".into(), "scope-flag".into()]);
            }
        }
        Some(&InlineSpec::Chain { segments, p_gen }) => {
            let (lo, hi) = deterministic_swap_bounds(segments, p_gen)?;
            csv.row(&["mean_lower".into(), num(lo), "harmonic-bracket".into()]);
            csv.row(&["mean_upper".into(), num(hi), "harmonic-bracket".into()]);
            csv.row(&[
                "harmonic_number".into(),
                num(harmonic_number::<f64>(segments)),
                "definition".into(),
            ]);
        }
        Some(&InlineSpec::Switch { k, p_fuse, arm_p }) => {
            let arm_mean = 1.0 / arm_p;
            csv.row(&["arm_mean".into(), num(arm_mean), "link-exact-mean".into()]);
            let report = switch_bounds(k, p_fuse, arm_mean)?;
            csv.row(&[
                "mean_lower".into(),
                num(report.mean_lower),
                provenance_of(&report, "mean_lower"),
            ]);
            csv.row(&[
                "mean_upper".into(),
                num(report.mean_upper),
                provenance_of(&report, "mean_upper"),
            ]);
            tail_curve_rows(&mut csv, &report);
        }
        Some(&InlineSpec::Generate { p }) => {
            csv.row(&["mean_exact".into(), num(1.0 / p), "link-exact-mean".into()]);
            csv.row(&[
                "mean_upper".into(),
                num(gen_upper_mean(p)?),
                "link-envelope-mean".into(),
            ]);
        }
        None => {
            // arbitrary tree from a document: recursive composition bounds
            let tree = source.tree()?;
            let mean_upper = tree_mean_upper(&tree)?;
            let curve = tree_tail_upper(&tree)?;
            csv.row(&["mean_upper".into(), num(mean_upper), "max-nbu-recursion".into()]);
            csv.row(&[
                "tail_upper_prefactor_log".into(),
                num(curve.prefactor_log),
                "compound-tail-envelope".into(),
            ]);
            csv.row(&["tail_upper_rate".into(), num(curve.rate), "compound-tail-envelope".into()]);
            csv.row(&[
                "tail_upper_valid_from".into(),
                num(curve.valid_from),
                "compound-tail-envelope".into(),
            ]);
            if tree.has_bound_mode() {
                csv.row(&["upper_bound_model".into(), "1".into(), "scope-flag".into()]);
            }
        }
    }
    csv.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_exact(args: ExactArgs) -> Result<ExitCode, CliError> {
    let source = args.source.resolve()?;
    let tree = source.tree()?;
    let res = completion_pmf(&tree, args.t_max)?;
    let config = format!(
        "command=exact spec={} t_max={}",
        source.describe(),
        args.t_max
    );
    let mut csv = Csv::new(
        &config,
        &[
            ("tail_mass", num(res.tail_mass)),
            ("mean_lower", num(res.mean_lower)),
            ("upper_bound_model", (res.is_upper_bound_model as u8).to_string()),
        ],
    );
    csv.header(&["t", "mass"]);
    let start = res.pmf.support_start();
    for (i, &m) in res.pmf.masses().iter().enumerate() {
        csv.row(&[(start + i as u64).to_string(), num(m)]);
    }
    csv.row(&["tail_mass".into(), num(res.tail_mass)]);
    csv.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let source = args.source.resolve()?;
    let tree = source.tree()?;
    let est = estimate(&tree, args.samples, args.seed)?;
    let config = format!(
        "command=simulate spec={} samples={} seed={}",
        source.describe(),
        args.samples,
        args.seed
    );
    let mut csv = Csv::new(
        &config,
        &[
            ("mean", num(est.mean)),
            ("std_error", num(est.std_error)),
            ("upper_bound_model", (tree.has_bound_mode() as u8).to_string()),
        ],
    );
    csv.header(&["t", "co_cdf"]);
    for &(t, s) in &est.co_cdf {
        csv.row(&[t.to_string(), num(s)]);
    }
    csv.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, CliError> {
    let source = args.source.resolve()?;
    if args.tail {
        compare_tail(&args, &source)
    } else {
        let grid = args
            .grid
            .as_deref()
            .ok_or_else(|| CliError::Input("compare needs --grid or --tail".into()))?;
        compare_mean_sweep(&args, &source, &Grid::parse(grid)?)
    }
}

fn sweep_spec(
    base: &InlineSpec,
    model: GenModel,
    param: &str,
    value: f64,
) -> Result<RepeaterSpec, CliError> {
    let &InlineSpec::Repeater { n, p_gen, p_swap } = base else {
        return Err(CliError::Input(
            "compare sweeps are defined for repeater specs".into(),
        ));
    };
    let spec = match param {
        "p_swap" => RepeaterSpec::new(n, p_gen, value, model)?,
        "p_gen" => RepeaterSpec::new(n, value, p_swap, model)?,
        "n" => RepeaterSpec::new(value.round() as u32, p_gen, p_swap, model)?,
        other => {
            return Err(CliError::Input(format!(
                "unknown sweep parameter `{other}` (expected p_swap, p_gen, or n)"
            )))
        }
    };
    Ok(spec)
}

fn compare_mean_sweep(
    args: &CompareArgs,
    source: &Source,
    grid: &Grid,
) -> Result<ExitCode, CliError> {
    let base = source
        .inline()
        .ok_or_else(|| CliError::Input("compare sweeps are defined for repeater specs".into()))?;
    let model: GenModel = args.model.into();

    struct Row {
        value: f64,
        exact: f64,
        report: BoundReport,
        classical: f64,
        markov: (f64, f64),
        limited: bool,
    }

    let rows: Vec<Row> = grid
        .values
        .par_iter()
        .map(|&value| -> Result<Row, CliError> {
            let spec = sweep_spec(base, model, &grid.param, value)?;
            let tree = linkwait::build_repeater(&spec);
            let (exact, limited) = match mean_of(&tree, args.rel_tol) {
                Ok(mean) => (mean, false),
                Err(Error::ResourceLimit { partial }) => (partial, true),
                Err(e) => return Err(e.into()),
            };
            let report = repeater_bounds(&spec)?;
            let (markov_lo, markov_hi, _) = markov_baseline(&spec, 0);
            Ok(Row {
                value,
                exact,
                classical: three_over_two(&spec),
                markov: (markov_lo, markov_hi),
                report,
                limited,
            })
        })
        .collect::<Result<_, _>>()?;

    let config = format!(
        "command=compare spec={} grid={}={:?} rel_tol={}",
        source.describe(),
        grid.param,
        grid.values,
        args.rel_tol
    );
    let mut csv = Csv::new(&config, &[]);
    csv.header(&[
        &grid.param,
        "exact_mean",
        "mean_lower",
        "mean_upper",
        "three_over_two",
        "markov_mean_lower",
        "markov_mean_upper",
        "ratio_lower",
        "ratio_upper",
        "status",
    ]);
    let mut any_limited = false;
    for row in &rows {
        any_limited |= row.limited;
        csv.row(&[
            num(row.value),
            num(row.exact),
            num(row.report.mean_lower),
            num(row.report.mean_upper),
            num(row.classical),
            num(row.markov.0),
            num(row.markov.1),
            num(row.report.mean_lower / row.exact),
            num(row.report.mean_upper / row.exact),
            if row.limited { "resource-limit" } else { "ok" }.into(),
        ]);
    }
    csv.write(&args.out)?;
    Ok(if any_limited {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn compare_tail(args: &CompareArgs, source: &Source) -> Result<ExitCode, CliError> {
    let base = source
        .inline()
        .ok_or_else(|| CliError::Input("compare --tail is defined for repeater specs".into()))?;
    let model: GenModel = args.model.into();
    let spec = base.repeater_spec(model)?;
    let tree = linkwait::build_repeater(&spec);
    let res = match args.t_max {
        Some(h) => completion_pmf(&tree, h)?,
        None => completion_pmf_to_tail(&tree, 5e-7)?,
    };
    let report = repeater_bounds(&spec)?;
    let table = res.pmf.co_cdf_table();

    let config = format!(
        "command=compare-tail spec={} t_max={} stride={}",
        source.describe(),
        res.pmf.t_max(),
        args.stride
    );
    let mut csv = Csv::new(&config, &[("tail_mass", num(res.tail_mass))]);
    csv.header(&[
        "t",
        "exact_co_cdf",
        "markov",
        "markov_improved",
        "tail_upper",
        "tail_lower",
    ]);
    let stride = args.stride.max(1);
    for t in (0..table.len() as u64).step_by(stride as usize) {
        let markov = markov_baseline(&spec, t).2;
        let improved = (report.mean_upper / (t as f64 + 1.0)).min(1.0);
        let upper = report.tail_upper.value_at(t as f64);
        let lower = report
            .tail_lower
            .as_ref()
            .map(|c| num(c.value_at(t as f64)))
            .unwrap_or_default();
        csv.row(&[
            t.to_string(),
            num(table[t as usize]),
            num(markov),
            num(improved),
            num(upper),
            lower,
        ]);
    }
    csv.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_nbu(args: CheckNbuArgs) -> Result<ExitCode, CliError> {
    let source = args.source.resolve()?;
    let tree = source.tree()?;
    let res = match args.t_max {
        Some(h) => completion_pmf(&tree, h)?,
        None => completion_pmf_to_tail(&tree, 1e-10)?,
    };
    let tolerance = args.tolerance.unwrap_or_else(|| check_tolerance(&res.pmf));
    let report = check_nbu(&res.pmf, tolerance)?;
    let config = format!(
        "command=check-nbu spec={} t_max={} tolerance={}",
        source.describe(),
        res.pmf.t_max(),
        tolerance
    );
    let mut csv = Csv::new(&config, &[("tail_mass", num(res.tail_mass))]);
    csv.header(&[
        "property",
        "passed",
        "worst_violation",
        "witness_x",
        "witness_y",
        "tolerance_used",
    ]);
    csv.row(&[
        "nbu".into(),
        report.passed.to_string(),
        num(report.worst_violation),
        report.witness.first().copied().unwrap_or(0).to_string(),
        report.witness.get(1).copied().unwrap_or(0).to_string(),
        num(report.tolerance_used),
    ]);
    csv.write(&args.out)?;
    Ok(ExitCode::SUCCESS)
}
