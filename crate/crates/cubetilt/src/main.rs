//! Thin command-line front end over the library. Each subcommand maps to
//! one library entry point; all policy lives in the library so the examples
//! and the CLI cannot drift apart.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, unknown
//! subcommands), 2 on data errors (unreadable files, dimension mismatches,
//! violated preconditions). Numeric values printed to stdout use nine
//! decimal places.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cubetilt::analysis::{
    alternating_cycles, approx_bound, check_structural_lemma, infer_xi, ratio_ceiling,
};
use cubetilt::covering::greedy_cover;
use cubetilt::distribution::{write_weights_jsonl, WeightedDistribution};
use cubetilt::exact::{exact_perfect_matching, exact_w1};
use cubetilt::generators::{gen_adversarial, gen_clustered, GenKind, GenSpec};
use cubetilt::greedy::{greedy_match, TieBreak};
use cubetilt::hypercube::{Dataset, Point};
use cubetilt::pipeline::{reweigh_pipeline, reweigh_pipeline_timed};
use cubetilt::reduce::{default_scale, greedy_w1, ReweighConfig};
use cubetilt::sampler::{concentration_experiment, experiment_csv, Estimator};
use cubetilt::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cubetilt",
    version,
    about = "Transport-based dataset reweighing on the boolean hypercube"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tilt a source dataset toward a target and export per-record weights.
    Reweigh(ReweighArgs),
    /// Estimate the transport distance between two datasets.
    W1(W1Args),
    /// Cover a dataset's support with Hamming balls and report the count.
    Cover(CoverArgs),
    /// Compare greedy and exact matchings record by record.
    Analyze(AnalyzeArgs),
    /// Write a synthetic (source, target) dataset pair.
    Gen(GenArgs),
    /// Measure how fast subsample distributions approach the full one.
    SampleExp(SampleExpArgs),
}

#[derive(Args)]
struct ReweighArgs {
    /// Source dataset file.
    #[arg(long)]
    source: PathBuf,
    /// Target dataset file.
    #[arg(long)]
    target: PathBuf,
    /// Tilt factor in [0, 1]; 0 passes the source through unchanged.
    #[arg(long)]
    alpha: f64,
    /// Per-side sample size; omit to transport the full distributions.
    #[arg(long)]
    sample_size: Option<usize>,
    /// Integer mass scale; omit to derive one from the lightest weight.
    #[arg(long)]
    scale: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tie-break rule for the greedy sweep.
    #[arg(long, value_enum, default_value_t = TieBreakArg::Lex)]
    tie_break: TieBreakArg,
    /// Output path for per-record weights (JSON lines).
    #[arg(long)]
    out: PathBuf,
    /// Output path for the run report (JSON).
    #[arg(long)]
    report: PathBuf,
    /// Include stage timings in the report; costs reproducibility.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct W1Args {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Mass scale for the greedy method; ignored by the exact method.
    #[arg(long)]
    scale: Option<u64>,
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    input: PathBuf,
    /// Ball radius for the cover.
    #[arg(long)]
    radius: u32,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Supply-side dataset; every record is one unit.
    #[arg(long)]
    a: PathBuf,
    /// Demand-side dataset; must have as many records as the supply side.
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Hypercube dimension.
    #[arg(long)]
    d: usize,
    /// Records per side (clustered only).
    #[arg(long, required_if_eq("kind", "clustered"))]
    n: Option<usize>,
    /// Cluster count (clustered only).
    #[arg(long, required_if_eq("kind", "clustered"))]
    eta: Option<usize>,
    /// Cluster radius (clustered only).
    #[arg(long, required_if_eq("kind", "clustered"))]
    zeta: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exponential skew of cluster weights on the target side.
    #[arg(long, default_value_t = 0.0)]
    skew: f64,
    /// Difficulty level k (adversarial only); sides have 2^k units.
    #[arg(long, required_if_eq("kind", "adversarial"))]
    level: Option<u32>,
    #[arg(long)]
    out_source: PathBuf,
    #[arg(long)]
    out_target: PathBuf,
}

#[derive(Args)]
struct SampleExpArgs {
    /// Dataset whose distribution is subsampled.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    m_values: Vec<usize>,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Exact)]
    estimator: EstimatorArg,
    /// Slack multiplier on the spread term of the threshold.
    #[arg(long, default_value_t = 0.1)]
    epsilon_slack: f64,
    /// Optional JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Optional long-format CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Greedy,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Lex,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Clustered,
    Adversarial,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Exact,
    Greedy,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; only real usage
            // errors take the nonzero path.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Reweigh(args) => cmd_reweigh(args),
        Command::W1(args) => cmd_w1(args),
        Command::Cover(args) => cmd_cover(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Gen(args) => cmd_gen(args),
        Command::SampleExp(args) => cmd_sample_exp(args),
    }
}

fn cmd_reweigh(args: ReweighArgs) -> Result<()> {
    let source = Dataset::read(&args.source)?;
    let target = Dataset::read(&args.target)?;
    let config = ReweighConfig {
        alpha: args.alpha,
        scale: args.scale,
        sample_size: args.sample_size,
        seed: args.seed,
        tie_break: match args.tie_break {
            TieBreakArg::Lex => TieBreak::Lex,
        },
    };
    let run = if args.timings {
        reweigh_pipeline_timed(&source, &target, &config)?
    } else {
        reweigh_pipeline(&source, &target, &config)?
    };
    write_file(&args.out, |w| write_weights_jsonl(&run.record_weights, w))?;
    write_json(&args.report, &run.report)?;
    println!("w1_source_target={:.9}", run.report.w1_source_target);
    println!("w1_result_target={:.9}", run.report.w1_result_target);
    Ok(())
}

fn cmd_w1(args: W1Args) -> Result<()> {
    let a = WeightedDistribution::from_dataset(&Dataset::read(&args.a)?)?;
    let b = WeightedDistribution::from_dataset(&Dataset::read(&args.b)?)?;
    let value = match args.method {
        Method::Greedy => {
            let scale = args.scale.unwrap_or_else(|| default_scale(&a, &b));
            greedy_w1(&a, &b, scale)?
        }
        Method::Exact => exact_w1(&a, &b)?,
    };
    println!("{value:.9}");
    Ok(())
}

#[derive(Serialize)]
struct CoverCenter<'a> {
    id: &'a str,
    point: String,
}

#[derive(Serialize)]
struct CoverOutput<'a> {
    eta: usize,
    zeta: u32,
    centers: Vec<CoverCenter<'a>>,
    packing_count: usize,
    packing_radius: u32,
}

fn cmd_cover(args: CoverArgs) -> Result<()> {
    let dist = WeightedDistribution::from_dataset(&Dataset::read(&args.input)?)?;
    let report = greedy_cover(dist.points(), args.radius)?;
    let centers = report
        .centers
        .iter()
        .map(|&i| CoverCenter {
            id: dist.ids()[i].as_str(),
            point: dist.points()[i].to_bit_string(),
        })
        .collect();
    let out = CoverOutput {
        eta: report.eta,
        zeta: report.zeta,
        centers,
        packing_count: report.packing_count,
        packing_radius: report.packing_radius,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

#[derive(Serialize)]
struct CycleOutput {
    len: usize,
    alpha: Option<f64>,
    lemma_holds: bool,
}

#[derive(Serialize)]
struct AnalyzeOutput {
    dim: usize,
    units: usize,
    greedy_cost: u64,
    exact_cost: u64,
    ratio: f64,
    ceiling: f64,
    bound: f64,
    cycles: Vec<CycleOutput>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let a = Dataset::read(&args.a)?;
    let b = Dataset::read(&args.b)?;
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let supply = a.points();
    let demand = b.points();
    if supply.len() != demand.len() {
        return Err(Error::Invalid(format!(
            "analyze needs equally many records, got {} and {}",
            supply.len(),
            demand.len()
        )));
    }
    let greedy = greedy_match(&supply, &demand);
    let optimal = exact_perfect_matching(&supply, &demand)?;
    let decomposition = alternating_cycles(&supply, &demand, &greedy, &optimal)?;
    let cycles = decomposition
        .cycles
        .iter()
        .map(|c| CycleOutput {
            len: c.len(),
            alpha: c.alpha(),
            // A cycle with zero optimal weight has nothing to bound.
            lemma_holds: check_structural_lemma(c, a.dim).is_none_or(|chk| chk.holds),
        })
        .collect();
    let ratio = if optimal.total_weight == 0 {
        if greedy.total_weight == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        greedy.total_weight as f64 / optimal.total_weight as f64
    };
    let out = AnalyzeOutput {
        dim: a.dim,
        units: supply.len(),
        greedy_cost: greedy.total_weight,
        exact_cost: optimal.total_weight,
        ratio,
        ceiling: ratio_ceiling(&decomposition),
        bound: best_apriori_bound(&supply, &demand, a.dim)?,
        cycles,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

/// Tightest a-priori approximation factor over doubling cover radii of the
/// combined support, with unit leading constant.
fn best_apriori_bound(supply: &[Point], demand: &[Point], dim: usize) -> Result<f64> {
    let mut all: Vec<Point> = supply.to_vec();
    all.extend_from_slice(demand);
    let mut best = f64::INFINITY;
    let mut zeta = 1u32;
    while (zeta as usize) < dim {
        let eta = greedy_cover(&all, zeta)?.eta;
        let bound = approx_bound(zeta, dim, infer_xi(eta, dim), 1.0)?;
        best = best.min(bound);
        zeta *= 2;
    }
    Ok(best)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let (source, target) = match args.kind {
        KindArg::Clustered => {
            // Presence of n, eta, and zeta is enforced by the parser.
            let spec = GenSpec {
                d: args.d,
                n: args.n.unwrap_or_default(),
                eta: args.eta.unwrap_or_default(),
                zeta: args.zeta.unwrap_or_default(),
                seed: args.seed,
                kind: GenKind::Clustered { skew: args.skew },
            };
            let instance = gen_clustered(&spec)?;
            (instance.source, instance.target)
        }
        KindArg::Adversarial => gen_adversarial(args.level.unwrap_or_default(), args.d)?,
    };
    source.write(&args.out_source)?;
    target.write(&args.out_target)?;
    Ok(())
}

fn cmd_sample_exp(args: SampleExpArgs) -> Result<()> {
    let dist = WeightedDistribution::from_dataset(&Dataset::read(&args.input)?)?;
    let estimator = match args.estimator {
        EstimatorArg::Exact => Estimator::Exact,
        EstimatorArg::Greedy => Estimator::Greedy,
    };
    let reports = concentration_experiment(
        &dist,
        &args.m_values,
        args.trials,
        args.seed,
        estimator,
        args.epsilon_slack,
    )?;
    for r in &reports {
        println!(
            "m={} threshold={:.9} exceed_fraction={:.9}",
            r.m, r.threshold, r.exceed_fraction
        );
    }
    if let Some(path) = &args.report {
        write_json(path, &reports)?;
    }
    if let Some(path) = &args.csv {
        write_file(path, |w| {
            use std::io::Write;
            w.write_all(experiment_csv(&reports).as_bytes())
                .map_err(|e| io_err(path, e))
        })?;
    }
    Ok(())
}

fn write_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>,
{
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w)?;
    use std::io::Write;
    w.flush().map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
