//! Command-line front end.
//!
//! Three commands: `params` derives and prints matrix parameters, `embed`
//! applies a sampled matrix to a vector file, and `verify` runs one of the
//! five verification experiments and emits a JSON report.
//!
//! Exit codes are a stable contract: 0 success (all verdicts pass), 1 at
//! least one verdict failed, 2 parameter or capacity error, 3 input or IO
//! error. Flag parse errors exit 2 through clap.
//!
//! Every command is deterministic given its flags: the master seed defaults
//! to a fixed constant rather than entropy, and `--threads` never changes
//! results, only wall-clock time. Pass `--seed entropy` to opt into a
//! randomly drawn seed.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sscjl_core::{
    bounds, compute_parameters, sample_matrix, SeedSpec, VectorBatch,
};

use crate::enumeration::exact_energy_distribution;
use crate::io::{parse_delimiter, read_vector_batch, write_matrix, write_vector_batch, VectorFormat};
use crate::montecarlo::{
    self, default_eps_grid, default_t_grid, fixed_direction, sample_dense_energies,
    sample_djl_energies, sample_energies, sample_overlaps, BaselineComparison, DirectionSource,
    DjlEstimate, MgfEstimate, QMomentEstimate, TailCurve, TailEstimate,
};
use crate::report::{all_pass, ExperimentReport, ParamsEcho, Verdict, SCHEMA_VERSION};
use crate::LabError;

/// Master seed used when `--seed` is absent, chosen for greppability
/// (the ASCII bytes "SSCJL1").
pub const DEFAULT_MASTER_SEED: u64 = u64::from_be_bytes([0, 0, b'S', b'S', b'C', b'J', b'L', b'1']);

/// A `--seed` argument: a literal value or a request for entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Entropy,
}

impl SeedArg {
    /// The concrete master seed, drawing from the OS if asked to.
    pub fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(v) => v,
            SeedArg::Entropy => rand::random(),
        }
    }
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "entropy" {
        return Ok(SeedArg::Entropy);
    }
    s.parse()
        .map(SeedArg::Fixed)
        .map_err(|_| format!("expected an unsigned 64-bit integer or \"entropy\", got {s:?}"))
}

fn resolve_seed(seed: Option<SeedArg>) -> u64 {
    seed.unwrap_or(SeedArg::Fixed(DEFAULT_MASTER_SEED)).resolve()
}

/// Writes to stdout, treating a closed pipe (`sscjl ... | head`) as a normal
/// end of output rather than an error.
fn write_stdout(text: &str) -> Result<(), LabError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sscjl",
    version,
    about = "Sparse sign-consistent random projections: derive parameters, embed vectors, verify guarantees"
)]
pub struct Cli {
    /// Cap the worker thread count (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive matrix parameters from a distortion bound and failure rate.
    Params(ParamsArgs),
    /// Embed a delimited vector file.
    Embed(EmbedArgs),
    /// Run a verification experiment and emit its report.
    Verify {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Distortion bound, in (0, 1).
    #[arg(long)]
    pub eps: f64,
    /// Failure probability, in (0, 1).
    #[arg(long)]
    pub delta: f64,
    /// Print a JSON document instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Input vector file.
    #[arg(long)]
    pub input: PathBuf,
    /// Output vector file.
    #[arg(long)]
    pub output: PathBuf,
    /// Distortion bound; derives (d, s) together with --delta.
    #[arg(long, requires = "delta", conflicts_with_all = ["d", "s"])]
    pub eps: Option<f64>,
    /// Failure probability for --eps.
    #[arg(long, requires = "eps")]
    pub delta: Option<f64>,
    /// Explicit output dimension; pairs with --s.
    #[arg(long, requires = "s", conflicts_with_all = ["eps", "delta"])]
    pub d: Option<usize>,
    /// Explicit per-column sparsity for --d.
    #[arg(long, requires = "d")]
    pub s: Option<usize>,
    /// Master seed: an unsigned integer, or "entropy".
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<SeedArg>,
    /// Field delimiter: one character, or tab/space/comma.
    #[arg(long, default_value = "tab")]
    pub delimiter: String,
    /// Treat the first field of each line as a label.
    #[arg(long)]
    pub labeled: bool,
    /// Also write the sampled matrix to this file.
    #[arg(long)]
    pub save_matrix: Option<PathBuf>,
}

/// Flags shared by every verification experiment.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Master seed: an unsigned integer, or "entropy".
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<SeedArg>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Dump raw per-trial records here as newline-delimited JSON.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Exceedance tails of the distortion energy against the closed-form
    /// tail bound.
    Tails(TailsArgs),
    /// Distributional embedding guarantee at derived parameters.
    Djl(DjlArgs),
    /// First and second moments of the column overlap against the exact law.
    Moments(MomentsArgs),
    /// Moment generating function of the distortion energy against its
    /// closed-form bound.
    Mgf(MgfArgs),
    /// Distortion quantiles next to a dense random-sign baseline
    /// (informational, no verdicts).
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct TailsArgs {
    /// Output dimension.
    #[arg(long, default_value_t = 200)]
    pub d: usize,
    /// Per-column sparsity.
    #[arg(long, default_value_t = 20)]
    pub s: usize,
    /// Input dimension.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Matrix draws.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Comma-separated exceedance thresholds (default: 16 log-spaced points
    /// from v/4 to 16v).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Enumerate the exact law as well and require the confidence intervals
    /// to cover it (small configurations only).
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct DjlArgs {
    /// Distortion bound, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Failure probability, in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Input dimension.
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    /// Matrix draws.
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    /// Embed one seed-derived direction instead of a fresh random unit
    /// vector per trial.
    #[arg(long)]
    pub fixed: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Output dimension.
    #[arg(long, default_value_t = 100)]
    pub d: usize,
    /// Per-column sparsity.
    #[arg(long, default_value_t = 10)]
    pub s: usize,
    /// Column-pair draws.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct MgfArgs {
    /// Output dimension.
    #[arg(long, default_value_t = 200)]
    pub d: usize,
    /// Per-column sparsity.
    #[arg(long, default_value_t = 20)]
    pub s: usize,
    /// Input dimension.
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    /// Matrix draws.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Comma-separated t values inside the bound's domain (default: 8
    /// symmetric points).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Output dimension.
    #[arg(long, default_value_t = 512)]
    pub d: usize,
    /// Per-column sparsity of the sparse variant.
    #[arg(long, default_value_t = 16)]
    pub s: usize,
    /// Input dimension.
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Matrix draws per variant.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Runs a parsed command line. `Ok(true)` means success, `Ok(false)` means
/// at least one verdict failed.
pub fn run(cli: Cli) -> Result<bool, LabError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::InvalidArgument(format!("cannot set up {n} worker threads: {e}")))?;
    }
    match cli.command {
        Command::Params(args) => cmd_params(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Verify { experiment } => cmd_verify(experiment),
    }
}

fn cmd_params(args: ParamsArgs) -> Result<bool, LabError> {
    let params = compute_parameters(args.eps, args.delta)?;
    let text = if args.json {
        let doc = json!({
            "epsilon": params.epsilon,
            "delta": params.delta,
            "d": params.d,
            "s": params.s,
            "p_nominal": params.p_nominal,
            "p_actual": params.p_actual(),
            "feasible": params.feasible(),
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
        text.push('\n');
        text
    } else {
        let mut text = format!(
            "epsilon    {}\ndelta      {}\nd          {}\ns          {}\n",
            params.epsilon, params.delta, params.d, params.s
        );
        text.push_str(&format!(
            "p_nominal  {}\np_actual   {}\nfeasible   {}\n",
            params.p_nominal,
            params.p_actual(),
            params.feasible()
        ));
        if params.clamped {
            text.push_str("note: sparsity was clamped to the full column\n");
        }
        text
    };
    write_stdout(&text)?;
    Ok(true)
}

fn cmd_embed(args: EmbedArgs) -> Result<bool, LabError> {
    let delimiter = parse_delimiter(&args.delimiter)?;
    let format = VectorFormat { delimiter, labeled: args.labeled };
    let batch = read_vector_batch(BufReader::new(File::open(&args.input)?), &format)?;
    let m = batch.m();

    let (d, s) = match (args.eps, args.delta, args.d, args.s) {
        (Some(eps), Some(delta), None, None) => {
            let params = compute_parameters(eps, delta)?;
            (params.d, params.s)
        }
        (None, None, Some(d), Some(s)) => (d, s),
        _ => {
            return Err(LabError::InvalidArgument(
                "provide either --eps with --delta, or --d with --s".into(),
            ))
        }
    };

    let seed = SeedSpec::new(resolve_seed(args.seed));
    let matrix = sample_matrix(d, m, s, seed)?;
    write_stdout(&format!(
        "matrix: d={} m={} s={} master_seed={} stream_id={}\n",
        matrix.d(),
        matrix.m(),
        matrix.s(),
        seed.master_seed,
        seed.stream_id
    ))?;

    let embedded: Vec<Vec<f64>> = batch.iter().map(|x| matrix.apply(x)).collect::<Result<_, _>>()?;
    let out = if batch.has_labels() {
        let labels = (0..batch.len())
            .map(|i| batch.label(i).unwrap_or_default().to_string())
            .collect();
        VectorBatch::with_labels(embedded, labels)?
    } else {
        VectorBatch::new(embedded)?
    };

    let mut writer = BufWriter::new(File::create(&args.output)?);
    write_vector_batch(&mut writer, &out, &format)?;
    writer.flush()?;

    if let Some(path) = &args.save_matrix {
        let mut writer = BufWriter::new(File::create(path)?);
        write_matrix(&mut writer, &matrix)?;
        writer.flush()?;
    }
    Ok(true)
}

fn cmd_verify(experiment: Experiment) -> Result<bool, LabError> {
    let started = Instant::now();
    let (mut report, run) = match experiment {
        Experiment::Tails(args) => run_tails(args)?,
        Experiment::Djl(args) => run_djl(args)?,
        Experiment::Moments(args) => run_moments(args)?,
        Experiment::Mgf(args) => run_mgf(args)?,
        Experiment::Baseline(args) => run_baseline(args)?,
    };
    report.duration_seconds = started.elapsed().as_secs_f64();
    emit_report(&report, &run)
}

fn new_report(kind: &str, config: Value, estimates: Value, verdicts: Vec<Verdict>) -> ExperimentReport {
    let pass = all_pass(&verdicts);
    ExperimentReport {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        config,
        params: None,
        estimates,
        overlays: Value::Null,
        verdicts,
        all_pass: pass,
        duration_seconds: 0.0,
    }
}

fn emit_report(report: &ExperimentReport, run: &RunArgs) -> Result<bool, LabError> {
    let text = report.to_json_pretty();
    match &run.report {
        Some(path) => std::fs::write(path, &text)?,
        None => write_stdout(&text)?,
    }
    for v in &report.verdicts {
        eprintln!(
            "{} {}: observed {:.6e}, threshold {:.6e}",
            if v.pass { "PASS" } else { "FAIL" },
            v.criterion,
            v.observed,
            v.threshold
        );
    }
    Ok(report.all_pass)
}

fn dump_records<T: Serialize>(
    path: &Path,
    records: impl IntoIterator<Item = T>,
) -> Result<(), LabError> {
    let mut writer = BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut writer, &record).expect("record serializes");
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Worst signed margin of the exceedance lower confidence limit over the
/// tail bound; positive means the bound was significantly exceeded.
fn dominance_verdict(name: &str, curve: &TailCurve, v: f64) -> Result<Verdict, LabError> {
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for (i, &eps) in curve.eps_grid.iter().enumerate() {
        let bound = bounds::hw_tail_bound(eps, v)?;
        let margin = curve.ci_lower[i] - bound;
        if margin > worst {
            worst = margin;
            at = eps;
        }
    }
    Ok(Verdict::at_most(
        name,
        worst,
        0.0,
        format!("worst lower-CI minus bound at eps = {at}"),
    ))
}

/// Worst distance of the exact probability outside the empirical interval;
/// zero when every grid point is covered.
fn coverage_verdict(name: &str, curve: &TailCurve, exact: &[f64]) -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for (i, &eps) in curve.eps_grid.iter().enumerate() {
        let miss = (curve.ci_lower[i] - exact[i]).max(exact[i] - curve.ci_upper[i]).max(0.0);
        if miss > worst {
            worst = miss;
            at = eps;
        }
    }
    Verdict::at_most(name, worst, 0.0, format!("worst interval miss at eps = {at}"))
}

#[derive(Serialize)]
struct EnergyRecord {
    trial: usize,
    energy: f64,
}

fn run_tails(args: TailsArgs) -> Result<(ExperimentReport, RunArgs), LabError> {
    let TailsArgs { d, s, m, trials, grid, exact, run } = args;
    let master_seed = resolve_seed(run.seed);
    let p = s as f64 / d as f64;
    let v = bounds::variance_proxy(p, s)?.v();
    let eps_grid = match &grid {
        Some(g) => g.clone(),
        None => default_eps_grid(v),
    };
    let x = fixed_direction(m, master_seed);

    let energies = sample_energies(d, m, s, &x, trials, master_seed)?;
    if let Some(path) = &run.dump {
        dump_records(
            path,
            energies.iter().enumerate().map(|(t, &e)| EnergyRecord { trial: t, energy: e }),
        )?;
    }
    let est = TailEstimate::from_energies(&energies, &eps_grid, montecarlo::CI_CONFIDENCE)?;

    let hw: Vec<f64> = eps_grid
        .iter()
        .map(|&e| bounds::hw_tail_bound(e, v))
        .collect::<Result<_, _>>()?;
    // The same closed-form bound covers each tail separately. The law
    // itself is visibly skewed (the energy is bounded below by -1 and
    // unbounded above), so the two curves are reported side by side but
    // never compared to each other.
    let mut verdicts = vec![
        dominance_verdict("upper_tail_within_bound", &est.upper, v)?,
        dominance_verdict("lower_tail_within_bound", &est.lower, v)?,
    ];
    let mut overlays = json!({ "hw_tail_bound": hw, "v": v });

    if exact {
        let law = exact_energy_distribution(d, m, s, &x)?;
        let exact_upper: Vec<f64> = eps_grid.iter().map(|&e| law.prob_above(e)).collect();
        let exact_lower: Vec<f64> = eps_grid.iter().map(|&e| law.prob_below(-e)).collect();
        verdicts.push(coverage_verdict("upper_tail_matches_exact_law", &est.upper, &exact_upper));
        verdicts.push(coverage_verdict("lower_tail_matches_exact_law", &est.lower, &exact_lower));
        overlays["exact_upper"] = json!(exact_upper);
        overlays["exact_lower"] = json!(exact_lower);
        overlays["configurations"] = json!(law.total_configurations());
    }

    let config = json!({
        "d": d, "s": s, "m": m, "trials": trials,
        "master_seed": master_seed, "eps_grid": eps_grid, "exact": exact,
    });
    let mut report = new_report("tails", config, serde_json::to_value(&est).expect("estimate serializes"), verdicts);
    report.overlays = overlays;
    report.all_pass = all_pass(&report.verdicts);
    Ok((report, run))
}

#[derive(Serialize)]
struct DjlRecord {
    trial: usize,
    energy: f64,
    failure: bool,
}

fn run_djl(args: DjlArgs) -> Result<(ExperimentReport, RunArgs), LabError> {
    let DjlArgs { eps, delta, m, trials, fixed, run } = args;
    let master_seed = resolve_seed(run.seed);
    let params = compute_parameters(eps, delta)?;
    let source = if fixed {
        DirectionSource::Fixed(fixed_direction(m, master_seed))
    } else {
        DirectionSource::Random
    };

    let energies = sample_djl_energies(&params, m, &source, trials, master_seed)?;
    if let Some(path) = &run.dump {
        dump_records(
            path,
            energies.iter().enumerate().map(|(t, &e)| DjlRecord {
                trial: t,
                energy: e,
                failure: e.abs() > params.epsilon,
            }),
        )?;
    }
    let est = DjlEstimate::from_energies(&params, m, &energies)?;

    let verdicts = vec![Verdict::at_most(
        "failure_rate_within_delta",
        est.ci_upper,
        est.delta,
        format!("{} failures in {} trials, failure-rate upper confidence limit", est.failures, est.trials),
    )];
    let config = json!({
        "eps": eps, "delta": delta, "m": m, "trials": trials,
        "master_seed": master_seed,
        "direction": if fixed { "fixed" } else { "random" },
    });
    let mut report = new_report("djl", config, serde_json::to_value(&est).expect("estimate serializes"), verdicts);
    report.params = Some(ParamsEcho::from(&params));
    Ok((report, run))
}

#[derive(Serialize)]
struct OverlapRecord {
    trial: usize,
    overlap: u64,
}

fn run_moments(args: MomentsArgs) -> Result<(ExperimentReport, RunArgs), LabError> {
    let MomentsArgs { d, s, trials, run } = args;
    let master_seed = resolve_seed(run.seed);

    let overlaps = sample_overlaps(d, s, trials, master_seed)?;
    if let Some(path) = &run.dump {
        dump_records(
            path,
            overlaps.iter().enumerate().map(|(t, &k)| OverlapRecord { trial: t, overlap: k }),
        )?;
    }
    let est = QMomentEstimate::from_overlaps(d, s, &overlaps)?;

    let verdicts = vec![
        Verdict::at_most(
            "mean_overlap_matches_exact",
            (est.mean_q - est.exact_q).abs(),
            3.0 * est.se_q,
            format!("|{} - {}| against three standard errors", est.mean_q, est.exact_q),
        ),
        Verdict::at_most(
            "mean_overlap_sq_matches_exact",
            (est.mean_q_sq - est.exact_q_sq).abs(),
            3.0 * est.se_q_sq,
            format!("|{} - {}| against three standard errors", est.mean_q_sq, est.exact_q_sq),
        ),
        Verdict::at_most(
            "mean_overlap_sq_within_variance_bound",
            est.mean_q_sq - 3.0 * est.se_q_sq,
            est.q_sq_bound,
            "second-moment lower confidence value against the closed-form bound".to_string(),
        ),
    ];
    let config = json!({ "d": d, "s": s, "trials": trials, "master_seed": master_seed });
    let report = new_report("moments", config, serde_json::to_value(&est).expect("estimate serializes"), verdicts);
    Ok((report, run))
}

fn run_mgf(args: MgfArgs) -> Result<(ExperimentReport, RunArgs), LabError> {
    let MgfArgs { d, s, m, trials, grid, run } = args;
    let master_seed = resolve_seed(run.seed);
    let p = s as f64 / d as f64;
    let v = bounds::variance_proxy(p, s)?.v();
    let t_grid = match &grid {
        Some(g) => g.clone(),
        None => default_t_grid(v),
    };
    for &t in &t_grid {
        bounds::quadform_mgf_bound(t, v)?;
    }
    let x = fixed_direction(m, master_seed);

    let energies = sample_energies(d, m, s, &x, trials, master_seed)?;
    if let Some(path) = &run.dump {
        dump_records(
            path,
            energies.iter().enumerate().map(|(t, &e)| EnergyRecord { trial: t, energy: e }),
        )?;
    }
    let est = MgfEstimate::from_energies(d, s, &energies, &t_grid)?;

    let mut worst = f64::NEG_INFINITY;
    let mut at = f64::NAN;
    for i in 0..est.t_grid.len() {
        let margin = est.empirical[i] - 3.0 * est.se[i] - est.bound[i];
        if margin > worst {
            worst = margin;
            at = est.t_grid[i];
        }
    }
    let verdicts = vec![Verdict::at_most(
        "mgf_within_bound",
        worst,
        0.0,
        format!("worst mean minus three standard errors minus bound at t = {at}"),
    )];
    let config = json!({
        "d": d, "s": s, "m": m, "trials": trials,
        "master_seed": master_seed, "t_grid": t_grid,
    });
    let report = new_report("mgf", config, serde_json::to_value(&est).expect("estimate serializes"), verdicts);
    Ok((report, run))
}

#[derive(Serialize)]
struct BaselineRecord {
    trial: usize,
    sparse_energy: f64,
    dense_energy: f64,
}

fn run_baseline(args: BaselineArgs) -> Result<(ExperimentReport, RunArgs), LabError> {
    let BaselineArgs { d, s, m, trials, run } = args;
    let master_seed = resolve_seed(run.seed);
    let x = fixed_direction(m, master_seed);

    let sparse = sample_energies(d, m, s, &x, trials, master_seed)?;
    let dense = sample_dense_energies(d, m, &x, trials, master_seed)?;
    if let Some(path) = &run.dump {
        dump_records(
            path,
            sparse.iter().zip(&dense).enumerate().map(|(t, (&a, &b))| BaselineRecord {
                trial: t,
                sparse_energy: a,
                dense_energy: b,
            }),
        )?;
    }
    let est = BaselineComparison::from_energies(&sparse, &dense)?;

    let config = json!({ "d": d, "s": s, "m": m, "trials": trials, "master_seed": master_seed });
    let report = new_report("baseline", config, serde_json::to_value(&est).expect("estimate serializes"), Vec::new());
    Ok((report, run))
}
