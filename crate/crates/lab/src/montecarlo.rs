//! Seeded Monte Carlo experiments over the matrix law.
//!
//! Determinism contract: every estimate here is a pure function of its
//! arguments, including across thread counts. Trial `t` draws from the RNG
//! streams of `SeedSpec::with_stream(master_seed, t)` and nothing else; raw
//! draws are collected in trial order; statistics reduce sequentially over
//! that order; exceedance counting is integer arithmetic. Parallelism only
//! changes who computes a trial, never what it contains or how results fold.

use rayon::prelude::*;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use sscjl_core::sampler::domain;
use sscjl_core::{
    bounds, sample_matrix, JlParams, SeedSpec, TransformError,
};

use crate::stats;
use crate::LabError;

/// Confidence level of every interval the lab reports.
pub const CI_CONFIDENCE: f64 = 0.99;

/// Points in [`default_eps_grid`].
pub const DEFAULT_GRID_POINTS: usize = 16;

/// Trial streams run 0..trials; this stream id is reserved for experiment
/// level draws such as the fixed direction vector.
pub const SETUP_STREAM: u64 = u64::MAX;

/// Quantile probabilities reported by [`compare_baseline`].
pub const BASELINE_QUANTILES: [f64; 4] = [0.5, 0.9, 0.99, 1.0];

fn check_trials(trials: u64) -> Result<(), LabError> {
    if trials < 1 {
        return Err(LabError::InvalidArgument("trials must be at least 1".into()));
    }
    // Keep one stream id free for SETUP_STREAM and the trial count within
    // what a Vec can index.
    if trials >= SETUP_STREAM || trials > (usize::MAX as u64) {
        return Err(LabError::InvalidArgument(format!("trials = {trials} is out of range")));
    }
    Ok(())
}

/// Uniform draw from the unit sphere in R^m: normalized i.i.d. Gaussians,
/// redrawn in the (practically impossible) case of a degenerate norm.
pub fn random_unit_vector<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    assert!(m >= 1, "direction needs at least one coordinate");
    loop {
        let x: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return x.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// The fixed direction an experiment evaluates when the caller does not
/// supply one: drawn once from the setup stream of the master seed.
pub fn fixed_direction(m: usize, master_seed: u64) -> Vec<f64> {
    let mut rng = SeedSpec::with_stream(master_seed, SETUP_STREAM).rng(domain::UNIT_VECTOR, 0);
    random_unit_vector(m, &mut rng)
}

/// Per-trial distortion energies of a fixed unit vector `x` under freshly
/// sampled `(d, m, s)` matrices, in trial order.
pub fn sample_energies(
    d: usize,
    m: usize,
    s: usize,
    x: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<f64>, LabError> {
    check_trials(trials)?;
    // Indexed collect keeps trial order; errors are funneled sequentially.
    let draws: Vec<Result<f64, LabError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = sample_matrix(d, m, s, SeedSpec::with_stream(master_seed, t))?;
            Ok(a.distortion_energy(x)?)
        })
        .collect();
    draws.into_iter().collect()
}

/// Per-trial support overlaps of two independent columns of a `(d, s)`
/// matrix, in trial order. This is the raw material for the Q-moment check;
/// overlaps stay integers so the reduction is exact.
pub fn sample_overlaps(
    d: usize,
    s: usize,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<u64>, LabError> {
    check_trials(trials)?;
    let draws: Vec<Result<u64, LabError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = sample_matrix(d, 2, s, SeedSpec::with_stream(master_seed, t))?;
            // Q = gram_overlap(0, 1); keep the integer numerator.
            let overlap = a.support_overlap(0, 1)?;
            Ok(overlap as u64)
        })
        .collect();
    draws.into_iter().collect()
}

/// Exact first two moments of the normalized overlap `Q` of two independent
/// uniform s-subsets of d rows: the overlap count is hypergeometric, so
/// `E Q = p` and `E Q² = p² + p(1-p)(d-s) / (s(d-1))` with `p = s/d`; `s = d`
/// degenerates to `Q ≡ 1`.
pub fn exact_overlap_moments(d: usize, s: usize) -> (f64, f64) {
    assert!(s >= 1 && s <= d, "need 1 <= s <= d");
    if s == d {
        return (1.0, 1.0);
    }
    let (df, sf) = (d as f64, s as f64);
    let p = sf / df;
    let second = p * p + p * (1.0 - p) * (df - sf) / (sf * (df - 1.0));
    (p, second)
}

/// Monte Carlo estimate of the overlap moments against their exact values.
#[derive(Debug, Clone, Serialize)]
pub struct QMomentEstimate {
    pub d: usize,
    pub s: usize,
    pub trials: u64,
    /// Sample mean and standard error of Q.
    pub mean_q: f64,
    pub se_q: f64,
    /// Sample mean and standard error of Q².
    pub mean_q_sq: f64,
    pub se_q_sq: f64,
    /// Exact hypergeometric moments.
    pub exact_q: f64,
    pub exact_q_sq: f64,
    /// The closed-form upper bound `q² = p² + p(1-p)/s` the tail analysis
    /// uses in place of the exact second moment.
    pub q_sq_bound: f64,
}

impl QMomentEstimate {
    /// Summarizes raw overlap counts. Sums are taken over integers, so the
    /// result does not depend on how trials were scheduled.
    pub fn from_overlaps(d: usize, s: usize, overlaps: &[u64]) -> Result<Self, LabError> {
        if overlaps.is_empty() {
            return Err(LabError::InvalidArgument("no overlap draws".into()));
        }
        let n = overlaps.len() as f64;
        let mut m1 = 0u128;
        let mut m2 = 0u128;
        let mut m4 = 0u128;
        for &k in overlaps {
            let k = k as u128;
            let k2 = k * k;
            m1 += k;
            m2 += k2;
            m4 = m4.checked_add(k2 * k2).expect("overlap moment accumulator overflow");
        }
        let sf = s as f64;
        let (m1, m2, m4) = (m1 as f64, m2 as f64, m4 as f64);

        let mean_k = m1 / n;
        let var_k = ((m2 - m1 * m1 / n) / (n - 1.0).max(1.0)).max(0.0);
        let mean_k2 = m2 / n;
        let var_k2 = ((m4 - m2 * m2 / n) / (n - 1.0).max(1.0)).max(0.0);

        let (exact_q, exact_q_sq) = exact_overlap_moments(d, s);
        let p = s as f64 / d as f64;
        Ok(QMomentEstimate {
            d,
            s,
            trials: overlaps.len() as u64,
            mean_q: mean_k / sf,
            se_q: (var_k / n).sqrt() / sf,
            mean_q_sq: mean_k2 / (sf * sf),
            se_q_sq: (var_k2 / n).sqrt() / (sf * sf),
            exact_q,
            exact_q_sq,
            q_sq_bound: p * p + p * (1.0 - p) / sf,
        })
    }
}

/// Draws `trials` column pairs and summarizes their overlap moments.
pub fn estimate_moment_q(
    d: usize,
    s: usize,
    trials: u64,
    master_seed: u64,
) -> Result<QMomentEstimate, LabError> {
    QMomentEstimate::from_overlaps(d, s, &sample_overlaps(d, s, trials, master_seed)?)
}

/// One empirical exceedance curve with exact binomial confidence bands.
#[derive(Debug, Clone, Serialize)]
pub struct TailCurve {
    pub eps_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub trials: u64,
    pub rates: Vec<f64>,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
}

impl TailCurve {
    pub(crate) fn from_counts(eps_grid: Vec<f64>, counts: Vec<u64>, trials: u64, confidence: f64) -> Self {
        let mut rates = Vec::with_capacity(counts.len());
        let mut ci_lower = Vec::with_capacity(counts.len());
        let mut ci_upper = Vec::with_capacity(counts.len());
        for &k in &counts {
            let (lo, hi) = stats::clopper_pearson(k, trials, confidence);
            rates.push(k as f64 / trials as f64);
            ci_lower.push(lo);
            ci_upper.push(hi);
        }
        TailCurve { eps_grid, counts, trials, rates, ci_lower, ci_upper }
    }
}

/// Upper and lower exceedance curves of the distortion energy.
#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    /// `P(E > eps)` per grid point.
    pub upper: TailCurve,
    /// `P(E < -eps)` per grid point.
    pub lower: TailCurve,
    pub confidence: f64,
}

impl TailEstimate {
    /// Counts exceedances of raw energies over a positive ascending grid.
    pub fn from_energies(
        energies: &[f64],
        eps_grid: &[f64],
        confidence: f64,
    ) -> Result<Self, LabError> {
        check_eps_grid(eps_grid)?;
        if energies.is_empty() {
            return Err(LabError::InvalidArgument("no energy draws".into()));
        }
        let g = eps_grid.len();
        let mut up = vec![0u64; g];
        let mut down = vec![0u64; g];
        for &e in energies {
            for (i, &eps) in eps_grid.iter().enumerate() {
                if e > eps {
                    up[i] += 1;
                }
                if e < -eps {
                    down[i] += 1;
                }
            }
        }
        let trials = energies.len() as u64;
        Ok(TailEstimate {
            upper: TailCurve::from_counts(eps_grid.to_vec(), up, trials, confidence),
            lower: TailCurve::from_counts(eps_grid.to_vec(), down, trials, confidence),
            confidence,
        })
    }
}

fn check_eps_grid(eps_grid: &[f64]) -> Result<(), LabError> {
    if eps_grid.is_empty() {
        return Err(LabError::InvalidArgument("eps grid is empty".into()));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(LabError::InvalidArgument("eps grid must be positive and finite".into()));
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::InvalidArgument("eps grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Both exceedance tails of `E(x)` for a fixed unit direction.
pub fn estimate_tail(
    d: usize,
    m: usize,
    s: usize,
    x: &[f64],
    eps_grid: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<TailEstimate, LabError> {
    check_eps_grid(eps_grid)?;
    let energies = sample_energies(d, m, s, x, trials, master_seed)?;
    TailEstimate::from_energies(&energies, eps_grid, CI_CONFIDENCE)
}

/// Default evaluation grid: [`DEFAULT_GRID_POINTS`] log-spaced points from
/// `v/4` to `16 v`, covering both sides of the gaussian-to-exponential
/// crossover at `8 v`.
pub fn default_eps_grid(v: f64) -> Vec<f64> {
    let lo = v / 4.0;
    let ratio: f64 = 64.0;
    (0..DEFAULT_GRID_POINTS)
        .map(|i| lo * ratio.powf(i as f64 / (DEFAULT_GRID_POINTS - 1) as f64))
        .collect()
}

/// Where a distributional-JL experiment gets its per-trial direction.
#[derive(Debug, Clone)]
pub enum DirectionSource {
    /// A fresh uniform unit vector per trial.
    Random,
    /// One caller-supplied unit vector used in every trial.
    Fixed(Vec<f64>),
}

/// Outcome of a distributional-JL check at one `(eps, delta)` target.
#[derive(Debug, Clone, Serialize)]
pub struct DjlEstimate {
    pub epsilon: f64,
    pub delta: f64,
    pub d: usize,
    pub s: usize,
    pub m: usize,
    pub trials: u64,
    pub failures: u64,
    pub failure_rate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub confidence: f64,
    /// Whether the parameters sit in the regime the guarantee covers.
    pub feasible: bool,
    /// `ci_upper <= delta`: the target failure probability is met with
    /// statistical headroom.
    pub meets_target: bool,
}

/// Per-trial energies for a distributional-JL run: trial `t` samples its
/// matrix from stream `t` and, for [`DirectionSource::Random`], its direction
/// from the same stream's unit-vector domain.
pub fn sample_djl_energies(
    params: &JlParams,
    m: usize,
    source: &DirectionSource,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<f64>, LabError> {
    check_trials(trials)?;
    if let DirectionSource::Fixed(x) = source {
        if x.len() != m {
            return Err(TransformError::DimensionMismatch { expected: m, got: x.len() }.into());
        }
    }
    let (d, s) = (params.d, params.s);
    let draws: Vec<Result<f64, LabError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let spec = SeedSpec::with_stream(master_seed, t);
            let a = sample_matrix(d, m, s, spec)?;
            let energy = match source {
                DirectionSource::Fixed(x) => a.distortion_energy(x)?,
                DirectionSource::Random => {
                    let mut rng = spec.rng(domain::UNIT_VECTOR, 0);
                    a.distortion_energy(&random_unit_vector(m, &mut rng))?
                }
            };
            Ok(energy)
        })
        .collect();
    draws.into_iter().collect()
}

impl DjlEstimate {
    /// Tallies `|E| > eps` failures out of raw energies.
    pub fn from_energies(params: &JlParams, m: usize, energies: &[f64]) -> Result<Self, LabError> {
        if energies.is_empty() {
            return Err(LabError::InvalidArgument("no energy draws".into()));
        }
        let trials = energies.len() as u64;
        let failures = energies.iter().filter(|e| e.abs() > params.epsilon).count() as u64;
        let (ci_lower, ci_upper) = stats::clopper_pearson(failures, trials, CI_CONFIDENCE);
        Ok(DjlEstimate {
            epsilon: params.epsilon,
            delta: params.delta,
            d: params.d,
            s: params.s,
            m,
            trials,
            failures,
            failure_rate: failures as f64 / trials as f64,
            ci_lower,
            ci_upper,
            confidence: CI_CONFIDENCE,
            feasible: params.feasible(),
            meets_target: ci_upper <= params.delta,
        })
    }
}

/// Distributional-JL check: does `P(|E(x)| > eps) <= delta` hold empirically
/// for the explicit `(d, s)` derived from `(eps, delta)`?
pub fn verify_djl(
    params: &JlParams,
    m: usize,
    source: &DirectionSource,
    trials: u64,
    master_seed: u64,
) -> Result<DjlEstimate, LabError> {
    let energies = sample_djl_energies(params, m, source, trials, master_seed)?;
    DjlEstimate::from_energies(params, m, &energies)
}

/// Empirical MGF of the distortion energy against its closed-form bound.
#[derive(Debug, Clone, Serialize)]
pub struct MgfEstimate {
    pub t_grid: Vec<f64>,
    /// Sample mean of `exp(t E)` per grid point.
    pub empirical: Vec<f64>,
    /// Standard error of each mean.
    pub se: Vec<f64>,
    /// Closed-form bound `exp(16 t² v² / (1 - 16 t² v²))` per grid point.
    pub bound: Vec<f64>,
    pub trials: u64,
    /// Variance factor the bound was evaluated at.
    pub v: f64,
}

impl MgfEstimate {
    /// Evaluates empirical MGF and bound on a grid. Every `t` must satisfy
    /// `4 |t| v < 1`, the domain of the bound.
    pub fn from_energies(
        d: usize,
        s: usize,
        energies: &[f64],
        t_grid: &[f64],
    ) -> Result<Self, LabError> {
        if energies.is_empty() {
            return Err(LabError::InvalidArgument("no energy draws".into()));
        }
        if t_grid.is_empty() {
            return Err(LabError::InvalidArgument("t grid is empty".into()));
        }
        let p = s as f64 / d as f64;
        let v = bounds::variance_proxy(p, s)?.v();
        let mut empirical = Vec::with_capacity(t_grid.len());
        let mut se = Vec::with_capacity(t_grid.len());
        let mut bound = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            bound.push(bounds::quadform_mgf_bound(t, v)?);
            let vals: Vec<f64> = energies.iter().map(|&e| (t * e).exp()).collect();
            let (mean, err) = stats::mean_se(&vals);
            empirical.push(mean);
            se.push(err);
        }
        Ok(MgfEstimate {
            t_grid: t_grid.to_vec(),
            empirical,
            se,
            bound,
            trials: energies.len() as u64,
            v,
        })
    }
}

/// Estimates the distortion-energy MGF on a t-grid and evaluates the
/// closed-form bound next to it.
pub fn estimate_mgf(
    d: usize,
    m: usize,
    s: usize,
    x: &[f64],
    t_grid: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<MgfEstimate, LabError> {
    // Validate the grid before paying for sampling.
    let p = s as f64 / d as f64;
    let v = bounds::variance_proxy(p, s)?.v();
    for &t in t_grid {
        bounds::quadform_mgf_bound(t, v)?;
    }
    let energies = sample_energies(d, m, s, x, trials, master_seed)?;
    MgfEstimate::from_energies(d, s, &energies, t_grid)
}

/// Default MGF evaluation grid: 8 symmetric points at odd eighths of the
/// domain edge `1/(4v)`.
pub fn default_t_grid(v: f64) -> Vec<f64> {
    let edge = 1.0 / (4.0 * v);
    [-0.875, -0.625, -0.375, -0.125, 0.125, 0.375, 0.625, 0.875]
        .iter()
        .map(|f| f * edge)
        .collect()
}

/// Side-by-side quantiles of |E| under the sparse sign-consistent law and
/// the dense i.i.d.-sign law.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineComparison {
    pub trials: u64,
    pub quantile_probs: Vec<f64>,
    pub sparse_abs_quantiles: Vec<f64>,
    pub dense_abs_quantiles: Vec<f64>,
}

/// Per-trial energies `‖Bx‖² - 1` for the dense baseline `B` with i.i.d.
/// Rademacher entries scaled by `1/sqrt(d)`, in trial order.
pub fn sample_dense_energies(
    d: usize,
    m: usize,
    x: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<f64>, LabError> {
    check_trials(trials)?;
    if d == 0 {
        return Err(LabError::InvalidArgument("d must be at least 1".into()));
    }
    if x.len() != m {
        return Err(TransformError::DimensionMismatch { expected: m, got: x.len() }.into());
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(TransformError::NonFinite { index }.into());
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > sscjl_core::transform::UNIT_NORM_TOL {
        return Err(TransformError::NotUnitNorm { norm }.into());
    }
    let draws: Vec<Result<f64, LabError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeedSpec::with_stream(master_seed, t).rng(domain::DENSE, 0);
            let mut y = vec![0.0f64; d];
            // Column-major generation order is part of the stream contract.
            for &xj in x {
                for yi in y.iter_mut() {
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *yi += sign * xj;
                }
            }
            let inv = 1.0 / (d as f64).sqrt();
            Ok(y.iter().map(|v| (v * inv) * (v * inv)).sum::<f64>() - 1.0)
        })
        .collect();
    draws.into_iter().collect()
}

/// Nearest-rank quantiles of |values|; `probs` must lie in (0, 1].
pub fn abs_quantiles(values: &[f64], probs: &[f64]) -> Vec<f64> {
    assert!(!values.is_empty());
    let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    probs
        .iter()
        .map(|&p| {
            assert!(p > 0.0 && p <= 1.0);
            let rank = (p * n as f64).ceil() as usize;
            sorted[rank.clamp(1, n) - 1]
        })
        .collect()
}

impl BaselineComparison {
    /// Summarizes two raw energy samples at [`BASELINE_QUANTILES`].
    pub fn from_energies(sparse: &[f64], dense: &[f64]) -> Result<Self, LabError> {
        if sparse.is_empty() || dense.is_empty() || sparse.len() != dense.len() {
            return Err(LabError::InvalidArgument(
                "baseline comparison needs equal nonempty samples".into(),
            ));
        }
        let probs = BASELINE_QUANTILES.to_vec();
        Ok(BaselineComparison {
            trials: sparse.len() as u64,
            sparse_abs_quantiles: abs_quantiles(sparse, &probs),
            dense_abs_quantiles: abs_quantiles(dense, &probs),
            quantile_probs: probs,
        })
    }
}

/// Distortion quantiles of the sparse construction next to the dense
/// i.i.d.-sign baseline, same direction, paired seeds.
pub fn compare_baseline(
    d: usize,
    s: usize,
    m: usize,
    x: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<BaselineComparison, LabError> {
    let sparse = sample_energies(d, m, s, x, trials, master_seed)?;
    let dense = sample_dense_energies(d, m, x, trials, master_seed)?;
    BaselineComparison::from_energies(&sparse, &dense)
}
