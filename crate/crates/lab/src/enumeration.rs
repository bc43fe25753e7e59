//! Exact distortion-energy law for tiny instances.
//!
//! For small `(d, m, s)` the law of `E(x) = ‖Ax‖² - 1` can be computed
//! outright: walk every tuple of column supports (each one of the `C(d, s)`
//! subsets) and every sign pattern, evaluate the overlap quadratic form, and
//! tally the atoms. The result is an exact reference distribution that Monte
//! Carlo tail estimates must reproduce, with no statistical error on the
//! reference side.
//!
//! The configuration count `C(d, s)^m * 2^m` is guarded; anything above
//! [`MAX_CONFIGURATIONS`] is refused rather than left to run for hours.

use crate::LabError;
use sscjl_core::transform::UNIT_NORM_TOL;
use sscjl_core::{SamplerError, TransformError};

/// Hard ceiling on `C(d, s)^m * 2^m` for [`exact_energy_distribution`].
pub const MAX_CONFIGURATIONS: u64 = 1_000_000;

/// A finitely supported distribution, atoms sorted ascending.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    values: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl ExactDistribution {
    /// Number of distinct atoms.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Atom values, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Probability of atom `i`.
    pub fn probability(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    /// Configurations enumerated (sign patterns times support tuples).
    pub fn total_configurations(&self) -> u64 {
        self.total
    }

    /// Iterates `(value, probability)` pairs.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.counts)
            .map(|(&v, &c)| (v, c as f64 / self.total as f64))
    }

    /// Exact `P(X > t)`. The count is summed in integers and divided once.
    pub fn prob_above(&self, t: f64) -> f64 {
        let idx = self.values.partition_point(|&v| v <= t);
        let hits: u64 = self.counts[idx..].iter().sum();
        hits as f64 / self.total as f64
    }

    /// Exact `P(X < t)`.
    pub fn prob_below(&self, t: f64) -> f64 {
        let idx = self.values.partition_point(|&v| v < t);
        let hits: u64 = self.counts[..idx].iter().sum();
        hits as f64 / self.total as f64
    }

    /// Exact mean.
    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    /// Exact MGF `E exp(t X)`.
    pub fn mgf(&self, t: f64) -> f64 {
        self.atoms().map(|(v, p)| p * (t * v).exp()).sum()
    }
}

/// Exact law of the distortion energy for a unit vector `x` under the
/// `(d, m, s)` matrix distribution.
///
/// Cost is one quadratic-form evaluation per configuration; the guard keeps
/// the total below [`MAX_CONFIGURATIONS`]. Atoms are merged by exact
/// floating-point equality, which is sound because equal configurations
/// evaluate the identical expression.
pub fn exact_energy_distribution(
    d: usize,
    m: usize,
    s: usize,
    x: &[f64],
) -> Result<ExactDistribution, LabError> {
    if s < 1 || s > d {
        return Err(SamplerError::SparsityOutOfRange { s, d }.into());
    }
    if m == 0 {
        return Err(SamplerError::ZeroColumns.into());
    }
    if x.len() != m {
        return Err(TransformError::DimensionMismatch { expected: m, got: x.len() }.into());
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(TransformError::NonFinite { index }.into());
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(TransformError::NotUnitNorm { norm }.into());
    }

    let subset_count = binomial(d as u128, s as u128);
    let total = subset_count
        .and_then(|c| c.checked_pow(m as u32))
        .and_then(|c| c.checked_mul(1u128 << m.min(127)))
        .unwrap_or(u128::MAX);
    if total > MAX_CONFIGURATIONS as u128 {
        return Err(LabError::Capacity { configurations: total, limit: MAX_CONFIGURATIONS });
    }
    let total = total as u64;

    let subsets = all_subsets(d, s);

    // Odometer over support tuples; per tuple, the pairwise overlap weights
    // c[j][k] = 2 q x_j x_k are fixed and only the sign pattern varies.
    let mut energies: Vec<f64> = Vec::with_capacity(total as usize);
    let mut tuple = vec![0usize; m];
    let mut weights = vec![0.0f64; m * m];
    loop {
        for j in 0..m {
            for k in (j + 1)..m {
                let q = overlap(&subsets[tuple[j]], &subsets[tuple[k]]) as f64 / s as f64;
                weights[j * m + k] = 2.0 * q * x[j] * x[k];
            }
        }
        for mask in 0u64..(1 << m) {
            let mut e = 0.0;
            for j in 0..m {
                let sj = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                for k in (j + 1)..m {
                    let w = weights[j * m + k];
                    if w == 0.0 {
                        continue;
                    }
                    let sk = if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
                    e += w * sj * sk;
                }
            }
            energies.push(e);
        }
        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == m {
                // All tuples visited: tally and return.
                debug_assert_eq!(energies.len() as u64, total);
                return Ok(tally(energies, total));
            }
            tuple[pos] += 1;
            if tuple[pos] < subsets.len() {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

fn tally(mut energies: Vec<f64>, total: u64) -> ExactDistribution {
    energies.sort_unstable_by(f64::total_cmp);
    let mut values = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for e in energies {
        match values.last() {
            Some(&last) if last == e => *counts.last_mut().unwrap() += 1,
            _ => {
                values.push(e);
                counts.push(1);
            }
        }
    }
    ExactDistribution { values, counts, total }
}

/// `C(d, s)` with overflow reported as `None`.
fn binomial(d: u128, s: u128) -> Option<u128> {
    let s = s.min(d - s);
    let mut c = 1u128;
    for i in 0..s {
        // c * (d - i) / (i + 1) stays integral at every step.
        c = c.checked_mul(d - i)? / (i + 1);
    }
    Some(c)
}

/// All s-subsets of {0, .., d-1} in lexicographic order.
fn all_subsets(d: usize, s: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut c: Vec<u32> = (0..s as u32).collect();
    loop {
        out.push(c.clone());
        let mut i = s;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < (d - s + i) as u32 {
                c[i] += 1;
                for k in i + 1..s {
                    c[k] = c[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn overlap(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut l, mut n) = (0, 0, 0);
    while i < a.len() && l < b.len() {
        match a[i].cmp(&b[l]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => l += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                l += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_SQRT2: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(10, 0), Some(1));
        assert_eq!(binomial(10, 10), Some(1));
        assert_eq!(binomial(30, 15), Some(155117520));
        assert_eq!(binomial(52, 5), Some(2598960));
    }

    #[test]
    fn subset_enumeration_is_complete() {
        let subs = all_subsets(5, 3);
        assert_eq!(subs.len(), 10);
        assert!(subs.windows(2).all(|w| w[0] < w[1]));
        for sub in &subs {
            assert_eq!(sub.len(), 3);
            assert!(sub.windows(2).all(|w| w[0] < w[1]));
            assert!(sub.iter().all(|&v| v < 5));
        }
        assert_eq!(all_subsets(4, 4), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn reference_law_d4_s2() {
        // d = 4, m = 2, s = 2, x = (1, 1)/sqrt(2): 6^2 support tuples times
        // 4 sign patterns = 144 configurations. Overlap is 0, 1 or 2 out of
        // s = 2 with weights 1/6, 2/3, 1/6, and the energy is
        // q sigma_0 sigma_1 (2 x_0 x_1) = +-q, giving the five-atom law
        // P(0) = 1/6, P(+-1/2) = 1/3 each, P(+-1) = 1/12 each.
        let x = [INV_SQRT2, INV_SQRT2];
        let law = exact_energy_distribution(4, 2, 2, &x).unwrap();
        assert_eq!(law.total_configurations(), 144);
        assert_eq!(law.len(), 5);

        let probs: Vec<(f64, f64)> = law.atoms().collect();
        let expect = [
            (-1.0, 1.0 / 12.0),
            (-0.5, 1.0 / 3.0),
            (0.0, 1.0 / 6.0),
            (0.5, 1.0 / 3.0),
            (1.0, 1.0 / 12.0),
        ];
        for ((v, p), (ev, ep)) in probs.iter().zip(expect) {
            assert!((v - ev).abs() < 1e-12, "atom {v} vs {ev}");
            assert!((p - ep).abs() < 1e-12, "prob {p} vs {ep}");
        }

        assert!(law.mean().abs() < 1e-14);
        assert!((law.prob_above(0.25) - 5.0 / 12.0).abs() < 1e-15);
        assert!((law.prob_above(0.75) - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(law.prob_above(1.5), 0.0);
        assert!((law.prob_below(-0.25) - 5.0 / 12.0).abs() < 1e-15);
        assert_eq!(law.prob_below(-1.5), 0.0);
        assert_eq!(law.prob_above(-1.5), 1.0);
    }

    #[test]
    fn reference_mgf_d4_s2() {
        // Exact MGF of the law above: 1/6 + (2/3) cosh(t/2) + (1/6) cosh(t).
        let x = [INV_SQRT2, INV_SQRT2];
        let law = exact_energy_distribution(4, 2, 2, &x).unwrap();
        let cases = [
            (0.5, 1.0422130607874455816),
            (1.0, 1.1755974159401278199),
            (2.0, 1.8224197050574344289),
        ];
        for (t, want) in cases {
            assert!((law.mgf(t) - want).abs() < 1e-12, "t = {t}");
        }
        assert!((law.mgf(0.0) - 1.0).abs() < 1e-15);
        // Symmetric law: even MGF.
        assert!((law.mgf(0.7) - law.mgf(-0.7)).abs() < 1e-14);
    }

    #[test]
    fn single_column_law_is_degenerate() {
        let law = exact_energy_distribution(6, 1, 2, &[1.0]).unwrap();
        assert_eq!(law.len(), 1);
        assert_eq!(law.values(), &[0.0]);
        assert_eq!(law.total_configurations(), 30);
        assert_eq!(law.prob_above(0.0), 0.0);
        assert!((law.probability(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_guard() {
        let x = [INV_SQRT2, INV_SQRT2];
        match exact_energy_distribution(30, 2, 15, &x) {
            Err(LabError::Capacity { configurations, limit }) => {
                assert_eq!(limit, MAX_CONFIGURATIONS);
                assert_eq!(configurations, 155117520u128 * 155117520 * 4);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn input_gates() {
        assert!(matches!(
            exact_energy_distribution(4, 2, 5, &[1.0, 0.0]),
            Err(LabError::Sampler(SamplerError::SparsityOutOfRange { .. }))
        ));
        assert!(matches!(
            exact_energy_distribution(4, 2, 2, &[1.0]),
            Err(LabError::Transform(TransformError::DimensionMismatch { .. }))
        ));
        assert!(matches!(
            exact_energy_distribution(4, 2, 2, &[0.9, 0.1]),
            Err(LabError::Transform(TransformError::NotUnitNorm { .. }))
        ));
        assert!(matches!(
            exact_energy_distribution(4, 2, 2, &[f64::NAN, 1.0]),
            Err(LabError::Transform(TransformError::NonFinite { index: 0 }))
        ));
    }

    #[test]
    fn matches_sampled_energies() {
        // Every sampled energy must be an atom of the exact law.
        use sscjl_core::{sample_matrix, SeedSpec};
        let x = [0.6, 0.8];
        let law = exact_energy_distribution(5, 2, 2, &x).unwrap();
        for t in 0..200 {
            let a = sample_matrix(5, 2, 2, SeedSpec::with_stream(33, t)).unwrap();
            let e = a.distortion_energy(&x).unwrap();
            assert!(
                law.values().iter().any(|&v| (v - e).abs() < 1e-12),
                "energy {e} is not an atom"
            );
        }
    }
}
