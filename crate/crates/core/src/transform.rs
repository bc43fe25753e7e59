//! Applying the matrix and evaluating the distortion quadratic form.
//!
//! For a unit vector x the quantity under study is the distortion energy
//! `E(x) = ‖Ax‖² - 1`. Expanding `‖Ax‖²` and using that each column has
//! exactly `s` nonzeros of magnitude `1/sqrt(s)` collapses the diagonal to
//! `‖x‖² = 1`, leaving the pure cross term
//!
//! ```text
//! E(x) = sum_{j != k} Q[j][k] sigma[j] sigma[k] x[j] x[k]
//! Q[j][k] = |support(j) ∩ support(k)| / s
//! ```
//!
//! [`SscMatrix::distortion_energy`] evaluates the left-hand side through the
//! embedding, [`SscMatrix::quadratic_form_direct`] the right-hand side from
//! the overlaps; the two routes agree to floating-point accuracy and checking
//! that is one of the lab's standing verification criteria.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;


use crate::sampler::SscMatrix;

/// How far ‖x‖₂ may stray from 1 before distortion-energy inputs are
/// rejected. Callers with unnormalized data are expected to rescale first.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Errors from the transform and batch operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformError {
    /// Vector length does not match the matrix's column count.
    DimensionMismatch { expected: usize, got: usize },
    /// A coordinate (or batch vector, for batch construction) is NaN or
    /// infinite.
    NonFinite { index: usize },
    /// The input must be a unit vector; its actual norm is reported.
    NotUnitNorm { norm: f64 },
    /// Column index out of range.
    ColumnOutOfRange { column: usize, m: usize },
    /// A batch needs at least one vector of at least one coordinate.
    EmptyBatch,
    /// Label and vector counts differ.
    LabelCountMismatch { got: usize, expected: usize },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TransformError::DimensionMismatch { expected, got } => {
                write!(f, "vector has {got} coordinates, matrix expects {expected}")
            }
            TransformError::NonFinite { index } => {
                write!(f, "non-finite value at index {index}")
            }
            TransformError::NotUnitNorm { norm } => {
                write!(f, "input must be a unit vector, got norm {norm}")
            }
            TransformError::ColumnOutOfRange { column, m } => {
                write!(f, "column {column} out of range for m = {m}")
            }
            TransformError::EmptyBatch => write!(f, "vector batch is empty"),
            TransformError::LabelCountMismatch { got, expected } => {
                write!(f, "{got} labels for {expected} vectors")
            }
        }
    }
}

impl core::error::Error for TransformError {}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl SscMatrix {
    /// Computes `Ax`, allocating the d-dimensional image.
    ///
    /// Column supports are walked directly, so the cost is `O(m s)` and the
    /// matrix entries are never materialized. Errors on a length mismatch or
    /// a non-finite coordinate.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, TransformError> {
        if x.len() != self.m() {
            return Err(TransformError::DimensionMismatch { expected: self.m(), got: x.len() });
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(TransformError::NonFinite { index });
        }
        let mut y = vec![0.0f64; self.d()];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let w = self.sign(j) as f64 * xj;
            for &i in self.support(j) {
                y[i as usize] += w;
            }
        }
        let scale = self.scale();
        for v in &mut y {
            *v *= scale;
        }
        Ok(y)
    }

    /// Distortion energy `‖Ax‖² - 1` of a unit vector.
    ///
    /// `x` must satisfy `|‖x‖ - 1| <= UNIT_NORM_TOL`; the quantity is only
    /// meaningful on the sphere and silently accepting other inputs would
    /// bake the norm error into every tail estimate downstream.
    pub fn distortion_energy(&self, x: &[f64]) -> Result<f64, TransformError> {
        let y = self.apply(x)?;
        check_unit(x)?;
        Ok(y.iter().map(|v| v * v).sum::<f64>() - 1.0)
    }

    /// Number of rows shared by the supports of columns `j` and `k`.
    pub fn support_overlap(&self, j: usize, k: usize) -> Result<usize, TransformError> {
        for column in [j, k] {
            if column >= self.m() {
                return Err(TransformError::ColumnOutOfRange { column, m: self.m() });
            }
        }
        let (a, b) = (self.support(j), self.support(k));
        let mut overlap = 0;
        let (mut i, mut l) = (0, 0);
        while i < a.len() && l < b.len() {
            match a[i].cmp(&b[l]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => l += 1,
                core::cmp::Ordering::Equal => {
                    overlap += 1;
                    i += 1;
                    l += 1;
                }
            }
        }
        Ok(overlap)
    }

    /// Normalized support overlap `Q[j][k] = |support(j) ∩ support(k)| / s`,
    /// the Gram coefficient of the unsigned columns.
    pub fn gram_overlap(&self, j: usize, k: usize) -> Result<f64, TransformError> {
        Ok(self.support_overlap(j, k)? as f64 / self.s() as f64)
    }

    /// Evaluates the distortion energy through the overlap expansion
    /// `sum_{j != k} Q[j][k] sigma[j] sigma[k] x[j] x[k]` instead of through
    /// the embedding.
    ///
    /// The symmetric sum is folded to twice the upper triangle, costing
    /// `O(m² s)`. Same preconditions as [`SscMatrix::distortion_energy`];
    /// the two agree up to floating-point error, which is exactly what makes
    /// this the reference oracle for the fast path.
    pub fn quadratic_form_direct(&self, x: &[f64]) -> Result<f64, TransformError> {
        if x.len() != self.m() {
            return Err(TransformError::DimensionMismatch { expected: self.m(), got: x.len() });
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(TransformError::NonFinite { index });
        }
        check_unit(x)?;
        let mut acc = 0.0;
        for j in 0..self.m() {
            if x[j] == 0.0 {
                continue;
            }
            for k in (j + 1)..self.m() {
                let overlap = self.support_overlap(j, k)?;
                if overlap == 0 {
                    continue;
                }
                let q = overlap as f64 / self.s() as f64;
                acc += 2.0 * q * (self.sign(j) * self.sign(k)) as f64 * x[j] * x[k];
            }
        }
        Ok(acc)
    }

    /// Distortion survey over all distinct pairs in a batch.
    ///
    /// For each pair the ratio `‖A(u - w)‖ / ‖u - w‖` is recorded; identical
    /// pairs (zero difference) are counted as skipped rather than treated as
    /// distortion 0/0. `bins = 0` suppresses the histogram.
    pub fn pairwise_distortion(
        &self,
        batch: &VectorBatch,
        bins: usize,
    ) -> Result<PairwiseDistortion, TransformError> {
        if batch.m() != self.m() {
            return Err(TransformError::DimensionMismatch { expected: self.m(), got: batch.m() });
        }
        let n = batch.len();
        let mut ratios = Vec::new();
        let mut skipped = 0u64;
        let mut diff = vec![0.0f64; self.m()];
        for i in 0..n {
            for k in (i + 1)..n {
                let (u, w) = (batch.vector(i), batch.vector(k));
                for (t, (a, b)) in u.iter().zip(w).enumerate() {
                    diff[t] = a - b;
                }
                let dn = norm2(&diff);
                if dn == 0.0 {
                    skipped += 1;
                    continue;
                }
                let y = self.apply(&diff)?;
                ratios.push(norm2(&y) / dn);
            }
        }
        Ok(PairwiseDistortion::from_ratios(&ratios, skipped, bins))
    }
}

fn check_unit(x: &[f64]) -> Result<(), TransformError> {
    let norm = norm2(x);
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(TransformError::NotUnitNorm { norm });
    }
    Ok(())
}

/// A set of equal-dimension vectors, optionally labeled.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorBatch {
    m: usize,
    vectors: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl VectorBatch {
    /// Wraps vectors after checking they are nonempty, equal-dimension and
    /// finite. The error index points at the offending vector.
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self, TransformError> {
        let m = match vectors.first() {
            Some(first) if !first.is_empty() => first.len(),
            _ => return Err(TransformError::EmptyBatch),
        };
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != m {
                return Err(TransformError::DimensionMismatch { expected: m, got: v.len() });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(TransformError::NonFinite { index });
            }
        }
        Ok(VectorBatch { m, vectors, labels: None })
    }

    /// As [`VectorBatch::new`], attaching one label per vector.
    pub fn with_labels(vectors: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self, TransformError> {
        if labels.len() != vectors.len() {
            return Err(TransformError::LabelCountMismatch {
                got: labels.len(),
                expected: vectors.len(),
            });
        }
        let mut batch = Self::new(vectors)?;
        batch.labels = Some(labels);
        Ok(batch)
    }

    /// Dimension shared by all vectors.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of vectors.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Batches are never empty; this exists for clippy's sake.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vector `i`. Panics if out of range.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    /// Label of vector `i`, when labels were attached.
    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }

    /// Whether labels were attached.
    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    /// Iterates over the vectors in order.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.iter().map(|v| v.as_slice())
    }
}

/// Fixed-width histogram over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

/// Summary returned by [`SscMatrix::pairwise_distortion`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairwiseDistortion {
    /// Distinct pairs with nonzero difference.
    pub pairs_evaluated: u64,
    /// Distinct pairs skipped because both vectors were identical.
    pub pairs_skipped: u64,
    /// Smallest ratio seen, absent when nothing was evaluated.
    pub min_ratio: Option<f64>,
    /// Largest ratio seen.
    pub max_ratio: Option<f64>,
    /// Ratio histogram, absent when `bins = 0` or nothing was evaluated.
    pub histogram: Option<Histogram>,
}

impl PairwiseDistortion {
    fn from_ratios(ratios: &[f64], skipped: u64, bins: usize) -> Self {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &r in ratios {
            min = min.min(r);
            max = max.max(r);
        }
        let (min_ratio, max_ratio) = if ratios.is_empty() { (None, None) } else { (Some(min), Some(max)) };
        let histogram = if ratios.is_empty() || bins == 0 {
            None
        } else {
            let width = (max - min) / bins as f64;
            let mut counts = vec![0u64; bins];
            for &r in ratios {
                let idx = if width > 0.0 {
                    (((r - min) / width) as usize).min(bins - 1)
                } else {
                    0
                };
                counts[idx] += 1;
            }
            Some(Histogram { lo: min, hi: max, counts })
        };
        PairwiseDistortion {
            pairs_evaluated: ratios.len() as u64,
            pairs_skipped: skipped,
            min_ratio,
            max_ratio,
            histogram,
        }
    }
}
