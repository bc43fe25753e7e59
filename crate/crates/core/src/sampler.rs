//! Seeded sampling of the sparse sign-consistent matrix.
//!
//! A matrix is stored as its support structure rather than as dense entries:
//! per column, the sorted list of `s` row indices carrying nonzeros, plus the
//! single Rademacher sign shared by the whole column. The entry magnitude
//! `1/sqrt(s)` is applied at multiplication time and never materialized.
//!
//! Sampling is deterministic given a [`SeedSpec`]. Every independent random
//! stream gets its own ChaCha8 generator keyed by the tuple
//! `(master_seed, stream_id, domain, lane)`, so column 7 of a matrix draws
//! the same bits no matter how many columns surround it or which thread
//! touches it.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;


use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream domains, the third component of the RNG key. Keeping matrix
/// sampling, direction sampling and dense-baseline sampling in disjoint
/// domains means experiments can share one master seed without correlation.
pub mod domain {
    /// Support and sign draws for one matrix column; lane = column index.
    pub const COLUMN: u64 = 0;
    /// Random unit-vector draws; lane = vector index.
    pub const UNIT_VECTOR: u64 = 1;
    /// Dense i.i.d.-sign baseline matrices; lane = 0.
    pub const DENSE: u64 = 2;
}

/// Addresses one reproducible stream family.
///
/// `master_seed` identifies the whole experiment; `stream_id` separates
/// repetitions inside it (Monte Carlo trial indices, typically). Two specs
/// differing in any component produce unrelated streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    /// Stream 0 of a master seed.
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed, stream_id: 0 }
    }

    /// A specific stream of a master seed.
    pub fn with_stream(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    /// Generator for one `(domain, lane)` slot of this stream.
    ///
    /// The 256-bit ChaCha8 key is the little-endian concatenation
    /// `master_seed ‖ stream_id ‖ domain ‖ lane`. The encoding is injective,
    /// so distinct slots can never collide, and it is independent of platform
    /// endianness and pointer width.
    pub fn rng(&self, domain: u64, lane: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_id.to_le_bytes());
        key[16..24].copy_from_slice(&domain.to_le_bytes());
        key[24..].copy_from_slice(&lane.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Sampling and structure errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerError {
    /// `s` must satisfy `1 <= s <= d`.
    SparsityOutOfRange { s: usize, d: usize },
    /// The matrix needs at least one column.
    ZeroColumns,
    /// Row indices are stored as u32; `d` may not exceed 2^32.
    RowIndexOverflow { d: usize },
    /// A raw array handed to [`SscMatrix::from_parts`] has the wrong length.
    WrongLength {
        /// Which array: "supports" or "signs".
        what: &'static str,
        got: usize,
        expected: usize,
    },
    /// A hand-assembled matrix violated the support/sign representation.
    InvalidStructure {
        /// Column at fault.
        column: usize,
        /// What was wrong with it.
        reason: &'static str,
    },
}

impl fmt::Display for SamplerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SamplerError::SparsityOutOfRange { s, d } => {
                write!(f, "sparsity s = {s} must satisfy 1 <= s <= d = {d}")
            }
            SamplerError::ZeroColumns => write!(f, "matrix needs at least one column"),
            SamplerError::RowIndexOverflow { d } => {
                write!(f, "d = {d} exceeds the 2^32 row indexing limit")
            }
            SamplerError::WrongLength { what, got, expected } => {
                write!(f, "{what} array has length {got}, expected {expected}")
            }
            SamplerError::InvalidStructure { column, reason } => {
                write!(f, "column {column}: {reason}")
            }
        }
    }
}

impl core::error::Error for SamplerError {}

/// A sampled sparse sign-consistent matrix in support representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SscMatrix {
    d: usize,
    m: usize,
    s: usize,
    /// Concatenated column supports, `m` runs of `s` sorted row indices.
    supports: Vec<u32>,
    /// One sign per column, +1 or -1.
    signs: Vec<i8>,
    seed: SeedSpec,
}

impl SscMatrix {
    /// Rows (embedding dimension).
    pub fn d(&self) -> usize {
        self.d
    }

    /// Columns (ambient dimension).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Nonzeros per column.
    pub fn s(&self) -> usize {
        self.s
    }

    /// The seed the matrix was sampled under (echoed verbatim for matrices
    /// rebuilt via [`SscMatrix::from_parts`]).
    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    /// Magnitude of every nonzero entry, `1/sqrt(s)`.
    pub fn scale(&self) -> f64 {
        1.0 / (self.s as f64).sqrt()
    }

    /// Sorted row indices of column `j`'s nonzeros.
    ///
    /// Panics if `j >= m`; fallible access goes through the transform ops.
    pub fn support(&self, j: usize) -> &[u32] {
        &self.supports[j * self.s..(j + 1) * self.s]
    }

    /// Sign of column `j`, +1 or -1. Panics if `j >= m`.
    pub fn sign(&self, j: usize) -> i8 {
        self.signs[j]
    }

    /// Reassembles a matrix from raw parts, validating the representation:
    /// dimensions in range, `supports` of length `m * s` with each column
    /// strictly increasing and below `d`, `signs` of length `m` with entries
    /// in {-1, +1}.
    pub fn from_parts(
        d: usize,
        m: usize,
        s: usize,
        supports: Vec<u32>,
        signs: Vec<i8>,
        seed: SeedSpec,
    ) -> Result<Self, SamplerError> {
        check_dims(d, s)?;
        if m == 0 {
            return Err(SamplerError::ZeroColumns);
        }
        let expected = m.checked_mul(s).ok_or(SamplerError::InvalidStructure {
            column: 0,
            reason: "m * s overflows the address space",
        })?;
        if supports.len() != expected {
            return Err(SamplerError::WrongLength {
                what: "supports",
                got: supports.len(),
                expected,
            });
        }
        if signs.len() != m {
            return Err(SamplerError::WrongLength { what: "signs", got: signs.len(), expected: m });
        }
        for j in 0..m {
            let col = &supports[j * s..(j + 1) * s];
            if !col.windows(2).all(|w| w[0] < w[1]) {
                return Err(SamplerError::InvalidStructure {
                    column: j,
                    reason: "support indices are not strictly increasing",
                });
            }
            if col[s - 1] as u64 >= d as u64 {
                return Err(SamplerError::InvalidStructure {
                    column: j,
                    reason: "support index out of range",
                });
            }
            if signs[j] != 1 && signs[j] != -1 {
                return Err(SamplerError::InvalidStructure {
                    column: j,
                    reason: "sign is not +1 or -1",
                });
            }
        }
        Ok(SscMatrix { d, m, s, supports, signs, seed })
    }
}

fn check_dims(d: usize, s: usize) -> Result<(), SamplerError> {
    if s < 1 || s > d {
        return Err(SamplerError::SparsityOutOfRange { s, d });
    }
    if (d as u128) > (u32::MAX as u128) + 1 {
        return Err(SamplerError::RowIndexOverflow { d });
    }
    Ok(())
}

/// Draws a uniform `s`-subset of `{0, .., d-1}`, returned sorted.
///
/// Uses Floyd's sampling algorithm: iterate `j` over the last `s` prefix
/// sizes and insert a uniform draw from `{0, .., j}`, falling back to `j`
/// itself on collision. This makes every subset equally likely while drawing
/// exactly `s` values, with no rejection loop whose length could depend on
/// the data.
pub fn sample_support<R: Rng + ?Sized>(
    d: usize,
    s: usize,
    rng: &mut R,
) -> Result<Vec<u32>, SamplerError> {
    check_dims(d, s)?;
    let mut picked: BTreeSet<u32> = BTreeSet::new();
    for j in (d - s)..d {
        // Bounded draws go through u32 so the stream is identical on 32- and
        // 64-bit platforms.
        let t = rng.random_range(0..=j as u32);
        if !picked.insert(t) {
            picked.insert(j as u32);
        }
    }
    Ok(picked.into_iter().collect())
}

/// Samples a `d x m` matrix with sparsity `s` under `seed`.
///
/// Column `j` consumes the `(COLUMN, j)` slot of the seed's stream: first the
/// support draws, then one sign bit. Columns are therefore independent, and
/// the first `m` columns of a wider matrix sampled under the same seed
/// coincide with the narrower matrix.
pub fn sample_matrix(d: usize, m: usize, s: usize, seed: SeedSpec) -> Result<SscMatrix, SamplerError> {
    check_dims(d, s)?;
    if m == 0 {
        return Err(SamplerError::ZeroColumns);
    }
    let mut supports = Vec::with_capacity(m * s);
    let mut signs = Vec::with_capacity(m);
    for j in 0..m {
        let mut rng = seed.rng(domain::COLUMN, j as u64);
        supports.extend_from_slice(&sample_support(d, s, &mut rng)?);
        signs.push(if rng.random::<bool>() { 1 } else { -1 });
    }
    Ok(SscMatrix { d, m, s, supports, signs, seed })
}
