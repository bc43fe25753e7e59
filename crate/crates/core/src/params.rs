//! Explicit parameter selection for a target distortion.
//!
//! Given a distortion bound `eps` and a failure probability `delta`, the
//! guarantee `P(|‖Ax‖² - 1| > eps) <= delta` holds on the whole unit sphere
//! once the embedding dimension and the column sparsity are
//!
//! ```text
//! d = ceil(512 * ln(2/delta)^2 / eps^2)
//! p = eps / (16 * sqrt(2) * ln(2/delta))        (nominal density)
//! s = ceil(p * d)                               (nonzeros per column)
//! ```
//!
//! All logarithms are natural. The constants come out of an optimized
//! sub-gamma argument for the distortion quadratic form; they are pessimistic
//! in practice but fully explicit, which is the point.
//!
//! The analysis additionally needs `s^2 >= d` (equivalently `p >= 1/s`) so
//! that the variance proxy simplifies. For every valid `(eps, delta)` the
//! derived pair satisfies it automatically because `1/p^2` equals the
//! pre-ceiling value of `d` exactly; the flag is still surfaced through
//! [`JlParams::feasible`] and [`validate_params`] for hand-picked parameters.

use alloc::vec::Vec;
use core::fmt;


/// Largest embedding dimension the calculator accepts before declaring the
/// request out of range. Beyond 2^53 the ceiling of an f64 no longer lands on
/// exact integers, so the formula would silently lose precision.
const MAX_DIMENSION: f64 = 9_007_199_254_740_992.0;

/// Matrix parameters produced by [`compute_parameters`] or assembled by hand.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JlParams {
    /// Target distortion, in (0, 1).
    pub epsilon: f64,
    /// Target failure probability, in (0, 1).
    pub delta: f64,
    /// Embedding dimension (rows of the matrix).
    pub d: usize,
    /// Nonzero entries per column.
    pub s: usize,
    /// Nominal column density `eps / (16 sqrt(2) ln(2/delta))` before the
    /// integer rounding that produces `s`.
    pub p_nominal: f64,
    /// True when `s` had to be clamped down to `d` because the rounded
    /// sparsity exceeded the number of rows.
    pub clamped: bool,
}

impl JlParams {
    /// Density actually realized by the integer pair, `s / d`.
    pub fn p_actual(&self) -> f64 {
        self.s as f64 / self.d as f64
    }

    /// Whether `s^2 >= d`, the regime in which the variance proxy of the
    /// distortion quadratic form collapses to `2 p^2`.
    pub fn feasible(&self) -> bool {
        (self.s as u128) * (self.s as u128) >= self.d as u128
    }
}

/// Rejection reasons for [`compute_parameters`] inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamError {
    /// An argument fell outside its domain.
    OutOfRange {
        /// Name of the offending argument.
        name: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// The requested `(eps, delta)` pair implies an embedding dimension too
    /// large to represent exactly.
    DimensionOverflow {
        /// The pre-ceiling dimension that overflowed.
        d_real: f64,
    },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamError::OutOfRange { name, value } => {
                write!(f, "{name} = {value} is outside (0, 1)")
            }
            ParamError::DimensionOverflow { d_real } => {
                write!(f, "requested dimension {d_real:e} exceeds exact integer range")
            }
        }
    }
}

impl core::error::Error for ParamError {}

/// Consistency violations reported by [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    /// `epsilon` outside (0, 1).
    EpsilonOutOfRange(f64),
    /// `delta` outside (0, 1).
    DeltaOutOfRange(f64),
    /// The matrix has no rows.
    ZeroRows,
    /// Sparsity below one nonzero per column.
    SparsityBelowOne,
    /// More nonzeros requested than rows available.
    SparsityExceedsRows { s: usize, d: usize },
    /// `s^2 < d`, outside the regime the tail analysis covers.
    Infeasible { s: usize, d: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::EpsilonOutOfRange(eps) => write!(f, "epsilon = {eps} is outside (0, 1)"),
            Violation::DeltaOutOfRange(delta) => write!(f, "delta = {delta} is outside (0, 1)"),
            Violation::ZeroRows => write!(f, "d = 0: the matrix has no rows"),
            Violation::SparsityBelowOne => write!(f, "s = 0: columns need at least one nonzero"),
            Violation::SparsityExceedsRows { s, d } => write!(f, "s > d ({s} > {d})"),
            Violation::Infeasible { s, d } => {
                write!(f, "s^2 < d ({} < {d}): tail guarantee does not apply", (s as u128) * (s as u128))
            }
        }
    }
}

/// Derives the explicit `(d, s)` pair for a distortion target.
///
/// Both arguments must lie strictly inside (0, 1). The returned parameters
/// satisfy `1 <= s <= d` and, for every input this function accepts,
/// `s^2 >= d`; should the rounded sparsity ever exceed `d` it is clamped and
/// the [`JlParams::clamped`] flag records that the nominal density was not
/// realizable.
pub fn compute_parameters(epsilon: f64, delta: f64) -> Result<JlParams, ParamError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ParamError::OutOfRange { name: "epsilon", value: epsilon });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ParamError::OutOfRange { name: "delta", value: delta });
    }

    let log_term = (2.0 / delta).ln();
    let d_real = (512.0 * log_term * log_term / (epsilon * epsilon)).ceil();
    if !(d_real <= MAX_DIMENSION) {
        return Err(ParamError::DimensionOverflow { d_real });
    }
    let d = d_real as usize;

    let p_nominal = epsilon / (16.0 * core::f64::consts::SQRT_2 * log_term);
    let mut s = (p_nominal * d as f64).ceil() as usize;
    let mut clamped = false;
    if s > d {
        s = d;
        clamped = true;
    }

    Ok(JlParams { epsilon, delta, d, s, p_nominal, clamped })
}

/// Checks a parameter set against the invariants the guarantee relies on.
///
/// Returns every violation found, in a fixed order; an empty vector means the
/// parameters are usable. Infeasibility (`s^2 < d`) is reported here rather
/// than as a hard error because the transform itself is well defined without
/// it, only the closed-form tail bound stops applying.
pub fn validate_params(params: &JlParams) -> Vec<Violation> {
    let mut violations = Vec::new();
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        violations.push(Violation::EpsilonOutOfRange(params.epsilon));
    }
    if !(params.delta > 0.0 && params.delta < 1.0) {
        violations.push(Violation::DeltaOutOfRange(params.delta));
    }
    if params.d == 0 {
        violations.push(Violation::ZeroRows);
    }
    if params.s == 0 {
        violations.push(Violation::SparsityBelowOne);
    }
    if params.s > params.d {
        violations.push(Violation::SparsityExceedsRows { s: params.s, d: params.d });
    }
    if params.d > 0 && params.s > 0 && params.s <= params.d && !params.feasible() {
        violations.push(Violation::Infeasible { s: params.s, d: params.d });
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(epsilon: f64, delta: f64) -> JlParams {
        compute_parameters(epsilon, delta).unwrap()
    }

    #[test]
    fn headline_example() {
        let p = params(0.5, 0.1);
        assert_eq!(p.d, 18380);
        assert_eq!(p.s, 136);
        assert!((p.p_nominal - 0.00737618882272971).abs() < 1e-15);
        assert!((p.p_actual() - 136.0 / 18380.0).abs() == 0.0);
        assert!(!p.clamped);
        assert!(p.feasible());
        assert!(validate_params(&p).is_empty());
    }

    #[test]
    fn reference_grid() {
        // Values recomputed independently with 50-digit arithmetic.
        let cases = [
            (0.5, 0.1, 18380, 136),
            (0.3, 0.1, 51055, 226),
            (0.5, 0.05, 27869, 167),
            (0.3, 0.05, 77414, 279),
        ];
        for (eps, delta, d, s) in cases {
            let p = params(eps, delta);
            assert_eq!((p.d, p.s), (d, s), "eps = {eps}, delta = {delta}");
        }
    }

    #[test]
    fn derived_pairs_are_always_feasible() {
        // 512 = (16 sqrt 2)^2 makes the pre-ceiling dimension exactly 1/p^2,
        // so d >= 1/p^2 and s^2 >= (p d)^2 = p^2 d * d >= d.
        let mut eps = 0.001;
        while eps < 1.0 {
            let mut delta = 1e-12;
            while delta < 1.0 {
                let p = params(eps, delta);
                assert!(p.feasible(), "eps = {eps}, delta = {delta}");
                assert!(!p.clamped, "eps = {eps}, delta = {delta}");
                assert!(validate_params(&p).is_empty());
                delta *= 40.0;
            }
            eps += 0.083;
        }
    }

    #[test]
    fn sparsity_within_rows() {
        for (eps, delta) in [(0.999, 0.999), (0.001, 0.5), (0.9, 1e-9)] {
            let p = params(eps, delta);
            assert!(p.s >= 1 && p.s <= p.d);
            assert!((p.p_actual() - p.s as f64 / p.d as f64).abs() == 0.0);
        }
    }

    #[test]
    fn monotone_in_targets() {
        // Tightening either target never shrinks the matrix.
        let base = params(0.5, 0.1);
        assert!(params(0.25, 0.1).d >= base.d);
        assert!(params(0.5, 0.01).d >= base.d);
        assert!(params(0.5, 0.01).s >= base.s);
    }

    #[test]
    fn rejects_out_of_range() {
        for eps in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(
                compute_parameters(eps, 0.1),
                Err(ParamError::OutOfRange { name: "epsilon", .. })
            ));
        }
        for delta in [0.0, 1.0, -0.1, 2.0, f64::NAN] {
            assert!(matches!(
                compute_parameters(0.5, delta),
                Err(ParamError::OutOfRange { name: "delta", .. })
            ));
        }
    }

    #[test]
    fn rejects_unrepresentable_dimension() {
        assert!(matches!(
            compute_parameters(1e-130, 0.5),
            Err(ParamError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn validate_flags_hand_picked_violations() {
        let p = JlParams { epsilon: 0.5, delta: 0.1, d: 100, s: 5, p_nominal: 0.05, clamped: false };
        assert_eq!(validate_params(&p), alloc::vec![Violation::Infeasible { s: 5, d: 100 }]);

        let p = JlParams { epsilon: 1.5, delta: 0.0, d: 0, s: 0, p_nominal: 0.0, clamped: false };
        let violations = validate_params(&p);
        assert_eq!(violations.len(), 4);
        assert!(violations.contains(&Violation::EpsilonOutOfRange(1.5)));
        assert!(violations.contains(&Violation::DeltaOutOfRange(0.0)));
        assert!(violations.contains(&Violation::ZeroRows));
        assert!(violations.contains(&Violation::SparsityBelowOne));

        let p = JlParams { epsilon: 0.5, delta: 0.1, d: 4, s: 6, p_nominal: 0.9, clamped: false };
        assert_eq!(validate_params(&p), alloc::vec![Violation::SparsityExceedsRows { s: 6, d: 4 }]);
    }
}
