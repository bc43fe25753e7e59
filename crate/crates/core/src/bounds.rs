//! Closed-form concentration bounds for the distortion quadratic form.
//!
//! Write `E(x) = ‖Ax‖² - 1` for a unit vector x. Conditioned on the supports,
//! E(x) is a Rademacher chaos of order two in the column signs, and the chain
//! of bounds evaluated here controls it:
//!
//! * a variance proxy `v²` for the off-diagonal overlap coefficients, which
//!   simplifies from `q² = p² + p(1-p)/s` to `2p²` once `p >= 1/s`,
//! * a sub-gaussian tail for linear sign statistics,
//! * an MGF bound for the square of a sub-gaussian variable and the derived
//!   MGF bound for the decoupled quadratic form,
//! * the sub-gamma tail those MGF bounds imply, and
//! * the final Hanson-Wright type tail
//!   `P(|E(x)| > eps) <= 2 exp(-min(eps²/(128 v²), eps/(16 v)))`.
//!
//! Every bound is also exposed on a logarithmic scale. The `exp` forms can
//! legitimately overflow to infinity for extreme arguments; the `log` forms
//! never do.

use core::fmt;


/// Domain violations for bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundsError {
    /// An argument fell outside the domain stated on the evaluator.
    OutOfRange {
        /// Name of the offending argument.
        name: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// The MGF bound does not exist at the requested point.
    MgfUndefined {
        /// Evaluation point.
        t: f64,
        /// Variance factor in force.
        v: f64,
    },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BoundsError::OutOfRange { name, value } => {
                write!(f, "{name} = {value} is outside the bound's domain")
            }
            BoundsError::MgfUndefined { t, v } => {
                write!(f, "MGF bound undefined at t = {t} for v = {v}")
            }
        }
    }
}

impl core::error::Error for BoundsError {}

/// Variance proxy for the overlap coefficients of the distortion form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceProxy {
    /// Second moment bound `q² = p² + p(1-p)/s` of a single overlap entry.
    pub q_squared: f64,
    /// The proxy actually used: `2p²` when `p >= 1/s`, else `q²`.
    pub v_squared: f64,
    /// Whether the simplification `v² = 2p²` applied.
    pub simplified: bool,
}

impl VarianceProxy {
    /// Square root of the proxy, the `v` the tail bounds take.
    pub fn v(&self) -> f64 {
        self.v_squared.sqrt()
    }
}

/// Scale parameters of a sub-gamma random variable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubGammaParams {
    /// Variance factor.
    pub v: f64,
    /// Scale factor governing the exponential regime.
    pub c: f64,
}

impl SubGammaParams {
    /// Both factors must be strictly positive.
    pub fn new(v: f64, c: f64) -> Result<Self, BoundsError> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(BoundsError::OutOfRange { name: "v", value: v });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(BoundsError::OutOfRange { name: "c", value: c });
        }
        Ok(SubGammaParams { v, c })
    }
}

fn check_eps(eps: f64) -> Result<(), BoundsError> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(BoundsError::OutOfRange { name: "eps", value: eps });
    }
    Ok(())
}

fn check_v(v: f64) -> Result<(), BoundsError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(BoundsError::OutOfRange { name: "v", value: v });
    }
    Ok(())
}

/// Log of the Hanson-Wright type one-sided tail bound,
/// `-min(eps² / (128 v²), eps / (16 v))`.
pub fn log_hw_tail_bound(eps: f64, v: f64) -> Result<f64, BoundsError> {
    check_eps(eps)?;
    check_v(v)?;
    let gaussian = eps * eps / (128.0 * v * v);
    let exponential = eps / (16.0 * v);
    Ok(-gaussian.min(exponential))
}

/// Hanson-Wright type one-sided tail bound for the distortion quadratic form,
/// `exp(-min(eps² / (128 v²), eps / (16 v)))`.
///
/// The two regimes cross at `eps = 8v`. Strictly decreasing in `eps` and
/// strictly increasing in `v` on their domains.
pub fn hw_tail_bound(eps: f64, v: f64) -> Result<f64, BoundsError> {
    log_hw_tail_bound(eps, v).map(f64::exp)
}

/// Variance proxy for column density `p` and sparsity `s`.
///
/// `q² = p² + p(1-p)/s` is the exact second moment of one overlap
/// coefficient; in the feasible regime `p >= 1/s` it is at most `2p²`, and
/// the simpler proxy is returned. Requires `p` in (0, 1] and `s >= 1`.
pub fn variance_proxy(p: f64, s: usize) -> Result<VarianceProxy, BoundsError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(BoundsError::OutOfRange { name: "p", value: p });
    }
    if s == 0 {
        return Err(BoundsError::OutOfRange { name: "s", value: 0.0 });
    }
    let s = s as f64;
    let q_squared = p * p + p * (1.0 - p) / s;
    let simplified = p >= 1.0 / s;
    let v_squared = if simplified { 2.0 * p * p } else { q_squared };
    Ok(VarianceProxy { q_squared, v_squared, simplified })
}

/// Log of [`subgaussian_tail_bound`].
pub fn log_subgaussian_tail_bound(eps: f64, v: f64) -> Result<f64, BoundsError> {
    check_eps(eps)?;
    check_v(v)?;
    Ok(-eps * eps / (2.0 * v * v))
}

/// One-sided tail bound `exp(-eps² / (2 v²))` for a centered variable that is
/// sub-gaussian with variance factor `v²`.
pub fn subgaussian_tail_bound(eps: f64, v: f64) -> Result<f64, BoundsError> {
    log_subgaussian_tail_bound(eps, v).map(f64::exp)
}

/// Log of [`subgamma_tail_bound`].
pub fn log_subgamma_tail_bound(eps: f64, params: &SubGammaParams) -> Result<f64, BoundsError> {
    check_eps(eps)?;
    // Constructed SubGammaParams are already valid; re-check so that a struct
    // literal with bad factors cannot smuggle a NaN through.
    check_v(params.v)?;
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(BoundsError::OutOfRange { name: "c", value: params.c });
    }
    let gaussian = eps * eps / (4.0 * params.v * params.v);
    let exponential = eps / (4.0 * params.c);
    Ok(-gaussian.min(exponential))
}

/// One-sided sub-gamma tail bound
/// `exp(-min(eps² / (4 v²), eps / (4 c)))`.
pub fn subgamma_tail_bound(eps: f64, params: &SubGammaParams) -> Result<f64, BoundsError> {
    log_subgamma_tail_bound(eps, params).map(f64::exp)
}

/// Log of [`subgauss_square_mgf_bound`].
pub fn log_subgauss_square_mgf_bound(t: f64, v: f64) -> Result<f64, BoundsError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(BoundsError::OutOfRange { name: "t", value: t });
    }
    if !(v >= 0.0 && v.is_finite()) {
        return Err(BoundsError::OutOfRange { name: "v", value: v });
    }
    let tv2 = 2.0 * t * v * v;
    if tv2 >= 1.0 {
        return Err(BoundsError::MgfUndefined { t, v });
    }
    Ok(tv2 / (1.0 - tv2))
}

/// MGF bound `E exp(t (Z² - E Z²)) <= exp(2 t v² / (1 - 2 t v²))` for a
/// centered-square of a sub-gaussian `Z` with variance factor `v²`.
///
/// Defined for `t >= 0` with `2 t v² < 1`; beyond that the MGF bound blows up
/// and the evaluator reports a domain error.
pub fn subgauss_square_mgf_bound(t: f64, v: f64) -> Result<f64, BoundsError> {
    log_subgauss_square_mgf_bound(t, v).map(f64::exp)
}

/// Log of [`quadform_mgf_bound`].
pub fn log_quadform_mgf_bound(t: f64, v: f64) -> Result<f64, BoundsError> {
    if !t.is_finite() {
        return Err(BoundsError::OutOfRange { name: "t", value: t });
    }
    if !(v >= 0.0 && v.is_finite()) {
        return Err(BoundsError::OutOfRange { name: "v", value: v });
    }
    if 4.0 * t.abs() * v >= 1.0 {
        return Err(BoundsError::MgfUndefined { t, v });
    }
    let t2v2 = 16.0 * t * t * v * v;
    Ok(t2v2 / (1.0 - t2v2))
}

/// Two-sided MGF bound `E exp(t E(x)) <= exp(16 t² v² / (1 - 16 t² v²))` for
/// the distortion quadratic form, valid for `4 |t| v < 1`.
pub fn quadform_mgf_bound(t: f64, v: f64) -> Result<f64, BoundsError> {
    log_quadform_mgf_bound(t, v).map(f64::exp)
}

/// The sub-gamma scale the quadratic-form MGF bound certifies:
/// `(sqrt(32) v, 4 v)`.
///
/// Feeding these into [`subgamma_tail_bound`] reproduces [`hw_tail_bound`]
/// term by term: `eps²/(4 · 32 v²) = eps²/(128 v²)` and
/// `eps/(4 · 4v) = eps/(16 v)`.
pub fn quadform_subgamma_params(v: f64) -> Result<SubGammaParams, BoundsError> {
    check_v(v)?;
    SubGammaParams::new((32.0 * v * v).sqrt(), 4.0 * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-15;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= TOL * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn hw_tail_reference_values() {
        // At eps = 8v the two regimes coincide at exp(-1/2).
        close(hw_tail_bound(8.0, 1.0).unwrap(), 0.6065306597126334);
        close(hw_tail_bound(16.0, 1.0).unwrap(), 0.36787944117144233);
        close(hw_tail_bound(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn hw_tail_regimes() {
        // Below the crossover the quadratic term governs, above it the linear.
        let v = 0.25;
        let crossover = 8.0 * v;
        let below = crossover * 0.5;
        let above = crossover * 2.0;
        close(
            log_hw_tail_bound(below, v).unwrap(),
            -below * below / (128.0 * v * v),
        );
        close(log_hw_tail_bound(above, v).unwrap(), -above / (16.0 * v));
    }

    #[test]
    fn hw_tail_monotone() {
        let v = 0.1;
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let eps = i as f64 * 0.05;
            let b = hw_tail_bound(eps, v).unwrap();
            assert!(b < prev, "not strictly decreasing at eps = {eps}");
            prev = b;
        }
        // Larger variance factor weakens the bound.
        assert!(hw_tail_bound(1.0, 0.2).unwrap() < hw_tail_bound(1.0, 0.3).unwrap());
    }

    #[test]
    fn variance_proxy_reference() {
        let vp = variance_proxy(0.1, 10).unwrap();
        close(vp.q_squared, 0.019);
        close(vp.v_squared, 0.02);
        assert!(vp.simplified);

        // Below the threshold density the exact second moment is kept.
        let vp = variance_proxy(0.05, 10).unwrap();
        assert!(!vp.simplified);
        close(vp.v_squared, vp.q_squared);
        close(vp.q_squared, 0.05 * 0.05 + 0.05 * 0.95 / 10.0);

        // p = 1 collapses to a deterministic overlap.
        let vp = variance_proxy(1.0, 3).unwrap();
        close(vp.q_squared, 1.0);
        close(vp.v_squared, 2.0);
    }

    #[test]
    fn variance_proxy_simplification_is_an_upper_bound() {
        // q^2 <= 2p^2 exactly when p >= 1/s, so the simplified proxy never
        // understates the variance.
        for s in 1..40usize {
            for i in 1..=100 {
                let p = i as f64 / 100.0;
                let vp = variance_proxy(p, s).unwrap();
                assert!(vp.v_squared >= vp.q_squared - TOL);
                assert_eq!(vp.simplified, p >= 1.0 / s as f64);
            }
        }
    }

    #[test]
    fn subgamma_reference_values() {
        let params = SubGammaParams::new(1.0, 1.0).unwrap();
        close(subgamma_tail_bound(2.0, &params).unwrap(), (-0.5f64).exp());
        close(subgamma_tail_bound(1.0, &params).unwrap(), 0.7788007830714049);
    }

    #[test]
    fn mgf_reference_values() {
        close(subgauss_square_mgf_bound(0.25, 1.0).unwrap(), core::f64::consts::E);
        close(subgauss_square_mgf_bound(0.0, 1.0).unwrap(), 1.0);
        close(quadform_mgf_bound(0.0, 1.0).unwrap(), 1.0);
        // 16 t^2 v^2 = 1/4 at t = 1/8, v = 1.
        close(quadform_mgf_bound(0.125, 1.0).unwrap(), (1.0f64 / 3.0).exp());
        // The quadform bound is even in t.
        close(
            quadform_mgf_bound(-0.125, 1.0).unwrap(),
            quadform_mgf_bound(0.125, 1.0).unwrap(),
        );
    }

    #[test]
    fn mgf_domain_edges() {
        assert!(matches!(
            subgauss_square_mgf_bound(0.5, 1.0),
            Err(BoundsError::MgfUndefined { .. })
        ));
        assert!(matches!(
            subgauss_square_mgf_bound(-0.1, 1.0),
            Err(BoundsError::OutOfRange { name: "t", .. })
        ));
        assert!(matches!(
            quadform_mgf_bound(0.25, 1.0),
            Err(BoundsError::MgfUndefined { .. })
        ));
        assert!(matches!(
            quadform_mgf_bound(-0.25, 1.0),
            Err(BoundsError::MgfUndefined { .. })
        ));
        // Just inside the boundary still evaluates.
        assert!(quadform_mgf_bound(0.2499999, 1.0).is_ok());
    }

    #[test]
    fn hw_equals_subgamma_with_certified_scale() {
        // The tail implied by the quadform MGF bound is exactly the
        // Hanson-Wright form: the parameters (sqrt(32) v, 4v) align both
        // regimes and both crossovers.
        for &v in &[0.01, 0.1, 0.5, 1.0, 3.0] {
            let params = quadform_subgamma_params(v).unwrap();
            for i in 0..400 {
                let eps = i as f64 * 0.05;
                close(
                    log_subgamma_tail_bound(eps, &params).unwrap(),
                    log_hw_tail_bound(eps, v).unwrap(),
                );
            }
        }
    }

    #[test]
    fn log_forms_agree_with_exp_forms() {
        for i in 1..50 {
            let eps = i as f64 * 0.1;
            close(
                hw_tail_bound(eps, 0.3).unwrap(),
                log_hw_tail_bound(eps, 0.3).unwrap().exp(),
            );
            close(
                subgaussian_tail_bound(eps, 0.3).unwrap(),
                log_subgaussian_tail_bound(eps, 0.3).unwrap().exp(),
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(hw_tail_bound(-1.0, 1.0).is_err());
        assert!(hw_tail_bound(f64::NAN, 1.0).is_err());
        assert!(hw_tail_bound(1.0, 0.0).is_err());
        assert!(hw_tail_bound(1.0, -2.0).is_err());
        assert!(variance_proxy(0.0, 5).is_err());
        assert!(variance_proxy(1.1, 5).is_err());
        assert!(variance_proxy(0.5, 0).is_err());
        assert!(SubGammaParams::new(0.0, 1.0).is_err());
        assert!(SubGammaParams::new(1.0, f64::INFINITY).is_err());
    }
}
