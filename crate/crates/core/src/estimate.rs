//! Closed-form depth estimators from ball-volume counting.
//!
//! Additive constants of these laws depend on the group volume normalization
//! and are never synthesized: estimators return the slope term only and mark
//! the offset unknown. Fitted offsets come from experiments.

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Frobenius,
    Infidelity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthEstimate {
    /// Depth per decade of `1/epsilon`.
    pub slope: f64,
    /// Additive constant; `None` means unknown.
    pub offset: Option<f64>,
    pub metric: Metric,
    /// `slope * log10(1/epsilon)`, the depth without the unknown offset.
    pub slope_only_depth: f64,
}

fn check_group(n: usize, set_size: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("N", "must be at least 2"));
    }
    if set_size < 2 {
        return Err(Error::invalid("set_size", "must be at least 2"));
    }
    Ok(())
}

/// Minimum infidelity prefactor `(N^2 - 1) / (2 log10 |set|)`.
pub fn theoretical_min_depth(n: usize, set_size: usize, epsilon_i: f64) -> Result<DepthEstimate> {
    check_group(n, set_size)?;
    if !(epsilon_i > 0.0 && epsilon_i < 1.0) {
        return Err(Error::invalid("epsilon_I", "must lie in (0, 1)"));
    }
    let slope = (n * n - 1) as f64 / (2.0 * math::log10(set_size as f64));
    Ok(DepthEstimate {
        slope,
        offset: None,
        metric: Metric::Infidelity,
        slope_only_depth: slope * math::log10(1.0 / epsilon_i),
    })
}

/// Covering bound `(N^2 - 1) log_{|set|}(1/epsilon_F)` without its constant.
pub fn volume_lower_bound(n: usize, set_size: usize, epsilon_f: f64) -> Result<f64> {
    check_group(n, set_size)?;
    if !(epsilon_f > 0.0) {
        return Err(Error::invalid("epsilon_F", "must be positive"));
    }
    Ok((n * n - 1) as f64 * math::ln(1.0 / epsilon_f) / math::ln(set_size as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infidelity_prefactors() {
        let four = theoretical_min_depth(4, 4, 0.01).unwrap();
        assert!((four.slope - 12.46).abs() < 0.01, "{}", four.slope);
        assert_eq!(four.offset, None);
        let two = theoretical_min_depth(4, 2, 0.01).unwrap();
        assert!((two.slope - 24.92).abs() < 0.01, "{}", two.slope);
        let at_1e3 = theoretical_min_depth(4, 4, 1e-3).unwrap();
        assert!((at_1e3.slope_only_depth - 37.37).abs() < 0.01);
    }

    #[test]
    fn prefactor_monotonicity() {
        let s = |n, k| theoretical_min_depth(n, k, 0.1).unwrap().slope;
        assert!(s(4, 2) > s(4, 3) && s(4, 3) > s(4, 4) && s(4, 4) > s(4, 8));
        assert!(s(2, 4) < s(4, 4) && s(4, 4) < s(8, 4));
    }

    #[test]
    fn volume_bound_values() {
        assert_eq!(volume_lower_bound(4, 4, 1.0).unwrap(), 0.0);
        assert!((volume_lower_bound(4, 4, 0.1).unwrap() - 24.9145).abs() < 1e-3);
        let gap = volume_lower_bound(4, 4, 0.05).unwrap() - volume_lower_bound(4, 4, 0.1).unwrap();
        assert!((gap - 7.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(theoretical_min_depth(1, 4, 0.1).is_err());
        assert!(theoretical_min_depth(4, 1, 0.1).is_err());
        assert!(theoretical_min_depth(4, 4, 1.0).is_err());
        assert!(volume_lower_bound(4, 4, 0.0).is_err());
    }
}
