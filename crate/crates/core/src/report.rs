//! Result records, relative error and assumption checks against a known
//! spectrum.

use std::fmt;

use crate::densmat::SpectralModel;
use crate::error::{Error, Result};

/// Probabilities above this count towards the rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriState {
    True,
    False,
    Unknown,
}

impl TriState {
    fn from_bool(b: bool) -> Self {
        if b {
            TriState::True
        } else {
            TriState::False
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TriState::True => "true",
            TriState::False => "false",
            TriState::Unknown => "unknown",
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssumptionCheck {
    pub u_ge_p1: TriState,
    pub ell_le_pmin: TriState,
    pub rank_le_k: TriState,
}

impl AssumptionCheck {
    pub fn unknown() -> Self {
        Self { u_ge_p1: TriState::Unknown, ell_le_pmin: TriState::Unknown, rank_le_k: TriState::Unknown }
    }

    /// Human-readable notes for every check that came out false.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.u_ge_p1 == TriState::False {
            out.push("assumption violated: u < p1".to_string());
        }
        if self.ell_le_pmin == TriState::False {
            out.push("assumption violated: ell > p_min".to_string());
        }
        if self.rank_le_k == TriState::False {
            out.push("assumption violated: rank > k".to_string());
        }
        out
    }
}

/// Compares `u`, `ell` and `k` with the model. Every field is unknown when
/// there is no model or the corresponding input is absent.
pub fn check_assumptions(
    model: Option<&SpectralModel>,
    u: Option<f64>,
    ell: Option<f64>,
    k: Option<usize>,
) -> AssumptionCheck {
    let Some(m) = model else {
        return AssumptionCheck::unknown();
    };
    AssumptionCheck {
        u_ge_p1: u.map_or(TriState::Unknown, |u| TriState::from_bool(u >= m.p_max())),
        ell_le_pmin: ell.map_or(TriState::Unknown, |l| TriState::from_bool(l <= m.p_min())),
        rank_le_k: k.map_or(TriState::Unknown, |k| TriState::from_bool(m.rank(RANK_THRESHOLD) <= k)),
    }
}

/// `|estimate − exact| / exact`; undefined for `exact ≤ 0`.
pub fn relative_error(estimate: f64, exact: f64) -> Result<f64> {
    if !(exact > 0.0) {
        return Err(Error::NonPositiveExact(exact));
    }
    Ok((estimate - exact).abs() / exact)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Taylor,
    Chebyshev,
    Sketch,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Taylor => "taylor",
            Method::Chebyshev => "chebyshev",
            Method::Sketch => "sketch",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one estimator run with the parameters it actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub method: Method,
    pub estimate: f64,
    pub m_used: Option<usize>,
    /// Probe count; `None` when the trace was computed exactly.
    pub s_used: Option<usize>,
    pub u_used: Option<f64>,
    pub p1_tilde: Option<f64>,
    pub nte: bool,
    pub seed: u64,
    pub wall_ms: f64,
    pub exact: Option<f64>,
    pub rel_err: Option<f64>,
    /// Set instead of `rel_err` when the exact entropy is zero.
    pub abs_err: Option<f64>,
    pub assumptions: AssumptionCheck,
    pub warnings: Vec<String>,
}

impl EstimateReport {
    pub fn new(method: Method, estimate: f64, seed: u64) -> Self {
        Self {
            method,
            estimate,
            m_used: None,
            s_used: None,
            u_used: None,
            p1_tilde: None,
            nte: false,
            seed,
            wall_ms: 0.0,
            exact: None,
            rel_err: None,
            abs_err: None,
            assumptions: AssumptionCheck::unknown(),
            warnings: Vec::new(),
        }
    }

    /// Records the exact value with relative error, or absolute error plus a
    /// warning for a pure state.
    pub fn attach_exact(&mut self, exact: f64) {
        self.exact = Some(exact);
        match relative_error(self.estimate, exact) {
            Ok(r) => self.rel_err = Some(r),
            Err(_) => {
                self.abs_err = Some((self.estimate - exact).abs());
                self.warnings.push("exact entropy is not positive; absolute error reported".to_string());
            }
        }
    }

    /// Stores the check and appends its violations to the warnings.
    pub fn attach_assumptions(&mut self, check: AssumptionCheck) {
        self.assumptions = check;
        self.warnings.extend(check.violations());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model() -> SpectralModel {
        SpectralModel::new(vec![0.5, 0.3, 0.2], None).unwrap()
    }

    #[test]
    fn assumption_examples() {
        let m = model();
        let all = check_assumptions(Some(&m), Some(1.0), Some(0.1), Some(3));
        assert_eq!(all, AssumptionCheck { u_ge_p1: TriState::True, ell_le_pmin: TriState::True, rank_le_k: TriState::True });
        assert!(all.violations().is_empty());
        let bad = check_assumptions(Some(&m), None, Some(0.25), Some(2));
        assert_eq!(bad.ell_le_pmin, TriState::False);
        assert_eq!(bad.u_ge_p1, TriState::Unknown);
        assert_eq!(bad.rank_le_k, TriState::False);
        assert_eq!(bad.violations().len(), 2);
        assert_eq!(check_assumptions(None, Some(1.0), Some(0.1), Some(3)), AssumptionCheck::unknown());
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(0.7, 0.7).unwrap(), 0.0);
        assert!((relative_error(0.69, 0.6931).unwrap() - 0.004472659067955633).abs() < 1e-12);
        assert!(matches!(relative_error(0.1, 0.0), Err(Error::NonPositiveExact(_))));
    }

    #[test]
    fn pure_state_uses_absolute_error() {
        let mut r = EstimateReport::new(Method::Taylor, 0.01, 0);
        r.attach_exact(0.0);
        assert_eq!(r.rel_err, None);
        assert_eq!(r.abs_err, Some(0.01));
        assert_eq!(r.warnings.len(), 1);
    }

    proptest! {
        #[test]
        fn relative_error_scale_invariant(a in 0.01f64..10.0, b in 0.01f64..10.0, c in 0.01f64..100.0) {
            let r1 = relative_error(a, b).unwrap();
            let r2 = relative_error(c * a, c * b).unwrap();
            prop_assert!((r1 - r2).abs() <= 1e-12 * r1.max(1.0));
        }
    }
}
