//! Configuration and the steps shared by the two polynomial estimators.

use crate::densmat::{SparseSymMatrix, SpectralModel};
use crate::error::{invalid, Error, Result};
use crate::hutchinson::default_s;
use crate::linalg::{exact_spectrum_with_limit, DEFAULT_ORACLE_LIMIT};
use crate::power::{estimate_u, UEstimate, UMode};
use crate::report::{check_assumptions, EstimateReport};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    /// Failure probability, used for both the probe count and the power method.
    pub delta: f64,
    /// Lower bound on every probability; needed only when `m` is derived.
    pub ell: Option<f64>,
    pub u_mode: UMode,
    pub m_override: Option<usize>,
    pub s_override: Option<usize>,
    /// Replace the stochastic trace by the exact trace over the spectrum.
    pub nte: bool,
    pub seed: u64,
    pub oracle_limit: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            delta: 0.1,
            ell: None,
            u_mode: UMode::SixTimesPower,
            m_override: None,
            s_override: None,
            nte: false,
            seed: 0,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if let Some(ell) = self.ell {
            if !(ell > 0.0 && ell <= 1.0) {
                return Err(invalid(format!("ell must lie in (0, 1], got {ell}")));
            }
        }
        if self.m_override == Some(0) {
            return Err(invalid("m override must be at least 1"));
        }
        // The probe count is irrelevant with an exact trace, so 0 is tolerated there.
        if self.s_override == Some(0) && !self.nte {
            return Err(invalid("s override must be at least 1"));
        }
        self.u_mode.validate()
    }

    pub(crate) fn power_stream(&self) -> RngStream {
        RngStream::from_seed(self.seed).derive(0)
    }

    pub(crate) fn probe_stream(&self) -> RngStream {
        RngStream::from_seed(self.seed).derive(1)
    }
}

/// Everything an estimator needs before its main loop.
pub(crate) struct Plan {
    pub u: UEstimate,
    pub m: usize,
    /// Probe count, or the full spectrum (length n) in exact-trace mode.
    pub trace: TracePlan,
    /// Spectrum padded with zeros to length n, when known.
    pub spectrum: Option<SpectralModel>,
}

pub(crate) enum TracePlan {
    Probes(usize),
    Exact(Vec<f64>),
}

pub(crate) fn plan(
    r: &SparseSymMatrix,
    cfg: &EstimatorConfig,
    model: Option<&SpectralModel>,
    default_m: impl Fn(f64, f64, f64) -> Result<usize>,
) -> Result<Plan> {
    cfg.validate()?;
    let n = r.dim();
    let spectrum = match model {
        Some(m) => Some(padded(m, n)?),
        None if cfg.nte => Some(SpectralModel::from_descending_unchecked(exact_spectrum_with_limit(r, cfg.oracle_limit)?)),
        None => None,
    };
    let u = estimate_u(r, cfg.delta, cfg.u_mode, &cfg.power_stream())?;
    let m = match (cfg.m_override, cfg.ell) {
        (Some(m), _) => m,
        (None, Some(ell)) => default_m(u.u, ell, cfg.epsilon)?,
        (None, None) => return Err(invalid("ell is required unless m is given explicitly")),
    };
    let trace = if cfg.nte {
        TracePlan::Exact(spectrum.as_ref().expect("spectrum available in nte mode").probs().to_vec())
    } else {
        TracePlan::Probes(match cfg.s_override {
            Some(s) => s,
            None => default_s(cfg.epsilon, cfg.delta)?,
        })
    };
    Ok(Plan { u, m, trace, spectrum })
}

fn padded(model: &SpectralModel, n: usize) -> Result<SpectralModel> {
    let k = model.probs().len();
    if k > n {
        return Err(Error::DimensionMismatch { expected: n, found: k });
    }
    let mut probs = model.probs().to_vec();
    probs.resize(n, 0.0);
    Ok(SpectralModel::from_descending_unchecked(probs))
}

/// Fills the fields common to both estimators.
pub(crate) fn finish(report: &mut EstimateReport, plan: &Plan, cfg: &EstimatorConfig, started: std::time::Instant) {
    report.m_used = Some(plan.m);
    report.s_used = match plan.trace {
        TracePlan::Probes(s) => Some(s),
        TracePlan::Exact(_) => None,
    };
    report.u_used = Some(plan.u.u);
    report.p1_tilde = plan.u.power.map(|p| p.p1_tilde);
    report.nte = cfg.nte;
    if cfg.u_mode.is_heuristic() {
        report.warnings.push("u taken directly from the power estimate (heuristic, no guarantee u >= p1)".to_string());
    }
    if let Some(spec) = &plan.spectrum {
        report.attach_assumptions(check_assumptions(Some(spec), Some(plan.u.u), cfg.ell, None));
        report.attach_exact(spec.entropy());
    }
    report.wall_ms = started.elapsed().as_secs_f64() * 1e3;
}
