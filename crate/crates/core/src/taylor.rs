//! Entropy estimation from the series
//! `H(R) = ln(1/u) + Σ_{k≥1} tr(R·Cᵏ)/k` with `C = I − R/u`.

use std::time::Instant;

use crate::densmat::{SparseSymMatrix, SpectralModel};
use crate::error::{invalid, Error, Result};
use crate::estimator::{finish, plan, EstimatorConfig, TracePlan};
use crate::hutchinson::probe_values;
use crate::linalg::dot;
use crate::report::{EstimateReport, Method};

/// `⌈(u/ℓ)·ln(1/ε)⌉`, at least 1.
pub fn default_m_taylor(u: f64, ell: f64, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(invalid(format!("u must lie in (0, 1], got {u}")));
    }
    if !(ell > 0.0) {
        return Err(invalid(format!("ell must be positive, got {ell}")));
    }
    if ell > u {
        return Err(invalid(format!("ell = {ell} exceeds u = {u}; no spectrum fits between them")));
    }
    Ok(((u / ell) * (1.0 / epsilon).ln()).ceil().max(1.0) as usize)
}

/// `Σ_{k=1}^{m} gᵀ R Cᵏ g / k`, using exactly `m` products with `R`.
///
/// With `r = Rg` and `w_k = Cᵏg`, symmetry gives `gᵀRCᵏg = rᵀw_k`. The
/// first product yields both `r` and `w₁ = g − r/u`; each later `k` needs
/// one product `z = R·w_{k−1}` for `w_k = w_{k−1} − z/u`.
pub fn taylor_quadratic_form(r: &SparseSymMatrix, u: f64, m: usize, g: &[f64]) -> Result<f64> {
    if !(u > 0.0) {
        return Err(invalid(format!("u must be positive, got {u}")));
    }
    if g.len() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), found: g.len() });
    }
    Ok(quadratic_form_unchecked(r, u, m, g))
}

fn quadratic_form_unchecked(r: &SparseSymMatrix, u: f64, m: usize, g: &[f64]) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = g.len();
    let inv_u = 1.0 / u;
    let mut rg = vec![0.0; n];
    r.apply(g, &mut rg);
    let mut w: Vec<f64> = g.iter().zip(&rg).map(|(gi, ri)| gi - inv_u * ri).collect();
    let mut z = vec![0.0; n];
    let mut acc = dot(&rg, &w);
    for k in 2..=m {
        r.apply(&w, &mut z);
        let mut term = 0.0;
        for ((wi, zi), ri) in w.iter_mut().zip(&z).zip(&rg) {
            *wi -= inv_u * zi;
            term += ri * *wi;
        }
        acc += term / k as f64;
    }
    acc
}

/// `Σ_j Σ_{k=1}^{m} p_j (1 − p_j/u)ᵏ / k`, the exact trace of the truncated
/// series for a matrix with eigenvalues `probs`.
pub fn taylor_series_trace(probs: &[f64], u: f64, m: usize) -> f64 {
    let mut total = 0.0;
    for &p in probs {
        if p == 0.0 {
            continue;
        }
        let c = 1.0 - p / u;
        let mut pow = 1.0;
        let mut acc = 0.0;
        for k in 1..=m {
            pow *= c;
            acc += pow / k as f64;
        }
        total += p * acc;
    }
    total
}

pub fn taylor_entropy(r: &SparseSymMatrix, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    taylor_entropy_with_model(r, cfg, None)
}

/// As [`taylor_entropy`], with a known spectrum used for the exact-trace
/// mode, the reported exact entropy and the assumption checks.
pub fn taylor_entropy_with_model(
    r: &SparseSymMatrix,
    cfg: &EstimatorConfig,
    model: Option<&SpectralModel>,
) -> Result<EstimateReport> {
    let started = Instant::now();
    let plan = plan(r, cfg, model, default_m_taylor)?;
    let u = plan.u.u;
    let trace = match &plan.trace {
        TracePlan::Exact(probs) => taylor_series_trace(probs, u, plan.m),
        TracePlan::Probes(s) => {
            let values = probe_values(*s, &cfg.probe_stream(), |g| quadratic_form_unchecked(r, u, plan.m, g), r.dim())?;
            values.iter().sum::<f64>() / *s as f64
        }
    };
    let mut report = EstimateReport::new(Method::Taylor, (1.0 / u).ln() + trace, cfg.seed);
    finish(&mut report, &plan, cfg, started);
    Ok(report)
}
