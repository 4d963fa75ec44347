//! Entropy estimation through a Chebyshev expansion of `h(x) = x ln x` on
//! `[0, u]`, evaluated with Clenshaw's recurrence.

use std::time::Instant;

use crate::densmat::{SparseSymMatrix, SpectralModel};
use crate::error::{invalid, Error, Result};
use crate::estimator::{finish, plan, EstimatorConfig, TracePlan};
use crate::hutchinson::probe_values;
use crate::linalg::dot;
use crate::report::{EstimateReport, Method};

/// Coefficients `α₀..α_m` of `f_m(x) = Σ α_w T_w(2x/u − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoefficients {
    u: f64,
    alphas: Vec<f64>,
}

impl ChebCoefficients {
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn degree(&self) -> usize {
        self.alphas.len() - 1
    }
}

pub fn cheb_coefficients(u: f64, m: usize) -> Result<ChebCoefficients> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(invalid(format!("u must lie in (0, 1], got {u}")));
    }
    if m == 0 {
        return Err(invalid("Chebyshev degree must be at least 1"));
    }
    let l = (u / 4.0).ln();
    let mut alphas = Vec::with_capacity(m + 1);
    alphas.push(0.5 * u * (l + 1.0));
    alphas.push(0.25 * u * (2.0 * l + 3.0));
    for w in 2..=m {
        let wf = w as f64;
        let sign = if w % 2 == 0 { 1.0 } else { -1.0 };
        alphas.push(sign * u / (wf * wf * wf - wf));
    }
    Ok(ChebCoefficients { u, alphas })
}

/// `f_m(x)` for `x ∈ [0, u]`.
pub fn cheb_scalar_eval(coeffs: &ChebCoefficients, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x <= coeffs.u) {
        return Err(Error::Domain { x, u: coeffs.u });
    }
    Ok(clenshaw(coeffs, x))
}

/// `b_k = α_k + 2y·b_{k+1} − b_{k+2}` with `y = 2x/u − 1`, then
/// `½(α₀ + b₀ − b₂)`, which equals the full sum `Σ_{w=0}^{m} α_w T_w(y)`.
fn clenshaw(coeffs: &ChebCoefficients, x: f64) -> f64 {
    let two_y = 2.0 * (2.0 * x / coeffs.u - 1.0);
    // b1 = b_{k+1}, b2 = b_{k+2}
    let (mut b1, mut b2) = (0.0, 0.0);
    for &a in coeffs.alphas[1..].iter().rev() {
        let b = a + two_y * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    let b0 = coeffs.alphas[0] + two_y * b1 - b2;
    0.5 * (coeffs.alphas[0] + b0 - b2)
}

/// `gᵀ f_m(R) g` by the vector Clenshaw recurrence
/// `y_k = α_k g + (4/u)·R·y_{k+1} − 2y_{k+1} − y_{k+2}`, returning
/// `½(α₀·gᵀg + gᵀ(y₀ − y₂))`.
pub fn cheb_quadratic_form(r: &SparseSymMatrix, coeffs: &ChebCoefficients, g: &[f64]) -> Result<f64> {
    if g.len() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), found: g.len() });
    }
    Ok(quadratic_form_unchecked(r, coeffs, g))
}

fn quadratic_form_unchecked(r: &SparseSymMatrix, coeffs: &ChebCoefficients, g: &[f64]) -> f64 {
    let alphas = &coeffs.alphas;
    let m = alphas.len() - 1;
    let scale = 4.0 / coeffs.u;
    // y1 holds y_{k+1}, y2 holds y_{k+2}; each step overwrites y2 with y_k in place.
    let mut y1: Vec<f64> = g.iter().map(|gi| alphas[m] * gi).collect();
    let mut y2 = vec![0.0; g.len()];
    let mut g_dot_y2 = 0.0;
    for k in (0..m).rev() {
        let a = alphas[k];
        if k == 0 {
            g_dot_y2 = dot(g, &y2);
        }
        let (offsets, cols, vals) = (r.row_offsets(), r.col_indices(), r.values());
        for i in 0..g.len() {
            let mut ry = 0.0;
            for idx in offsets[i]..offsets[i + 1] {
                ry += vals[idx] * y1[cols[idx]];
            }
            y2[i] = a * g[i] + scale * ry - 2.0 * y1[i] - y2[i];
        }
        std::mem::swap(&mut y1, &mut y2);
    }
    // m ≥ 1, so the loop ran and y1 now holds y₀.
    0.5 * (alphas[0] * dot(g, g) + dot(g, &y1) - g_dot_y2)
}

/// `⌈√(u / (2εℓ ln(1/(1−ℓ))))⌉`, at least 1.
pub fn default_m_cheb(u: f64, ell: f64, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(invalid(format!("u must lie in (0, 1], got {u}")));
    }
    if !(ell > 0.0 && ell < 1.0) {
        return Err(invalid(format!("ell must lie in (0, 1), got {ell}")));
    }
    if ell > u {
        return Err(invalid(format!("ell = {ell} exceeds u = {u}; no spectrum fits between them")));
    }
    let denom = 2.0 * epsilon * ell * (1.0 / (1.0 - ell)).ln();
    Ok((u / denom).sqrt().ceil().max(1.0) as usize)
}

pub fn chebyshev_entropy(r: &SparseSymMatrix, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    chebyshev_entropy_with_model(r, cfg, None)
}

/// As [`chebyshev_entropy`], with a known spectrum used for the exact-trace
/// mode, the reported exact entropy and the assumption checks.
pub fn chebyshev_entropy_with_model(
    r: &SparseSymMatrix,
    cfg: &EstimatorConfig,
    model: Option<&SpectralModel>,
) -> Result<EstimateReport> {
    let started = Instant::now();
    let plan = plan(r, cfg, model, default_m_cheb)?;
    let coeffs = cheb_coefficients(plan.u.u, plan.m)?;
    let trace = match &plan.trace {
        // Eigenvalues above u are still evaluated; the assumption check flags them.
        TracePlan::Exact(probs) => probs.iter().map(|&p| clenshaw(&coeffs, p)).sum::<f64>(),
        TracePlan::Probes(s) => {
            let values = probe_values(*s, &cfg.probe_stream(), |g| quadratic_form_unchecked(r, &coeffs, g), r.dim())?;
            values.iter().sum::<f64>() / *s as f64
        }
    };
    let mut report = EstimateReport::new(Method::Chebyshev, -trace, cfg.seed);
    finish(&mut report, &plan, cfg, started);
    if let (Some(spec), Some(ell)) = (&plan.spectrum, cfg.ell) {
        if spec.p_max() > 1.0 - ell {
            report.warnings.push("assumption violated: p1 > 1 - ell".to_string());
        }
    }
    Ok(report)
}
