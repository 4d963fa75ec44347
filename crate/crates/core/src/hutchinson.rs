//! Gaussian trace estimation for implicitly applied PSD operators.

use rayon::prelude::*;

use crate::densmat::SparseSymMatrix;
use crate::error::{invalid, Result};
use crate::linalg::dot;
use crate::rng::{gaussian_vector, RngStream};

/// An operator `A` known only through `g ↦ gᵀAg`.
pub trait QuadraticForm: Sync {
    fn dim(&self) -> usize;
    fn quadratic_form(&self, g: &[f64]) -> f64;
}

impl QuadraticForm for SparseSymMatrix {
    fn dim(&self) -> usize {
        SparseSymMatrix::dim(self)
    }

    fn quadratic_form(&self, g: &[f64]) -> f64 {
        let mut y = vec![0.0; g.len()];
        self.apply(g, &mut y);
        dot(g, &y)
    }
}

/// `(1/s)·Σ gᵢᵀAgᵢ` with probe `i` drawn from `stream.derive(i)`.
///
/// Probes run in parallel, but the per-probe values are summed in probe
/// order so the result does not depend on the thread count.
pub fn estimate_trace<A: QuadraticForm + ?Sized>(oracle: &A, s: usize, stream: &RngStream) -> Result<f64> {
    if s == 0 {
        return Err(invalid("trace estimation needs at least one probe"));
    }
    let n = oracle.dim();
    let values = probe_values(s, stream, |g| oracle.quadratic_form(g), n)?;
    Ok(values.iter().sum::<f64>() / s as f64)
}

/// Evaluates `f` on `s` Gaussian probes of length `n`, in probe order.
pub(crate) fn probe_values<F>(s: usize, stream: &RngStream, f: F, n: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..s as u64)
        .into_par_iter()
        .map(|i| gaussian_vector(&stream.derive(i), n).map(|g| f(&g)))
        .collect()
}

/// `⌈20 ln(2/δ)/ε²⌉`.
pub fn default_s(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok((20.0 * (2.0 / delta).ln() / (epsilon * epsilon)).ceil() as usize)
}
