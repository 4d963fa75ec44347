//! Dense kernels: Householder QR, Jacobi symmetric eigensolver, Gram-based
//! singular values, and the exact entropy oracle.

mod dense;
mod jacobi;
mod qr;

pub use dense::DenseMatrix;
pub use jacobi::{jacobi_eigenvalues, jacobi_eigh, SymmetricEigen, MAX_SWEEPS};
pub use qr::householder_qr;

pub(crate) use dense::dot;

use crate::densmat::{SparseSymMatrix, SpectralModel};
use crate::error::{Error, Result};

/// Largest dimension the exact oracle accepts by default.
pub const DEFAULT_ORACLE_LIMIT: usize = 4096;

/// Eigenvalues in `[-PSD_SLACK·n, 0]` are treated as rounding noise.
pub const PSD_SLACK: f64 = 1e-10;

/// Probabilities at or below this are dropped by the exact oracle.
pub const EXACT_CLAMP: f64 = 1e-14;

/// Top `top` singular values of `b`, descending, via the eigendecomposition
/// of the Gram matrix `bᵀb`.
///
/// Each value is reported as `‖b·vᵢ‖` for the Gram eigenvector `vᵢ`, which
/// equals `√λᵢ` exactly in exact arithmetic. Forming `bᵀb` rounds its small
/// eigenvalues to about `ε·σ₁²`, so `√λᵢ` would put a floor of `√ε·σ₁`
/// under the zero singular values; `‖b·vᵢ‖` does not.
pub fn thin_singular_values(b: &DenseMatrix, top: usize) -> Result<Vec<f64>> {
    if top == 0 {
        return Ok(Vec::new());
    }
    let limit = b.rows().min(b.cols());
    if top > limit {
        return Err(Error::InvalidParameter(format!(
            "requested {top} singular values of a {}x{} matrix",
            b.rows(),
            b.cols()
        )));
    }
    let eig = jacobi_eigh(&b.gram())?;
    let v = eig.vectors.expect("vectors requested");
    let s = b.cols();
    let mut values: Vec<f64> = (s - top..s)
        .map(|c| {
            let col = v.column(c);
            (0..b.rows()).map(|i| dot(b.row(i), &col).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `−Σ p ln p` over entries above `clamp`.
///
/// Entries in `[−clamp, clamp]` count as zero (the `0·ln 0 = 0`
/// convention). Terms are summed in ascending order of probability, which
/// makes the result exactly invariant under permutation of the input.
pub fn entropy_from_probs(probs: &[f64], clamp: f64) -> Result<f64> {
    if !(clamp >= 0.0) {
        return Err(Error::InvalidParameter(format!("clamp must be nonnegative, got {clamp}")));
    }
    let mut kept = Vec::with_capacity(probs.len());
    for (index, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidSpectrum(format!("non-finite probability at index {index}")));
        }
        if p < -clamp {
            return Err(Error::NegativeProbability { index, value: p });
        }
        if p > clamp {
            kept.push(p);
        }
    }
    kept.sort_by(f64::total_cmp);
    Ok(kept.iter().map(|&p| -p * p.ln()).sum())
}

/// Exact entropy by full eigendecomposition, refusing dimensions above
/// [`DEFAULT_ORACLE_LIMIT`].
pub fn exact_entropy(r: &SparseSymMatrix) -> Result<(f64, SpectralModel)> {
    exact_entropy_with_limit(r, DEFAULT_ORACLE_LIMIT)
}

pub fn exact_entropy_with_limit(r: &SparseSymMatrix, limit: usize) -> Result<(f64, SpectralModel)> {
    let probs = exact_spectrum_with_limit(r, limit)?;
    let h = entropy_from_probs(&probs, EXACT_CLAMP)?;
    Ok((h, SpectralModel::from_descending_unchecked(probs)))
}

/// Oracle eigenvalues, descending, with PSD noise zeroed.
pub(crate) fn exact_spectrum_with_limit(r: &SparseSymMatrix, limit: usize) -> Result<Vec<f64>> {
    let n = r.dim();
    if n > limit {
        return Err(Error::OracleLimit { n, limit });
    }
    let mut eig = jacobi_eigenvalues(&r.to_dense())?;
    let floor = -PSD_SLACK * n as f64;
    if let Some(&min) = eig.first() {
        if min < floor {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    for v in &mut eig {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    eig.reverse();
    Ok(eig)
}
