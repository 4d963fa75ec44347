//! Reproducible density-matrix families used in the benchmarks.

use std::f64::consts::PI;

use super::{SparseSymMatrix, SpectralModel};
use crate::error::{Error, Result};
use crate::linalg::{dot, exact_entropy_with_limit, householder_qr, DenseMatrix, DEFAULT_ORACLE_LIMIT};
use crate::rng::RngStream;

/// Eigenvalue decay profile for the low-rank family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    /// weights `exp(−i)`, i = 1..k
    Exponential,
    /// weights `k − i + 1`, i = 1..k
    Linear,
}

impl std::str::FromStr for Decay {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" | "exp" => Ok(Decay::Exponential),
            "linear" | "lin" => Ok(Decay::Linear),
            other => Err(Error::InvalidParameter(format!("unknown decay '{other}'"))),
        }
    }
}

/// `GGᵀ/tr(GGᵀ)` for an n×n standard Gaussian `G`.
///
/// The spectrum comes from the exact oracle when `n` is within
/// [`DEFAULT_ORACLE_LIMIT`], otherwise it is omitted.
pub fn generate_haar_like_density(n: usize, stream: &RngStream) -> Result<(SparseSymMatrix, Option<SpectralModel>)> {
    generate_haar_like_density_with_limit(n, stream, DEFAULT_ORACLE_LIMIT)
}

pub fn generate_haar_like_density_with_limit(
    n: usize,
    stream: &RngStream,
    oracle_limit: usize,
) -> Result<(SparseSymMatrix, Option<SpectralModel>)> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let g = gaussian_matrix(n, n, stream);
    let trace: f64 = g.as_slice().iter().map(|v| v * v).sum();
    let mut d = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let w = dot(g.row(i), g.row(j)) / trace;
            d[(i, j)] = w;
            d[(j, i)] = w;
        }
    }
    let r = SparseSymMatrix::from_dense(&d)?;
    let model = if n <= oracle_limit { Some(exact_entropy_with_limit(&r, oracle_limit)?.1) } else { None };
    Ok((r, model))
}

/// Closed-form spectrum of the trace-normalized 1-D Poisson matrix,
/// descending: `(2/n)·sin²(iπ/(2n+2))`, i = 1..n.
pub fn poisson_spectrum(n: usize) -> Vec<f64> {
    let mut p: Vec<f64> =
        (1..=n).map(|i| (4.0 / (2 * n) as f64) * (i as f64 * PI / (2 * n + 2) as f64).sin().powi(2)).collect();
    p.sort_by(|a, b| b.total_cmp(a));
    p
}

/// Tridiagonal `(2, −1)` matrix divided by its trace `2n`.
pub fn generate_tridiagonal_poisson(n: usize) -> Result<(SparseSymMatrix, SpectralModel)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("tridiagonal Poisson needs n >= 2, got {n}")));
    }
    let scale = 1.0 / (2 * n) as f64;
    let mut triplets = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            triplets.push((i, i - 1, -scale));
        }
        triplets.push((i, i, 2.0 * scale));
        if i + 1 < n {
            triplets.push((i, i + 1, -scale));
        }
    }
    let r = SparseSymMatrix::from_triplets(n, triplets)?;
    Ok((r, SpectralModel::new(poisson_spectrum(n), None)?))
}

/// Rank-`k` matrix `Q·diag(p)·Qᵀ` with a random orthonormal `Q` (n×k).
pub fn generate_low_rank_density(
    n: usize,
    k: usize,
    decay: Decay,
    stream: &RngStream,
) -> Result<(SparseSymMatrix, SpectralModel)> {
    check_rank(n, k)?;
    let weights: Vec<f64> = match decay {
        Decay::Exponential => (1..=k).map(|i| (-(i as f64)).exp()).collect(),
        Decay::Linear => (1..=k).map(|i| (k - i + 1) as f64).collect(),
    };
    assemble(n, weights, stream)
}

/// Top `k` weights linear (`k, k−1, …, 1`), remaining `n − k` weights 1.
pub fn generate_linear_plus_uniform(n: usize, k: usize, stream: &RngStream) -> Result<(SparseSymMatrix, SpectralModel)> {
    check_rank(n, k)?;
    let weights: Vec<f64> = (1..=k).map(|i| (k - i + 1) as f64).chain(std::iter::repeat(1.0).take(n - k)).collect();
    assemble(n, weights, stream)
}

/// `Q·diag(w/Σw)·Qᵀ` for arbitrary nonnegative weights `w` (at most `n`
/// of them) and a random orthonormal `Q`.
pub fn generate_with_spectrum(n: usize, weights: &[f64], stream: &RngStream) -> Result<(SparseSymMatrix, SpectralModel)> {
    check_rank(n, weights.len())?;
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || weights.iter().all(|w| *w == 0.0) {
        return Err(Error::InvalidSpectrum("weights must be finite, nonnegative and not all zero".into()));
    }
    assemble(n, weights.to_vec(), stream)
}

fn check_rank(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("rank k must satisfy 1 <= k <= n, got k={k}, n={n}")));
    }
    Ok(())
}

fn assemble(n: usize, weights: Vec<f64>, stream: &RngStream) -> Result<(SparseSymMatrix, SpectralModel)> {
    let k = weights.len();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let q = householder_qr(&gaussian_matrix(n, k, stream))?;

    // R = B·Bᵀ with B = Q·diag(√p); only i ≥ j is computed, then mirrored.
    let mut b = q.clone();
    for i in 0..n {
        for (v, p) in b.row_mut(i).iter_mut().zip(&probs) {
            *v *= p.sqrt();
        }
    }
    let mut d = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = dot(b.row(i), b.row(j));
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    let r = SparseSymMatrix::from_dense(&d)?;
    Ok((r, SpectralModel::new(probs, Some(q))?))
}

fn gaussian_matrix(rows: usize, cols: usize, stream: &RngStream) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    stream.sampler().fill_gaussian(m.as_mut_slice());
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_entropy;

    fn assert_density(r: &SparseSymMatrix) {
        assert!((r.trace() - 1.0).abs() <= 1e-10, "trace {}", r.trace());
        for (i, j, v) in r.triplets() {
            assert_eq!(r.get(j, i), Some(v));
        }
    }

    #[test]
    fn poisson_small_case() {
        let (r, m) = generate_tridiagonal_poisson(8).unwrap();
        assert_density(&r);
        let sum: f64 = m.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        assert!((m.entropy() - 1.8204105224212261).abs() < 1e-12);
        assert!((m.entropy() - 1.8204).abs() < 1e-4);
        assert!((m.p_max() - 0.24246157759823853).abs() < 1e-14);
        assert_eq!(r.nnz(), 3 * 8 - 2);
        assert!(generate_tridiagonal_poisson(1).is_err());
    }

    #[test]
    fn poisson_oracle_agrees_with_closed_form() {
        for n in [2usize, 9, 40] {
            let (r, m) = generate_tridiagonal_poisson(n).unwrap();
            let (_, oracle) = exact_entropy(&r).unwrap();
            for (a, b) in oracle.probs().iter().zip(m.probs()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn haar_like_is_psd_unit_trace() {
        let (r, model) = generate_haar_like_density(64, &RngStream::new(3, 0)).unwrap();
        assert_density(&r);
        let model = model.unwrap();
        assert!(model.p_min() >= -1e-10 * 64.0);
        let h = model.entropy();
        // Marchenko–Pastur at ratio 1 puts the entropy about 0.5 below ln n.
        assert!(h < 64f64.ln() && h > 64f64.ln() - 1.5, "h = {h}");
        let (r2, _) = generate_haar_like_density_with_limit(64, &RngStream::new(3, 0), 10).unwrap();
        assert_eq!(r, r2);
        assert!(generate_haar_like_density_with_limit(16, &RngStream::new(3, 0), 10).unwrap().1.is_none());
    }

    #[test]
    fn low_rank_spectra() {
        let s = RngStream::new(1, 5);
        let (r, m) = generate_low_rank_density(20, 4, Decay::Linear, &s).unwrap();
        assert_density(&r);
        let expected = [0.4, 0.3, 0.2, 0.1];
        for (a, b) in m.probs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let (_, oracle) = exact_entropy(&r).unwrap();
        assert!(oracle.probs()[4..].iter().all(|&p| p < 1e-10));

        let (r, m) = generate_low_rank_density(10, 3, Decay::Exponential, &s).unwrap();
        assert_density(&r);
        for (a, b) in m.probs().iter().zip([0.66524096, 0.24472847, 0.09003057]) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(generate_low_rank_density(3, 4, Decay::Linear, &s).is_err());
        assert!(generate_low_rank_density(3, 0, Decay::Linear, &s).is_err());
    }

    #[test]
    fn linear_plus_uniform_spectra() {
        let s = RngStream::new(2, 0);
        let (r, m) = generate_linear_plus_uniform(6, 2, &s).unwrap();
        assert_density(&r);
        let expected = [2.0, 1.0, 1.0, 1.0, 1.0, 1.0].map(|w| w / 7.0);
        for (a, b) in m.probs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(m.p_min() > 0.0);
        let (_, full) = generate_linear_plus_uniform(5, 5, &s).unwrap();
        let (_, lin) = generate_low_rank_density(5, 5, Decay::Linear, &s).unwrap();
        assert_eq!(full.probs(), lin.probs());
    }

    #[test]
    fn generators_are_deterministic() {
        let s = RngStream::new(7, 1);
        assert_eq!(
            generate_low_rank_density(12, 3, Decay::Exponential, &s).unwrap().0,
            generate_low_rank_density(12, 3, Decay::Exponential, &s).unwrap().0
        );
        assert_ne!(
            generate_low_rank_density(12, 3, Decay::Exponential, &s).unwrap().0,
            generate_low_rank_density(12, 3, Decay::Exponential, &RngStream::new(8, 1)).unwrap().0
        );
    }
}
