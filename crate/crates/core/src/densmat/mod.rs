//! Density matrices: sparse symmetric storage, ground-truth spectra,
//! generators for the benchmark families, and Matrix Market persistence.

mod generators;
mod matrix_market;

pub use generators::{
    generate_haar_like_density, generate_haar_like_density_with_limit, generate_linear_plus_uniform,
    generate_low_rank_density, generate_tridiagonal_poisson, generate_with_spectrum, poisson_spectrum, Decay,
};
pub use matrix_market::{
    read_matrix_market, read_matrix_market_from, read_spectrum, write_matrix_market, write_matrix_market_to,
    write_spectrum,
};

use crate::error::{Error, Result};
use crate::linalg::{entropy_from_probs, DenseMatrix, EXACT_CLAMP};

/// Tolerance for the unit-trace check on density matrices.
pub const TRACE_TOL: f64 = 1e-10;

/// Symmetric matrix in compressed sparse row form with both triangles stored.
///
/// Column indices are sorted within each row and every stored `(i, j)` has
/// a stored `(j, i)` with the identical value.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from `(row, col, value)` triplets listing both triangles.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        for &(row, col, v) in &triplets {
            if row >= n || col >= n {
                return Err(Error::IndexOutOfRange { row, col, n });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        if let Some(w) = triplets.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEntry { row: w[0].0, col: w[0].1 });
        }
        let mut row_offsets = vec![0usize; n + 1];
        for &(row, _, _) in &triplets {
            row_offsets[row + 1] += 1;
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let m = Self {
            n,
            row_offsets,
            col_indices: triplets.iter().map(|t| t.1).collect(),
            values: triplets.iter().map(|t| t.2).collect(),
        };
        m.check_symmetry()?;
        Ok(m)
    }

    /// Stores every nonzero entry of a dense symmetric matrix.
    pub fn from_dense(d: &DenseMatrix) -> Result<Self> {
        if d.rows() != d.cols() {
            return Err(Error::DimensionMismatch { expected: d.rows(), found: d.cols() });
        }
        let n = d.rows();
        let mut triplets = Vec::new();
        for i in 0..n {
            for (j, &v) in d.row(i).iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, triplets)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![scale; n],
        }
    }

    /// All-zero matrix with no stored entries.
    pub fn zeros(n: usize) -> Self {
        Self { n, row_offsets: vec![0; n + 1], col_indices: Vec::new(), values: Vec::new() }
    }

    fn check_symmetry(&self) -> Result<()> {
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j == i {
                    continue;
                }
                match self.get(j, i) {
                    Some(w) if w == v => {}
                    _ => return Err(Error::NotSymmetric { row: i, col: j }),
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// `(i, j, value)` for every stored entry, row by row.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: y.len() });
        }
        self.apply(x, y);
        Ok(())
    }

    /// `y ← R·x` without dimension checks.
    #[inline]
    pub(crate) fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for (&j, &v) in self.col_indices[a..b].iter().zip(&self.values[a..b]) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).filter_map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Fails unless the trace is within [`TRACE_TOL`] of one.
    pub fn check_unit_trace(&self) -> Result<()> {
        let t = self.trace();
        if (t - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace is {t}, expected 1")));
        }
        Ok(())
    }
}

/// Ground-truth probabilities (descending) and optionally the basis of
/// pure states they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    probs: Vec<f64>,
    basis: Option<DenseMatrix>,
}

impl SpectralModel {
    /// Validates and sorts descending (stable, so ties keep input order).
    /// When a basis is supplied its columns follow the probabilities.
    pub fn new(probs: Vec<f64>, basis: Option<DenseMatrix>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if let Some((i, &p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidSpectrum(format!("probability {p} at index {i}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidSpectrum(format!("probabilities sum to {total}")));
        }
        let mut order: Vec<usize> = (0..probs.len()).collect();
        order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
        let sorted: Vec<f64> = order.iter().map(|&i| probs[i]).collect();
        let basis = match basis {
            None => None,
            Some(psi) => {
                if psi.cols() != probs.len() {
                    return Err(Error::DimensionMismatch { expected: probs.len(), found: psi.cols() });
                }
                let dev = psi.gram().max_abs_diff(&DenseMatrix::identity(psi.cols()));
                if dev > 1e-8 {
                    return Err(Error::InvalidSpectrum(format!("basis is not orthonormal (deviation {dev:e})")));
                }
                let mut permuted = DenseMatrix::zeros(psi.rows(), psi.cols());
                for (dst, &src) in order.iter().enumerate() {
                    for i in 0..psi.rows() {
                        permuted[(i, dst)] = psi[(i, src)];
                    }
                }
                Some(permuted)
            }
        };
        Ok(Self { probs: sorted, basis })
    }

    pub(crate) fn from_descending_unchecked(probs: Vec<f64>) -> Self {
        Self { probs, basis: None }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn basis(&self) -> Option<&DenseMatrix> {
        self.basis.as_ref()
    }

    /// Largest probability `p₁`.
    pub fn p_max(&self) -> f64 {
        self.probs[0]
    }

    /// Smallest probability (zero for rank-deficient spectra).
    pub fn p_min(&self) -> f64 {
        *self.probs.last().expect("nonempty spectrum")
    }

    /// Number of probabilities above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.probs.iter().filter(|&&p| p > threshold).count()
    }

    pub fn entropy(&self) -> f64 {
        entropy_from_probs(&self.probs, EXACT_CLAMP).expect("validated spectrum")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_vector, RngStream};
    use proptest::prelude::*;

    #[test]
    fn identity_and_zero_matvec() {
        let i3 = SparseSymMatrix::scaled_identity(3, 1.0);
        assert_eq!(i3.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let z = SparseSymMatrix::zeros(3);
        assert_eq!(z.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(i3.matvec(&[1.0]), Err(Error::DimensionMismatch { expected: 3, found: 1 })));
    }

    #[test]
    fn random_matvec_matches_dense() {
        let n = 16;
        let g = gaussian_vector(&RngStream::new(8, 0), n * n + n).unwrap();
        let mut d = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                d[(i, j)] = g[i * n + j];
                d[(j, i)] = g[i * n + j];
            }
        }
        let x = &g[n * n..];
        let r = SparseSymMatrix::from_dense(&d).unwrap();
        let y = r.matvec(x).unwrap();
        let yd = d.matvec(x).unwrap();
        for (a, b) in y.iter().zip(&yd) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn asymmetric_triplets_rejected() {
        let err = SparseSymMatrix::from_triplets(2, vec![(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        let err = SparseSymMatrix::from_triplets(2, vec![(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        let err = SparseSymMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { .. }));
        let err = SparseSymMatrix::from_triplets(2, vec![(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
    }

    #[test]
    fn spectral_model_validation() {
        let m = SpectralModel::new(vec![0.2, 0.5, 0.3], None).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.3, 0.2]);
        assert_eq!(m.p_max(), 0.5);
        assert_eq!(m.p_min(), 0.2);
        assert!(SpectralModel::new(vec![0.5, 0.6], None).is_err());
        assert!(SpectralModel::new(vec![1.1, -0.1], None).is_err());
        let psi = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!(SpectralModel::new(vec![0.5, 0.5], Some(psi)).is_err());
    }

    #[test]
    fn spectral_model_permutes_basis_columns() {
        let psi = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let m = SpectralModel::new(vec![0.25, 0.75], Some(psi)).unwrap();
        let b = m.basis().unwrap();
        assert_eq!(b[(1, 0)], 1.0);
        assert_eq!(b[(0, 1)], 1.0);
    }

    proptest! {
        #[test]
        fn matvec_linear(vals in prop::collection::vec(-5.0f64..5.0, 10), a in -3.0f64..3.0) {
            // 4x4 symmetric from the first 10 values (lower triangle).
            let mut d = DenseMatrix::zeros(4, 4);
            let mut k = 0;
            for i in 0..4 {
                for j in 0..=i {
                    d[(i, j)] = vals[k];
                    d[(j, i)] = vals[k];
                    k += 1;
                }
            }
            let r = SparseSymMatrix::from_dense(&d).unwrap();
            let x = [1.0, -2.0, 0.5, 3.0];
            let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
            let y1 = r.matvec(&ax).unwrap();
            let y2 = r.matvec(&x).unwrap();
            for (p, q) in y1.iter().zip(&y2) {
                prop_assert!((p - a * q).abs() <= 1e-12 * (1.0 + q.abs() * a.abs()));
            }
        }
    }
}
