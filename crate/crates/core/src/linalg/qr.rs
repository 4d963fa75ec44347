use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Thin orthonormal factor `Q` (n×k) of `A = QR` by Householder reflections.
///
/// Fails with [`Error::RankDeficient`] when a trailing column norm drops
/// below `1e-12·‖A‖_F`.
pub fn householder_qr(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, k) = (a.rows(), a.cols());
    if k == 0 || n == 0 {
        return Err(Error::EmptyDimension);
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("householder_qr needs rows >= cols, got {n}x{k}")));
    }
    let tol = 1e-12 * a.frobenius_norm();
    // Column-contiguous working copy: cols[c][i] = A[i, c].
    let at = a.transpose();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|c| at.row(c).to_vec()).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);

    for j in 0..k {
        let norm = cols[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= tol || norm == 0.0 {
            return Err(Error::RankDeficient { column: j, pivot_norm: norm });
        }
        let alpha = if cols[j][j] >= 0.0 { -norm } else { norm };
        let mut v = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in &mut v {
            *t /= vnorm;
        }
        for col in cols.iter_mut().skip(j) {
            reflect(&v, &mut col[j..]);
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 … H_{k-1} [I_k; 0]
    let mut qcols: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            e
        })
        .collect();
    for (j, v) in reflectors.iter().enumerate().rev() {
        for col in qcols.iter_mut() {
            reflect(v, &mut col[j..]);
        }
    }
    let mut q = DenseMatrix::zeros(n, k);
    for (c, col) in qcols.iter().enumerate() {
        for (i, &val) in col.iter().enumerate() {
            q[(i, c)] = val;
        }
    }
    Ok(q)
}

/// x ← (I − 2vvᵀ)x for unit v.
fn reflect(v: &[f64], x: &mut [f64]) {
    let proj: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    if proj == 0.0 {
        return;
    }
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= 2.0 * vi * proj;
    }
}
