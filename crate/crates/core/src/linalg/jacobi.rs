use super::dense::DenseMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order; `vectors` holds the matching
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<DenseMatrix>,
}

/// Cyclic Jacobi eigensolver for dense symmetric matrices.
///
/// Sweeps visit every off-diagonal pair once using a round-robin
/// (tournament) ordering: each round holds `n/2` disjoint pairs whose
/// rotations commute, so a round is applied as one pass over rows followed
/// by one pass over columns. Iteration stops once the off-diagonal
/// Frobenius norm is at most `1e-12·‖A‖_F`.
pub fn jacobi_eigh(a: &DenseMatrix) -> Result<SymmetricEigen> {
    run(a, true)
}

/// Same as [`jacobi_eigh`] without accumulating eigenvectors.
pub fn jacobi_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    run(a, false).map(|e| e.values)
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
}

fn run(a: &DenseMatrix, want_vectors: bool) -> Result<SymmetricEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.cols() });
    }
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let scale = a.max_abs();
    let mut w = a.clone();
    for i in 0..n {
        for j in 0..i {
            let (x, y) = (a[(i, j)], a[(j, i)]);
            if (x - y).abs() > 1e-10 * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
            let avg = 0.5 * (x + y);
            w[(i, j)] = avg;
            w[(j, i)] = avg;
        }
    }

    let norm = w.frobenius_norm();
    let target = 1e-12 * norm;
    let skip = 1e-18 * norm;
    let mut vt = want_vectors.then(|| DenseMatrix::identity(n));
    let players = n + n % 2;
    let mut rotations = Vec::with_capacity(players / 2);
    let mut converged = false;

    for _sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&w) <= target {
            converged = true;
            break;
        }
        for round in 0..players.saturating_sub(1) {
            rotations.clear();
            for slot in 0..players / 2 {
                let (x, y) = round_robin_pair(players, round, slot);
                let (p, q) = (x.min(y), x.max(y));
                if q >= n {
                    continue;
                }
                let apq = w[(p, q)];
                if apq.abs() <= skip {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                rotations.push(Rotation { p, q, c, s: t * c });
            }
            if rotations.is_empty() {
                continue;
            }
            rotate_rows(&mut w, &rotations);
            for i in 0..n {
                let row = w.row_mut(i);
                for r in &rotations {
                    let (x, y) = (row[r.p], row[r.q]);
                    row[r.p] = r.c * x - r.s * y;
                    row[r.q] = r.s * x + r.c * y;
                }
            }
            for r in &rotations {
                w[(r.p, r.q)] = 0.0;
                w[(r.q, r.p)] = 0.0;
            }
            if let Some(vt) = vt.as_mut() {
                rotate_rows(vt, &rotations);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, residual: off_diagonal_norm(&w) });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].total_cmp(&w[(j, j)]));
    let values = order.iter().map(|&i| w[(i, i)]).collect();
    let vectors = vt.map(|vt| {
        let mut v = DenseMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            for (i, &x) in vt.row(src).iter().enumerate() {
                v[(i, col)] = x;
            }
        }
        v
    });
    Ok(SymmetricEigen { values, vectors })
}

/// Rows p, q ← (c·p − s·q, s·p + c·q) for every rotation.
fn rotate_rows(m: &mut DenseMatrix, rotations: &[Rotation]) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    for r in rotations {
        let (head, tail) = data.split_at_mut(r.q * cols);
        let rp = &mut head[r.p * cols..(r.p + 1) * cols];
        let rq = &mut tail[..cols];
        for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
            let (a, b) = (*x, *y);
            *x = r.c * a - r.s * b;
            *y = r.s * a + r.c * b;
        }
    }
}

/// Circle-method schedule: player 0 fixed, the rest rotate one seat per round.
fn round_robin_pair(players: usize, round: usize, slot: usize) -> (usize, usize) {
    let ring = players - 1;
    let seat = |pos: usize| if pos == 0 { 0 } else { (pos - 1 + round) % ring + 1 };
    (seat(slot), seat(players - 1 - slot))
}

pub(crate) fn off_diagonal_norm(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for (j, v) in m.row(i).iter().enumerate() {
            if i != j {
                acc += v * v;
            }
        }
    }
    acc.sqrt()
}
