//! Random-projection entropy estimation for low-rank density matrices.
//!
//! The sketch `R̃ = R·Π` has (approximately) the nonzero eigenvalues of `R`
//! as its singular values, so the entropy of the top `k` singular values
//! estimates `H(R)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::densmat::SparseSymMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{entropy_from_probs, thin_singular_values, DenseMatrix};
use crate::rng::RngStream;

/// Singular values at or below this are treated as zero probabilities.
pub const SKETCH_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    Gaussian,
    Srht,
    CountSketch,
    /// `Π = I`; reproduces the exact spectrum. For testing.
    ExactDebug,
}

impl ProjectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProjectionKind::Gaussian => "gaussian",
            ProjectionKind::Srht => "srht",
            ProjectionKind::CountSketch => "countsketch",
            ProjectionKind::ExactDebug => "exact",
        }
    }
}

impl fmt::Display for ProjectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProjectionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(ProjectionKind::Gaussian),
            "srht" => Ok(ProjectionKind::Srht),
            "countsketch" => Ok(ProjectionKind::CountSketch),
            "exact" | "exact_debug" => Ok(ProjectionKind::ExactDebug),
            other => Err(invalid(format!("unknown projection '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSpec {
    pub kind: ProjectionKind,
    /// Sketch width; ignored by [`ProjectionKind::ExactDebug`].
    pub s: usize,
    pub stream: RngStream,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SketchSpectrum {
    pub probs_tilde: Vec<f64>,
    pub entropy_tilde: f64,
    pub kind: ProjectionKind,
    pub s: usize,
}

/// Normalized Walsh–Hadamard transform, `x ← H·x` with `HᵀH = I`.
pub fn fwht_inplace(x: &mut [f64]) -> Result<()> {
    let n = x.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    fwht_unchecked(x);
    Ok(())
}

fn fwht_unchecked(x: &mut [f64]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (p, q) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*p + *q, *p - *q);
                *p = s;
                *q = d;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for v in x.iter_mut() {
        *v *= scale;
    }
}

fn check_width(s: usize) -> Result<()> {
    if s == 0 {
        return Err(invalid("sketch width s must be at least 1"));
    }
    Ok(())
}

/// `Π = G/√s`, n×s, with `G` filled row by row from one sampler.
pub fn gaussian_projection(n: usize, s: usize, stream: &RngStream) -> Result<DenseMatrix> {
    check_width(s)?;
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut pi = DenseMatrix::zeros(n, s);
    stream.sampler().fill_gaussian(pi.as_mut_slice());
    let scale = 1.0 / (s as f64).sqrt();
    for v in pi.as_mut_slice() {
        *v *= scale;
    }
    Ok(pi)
}

/// `R·(G/√s)`.
pub fn apply_gaussian(r: &SparseSymMatrix, s: usize, stream: &RngStream) -> Result<DenseMatrix> {
    let pi = gaussian_projection(r.dim(), s, stream)?;
    Ok(sparse_times_dense(r, &pi))
}

/// Random parts of an SRHT: `Π = √(n′/s)·D·H·S` on the padded dimension.
struct Srht {
    padded: usize,
    signs: Vec<f64>,
    samples: Vec<usize>,
    scale: f64,
}

impl Srht {
    /// Draw order: `n′` signs, then `s` sampled coordinates.
    fn draw(n: usize, s: usize, stream: &RngStream) -> Result<Self> {
        check_width(s)?;
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let padded = n.next_power_of_two();
        let mut sampler = stream.sampler();
        let signs = (0..padded).map(|_| sampler.sign()).collect();
        let samples = (0..s).map(|_| sampler.index(padded)).collect();
        Ok(Self { padded, signs, samples, scale: (padded as f64 / s as f64).sqrt() })
    }

    /// `row · Π` for a dense row of length `n′`, consuming the buffer.
    fn apply_row(&self, buf: &mut [f64], out: &mut [f64]) {
        for (v, d) in buf.iter_mut().zip(&self.signs) {
            *v *= d;
        }
        fwht_unchecked(buf);
        for (o, &c) in out.iter_mut().zip(&self.samples) {
            *o = self.scale * buf[c];
        }
    }
}

/// The explicit `n′×s` SRHT matrix for dimension `n` (padded to `n′`).
pub fn srht_projection(n: usize, s: usize, stream: &RngStream) -> Result<DenseMatrix> {
    let t = Srht::draw(n, s, stream)?;
    let mut pi = DenseMatrix::zeros(t.padded, s);
    let mut buf = vec![0.0; t.padded];
    for i in 0..t.padded {
        buf.iter_mut().for_each(|v| *v = 0.0);
        buf[i] = 1.0;
        t.apply_row(&mut buf, pi.row_mut(i));
    }
    Ok(pi)
}

/// `R·Π` for an SRHT `Π`; rows of `R` are zero-padded to `n′` and
/// transformed independently, so the cost is `O(n·n′ log n′)`.
pub fn apply_srht(r: &SparseSymMatrix, s: usize, stream: &RngStream) -> Result<DenseMatrix> {
    let n = r.dim();
    let t = Srht::draw(n, s, stream)?;
    let mut out = DenseMatrix::zeros(n, s);
    out.as_mut_slice().par_chunks_mut(s).enumerate().for_each_init(
        || vec![0.0; t.padded],
        |buf, (i, row_out)| {
            buf.iter_mut().for_each(|v| *v = 0.0);
            let (cols, vals) = r.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                buf[j] = v;
            }
            t.apply_row(buf, row_out);
        },
    );
    Ok(out)
}

/// Bucket and sign for each input coordinate. Draw order: `n` buckets,
/// then `n` signs.
struct CountSketch {
    buckets: Vec<usize>,
    signs: Vec<f64>,
}

impl CountSketch {
    fn draw(n: usize, s: usize, stream: &RngStream) -> Result<Self> {
        check_width(s)?;
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut sampler = stream.sampler();
        let buckets = (0..n).map(|_| sampler.index(s)).collect();
        let signs = (0..n).map(|_| sampler.sign()).collect();
        Ok(Self { buckets, signs })
    }
}

/// The explicit n×s CountSketch matrix.
pub fn countsketch_projection(n: usize, s: usize, stream: &RngStream) -> Result<DenseMatrix> {
    let c = CountSketch::draw(n, s, stream)?;
    let mut pi = DenseMatrix::zeros(n, s);
    for t in 0..n {
        pi[(t, c.buckets[t])] = c.signs[t];
    }
    Ok(pi)
}

/// `R·Π` for a CountSketch `Π` in `O(nnz(R))`: each stored `R_ij` is added
/// with sign `D_j` into column `h(j)` of row `i`.
pub fn apply_countsketch(r: &SparseSymMatrix, s: usize, stream: &RngStream) -> Result<DenseMatrix> {
    let c = CountSketch::draw(r.dim(), s, stream)?;
    let mut out = DenseMatrix::zeros(r.dim(), s);
    out.as_mut_slice().par_chunks_mut(s).enumerate().for_each(|(i, row_out)| {
        let (cols, vals) = r.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            row_out[c.buckets[j]] += c.signs[j] * v;
        }
    });
    Ok(out)
}

fn sparse_times_dense(r: &SparseSymMatrix, b: &DenseMatrix) -> DenseMatrix {
    let s = b.cols();
    let mut out = DenseMatrix::zeros(r.dim(), s);
    out.as_mut_slice().par_chunks_mut(s).enumerate().for_each(|(i, row_out)| {
        let (cols, vals) = r.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            for (o, &bj) in row_out.iter_mut().zip(b.row(j)) {
                *o += v * bj;
            }
        }
    });
    out
}

/// Sketch width with constant 1: `⌈(k + ⌈ln n⌉)·max(1, ⌈ln k⌉)/ε²⌉` for
/// Gaussian and SRHT, `⌈k²/ε²⌉` for CountSketch, capped at `n`.
pub fn default_s_sketch(kind: ProjectionKind, n: usize, k: usize, epsilon: f64) -> Result<usize> {
    default_s_sketch_scaled(kind, n, k, epsilon, 1.0)
}

/// As [`default_s_sketch`] with the leading constant replaced by `constant`.
pub fn default_s_sketch_scaled(kind: ProjectionKind, n: usize, k: usize, epsilon: f64, constant: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if k == 0 {
        return Err(invalid("rank k must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(invalid(format!("sketch constant must be positive, got {constant}")));
    }
    let kf = k as f64;
    let base = match kind {
        ProjectionKind::Gaussian | ProjectionKind::Srht => {
            (kf + (n as f64).ln().ceil()) * kf.ln().ceil().max(1.0) / (epsilon * epsilon)
        }
        ProjectionKind::CountSketch => kf * kf / (epsilon * epsilon),
        ProjectionKind::ExactDebug => return Ok(n),
    };
    Ok(((constant * base).ceil() as usize).clamp(1, n))
}

/// Top-`k` singular values of `R·Π` and their entropy.
pub fn sketch_entropy(r: &SparseSymMatrix, k: usize, spec: &ProjectionSpec) -> Result<SketchSpectrum> {
    let sketch = match spec.kind {
        ProjectionKind::Gaussian => apply_gaussian(r, spec.s, &spec.stream)?,
        ProjectionKind::Srht => apply_srht(r, spec.s, &spec.stream)?,
        ProjectionKind::CountSketch => apply_countsketch(r, spec.s, &spec.stream)?,
        ProjectionKind::ExactDebug => r.to_dense(),
    };
    let s = sketch.cols();
    if k == 0 || k > r.dim().min(s) {
        return Err(invalid(format!("rank k = {k} must lie in 1..={}", r.dim().min(s))));
    }
    let probs_tilde = thin_singular_values(&sketch, k)?;
    let entropy_tilde = entropy_from_probs(&probs_tilde, SKETCH_CLAMP)?;
    Ok(SketchSpectrum { probs_tilde, entropy_tilde, kind: spec.kind, s })
}
