//! Power method for the largest probability `p₁` and the upper bound `u`
//! fed to the polynomial estimators.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::densmat::SparseSymMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::dot;
use crate::rng::{rademacher_vector, RngStream};

/// Norms at or below this mark a trial as degenerate.
const DEGENERATE_NORM: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub p1_tilde: f64,
    pub t: usize,
    pub q: usize,
}

/// `q` independent trials of `t` power iterations from Rademacher starts,
/// returning the largest Rayleigh quotient.
///
/// Trial `j` draws its start vector from `stream.derive(j)`. The iterate is
/// renormalized after every product, which leaves the Rayleigh quotient
/// unchanged while keeping the entries representable. A trial whose
/// iterate vanishes contributes 0.
pub fn power_method(r: &SparseSymMatrix, t: usize, q: usize, stream: &RngStream) -> Result<PowerEstimate> {
    if t == 0 || q == 0 {
        return Err(invalid(format!("power method needs t >= 1 and q >= 1, got t={t}, q={q}")));
    }
    let n = r.dim();
    let candidates: Vec<f64> = (0..q as u64)
        .into_par_iter()
        .map(|j| {
            let mut x = rademacher_vector(&stream.derive(j), n).expect("n >= 1");
            let mut y = vec![0.0; n];
            for _ in 0..t {
                r.apply(&x, &mut y);
                let norm = dot(&y, &y).sqrt();
                if norm <= DEGENERATE_NORM {
                    return 0.0;
                }
                for (xi, yi) in x.iter_mut().zip(&y) {
                    *xi = yi / norm;
                }
            }
            r.apply(&x, &mut y);
            dot(&x, &y) / dot(&x, &x)
        })
        .collect();
    let p1_tilde = candidates.into_iter().fold(0.0, f64::max);
    Ok(PowerEstimate { p1_tilde, t, q })
}

/// `(t, q)` with `t = ⌈ln √(4n)⌉` and `q = ⌈4.82 ln(1/δ)⌉`, both at least 1.
pub fn default_power_params(n: usize, delta: f64) -> Result<(usize, usize)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let t = (4.0 * n as f64).sqrt().ln().ceil().max(1.0) as usize;
    let q = (4.82 * (1.0 / delta).ln()).ceil().max(1.0) as usize;
    Ok((t, q))
}

/// How the upper bound `u ≥ p₁` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UMode {
    /// `min(1, 6·p̃₁)`, backed by the power-method lower bound.
    SixTimesPower,
    /// `min(1, p̃₁)`. Heuristic: no per-run guarantee that `u ≥ p₁`.
    PowerRaw,
    /// A fixed value in `(0, 1]`.
    Manual(f64),
}

impl fmt::Display for UMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UMode::SixTimesPower => f.write_str("six"),
            UMode::PowerRaw => f.write_str("raw"),
            UMode::Manual(v) => write!(f, "manual:{v}"),
        }
    }
}

impl FromStr for UMode {
    type Err = Error;

    /// Accepts `six`, `raw` or `manual:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "six" => Ok(UMode::SixTimesPower),
            "raw" => Ok(UMode::PowerRaw),
            _ => {
                let v = s
                    .strip_prefix("manual:")
                    .ok_or_else(|| invalid(format!("unknown u mode '{s}' (expected six, raw or manual:<v>)")))?;
                let v: f64 = v.parse().map_err(|_| invalid(format!("bad manual u value '{v}'")))?;
                let mode = UMode::Manual(v);
                mode.validate()?;
                Ok(mode)
            }
        }
    }
}

impl UMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            UMode::Manual(v) if !(v > 0.0 && v <= 1.0) => Err(invalid(format!("manual u must lie in (0, 1], got {v}"))),
            _ => Ok(()),
        }
    }

    pub fn is_heuristic(&self) -> bool {
        matches!(self, UMode::PowerRaw)
    }
}

/// Chosen `u` plus the power-method run behind it (absent for manual mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UEstimate {
    pub u: f64,
    pub power: Option<PowerEstimate>,
}

pub fn estimate_u(r: &SparseSymMatrix, delta: f64, mode: UMode, stream: &RngStream) -> Result<UEstimate> {
    mode.validate()?;
    if let UMode::Manual(u) = mode {
        return Ok(UEstimate { u, power: None });
    }
    let (t, q) = default_power_params(r.dim(), delta)?;
    let power = power_method(r, t, q, stream)?;
    Ok(UEstimate { u: u_from_p1(power.p1_tilde, mode)?, power: Some(power) })
}

/// Maps a power-method estimate to `u` under a non-manual mode.
pub fn u_from_p1(p1_tilde: f64, mode: UMode) -> Result<f64> {
    let u = match mode {
        UMode::SixTimesPower => (6.0 * p1_tilde).min(1.0),
        UMode::PowerRaw => p1_tilde.min(1.0),
        UMode::Manual(v) => v,
    };
    if !(u > 0.0) {
        return Err(invalid(format!("power method returned p1 estimate {p1_tilde}; cannot form u")));
    }
    Ok(u)
}
