//! Randomized estimators for the von Neumann entropy `H(R) = −tr(R ln R)`
//! of large sparse density matrices.
//!
//! Three estimators are provided:
//!
//! * [`taylor`]: a truncated Taylor series of `ln` around an upper bound
//!   `u ≥ p₁`, with a Gaussian trace estimator;
//! * [`chebyshev`]: a Chebyshev expansion of `x ln x` on `[0, u]`,
//!   evaluated per probe with Clenshaw's recurrence;
//! * [`sketch`]: singular values of a random projection `R·Π` for
//!   low-rank `R`.
//!
//! [`linalg::exact_entropy`] is the dense ground truth. All randomness comes
//! from [`rng::RngStream`], so every result is a pure function of its seed
//! and independent of the thread count.

pub mod chebyshev;
pub mod densmat;
pub mod error;
pub mod estimator;
pub mod hutchinson;
pub mod linalg;
pub mod power;
pub mod report;
pub mod rng;
pub mod sketch;
pub mod taylor;

pub use chebyshev::{
    cheb_coefficients, cheb_quadratic_form, cheb_scalar_eval, chebyshev_entropy, chebyshev_entropy_with_model,
    default_m_cheb, ChebCoefficients,
};
pub use densmat::{SparseSymMatrix, SpectralModel};
pub use error::{Error, Result};
pub use estimator::EstimatorConfig;
pub use hutchinson::{default_s, estimate_trace, QuadraticForm};
pub use linalg::{entropy_from_probs, exact_entropy, DenseMatrix};
pub use power::{default_power_params, estimate_u, power_method, PowerEstimate, UEstimate, UMode};
pub use report::{check_assumptions, relative_error, AssumptionCheck, EstimateReport, Method, TriState};
pub use rng::RngStream;
pub use sketch::{default_s_sketch, sketch_entropy, ProjectionKind, ProjectionSpec, SketchSpectrum};
pub use taylor::{default_m_taylor, taylor_entropy, taylor_entropy_with_model, taylor_quadratic_form};
