//! Numerical tolerances used across the crate.
//!
//! Constructors and verdicts never compare floats exactly; every threshold
//! they use is named here so that verdicts are consistent across modules.

/// Constructor tolerance: `|λ_k| = 1` for phase vectors and `Σ|c_m|² = 1`
/// for amplitude vectors must hold this tightly before the constructor
/// snaps them to exact normalization.
pub const CONSTRUCTION: f64 = 1e-12;

/// Frobenius-norm tolerance for `M·M† = I` on unitary matrices.
pub const UNITARITY: f64 = 1e-10;

/// Probability distributions must sum to 1 within this.
pub const DISTRIBUTION_SUM: f64 = 1e-10;

/// Default feasibility epsilon: applied to exact-condition residual
/// magnitudes and to `||λ_k| − 1|` in phase recovery. Overridable per call.
pub const FEASIBILITY: f64 = 1e-9;

/// Polygon-inequality margins may dip this far below zero before they count
/// as violations (absorbs roundoff in the products of magnitudes).
pub const POLYGON_MARGIN: f64 = 1e-12;

/// Magnitudes below this are treated as exact zeros in degenerate-case
/// logic (single-mode outputs, vanishing two-photon coefficients).
pub const ZERO_MAGNITUDE: f64 = 1e-12;

/// Cosine-rule arguments may exceed `[−1, 1]` by at most this before
/// clamping; a larger excursion means the input was inconsistent, not
/// rounded.
pub const COSINE_CLAMP: f64 = 1e-12;

/// Norm tolerance on propagated Fock vectors.
pub const FOCK_NORM: f64 = 1e-10;

/// A search whose best residual exceeds this is reported as not-found.
/// Not-found is evidence of likely infeasibility, never a proof.
pub const NOT_FOUND_RESIDUAL: f64 = 1e-6;
