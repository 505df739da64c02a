//! Crate-wide error type.

use thiserror::Error;

/// Errors from constructors and operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Interferometers need at least two ports.
    #[error("dimension too small: need d >= 2, got {d}")]
    DimensionTooSmall { d: usize },
    /// A phase-shift entry was not on the unit circle.
    #[error("phase shift {index} has modulus {modulus}, expected 1 within tolerance")]
    NotUnitModulus { index: usize, modulus: f64 },
    /// An amplitude vector was not normalized.
    #[error("amplitude vector has squared norm {norm_sqr}, expected 1 within tolerance")]
    NotNormalized { norm_sqr: f64 },
    /// A probability was negative.
    #[error("probability {index} is negative: {value}")]
    NegativeProbability { index: usize, value: f64 },
    /// Probabilities did not sum to one.
    #[error("probabilities sum to {sum}, expected 1 within tolerance")]
    DistributionSum { sum: f64 },
    /// A matrix failed the unitarity check.
    #[error("matrix is not unitary: Frobenius defect {defect}")]
    NotUnitary { defect: f64 },
    /// A matrix was not square.
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    /// Input port index outside `0..d`.
    #[error("input port {port} out of range for {dim} ports")]
    PortOutOfRange { port: usize, dim: usize },
    /// Mode indices must satisfy `0 <= a < b < d`.
    #[error("mode pair ({a}, {b}) out of range for {dim} modes (need a < b < d)")]
    ModePairOutOfRange { a: usize, b: usize, dim: usize },
    /// A vector had the wrong number of entries.
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// The cosine rule needs all three magnitudes strictly positive.
    #[error("magnitude {index} vanishes; triangle angles are undefined")]
    DegenerateMagnitude { index: usize },
    /// Side lengths that cannot close into a triangle.
    #[error("triangle inequality violated: {detail}")]
    TriangleViolation { detail: String },
    /// A cosine-rule argument outside `[-1, 1]` beyond the clamping window.
    #[error("cosine argument {value} outside [-1, 1] beyond roundoff; inconsistent magnitudes")]
    CosineOutOfRange { value: f64 },
    /// Total photon number above the configured limit.
    #[error("photon number {photons} exceeds the configured maximum {max}")]
    PhotonLimitExceeded { photons: usize, max: usize },
    /// Bad search configuration.
    #[error("invalid search configuration: {reason}")]
    InvalidSearchConfig { reason: String },
    /// A sweep grid larger than the configured cap.
    #[error("sweep grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },
    /// An internal numerical consistency check failed.
    #[error("numerical inconsistency in {context}: deviation {deviation}")]
    NumericalInconsistency { context: &'static str, deviation: f64 },
}
