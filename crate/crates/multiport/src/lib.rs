//! Simulation and phase synthesis for multi-path interferometers built from
//! two symmetric multiports.
//!
//! The device modeled here generalizes the Mach-Zehnder interferometer to
//! `d` paths: a symmetric `d`-port splitter, one phase shifter per path, and
//! a second symmetric `d`-port. A single photon entering one input leaves in
//! a superposition over all outputs whose amplitudes are controlled entirely
//! by the intermediate phase shifts. This crate answers, exactly where
//! possible and numerically otherwise, the questions:
//!
//! - which output states and output probability distributions can such a
//!   device produce ([`feasibility`]),
//! - what phase shifts produce a given target ([`synthesis`]), and
//! - what multi-photon output states follow from Fock-state inputs
//!   ([`fock`]).
//!
//! # Example
//!
//! ```
//! use multiport::{output_amplitudes, PhaseVector};
//! use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
//!
//! // Three-port interferometer with the phase shifts that split a single
//! // photon evenly over all three outputs.
//! let lambda = PhaseVector::from_angles(&[FRAC_PI_2, -FRAC_PI_6, -FRAC_PI_6]).unwrap();
//! let c = output_amplitudes(&lambda, 0).unwrap();
//! for p in c.probabilities().as_slice() {
//!     assert!((p - 1.0 / 3.0).abs() < 1e-12);
//! }
//! ```
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.

pub mod error;
pub mod feasibility;
pub mod fock;
pub mod model;
pub mod sweep;
pub mod synthesis;
pub mod tolerances;

pub use error::Error;
pub use feasibility::{
    concurrence_inequalities, concurrence_matrix, exact_condition_residuals,
    exactly_producible, phase_modulus_residuals, polygon_inequalities, two_mode_only_possible,
    ConcurrenceMatrix, FeasibilityReport, PolygonMargin, ProductMargin, Verdict,
};
pub use fock::{
    propagate, propagate_with_limit, transfer_matrix, two_photon_target_basis,
    two_photon_same_port_conditions, two_photon_two_port_conditions, FockRecord, FockState,
    FockVector, TransferMatrix, DEFAULT_MAX_PHOTONS,
};
pub use model::{
    dft_matrix, interferometer, output_amplitudes, phases_for_state, AmplitudeVector, Dimension,
    MatrixRole, PhaseRecovery, PhaseVector, ProbabilityDistribution, UnitaryMatrix,
};
pub use synthesis::{
    check_single_photon_distribution, synthesize, synthesize_from_amplitudes, synthesize_search,
    synthesize_three_port, triangle_angles, SearchConfig, SynthesisMethod, SynthesisOutcome,
    SynthesisResult, TriangleAngles,
};
