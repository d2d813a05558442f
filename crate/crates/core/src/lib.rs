//! Exact simulation of Bell-state synthesis on a two-spin NMR processor by
//! generalized amplitude amplification.
//!
//! - [`linalg`]: dense complex operators, states and deviation densities.
//! - [`grover`]: the dimension-generic `Q = −I_s U† I_t U` engine and the
//!   tabulated two-spin presets.
//! - [`nmr`]: pulses, coupling and Zeeman propagators, gradient crushers and
//!   compiled pulse sequences.
//! - [`spectra`]: peak tables, reference-phase calibration, classification
//!   and Lorentzian rendering.
//! - [`fixtures`]: the reference matrices every check compares against.

pub mod error;
pub mod fixtures;
pub mod grover;
pub mod linalg;
pub mod nmr;
pub mod spectra;

pub use error::{Error, Result};
pub use linalg::{
    adjoint, equiv_deviation, fidelity, fit_deviation, kron, phase_equal, Apply, DeviationDensity,
    DeviationFit, Operator, StateVector, C64, DEFAULT_TOL, STRICT_TOL,
};
