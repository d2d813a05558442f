//! Two-spin pulse-level simulation in the doubly rotating frame.
//!
//! Spin 1 is the heteronucleus (¹³C), spin 2 the proton. Rotations follow the
//! convention `X_k(φ) = exp(+iφ I_x^k)`, `Y_k(φ) = exp(+iφ I_y^k)`; a pulse is
//! specified by its net rotation angle (the product of field strength,
//! gyromagnetic ratio and pulse width is not modeled).

mod compile;
mod propagators;
mod sequence;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, DeviationDensity, Operator, C64};

pub use compile::{
    compile_grover, compile_sign_flip_marked, compile_sign_flip_source,
    compile_sign_flip_source_at, compile_unitary, preparation_angle, pseudo_pure_sequence, readout,
    readout_pulse, CompiledGrover,
};
pub use propagators::{full_evolution, j_evolution, rotation_pulse, rotation_pulse_with};
pub use sequence::{
    apply_sequence, gradient_crush, net_propagator, Delay, DelayDuration, Pulse, PulseSequence,
    SequenceElement, Simulator,
};

/// Carbon-13 Larmor frequency of the chloroform sample, Hz.
pub const CARBON_FREQUENCY_HZ: f64 = 125.76e6;
/// Proton Larmor frequency of the chloroform sample, Hz.
pub const PROTON_FREQUENCY_HZ: f64 = 500.13e6;
/// Measured ¹³C–¹H scalar coupling, Hz.
pub const CHLOROFORM_J_HZ: f64 = 215.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    pub nu1: f64,
    pub nu2: f64,
    pub j_coupling: f64,
    /// γ₁/γ₂
    pub gamma_ratio: f64,
}

impl SpinSystem {
    pub fn new(nu1: f64, nu2: f64, j_coupling: f64, gamma_ratio: f64) -> Result<Self> {
        let sys = Self {
            nu1,
            nu2,
            j_coupling,
            gamma_ratio,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// ¹³C-labelled chloroform at 11.7 T. γ₁/γ₂ follows from the Larmor
    /// frequencies at fixed field.
    pub fn chloroform() -> Self {
        Self {
            nu1: CARBON_FREQUENCY_HZ,
            nu2: PROTON_FREQUENCY_HZ,
            j_coupling: CHLOROFORM_J_HZ,
            gamma_ratio: CARBON_FREQUENCY_HZ / PROTON_FREQUENCY_HZ,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.nu1, self.nu2, self.j_coupling, self.gamma_ratio]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(
                "spin system values must be finite".into(),
            ));
        }
        if self.j_coupling <= 0.0 {
            return Err(Error::InvalidArgument("J coupling must be positive".into()));
        }
        if self.nu1 < 0.0 || self.nu2 < 0.0 {
            return Err(Error::InvalidArgument(
                "resonance frequencies must be non-negative".into(),
            ));
        }
        if self.gamma_ratio <= 0.0 {
            return Err(Error::InvalidArgument(
                "gamma ratio must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Same coupling with the Zeeman terms switched off.
    pub fn without_shifts(&self) -> Self {
        Self {
            nu1: 0.0,
            nu2: 0.0,
            ..*self
        }
    }
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self::chloroform()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Spin {
    One,
    Two,
}

impl TryFrom<u8> for Spin {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Spin::One),
            2 => Ok(Spin::Two),
            other => Err(format!("spin must be 1 or 2, got {other}")),
        }
    }
}

impl From<Spin> for u8 {
    fn from(s: Spin) -> u8 {
        match s {
            Spin::One => 1,
            Spin::Two => 2,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// rf phase of a pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "-x")]
    MinusX,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "-y")]
    MinusY,
}

impl Axis {
    fn cartesian(self) -> (Cartesian, f64) {
        match self {
            Axis::X => (Cartesian::X, 1.0),
            Axis::MinusX => (Cartesian::X, -1.0),
            Axis::Y => (Cartesian::Y, 1.0),
            Axis::MinusY => (Cartesian::Y, -1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cartesian {
    X,
    Y,
    Z,
}

/// Sign of the rotation generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationConvention {
    /// `exp(+iφ I_a)`, the convention every fixture in this crate uses.
    #[default]
    Positive,
    /// `exp(−iφ I_a)`, the common textbook NMR convention.
    Negative,
}

/// Propagator used for free-evolution delays.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMode {
    /// Scalar coupling only (doubly rotating frame).
    #[default]
    Coupled,
    /// Zeeman plus coupling Hamiltonian.
    Full,
}

impl std::str::FromStr for DelayMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "coupled" => Ok(DelayMode::Coupled),
            "full" => Ok(DelayMode::Full),
            other => Err(format!(
                "unknown delay mode '{other}' (expected coupled|full)"
            )),
        }
    }
}

fn pauli_half(axis: Cartesian) -> Operator {
    let h = 0.5;
    let rows = match axis {
        Cartesian::X => vec![
            vec![C64::new(0.0, 0.0), C64::new(h, 0.0)],
            vec![C64::new(h, 0.0), C64::new(0.0, 0.0)],
        ],
        Cartesian::Y => vec![
            vec![C64::new(0.0, 0.0), C64::new(0.0, -h)],
            vec![C64::new(0.0, h), C64::new(0.0, 0.0)],
        ],
        Cartesian::Z => vec![
            vec![C64::new(h, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(-h, 0.0)],
        ],
    };
    Operator::from_rows(&rows).expect("2x2")
}

/// Embeds a single-spin 2×2 operator into the two-spin space.
pub fn embed(spin: Spin, single: &Operator) -> Operator {
    let id = Operator::identity(2);
    match spin {
        Spin::One => kron(single, &id),
        Spin::Two => kron(&id, single),
    }
}

/// Angular momentum component I_a^k on the two-spin space.
pub fn spin_operator(spin: Spin, axis: Cartesian) -> Operator {
    embed(spin, &pauli_half(axis))
}

/// Product operator I_a¹ I_b².
pub fn product_operator(a: Cartesian, b: Cartesian) -> Operator {
    kron(&pauli_half(a), &pauli_half(b))
}

/// Builds a deviation matrix from a real-weighted sum of Hermitian operators.
pub fn deviation_from_terms(terms: &[(f64, Operator)]) -> DeviationDensity {
    let mut m = DeviationDensity::zeros(4).matrix().clone();
    for (w, op) in terms {
        m += op.matrix() * C64::new(*w, 0.0);
    }
    DeviationDensity::new(m).expect("sum of Hermitian product operators")
}

/// Thermal deviation γ₁I_z¹ + γ₂I_z², stored with γ₂ = 1.
pub fn equilibrium_deviation(system: &SpinSystem) -> DeviationDensity {
    deviation_from_terms(&[
        (system.gamma_ratio, spin_operator(Spin::One, Cartesian::Z)),
        (1.0, spin_operator(Spin::Two, Cartesian::Z)),
    ])
}
