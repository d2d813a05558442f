use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Apply, DeviationDensity, Operator};

use super::{
    full_evolution, j_evolution, rotation_pulse_with, Axis, DelayMode, RotationConvention, Spin,
    SpinSystem,
};

fn default_amplitude() -> f64 {
    1.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub spins: Vec<Spin>,
    pub axis: Axis,
    pub angle_rad: f64,
    /// Calibration factor multiplying the nominal angle.
    #[serde(default = "default_amplitude")]
    pub amplitude_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DelayDuration {
    #[serde(rename = "fraction_of_inv_j")]
    FractionOfInvJ(f64),
    #[serde(rename = "seconds")]
    Seconds(f64),
}

impl DelayDuration {
    pub fn seconds(&self, system: &SpinSystem) -> f64 {
        match *self {
            DelayDuration::FractionOfInvJ(f) => f / system.j_coupling,
            DelayDuration::Seconds(s) => s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delay {
    #[serde(flatten)]
    pub duration: DelayDuration,
    /// Simulate with the coupling-only propagator even in full mode.
    #[serde(default, skip_serializing_if = "is_false")]
    pub refocus_shifts: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SequenceElement {
    #[serde(rename = "pulse")]
    Pulse(Pulse),
    #[serde(rename = "delay")]
    Delay(Delay),
    #[serde(rename = "gradient")]
    GradientCrush {},
}

impl SequenceElement {
    pub fn pulse(spins: &[Spin], axis: Axis, angle: f64) -> Self {
        SequenceElement::Pulse(Pulse {
            spins: spins.to_vec(),
            axis,
            angle_rad: angle,
            amplitude_error: 1.0,
        })
    }

    /// Delay of `fraction`/J seconds.
    pub fn delay_inv_j(fraction: f64) -> Self {
        SequenceElement::Delay(Delay {
            duration: DelayDuration::FractionOfInvJ(fraction),
            refocus_shifts: false,
        })
    }

    pub fn delay_seconds(seconds: f64) -> Self {
        SequenceElement::Delay(Delay {
            duration: DelayDuration::Seconds(seconds),
            refocus_shifts: false,
        })
    }

    pub fn gradient() -> Self {
        SequenceElement::GradientCrush {}
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceElement::Pulse(p) => {
                if p.spins.is_empty() {
                    return Err(Error::InvalidArgument(
                        "pulse must address at least one spin".into(),
                    ));
                }
                if p.spins.len() == 2 && p.spins[0] == p.spins[1] {
                    return Err(Error::InvalidArgument(
                        "pulse addresses the same spin twice".into(),
                    ));
                }
                if p.spins.len() > 2 {
                    return Err(Error::InvalidArgument(
                        "a two-spin pulse addresses at most two spins".into(),
                    ));
                }
                if !p.angle_rad.is_finite() {
                    return Err(Error::InvalidArgument("pulse angle must be finite".into()));
                }
                if !(p.amplitude_error > 0.0 && p.amplitude_error.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "amplitude error must be positive".into(),
                    ));
                }
            }
            SequenceElement::Delay(d) => {
                let v = match d.duration {
                    DelayDuration::FractionOfInvJ(f) => f,
                    DelayDuration::Seconds(s) => s,
                };
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "delay must be finite and non-negative".into(),
                    ));
                }
            }
            SequenceElement::GradientCrush {} => {}
        }
        Ok(())
    }
}

/// Pulses, delays and gradients applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub elements: Vec<SequenceElement>,
}

impl PulseSequence {
    pub fn new(elements: Vec<SequenceElement>) -> Self {
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn push(&mut self, el: SequenceElement) {
        self.elements.push(el);
    }

    pub fn extend(&mut self, other: &PulseSequence) {
        self.elements.extend(other.elements.iter().cloned());
    }

    /// Sequence repeated `n` times.
    pub fn repeated(&self, n: usize) -> Self {
        let mut out = PulseSequence::default();
        for _ in 0..n {
            out.extend(self);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.elements.iter().try_for_each(SequenceElement::validate)
    }

    pub fn has_gradient(&self) -> bool {
        self.elements
            .iter()
            .any(|e| matches!(e, SequenceElement::GradientCrush {}))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Ideal field-gradient crusher: every coherence dephases.
pub fn gradient_crush(rho: &DeviationDensity) -> DeviationDensity {
    rho.diagonal_part()
}

/// Executes sequences for one spin system, delay mode and rotation convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simulator {
    pub system: SpinSystem,
    pub mode: DelayMode,
    pub convention: RotationConvention,
}

impl Simulator {
    pub fn new(system: SpinSystem, mode: DelayMode) -> Self {
        Self {
            system,
            mode,
            convention: RotationConvention::Positive,
        }
    }

    pub fn with_convention(mut self, convention: RotationConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn pulse_propagator(&self, pulse: &Pulse) -> Operator {
        let angle = pulse.angle_rad * pulse.amplitude_error;
        pulse
            .spins
            .iter()
            .fold(Operator::identity(4), |acc, &spin| {
                &rotation_pulse_with(spin, pulse.axis, angle, self.convention) * &acc
            })
    }

    pub fn delay_propagator(&self, delay: &Delay) -> Result<Operator> {
        let tau = delay.duration.seconds(&self.system);
        match (self.mode, delay.refocus_shifts) {
            (DelayMode::Full, false) => full_evolution(tau, &self.system),
            _ => j_evolution(tau, &self.system),
        }
    }

    /// Propagator of one element; `None` for a gradient.
    pub fn element_propagator(&self, el: &SequenceElement) -> Result<Option<Operator>> {
        el.validate()?;
        Ok(match el {
            SequenceElement::Pulse(p) => Some(self.pulse_propagator(p)),
            SequenceElement::Delay(d) => Some(self.delay_propagator(d)?),
            SequenceElement::GradientCrush {} => None,
        })
    }

    /// Net unitary of a gradient-free sequence (last element leftmost).
    pub fn propagator(&self, seq: &PulseSequence) -> Result<Operator> {
        seq.elements
            .iter()
            .try_fold(Operator::identity(4), |acc, el| {
                match self.element_propagator(el)? {
                    Some(u) => Ok(&u * &acc),
                    None => Err(Error::NonUnitarySequence),
                }
            })
    }

    pub fn apply(&self, rho: &DeviationDensity, seq: &PulseSequence) -> Result<DeviationDensity> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho.dim(),
            });
        }
        seq.elements.iter().try_fold(rho.clone(), |state, el| {
            Ok(match self.element_propagator(el)? {
                Some(u) => u.apply(&state)?,
                None => gradient_crush(&state),
            })
        })
    }
}

pub fn apply_sequence(
    rho: &DeviationDensity,
    seq: &PulseSequence,
    system: &SpinSystem,
    mode: DelayMode,
) -> Result<DeviationDensity> {
    Simulator::new(*system, mode).apply(rho, seq)
}

pub fn net_propagator(
    seq: &PulseSequence,
    system: &SpinSystem,
    mode: DelayMode,
) -> Result<Operator> {
    Simulator::new(*system, mode).propagator(seq)
}
