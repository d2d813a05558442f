//! Pulse-level realizations of the sign flips, the preset unitaries and the
//! full G_j^(n) = U_j Q_jⁿ sequence.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::grover::{Family, PresetId, PresetRotation};
use crate::linalg::{Apply, DeviationDensity, C64};

use super::sequence::{Pulse, PulseSequence, SequenceElement};
use super::{Axis, Spin, SpinSystem};

const BOTH: [Spin; 2] = [Spin::One, Spin::Two];

fn pulse(spins: &[Spin], axis: Axis, angle: f64) -> SequenceElement {
    SequenceElement::pulse(spins, axis, angle)
}

/// `τ/2 – [π]_x – τ/2 – [−π]_x` on both spins, τ = `fraction`/J. Equivalent to
/// coupling evolution for τ with chemical shifts refocused.
fn refocused_coupling(fraction: f64) -> Vec<SequenceElement> {
    vec![
        SequenceElement::delay_inv_j(fraction / 2.0),
        pulse(&BOTH, Axis::X, PI),
        SequenceElement::delay_inv_j(fraction / 2.0),
        pulse(&BOTH, Axis::X, -PI),
    ]
}

/// Nutation angle α = arccos(γ₁/2γ₂) of the first proton pulse.
pub fn preparation_angle(system: &SpinSystem) -> Result<f64> {
    let c = system.gamma_ratio / 2.0;
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::InvalidArgument(format!(
            "gamma ratio {} gives arccos argument {c} outside [-1, 1]",
            system.gamma_ratio
        )));
    }
    Ok(c.acos())
}

/// Spatial-averaging preparation of the pseudo-pure state |↑↑⟩ from thermal
/// equilibrium:
/// `[α]_x² – grad – [π/4]_x¹ – 1/4J – [π]_x¹² – 1/4J – [−π]_x¹² – [−π/4]_y¹ – grad`.
pub fn pseudo_pure_sequence(system: &SpinSystem) -> Result<PulseSequence> {
    let alpha = preparation_angle(system)?;
    let mut els = vec![
        pulse(&[Spin::Two], Axis::X, alpha),
        SequenceElement::gradient(),
        pulse(&[Spin::One], Axis::X, FRAC_PI_4),
    ];
    els.extend(refocused_coupling(0.5));
    els.push(pulse(&[Spin::One], Axis::Y, -FRAC_PI_4));
    els.push(SequenceElement::gradient());
    Ok(PulseSequence::new(els))
}

/// diag(1, −1, −1, 1) up to global phase, as coupling evolution for 1/J.
pub fn compile_sign_flip_marked() -> PulseSequence {
    PulseSequence::new(refocused_coupling(1.0))
}

/// diag(−1, 1, 1, 1) up to global phase.
pub fn compile_sign_flip_source() -> PulseSequence {
    let mut els = refocused_coupling(0.5);
    els.extend([
        pulse(&BOTH, Axis::Y, -FRAC_PI_2),
        pulse(&BOTH, Axis::X, -FRAC_PI_2),
        pulse(&BOTH, Axis::Y, FRAC_PI_2),
    ]);
    PulseSequence::new(els)
}

/// Sign flip of an arbitrary two-spin basis state: the |↑↑⟩ flip conjugated
/// by π pulses on the spins that are down in `source`.
pub fn compile_sign_flip_source_at(source: usize) -> Result<PulseSequence> {
    if source >= 4 {
        return Err(Error::IndexOutOfRange {
            index: source,
            dim: 4,
        });
    }
    let mut flipped = Vec::new();
    if source & 0b10 != 0 {
        flipped.push(Spin::One);
    }
    if source & 0b01 != 0 {
        flipped.push(Spin::Two);
    }
    if flipped.is_empty() {
        return Ok(compile_sign_flip_source());
    }
    let mut seq = PulseSequence::new(vec![pulse(&flipped, Axis::X, -PI)]);
    seq.extend(&compile_sign_flip_source());
    seq.push(pulse(&flipped, Axis::X, PI));
    Ok(seq)
}

fn rotation_elements(rotations: &[PresetRotation; 2], inverse: bool) -> Vec<SequenceElement> {
    let sign = if inverse { -1.0 } else { 1.0 };
    let mut els: Vec<SequenceElement> = rotations
        .iter()
        .map(|r| pulse(&[r.spin], r.axis, sign * r.angle))
        .collect();
    if inverse {
        els.reverse();
    }
    els
}

/// The preset unitary as two selective pulses, e.g. `[π/4]_y¹ – [3π/4]_y²`.
pub fn compile_unitary(preset: &PresetId) -> Result<PulseSequence> {
    Ok(PulseSequence::new(rotation_elements(
        &preset.rotations()?,
        false,
    )))
}

/// A compiled `U Qⁿ` sequence plus the scalar the pulses cannot realize.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledGrover {
    pub sequence: PulseSequence,
    /// (−1)ⁿ from the sign in Q = −I_s U† I_t U.
    pub scalar: C64,
    pub preset: PresetId,
    pub iterations: usize,
}

/// `U_j Q_jⁿ`, each Q applied in time order as U, I_t, U†, I_s.
pub fn compile_grover(j: u8, n: usize, family: Family, source: usize) -> Result<CompiledGrover> {
    let preset = PresetId::new(j, source, family)?;
    let rotations = preset.rotations()?;

    let mut q = PulseSequence::new(rotation_elements(&rotations, false));
    q.extend(&compile_sign_flip_marked());
    q.extend(&PulseSequence::new(rotation_elements(&rotations, true)));
    q.extend(&compile_sign_flip_source_at(source)?);

    let mut sequence = q.repeated(n);
    sequence.extend(&compile_unitary(&preset)?);
    let scalar = if n.is_multiple_of(2) {
        C64::new(1.0, 0.0)
    } else {
        C64::new(-1.0, 0.0)
    };
    Ok(CompiledGrover {
        sequence,
        scalar,
        preset,
        iterations: n,
    })
}

/// `[π/2]_y^k` readout on one spin.
pub fn readout_pulse(spin: Spin) -> Pulse {
    Pulse {
        spins: vec![spin],
        axis: Axis::Y,
        angle_rad: FRAC_PI_2,
        amplitude_error: 1.0,
    }
}

/// Conjugates `rho` by a single readout rotation.
pub fn readout(rho: &DeviationDensity, pulse: &Pulse) -> Result<DeviationDensity> {
    let el = SequenceElement::Pulse(pulse.clone());
    el.validate()?;
    let sim = super::Simulator::new(SpinSystem::chloroform(), super::DelayMode::Coupled);
    sim.pulse_propagator(pulse).apply(rho)
}
