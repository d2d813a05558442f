//! Fixture suite behind `eprsynth verify`.

use std::f64::consts::PI;

use anyhow::Result;
use epr_grover::fixtures;
use epr_grover::grover::{
    bell_state, coupling_amplitude, sign_flip_source, synthesize, Family, PresetId,
};
use epr_grover::nmr::{
    compile_grover, compile_sign_flip_marked, compile_sign_flip_source, compile_unitary,
    equilibrium_deviation, j_evolution, pseudo_pure_sequence, readout_pulse, Axis, DelayMode,
    PulseSequence, RotationConvention, SequenceElement, Simulator, Spin, SpinSystem,
};
use epr_grover::spectra::{classify, make_reference, peak_table, StateLabel};
use epr_grover::{fit_deviation, Apply, DeviationDensity, Operator, C64};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub check_name: String,
    pub pass: bool,
    /// `null` when no comparison was possible.
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tolerance: f64,
    pub delay_mode: DelayMode,
    pub convention: RotationConvention,
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

pub struct Settings {
    pub system: SpinSystem,
    pub mode: DelayMode,
    pub convention: RotationConvention,
    pub tolerance: f64,
}

/// Residual of `a ≈ s·b + c·I` with `s > 0`; infinite when no such fit exists.
fn equiv_error(a: &DeviationDensity, b: &DeviationDensity) -> Result<f64> {
    Ok(match fit_deviation(a, b)? {
        Some(fit) if fit.scale > 0.0 => fit.residual,
        _ => f64::INFINITY,
    })
}

fn phase_error(a: &Operator, b: &Operator) -> f64 {
    let overlap = (b.matrix().adjoint() * a.matrix()).trace();
    if overlap.norm() < f64::EPSILON {
        return f64::INFINITY;
    }
    a.max_abs_diff(&b.scale(overlap / overlap.norm()))
}

fn columnwise_phase_error(a: &Operator, b: &Operator) -> f64 {
    (0..a.dim())
        .map(|k| {
            let (ca, cb) = (a.column(k), b.column(k));
            let overlap = cb.dotc(&ca);
            if overlap.norm() < f64::EPSILON {
                return f64::INFINITY;
            }
            (ca - cb * (overlap / overlap.norm()))
                .iter()
                .fold(0.0f64, |m, z| m.max(z.norm()))
        })
        .fold(0.0, f64::max)
}

struct Suite {
    tolerance: f64,
    checks: Vec<Check>,
}

impl Suite {
    fn record(&mut self, name: impl Into<String>, max_error: f64) {
        self.checks.push(Check {
            check_name: name.into(),
            pass: max_error <= self.tolerance,
            max_error,
        });
    }
}

fn y_presets() -> Vec<PresetId> {
    (1..=4)
        .map(|j| PresetId::new(j, 0, Family::Y).expect("tabulated"))
        .collect()
}

pub fn run(settings: &Settings) -> Result<Report> {
    let system = settings.system;
    let sim = Simulator::new(system, settings.mode).with_convention(settings.convention);
    let mut suite = Suite {
        tolerance: settings.tolerance,
        checks: Vec::new(),
    };

    // Operators
    let i0 = sign_flip_source(4, 0)?;
    suite.record(
        "source_flip_operator",
        i0.max_abs_diff(&fixtures::source_flip()),
    );
    let it_err = y_presets()
        .iter()
        .map(|id| {
            Ok(id
                .spec()?
                .marked_operator()
                .max_abs_diff(&fixtures::shared_marked_flip()))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    suite.record("marked_flip_operator", it_err);
    suite.record(
        "source_flip_sequence",
        phase_error(
            &sim.propagator(&compile_sign_flip_source())?,
            &fixtures::source_flip(),
        ),
    );
    suite.record(
        "marked_flip_sequence",
        phase_error(
            &sim.propagator(&compile_sign_flip_marked())?,
            &fixtures::shared_marked_flip(),
        ),
    );
    for id in y_presets() {
        let [r1, r2] = id.rotations()?;
        let reference = fixtures::y_rotation_pair(r1.angle, r2.angle);
        let from_pulses = sim.propagator(&compile_unitary(&id)?)?;
        suite.record(
            format!("rotation_pair_psi{}", id.j),
            from_pulses.max_abs_diff(&reference),
        );
    }

    // Operator-level synthesis
    let mut synth_err = 0.0f64;
    let mut coupling_err = 0.0f64;
    for id in y_presets() {
        let spec = id.spec()?;
        let r = synthesize(&spec, 1)?;
        let minus = bell_state(id.j)?.with_phase(C64::new(-1.0, 0.0));
        synth_err = synth_err.max(r.state.distance(&minus));
        coupling_err = coupling_err.max((coupling_amplitude(&spec) - 0.5).abs());
    }
    suite.record("synthesis_minus_psi", synth_err);
    suite.record("coupling_amplitude_half", coupling_err);
    let spec3 = PresetId::new(3, 0, Family::Y)?.spec()?;
    let mut period_err = 0.0f64;
    for (n, phase) in [(1, -1.0), (4, 1.0), (7, -1.0)] {
        let r = synthesize(&spec3, n)?;
        period_err = period_err
            .max((r.fidelity_to_target - 1.0).abs())
            .max((r.global_phase - C64::new(phase, 0.0)).norm());
    }
    suite.record("period_three_psi3", period_err);

    // Pulse level
    let rho0 = sim.apply(
        &equilibrium_deviation(&system),
        &pseudo_pure_sequence(&system)?,
    )?;
    suite.record(
        "pseudo_pure_preparation",
        equiv_error(&rho0, &fixtures::pseudo_pure_up_up())?,
    );
    let read1 = sim.pulse_propagator(&readout_pulse(Spin::One));
    let read2 = sim.pulse_propagator(&readout_pulse(Spin::Two));
    suite.record(
        "reference_readout_spin1",
        read1
            .apply(&fixtures::pseudo_pure_up_up())?
            .max_abs_diff(&fixtures::reference_readout(Spin::One)),
    );
    suite.record(
        "reference_readout_spin2",
        read2
            .apply(&fixtures::pseudo_pure_up_up())?
            .max_abs_diff(&fixtures::reference_readout(Spin::Two)),
    );

    let refs = [make_reference(Spin::One)?, make_reference(Spin::Two)?];
    let mut agreement = 0.0f64;
    let mut leak = 0.0f64;
    let mut mislabels = 0usize;
    for id in y_presets() {
        let spec = id.spec()?;
        for n in [1, 4, 7] {
            let seq = compile_grover(id.j, n, Family::Y, 0)?.sequence;
            let rho = sim.apply(&rho0, &seq)?;
            let state = synthesize(&spec, n)?.state;
            let expected = DeviationDensity::pseudo_pure(&state).scaled(system.gamma_ratio);
            agreement = agreement.max(rho.max_abs_diff(&expected));
            if n != 1 {
                continue;
            }
            if id.j == 3 {
                suite.record(
                    "synthesized_psi3_density",
                    equiv_error(&rho, &fixtures::synthesized_psi3())?,
                );
            }
            for p in peak_table(&rho, &system)? {
                leak = leak.max(p.amplitude().norm());
            }
            let read = read1.apply(&rho)?;
            let reference = fixtures::bell_readout(id.j).expect("j in 1..=4");
            suite.record(
                format!("readout_psi{}", id.j),
                equiv_error(&read, &reference)?,
            );
            if classify(&peak_table(&read, &system)?, &refs)?.label != StateLabel::from_index(id.j)
            {
                mislabels += 1;
            }
        }
    }
    suite.record("pulse_vs_operator_density", agreement);
    suite.record("unread_observables_vanish", leak);
    suite.record("classification_mislabels", mislabels as f64);

    let both = [Spin::One, Spin::Two];
    let echo = PulseSequence::new(vec![
        SequenceElement::delay_inv_j(0.25),
        SequenceElement::pulse(&both, Axis::X, PI),
        SequenceElement::delay_inv_j(0.25),
        SequenceElement::pulse(&both, Axis::X, -PI),
    ]);
    let full = Simulator::new(system, DelayMode::Full).with_convention(settings.convention);
    suite.record(
        "refocused_half_inverse_j",
        columnwise_phase_error(
            &full.propagator(&echo)?,
            &j_evolution(0.5 / system.j_coupling, &system)?,
        ),
    );

    let all_pass = suite.checks.iter().all(|c| c.pass);
    Ok(Report {
        tolerance: settings.tolerance,
        delay_mode: settings.mode,
        convention: settings.convention,
        all_pass,
        checks: suite.checks,
    })
}
