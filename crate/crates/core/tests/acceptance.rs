//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;

use epr_grover::fixtures;
use epr_grover::grover::{
    coupling_amplitude, iteration_estimate, random_spec, sign_flip_source, synthesize, Family,
    PresetId,
};
use epr_grover::nmr::{
    apply_sequence, compile_grover, equilibrium_deviation, j_evolution, net_propagator,
    pseudo_pure_sequence, readout, readout_pulse, Axis, DelayMode, PulseSequence, SequenceElement,
    Spin, SpinSystem,
};
use epr_grover::spectra::{
    calibrate, classify, make_reference, peak_table, PhaseReference, StateLabel, PEAK_THRESHOLD,
};
use epr_grover::{equiv_deviation, phase_equal, DeviationDensity, Operator, StateVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn state(amps: [C64; 4]) -> StateVector {
    StateVector::new(amps.to_vec()).expect("normalized")
}

fn bell(j: u8) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    match j {
        1 => state([c(h, 0.0), z, z, c(h, 0.0)]),
        2 => state([c(h, 0.0), z, z, c(-h, 0.0)]),
        3 => state([z, c(h, 0.0), c(h, 0.0), z]),
        4 => state([z, c(h, 0.0), c(-h, 0.0), z]),
        _ => unreachable!(),
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn y_presets() -> impl Iterator<Item = PresetId> {
    (1..=4).map(|j| PresetId::new(j, 0, Family::Y).unwrap())
}

fn refs() -> Vec<PhaseReference> {
    vec![
        make_reference(Spin::One).unwrap(),
        make_reference(Spin::Two).unwrap(),
    ]
}

fn operator_fixtures() -> Outcome {
    let mut worst = 0.0f64;
    worst = worst.max(
        sign_flip_source(4, 0)
            .unwrap()
            .max_abs_diff(&fixtures::source_flip()),
    );
    for id in PresetId::all()
        .into_iter()
        .filter(|p| p.family == Family::Y)
    {
        let spec = id.spec().unwrap();
        worst = worst.max(
            spec.marked_operator()
                .max_abs_diff(&fixtures::shared_marked_flip()),
        );
        let [r1, r2] = id.rotations().unwrap();
        let reference = fixtures::y_rotation_pair(r1.angle, r2.angle);
        worst = worst.max(id.unitary().unwrap().max_abs_diff(&reference));
    }
    check(worst <= 1e-12, format!("max error {worst:.3e}"))
}

fn end_to_end_synthesis() -> Outcome {
    let (mut d, mut f, mut p) = (0.0f64, 0.0f64, 0.0f64);
    for id in y_presets() {
        let r = synthesize(&id.spec().unwrap(), 1).unwrap();
        let minus = bell(id.j).with_phase(c(-1.0, 0.0));
        d = d.max(r.state.distance(&minus));
        f = f.max((r.fidelity_to_target - 1.0).abs());
        p = p.max((r.global_phase - c(-1.0, 0.0)).norm());
    }
    check(
        d <= 1e-10 && f <= 1e-10 && p <= 1e-9,
        format!("state {d:.3e}, fidelity {f:.3e}, phase {p:.3e}"),
    )
}

fn period_property() -> Outcome {
    let mut f = 0.0f64;
    for id in PresetId::all() {
        let spec = id.spec().unwrap();
        for n in [1, 4, 7] {
            f = f.max((synthesize(&spec, n).unwrap().fidelity_to_target - 1.0).abs());
        }
    }
    let spec3 = PresetId::new(3, 0, Family::Y).unwrap().spec().unwrap();
    let mut p = 0.0f64;
    for (n, expected) in [(1, -1.0), (4, 1.0), (7, -1.0)] {
        let r = synthesize(&spec3, n).unwrap();
        p = p.max((r.global_phase - c(expected, 0.0)).norm());
    }
    check(
        f <= 1e-9 && p <= 1e-9,
        format!("fidelity {f:.3e}, j=3 phase {p:.3e}"),
    )
}

fn coupling() -> Outcome {
    let worst = y_presets()
        .map(|id| (coupling_amplitude(&id.spec().unwrap()) - 0.5).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-12, format!("max |u - 1/2| {worst:.3e}"))
}

fn equiv_error(a: &DeviationDensity, b: &DeviationDensity) -> f64 {
    match equiv_deviation(a, b, 1e-9).unwrap() {
        Some(fit) => fit.residual,
        None => f64::INFINITY,
    }
}

fn pulse_pipeline() -> Outcome {
    let system = SpinSystem::chloroform();
    let g = system.gamma_ratio;
    let rho_eq = equilibrium_deviation(&system);
    let prep = pseudo_pure_sequence(&system).unwrap();
    let mut worst = 0.0f64;
    let mut agree = 0.0f64;
    for mode in [DelayMode::Coupled, DelayMode::Full] {
        let rho0 = apply_sequence(&rho_eq, &prep, &system, mode).unwrap();
        worst = worst.max(equiv_error(&rho0, &fixtures::pseudo_pure_up_up()));
        for id in y_presets() {
            let compiled = compile_grover(id.j, 1, Family::Y, 0).unwrap();
            let rho = apply_sequence(&rho0, &compiled.sequence, &system, mode).unwrap();
            if id.j == 3 {
                worst = worst.max(equiv_error(&rho, &fixtures::synthesized_psi3()));
            }
            let read = readout(&rho, &readout_pulse(Spin::One)).unwrap();
            worst = worst.max(equiv_error(&read, &fixtures::bell_readout(id.j).unwrap()));

            let operator_level = synthesize(&id.spec().unwrap(), 1).unwrap().state;
            let expected = DeviationDensity::pseudo_pure(&operator_level).scaled(g);
            agree = agree.max(rho.max_abs_diff(&expected));
        }
    }
    check(
        worst <= 1e-9 && agree <= 1e-9,
        format!("equivalence residual {worst:.3e}, pulse vs operator {agree:.3e}"),
    )
}

fn columnwise_phase_error(a: &Operator, b: &Operator) -> f64 {
    (0..a.dim())
        .map(|k| {
            let ca = a.column(k);
            let cb = b.column(k);
            let overlap = cb.dotc(&ca);
            let phase = overlap / overlap.norm();
            (ca - cb * phase)
                .iter()
                .fold(0.0f64, |m, z| m.max(z.norm()))
        })
        .fold(0.0, f64::max)
}

fn refocusing() -> Outcome {
    let system = SpinSystem::new(125.76e6, 500.13e6, 215.0, 125.76 / 500.13).unwrap();
    let both = [Spin::One, Spin::Two];
    let seq = PulseSequence::new(vec![
        SequenceElement::delay_inv_j(0.25),
        SequenceElement::pulse(&both, Axis::X, PI),
        SequenceElement::delay_inv_j(0.25),
        SequenceElement::pulse(&both, Axis::X, -PI),
    ]);
    let actual = net_propagator(&seq, &system, DelayMode::Full).unwrap();
    let expected = j_evolution(0.5 / system.j_coupling, &system).unwrap();
    let col = columnwise_phase_error(&actual, &expected);
    let global = actual.phase_equal(&expected, 1e-8).unwrap().is_some();
    check(
        col <= 1e-8 && global,
        format!("column-wise error {col:.3e}, global phase found: {global}"),
    )
}

fn reference_calibration() -> Outcome {
    let system = SpinSystem::chloroform();
    let refs = refs();
    let mut problems = Vec::new();
    for (spin, element) in [(Spin::One, [1, 3]), (Spin::Two, [1, 2])] {
        let rho = readout(&fixtures::pseudo_pure_up_up(), &readout_pulse(spin)).unwrap();
        let fixture_err = rho.max_abs_diff(&fixtures::reference_readout(spin));
        if fixture_err > 1e-12 {
            problems.push(format!("spin {spin} readout off by {fixture_err:.3e}"));
        }
        let peaks = peak_table(&fixtures::reference_readout(spin), &system).unwrap();
        let present: Vec<_> = peaks
            .iter()
            .filter(|p| p.amplitude().norm() >= PEAK_THRESHOLD)
            .collect();
        if present.len() != 1 || present[0].element != element || present[0].spin != spin {
            problems.push(format!("spin {spin}: {} peaks", present.len()));
            continue;
        }
        if (present[0].amplitude() - c(-0.5, 0.0)).norm() > 1e-12 {
            problems.push(format!("spin {spin}: raw peak {}", present[0].amplitude()));
        }
        let cal = calibrate(&peaks, &refs).unwrap();
        let p = cal.iter().find(|p| p.element == element).unwrap();
        if !(p.re > 0.0 && (p.re - 0.5).abs() < 1e-12 && p.im.abs() < 1e-12) {
            problems.push(format!("spin {spin}: calibrated {} {}", p.re, p.im));
        }
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            "one peak per spin, calibrated to +1/2".into()
        } else {
            problems.join("; ")
        },
    )
}

fn classification() -> Outcome {
    let system = SpinSystem::chloroform();
    let refs = refs();
    let mut problems = Vec::new();
    for j in 1..=4u8 {
        let raw = peak_table(&fixtures::bell_readout(j).unwrap(), &system).unwrap();
        for peaks in [raw.clone(), calibrate(&raw, &refs).unwrap()] {
            let label = classify(&peaks, &refs).unwrap().label;
            if label != StateLabel::from_index(j) {
                problems.push(format!("psi{j} classified as {label:?}"));
            }
        }
    }
    for mixed in [DeviationDensity::zeros(4), DeviationDensity::identity(4)] {
        let label = classify(&peak_table(&mixed, &system).unwrap(), &refs)
            .unwrap()
            .label;
        if label != StateLabel::Unknown {
            problems.push(format!("maximally mixed classified as {label:?}"));
        }
    }
    let rho_eq = equilibrium_deviation(&system);
    let rho0 = apply_sequence(
        &rho_eq,
        &pseudo_pure_sequence(&system).unwrap(),
        &system,
        DelayMode::Coupled,
    )
    .unwrap();
    let mut leak = 0.0f64;
    for j in 1..=4u8 {
        let seq = compile_grover(j, 1, Family::Y, 0).unwrap().sequence;
        let rho = apply_sequence(&rho0, &seq, &system, DelayMode::Coupled).unwrap();
        for p in peak_table(&rho, &system).unwrap() {
            leak = leak.max(p.amplitude().norm());
        }
    }
    if leak > 1e-9 {
        problems.push(format!("unread observables up to {leak:.3e}"));
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!("all four labels recovered, mixed -> unknown, leak {leak:.3e}")
        } else {
            problems.join("; ")
        },
    )
}

fn generalized_regime() -> Outcome {
    const TRIALS: usize = 100;
    const U_CAP: f64 = 0.15;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut passed = 0;
    let mut rejected = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..TRIALS {
        let spec = loop {
            let spec = random_spec(64, 1, &mut rng).unwrap();
            if coupling_amplitude(&spec) <= U_CAP {
                break spec;
            }
            rejected += 1;
        };
        let n = iteration_estimate(coupling_amplitude(&spec)).unwrap();
        let f = synthesize(&spec, n).unwrap().fidelity_to_target;
        worst = worst.min(f);
        if f >= 0.95 {
            passed += 1;
        }
    }
    check(
        passed >= 95,
        format!("{passed}/{TRIALS} trials with fidelity >= 0.95 (min {worst:.4}, {rejected} rejected draws)"),
    )
}

fn other_presets() -> Outcome {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let x_family = [
        state([c(h, 0.0), z, z, c(0.0, -h)]),
        state([c(h, 0.0), z, z, c(0.0, h)]),
        state([z, c(h, 0.0), c(0.0, -h), z]),
        state([z, c(h, 0.0), c(0.0, h), z]),
    ];
    let mut worst = 0.0f64;
    for j in 1..=4u8 {
        let cases = [
            (
                PresetId::new(j, 0, Family::X).unwrap(),
                x_family[j as usize - 1].clone(),
            ),
            (PresetId::new(j, 1, Family::Y).unwrap(), bell(j)),
        ];
        for (id, expected) in cases {
            let got = synthesize(&id.spec().unwrap(), 1).unwrap().state;
            let err = match phase_equal(&got, &expected, 1e-10).unwrap() {
                Some(p) => got.distance(&expected.with_phase(p)),
                None => f64::INFINITY,
            };
            worst = worst.max(err);
        }
    }
    check(worst <= 1e-10, format!("max error up to phase {worst:.3e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("operator fixtures", operator_fixtures),
        ("end-to-end synthesis", end_to_end_synthesis),
        ("period property", period_property),
        ("coupling amplitude", coupling),
        ("pulse-level pipeline", pulse_pipeline),
        ("refocusing", refocusing),
        ("reference calibration", reference_calibration),
        ("classification", classification),
        ("generalized regime", generalized_regime),
        ("x-family and second-column presets", other_presets),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
