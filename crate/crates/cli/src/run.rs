//! `synth`, `sweep` and `presets`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use epr_grover::grover::{
    best_iteration, coupling_amplitude, iteration_estimate, predicted_target, sweep, synthesize,
    PresetId, SearchSpec,
};
use epr_grover::nmr::{
    compile_grover, equilibrium_deviation, pseudo_pure_sequence, readout_pulse, Axis, DelayMode,
    PulseSequence, SequenceElement, Simulator, Spin, SpinSystem,
};
use epr_grover::spectra::{
    calibrate, classify, make_reference, peak_table, peaks_to_json, render, Grid,
    StateClassification, DEFAULT_LINEWIDTH_HZ,
};
use epr_grover::{fit_deviation, Apply, DeviationDensity, Operator, StateVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Job, RunConfig};

pub struct RunContext {
    pub system: SpinSystem,
    pub mode: DelayMode,
    /// `--seed`, which beats any seed in the config.
    pub seed_flag: Option<u64>,
    pub linewidth_hz: f64,
}

impl RunContext {
    pub fn from_config(
        cfg: &RunConfig,
        mode: Option<DelayMode>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let linewidth_hz = cfg.linewidth_hz.unwrap_or(DEFAULT_LINEWIDTH_HZ);
        if !(linewidth_hz > 0.0 && linewidth_hz.is_finite()) {
            bail!("linewidth_hz must be positive");
        }
        Ok(Self {
            system: cfg.system.build()?,
            mode: mode.or(cfg.delay_mode).unwrap_or_default(),
            seed_flag: seed,
            linewidth_hz,
        })
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `{"dim": n, "rows": [[[re, im], ...], ...]}`
pub fn density_json(rho: &DeviationDensity) -> Value {
    let n = rho.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = rho.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    json!({ "dim": n, "rows": rows })
}

fn state_json(psi: &StateVector) -> Value {
    let amps: Vec<[f64; 2]> = psi.amplitudes().iter().map(|z| [z.re, z.im]).collect();
    json!(amps)
}

fn complex_json(z: epr_grover::C64) -> Value {
    json!([z.re, z.im])
}

/// Peaks, spectra and classification from a [π/2]_y¹ readout of `rho`.
fn write_spectra(
    dir: &Path,
    rho: &DeviationDensity,
    ctx: &RunContext,
) -> Result<StateClassification> {
    let read = Simulator::new(ctx.system, ctx.mode)
        .pulse_propagator(&readout_pulse(Spin::One))
        .apply(rho)?;
    let refs = [make_reference(Spin::One)?, make_reference(Spin::Two)?];
    let raw = peak_table(&read, &ctx.system)?;
    let peaks = calibrate(&raw, &refs)?;
    write(dir, "peaks.json", &(peaks_to_json(&peaks) + "\n"))?;
    let grid = Grid::default_for(&ctx.system);
    for (spin, name) in [
        (Spin::One, "spectrum_spin1.csv"),
        (Spin::Two, "spectrum_spin2.csv"),
    ] {
        write(
            dir,
            name,
            &render(&peaks, spin, ctx.linewidth_hz, &grid)?.to_csv(),
        )?;
    }
    let class = classify(&peaks, &refs)?;
    write(dir, "classification.json", &pretty(&class))?;
    Ok(class)
}

pub fn synth(cfg: &RunConfig, ctx: &RunContext, dir: &Path) -> Result<Value> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    match cfg.job()? {
        Job::Preset(p) => synth_preset(&p.id()?, p.n, ctx, dir),
        Job::Custom(c) => {
            let spec = c.spec(c.unitary(&ctx.system, ctx.seed_flag, cfg.seed)?)?;
            synth_custom(&spec, c.n, c.n_max, ctx, dir)
        }
    }
}

/// Equilibrium → pseudo-pure source state → `U Qⁿ`, all at pulse level.
pub fn preset_sequence(id: &PresetId, n: usize, system: &SpinSystem) -> Result<PulseSequence> {
    let mut seq = pseudo_pure_sequence(system)?;
    if id.source == 1 {
        seq.push(SequenceElement::pulse(
            &[Spin::Two],
            Axis::X,
            std::f64::consts::PI,
        ));
    }
    seq.extend(&compile_grover(id.j, n, id.family, id.source)?.sequence);
    Ok(seq)
}

fn synth_preset(id: &PresetId, n: usize, ctx: &RunContext, dir: &Path) -> Result<Value> {
    let seq = preset_sequence(id, n, &ctx.system)?;
    write(dir, "sequence.json", &(seq.to_json() + "\n"))?;
    let sim = Simulator::new(ctx.system, ctx.mode);
    let rho = sim.apply(&equilibrium_deviation(&ctx.system), &seq)?;
    write(dir, "density.json", &pretty(&density_json(&rho)))?;
    let class = write_spectra(dir, &rho, ctx)?;

    let spec = id.spec()?;
    let result = synthesize(&spec, n)?;
    let target = spec.reference_target()?;
    let fit = fit_deviation(&rho, &DeviationDensity::pseudo_pure(&target))?;
    let operator_level =
        DeviationDensity::pseudo_pure(&result.state).scaled(ctx.system.gamma_ratio);
    let report = json!({
        "job": "preset",
        "j": id.j,
        "source_index": id.source,
        "family": id.family,
        "n": n,
        "delay_mode": ctx.mode,
        "coupling_amplitude": coupling_amplitude(&spec),
        "fidelity": result.fidelity_to_target,
        "global_phase": complex_json(result.global_phase),
        "state": state_json(&result.state),
        "target_equivalence": fit.map(|f| json!({
            "scale": f.scale, "offset": f.offset, "residual": f.residual
        })),
        "pulse_vs_operator_error": rho.max_abs_diff(&operator_level),
        "classification": class.label,
    });
    write(dir, "report.json", &pretty(&report))?;
    Ok(report)
}

fn synth_custom(
    spec: &SearchSpec,
    n: Option<usize>,
    n_max: Option<usize>,
    ctx: &RunContext,
    dir: &Path,
) -> Result<Value> {
    let u = coupling_amplitude(spec);
    let estimate = iteration_estimate(u)?;
    let n = n.unwrap_or(estimate);
    let n_max = n_max.unwrap_or((2 * estimate).max(n).max(8));
    let result = synthesize(spec, n)?;
    let (best_n, best_f) = best_iteration(spec, n_max)?;

    let rho = DeviationDensity::pseudo_pure(&result.state);
    write(dir, "density.json", &pretty(&density_json(&rho)))?;
    let class = if spec.dim() == 4 {
        Some(write_spectra(dir, &rho, ctx)?.label)
    } else {
        None
    };
    let report = json!({
        "job": "custom",
        "dim": spec.dim(),
        "source": spec.source(),
        "marked": spec.marked(),
        "coupling_amplitude": u,
        "iteration_estimate": estimate,
        "n": n,
        "fidelity": result.fidelity_to_target,
        "global_phase": complex_json(result.global_phase),
        "predicted_target": state_json(&predicted_target(spec)?),
        "state": state_json(&result.state),
        "best_iteration": { "n": best_n, "fidelity": best_f, "n_max": n_max },
        "classification": class,
    });
    write(dir, "report.json", &pretty(&report))?;
    Ok(report)
}

/// CSV `n,fidelity,phase_re,phase_im` over `from..=to`.
pub fn sweep_csv(cfg: &RunConfig, ctx: &RunContext, from: usize, to: usize) -> Result<String> {
    if from > to {
        bail!("empty iteration range {from}..={to}");
    }
    let spec = match cfg.job()? {
        Job::Preset(p) => p.id()?.spec()?,
        Job::Custom(c) => c.spec(c.unitary(&ctx.system, ctx.seed_flag, cfg.seed)?)?,
    };
    let mut out = String::from("n,fidelity,phase_re,phase_im\n");
    for r in sweep(&spec, to)?.into_iter().skip(from) {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            r.iterations, r.fidelity_to_target, r.global_phase.re, r.global_phase.im
        )?;
    }
    Ok(out)
}

fn operator_json(op: &Operator) -> Value {
    let n = op.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = op.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    json!(rows)
}

pub fn presets_json() -> Result<Value> {
    let mut out = Vec::new();
    for id in PresetId::all() {
        let rotations: Vec<Value> = id
            .rotations()?
            .iter()
            .map(|r| json!({ "spin": r.spin, "axis": r.axis, "angle_rad": r.angle }))
            .collect();
        out.push(json!({
            "j": id.j,
            "source_index": id.source,
            "family": id.family,
            "marked": id.marked(),
            "rotations": rotations,
            "target": state_json(&id.target()?),
            "unitary": operator_json(&id.unitary()?),
        }));
    }
    Ok(Value::Array(out))
}

pub fn to_pretty(v: &Value) -> String {
    pretty(v)
}
