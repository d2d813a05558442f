//! Peak tables, reference-phase calibration, Bell-state classification and
//! Lorentzian rendering of two-spin readout spectra.
//!
//! Spin 1 (carbon) is observed through elements (1,3) and (2,4) of the
//! density matrix, spin 2 (proton) through (1,2) and (3,4) (1-based). The
//! transition with the partner spin up sits at +J/2 from the spin's center,
//! the partner-down transition at −J/2. Whether that is the left or right
//! peak on a plotted axis is a display choice.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::{DeviationDensity, C64};
use crate::nmr::{readout, readout_pulse, Spin, SpinSystem};

/// Below this magnitude a peak counts as absent.
pub const PEAK_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_LINEWIDTH_HZ: f64 = 2.0;
pub const DEFAULT_GRID_POINTS: usize = 1024;

/// Observable elements in classification order, 1-based, with their spin and
/// partner-spin sign (+1 = partner up).
const OBSERVABLES: [(Spin, [usize; 2], f64); 4] = [
    (Spin::One, [1, 3], 1.0),
    (Spin::One, [2, 4], -1.0),
    (Spin::Two, [1, 2], 1.0),
    (Spin::Two, [3, 4], -1.0),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub spin: Spin,
    /// 1-based (row, column) of the density-matrix element.
    pub element: [usize; 2],
    pub offset_hz: f64,
    pub re: f64,
    pub im: f64,
    pub calibrated: bool,
}

impl Peak {
    pub fn amplitude(&self) -> C64 {
        C64::new(self.re, self.im)
    }

    fn with_amplitude(&self, a: C64, calibrated: bool) -> Self {
        Self {
            re: a.re,
            im: a.im,
            calibrated,
            ..self.clone()
        }
    }
}

/// The four observable peaks of a two-spin density matrix.
pub fn peak_table(rho: &DeviationDensity, system: &SpinSystem) -> Result<Vec<Peak>> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let half_j = system.j_coupling / 2.0;
    Ok(OBSERVABLES
        .iter()
        .map(|&(spin, element, side)| {
            let a = rho.entry(element[0] - 1, element[1] - 1);
            Peak {
                spin,
                element,
                offset_hz: side * half_j,
                re: a.re,
                im: a.im,
                calibrated: false,
            }
        })
        .collect())
}

pub fn peaks_to_json(peaks: &[Peak]) -> String {
    serde_json::to_string_pretty(peaks).expect("peaks serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReference {
    pub spin: Spin,
    pub phase: C64,
}

/// Phase that turns the single peak of `spin` in `rho` into positive absorption.
pub fn reference_from_density(spin: Spin, rho: &DeviationDensity) -> Result<PhaseReference> {
    let peaks = peak_table(rho, &SpinSystem::chloroform())?;
    let mut present = peaks
        .iter()
        .filter(|p| p.spin == spin && p.amplitude().norm() >= PEAK_THRESHOLD);
    let peak = match (present.next(), present.next()) {
        (Some(p), None) => p,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "reference density must show exactly one peak for spin {spin}"
            )))
        }
    };
    let a = peak.amplitude();
    Ok(PhaseReference {
        spin,
        phase: a.conj() / a.norm(),
    })
}

/// Reference from the pseudo-pure |↑↑⟩ state read out by `[π/2]_y` on `spin`.
pub fn make_reference(spin: Spin) -> Result<PhaseReference> {
    let rho = readout(&fixtures::pseudo_pure_up_up(), &readout_pulse(spin))?;
    reference_from_density(spin, &rho)
}

fn reference_for(spin: Spin, refs: &[PhaseReference]) -> Result<C64> {
    refs.iter()
        .find(|r| r.spin == spin)
        .map(|r| r.phase)
        .ok_or(Error::MissingReference(spin.into()))
}

/// Multiplies each peak by its spin's reference phase.
pub fn calibrate(peaks: &[Peak], refs: &[PhaseReference]) -> Result<Vec<Peak>> {
    peaks
        .iter()
        .map(|p| {
            let phase = reference_for(p.spin, refs)?;
            Ok(p.with_amplitude(p.amplitude() * phase, true))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLabel {
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    Unknown,
}

impl StateLabel {
    pub fn from_index(j: u8) -> Self {
        match j {
            1 => StateLabel::Psi1,
            2 => StateLabel::Psi2,
            3 => StateLabel::Psi3,
            4 => StateLabel::Psi4,
            _ => StateLabel::Unknown,
        }
    }
}

/// Signs of raw elements (1,3), (2,4), (1,2), (3,4) after a [π/2]_y¹ readout.
pub const READOUT_SIGNS: [(StateLabel, [i8; 4]); 4] = [
    (StateLabel::Psi1, [-1, 1, 1, -1]),
    (StateLabel::Psi2, [-1, 1, -1, 1]),
    (StateLabel::Psi3, [1, -1, 1, -1]),
    (StateLabel::Psi4, [1, -1, -1, 1]),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateClassification {
    pub label: StateLabel,
    /// Raw-element signs; 0 marks an absent or non-real peak.
    pub sign_quadruple: [i8; 4],
}

fn sign_of(a: C64) -> i8 {
    if a.norm() < PEAK_THRESHOLD || a.im.abs() >= PEAK_THRESHOLD {
        0
    } else if a.re > 0.0 {
        1
    } else {
        -1
    }
}

/// Identifies the Bell state from the sign pattern of the four observable
/// elements. Calibrated peaks are mapped back to raw elements through `refs`.
pub fn classify(peaks: &[Peak], refs: &[PhaseReference]) -> Result<StateClassification> {
    let mut quad = [0i8; 4];
    for (slot, &(spin, element, _)) in quad.iter_mut().zip(OBSERVABLES.iter()) {
        let peak = peaks
            .iter()
            .find(|p| p.spin == spin && p.element == element)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("missing peak for element {element:?}"))
            })?;
        let raw = if peak.calibrated {
            peak.amplitude() * reference_for(spin, refs)?.conj()
        } else {
            peak.amplitude()
        };
        *slot = sign_of(raw);
    }
    let label = READOUT_SIGNS
        .iter()
        .find(|(_, signs)| *signs == quad)
        .map(|(l, _)| *l)
        .unwrap_or(StateLabel::Unknown);
    Ok(StateClassification {
        label,
        sign_quadruple: quad,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min_hz: f64,
    pub max_hz: f64,
    pub n_points: usize,
}

impl Grid {
    /// ±4J around the spin's center, 1024 points.
    pub fn default_for(system: &SpinSystem) -> Self {
        let span = 4.0 * system.j_coupling;
        Self {
            min_hz: -span,
            max_hz: span,
            n_points: DEFAULT_GRID_POINTS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.min_hz.is_finite() && self.max_hz.is_finite() && self.min_hz < self.max_hz) {
            return Err(Error::InvalidArgument(
                "grid bounds must be finite with min < max".into(),
            ));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidArgument(
                "grid needs at least two points".into(),
            ));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let step = (self.max_hz - self.min_hz) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| self.min_hz + step * i as f64)
            .collect()
    }
}

/// Complex spectrum of one spin; the real part is the absorption display.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub spin: Spin,
    pub freq_hz: Vec<f64>,
    pub values: Vec<C64>,
}

impl Spectrum {
    /// `freq_hz,real,imag` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,real,imag\n");
        for (f, v) in self.freq_hz.iter().zip(&self.values) {
            writeln!(out, "{f:.16e},{:.16e},{:.16e}", v.re, v.im).expect("string write");
        }
        out
    }
}

/// Lorentzian line `a·(w/2)/((w/2) + i(f − f₀))`.
fn lorentzian(amplitude: C64, half_width: f64, detuning: f64) -> C64 {
    amplitude * half_width / C64::new(half_width, detuning)
}

/// Sum of the spin's lines sampled on `grid`.
pub fn render(peaks: &[Peak], spin: Spin, linewidth_hz: f64, grid: &Grid) -> Result<Spectrum> {
    if !(linewidth_hz > 0.0 && linewidth_hz.is_finite()) {
        return Err(Error::InvalidArgument("linewidth must be positive".into()));
    }
    grid.validate()?;
    let hw = linewidth_hz / 2.0;
    let lines: Vec<&Peak> = peaks.iter().filter(|p| p.spin == spin).collect();
    let freq_hz = grid.frequencies();
    let values = freq_hz
        .iter()
        .map(|&f| {
            lines
                .iter()
                .map(|p| lorentzian(p.amplitude(), hw, f - p.offset_hz))
                .sum()
        })
        .collect();
    Ok(Spectrum {
        spin,
        freq_hz,
        values,
    })
}
