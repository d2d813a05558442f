//! Tabulated unitaries that synthesize Bell states from a basis state.
//!
//! Each unitary is a pair of single-spin rotations `R₁(φ₁)R₂(φ₂)`. Marked
//! sets are {|↑↑⟩,|↓↓⟩} for j = 1, 2 and {|↑↓⟩,|↓↑⟩} for j = 3, 4, and both
//! pairs share the sign-flip operator diag(1, −1, −1, 1).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, C64};
use crate::nmr::{rotation_pulse, Axis, Spin};

use super::{OracleForm, SearchSpec};

const PI_3_4: f64 = 3.0 * FRAC_PI_4;

/// Rotation axis family of the spin-1 pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Y,
    X,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Y => "y",
            Family::X => "x",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "y" => Ok(Family::Y),
            "x" => Ok(Family::X),
            other => Err(format!("unknown family '{other}' (expected y|x)")),
        }
    }
}

/// Single-spin rotation `exp(+i·angle·I_axis^spin)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetRotation {
    pub spin: Spin,
    pub axis: Axis,
    pub angle: f64,
}

impl PresetRotation {
    pub fn operator(&self) -> Operator {
        rotation_pulse(self.spin, self.axis, self.angle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PresetId {
    pub j: u8,
    pub source: usize,
    pub family: Family,
}

impl PresetId {
    pub fn new(j: u8, source: usize, family: Family) -> Result<Self> {
        let id = Self { j, source, family };
        id.angles()?;
        Ok(id)
    }

    fn unknown(&self) -> Error {
        Error::UnknownPreset {
            j: self.j,
            source_index: self.source,
            family: self.family.name(),
        }
    }

    /// (φ₁, φ₂) of the tabulated unitary.
    fn angles(&self) -> Result<(f64, f64)> {
        let q = FRAC_PI_4;
        let t = PI_3_4;
        let angles = match (self.family, self.source, self.j) {
            // first column of U(φ₁, φ₂)
            (Family::Y, 0, 1) => (q, t),
            (Family::Y, 0, 2) => (q, -t),
            (Family::Y, 0, 3) => (q, q),
            (Family::Y, 0, 4) => (-q, q),
            // second column
            (Family::Y, 1, 1) => (-q, q),
            (Family::Y, 1, 2) => (q, q),
            (Family::Y, 1, 3) => (q, -t),
            (Family::Y, 1, 4) => (q, t),
            // spin-1 pulse about x: relative phases ±i
            (Family::X, 0, 1) => (q, t),
            (Family::X, 0, 2) => (q, -t),
            (Family::X, 0, 3) => (q, q),
            (Family::X, 0, 4) => (q, -q),
            _ => return Err(self.unknown()),
        };
        Ok(angles)
    }

    pub fn rotations(&self) -> Result<[PresetRotation; 2]> {
        let (phi1, phi2) = self.angles()?;
        let axis1 = match self.family {
            Family::Y => Axis::Y,
            Family::X => Axis::X,
        };
        Ok([
            PresetRotation {
                spin: Spin::One,
                axis: axis1,
                angle: phi1,
            },
            PresetRotation {
                spin: Spin::Two,
                axis: Axis::Y,
                angle: phi2,
            },
        ])
    }

    pub fn unitary(&self) -> Result<Operator> {
        let [r1, r2] = self.rotations()?;
        Ok(&r1.operator() * &r2.operator())
    }

    pub fn marked(&self) -> [usize; 2] {
        if self.j <= 2 {
            [0, 3]
        } else {
            [1, 2]
        }
    }

    /// The entangled state this preset synthesizes.
    pub fn target(&self) -> Result<StateVector> {
        self.angles()?;
        match self.family {
            Family::Y => bell_state(self.j),
            Family::X => {
                let (lo, hi) = if self.j <= 2 { (0, 3) } else { (1, 2) };
                let sign = if self.j % 2 == 1 { -1.0 } else { 1.0 };
                let mut amps = vec![C64::new(0.0, 0.0); 4];
                amps[lo] = C64::new(FRAC_1_SQRT_2, 0.0);
                amps[hi] = C64::new(0.0, sign * FRAC_1_SQRT_2);
                StateVector::new(amps)
            }
        }
    }

    pub fn spec(&self) -> Result<SearchSpec> {
        // diag(1,−1,−1,1) for either marked pair
        let oracle = if self.j <= 2 {
            OracleForm::Negated
        } else {
            OracleForm::Literal
        };
        SearchSpec::new(4, self.source, self.marked(), self.unitary()?)?
            .with_oracle(oracle)
            .with_target(self.target()?)
    }

    /// Every tabulated preset.
    pub fn all() -> Vec<PresetId> {
        let mut out = Vec::new();
        for (family, source) in [(Family::Y, 0), (Family::Y, 1), (Family::X, 0)] {
            for j in 1..=4 {
                out.push(PresetId { j, source, family });
            }
        }
        out
    }
}

/// |ψ₁⟩..|ψ₄⟩ = (|↑↑⟩±|↓↓⟩)/√2, (|↑↓⟩±|↓↑⟩)/√2.
pub fn bell_state(j: u8) -> Result<StateVector> {
    let h = FRAC_1_SQRT_2;
    let amps = match j {
        1 => [h, 0.0, 0.0, h],
        2 => [h, 0.0, 0.0, -h],
        3 => [0.0, h, h, 0.0],
        4 => [0.0, h, -h, 0.0],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "Bell state index must be 1..=4, got {j}"
            )))
        }
    };
    StateVector::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
}

/// Preset search problem for target j from basis state `source`.
pub fn epr_presets(j: u8, source: usize, family: Family) -> Result<SearchSpec> {
    PresetId::new(j, source, family)?.spec()
}
