//! Reference matrices for the two-spin Bell-state experiment, written out
//! entry by entry (or as product-operator sums) independently of the
//! simulator code paths.

use crate::linalg::{DeviationDensity, Operator};
use crate::nmr::{deviation_from_terms, product_operator, spin_operator, Cartesian, Spin};

/// `Y₁(φ₁)Y₂(φ₂)` written out with `c_k = cos(φ_k/2)`, `s_k = sin(φ_k/2)`.
pub fn y_rotation_pair(phi1: f64, phi2: f64) -> Operator {
    let (s1, c1) = (phi1 / 2.0).sin_cos();
    let (s2, c2) = (phi2 / 2.0).sin_cos();
    Operator::from_real_rows(&[
        vec![c1 * c2, c1 * s2, s1 * c2, s1 * s2],
        vec![-c1 * s2, c1 * c2, -s1 * s2, s1 * c2],
        vec![-s1 * c2, -s1 * s2, c1 * c2, c1 * s2],
        vec![s1 * s2, -s1 * c2, -c1 * s2, c1 * c2],
    ])
    .expect("4x4")
}

/// Sign flip of |↑↑⟩.
pub fn source_flip() -> Operator {
    Operator::from_real_rows(&[
        vec![-1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("4x4")
}

/// Sign flip shared by both marked pairs.
pub fn shared_marked_flip() -> Operator {
    Operator::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, -1.0, 0.0, 0.0],
        vec![0.0, 0.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("4x4")
}

/// Pseudo-pure |↑↑⟩: I_z¹/2 + I_z²/2 + I_z¹I_z².
pub fn pseudo_pure_up_up() -> DeviationDensity {
    deviation_from_terms(&[
        (0.5, spin_operator(Spin::One, Cartesian::Z)),
        (0.5, spin_operator(Spin::Two, Cartesian::Z)),
        (1.0, product_operator(Cartesian::Z, Cartesian::Z)),
    ])
}

/// Deviation after G₃: I_x¹I_x² + I_y¹I_y² − I_z¹I_z².
pub fn synthesized_psi3() -> DeviationDensity {
    deviation_from_terms(&[
        (1.0, product_operator(Cartesian::X, Cartesian::X)),
        (1.0, product_operator(Cartesian::Y, Cartesian::Y)),
        (-1.0, product_operator(Cartesian::Z, Cartesian::Z)),
    ])
}

/// ψ₃ after a [π/2]_y¹ readout in product-operator form:
/// I_z¹I_x² + I_y¹I_y² + I_x¹I_z².
pub fn psi3_readout_product_form() -> DeviationDensity {
    deviation_from_terms(&[
        (1.0, product_operator(Cartesian::Z, Cartesian::X)),
        (1.0, product_operator(Cartesian::Y, Cartesian::Y)),
        (1.0, product_operator(Cartesian::X, Cartesian::Z)),
    ])
}

fn quarter(rows: [[f64; 4]; 4]) -> DeviationDensity {
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x / 4.0).collect())
        .collect();
    DeviationDensity::from_real_rows(&rows).expect("symmetric fixture")
}

/// Density of ψ_j after a [π/2]_y¹ readout, j = 1..=4.
pub fn bell_readout(j: u8) -> Option<DeviationDensity> {
    let rows = match j {
        1 => [
            [1.0, 1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0, 1.0],
            [-1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, 1.0],
        ],
        2 => [
            [1.0, -1.0, -1.0, -1.0],
            [-1.0, 1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0, 1.0],
        ],
        3 => [
            [1.0, 1.0, 1.0, -1.0],
            [1.0, 1.0, 1.0, -1.0],
            [1.0, 1.0, 1.0, -1.0],
            [-1.0, -1.0, -1.0, 1.0],
        ],
        4 => [
            [1.0, -1.0, 1.0, 1.0],
            [-1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, 1.0],
        ],
        _ => return None,
    };
    Some(quarter(rows))
}

/// Pseudo-pure |↑↑⟩ after a [π/2]_y readout of `spin`.
pub fn reference_readout(spin: Spin) -> DeviationDensity {
    match spin {
        Spin::One => quarter([
            [1.0, 0.0, -2.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [-2.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ]),
        Spin::Two => quarter([
            [1.0, -2.0, 0.0, 0.0],
            [-2.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ]),
    }
}
