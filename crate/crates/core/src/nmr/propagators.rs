use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};

use super::{embed, Axis, Cartesian, RotationConvention, Spin, SpinSystem};

/// Closed-form exp(iθσ_a/2) for a = x or y.
fn single_spin_rotation(axis: Cartesian, theta: f64) -> Operator {
    let (s, c) = (theta / 2.0).sin_cos();
    let rows = match axis {
        Cartesian::X => vec![
            vec![C64::new(c, 0.0), C64::new(0.0, s)],
            vec![C64::new(0.0, s), C64::new(c, 0.0)],
        ],
        Cartesian::Y => vec![
            vec![C64::new(c, 0.0), C64::new(s, 0.0)],
            vec![C64::new(-s, 0.0), C64::new(c, 0.0)],
        ],
        Cartesian::Z => vec![
            vec![C64::from_polar(1.0, theta / 2.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::from_polar(1.0, -theta / 2.0)],
        ],
    };
    Operator::from_rows(&rows).expect("2x2")
}

/// On-resonance rf rotation of one spin, `exp(+i·angle·I_axis^spin)`.
pub fn rotation_pulse(spin: Spin, axis: Axis, angle: f64) -> Operator {
    rotation_pulse_with(spin, axis, angle, RotationConvention::Positive)
}

pub fn rotation_pulse_with(
    spin: Spin,
    axis: Axis,
    angle: f64,
    convention: RotationConvention,
) -> Operator {
    let (cart, sign) = axis.cartesian();
    let sense = match convention {
        RotationConvention::Positive => 1.0,
        RotationConvention::Negative => -1.0,
    };
    embed(spin, &single_spin_rotation(cart, sense * sign * angle))
}

fn check_duration(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "evolution time must be finite and non-negative, got {tau}"
        )));
    }
    Ok(())
}

// (m1, m2) for |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩
const ZEEMAN_LEVELS: [(f64, f64); 4] = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)];

/// Diagonal propagator from per-level phases given in cycles; each cycle
/// count is reduced mod 1 before conversion to radians.
fn diagonal_from_cycles(cycles: [f64; 4]) -> Operator {
    let d: Vec<C64> = cycles
        .iter()
        .map(|c| C64::from_polar(1.0, TAU * c.rem_euclid(1.0)))
        .collect();
    Operator::diagonal(&d)
}

/// Scalar-coupling evolution `exp(−i2πJ I_z¹I_z² τ)`.
pub fn j_evolution(tau: f64, system: &SpinSystem) -> Result<Operator> {
    check_duration(tau)?;
    let jt = system.j_coupling * tau;
    Ok(diagonal_from_cycles(
        ZEEMAN_LEVELS.map(|(m1, m2)| -jt * m1 * m2),
    ))
}

/// Free evolution `exp(−iHτ)` under
/// `H = −2πν₁I_z¹ − 2πν₂I_z² + 2πJ I_z¹I_z²` (ħ = 1).
pub fn full_evolution(tau: f64, system: &SpinSystem) -> Result<Operator> {
    check_duration(tau)?;
    let n1 = (system.nu1 * tau).rem_euclid(2.0);
    let n2 = (system.nu2 * tau).rem_euclid(2.0);
    let jt = system.j_coupling * tau;
    Ok(diagonal_from_cycles(
        ZEEMAN_LEVELS.map(|(m1, m2)| n1 * m1 + n2 * m2 - jt * m1 * m2),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;
    use crate::nmr::spin_operator;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn sys() -> SpinSystem {
        SpinSystem::chloroform()
    }

    /// exp(iθA) by Taylor series, independent of the closed form.
    fn expm_series(a: &Operator, theta: f64) -> Operator {
        let n = a.dim();
        let gen = a.scale(C64::new(0.0, theta));
        let mut term = Operator::identity(n);
        let mut acc = Operator::identity(n);
        for k in 1..60 {
            term = (&term * &gen).scale(C64::new(1.0 / k as f64, 0.0));
            acc = Operator::from_matrix(acc.matrix() + term.matrix()).unwrap();
        }
        acc
    }

    #[test]
    fn closed_form_matches_series() {
        for (axis, cart) in [(Axis::X, Cartesian::X), (Axis::Y, Cartesian::Y)] {
            for spin in [Spin::One, Spin::Two] {
                for theta in [0.3, -1.1, 2.5] {
                    let want = expm_series(&spin_operator(spin, cart), theta);
                    let got = rotation_pulse(spin, axis, theta);
                    assert!(got.max_abs_diff(&want) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn minus_axis_inverts() {
        let a = rotation_pulse(Spin::One, Axis::MinusY, 0.7);
        let b = rotation_pulse(Spin::One, Axis::Y, -0.7);
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        for axis in [Axis::X, Axis::MinusX, Axis::Y, Axis::MinusY] {
            let u = rotation_pulse(Spin::Two, axis, 0.0);
            assert!(u.max_abs_diff(&Operator::identity(4)) < 1e-15);
        }
    }

    #[test]
    fn full_turn_is_minus_identity() {
        let u = rotation_pulse(Spin::One, Axis::X, 2.0 * PI);
        assert!(u.max_abs_diff(&Operator::identity(4).scale(C64::new(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn negative_convention_is_inverse() {
        let a = rotation_pulse_with(Spin::Two, Axis::X, 0.9, RotationConvention::Negative);
        let b = rotation_pulse(Spin::Two, Axis::X, 0.9).adjoint();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn j_evolution_values() {
        let s = sys();
        assert!(
            j_evolution(0.0, &s)
                .unwrap()
                .max_abs_diff(&Operator::identity(4))
                < 1e-15
        );

        let half = j_evolution(1.0 / (2.0 * s.j_coupling), &s).unwrap();
        let m = C64::from_polar(1.0, -FRAC_PI_4);
        let p = C64::from_polar(1.0, FRAC_PI_4);
        assert!(half.max_abs_diff(&Operator::diagonal(&[m, p, p, m])) < 1e-15);

        let full = j_evolution(1.0 / s.j_coupling, &s).unwrap();
        let flip = Operator::real_diagonal(&[1.0, -1.0, -1.0, 1.0]);
        let ph = full.phase_equal(&flip, DEFAULT_TOL).unwrap().unwrap();
        assert!((ph - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn full_reduces_to_coupled_without_shifts() {
        let s = sys().without_shifts();
        for tau in [0.0, 1.3e-3, 4.65e-3] {
            let a = full_evolution(tau, &s).unwrap();
            let b = j_evolution(tau, &s).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
    }

    #[test]
    fn full_evolution_matches_series_at_small_time() {
        let s = SpinSystem::new(3.0, 7.0, 2.0, 0.5).unwrap();
        let h = Operator::from_matrix(
            spin_operator(Spin::One, Cartesian::Z).matrix() * C64::new(-TAU * s.nu1, 0.0)
                + spin_operator(Spin::Two, Cartesian::Z).matrix() * C64::new(-TAU * s.nu2, 0.0)
                + crate::nmr::product_operator(Cartesian::Z, Cartesian::Z).matrix()
                    * C64::new(TAU * s.j_coupling, 0.0),
        )
        .unwrap();
        let tau = 0.03;
        let want = expm_series(&h, -tau);
        assert!(full_evolution(tau, &s).unwrap().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(j_evolution(-1.0, &sys()).is_err());
        assert!(full_evolution(f64::NAN, &sys()).is_err());
    }
}
