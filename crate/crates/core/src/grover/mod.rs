//! Generalized amplitude amplification over an N-dimensional basis.
//!
//! With source |s⟩, marked set T and unitary U, the composite operator
//! `Q = −I_s U† I_t U` rotates `|s⟩` inside the plane it spans with
//! `U†Σ_t U_ts|t⟩`. After n rotations, `U Qⁿ|s⟩` is compared with the
//! predicted superposition `Σ_t U_ts|t⟩ / u`.

mod presets;
mod random;

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{phase_equal, Apply, Operator, StateVector, C64, DEFAULT_TOL, STRICT_TOL};

pub use presets::{bell_state, epr_presets, Family, PresetId, PresetRotation};
pub use random::{haar_unitary, random_spec};

/// Fidelity difference below which two iteration counts count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// How the marked-set sign flip is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OracleForm {
    /// `I − 2Σ_t|t⟩⟨t|`
    #[default]
    Literal,
    /// `−(I − 2Σ_t|t⟩⟨t|)`, i.e. the literal flip of the complement of T.
    /// Equal to the literal form up to a global sign of Q.
    Negated,
}

/// One amplitude-amplification problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpec {
    dim: usize,
    source: usize,
    marked: Vec<usize>,
    unitary: Operator,
    oracle: OracleForm,
    target: Option<StateVector>,
}

impl SearchSpec {
    pub fn new(
        dim: usize,
        source: usize,
        marked: impl IntoIterator<Item = usize>,
        unitary: Operator,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if source >= dim {
            return Err(Error::IndexOutOfRange { index: source, dim });
        }
        let marked = validate_marked(dim, marked)?;
        if unitary.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: unitary.dim(),
            });
        }
        let err = unitary.unitarity_error();
        if err > STRICT_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self {
            dim,
            source,
            marked,
            unitary,
            oracle: OracleForm::Literal,
            target: None,
        })
    }

    pub fn with_oracle(mut self, oracle: OracleForm) -> Self {
        self.oracle = oracle;
        self
    }

    /// Overrides the state that fidelities and phases are measured against.
    pub fn with_target(mut self, target: StateVector) -> Result<Self> {
        if target.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: target.dim(),
            });
        }
        self.target = Some(target);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Sorted marked indices.
    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn marked_count(&self) -> usize {
        self.marked.len()
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn oracle(&self) -> OracleForm {
        self.oracle
    }

    pub fn explicit_target(&self) -> Option<&StateVector> {
        self.target.as_ref()
    }

    /// Diagonal of the marked-set operator in this spec's oracle form.
    fn marked_signs(&self) -> Vec<f64> {
        let (hit, miss) = match self.oracle {
            OracleForm::Literal => (-1.0, 1.0),
            OracleForm::Negated => (1.0, -1.0),
        };
        let mut d = vec![miss; self.dim];
        for &t in &self.marked {
            d[t] = hit;
        }
        d
    }

    pub fn marked_operator(&self) -> Operator {
        Operator::real_diagonal(&self.marked_signs())
    }

    /// The explicit target if set, otherwise `U·predicted_target`.
    pub fn reference_target(&self) -> Result<StateVector> {
        match &self.target {
            Some(t) => Ok(t.clone()),
            None => self.unitary.apply(&predicted_target(self)?),
        }
    }

    /// `Q|v⟩` without forming Q.
    fn step(&self, v: &DVector<C64>, signs: &[f64]) -> DVector<C64> {
        let u = self.unitary.matrix();
        let mut w = u * v;
        for (x, s) in w.iter_mut().zip(signs) {
            *x *= *s;
        }
        let mut w = u.adjoint() * w;
        w[self.source] = -w[self.source];
        -w
    }

    /// States `U Qⁿ |s⟩` for n = 0..=n_max.
    pub fn trajectory(&self, n_max: usize) -> Vec<StateVector> {
        let signs = self.marked_signs();
        let mut v = DVector::from_element(self.dim, C64::new(0.0, 0.0));
        v[self.source] = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            if n > 0 {
                v = self.step(&v, &signs);
            }
            out.push(StateVector::from_vector_unchecked(
                self.unitary.matrix() * &v,
            ));
        }
        out
    }
}

fn validate_marked(dim: usize, marked: impl IntoIterator<Item = usize>) -> Result<Vec<usize>> {
    let mut m: Vec<usize> = marked.into_iter().collect();
    if m.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    m.sort_unstable();
    for w in m.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateMarked(w[0]));
        }
    }
    if let Some(&bad) = m.iter().find(|&&t| t >= dim) {
        return Err(Error::IndexOutOfRange { index: bad, dim });
    }
    Ok(m)
}

/// `I − 2|s⟩⟨s|`
pub fn sign_flip_source(dim: usize, source: usize) -> Result<Operator> {
    if source >= dim {
        return Err(Error::IndexOutOfRange { index: source, dim });
    }
    let mut d = vec![1.0; dim];
    d[source] = -1.0;
    Ok(Operator::real_diagonal(&d))
}

/// `I − 2Σ_t|t⟩⟨t|`
pub fn sign_flip_marked(dim: usize, marked: &[usize]) -> Result<Operator> {
    let marked = validate_marked(dim, marked.iter().copied())?;
    let mut d = vec![1.0; dim];
    for t in marked {
        d[t] = -1.0;
    }
    Ok(Operator::real_diagonal(&d))
}

/// `Q = −I_s U† I_t U`
pub fn grover_operator(spec: &SearchSpec) -> Result<Operator> {
    let is = sign_flip_source(spec.dim, spec.source)?;
    let u = spec.unitary();
    let q = &(&(&is * &u.adjoint()) * &spec.marked_operator()) * u;
    Ok(q.scale(C64::new(-1.0, 0.0)))
}

/// `u = √(Σ_t |U_ts|²)`
pub fn coupling_amplitude(spec: &SearchSpec) -> f64 {
    spec.marked
        .iter()
        .map(|&t| spec.unitary.entry(t, spec.source).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `(1/u) Σ_t U_ts U†|t⟩`
pub fn predicted_target(spec: &SearchSpec) -> Result<StateVector> {
    let u = coupling_amplitude(spec);
    if u < DEFAULT_TOL {
        return Err(Error::ZeroCoupling);
    }
    let mut image = DVector::from_element(spec.dim, C64::new(0.0, 0.0));
    for &t in &spec.marked {
        image[t] = spec.unitary.entry(t, spec.source) / u;
    }
    let v = spec.unitary.matrix().adjoint() * image;
    StateVector::normalized(v.iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub state: StateVector,
    pub iterations: usize,
    /// |⟨target|state⟩|²
    pub fidelity_to_target: f64,
    /// ⟨target|state⟩ normalized to unit modulus (1 when the overlap vanishes).
    pub global_phase: C64,
}

impl SynthesisResult {
    fn measure(state: StateVector, iterations: usize, target: &StateVector) -> Result<Self> {
        let overlap = target.inner(&state)?;
        let global_phase = if overlap.norm() > f64::EPSILON {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        Ok(Self {
            fidelity_to_target: overlap.norm_sqr().min(1.0),
            global_phase,
            state,
            iterations,
        })
    }

    /// Phase relating the state to the target, if they agree up to phase.
    pub fn phase_if_equal(&self, target: &StateVector, tol: f64) -> Result<Option<C64>> {
        phase_equal(&self.state, target, tol)
    }
}

/// `U Qⁿ |s⟩`, measured against the spec's reference target.
pub fn synthesize(spec: &SearchSpec, n: usize) -> Result<SynthesisResult> {
    let target = spec.reference_target()?;
    let state = spec.trajectory(n).pop().expect("non-empty trajectory");
    SynthesisResult::measure(state, n, &target)
}

/// Every iteration count from 0 to `n_max`.
pub fn sweep(spec: &SearchSpec, n_max: usize) -> Result<Vec<SynthesisResult>> {
    let target = spec.reference_target()?;
    spec.trajectory(n_max)
        .into_iter()
        .enumerate()
        .map(|(n, state)| SynthesisResult::measure(state, n, &target))
        .collect()
}

/// `round(π/(4u))`, at least 1. Asymptotic count for `u ≪ 1`.
pub fn iteration_estimate(u: f64) -> Result<usize> {
    if !(u > 0.0 && u <= 1.0 + STRICT_TOL) {
        return Err(Error::InvalidArgument(format!(
            "coupling amplitude must lie in (0, 1], got {u}"
        )));
    }
    Ok(((PI / (4.0 * u)).round() as usize).max(1))
}

/// Smallest n in `0..=n_max` maximizing the fidelity to the reference target.
pub fn best_iteration(spec: &SearchSpec, n_max: usize) -> Result<(usize, f64)> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let results = sweep(spec, n_max)?;
    let best = results
        .iter()
        .map(|r| r.fidelity_to_target)
        .fold(f64::NEG_INFINITY, f64::max);
    let pick = results
        .iter()
        .find(|r| r.fidelity_to_target >= best - TIE_TOL)
        .expect("non-empty sweep");
    Ok((pick.iterations, pick.fidelity_to_target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    #[test]
    fn source_flip() {
        let i0 = sign_flip_source(4, 0).unwrap();
        assert_eq!(i0, Operator::real_diagonal(&[-1.0, 1.0, 1.0, 1.0]));
        assert_eq!(
            sign_flip_source(2, 1).unwrap(),
            Operator::real_diagonal(&[1.0, -1.0])
        );
        assert_eq!(&i0 * &i0, Operator::identity(4));
        assert_eq!(
            sign_flip_source(4, 4),
            Err(Error::IndexOutOfRange { index: 4, dim: 4 })
        );
    }

    #[test]
    fn marked_flip() {
        let it = sign_flip_marked(4, &[1, 2]).unwrap();
        assert_eq!(it, Operator::real_diagonal(&[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(
            sign_flip_marked(4, &[0, 3]).unwrap(),
            Operator::real_diagonal(&[-1.0, 1.0, 1.0, -1.0])
        );
        assert_eq!(
            sign_flip_marked(4, &[0, 1, 2, 3]).unwrap(),
            Operator::identity(4).scale(C64::new(-1.0, 0.0))
        );
        assert_eq!(sign_flip_marked(4, &[]), Err(Error::EmptyMarkedSet));
        assert_eq!(
            sign_flip_marked(4, &[5]),
            Err(Error::IndexOutOfRange { index: 5, dim: 4 })
        );
        for t in [1, 2] {
            let e = StateVector::basis(4, t).unwrap();
            let flipped = it.apply(&e).unwrap();
            assert!(flipped.distance(&e.with_phase(C64::new(-1.0, 0.0))) < 1e-15);
        }
    }

    #[test]
    fn spec_validation() {
        let id = Operator::identity(4);
        assert!(SearchSpec::new(4, 4, [0], id.clone()).is_err());
        assert_eq!(
            SearchSpec::new(4, 0, [1, 1], id.clone()),
            Err(Error::DuplicateMarked(1))
        );
        assert!(SearchSpec::new(8, 0, [1], id.clone()).is_err());
        let not_unitary = Operator::real_diagonal(&[1.0, 1.0, 1.0, 2.0]);
        assert!(matches!(
            SearchSpec::new(4, 0, [1], not_unitary),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn identity_unitary_source_marked() {
        // Q = −I_s I_s = −I
        let spec = SearchSpec::new(4, 0, [0], Operator::identity(4)).unwrap();
        let q = grover_operator(&spec).unwrap();
        assert!(q.max_abs_diff(&Operator::identity(4).scale(C64::new(-1.0, 0.0))) < 1e-15);
        assert_eq!(coupling_amplitude(&spec), 1.0);
        let p = predicted_target(&spec).unwrap();
        assert!(p.distance(&StateVector::basis(4, 0).unwrap()) < 1e-15);
    }

    #[test]
    fn uncoupled_marked_set() {
        let spec = SearchSpec::new(4, 0, [2], Operator::identity(4)).unwrap();
        assert_eq!(coupling_amplitude(&spec), 0.0);
        assert_eq!(predicted_target(&spec), Err(Error::ZeroCoupling));
        assert_eq!(synthesize(&spec, 1).unwrap_err(), Error::ZeroCoupling);
    }

    #[test]
    fn zero_iterations_is_u_on_source() {
        let spec = epr_presets(3, 0, Family::Y).unwrap();
        let r = synthesize(&spec, 0).unwrap();
        let col = spec.unitary().column(0);
        let want = StateVector::new(col.iter().copied().collect()).unwrap();
        assert!(r.state.distance(&want) < 1e-15);
        assert!((r.fidelity_to_target - 0.25).abs() < 1e-12);
    }

    #[test]
    fn estimate_values() {
        assert_eq!(iteration_estimate(0.5).unwrap(), 2);
        assert_eq!(iteration_estimate(0.01).unwrap(), 79);
        assert_eq!(iteration_estimate(1.0).unwrap(), 1);
        assert!(iteration_estimate(0.0).is_err());
        assert!(iteration_estimate(-0.1).is_err());
        assert!(iteration_estimate(f64::NAN).is_err());
    }

    #[test]
    fn best_iteration_on_preset() {
        let spec = epr_presets(3, 0, Family::Y).unwrap();
        let (n, f) = best_iteration(&spec, 10).unwrap();
        assert_eq!(n, 1);
        assert!((f - 1.0).abs() < 1e-12);
        for n in [1, 4, 7] {
            assert!((synthesize(&spec, n).unwrap().fidelity_to_target - 1.0).abs() < 1e-12);
        }
        assert!(best_iteration(&spec, 0).is_err());
    }

    #[test]
    fn trajectory_matches_explicit_operator() {
        let spec = epr_presets(2, 0, Family::Y).unwrap();
        let q = grover_operator(&spec).unwrap();
        let s = StateVector::basis(4, 0).unwrap();
        for (n, state) in spec.trajectory(5).iter().enumerate() {
            let want = spec
                .unitary()
                .apply(&q.pow(n as u32).apply(&s).unwrap())
                .unwrap();
            assert!(state.distance(&want) < 1e-13);
        }
    }

    #[test]
    fn explicit_target_dimension_checked() {
        let spec = SearchSpec::new(4, 0, [0], Operator::identity(4)).unwrap();
        assert!(spec.with_target(StateVector::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn oracle_forms_agree_up_to_phase() {
        for j in 1..=4 {
            let shared = epr_presets(j, 0, Family::Y).unwrap();
            let literal = shared.clone().with_oracle(OracleForm::Literal);
            for n in 0..8 {
                let a = synthesize(&shared, n).unwrap();
                let b = synthesize(&literal, n).unwrap();
                assert!(
                    phase_equal(&a.state, &b.state, DEFAULT_TOL)
                        .unwrap()
                        .is_some(),
                    "j={j} n={n}"
                );
            }
        }
    }
}
