//! Dense complex linear algebra over the computational basis.
//!
//! Basis ordering for two spins is |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ (index 0..3); the
//! first spin is the most significant factor of every Kronecker product.

use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default max-norm tolerance for equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance used when a value is tagged unitary, Hermitian or normalized.
pub const STRICT_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn check_square(m: &DMatrix<C64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyDimension);
    }
    Ok(m.nrows())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Square complex matrix: unitaries, propagators and sign-flip operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        check_square(&m)?;
        Ok(Self { m })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Ok(Self {
            m: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Constructor for operators that must be unitary to within [`STRICT_TOL`].
    pub fn unitary(m: DMatrix<C64>) -> Result<Self> {
        let op = Self::from_matrix(m)?;
        let err = op.unitarity_error();
        if err > STRICT_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn column(&self, col: usize) -> DVector<C64> {
        self.m.column(col).into_owned()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: &self.m * c }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..n {
            acc = Self {
                m: &self.m * &acc.m,
            };
        }
        acc
    }

    /// ‖U†U − I‖_max
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.m.adjoint() * &self.m - DMatrix::<C64>::identity(n, n)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.m - &other.m))
    }

    /// Finds a unit-modulus `phase` with `‖self − phase·other‖_max ≤ tol`.
    pub fn phase_equal(&self, other: &Operator, tol: f64) -> Result<Option<C64>> {
        check_dims(self.dim(), other.dim())?;
        let overlap = (other.m.adjoint() * &self.m).trace();
        if overlap.norm() < f64::EPSILON {
            return Ok(None);
        }
        let phase = overlap / overlap.norm();
        let residual = max_abs(&(&self.m - &other.m * phase));
        Ok((residual <= tol).then_some(phase))
    }
}

impl Mul for &Operator {
    type Output = Operator;

    /// Panics on dimension mismatch; use [`Operator::compose`] for a checked product.
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            m: &self.m * &rhs.m,
        }
    }
}

/// Kronecker product; `a` acts on the more significant factor.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kron(b)
}

pub fn adjoint(a: &Operator) -> Operator {
    a.adjoint()
}

/// Normalized complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    v: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > STRICT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { v })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm < f64::EPSILON {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            v: v / C64::new(norm, 0.0),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut v = DVector::from_element(dim, ZERO);
        v[index] = ONE;
        Ok(Self { v })
    }

    pub(crate) fn from_vector_unchecked(v: DVector<C64>) -> Self {
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.v
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.v[index]
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.v.dotc(&other.v))
    }

    pub fn with_phase(&self, phase: C64) -> Self {
        Self { v: &self.v * phase }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.v - &other.v).norm()
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(&self) -> DeviationDensity {
        DeviationDensity {
            m: &self.v * self.v.adjoint(),
        }
    }
}

/// Hermitian matrix holding a density or deviation density.
///
/// Deviation matrices need not be positive or unit-trace; only their
/// traceless part is observable.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationDensity {
    m: DMatrix<C64>,
}

impl DeviationDensity {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        check_square(&m)?;
        let err = max_abs(&(&m - m.adjoint()));
        if err > STRICT_TOL {
            return Err(Error::NotHermitian(err));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        Self::new(Operator::from_rows(rows)?.into_matrix())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Operator::from_real_rows(rows)?.into_matrix())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::from_element(dim, dim, ZERO),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// |ψ⟩⟨ψ| − I/N, the traceless deviation of a pseudo-pure state.
    pub fn pseudo_pure(psi: &StateVector) -> Self {
        let n = psi.dim();
        let mut rho = psi.projector();
        rho.m -= DMatrix::<C64>::identity(n, n) * C64::new(1.0 / n as f64, 0.0);
        rho
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn max_abs_diff(&self, other: &DeviationDensity) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.m - &other.m))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: &self.m * C64::new(s, 0.0),
        }
    }

    /// `self + offset·I`
    pub fn shifted(&self, offset: f64) -> Self {
        let n = self.dim();
        Self {
            m: &self.m + DMatrix::<C64>::identity(n, n) * C64::new(offset, 0.0),
        }
    }

    pub fn add(&self, other: &DeviationDensity) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    /// Keeps the diagonal and zeroes every coherence.
    pub fn diagonal_part(&self) -> Self {
        let n = self.dim();
        Self {
            m: DMatrix::from_fn(n, n, |i, j| if i == j { self.m[(i, i)] } else { ZERO }),
        }
    }

    /// Real part of the trace inner product tr(A†B).
    fn inner(&self, other: &DeviationDensity) -> f64 {
        self.m.dotc(&other.m).re
    }
}

/// Unitary action on a state (`U|x⟩`) or density (`U x U†`).
pub trait Apply<T> {
    fn apply(&self, x: &T) -> Result<T>;
}

impl Apply<StateVector> for Operator {
    fn apply(&self, x: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), x.dim())?;
        Ok(StateVector { v: &self.m * &x.v })
    }
}

impl Apply<DeviationDensity> for Operator {
    fn apply(&self, x: &DeviationDensity) -> Result<DeviationDensity> {
        check_dims(self.dim(), x.dim())?;
        Ok(DeviationDensity {
            m: &self.m * &x.m * self.m.adjoint(),
        })
    }
}

/// Witness for `a ≈ scale·b + offset·I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationFit {
    pub scale: f64,
    pub offset: f64,
    /// Max-norm residual of the fit.
    pub residual: f64,
}

/// Least-squares fit of `a` onto span{b, I}; returns the fit whether or not
/// it is an equivalence. `None` when `b` is a multiple of the identity.
pub fn fit_deviation(a: &DeviationDensity, b: &DeviationDensity) -> Result<Option<DeviationFit>> {
    check_dims(a.dim(), b.dim())?;
    let n = a.dim() as f64;
    let id = DeviationDensity::identity(a.dim());
    let bb = b.inner(b);
    let bi = b.inner(&id);
    let ab = b.inner(a);
    let ai = id.inner(a);
    let det = bb * n - bi * bi;
    if det <= 1e-12 * bb.max(1.0) * n {
        return Ok(None);
    }
    let scale = (ab * n - bi * ai) / det;
    let offset = (bb * ai - bi * ab) / det;
    let residual = a.max_abs_diff(&b.scaled(scale).shifted(offset));
    Ok(Some(DeviationFit {
        scale,
        offset,
        residual,
    }))
}

/// Equality of deviation matrices up to a positive scale and an identity
/// offset: `‖a − (scale·b + offset·I)‖_max ≤ tol` with `scale > 0`.
pub fn equiv_deviation(
    a: &DeviationDensity,
    b: &DeviationDensity,
    tol: f64,
) -> Result<Option<DeviationFit>> {
    Ok(fit_deviation(a, b)?.filter(|fit| fit.scale > tol && fit.residual <= tol))
}

/// ⟨ψ|ρ|ψ⟩, divided by tr ρ when the trace is positive.
pub fn fidelity(rho: &DeviationDensity, psi: &StateVector) -> Result<f64> {
    check_dims(rho.dim(), psi.dim())?;
    let expectation = psi.v.dotc(&(&rho.m * &psi.v)).re;
    let trace = rho.trace().re;
    if trace > DEFAULT_TOL {
        Ok(expectation / trace)
    } else {
        Ok(expectation)
    }
}

/// Finds a unit-modulus `phase` with `‖a − phase·b‖₂ ≤ tol`.
pub fn phase_equal(a: &StateVector, b: &StateVector, tol: f64) -> Result<Option<C64>> {
    let overlap = b.inner(a)?;
    if overlap.norm() < f64::EPSILON {
        return Ok(None);
    }
    let phase = overlap / overlap.norm();
    Ok((a.distance(&b.with_phase(phase)) <= tol).then_some(phase))
}
