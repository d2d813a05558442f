use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};

use super::SearchSpec;

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        col *= ph;
    }
    Operator::unitary(q)
}

/// Random Haar unitary, random source and `marked_count` distinct marked states.
pub fn random_spec<R: Rng + ?Sized>(
    dim: usize,
    marked_count: usize,
    rng: &mut R,
) -> Result<SearchSpec> {
    if marked_count == 0 || marked_count > dim {
        return Err(Error::InvalidArgument(format!(
            "marked count must lie in 1..={dim}, got {marked_count}"
        )));
    }
    let unitary = haar_unitary(dim, rng)?;
    let source = rng.random_range(0..dim);
    let marked = index::sample(rng, dim, marked_count).into_vec();
    SearchSpec::new(dim, source, marked, unitary)
}
