//! Distances between rays and between outcome distributions.
//!
//! * [`bures_distance`]: `sqrt(2 - 2|<a,b>|)`, the minimum over global phases
//!   of the Euclidean distance between representatives.
//! * [`hellinger_distance`]: distance between the outcome distributions of
//!   two states in one basis, `(sum_k (sqrt(rho_k) - sqrt(sigma_k))^2)^(1/2)`.
//! * [`distributional_distance`]: root-mean-square of Hellinger distances over
//!   several bases.
//!
//! The Bures distance upper-bounds both distribution distances.

use num_complex::Complex64;

use crate::basis::ObservableBasis;
use crate::distribution::Distribution;
use crate::error::{check_dim, Error, Result};
use crate::state::PureState;

/// Bures distance between the rays of `a` and `b`.
///
/// Evaluated as `min_alpha || a - e^{i alpha} b ||` rather than through
/// `sqrt(2 - 2|<a,b>|)`, which loses all digits below ~1e-8.
pub fn bures_distance(a: &PureState, b: &PureState) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(bures_raw(a.amplitudes(), b.amplitudes()))
}

pub(crate) fn bures_raw(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap = crate::state::inner(b, a);
    let modulus = overlap.norm();
    let phase = if modulus > 0.0 {
        overlap / modulus
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Hellinger distance between two probability vectors of equal length.
pub fn hellinger_between(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    Ok(hellinger_raw(p.probs(), q.probs()))
}

pub(crate) fn hellinger_raw(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Hellinger distance between the distributions of `a` and `b` in `basis`.
pub fn hellinger_distance(basis: &ObservableBasis, a: &PureState, b: &PureState) -> Result<f64> {
    let p = basis.distribution(a)?;
    let q = basis.distribution(b)?;
    hellinger_between(&p, &q)
}

/// Root-mean-square Hellinger distance of `a` and `b` over `bases`.
pub fn distributional_distance(
    bases: &[ObservableBasis],
    a: &PureState,
    b: &PureState,
) -> Result<f64> {
    if bases.is_empty() {
        return Err(Error::InvalidProblem(
            "distributional distance needs at least one basis".into(),
        ));
    }
    let mut acc = 0.0;
    for basis in bases {
        acc += hellinger_distance(basis, a, b)?.powi(2);
    }
    Ok((acc / bases.len() as f64).sqrt())
}
