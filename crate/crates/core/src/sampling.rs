//! Random states, bases and phase seeds.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::basis::ObservableBasis;
use crate::error::Result;
use crate::seed::PhaseSeed;
use crate::state::{self, PureState};

/// Haar-random pure state of dimension `n`.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::new(amps) {
            return s;
        }
    }
}

/// Haar-random orthonormal basis (Gram-Schmidt on a complex Ginibre matrix).
pub fn random_basis<R: Rng + ?Sized>(
    n: usize,
    label: impl Into<String>,
    rng: &mut R,
) -> Result<ObservableBasis> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for c in &cols {
                let proj = state::inner(c, &v);
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = state::norm(&v);
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    let vectors = cols.into_iter().map(PureState::new).collect::<Result<Vec<_>>>()?;
    ObservableBasis::new(label, vectors)
}

/// Uniform phases on the `(n - 1)`-torus.
pub fn random_seed<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhaseSeed {
    PhaseSeed::new((1..n).map(|_| rng.gen_range(0.0..TAU)).collect())
}

/// Random phase seed whose phases are multiples of `2 pi / order`.
pub fn lattice_seed<R: Rng + ?Sized>(n: usize, order: usize, rng: &mut R) -> PhaseSeed {
    assert!(order > 0, "lattice order must be positive");
    let step = TAU / order as f64;
    PhaseSeed::new((1..n).map(|_| step * rng.gen_range(0..order) as f64).collect())
}

/// Random state at Bures distance exactly `delta` from `center`.
pub fn perturb<R: Rng + ?Sized>(center: &PureState, delta: f64, rng: &mut R) -> PureState {
    let n = center.dim();
    let c = center.amplitudes();
    // unit direction orthogonal to center; rotation angle theta with
    // sqrt(2 - 2 cos theta) = delta
    let dir = loop {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        let proj = state::inner(c, &v);
        v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
        let norm = state::norm(&v);
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            break v;
        }
    };
    let theta = 2.0 * (delta / 2.0).asin();
    let amps = c
        .iter()
        .zip(&dir)
        .map(|(x, y)| x * theta.cos() + y * theta.sin())
        .collect();
    PureState::new(amps).expect("rotation of a unit vector is a unit vector")
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::bures_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=8 {
            let b = random_basis(n, "r", &mut rng).unwrap();
            assert!(b.orthonormality_error() < 1e-12);
        }
    }

    #[test]
    fn perturbation_has_requested_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            let c = random_state(n, &mut rng);
            let p = perturb(&c, 1e-3, &mut rng);
            assert!((bures_distance(&c, &p).unwrap() - 1e-3).abs() < 1e-12);
        }
    }

    #[test]
    fn seeds_live_on_torus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_seed(5, &mut rng);
        assert_eq!(s.phases().len(), 4);
        assert!(s.phases().iter().all(|a| (0.0..TAU).contains(a)));
    }
}
