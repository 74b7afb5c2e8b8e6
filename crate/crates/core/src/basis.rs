//! Orthonormal observable eigenbases and the standard constructions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::distribution::Distribution;
use crate::error::{check_dim, Error, Result};
use crate::state::PureState;

/// Tolerance on `<u_k, u_p> == delta_kp` when building a basis from data.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Eigenbasis `{phi_k}` of one observable, stored as `N` unit column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableBasis {
    label: String,
    vectors: Vec<PureState>,
}

impl ObservableBasis {
    /// Checks the vectors form an orthonormal basis of `C^N`.
    pub fn new(label: impl Into<String>, vectors: Vec<PureState>) -> Result<Self> {
        Self::with_tolerance(label, vectors, ORTHONORMALITY_TOL)
    }

    pub fn with_tolerance(
        label: impl Into<String>,
        vectors: Vec<PureState>,
        tol: f64,
    ) -> Result<Self> {
        let label = label.into();
        let n = vectors.len();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        for v in &vectors {
            check_dim(n, v.dim())?;
        }
        let basis = Self { label, vectors };
        let deviation = basis.orthonormality_error();
        if deviation > tol {
            return Err(Error::NotOrthonormal {
                label: basis.label,
                deviation,
            });
        }
        Ok(basis)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &PureState {
        &self.vectors[k]
    }

    /// Largest `|<u_k, u_p> - delta_kp|` over all pairs.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, u) in self.vectors.iter().enumerate() {
            for (p, v) in self.vectors.iter().enumerate().skip(k) {
                let target = if k == p { 1.0 } else { 0.0 };
                worst = worst.max((u.inner(v) - target).norm());
            }
        }
        worst
    }

    /// Coefficients `<phi_k, psi>` of `amps` in this basis.
    pub fn expand(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.expand_into(amps, &mut out);
        out
    }

    pub(crate) fn expand_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        for (o, phi) in out.iter_mut().zip(&self.vectors) {
            *o = crate::state::inner(phi.amplitudes(), amps);
        }
    }

    /// `sum_k coeffs[k] phi_k` in computational coordinates.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.synthesize_into(coeffs, &mut out);
        out
    }

    pub(crate) fn synthesize_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (c, phi) in coeffs.iter().zip(&self.vectors) {
            for (o, a) in out.iter_mut().zip(phi.amplitudes()) {
                *o += c * a;
            }
        }
    }

    /// Outcome probabilities `|<phi_k, psi>|^2` of `psi` in this basis.
    pub fn distribution(&self, psi: &PureState) -> Result<Distribution> {
        check_dim(self.dim(), psi.dim())?;
        Ok(Distribution::from_unit_state_probs(
            self.expand(psi.amplitudes()).iter().map(|c| c.norm_sqr()).collect(),
        ))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn check_min_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Identity-matrix columns `e_0 .. e_{N-1}` (position basis).
pub fn computational_basis(n: usize) -> Result<ObservableBasis> {
    check_min_dim(n)?;
    Ok(ObservableBasis {
        label: format!("computational-{n}"),
        vectors: (0..n).map(|k| PureState::basis_vector(n, k)).collect(),
    })
}

/// Discrete Fourier (momentum) basis; column `p` has entries `e^{2 pi i k p / N} / sqrt(N)`.
pub fn fourier_basis(n: usize) -> Result<ObservableBasis> {
    check_min_dim(n)?;
    Ok(ObservableBasis {
        label: format!("fourier-{n}"),
        vectors: (0..n).map(|p| fourier_vector(n, p)).collect(),
    })
}

fn fourier_vector(n: usize, p: usize) -> PureState {
    let scale = 1.0 / (n as f64).sqrt();
    let amps = (0..n)
        .map(|k| Complex64::from_polar(scale, 2.0 * PI * ((k * p) % n) as f64 / n as f64))
        .collect();
    PureState::from_unit(amps)
}

/// Chirp `e^{i pi c k^2 / N} / sqrt(N)` with `c = 2` for odd `N` and `c = 1`
/// for even `N`; unbiased to both the computational and Fourier bases.
pub fn chirp_state(n: usize) -> Result<PureState> {
    check_min_dim(n)?;
    let c = if n % 2 == 1 { 2 } else { 1 };
    let scale = 1.0 / (n as f64).sqrt();
    let amps = (0..n)
        .map(|k| {
            let turns = (c * k * k) % (2 * n);
            Complex64::from_polar(scale, PI * turns as f64 / n as f64)
        })
        .collect();
    Ok(PureState::from_unit(amps))
}

/// r-fold tensor power of the dimension-`p` Fourier basis, a basis of `C^{p^r}`.
///
/// Vector index `q = (q_1 .. q_r)` in base `p`, most significant digit first,
/// is `phi_{q_1} (x) ... (x) phi_{q_r}`.
pub fn tensor_fourier_basis(p: usize, r: usize) -> Result<ObservableBasis> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::InvalidConfig("tensor power r must be at least 1".into()));
    }
    let factor = fourier_basis(p)?;
    let mut vectors: Vec<Vec<Complex64>> = factor
        .vectors
        .iter()
        .map(|v| v.amplitudes().to_vec())
        .collect();
    for _ in 1..r {
        let mut next = Vec::with_capacity(vectors.len() * p);
        for v in &vectors {
            for w in &factor.vectors {
                next.push(kron(v, w.amplitudes()));
            }
        }
        vectors = next;
    }
    Ok(ObservableBasis {
        label: if r == 1 {
            format!("fourier-{p}")
        } else {
            format!("tensor-fourier-{p}^{r}")
        },
        vectors: vectors.into_iter().map(PureState::from_unit).collect(),
    })
}

fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chirp_is_flat_in_both_bases() {
        for n in 2..=9 {
            let psi = chirp_state(n).unwrap();
            for b in [computational_basis(n).unwrap(), fourier_basis(n).unwrap()] {
                let d = b.distribution(&psi).unwrap();
                assert!(d.is_flat(1e-12), "n = {n}, {}", b.label());
            }
        }
    }

    fn max_overlap_error(a: &ObservableBasis, b: &ObservableBasis) -> f64 {
        let f = 1.0 / a.dim() as f64;
        let mut worst: f64 = 0.0;
        for u in a.vectors() {
            for v in b.vectors() {
                worst = worst.max((u.inner(v).norm_sqr() - f).abs());
            }
        }
        worst
    }

    #[test]
    fn computational_is_identity() {
        let b = computational_basis(3).unwrap();
        for (k, v) in b.vectors().iter().enumerate() {
            for (i, z) in v.amplitudes().iter().enumerate() {
                let want = if i == k { 1.0 } else { 0.0 };
                assert_eq!(*z, Complex64::new(want, 0.0));
            }
        }
        assert_eq!(b.orthonormality_error(), 0.0);
    }

    #[test]
    fn fourier_two_is_hadamard() {
        let b = fourier_basis(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expected = [[h, h], [h, -h]];
        for (v, e) in b.vectors().iter().zip(expected) {
            for (z, x) in v.amplitudes().iter().zip(e) {
                assert!((z - Complex64::new(x, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fourier_unbiased_to_computational() {
        for n in 2..=9 {
            let c = computational_basis(n).unwrap();
            let f = fourier_basis(n).unwrap();
            assert!(max_overlap_error(&c, &f) < 1e-12, "n = {n}");
            assert!(f.orthonormality_error() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn small_dimensions_rejected() {
        assert!(matches!(computational_basis(1), Err(Error::DimensionTooSmall(1))));
        assert!(matches!(fourier_basis(0), Err(Error::DimensionTooSmall(0))));
    }

    #[test]
    fn tensor_fourier_reduces_to_fourier() {
        assert_eq!(tensor_fourier_basis(2, 1).unwrap(), fourier_basis(2).unwrap());
        assert_eq!(tensor_fourier_basis(3, 1).unwrap(), fourier_basis(3).unwrap());
    }

    #[test]
    fn tensor_fourier_four_matches_direct_products() {
        // independent construction: entry (k1 k2, q1 q2) = (-1)^{k1 q1 + k2 q2} / 2
        let b = tensor_fourier_basis(2, 2).unwrap();
        assert_eq!(b.dim(), 4);
        for q in 0..4 {
            let (q1, q2) = (q / 2, q % 2);
            for k in 0..4 {
                let (k1, k2) = (k / 2, k % 2);
                let sign = if (k1 * q1 + k2 * q2) % 2 == 0 { 0.5 } else { -0.5 };
                let z = b.vector(q).amplitudes()[k];
                assert!((z - Complex64::new(sign, 0.0)).norm() < 1e-15);
            }
        }
        let c = computational_basis(4).unwrap();
        assert!(max_overlap_error(&c, &b) < 1e-15);
    }

    #[test]
    fn tensor_fourier_rejects_composite() {
        assert!(matches!(tensor_fourier_basis(4, 2), Err(Error::NotPrime(4))));
        assert!(tensor_fourier_basis(3, 2).unwrap().orthonormality_error() < 1e-12);
    }

    #[test]
    fn new_checks_orthonormality() {
        let v = PureState::from_real(&[1.0, 1.0]).unwrap();
        let w = PureState::from_real(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            ObservableBasis::new("bad", vec![v, w]),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn primes() {
        let ps: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
