//! Unit-norm pure states with a fixed ray representative.
//!
//! A pure state is a ray in `C^N`. Every [`PureState`] is stored with unit
//! Euclidean norm and in the canonical gauge: the first component whose
//! modulus exceeds [`ZERO_THRESHOLD`] (relative to the vector norm) is real
//! and non-negative.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative modulus below which a component is treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// A normalized pure state in canonical gauge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Normalizes `amps` and rotates it into the canonical gauge.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let norm = norm(&amps);
        if norm == 0.0 || amps.is_empty() {
            return Err(Error::ZeroVector);
        }
        let mut amps = amps;
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|z| *z *= inv);
        canonicalize_in_place(&mut amps);
        Ok(Self { amps })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `e_k` of dimension `dim`.
    pub fn basis_vector(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Wraps amplitudes that are already unit-norm; the gauge is still fixed.
    pub(crate) fn from_unit(mut amps: Vec<Complex64>) -> Self {
        debug_assert!((norm(&amps) - 1.0).abs() < 1e-8);
        canonicalize_in_place(&mut amps);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// Elementwise complex conjugate in the computational basis.
    pub fn conj(&self) -> PureState {
        PureState::from_unit(self.amps.iter().map(|z| z.conj()).collect())
    }

    /// Returns `e^{i phase} |self>` re-canonicalized, which is the same state.
    pub fn with_global_phase(&self, phase: f64) -> PureState {
        let u = Complex64::from_polar(1.0, phase);
        PureState::from_unit(self.amps.iter().map(|z| z * u).collect())
    }
}

impl TryFrom<Vec<[f64; 2]>> for PureState {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        PureState::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<PureState> for Vec<[f64; 2]> {
    fn from(state: PureState) -> Self {
        state.amps.iter().map(|z| [z.re, z.im]).collect()
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotates `amps` so the first non-negligible component is real and non-negative.
pub fn canonicalize_in_place(amps: &mut [Complex64]) {
    let cutoff = ZERO_THRESHOLD * norm(amps);
    if let Some(lead) = amps.iter().find(|z| z.norm() > cutoff).copied() {
        let u = lead.conj() / lead.norm();
        amps.iter_mut().for_each(|z| *z *= u);
        // the leading component is now real up to rounding
        if let Some(z) = amps.iter_mut().find(|z| z.norm() > cutoff) {
            z.im = 0.0;
        }
    }
}
