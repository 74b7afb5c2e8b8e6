//! Phase seeds: the `N - 1` relative phases that fully determine where an
//! imposition sequence started from a first-basis state ends up.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::ObservableBasis;
use crate::distribution::Distribution;
use crate::error::{check_dim, Result};
use crate::state::PureState;

/// Relative phases `(alpha_1, .., alpha_{N-1})`, each reduced into `[0, 2 pi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSeed {
    phases: Vec<f64>,
}

impl PhaseSeed {
    pub fn new(phases: Vec<f64>) -> Self {
        Self {
            phases: phases.into_iter().map(|a| a.rem_euclid(TAU)).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            phases: vec![0.0; len],
        }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Dimension of the states this seed parametrizes.
    pub fn state_dim(&self) -> usize {
        self.phases.len() + 1
    }
}

/// Builds `sum_k sqrt(rho_k) e^{i alpha_k} phi_k` with `alpha_0 = 0`.
pub fn state_from_seed(
    base: &Distribution,
    seed: &PhaseSeed,
    basis: &ObservableBasis,
) -> Result<PureState> {
    check_dim(basis.dim(), base.dim())?;
    check_dim(basis.dim(), seed.state_dim())?;
    let coeffs: Vec<Complex64> = base
        .amplitudes()
        .into_iter()
        .zip(std::iter::once(0.0).chain(seed.phases().iter().copied()))
        .map(|(r, alpha)| Complex64::from_polar(r, alpha))
        .collect();
    PureState::new(basis.synthesize(&coeffs))
}
