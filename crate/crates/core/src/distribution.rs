use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(probs) == 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Outcome probabilities of one observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates entries in `[0, 1]` summing to one within [`NORMALIZATION_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} = {p} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Trusted constructor for probabilities computed from a unit vector.
    pub(crate) fn from_unit_state_probs(mut probs: Vec<f64>) -> Self {
        probs.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
        Self { probs }
    }

    /// All outcomes equally likely.
    pub fn flat(dim: usize) -> Self {
        Self {
            probs: vec![1.0 / dim as f64; dim],
        }
    }

    /// Certain outcome `k`.
    pub fn sharp(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut probs = vec![0.0; dim];
        probs[k] = 1.0;
        Self { probs }
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_flat(&self, tol: f64) -> bool {
        let f = 1.0 / self.dim() as f64;
        self.probs.iter().all(|p| (p - f).abs() <= tol)
    }

    pub fn is_sharp(&self, tol: f64) -> bool {
        self.probs.iter().any(|&p| (p - 1.0).abs() <= tol)
    }

    /// Square roots of the probabilities (target moduli of amplitudes).
    pub fn amplitudes(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.sqrt()).collect()
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Distribution::new(probs)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Distribution::new(vec![0.5, 0.5]).is_ok());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn flat_and_sharp() {
        assert!(Distribution::flat(4).is_flat(1e-15));
        assert!(!Distribution::flat(4).is_sharp(1e-15));
        assert!(Distribution::sharp(3, 2).is_sharp(0.0));
        assert_eq!(Distribution::sharp(3, 2).probs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn json_is_a_plain_array() {
        let d: Distribution = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(d.probs(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<Distribution>("[0.25, 0.5]").is_err());
    }
}
