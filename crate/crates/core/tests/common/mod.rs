//! Independent oracles shared by the integration suites.
//!
//! Everything here works on raw amplitude vectors with textbook formulas so
//! it does not share code paths with the library routines it checks.

#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use pauli_forge::basis::ObservableBasis;
use pauli_forge::distribution::Distribution;
use pauli_forge::state::PureState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Amps = Vec<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `sqrt(2 - 2 |<a, b>|)` for unit vectors.
pub fn bures_formula(a: &[Complex64], b: &[Complex64]) -> f64 {
    (2.0 - 2.0 * dot(a, b).norm().min(1.0)).max(0.0).sqrt()
}

/// `min_alpha |a - e^{i alpha} b|`, evaluated componentwise so tiny
/// distances keep their digits.
pub fn aligned_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let o = dot(b, a);
    let phase = if o.norm() > 0.0 { o / o.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Outcome probabilities `|<phi_k, psi>|^2`.
pub fn probabilities(basis: &ObservableBasis, psi: &[Complex64]) -> Vec<f64> {
    basis
        .vectors()
        .iter()
        .map(|v| dot(v.amplitudes(), psi).norm_sqr())
        .collect()
}

pub fn hellinger_formula(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// One imposition step written out directly: coefficients in `basis` get the
/// target moduli and keep their phases, with phase one for zero coefficients.
pub fn impose_formula(basis: &ObservableBasis, target: &[f64], psi: &[Complex64]) -> Amps {
    let n = psi.len();
    let scale = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in basis.vectors().iter().enumerate() {
        let c = dot(v.amplitudes(), psi);
        let phase = if c.norm() > 1e-12 * scale {
            c / c.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let coeff = phase * target[k].sqrt();
        for (o, x) in out.iter_mut().zip(v.amplitudes()) {
            *o += coeff * x;
        }
    }
    out
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Standard complete set of `p + 1` mutually unbiased bases for a prime `p`:
/// the computational basis plus `(1/sqrt p) w^{a k^2 + b k}` for odd `p`, and
/// the Pauli eigenbases for `p = 2`.
pub fn analytic_mubs(p: usize) -> Vec<Vec<Amps>> {
    let s = 1.0 / (p as f64).sqrt();
    let mut sets = Vec::with_capacity(p + 1);
    sets.push(
        (0..p)
            .map(|j| {
                (0..p)
                    .map(|k| Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect(),
    );
    if p == 2 {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(s, 0.0);
        sets.push(vec![vec![one, one], vec![one, -one]]);
        sets.push(vec![vec![one, i * s], vec![one, -i * s]]);
        return sets;
    }
    for a in 0..p {
        sets.push(
            (0..p)
                .map(|b| {
                    (0..p)
                        .map(|k| {
                            let e = (a * k * k + b * k) % p;
                            Complex64::from_polar(s, TAU * e as f64 / p as f64)
                        })
                        .collect()
                })
                .collect(),
        );
    }
    sets
}

/// Largest deviation from `|<u, v>|^2 = 1/N` across bases and from
/// orthonormality within bases.
pub fn mub_errors(bases: &[Vec<Amps>]) -> (f64, f64) {
    let n = bases[0][0].len();
    let mut unbias: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for (a, ba) in bases.iter().enumerate() {
        for (b, bb) in bases.iter().enumerate() {
            for (i, u) in ba.iter().enumerate() {
                for (j, v) in bb.iter().enumerate() {
                    let o = dot(u, v);
                    if a == b {
                        let want = if i == j { 1.0 } else { 0.0 };
                        ortho = ortho.max((o - want).norm());
                    } else {
                        unbias = unbias.max((o.norm_sqr() - 1.0 / n as f64).abs());
                    }
                }
            }
        }
    }
    (unbias, ortho)
}

pub fn amps_of(basis: &ObservableBasis) -> Vec<Amps> {
    basis.vectors().iter().map(|v| v.amplitudes().to_vec()).collect()
}

/// Haar-ish random unit vector drawn from Gaussian components.
pub fn gaussian_amps<R: Rng>(n: usize, rng: &mut R) -> Amps {
    loop {
        let v: Amps = (0..n)
            .map(|_| {
                // Box-Muller
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                Complex64::from_polar((-2.0 * u1.ln()).sqrt(), TAU * u2)
            })
            .collect();
        let l = norm(&v);
        if l > 1e-6 {
            return v.into_iter().map(|z| z / l).collect();
        }
    }
}

/// A unit vector with roughly half its components set exactly to zero.
pub fn sparse_amps<R: Rng>(n: usize, rng: &mut R) -> Amps {
    let mut v = gaussian_amps(n, rng);
    let keep = rng.gen_range(0..n);
    for (k, z) in v.iter_mut().enumerate() {
        if k != keep && rng.gen_bool(0.5) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    let l = norm(&v);
    v.into_iter().map(|z| z / l).collect()
}

pub fn state(amps: Amps) -> PureState {
    PureState::new(amps).expect("non-zero finite vector")
}

pub fn distribution(probs: Vec<f64>) -> Distribution {
    let sum: f64 = probs.iter().sum();
    Distribution::new(probs.into_iter().map(|p| (p / sum).clamp(0.0, 1.0)).collect())
        .expect("valid distribution")
}

/// The `N = 2` conjugate of a ray, `(a, b) -> (a*, b*)`.
pub fn conjugate(psi: &PureState) -> PureState {
    state(psi.amplitudes().iter().map(|z| z.conj()).collect())
}


pub mod checks;
