//! Damped Gauss-Newton refinement of stalled iterates.
//!
//! Near a degenerate partner (two partners about to merge, or a generator
//! equal to its own conjugate) the imposition sequence converges sublinearly
//! and no iteration budget reaches `tol`. [`polish`] solves the partner
//! equations directly from the stalled iterate instead. The state keeps the
//! first target's moduli and only its relative phases move, so any root is a
//! genuine partner.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::imposition::ImpositionChain;
use crate::state::{PureState, ZERO_THRESHOLD};

const MAX_STEPS: usize = 200;
/// Squared probability mismatch treated as an exact root. Vanishing target
/// probabilities need `p` far below rounding of `rho` before their Hellinger
/// term drops under the iteration tolerance, hence the tiny floor.
const COST_FLOOR: f64 = 1e-60;

/// Refines `psi` toward a state reproducing every target of `chain`.
///
/// Returns `None` when the solve does not reach a root.
pub fn polish(chain: &ImpositionChain, psi: &PureState) -> Option<PureState> {
    if chain.dim() != psi.dim() {
        return None;
    }
    let first = &chain.steps()[0];
    let moduli = first.target().amplitudes();
    let active: Vec<usize> = (0..moduli.len()).filter(|&k| moduli[k] > ZERO_THRESHOLD).collect();
    let reference = active[0];
    let free = &active[1..];

    let coeffs = first.basis().expand(psi.amplitudes());
    let ref_arg = coeffs[reference].arg();
    let mut theta: Vec<f64> = free.iter().map(|&k| coeffs[k].arg() - ref_arg).collect();

    // columns of each later basis' overlap with the scaled first-basis vectors
    let overlaps: Vec<Vec<Vec<Complex64>>> = chain.steps()[1..]
        .iter()
        .map(|s| {
            active
                .iter()
                .map(|&k| {
                    let v = first.basis().vector(k).amplitudes();
                    s.basis().expand(v).into_iter().map(|z| z * moduli[k]).collect()
                })
                .collect()
        })
        .collect();
    let targets: Vec<&[f64]> = chain.steps()[1..].iter().map(|s| s.target().probs()).collect();

    let eval = |theta: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let phases: Vec<Complex64> = std::iter::once(Complex64::new(1.0, 0.0))
            .chain(theta.iter().map(|&t| Complex64::from_polar(1.0, t)))
            .collect();
        let rows: usize = targets.iter().map(|t| t.len()).sum();
        let mut f = DVector::zeros(rows);
        let mut jac = DMatrix::zeros(rows, theta.len());
        let mut row = 0;
        for (cols, target) in overlaps.iter().zip(&targets) {
            for (l, &rho) in target.iter().enumerate() {
                let c: Complex64 = cols.iter().zip(&phases).map(|(col, u)| col[l] * u).sum();
                f[row] = c.norm_sqr() - rho;
                for (j, (col, u)) in cols.iter().zip(&phases).enumerate().skip(1) {
                    let dc = Complex64::new(0.0, 1.0) * col[l] * u;
                    jac[(row, j - 1)] = 2.0 * (c.conj() * dc).re;
                }
                row += 1;
            }
        }
        (f, jac)
    };

    if !theta.is_empty() {
        let (mut f, mut jac) = eval(&theta);
        let mut cost = f.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..MAX_STEPS {
            if cost < COST_FLOOR {
                break;
            }
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &f;
            let mut damped = jtj.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * (jtj[(i, i)] + 1e-300);
            }
            let Some(delta) = damped.lu().solve(&(-grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
            let (tf, tj) = eval(&trial);
            let trial_cost = tf.norm_squared();
            if trial_cost < cost {
                theta = trial;
                f = tf;
                jac = tj;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
            } else {
                lambda *= 4.0;
                if lambda > 1e12 {
                    break;
                }
            }
        }
        if !cost.is_finite() || cost.sqrt() > 1e-12 {
            return None;
        }
    }

    let mut amps = vec![Complex64::new(0.0, 0.0); chain.dim()];
    for (i, &k) in active.iter().enumerate() {
        let phase = if i == 0 { 0.0 } else { theta[i - 1] };
        let c = Complex64::from_polar(moduli[k], phase);
        for (a, v) in amps.iter_mut().zip(first.basis().vector(k).amplitudes()) {
            *a += c * v;
        }
    }
    PureState::new(amps).ok()
}
