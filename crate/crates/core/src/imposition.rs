//! The physical imposition operator and its iteration.
//!
//! A single imposition `T_A` expands a state in the eigenbasis `{phi_k}` of
//! an observable, keeps the phase `u_k` of every coefficient and replaces its
//! modulus by the measured `sqrt(rho_k)`:
//!
//! ```text
//! T_A psi = sum_k sqrt(rho_k) u_k phi_k,   u_k = <phi_k,psi> / |<phi_k,psi>|
//! ```
//!
//! with `u_k = 1` when the coefficient vanishes. `T_A` is idempotent and
//! norm-preserving. A chain `T_{A1..Am} = T_{Am} .. T_{A1}` applies the steps
//! in listed order; it is not idempotent, and [`iterate`] follows the
//! sequence `psi_n = T^n psi_0` until it settles.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::ObservableBasis;
use crate::distribution::Distribution;
use crate::error::{check_dim, Error, Result};
use crate::metrics::{bures_raw, hellinger_raw};
use crate::state::{self, PureState, ZERO_THRESHOLD};

/// One observable's eigenbasis together with its measured distribution.
#[derive(Clone, Debug)]
pub struct ImpositionStep {
    basis: ObservableBasis,
    target: Distribution,
    moduli: Vec<f64>,
}

impl ImpositionStep {
    pub fn new(basis: ObservableBasis, target: Distribution) -> Result<Self> {
        check_dim(basis.dim(), target.dim())?;
        let moduli = target.amplitudes();
        Ok(Self {
            basis,
            target,
            moduli,
        })
    }

    pub fn basis(&self) -> &ObservableBasis {
        &self.basis
    }

    pub fn target(&self) -> &Distribution {
        &self.target
    }

    fn apply_raw(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); amps.len()];
        let mut out = coeffs.clone();
        self.apply_into(amps, &mut coeffs, &mut out);
        out
    }

    fn apply_into(&self, amps: &[Complex64], coeffs: &mut [Complex64], out: &mut [Complex64]) {
        let cutoff = ZERO_THRESHOLD * state::norm(amps);
        self.basis.expand_into(amps, coeffs);
        for (c, &r) in coeffs.iter_mut().zip(&self.moduli) {
            let m = c.norm();
            *c = if m >= cutoff && m > 0.0 {
                *c * (r / m)
            } else {
                Complex64::new(r, 0.0)
            };
        }
        self.basis.synthesize_into(coeffs, out);
    }

    /// Hellinger distance between `amps`' distribution and the target.
    fn mismatch_raw(&self, amps: &[Complex64]) -> f64 {
        let probs: Vec<f64> = self.basis.expand(amps).iter().map(|c| c.norm_sqr()).collect();
        hellinger_raw(&probs, self.target.probs())
    }
}

/// Ordered imposition steps sharing one dimension.
#[derive(Clone, Debug)]
pub struct ImpositionChain {
    steps: Vec<ImpositionStep>,
}

impl ImpositionChain {
    pub fn new(steps: Vec<ImpositionStep>) -> Result<Self> {
        let first = steps
            .first()
            .ok_or_else(|| Error::InvalidProblem("imposition chain needs at least one step".into()))?;
        let n = first.basis.dim();
        for s in &steps {
            check_dim(n, s.basis.dim())?;
        }
        Ok(Self { steps })
    }

    /// Pairs `bases[j]` with `targets[j]`.
    pub fn from_parts(bases: &[ObservableBasis], targets: &[Distribution]) -> Result<Self> {
        if bases.len() != targets.len() {
            return Err(Error::InvalidProblem(format!(
                "{} bases but {} target distributions",
                bases.len(),
                targets.len()
            )));
        }
        Self::new(
            bases
                .iter()
                .zip(targets)
                .map(|(b, t)| ImpositionStep::new(b.clone(), t.clone()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.steps[0].basis.dim()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[ImpositionStep] {
        &self.steps
    }

    pub(crate) fn apply_raw(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut ws = Workspace::new(amps.len());
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        self.apply_with(amps, &mut out, &mut ws);
        out
    }

    fn apply_with(&self, amps: &[Complex64], out: &mut [Complex64], ws: &mut Workspace) {
        self.steps[0].apply_into(amps, &mut ws.coeffs, out);
        for step in &self.steps[1..] {
            ws.scratch.copy_from_slice(out);
            step.apply_into(&ws.scratch, &mut ws.coeffs, out);
        }
    }

    /// Per-step Hellinger mismatch between `psi` and the targets.
    pub fn mismatches(&self, psi: &PureState) -> Result<Vec<f64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(self
            .steps
            .iter()
            .map(|s| s.mismatch_raw(psi.amplitudes()))
            .collect())
    }

    /// Distributional distance between `psi` and a virtual generator of the targets.
    pub fn residual(&self, psi: &PureState) -> Result<f64> {
        check_dim(self.dim(), psi.dim())?;
        Ok(self.residual_raw(psi.amplitudes()))
    }

    pub(crate) fn residual_raw(&self, amps: &[Complex64]) -> f64 {
        let sum: f64 = self.steps.iter().map(|s| s.mismatch_raw(amps).powi(2)).sum();
        (sum / self.steps.len() as f64).sqrt()
    }
}

struct Workspace {
    coeffs: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); n],
        }
    }
}

/// Applies a single imposition step.
pub fn impose(step: &ImpositionStep, psi: &PureState) -> Result<PureState> {
    check_dim(step.basis.dim(), psi.dim())?;
    Ok(PureState::from_unit(step.apply_raw(psi.amplitudes())))
}

/// Applies the steps of `chain` in listed order.
pub fn impose_chain(chain: &ImpositionChain, psi: &PureState) -> Result<PureState> {
    check_dim(chain.dim(), psi.dim())?;
    Ok(PureState::from_unit(chain.apply_raw(psi.amplitudes())))
}

/// Stopping rules for [`iterate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub cycle_window: usize,
    /// Recurrences are only reported as cycles while the residual stays at or
    /// above this floor; below it the sequence is still creeping toward a
    /// solution and keeps iterating.
    pub cycle_residual_floor: f64,
}

pub const DEFAULT_TOL: f64 = 1e-10;
/// `max_iter` per unit of `N * m`. Slowly attracting undesirable fixed points
/// take several thousand sweeps already at `N = 3`.
pub const DEFAULT_ITER_PER_DIM_STEP: usize = 10_000;
pub const DEFAULT_CYCLE_WINDOW: usize = 8;
pub const DEFAULT_CYCLE_RESIDUAL_FLOOR: f64 = 1e-6;

impl IterationConfig {
    /// Defaults scaled to a problem of dimension `n` with `m` observables.
    pub fn for_problem(n: usize, m: usize) -> Self {
        Self {
            max_iter: DEFAULT_ITER_PER_DIM_STEP * n.max(1) * m.max(1),
            tol: DEFAULT_TOL,
            cycle_window: DEFAULT_CYCLE_WINDOW,
            cycle_residual_floor: DEFAULT_CYCLE_RESIDUAL_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.cycle_residual_floor.is_nan() || self.cycle_residual_floor < 0.0 {
            return Err(Error::InvalidConfig(
                "cycle_residual_floor must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationStatus {
    Converged,
    CycleDetected,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub final_state: PureState,
    pub iterations: usize,
    pub status: IterationStatus,
    /// Distributional distance of `final_state` to the targets.
    pub residual: f64,
    /// Bures distance between the last two iterates.
    pub last_step: f64,
    /// Recurrence period for [`IterationStatus::CycleDetected`]; `1` is a
    /// fixed point of the chain that does not reproduce the targets.
    pub cycle_period: Option<usize>,
}

/// One row of an iteration trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub bures_step: f64,
}

/// Iterates `psi_{n+1} = T psi_n` from `seed`.
pub fn iterate(
    chain: &ImpositionChain,
    seed: &PureState,
    config: &IterationConfig,
) -> Result<IterationResult> {
    config.validate()?;
    check_dim(chain.dim(), seed.dim())?;
    run(chain, seed, config, None)
}

/// Like [`iterate`], reporting every iteration to `trace`.
pub fn iterate_traced(
    chain: &ImpositionChain,
    seed: &PureState,
    config: &IterationConfig,
    mut trace: impl FnMut(TraceRow),
) -> Result<IterationResult> {
    config.validate()?;
    check_dim(chain.dim(), seed.dim())?;
    run(chain, seed, config, Some(&mut trace))
}

fn run(
    chain: &ImpositionChain,
    seed: &PureState,
    config: &IterationConfig,
    mut trace: Option<&mut dyn FnMut(TraceRow)>,
) -> Result<IterationResult> {
    let n_dim = chain.dim();
    let mut ws = Workspace::new(n_dim);
    let mut current = seed.amplitudes().to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); n_dim];
    // ring buffer of the most recent iterates, newest at `head`
    let window = config.cycle_window;
    let mut history: Vec<Vec<Complex64>> = Vec::with_capacity(window);
    let mut head = 0usize;
    let mut last_step = f64::INFINITY;

    for n in 1..=config.max_iter {
        chain.apply_with(&current, &mut next, &mut ws);
        last_step = bures_raw(&next, &current);
        // the residual is only needed once the iterate has stalled
        let mut residual = None;
        if let Some(t) = trace.as_mut() {
            let r = chain.residual_raw(&next);
            residual = Some(r);
            t(TraceRow {
                iteration: n,
                residual: r,
                bures_step: last_step,
            });
        }

        if last_step < config.tol {
            let r = *residual.get_or_insert_with(|| chain.residual_raw(&next));
            if r < config.tol {
                return Ok(finish(chain, next, n, IterationStatus::Converged, last_step, None));
            }
        }

        if window > 0 {
            let period = if last_step < config.tol {
                Some(1)
            } else {
                (0..history.len())
                    .map(|back| &history[(head + history.len() - back) % history.len()])
                    .position(|h| bures_raw(&next, h) < config.tol)
                    .map(|p| p + 2)
                    .filter(|&p| p <= window)
            };
            if let Some(p) = period {
                let r = *residual.get_or_insert_with(|| chain.residual_raw(&next));
                if r >= config.cycle_residual_floor {
                    return Ok(finish(
                        chain,
                        next,
                        n,
                        IterationStatus::CycleDetected,
                        last_step,
                        Some(p),
                    ));
                }
            }
            // push `current` as the newest history entry
            if history.len() < window {
                history.push(current.clone());
                head = history.len() - 1;
            } else {
                head = (head + 1) % window;
                history[head].copy_from_slice(&current);
            }
        }
        std::mem::swap(&mut current, &mut next);
    }

    Ok(finish(
        chain,
        current,
        config.max_iter,
        IterationStatus::MaxIterations,
        last_step,
        None,
    ))
}

fn finish(
    chain: &ImpositionChain,
    amps: Vec<Complex64>,
    iterations: usize,
    status: IterationStatus,
    last_step: f64,
    cycle_period: Option<usize>,
) -> IterationResult {
    // re-normalize away accumulated rounding before fixing the gauge
    let norm = state::norm(&amps);
    let amps: Vec<Complex64> = amps.into_iter().map(|z| z / norm).collect();
    let residual = chain.residual_raw(&amps);
    IterationResult {
        final_state: PureState::from_unit(amps),
        iterations,
        status,
        residual,
        last_step,
        cycle_period,
    }
}

/// Writes a trace as CSV with header `iteration,residual,bures_step`.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "iteration,residual,bures_step")?;
    for r in rows {
        writeln!(out, "{},{:e},{:e}", r.iteration, r.residual, r.bures_step)?;
    }
    Ok(())
}

/// `true` iff one application of the chain moves `psi` by less than `tol` (Bures).
pub fn is_fixed_point(chain: &ImpositionChain, psi: &PureState, tol: f64) -> bool {
    if chain.dim() != psi.dim() {
        return false;
    }
    bures_raw(&chain.apply_raw(psi.amplitudes()), psi.amplitudes()) < tol
}

/// `true` iff `psi` reproduces every step's target within `tol` (Hellinger),
/// i.e. it is a fixed point of each single imposition on its own.
pub fn is_partner(chain: &ImpositionChain, psi: &PureState, tol: f64) -> bool {
    if chain.dim() != psi.dim() {
        return false;
    }
    chain
        .steps
        .iter()
        .all(|s| s.mismatch_raw(psi.amplitudes()) < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{computational_basis, fourier_basis};
    use crate::metrics::bures_distance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn step(basis: ObservableBasis, probs: Vec<f64>) -> ImpositionStep {
        ImpositionStep::new(basis, Distribution::new(probs).unwrap()).unwrap()
    }

    #[test]
    fn keeps_phases_and_imposes_moduli() {
        let s = step(computational_basis(2).unwrap(), vec![0.5, 0.5]);
        let psi = PureState::new(vec![c(0.3, 0.4), c(-0.6, 0.1)]).unwrap();
        let out = impose(&s, &psi).unwrap();
        let a = psi.amplitudes();
        let h = 0.5f64.sqrt();
        let expected = PureState::new(vec![a[0] / a[0].norm() * h, a[1] / a[1].norm() * h]).unwrap();
        assert!(bures_distance(&out, &expected).unwrap() < 1e-15);
    }

    #[test]
    fn zero_coefficients_take_unit_phase() {
        // psi = phi_1, so the phi_0 and phi_2 coefficients vanish
        let basis = fourier_basis(3).unwrap();
        let s = step(basis.clone(), vec![0.2, 0.3, 0.5]);
        let out = impose(&s, basis.vector(1)).unwrap();
        let coeffs = [c(0.2f64.sqrt(), 0.0), c(0.3f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)];
        let expected = PureState::new(basis.synthesize(&coeffs)).unwrap();
        assert!(bures_distance(&out, &expected).unwrap() < 1e-15);
    }

    #[test]
    fn single_step_is_idempotent() {
        let s = step(fourier_basis(3).unwrap(), vec![0.1, 0.6, 0.3]);
        let psi = PureState::new(vec![c(0.3, 0.4), c(-0.6, 0.1), c(0.2, -0.5)]).unwrap();
        let once = impose(&s, &psi).unwrap();
        let twice = impose(&s, &once).unwrap();
        assert!(bures_distance(&once, &twice).unwrap() < 1e-15);
        let dist = s.basis().distribution(&once).unwrap();
        for (p, q) in dist.probs().iter().zip(s.target().probs()) {
            assert!((p - q).abs() < 1e-15);
        }
    }

    #[test]
    fn chain_order_and_last_target() {
        let a = step(computational_basis(3).unwrap(), vec![0.2, 0.3, 0.5]);
        let b = step(fourier_basis(3).unwrap(), vec![0.6, 0.1, 0.3]);
        let psi = PureState::new(vec![c(0.3, 0.4), c(-0.6, 0.1), c(0.2, -0.5)]).unwrap();
        let chain = ImpositionChain::new(vec![a.clone(), b.clone()]).unwrap();
        let by_hand = impose(&b, &impose(&a, &psi).unwrap()).unwrap();
        let out = impose_chain(&chain, &psi).unwrap();
        assert!(bures_distance(&out, &by_hand).unwrap() < 1e-15);
        assert!(chain.mismatches(&out).unwrap()[1] < 1e-12);

        let single = ImpositionChain::new(vec![a.clone()]).unwrap();
        assert_eq!(impose_chain(&single, &psi).unwrap(), impose(&a, &psi).unwrap());
        let doubled = ImpositionChain::new(vec![a.clone(), a.clone()]).unwrap();
        assert!(
            bures_distance(&impose_chain(&doubled, &psi).unwrap(), &impose(&a, &psi).unwrap())
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn chain_rejects_mixed_dimensions() {
        let a = step(computational_basis(3).unwrap(), vec![0.2, 0.3, 0.5]);
        let b = step(fourier_basis(2).unwrap(), vec![0.5, 0.5]);
        assert!(ImpositionChain::new(vec![a, b]).is_err());
        assert!(ImpositionChain::new(vec![]).is_err());
    }

    #[test]
    fn sharp_target_converges_in_two() {
        let s = step(computational_basis(3).unwrap(), vec![0.0, 1.0, 0.0]);
        let chain = ImpositionChain::new(vec![s]).unwrap();
        let seed = PureState::new(vec![c(0.3, 0.4), c(-0.6, 0.1), c(0.2, -0.5)]).unwrap();
        let r = iterate(&chain, &seed, &IterationConfig::for_problem(3, 1)).unwrap();
        assert_eq!(r.status, IterationStatus::Converged);
        assert!(r.iterations <= 2);
        assert!(bures_distance(&r.final_state, &PureState::basis_vector(3, 1)).unwrap() < 1e-15);
    }

    #[test]
    fn fixed_point_seed_converges_immediately() {
        let phi = PureState::new(vec![c(0.3, 0.4), c(-0.6, 0.1), c(0.2, -0.5)]).unwrap();
        let bases = [computational_basis(3).unwrap(), fourier_basis(3).unwrap()];
        let targets: Vec<_> = bases.iter().map(|b| b.distribution(&phi).unwrap()).collect();
        let chain = ImpositionChain::from_parts(&bases, &targets).unwrap();
        let r = iterate(&chain, &phi, &IterationConfig::for_problem(3, 2)).unwrap();
        assert_eq!(r.status, IterationStatus::Converged);
        assert_eq!(r.iterations, 1);
        assert!(bures_distance(&r.final_state, &phi).unwrap() < 1e-12);
        assert!(is_partner(&chain, &phi, 1e-12));
        assert!(is_fixed_point(&chain, &phi, 1e-12));
    }

    #[test]
    fn invalid_config_rejected() {
        let chain = ImpositionChain::new(vec![step(computational_basis(2).unwrap(), vec![0.5, 0.5])])
            .unwrap();
        let seed = PureState::basis_vector(2, 0);
        let mut cfg = IterationConfig::for_problem(2, 1);
        cfg.max_iter = 0;
        assert!(iterate(&chain, &seed, &cfg).is_err());
        cfg = IterationConfig::for_problem(2, 1);
        cfg.tol = 0.0;
        assert!(iterate(&chain, &seed, &cfg).is_err());
    }

    #[test]
    fn trace_csv_format() {
        let rows = [TraceRow {
            iteration: 1,
            residual: 0.5,
            bures_step: 0.25,
        }];
        let mut buf = Vec::new();
        write_trace_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,residual,bures_step\n1,5e-1,2.5e-1\n"
        );
    }
}
