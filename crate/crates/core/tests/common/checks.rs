//! Randomized invariant checks. Each returns `Err` describing the first
//! violation so the proptest suites and the acceptance harness can share them.

use num_complex::Complex64;
use pauli_forge::basis::ObservableBasis;
use pauli_forge::imposition::{impose, impose_chain, is_partner, ImpositionChain, ImpositionStep};
use pauli_forge::metrics::{bures_distance, distributional_distance, hellinger_distance};
use pauli_forge::sampling::{perturb, random_basis, random_state};
use pauli_forge::state::PureState;
use rand::Rng;

use super::{aligned_gap, distribution, hellinger_formula, impose_formula, norm, probabilities};

pub type Check = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn bases<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<ObservableBasis> {
    (0..m)
        .map(|j| random_basis(n, format!("b{j}"), rng).unwrap())
        .collect()
}

fn step_from(basis: &ObservableBasis, generator: &PureState) -> ImpositionStep {
    ImpositionStep::new(basis.clone(), basis.distribution(generator).unwrap()).unwrap()
}

/// Single-step geometry of the imposition operator with targets taken from a
/// generator: the four inequalities, checked for every basis of an `m`-set.
pub fn single_step_geometry<R: Rng>(n: usize, m: usize, slack: f64, rng: &mut R) -> Check {
    let generator = random_state(n, rng);
    let psi = random_state(n, rng);
    let d = |a: &PureState, b: &PureState| bures_distance(a, b).unwrap();
    for basis in bases(n, m, rng) {
        let step = step_from(&basis, &generator);
        let out = impose(&step, &psi).unwrap();
        let moved = d(&out, &psi);
        let dist = d(&psi, &generator);
        ensure(moved <= dist + slack, || {
            format!("d(T psi, psi) = {moved} > d(psi, phi) = {dist}")
        })?;
        let rho = step.target().probs();
        for (k, phi_k) in basis.vectors().iter().enumerate() {
            let lhs = d(&out, phi_k);
            let rhs = d(&generator, phi_k);
            ensure((lhs - rhs).abs() <= slack, || {
                format!("d(T psi, phi_{k}) = {lhs} but d(phi, phi_{k}) = {rhs}")
            })?;
        }
        let max_root = rho.iter().fold(0.0_f64, |a, &p| a.max(p.sqrt()));
        let bound = 2.0 * 2f64.sqrt() * (1.0 - max_root).max(0.0).sqrt();
        let to_generator = d(&out, &generator);
        ensure(to_generator <= bound + slack, || {
            format!("d(T psi, phi) = {to_generator} exceeds eigenvector bound {bound}")
        })?;
        ensure(to_generator <= 2.0 * dist + slack, || {
            format!("d(T psi, phi) = {to_generator} > 2 d(psi, phi) = {}", 2.0 * dist)
        })?;
    }
    Ok(())
}

/// Seeds at Bures distance `delta` from a partner move no farther away under
/// one sweep of the chain.
pub fn local_contraction<R: Rng>(
    n: usize,
    m: usize,
    delta: f64,
    seeds: usize,
    slack: f64,
    rng: &mut R,
) -> Check {
    let generator = random_state(n, rng);
    let steps = bases(n, m, rng)
        .iter()
        .map(|b| step_from(b, &generator))
        .collect();
    let chain = ImpositionChain::new(steps).unwrap();
    ensure(is_partner(&chain, &generator, 1e-12), || {
        "generator is not a partner of its own chain".into()
    })?;
    for _ in 0..seeds {
        let psi = perturb(&generator, delta, rng);
        let before = bures_distance(&psi, &generator).unwrap();
        let after = bures_distance(&impose_chain(&chain, &psi).unwrap(), &generator).unwrap();
        ensure(after <= before + slack, || {
            format!("sweep moved a seed from {before} to {after}")
        })?;
    }
    Ok(())
}

/// Distribution distances never exceed the Bures distance, and one basis
/// reduces the distributional distance to the Hellinger distance.
pub fn distance_bounds<R: Rng>(
    n: usize,
    m: usize,
    bound_slack: f64,
    reduction_tol: f64,
    rng: &mut R,
) -> Check {
    let a = random_state(n, rng);
    let b = random_state(n, rng);
    let set = bases(n, m, rng);
    let bures = bures_distance(&a, &b).unwrap();
    let dist = distributional_distance(&set, &a, &b).unwrap();
    ensure(dist <= bures + bound_slack, || {
        format!("distributional {dist} > Bures {bures} (N={n}, m={m})")
    })?;
    for basis in &set {
        let h = hellinger_distance(basis, &a, &b).unwrap();
        let single = distributional_distance(std::slice::from_ref(basis), &a, &b).unwrap();
        ensure((single - h).abs() <= reduction_tol, || {
            format!("single-basis distributional {single} != Hellinger {h}")
        })?;
        ensure(h <= bures + bound_slack, || format!("Hellinger {h} > Bures {bures}"))?;
        let brute = hellinger_formula(
            &probabilities(basis, a.amplitudes()),
            &probabilities(basis, b.amplitudes()),
        );
        ensure((h - brute).abs() <= 1e-12, || {
            format!("Hellinger {h} differs from the direct formula {brute}")
        })?;
    }
    Ok(())
}

/// Norm preservation, idempotence and target exhaustion of one step, plus
/// agreement with the direct formula. With `sparse`, the input has exact zero
/// coefficients in the step basis and the target has zero entries, so the
/// unit-phase fallback is exercised.
pub fn imposition_algebra<R: Rng>(n: usize, sparse: bool, tol: f64, rng: &mut R) -> Check {
    let basis = random_basis(n, "b", rng).unwrap();
    let (psi, target) = if sparse {
        let mut coeffs: Vec<Complex64> = random_state(n, rng).amplitudes().to_vec();
        let keep = rng.gen_range(0..n);
        let mut zeroed = 0;
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k != keep && (zeroed == 0 || rng.gen_bool(0.5)) {
                *c = Complex64::new(0.0, 0.0);
                zeroed += 1;
            }
        }
        let psi = super::state(basis.synthesize(&coeffs));
        let mut probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let hole = rng.gen_range(0..n);
        probs[hole] = 0.0;
        if probs.iter().all(|&p| p == 0.0) {
            probs[(hole + 1) % n] = 1.0;
        }
        (psi, distribution(probs))
    } else {
        let psi = random_state(n, rng);
        let target = basis.distribution(&random_state(n, rng)).unwrap();
        (psi, target)
    };
    let step = ImpositionStep::new(basis.clone(), target.clone()).unwrap();
    let once = impose(&step, &psi).unwrap();
    let twice = impose(&step, &once).unwrap();

    let len = norm(once.amplitudes());
    ensure((len - 1.0).abs() <= tol, || format!("norm {len} after imposition"))?;
    let drift = bures_distance(&once, &twice).unwrap();
    ensure(drift <= tol, || format!("second application moved the state by {drift}"))?;
    let got = probabilities(&basis, once.amplitudes());
    let worst = got
        .iter()
        .zip(target.probs())
        .fold(0.0_f64, |w, (g, t)| w.max((g - t).abs()));
    ensure(worst <= tol, || format!("distribution misses the target by {worst}"))?;
    let direct = impose_formula(&basis, target.probs(), psi.amplitudes());
    let gap = aligned_gap(once.amplitudes(), &direct);
    ensure(gap <= tol, || format!("differs from the direct formula by {gap}"))?;
    Ok(())
}
