mod common;

use common::{aligned_gap, amps_of, analytic_mubs, mub_errors};
use pauli_forge::basis::{computational_basis, fourier_basis, tensor_fourier_basis, ObservableBasis};
use pauli_forge::mubs::{find_mubs, find_mubs_prime_power, verify_mub_set, MubConfig, StopReason};

fn to_bases(sets: &[Vec<common::Amps>]) -> Vec<ObservableBasis> {
    sets.iter()
        .enumerate()
        .map(|(i, vs)| {
            let vectors = vs.iter().cloned().map(common::state).collect();
            ObservableBasis::new(format!("analytic-{i}"), vectors).unwrap()
        })
        .collect()
}

#[test]
fn analytic_families_are_mutually_unbiased() {
    for p in [2, 3, 5, 7, 11, 13] {
        let sets = analytic_mubs(p);
        assert_eq!(sets.len(), p + 1);
        let (unbias, ortho) = mub_errors(&sets);
        assert!(unbias < 1e-12 && ortho < 1e-12, "p={p}: {unbias:e} {ortho:e}");
        let report = verify_mub_set(&to_bases(&sets), 1e-10).unwrap();
        assert!(report.ok, "p={p}: {:?}", report.violations.first());
        assert!((report.max_unbias_error - unbias).abs() < 1e-12);
    }
}

#[test]
fn verify_flags_a_biased_pair() {
    let comp = computational_basis(3).unwrap();
    let report = verify_mub_set(&[comp.clone(), comp], 1e-6).unwrap();
    assert!(!report.ok);
    assert!((report.max_unbias_error - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn found_prime_families_match_the_analytic_ones() {
    for p in [2, 3, 5, 7] {
        let set = find_mubs(p, &MubConfig::for_dim(p)).unwrap();
        assert_eq!(set.len(), p + 1, "p={p}: {:?}", set.diagnostics);
        assert_eq!(set.diagnostics.stop_reason, StopReason::Complete);
        assert!(set.diagnostics.note.is_none());

        let found: Vec<Vec<common::Amps>> = set.bases.iter().map(amps_of).collect();
        let (unbias, ortho) = mub_errors(&found);
        assert!(unbias < 1e-6 && ortho < 1e-8, "p={p}: {unbias:e} {ortho:e}");
        assert!((unbias - set.max_unbias_error).abs() < 1e-12);

        let analytic: Vec<common::Amps> = analytic_mubs(p).into_iter().flatten().collect();
        for v in found.iter().flatten() {
            let best = analytic
                .iter()
                .map(|w| aligned_gap(v, w))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-5, "p={p}: vector {v:?} is {best:e} from every analytic vector");
        }
    }
}

#[test]
fn inputs_come_first_and_are_unchanged() {
    let set = find_mubs(5, &MubConfig::for_dim(5)).unwrap();
    let comp = computational_basis(5).unwrap();
    let fourier = fourier_basis(5).unwrap();
    for (got, want) in set.bases.iter().zip([&comp, &fourier]) {
        for (a, b) in got.vectors().iter().zip(want.vectors()) {
            assert!(aligned_gap(a.amplitudes(), b.amplitudes()) < 1e-15);
        }
    }
}

#[test]
fn tensor_fourier_is_unbiased_to_computational() {
    for (p, r) in [(2usize, 2usize), (2, 3), (3, 2)] {
        let n = p.pow(r as u32);
        let t = tensor_fourier_basis(p, r).unwrap();
        let sets = vec![amps_of(&computational_basis(n).unwrap()), amps_of(&t)];
        let (unbias, ortho) = mub_errors(&sets);
        assert!(unbias < 1e-12 && ortho < 1e-12, "{p}^{r}: {unbias:e} {ortho:e}");
    }
    let single = tensor_fourier_basis(3, 1).unwrap();
    let fourier = fourier_basis(3).unwrap();
    for (a, b) in single.vectors().iter().zip(fourier.vectors()) {
        assert!(aligned_gap(a.amplitudes(), b.amplitudes()) < 1e-12);
    }
}

#[test]
fn two_qubit_family_is_complete() {
    let set = find_mubs_prime_power(2, 2, &MubConfig::for_dim(4)).unwrap();
    assert_eq!(set.len(), 5);
    let found: Vec<Vec<common::Amps>> = set.bases.iter().map(amps_of).collect();
    let (unbias, ortho) = mub_errors(&found);
    assert!(unbias < 1e-6 && ortho < 1e-8, "{unbias:e} {ortho:e}");
    // stabilizer states unbiased to the computational basis have entries in {1, -1, i, -i} / 2
    for v in found[1..].iter().flatten() {
        let lead = v[0] / v[0].norm();
        for z in v {
            let w = z / lead * 2.0;
            let nearest = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
                .iter()
                .map(|&(re, im)| (w - num_complex::Complex64::new(re, im)).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-6, "{v:?}");
        }
    }
}
