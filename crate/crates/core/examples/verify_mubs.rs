//! Checks a basis family for orthonormality and pairwise unbiasedness, first
//! a found family and then the same family with one vector nudged.
//!
//! cargo run --example verify_mubs

use num_complex::Complex64;
use pauli_forge::basis::ObservableBasis;
use pauli_forge::mubs::{find_mubs, verify_mub_set, MubConfig};
use pauli_forge::state::PureState;

fn main() -> pauli_forge::error::Result<()> {
    let set = find_mubs(3, &MubConfig::for_dim(3))?;
    let report = verify_mub_set(&set.bases, 1e-6)?;
    println!("found family: ok = {}, {} violations", report.ok, report.violations.len());

    let mut bases = set.bases.clone();
    let last = bases.pop().expect("at least two bases");
    let mut vectors = last.vectors().to_vec();
    let mut amps = vectors[0].amplitudes().to_vec();
    amps[0] += Complex64::new(1e-3, 0.0);
    vectors[0] = PureState::new(amps)?;
    bases.push(ObservableBasis::with_tolerance("nudged", vectors, 1.0)?);

    let report = verify_mub_set(&bases, 1e-6)?;
    println!(
        "nudged family: ok = {}, max unbiasedness error {:.1e}, max orthonormality error {:.1e}",
        report.ok, report.max_unbias_error, report.max_ortho_error
    );
    for v in report.violations.iter().take(4) {
        println!("  {v:?}");
    }
    Ok(())
}
