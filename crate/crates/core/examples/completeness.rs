//! Samples random generators to test whether a set of observables pins down
//! every qutrit: two bases do not, four mutually unbiased bases do.
//!
//! cargo run --release --example completeness

use pauli_forge::basis::{computational_basis, fourier_basis};
use pauli_forge::imposition::IterationConfig;
use pauli_forge::mubs::{find_mubs, MubConfig};
use pauli_forge::partners::{is_informationally_complete_heuristic, SeedStrategy, DEFAULT_DEDUP_TOL};

fn main() -> pauli_forge::error::Result<()> {
    let n = 3;
    let strategy = SeedStrategy::Grid { per_phase: 8 };
    let two = vec![computational_basis(n)?, fourier_basis(n)?];
    let verdict = is_informationally_complete_heuristic(
        &two,
        20,
        &strategy,
        &IterationConfig::for_problem(n, 2),
        DEFAULT_DEDUP_TOL,
        1,
    )?;
    println!("computational + Fourier: {verdict:?}");

    let all = find_mubs(n, &MubConfig::for_dim(n))?.bases;
    let verdict = is_informationally_complete_heuristic(
        &all,
        20,
        &strategy,
        &IterationConfig::for_problem(n, all.len()),
        DEFAULT_DEDUP_TOL,
        1,
    )?;
    println!("{} mutually unbiased bases: {verdict:?}", all.len());
    Ok(())
}
