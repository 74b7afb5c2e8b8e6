//! Partner counts along the geodesic from a computational basis vector to a
//! vector unbiased to both measured bases.
//!
//! cargo run --release --example bifurcation -- [points]

use pauli_forge::basis::{chirp_state, computational_basis, fourier_basis};
use pauli_forge::imposition::IterationConfig;
use pauli_forge::partners::{scan_bifurcations, GeneratorPath, SeedStrategy, DEFAULT_DEDUP_TOL};
use pauli_forge::state::PureState;

fn main() -> pauli_forge::error::Result<()> {
    let points = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let n = 3;
    let path = GeneratorPath::geodesic(&PureState::basis_vector(n, 0), &chirp_state(n)?, points)?;
    let bases = vec![computational_basis(n)?, fourier_basis(n)?];
    let scan = scan_bifurcations(
        &path,
        &bases,
        &SeedStrategy::default_for(n),
        &IterationConfig::for_problem(n, 2),
        DEFAULT_DEDUP_TOL,
    )?;
    for (t, count) in scan.params.iter().zip(&scan.partner_counts) {
        println!("t = {t:.4}  partners = {count}");
    }
    for (lo, hi) in &scan.bifurcation_intervals {
        println!("count changes in [{lo:.4}, {hi:.4}]");
    }
    Ok(())
}
