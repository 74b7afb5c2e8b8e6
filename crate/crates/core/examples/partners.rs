//! Enumerates every state sharing the position and momentum statistics of a
//! random qutrit.
//!
//! cargo run --release --example partners -- [rng-seed]

use pauli_forge::basis::{computational_basis, fourier_basis};
use pauli_forge::imposition::IterationConfig;
use pauli_forge::metrics::bures_distance;
use pauli_forge::partners::{enumerate_partners, synthesize_problem, SeedStrategy, DEFAULT_DEDUP_TOL};
use pauli_forge::sampling::random_state;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pauli_forge::error::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3;
    let generator = random_state(n, &mut rng);
    let bases = vec![computational_basis(n)?, fourier_basis(n)?];
    let problem = synthesize_problem(&generator, &bases)?;

    let set = enumerate_partners(
        &problem,
        &SeedStrategy::Grid { per_phase: 24 },
        &IterationConfig::for_problem(n, bases.len()),
        DEFAULT_DEDUP_TOL,
    )?;

    println!("generator  {:?}", generator.amplitudes());
    println!("{} partners from {} seeds ({} unresolved)", set.count(), set.seeds_run, set.unresolved);
    for (i, p) in set.partners.iter().enumerate() {
        println!(
            "  #{i}: residual {:.1e}, {} hits, distance to generator {:.4}",
            p.residual,
            p.hits,
            bures_distance(&p.state, &generator)?
        );
    }
    if !set.undesirables.is_empty() {
        println!("{} undesirable fixed points", set.undesirables.len());
    }
    Ok(())
}
