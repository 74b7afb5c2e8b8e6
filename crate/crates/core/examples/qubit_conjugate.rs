//! For a qubit, position and momentum statistics fix a state only up to
//! complex conjugation.
//!
//! cargo run --example qubit_conjugate

use num_complex::Complex64;
use pauli_forge::basis::{computational_basis, fourier_basis};
use pauli_forge::imposition::IterationConfig;
use pauli_forge::metrics::bures_distance;
use pauli_forge::partners::{enumerate_partners, synthesize_problem, SeedStrategy, DEFAULT_DEDUP_TOL};
use pauli_forge::state::PureState;

fn main() -> pauli_forge::error::Result<()> {
    let bases = vec![computational_basis(2)?, fourier_basis(2)?];
    let config = IterationConfig::for_problem(2, 2);
    let strategy = SeedStrategy::default_for(2);

    let generators = [
        ("complex", PureState::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.48, 0.64)])?),
        ("real", PureState::from_real(&[0.8, 0.6])?),
    ];
    for (name, phi) in generators {
        let problem = synthesize_problem(&phi, &bases)?;
        let set = enumerate_partners(&problem, &strategy, &config, DEFAULT_DEDUP_TOL)?;
        let conj = PureState::new(phi.amplitudes().iter().map(|z| z.conj()).collect())?;
        println!("{name} generator: {} partner(s)", set.count());
        for p in &set.partners {
            println!(
                "  d(partner, phi) = {:.2e}   d(partner, phi*) = {:.2e}",
                bures_distance(&p.state, &phi)?,
                bures_distance(&p.state, &conj)?
            );
        }
    }
    Ok(())
}
