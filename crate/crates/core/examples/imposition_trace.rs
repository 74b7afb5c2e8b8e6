//! Iterates the composed imposition operator from one phase seed and prints
//! the convergence trace as CSV.
//!
//! cargo run --example imposition_trace -- [alpha1] [alpha2]

use num_complex::Complex64;
use pauli_forge::basis::{computational_basis, fourier_basis};
use pauli_forge::imposition::{is_partner, iterate_traced, write_trace_csv, IterationConfig};
use pauli_forge::partners::synthesize_problem;
use pauli_forge::seed::{state_from_seed, PhaseSeed};
use pauli_forge::state::PureState;

fn main() -> pauli_forge::error::Result<()> {
    let phases: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let seed = PhaseSeed::new(if phases.len() == 2 { phases } else { vec![3.0, 1.0] });

    let generator = PureState::new(vec![
        Complex64::new(0.7, 0.0),
        Complex64::from_polar(0.5, 1.0),
        Complex64::from_polar(0.5, -2.5),
    ])?;
    let bases = vec![computational_basis(3)?, fourier_basis(3)?];
    let problem = synthesize_problem(&generator, &bases)?;
    let start = state_from_seed(&problem.targets()[0], &seed, &bases[0])?;

    let mut rows = Vec::new();
    let config = IterationConfig::for_problem(3, 2);
    let result = iterate_traced(problem.chain(), &start, &config, |row| rows.push(row))?;
    if let Err(e) = write_trace_csv(&rows, std::io::stdout().lock()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            panic!("stdout: {e}");
        }
    }

    eprintln!(
        "{:?} after {} iterations, residual {:.1e}, partner: {}",
        result.status,
        result.iterations,
        result.residual,
        is_partner(problem.chain(), &result.final_state, 10.0 * config.tol)
    );
    Ok(())
}
