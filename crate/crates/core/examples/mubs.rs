//! Assembles mutually unbiased bases containing the computational and Fourier
//! bases.
//!
//! cargo run --release --example mubs -- [dim]

use pauli_forge::mubs::{find_mubs, MubConfig};

fn main() -> pauli_forge::error::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let start = std::time::Instant::now();
    let set = find_mubs(n, &MubConfig::for_dim(n))?;
    println!(
        "N = {n}: {} bases in {:.2?} (unbiasedness error {:.1e}, orthonormality error {:.1e})",
        set.len(),
        start.elapsed(),
        set.max_unbias_error,
        set.max_ortho_error
    );
    let d = &set.diagnostics;
    println!(
        "{} seeds over {} rounds, {} distinct partners, stop: {:?}",
        d.seeds_run, d.rounds, d.partners, d.stop_reason
    );
    if let Some(note) = &d.note {
        println!("note: {note}");
    }
    Ok(())
}
