//! MUBs in dimension `p^r`, seeded with the tensor power of the `p`-dimensional
//! Fourier basis.
//!
//! cargo run --release --example prime_power_mubs -- [p] [r]

use pauli_forge::mubs::{find_mubs_prime_power, MubConfig};

fn main() -> pauli_forge::error::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse().expect("integer argument"));
    let p: usize = args.next().unwrap_or(2);
    let r: usize = args.next().unwrap_or(2);
    let n = p.pow(r as u32);
    let set = find_mubs_prime_power(p, r, &MubConfig::for_dim(n))?;
    println!("{p}^{r} = {n}: {} bases, unbiasedness error {:.1e}", set.len(), set.max_unbias_error);
    for b in &set.bases {
        println!("  {}", b.label());
    }
    Ok(())
}
