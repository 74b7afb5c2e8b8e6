//! Basins of attraction of the flat qutrit problem on the phase torus.
//!
//! cargo run --release --example basin_map -- [resolution] [output-prefix]

use std::path::PathBuf;

use pauli_forge::basin::{export_basin_csv, export_basin_image, map_basins};
use pauli_forge::basis::{computational_basis, fourier_basis};
use pauli_forge::distribution::Distribution;
use pauli_forge::imposition::IterationConfig;
use pauli_forge::partners::{ReconstructionProblem, DEFAULT_DEDUP_TOL};

fn main() -> pauli_forge::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let resolution = args.next().and_then(|s| s.parse().ok()).unwrap_or(120);
    let prefix = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("flat-basins"));

    let problem = ReconstructionProblem::new(
        vec![computational_basis(3)?, fourier_basis(3)?],
        vec![Distribution::flat(3), Distribution::flat(3)],
    )?;
    let grid = map_basins(&problem, resolution, &IterationConfig::for_problem(3, 2), DEFAULT_DEDUP_TOL)?;

    println!("{} partners on a {resolution}x{resolution} grid", grid.partners.len());
    for area in &grid.areas {
        println!("  label {:>2}: {:.4}", area.label, area.fraction);
    }
    println!("boundary cells: {:.4}", grid.boundary_fraction());

    let csv = prefix.with_extension("csv");
    let ppm = prefix.with_extension("ppm");
    export_basin_csv(&grid, &csv)?;
    export_basin_image(&grid, &ppm)?;
    println!("wrote {} and {}", csv.display(), ppm.display());
    Ok(())
}
