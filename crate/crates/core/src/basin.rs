//! Basins of attraction on the phase torus of a three-dimensional problem.
//!
//! Seeds `(alpha_1, alpha_2)` sample cell centres of an `R x R` grid over
//! `[0, 2 pi)^2`; each cell is labelled by the attractor its seed reaches.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imposition::IterationConfig;
use crate::partners::{FoundState, PartnerSearch, ReconstructionProblem};
use crate::seed::PhaseSeed;

/// Label of cells attracted to a chain fixed point that is not a partner.
pub const UNDESIRABLE: i32 = -1;
/// Label of cells whose seed did not settle.
pub const UNRESOLVED: i32 = -2;
/// Fraction of unresolved cells above which a map is flagged.
pub const UNRESOLVED_CELL_FRACTION: f64 = 0.005;
pub const MIN_RESOLUTION: usize = 8;

/// Colours of partner labels, cycled modulo 12.
pub const PALETTE: [[u8; 3]; 12] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [170, 110, 40],
    [255, 250, 200],
];
pub const UNDESIRABLE_COLOR: [u8; 3] = [128, 0, 255];
pub const UNRESOLVED_COLOR: [u8; 3] = [0, 0, 0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinCell {
    pub label: i32,
    pub residual: f64,
    pub iterations: usize,
}

/// Fraction of the torus attracted to one label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelArea {
    pub label: i32,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub resolution: usize,
    /// `cells[i * R + j]` is the cell at `(alpha_1[i], alpha_2[j])`.
    pub cells: Vec<BasinCell>,
    pub phase_axes: [Vec<f64>; 2],
    /// Ascending by label.
    pub areas: Vec<LabelArea>,
    pub partners: Vec<FoundState>,
    pub undesirables: Vec<FoundState>,
}

impl BasinGrid {
    pub fn label(&self, i: usize, j: usize) -> i32 {
        self.cells[i * self.resolution + j].label
    }

    pub fn area(&self, label: i32) -> f64 {
        self.areas
            .iter()
            .find(|a| a.label == label)
            .map_or(0.0, |a| a.fraction)
    }

    pub fn unresolved_fraction(&self) -> f64 {
        self.area(UNRESOLVED)
    }

    pub fn is_unreliable(&self) -> bool {
        self.unresolved_fraction() > UNRESOLVED_CELL_FRACTION
    }

    /// Fraction of cells with a differently labelled neighbour (torus wrap).
    pub fn boundary_fraction(&self) -> f64 {
        let r = self.resolution;
        let boundary = (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let l = self.label(i, j);
                l != self.label((i + 1) % r, j)
                    || l != self.label((i + r - 1) % r, j)
                    || l != self.label(i, (j + 1) % r)
                    || l != self.label(i, (j + r - 1) % r)
            })
            .count();
        boundary as f64 / (r * r) as f64
    }
}

/// Cell-centre coordinates `(k + 1/2) 2 pi / R`.
pub fn cell_centres(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|k| (k as f64 + 0.5) * TAU / resolution as f64)
        .collect()
}

/// Labels every cell of an `R x R` phase grid by the attractor it reaches.
pub fn map_basins(
    problem: &ReconstructionProblem,
    resolution: usize,
    config: &IterationConfig,
    dedup_tol: f64,
) -> Result<BasinGrid> {
    if problem.dim() != 3 {
        return Err(Error::InvalidProblem(format!(
            "basin maps need dimension 3 (two free phases), got {}",
            problem.dim()
        )));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidConfig(format!(
            "basin resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let axis = cell_centres(resolution);
    let seeds: Vec<PhaseSeed> = axis
        .iter()
        .flat_map(|&a1| axis.iter().map(move |&a2| PhaseSeed::new(vec![a1, a2])))
        .collect();

    let mut search = PartnerSearch::new(problem.chain(), config.clone(), dedup_tol)?;
    let cells: Vec<BasinCell> = search
        .run_batch(&seeds)?
        .into_iter()
        .map(|(label, r)| BasinCell {
            label,
            residual: r.residual,
            iterations: r.iterations,
        })
        .collect();
    let set = search.finish();

    let mut counts = std::collections::BTreeMap::<i32, usize>::new();
    for c in &cells {
        *counts.entry(c.label).or_default() += 1;
    }
    let total = cells.len() as f64;
    let areas = counts
        .into_iter()
        .map(|(label, n)| LabelArea {
            label,
            fraction: n as f64 / total,
        })
        .collect();

    Ok(BasinGrid {
        resolution,
        cells,
        phase_axes: [axis.clone(), axis],
        areas,
        partners: set.partners,
        undesirables: set.undesirables,
    })
}

/// Writes `alpha1,alpha2,label,residual,iterations` rows, one per cell.
pub fn write_basin_csv<W: Write>(grid: &BasinGrid, mut out: W) -> std::io::Result<()> {
    writeln!(out, "alpha1,alpha2,label,residual,iterations")?;
    let r = grid.resolution;
    for i in 0..r {
        for j in 0..r {
            let c = &grid.cells[i * r + j];
            writeln!(
                out,
                "{},{},{},{:e},{}",
                grid.phase_axes[0][i], grid.phase_axes[1][j], c.label, c.residual, c.iterations
            )?;
        }
    }
    Ok(())
}

pub fn label_color(label: i32) -> [u8; 3] {
    match label {
        UNDESIRABLE => UNDESIRABLE_COLOR,
        l if l >= 0 => PALETTE[l as usize % PALETTE.len()],
        _ => UNRESOLVED_COLOR,
    }
}

/// Binary PPM; `alpha_1` runs down the rows and `alpha_2` across the columns.
pub fn write_basin_ppm<W: Write>(grid: &BasinGrid, mut out: W) -> std::io::Result<()> {
    let r = grid.resolution;
    write!(out, "P6\n{r} {r}\n255\n")?;
    let pixels: Vec<u8> = grid.cells.iter().flat_map(|c| label_color(c.label)).collect();
    out.write_all(&pixels)
}

pub fn export_basin_image(grid: &BasinGrid, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_basin_ppm(grid, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn export_basin_csv(grid: &BasinGrid, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_basin_csv(grid, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}
