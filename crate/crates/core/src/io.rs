//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs throughout. Readers validate
//! structure and physics (normalization, orthonormality) and name the
//! offending field on failure.

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::basin::{BasinGrid, LabelArea};
use crate::basis::ObservableBasis;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::mubs::{MubDiagnostics, MubSet, MubVerification};
use crate::partners::{BifurcationScan, FoundState, PartnerSet};
use crate::state::PureState;

pub type Pair = [f64; 2];

fn pairs(amps: &[Complex64]) -> Vec<Pair> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

fn complex(field: &str, pairs: &[Pair]) -> Result<Vec<Complex64>> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, &[re, im])| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(re, im))
            } else {
                Err(Error::format(format!("{field}[{i}]"), "non-finite number"))
            }
        })
        .collect()
}

/// `{"dim": N, "amplitudes": [[re, im], ...]}`; amplitudes need not be normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub amplitudes: Vec<Pair>,
}

impl StateFile {
    pub fn from_state(state: &PureState) -> Self {
        Self {
            dim: state.dim(),
            amplitudes: pairs(state.amplitudes()),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        if self.amplitudes.len() != self.dim {
            return Err(Error::format(
                "amplitudes",
                format!("expected {} entries, found {}", self.dim, self.amplitudes.len()),
            ));
        }
        PureState::new(complex("amplitudes", &self.amplitudes)?)
            .map_err(|e| Error::format("amplitudes", e.to_string()))
    }
}

/// `{"dim": N, "label": "...", "vectors": [[[re, im], ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub dim: usize,
    pub label: String,
    pub vectors: Vec<Vec<Pair>>,
}

impl BasisFile {
    pub fn from_basis(basis: &ObservableBasis) -> Self {
        Self {
            dim: basis.dim(),
            label: basis.label().to_string(),
            vectors: basis.vectors().iter().map(|v| pairs(v.amplitudes())).collect(),
        }
    }

    pub fn to_basis(&self) -> Result<ObservableBasis> {
        if self.vectors.len() != self.dim {
            return Err(Error::format(
                "vectors",
                format!("expected {} vectors, found {}", self.dim, self.vectors.len()),
            ));
        }
        let vectors = self
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let field = format!("vectors[{i}]");
                if v.len() != self.dim {
                    return Err(Error::format(
                        field,
                        format!("expected {} entries, found {}", self.dim, v.len()),
                    ));
                }
                PureState::new(complex(&field, v)?).map_err(|e| Error::format(field, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        ObservableBasis::new(self.label.clone(), vectors)
            .map_err(|e| Error::format("vectors", e.to_string()))
    }
}

/// A bases file is a JSON array of basis objects.
pub fn parse_bases(text: &str) -> Result<Vec<ObservableBasis>> {
    let files: Vec<BasisFile> = from_str(text, "bases")?;
    files
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.to_basis().map_err(|e| match e {
                Error::Format { field, message } => {
                    Error::format(format!("bases[{i}].{field}"), message)
                }
                other => other,
            })
        })
        .collect()
}

pub fn parse_state(text: &str) -> Result<PureState> {
    from_str::<StateFile>(text, "state")?.to_state()
}

/// Targets: an array of probability arrays, one per basis.
pub fn parse_targets(text: &str) -> Result<Vec<Distribution>> {
    let raw: Vec<Vec<f64>> = from_str(text, "targets")?;
    raw.into_iter()
        .enumerate()
        .map(|(i, p)| {
            Distribution::new(p).map_err(|e| Error::format(format!("targets[{i}]"), e.to_string()))
        })
        .collect()
}

fn from_str<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::format(what, e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoundStateJson {
    pub amplitudes: Vec<Pair>,
    pub classification: crate::partners::Classification,
    pub residual: f64,
    pub hits: usize,
}

impl From<&FoundState> for FoundStateJson {
    fn from(f: &FoundState) -> Self {
        Self {
            amplitudes: pairs(f.state.amplitudes()),
            classification: f.classification,
            residual: f.residual,
            hits: f.hits,
        }
    }
}

/// Output of the partner search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerSetJson {
    pub dim: usize,
    pub strategy: String,
    pub count: usize,
    pub pauli_unique: bool,
    pub seeds_run: usize,
    pub unresolved: usize,
    pub unreliable: bool,
    pub partners: Vec<FoundStateJson>,
    pub undesirables: Vec<FoundStateJson>,
}

impl PartnerSetJson {
    pub fn new(set: &PartnerSet, dim: usize, strategy: String) -> Self {
        Self {
            dim,
            strategy,
            count: set.count(),
            pauli_unique: set.is_pauli_unique(),
            seeds_run: set.seeds_run,
            unresolved: set.unresolved,
            unreliable: set.is_unreliable(),
            partners: set.partners.iter().map(Into::into).collect(),
            undesirables: set.undesirables.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubSetJson {
    pub dim: usize,
    pub count: usize,
    pub max_unbias_error: f64,
    pub max_ortho_error: f64,
    pub bases: Vec<BasisFile>,
    pub diagnostics: MubDiagnostics,
}

impl From<&MubSet> for MubSetJson {
    fn from(set: &MubSet) -> Self {
        Self {
            dim: set.diagnostics.dim,
            count: set.len(),
            max_unbias_error: set.max_unbias_error,
            max_ortho_error: set.max_ortho_error,
            bases: set.bases.iter().map(BasisFile::from_basis).collect(),
            diagnostics: set.diagnostics.clone(),
        }
    }
}

pub type VerificationJson = MubVerification;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationJson {
    pub strategy: String,
    pub path: Vec<StateFile>,
    #[serde(flatten)]
    pub scan: BifurcationScan,
}

/// Summary written next to the basin CSV and image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinSummaryJson {
    pub resolution: usize,
    pub areas: Vec<LabelArea>,
    pub boundary_fraction: f64,
    pub unresolved_fraction: f64,
    pub unreliable: bool,
    pub partners: Vec<FoundStateJson>,
    pub undesirables: Vec<FoundStateJson>,
}

impl From<&BasinGrid> for BasinSummaryJson {
    fn from(g: &BasinGrid) -> Self {
        Self {
            resolution: g.resolution,
            areas: g.areas.clone(),
            boundary_fraction: g.boundary_fraction(),
            unresolved_fraction: g.unresolved_fraction(),
            unreliable: g.is_unreliable(),
            partners: g.partners.iter().map(Into::into).collect(),
            undesirables: g.undesirables.iter().map(Into::into).collect(),
        }
    }
}
