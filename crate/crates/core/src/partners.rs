//! Enumeration of Pauli partners: every state sharing the measured
//! distributions of all observables in a reconstruction problem.
//!
//! Each partner is an attractive fixed point of the imposition chain, so a
//! multistart search over phase seeds recovers the whole set. Seeds only vary
//! the `N - 1` relative phases in the first basis; their moduli are already
//! those of the first target, and two seeds with equal phases there generate
//! identical sequences.
//!
//! Runs are deterministic: seeds are evaluated in parallel but merged in seed
//! order.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::ObservableBasis;
use crate::distribution::Distribution;
use crate::error::{check_dim, Error, Result};
use crate::imposition::{
    is_fixed_point, is_partner, iterate, ImpositionChain, IterationConfig, IterationResult,
    IterationStatus,
};
use crate::metrics::bures_distance;
use crate::refine::polish;
use crate::sampling::{random_seed, random_state};
use crate::seed::{state_from_seed, PhaseSeed};
use crate::state::PureState;

/// Default Bures radius under which two converged states are the same.
pub const DEFAULT_DEDUP_TOL: f64 = 1e-6;
/// Fraction of unresolved seeds above which a run is flagged unreliable.
pub const UNRELIABLE_FRACTION: f64 = 0.05;
/// Classification tolerance, in units of the iteration tolerance.
pub const CLASSIFY_TOL_FACTOR: f64 = 10.0;
/// Largest Bures move accepted when refining a stalled seed.
pub const POLISH_RADIUS: f64 = 0.05;
/// Tolerance on the compatibility of targets with a recorded generator.
pub const ORIGIN_COMPAT_TOL: f64 = 1e-12;

/// Bases plus the distributions measured in them.
#[derive(Clone, Debug)]
pub struct ReconstructionProblem {
    bases: Vec<ObservableBasis>,
    targets: Vec<Distribution>,
    origin: Option<PureState>,
    chain: ImpositionChain,
}

impl ReconstructionProblem {
    pub fn new(bases: Vec<ObservableBasis>, targets: Vec<Distribution>) -> Result<Self> {
        if bases.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "a reconstruction problem needs at least 2 bases, got {}",
                bases.len()
            )));
        }
        let chain = ImpositionChain::from_parts(&bases, &targets)?;
        Ok(Self {
            bases,
            targets,
            origin: None,
            chain,
        })
    }

    /// Records the generator the targets were computed from, checking they agree.
    pub fn with_origin(mut self, origin: PureState) -> Result<Self> {
        check_dim(self.dim(), origin.dim())?;
        for (j, (basis, target)) in self.bases.iter().zip(&self.targets).enumerate() {
            let dist = basis.distribution(&origin)?;
            let worst = dist
                .probs()
                .iter()
                .zip(target.probs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if worst > ORIGIN_COMPAT_TOL {
                return Err(Error::InvalidProblem(format!(
                    "target {j} differs from the generator's distribution by {worst:e}"
                )));
            }
        }
        self.origin = Some(origin);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.bases[0].dim()
    }

    pub fn bases(&self) -> &[ObservableBasis] {
        &self.bases
    }

    pub fn targets(&self) -> &[Distribution] {
        &self.targets
    }

    pub fn origin(&self) -> Option<&PureState> {
        self.origin.as_ref()
    }

    pub fn chain(&self) -> &ImpositionChain {
        &self.chain
    }
}

/// Computes the targets `|<phi^j_k, generator>|^2` and records the generator.
pub fn synthesize_problem(
    generator: &PureState,
    bases: &[ObservableBasis],
) -> Result<ReconstructionProblem> {
    let targets = bases
        .iter()
        .map(|b| b.distribution(generator))
        .collect::<Result<Vec<_>>>()?;
    ReconstructionProblem::new(bases.to_vec(), targets)?.with_origin(generator.clone())
}

/// How phase seeds are laid out on the `(N - 1)`-torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedStrategy {
    /// `per_phase` equally spaced values per phase, `per_phase^(N-1)` seeds.
    Grid { per_phase: usize },
    /// `count` uniform random seeds drawn from `rng_seed`.
    Random { count: usize, rng_seed: u64 },
}

/// Offset of grid axis `j` from zero. Fixed in absolute terms so that
/// `grid(k)` is a subset of `grid(2k)`, and off the symmetry axes.
fn grid_offset(axis: usize) -> f64 {
    0.1 * (axis + 1) as f64
}

pub const DEFAULT_RNG_SEED: u64 = 0x5eed_0f_9a0c1;

impl SeedStrategy {
    /// `grid(12)` up to `N = 4`, otherwise `random(2000 N)`.
    pub fn default_for(n: usize) -> Self {
        if n <= 4 {
            SeedStrategy::Grid { per_phase: 12 }
        } else {
            SeedStrategy::Random {
                count: 2000 * n,
                rng_seed: DEFAULT_RNG_SEED,
            }
        }
    }

    pub fn seed_count(&self, n: usize) -> usize {
        match *self {
            SeedStrategy::Grid { per_phase } => per_phase.saturating_pow(n.saturating_sub(1) as u32),
            SeedStrategy::Random { count, .. } => count,
        }
    }

    /// Phase seeds in a fixed order.
    pub fn phase_seeds(&self, n: usize) -> Vec<PhaseSeed> {
        let free = n.saturating_sub(1);
        match *self {
            SeedStrategy::Grid { per_phase } => {
                let total = self.seed_count(n);
                (0..total)
                    .map(|mut idx| {
                        let mut phases = vec![0.0; free];
                        // last axis varies fastest
                        for axis in (0..free).rev() {
                            let i = idx % per_phase;
                            idx /= per_phase;
                            phases[axis] = grid_offset(axis) + TAU * i as f64 / per_phase as f64;
                        }
                        PhaseSeed::new(phases)
                    })
                    .collect()
            }
            SeedStrategy::Random { count, rng_seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                (0..count).map(|_| random_seed(n, &mut rng)).collect()
            }
        }
    }
}

impl fmt::Display for SeedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedStrategy::Grid { per_phase } => write!(f, "grid:{per_phase}"),
            SeedStrategy::Random { count, .. } => write!(f, "random:{count}"),
        }
    }
}

impl FromStr for SeedStrategy {
    type Err = Error;

    /// Parses `grid:K` or `random:COUNT`; random strategies use [`DEFAULT_RNG_SEED`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::format("strategy", format!("expected grid:K or random:COUNT, got `{s}`"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: usize = value.trim().parse().map_err(|_| bad())?;
        if value == 0 {
            return Err(Error::format("strategy", "seed count must be positive"));
        }
        match kind.trim() {
            "grid" => Ok(SeedStrategy::Grid { per_phase: value }),
            "random" => Ok(SeedStrategy::Random {
                count: value,
                rng_seed: DEFAULT_RNG_SEED,
            }),
            _ => Err(bad()),
        }
    }
}

/// Classification of a converged state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Partner,
    Undesirable,
}

/// A distinct attractor reached by at least one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoundState {
    pub state: PureState,
    pub classification: Classification,
    /// Distributional distance to the targets.
    pub residual: f64,
    /// Number of seeds that converged here.
    pub hits: usize,
}

/// Deduplicated attractors of one multistart run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerSet {
    pub partners: Vec<FoundState>,
    pub undesirables: Vec<FoundState>,
    pub seeds_run: usize,
    /// Seeds that neither converged nor settled on a chain fixed point.
    pub unresolved: usize,
}

impl PartnerSet {
    pub fn count(&self) -> usize {
        self.partners.len()
    }

    pub fn is_pauli_unique(&self) -> bool {
        self.partners.len() == 1
    }

    pub fn unresolved_fraction(&self) -> f64 {
        if self.seeds_run == 0 {
            0.0
        } else {
            self.unresolved as f64 / self.seeds_run as f64
        }
    }

    /// More than [`UNRELIABLE_FRACTION`] of the seeds were unresolved.
    pub fn is_unreliable(&self) -> bool {
        self.unresolved_fraction() > UNRELIABLE_FRACTION
    }

    pub fn partner_states(&self) -> Vec<PureState> {
        self.partners.iter().map(|f| f.state.clone()).collect()
    }

    /// Index of the partner within `tol` (Bures) of `psi`.
    pub fn match_partner(&self, psi: &PureState, tol: f64) -> Option<usize> {
        match_in(&self.partners, psi, tol)
    }
}

fn match_in(found: &[FoundState], psi: &PureState, tol: f64) -> Option<usize> {
    found
        .iter()
        .position(|f| bures_distance(&f.state, psi).map(|d| d < tol).unwrap_or(false))
}

/// Outcome of classifying one iteration.
pub(crate) enum SeedOutcome {
    Found(Classification),
    Unresolved,
}

pub(crate) fn classify(
    chain: &ImpositionChain,
    result: &IterationResult,
    config: &IterationConfig,
) -> SeedOutcome {
    let tol = CLASSIFY_TOL_FACTOR * config.tol;
    let settled = match result.status {
        IterationStatus::Converged => true,
        IterationStatus::CycleDetected => {
            result.cycle_period == Some(1) && is_fixed_point(chain, &result.final_state, tol)
        }
        IterationStatus::MaxIterations => false,
    };
    if !settled {
        SeedOutcome::Unresolved
    } else if is_partner(chain, &result.final_state, tol) {
        SeedOutcome::Found(Classification::Partner)
    } else {
        SeedOutcome::Found(Classification::Undesirable)
    }
}

/// Accumulates iteration results in seed order.
#[derive(Debug)]
pub(crate) struct Collector {
    set: PartnerSet,
    dedup_tol: f64,
}

impl Collector {
    pub(crate) fn new(dedup_tol: f64) -> Self {
        Self {
            set: PartnerSet {
                partners: Vec::new(),
                undesirables: Vec::new(),
                seeds_run: 0,
                unresolved: 0,
            },
            dedup_tol,
        }
    }

    /// Returns the label of the result: partner index, `-1` undesirable, `-2` unresolved.
    pub(crate) fn add(
        &mut self,
        chain: &ImpositionChain,
        result: &IterationResult,
        config: &IterationConfig,
    ) -> i32 {
        self.set.seeds_run += 1;
        let class = match classify(chain, result, config) {
            SeedOutcome::Unresolved => {
                self.set.unresolved += 1;
                return -2;
            }
            SeedOutcome::Found(c) => c,
        };
        let list = match class {
            Classification::Partner => &mut self.set.partners,
            Classification::Undesirable => &mut self.set.undesirables,
        };
        let idx = match match_in(list, &result.final_state, self.dedup_tol) {
            Some(i) => {
                list[i].hits += 1;
                i
            }
            None => {
                list.push(FoundState {
                    state: result.final_state.clone(),
                    classification: class,
                    residual: result.residual,
                    hits: 1,
                });
                list.len() - 1
            }
        };
        match class {
            Classification::Partner => idx as i32,
            Classification::Undesirable => -1,
        }
    }

    pub(crate) fn partners(&self) -> &[FoundState] {
        &self.set.partners
    }

    pub(crate) fn finish(self) -> PartnerSet {
        self.set
    }
}

fn check_dedup_tol(dedup_tol: f64) -> Result<()> {
    if dedup_tol > 0.0 && dedup_tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("dedup_tol must be positive, got {dedup_tol}")))
    }
}

/// Iterates one seed. A seed that exhausts `max_iter` is stalled near a
/// degenerate fixed point or still creeping; it is refined with
/// [`polish`] and accepted only if the plain iteration then converges from
/// a point within [`POLISH_RADIUS`] of where it stalled.
pub fn resolve_seed(
    chain: &ImpositionChain,
    seed: &PureState,
    config: &IterationConfig,
) -> Result<IterationResult> {
    let first = iterate(chain, seed, config)?;
    if first.status != IterationStatus::MaxIterations {
        return Ok(first);
    }
    let Some(refined) = polish(chain, &first.final_state) else {
        return Ok(first);
    };
    if bures_distance(&refined, &first.final_state)? > POLISH_RADIUS {
        return Ok(first);
    }
    let mut second = iterate(chain, &refined, config)?;
    if second.status != IterationStatus::Converged {
        return Ok(first);
    }
    second.iterations += first.iterations;
    Ok(second)
}

pub(crate) fn run_seeds(
    chain: &ImpositionChain,
    seeds: &[PureState],
    config: &IterationConfig,
) -> Result<Vec<IterationResult>> {
    seeds.par_iter().map(|s| resolve_seed(chain, s, config)).collect()
}

/// Incremental multistart search: seeds can be added in batches and the
/// deduplicated result inspected between them.
#[derive(Debug)]
pub struct PartnerSearch<'a> {
    chain: &'a ImpositionChain,
    config: IterationConfig,
    collector: Collector,
}

impl<'a> PartnerSearch<'a> {
    pub fn new(chain: &'a ImpositionChain, config: IterationConfig, dedup_tol: f64) -> Result<Self> {
        config.validate()?;
        check_dedup_tol(dedup_tol)?;
        Ok(Self {
            chain,
            config,
            collector: Collector::new(dedup_tol),
        })
    }

    /// Runs `seeds` and merges them in order; returns one label per seed.
    pub fn run_batch(&mut self, seeds: &[PhaseSeed]) -> Result<Vec<(i32, IterationResult)>> {
        let first = &self.chain.steps()[0];
        let states = seeds
            .iter()
            .map(|s| state_from_seed(first.target(), s, first.basis()))
            .collect::<Result<Vec<_>>>()?;
        let results = run_seeds(self.chain, &states, &self.config)?;
        Ok(results
            .into_iter()
            .map(|r| (self.collector.add(self.chain, &r, &self.config), r))
            .collect())
    }

    pub fn partners(&self) -> &[FoundState] {
        self.collector.partners()
    }

    pub fn finish(self) -> PartnerSet {
        self.collector.finish()
    }
}

/// Multistart search over `chain` with the given seeds.
pub fn enumerate_on_chain(
    chain: &ImpositionChain,
    strategy: &SeedStrategy,
    config: &IterationConfig,
    dedup_tol: f64,
) -> Result<PartnerSet> {
    let mut search = PartnerSearch::new(chain, config.clone(), dedup_tol)?;
    let seeds = strategy.phase_seeds(chain.dim());
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("seed strategy produced no seeds".into()));
    }
    search.run_batch(&seeds)?;
    Ok(search.finish())
}

/// Finds the complete set of Pauli partners of `problem`.
pub fn enumerate_partners(
    problem: &ReconstructionProblem,
    strategy: &SeedStrategy,
    config: &IterationConfig,
    dedup_tol: f64,
) -> Result<PartnerSet> {
    enumerate_on_chain(problem.chain(), strategy, config, dedup_tol)
}

/// Number of Pauli partners; `1` means the generator is Pauli unique.
pub fn count_partners(
    problem: &ReconstructionProblem,
    strategy: &SeedStrategy,
    config: &IterationConfig,
    dedup_tol: f64,
) -> Result<usize> {
    Ok(enumerate_partners(problem, strategy, config, dedup_tol)?.count())
}

/// Generators along a parametrized curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorPath {
    pub params: Vec<f64>,
    pub states: Vec<PureState>,
}

impl GeneratorPath {
    pub fn new(params: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if params.len() != states.len() {
            return Err(Error::InvalidProblem(
                "path parameters and states differ in length".into(),
            ));
        }
        Ok(Self { params, states })
    }

    /// `points` samples of the ray geodesic from `from` (t = 0) to `to` (t = 1).
    pub fn geodesic(from: &PureState, to: &PureState, points: usize) -> Result<Self> {
        check_dim(from.dim(), to.dim())?;
        if points < 2 {
            return Err(Error::InvalidProblem("a path needs at least 2 points".into()));
        }
        let a = from.amplitudes();
        // align the representative of `to` with `from`, then rotate in their plane
        let overlap = from.inner(to);
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            num_complex::Complex64::new(1.0, 0.0)
        };
        let b: Vec<_> = to.amplitudes().iter().map(|z| z * phase).collect();
        let cos_total = overlap.norm().min(1.0);
        let angle = cos_total.acos();
        let ortho: Vec<_> = b.iter().zip(a).map(|(y, x)| y - x * cos_total).collect();
        let ortho_norm = crate::state::norm(&ortho);

        let mut params = Vec::with_capacity(points);
        let mut states = Vec::with_capacity(points);
        for i in 0..points {
            let t = i as f64 / (points - 1) as f64;
            let state = if i == 0 {
                from.clone()
            } else if i == points - 1 {
                to.clone()
            } else if ortho_norm < 1e-15 {
                from.clone()
            } else {
                let th = t * angle;
                PureState::new(
                    a.iter()
                        .zip(&ortho)
                        .map(|(x, o)| x * th.cos() + o * (th.sin() / ortho_norm))
                        .collect(),
                )?
            };
            params.push(t);
            states.push(state);
        }
        Ok(Self { params, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Partner counts along a generator path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationScan {
    pub params: Vec<f64>,
    pub partner_counts: Vec<usize>,
    pub unresolved: Vec<usize>,
    /// `(t_i, t_{i+1})` where the count changes between consecutive points.
    pub bifurcation_intervals: Vec<(f64, f64)>,
}

/// Counts partners at each generator of `path` and flags where the count changes.
pub fn scan_bifurcations(
    path: &GeneratorPath,
    bases: &[ObservableBasis],
    strategy: &SeedStrategy,
    config: &IterationConfig,
    dedup_tol: f64,
) -> Result<BifurcationScan> {
    if path.len() < 2 {
        return Err(Error::InvalidProblem(
            "bifurcation scan needs a path of at least 2 generators".into(),
        ));
    }
    let mut counts = Vec::with_capacity(path.len());
    let mut unresolved = Vec::with_capacity(path.len());
    for generator in &path.states {
        let problem = synthesize_problem(generator, bases)?;
        let set = enumerate_partners(&problem, strategy, config, dedup_tol)?;
        counts.push(set.count());
        unresolved.push(set.unresolved);
    }
    let bifurcation_intervals = counts
        .windows(2)
        .zip(path.params.windows(2))
        .filter(|(c, _)| c[0] != c[1])
        .map(|(_, t)| (t[0], t[1]))
        .collect();
    Ok(BifurcationScan {
        params: path.params.clone(),
        partner_counts: counts,
        unresolved,
        bifurcation_intervals,
    })
}

/// Sampled verdict on whether a set of observables determines every state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CompletenessVerdict {
    /// No sampled generator had a partner. Bounded sampling cannot prove this.
    Complete { samples: usize, heuristic: bool },
    /// `witness` generated distributions shared by `partners` distinct states.
    Incomplete { witness: PureState, partners: usize },
    /// No witness found, but some runs left too many seeds unresolved.
    Inconclusive { samples: usize, unreliable_runs: usize },
}

/// Samples random generators looking for one with two or more partners.
pub fn is_informationally_complete_heuristic(
    bases: &[ObservableBasis],
    generator_samples: usize,
    strategy: &SeedStrategy,
    config: &IterationConfig,
    dedup_tol: f64,
    rng_seed: u64,
) -> Result<CompletenessVerdict> {
    if bases.is_empty() {
        return Err(Error::InvalidProblem("no bases given".into()));
    }
    if generator_samples == 0 {
        return Err(Error::InvalidConfig("need at least one generator sample".into()));
    }
    let n = bases[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut unreliable_runs = 0;
    for _ in 0..generator_samples {
        let generator = random_state(n, &mut rng);
        let targets = bases
            .iter()
            .map(|b| b.distribution(&generator))
            .collect::<Result<Vec<_>>>()?;
        let chain = ImpositionChain::from_parts(bases, &targets)?;
        let set = enumerate_on_chain(&chain, strategy, config, dedup_tol)?;
        if set.count() >= 2 {
            return Ok(CompletenessVerdict::Incomplete {
                witness: generator,
                partners: set.count(),
            });
        }
        if set.is_unreliable() {
            unreliable_runs += 1;
        }
    }
    Ok(if unreliable_runs > 0 {
        CompletenessVerdict::Inconclusive {
            samples: generator_samples,
            unreliable_runs,
        }
    } else {
        CompletenessVerdict::Complete {
            samples: generator_samples,
            heuristic: true,
        }
    })
}
