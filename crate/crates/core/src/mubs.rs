//! Mutually unbiased bases assembled from the partners of a flat generator.
//!
//! A state with flat distributions in two bases is unbiased to both. Taking
//! flat targets for the first two bases of a would-be MUB set, every Pauli
//! partner is a candidate vector of a further basis.
//!
//! Candidates become bases in two ways. A permutation that maps both input
//! bases onto themselves up to phases (a cyclic shift for computational plus
//! Fourier) maps partners to partners, and the orbit of one partner under the
//! shift group is often already orthonormal. Partners whose orbit is not are
//! grouped by clique growth on their orthogonality graph. The largest family
//! of mutually unbiased bases among all candidates is kept.
//!
//! When that family stops growing, the search is repeated with flat targets
//! in every basis of the family, which leaves only vectors unbiased to all of
//! them. Bases found this way join the family and the step repeats. If the
//! family cannot be completed, the extension restarts from other candidate
//! bases, most frequently reached ones first. This matters when the vectors
//! unbiased to the two inputs form a continuum, as in dimension 4: random
//! seeds land on generic points of the continuum, and only the extra
//! constraints single out the bases that extend to larger families.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{
    computational_basis, fourier_basis, is_prime, tensor_fourier_basis, ObservableBasis,
};
use crate::distribution::Distribution;
use crate::error::{check_dim, Error, Result};
use crate::imposition::{ImpositionChain, IterationConfig};
use crate::partners::{PartnerSearch, DEFAULT_DEDUP_TOL, DEFAULT_RNG_SEED};
use crate::sampling::{lattice_seed, random_seed};
use crate::state::PureState;

pub const DEFAULT_ORTHO_TOL: f64 = 1e-6;
pub const DEFAULT_UNBIAS_TOL: f64 = 1e-6;
pub const DEFAULT_BUDGET_SECS: u64 = 300;

/// Knobs of the MUB search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubConfig {
    pub iteration: IterationConfig,
    /// Random phase seeds per batch.
    pub batch_size: usize,
    /// Hard cap on the total number of seeds.
    pub max_seeds: usize,
    /// Wall-clock budget; checked between batches.
    pub budget: Duration,
    /// The opening round, which imposes only the two inputs, ends after this
    /// many consecutive batches that did not enlarge the family of bases.
    pub opening_stall_batches: usize,
    /// The same limit for the extension rounds.
    pub stall_batches: usize,
    /// Starting families tried when extending a stalled family.
    pub extension_attempts: usize,
    /// Every other batch draws seed phases from the multiples of
    /// `2 pi / lattice_order`; 0 uses uniform phases only. Such seeds reach
    /// isolated special points inside a continuum of partners, which uniform
    /// phases miss. For prime `N` the partners are isolated anyway.
    pub lattice_order: usize,
    pub rng_seed: u64,
    pub dedup_tol: f64,
    /// Two candidates are orthogonal when `|<u,v>| < ortho_tol`.
    pub ortho_tol: f64,
    /// Two bases are unbiased when every `| |<u,v>|^2 - 1/N |` is below this.
    pub unbias_tol: f64,
}

impl MubConfig {
    pub fn for_dim(n: usize) -> Self {
        Self {
            // stalled seeds are refined rather than iterated to the end
            iteration: IterationConfig {
                max_iter: 100 * n * 2,
                ..IterationConfig::for_problem(n, 2)
            },
            batch_size: 16 * n,
            max_seeds: 4000 * n * n,
            budget: Duration::from_secs(DEFAULT_BUDGET_SECS),
            // for prime N the opening round alone completes the set; elsewhere
            // the partners form a continuum and extension rounds do the work
            opening_stall_batches: if is_prime(n) { 12 * n } else { 12 },
            stall_batches: 12,
            extension_attempts: 2 * n,
            lattice_order: match n {
                _ if is_prime(n) => 0,
                _ if n % 2 == 0 => 2 * n,
                _ => n,
            },
            rng_seed: DEFAULT_RNG_SEED,
            dedup_tol: DEFAULT_DEDUP_TOL,
            ortho_tol: DEFAULT_ORTHO_TOL,
            unbias_tol: DEFAULT_UNBIAS_TOL,
        }
    }
}

/// Why the seed loop ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `N + 1` bases were assembled, the most any dimension admits.
    Complete,
    /// Every extension attempt stalled.
    Saturated,
    SeedCap,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubDiagnostics {
    pub dim: usize,
    pub seeds_run: usize,
    /// Partner searches run; the first uses the two input bases only.
    pub rounds: usize,
    /// Distinct partners, summed over rounds.
    pub partners: usize,
    pub undesirables: usize,
    pub unresolved: usize,
    /// Orthonormal bases assembled from partners, before the unbiasedness selection.
    pub candidate_bases: usize,
    pub stop_reason: StopReason,
    /// Present when fewer than `N + 1` bases were found.
    pub note: Option<String>,
}

/// A family of mutually unbiased bases; the two input bases come first.
#[derive(Clone, Debug, PartialEq)]
pub struct MubSet {
    pub bases: Vec<ObservableBasis>,
    pub max_unbias_error: f64,
    pub max_ortho_error: f64,
    pub diagnostics: MubDiagnostics,
}

impl MubSet {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

/// MUBs containing the computational and Fourier bases of dimension `n`.
pub fn find_mubs(n: usize, config: &MubConfig) -> Result<MubSet> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    find_mubs_with_bases(computational_basis(n)?, fourier_basis(n)?, config)
}

/// As [`find_mubs`] in dimension `p^r`, with the tensor Fourier basis second.
pub fn find_mubs_prime_power(p: usize, r: usize, config: &MubConfig) -> Result<MubSet> {
    let second = tensor_fourier_basis(p, r)?;
    find_mubs_with_symmetries(
        computational_basis(second.dim())?,
        second,
        &digit_shifts(p, r),
        config,
    )
}

/// A permutation `P` of `C^N` coordinates: `(P v)[perm[k]] = v[k]`.
pub type Permutation = Vec<usize>;

/// The `p^r` shifts adding a fixed vector to the base-`p` digits of the index.
pub fn digit_shifts(p: usize, r: usize) -> Vec<Permutation> {
    let n = p.pow(r as u32);
    (0..n)
        .map(|shift| {
            (0..n)
                .map(|k| {
                    let (mut a, mut b, mut out, mut place) = (k, shift, 0, 1);
                    for _ in 0..r {
                        out += ((a % p + b % p) % p) * place;
                        a /= p;
                        b /= p;
                        place *= p;
                    }
                    out
                })
                .collect()
        })
        .collect()
}

fn permute(perm: &[usize], v: &PureState) -> PureState {
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); perm.len()];
    for (k, z) in v.amplitudes().iter().enumerate() {
        out[perm[k]] = *z;
    }
    PureState::new(out).expect("a permuted unit vector is a unit vector")
}

/// `true` if `perm` maps every vector of `basis` to a phase multiple of one.
fn preserves(perm: &[usize], basis: &ObservableBasis) -> bool {
    basis.vectors().iter().all(|v| {
        let image = permute(perm, v);
        basis
            .vectors()
            .iter()
            .any(|w| (w.inner(&image).norm() - 1.0).abs() < 1e-12)
    })
}

/// MUBs containing two given mutually unbiased bases. Cyclic shifts are used
/// as symmetries when they preserve both bases.
pub fn find_mubs_with_bases(
    first: ObservableBasis,
    second: ObservableBasis,
    config: &MubConfig,
) -> Result<MubSet> {
    check_dim(first.dim(), second.dim())?;
    let shifts = digit_shifts(first.dim(), 1);
    let shifts = if shifts.iter().all(|p| preserves(p, &first) && preserves(p, &second)) {
        shifts
    } else {
        Vec::new()
    };
    find_mubs_with_symmetries(first, second, &shifts, config)
}

/// MUBs containing `first` and `second`; `symmetries` must map both bases
/// onto themselves up to phases and is used to complete partner orbits.
/// An empty list disables orbit completion.
pub fn find_mubs_with_symmetries(
    first: ObservableBasis,
    second: ObservableBasis,
    symmetries: &[Permutation],
    config: &MubConfig,
) -> Result<MubSet> {
    check_dim(first.dim(), second.dim())?;
    for perm in symmetries {
        let valid = perm.len() == first.dim()
            && (0..perm.len()).all(|k| perm.contains(&k))
            && preserves(perm, &first)
            && preserves(perm, &second);
        if !valid {
            return Err(Error::InvalidProblem(
                "symmetry does not preserve both input bases".into(),
            ));
        }
    }
    if config.batch_size == 0
        || config.max_seeds == 0
        || config.stall_batches == 0
        || config.opening_stall_batches == 0
    {
        return Err(Error::InvalidConfig(
            "batch sizes, seed caps and stall limits must be positive".into(),
        ));
    }
    let n = first.dim();
    let target = n + 1;
    let inputs = vec![first, second];
    let mut search = Search {
        symmetries,
        config,
        rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
        start: Instant::now(),
        seeds_run: 0,
        batches: 0,
        rounds: 0,
        partners: 0,
        undesirables: 0,
        unresolved: 0,
        candidate_bases: 0,
    };

    let opening = search.round(&inputs, &inputs, target, config.opening_stall_batches)?;
    let mut best = with_bases(inputs.clone(), &opening.found, config.ortho_tol)?;
    let mut end = opening.end;
    if best.len() < target && end == RoundEnd::Stalled {
        // start from the opening family, then from single candidates,
        // repeatedly hit ones first
        let mut starts = Vec::new();
        if !opening.found.is_empty() {
            starts.push(opening.found);
        }
        starts.extend(opening.ranked.into_iter().map(|b| vec![b]));
        starts.truncate(config.extension_attempts);
        for start in starts {
            let family = with_bases(inputs.clone(), &start, config.ortho_tol)?;
            let (family, e) = search.extend(family, target)?;
            if family.len() > best.len() {
                best = family;
            }
            end = e;
            if best.len() >= target || e != RoundEnd::Stalled {
                break;
            }
        }
    }
    let stop_reason = match end {
        _ if best.len() >= target => StopReason::Complete,
        RoundEnd::SeedCap => StopReason::SeedCap,
        RoundEnd::Budget => StopReason::Budget,
        RoundEnd::Done | RoundEnd::Stalled => StopReason::Saturated,
    };

    let bases: Vec<ObservableBasis> = best
        .into_iter()
        .enumerate()
        .map(|(i, b)| if i < 2 { b } else { b.with_label(format!("mub-{}", i - 1)) })
        .collect();
    let check = verify_mub_set(&bases, config.unbias_tol)?;
    let note = (bases.len() < target).then(|| {
        format!(
            "{} of at most {} bases; no further basis found within budget",
            bases.len(),
            target
        )
    });
    Ok(MubSet {
        max_unbias_error: check.max_unbias_error,
        max_ortho_error: check.max_ortho_error,
        diagnostics: MubDiagnostics {
            dim: n,
            seeds_run: search.seeds_run,
            rounds: search.rounds,
            partners: search.partners,
            undesirables: search.undesirables,
            unresolved: search.unresolved,
            candidate_bases: search.candidate_bases,
            stop_reason,
            note,
        },
        bases,
    })
}

fn with_bases(
    mut family: Vec<ObservableBasis>,
    extra: &[Vec<PureState>],
    ortho_tol: f64,
) -> Result<Vec<ObservableBasis>> {
    for vectors in extra {
        let label = format!("candidate-{}", family.len());
        family.push(ObservableBasis::with_tolerance(label, vectors.clone(), ortho_tol)?);
    }
    Ok(family)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RoundEnd {
    /// The family reached the target size.
    Done,
    /// `stall_batches` batches in a row added nothing to the best family.
    Stalled,
    SeedCap,
    Budget,
}

struct Round {
    /// Largest set of new bases unbiased to each other and to the family.
    found: Vec<Vec<PureState>>,
    /// Every candidate basis, most often hit first.
    ranked: Vec<Vec<PureState>>,
    end: RoundEnd,
}

/// State shared by the search rounds of one run.
struct Search<'a> {
    symmetries: &'a [Permutation],
    config: &'a MubConfig,
    rng: ChaCha8Rng,
    start: Instant,
    seeds_run: usize,
    batches: usize,
    rounds: usize,
    partners: usize,
    undesirables: usize,
    unresolved: usize,
    candidate_bases: usize,
}

impl Search<'_> {
    /// Multistart search for states flat in every basis of `imposed`,
    /// keeping candidate bases unbiased to all of `family`.
    fn round(
        &mut self,
        imposed: &[ObservableBasis],
        family: &[ObservableBasis],
        target: usize,
        stall_batches: usize,
    ) -> Result<Round> {
        let cfg = self.config;
        let n = family[0].dim();
        let flat = vec![Distribution::flat(n); imposed.len()];
        let chain = ImpositionChain::from_parts(imposed, &flat)?;
        let mut search = PartnerSearch::new(&chain, cfg.iteration.clone(), cfg.dedup_tol)?;
        let mut pool = Candidates::new(self.symmetries, &family[2..], cfg.ortho_tol, cfg.unbias_tol);
        let mut found = Vec::new();
        let mut idle = 0;
        self.rounds += 1;
        let end = loop {
            if self.seeds_run >= cfg.max_seeds {
                break RoundEnd::SeedCap;
            }
            if self.start.elapsed() >= cfg.budget {
                break RoundEnd::Budget;
            }
            let batch = cfg.batch_size.min(cfg.max_seeds - self.seeds_run);
            self.batches += 1;
            let lattice = cfg.lattice_order > 0 && self.batches % 2 == 0;
            let seeds: Vec<_> = (0..batch)
                .map(|_| {
                    if lattice {
                        lattice_seed(n, cfg.lattice_order, &mut self.rng)
                    } else {
                        random_seed(n, &mut self.rng)
                    }
                })
                .collect();
            let before = search.partners().len();
            search.run_batch(&seeds)?;
            self.seeds_run += batch;
            for (i, p) in search.partners()[before..].iter().enumerate() {
                pool.add(before + i, &p.state);
            }
            let family_now = pool.best_family();
            if family_now.len() > found.len() {
                found = family_now;
                idle = 0;
            } else {
                idle += 1;
            }
            if family.len() + found.len() >= target {
                break RoundEnd::Done;
            }
            if idle >= stall_batches {
                break RoundEnd::Stalled;
            }
        };
        let set = search.finish();
        self.partners += set.partners.len();
        self.undesirables += set.undesirables.len();
        self.unresolved += set.unresolved;
        self.candidate_bases += pool.len();
        let hits: Vec<usize> = set.partners.iter().map(|p| p.hits).collect();
        Ok(Round {
            found,
            ranked: pool.ranked(&hits),
            end,
        })
    }

    /// Grows `family` one round at a time. Each round imposes flatness in the
    /// inputs and the first added basis; longer chains converge poorly.
    fn extend(
        &mut self,
        mut family: Vec<ObservableBasis>,
        target: usize,
    ) -> Result<(Vec<ObservableBasis>, RoundEnd)> {
        loop {
            if family.len() >= target {
                return Ok((family, RoundEnd::Done));
            }
            let imposed = family[..family.len().min(3)].to_vec();
            let round = self.round(&imposed, &family, target, self.config.stall_batches)?;
            family = with_bases(family, &round.found, self.config.ortho_tol)?;
            if round.found.is_empty() || round.end != RoundEnd::Stalled {
                return Ok((family, round.end));
            }
        }
    }
}

/// Candidate bases with their pairwise unbiasedness graph.
struct Candidates<'a> {
    symmetries: &'a [Permutation],
    /// Bases beyond the two inputs that every candidate must be unbiased to.
    extra: &'a [ObservableBasis],
    ortho_tol: f64,
    unbias_tol: f64,
    /// Bases built from symmetry orbits.
    orbits: Vec<Vec<PureState>>,
    /// Partner indices whose ray lies in each orbit basis.
    members: Vec<Vec<usize>>,
    orbit_graph: Vec<Vec<bool>>,
    /// Partners whose orbit is not orthonormal, grouped by clique growth.
    loose: Vec<PureState>,
}

impl<'a> Candidates<'a> {
    fn new(
        symmetries: &'a [Permutation],
        extra: &'a [ObservableBasis],
        ortho_tol: f64,
        unbias_tol: f64,
    ) -> Self {
        Self {
            symmetries,
            extra,
            ortho_tol,
            unbias_tol,
            orbits: Vec::new(),
            members: Vec::new(),
            orbit_graph: Vec::new(),
            loose: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.orbits.len() + self.grouped().len()
    }

    fn admissible(&self, basis: &[PureState]) -> bool {
        self.extra
            .iter()
            .all(|b| unbiased(b.vectors(), basis, self.unbias_tol))
    }

    /// Records partner number `index`.
    fn add(&mut self, index: usize, v: &PureState) {
        let home = self
            .orbits
            .iter()
            .position(|b| b.iter().any(|u| u.inner(v).norm() > 1.0 - self.ortho_tol));
        if let Some(k) = home {
            self.members[k].push(index);
            return;
        }
        if !self.symmetries.is_empty() {
            let orbit: Vec<PureState> = self.symmetries.iter().map(|p| permute(p, v)).collect();
            if max_overlap(&orbit) < self.ortho_tol {
                if !self.admissible(&orbit) {
                    return;
                }
                let row: Vec<bool> = self
                    .orbits
                    .iter()
                    .map(|b| unbiased(b, &orbit, self.unbias_tol))
                    .collect();
                for (r, &e) in self.orbit_graph.iter_mut().zip(&row) {
                    r.push(e);
                }
                let mut row = row;
                row.push(false);
                self.orbit_graph.push(row);
                self.orbits.push(orbit);
                self.members.push(vec![index]);
                return;
            }
        }
        self.loose.push(v.clone());
    }

    fn grouped(&self) -> Vec<Vec<PureState>> {
        let mut groups = group_into_bases(&self.loose, self.ortho_tol);
        groups.retain(|g| self.admissible(g));
        groups
    }

    /// Largest pairwise unbiased family among all candidates.
    fn best_family(&self) -> Vec<Vec<PureState>> {
        let grouped = self.grouped();
        let all: Vec<&Vec<PureState>> = self.orbits.iter().chain(&grouped).collect();
        let g = all.len();
        let o = self.orbits.len();
        let adj: Vec<Vec<bool>> = (0..g)
            .map(|a| {
                (0..g)
                    .map(|b| {
                        if a < o && b < o {
                            self.orbit_graph[a][b]
                        } else {
                            a != b && unbiased(all[a], all[b], self.unbias_tol)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut best = Vec::new();
        max_clique(&adj, &mut Vec::new(), (0..g).collect(), &mut best);
        best.into_iter().map(|i| all[i].clone()).collect()
    }

    /// Orbit bases by total partner hits, most first; grouped bases follow.
    fn ranked(self, hits: &[usize]) -> Vec<Vec<PureState>> {
        let grouped = self.grouped();
        let mut scored: Vec<(usize, Vec<PureState>)> = self
            .orbits
            .into_iter()
            .zip(&self.members)
            .map(|(b, m)| (m.iter().map(|&i| hits[i]).sum(), b))
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0));
        scored.into_iter().map(|(_, b)| b).chain(grouped).collect()
    }
}

fn max_overlap(vectors: &[PureState]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            worst = worst.max(a.inner(b).norm());
        }
    }
    worst
}

/// Early-exit check that every cross overlap is `1/N` within `tol`.
fn unbiased(a: &[PureState], b: &[PureState], tol: f64) -> bool {
    let inv = 1.0 / a[0].dim() as f64;
    a.iter()
        .all(|u| b.iter().all(|v| (u.inner(v).norm_sqr() - inv).abs() < tol))
}

/// Partitions `vectors` into orthonormal `N`-cliques of the orthogonality
/// graph, greedily in input order. Each clique search backtracks at most
/// `N^3` times; vectors left over belong to no basis.
pub fn group_into_bases(vectors: &[PureState], ortho_tol: f64) -> Vec<Vec<PureState>> {
    let Some(n) = vectors.first().map(PureState::dim) else {
        return Vec::new();
    };
    let count = vectors.len();
    let adjacent: Vec<Vec<bool>> = (0..count)
        .map(|i| {
            (0..count)
                .map(|j| i != j && vectors[i].inner(&vectors[j]).norm() < ortho_tol)
                .collect()
        })
        .collect();

    let mut used = vec![false; count];
    let mut groups = Vec::new();
    for root in 0..count {
        if used[root] {
            continue;
        }
        let mut budget = n * n * n;
        let mut clique = vec![root];
        if grow_clique(&adjacent, &used, &mut clique, n, root + 1, &mut budget) {
            for &i in &clique {
                used[i] = true;
            }
            groups.push(clique.iter().map(|&i| vectors[i].clone()).collect());
        }
    }
    groups
}

fn grow_clique(
    adjacent: &[Vec<bool>],
    used: &[bool],
    clique: &mut Vec<usize>,
    size: usize,
    from: usize,
    budget: &mut usize,
) -> bool {
    if clique.len() == size {
        return true;
    }
    for cand in from..adjacent.len() {
        if used[cand] || !clique.iter().all(|&c| adjacent[c][cand]) {
            continue;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        clique.push(cand);
        if grow_clique(adjacent, used, clique, size, cand + 1, budget) {
            return true;
        }
        clique.pop();
    }
    false
}

fn max_clique(adj: &[Vec<bool>], current: &mut Vec<usize>, cands: Vec<usize>, best: &mut Vec<usize>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    for (pos, &v) in cands.iter().enumerate() {
        if current.len() + cands.len() - pos <= best.len() {
            return;
        }
        let next: Vec<usize> = cands[pos + 1..].iter().copied().filter(|&u| adj[v][u]).collect();
        current.push(v);
        max_clique(adj, current, next, best);
        current.pop();
    }
}

/// Which pair check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Orthonormality,
    Unbiasedness,
}

/// One failing vector pair: `(basis_a, vector_a)` against `(basis_b, vector_b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub basis_a: usize,
    pub vector_a: usize,
    pub basis_b: usize,
    pub vector_b: usize,
    /// Deviation from the expected overlap.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubVerification {
    pub ok: bool,
    pub max_unbias_error: f64,
    pub max_ortho_error: f64,
    pub violations: Vec<Violation>,
}

/// Exhaustive pairwise check of orthonormality within and unbiasedness across bases.
pub fn verify_mub_set(bases: &[ObservableBasis], tol: f64) -> Result<MubVerification> {
    if bases.len() < 2 {
        return Err(Error::InvalidProblem(format!(
            "need at least 2 bases to verify, got {}",
            bases.len()
        )));
    }
    let n = bases[0].dim();
    for b in bases {
        check_dim(n, b.dim())?;
    }
    let inv = 1.0 / n as f64;
    let mut out = MubVerification {
        ok: true,
        max_unbias_error: 0.0,
        max_ortho_error: 0.0,
        violations: Vec::new(),
    };
    for (a, ba) in bases.iter().enumerate() {
        for (b, bb) in bases.iter().enumerate().skip(a) {
            for (i, u) in ba.vectors().iter().enumerate() {
                for (j, v) in bb.vectors().iter().enumerate() {
                    let overlap = u.inner(v);
                    let (kind, error) = if a == b {
                        if j < i {
                            continue;
                        }
                        let expected = if i == j { 1.0 } else { 0.0 };
                        let e = (overlap - num_complex::Complex64::new(expected, 0.0)).norm();
                        // the gauge makes <u,u> real; only the modulus matters off-diagonal
                        let e = if i == j { e } else { overlap.norm() };
                        out.max_ortho_error = out.max_ortho_error.max(e);
                        (ViolationKind::Orthonormality, e)
                    } else {
                        let e = (overlap.norm_sqr() - inv).abs();
                        out.max_unbias_error = out.max_unbias_error.max(e);
                        (ViolationKind::Unbiasedness, e)
                    };
                    if error > tol {
                        out.ok = false;
                        out.violations.push(Violation {
                            kind,
                            basis_a: a,
                            vector_a: i,
                            basis_b: b,
                            vector_b: j,
                            error,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
