//! Command-line front end.
//!
//! Every command writes its JSON output plus a `*.run.json` record next to
//! it. Exit codes: 0 success, 1 error, 2 result flagged as unreliable (too
//! many unresolved seeds) or, for `verify-mubs`, a failed check.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::basin::{export_basin_csv, export_basin_image, map_basins};
use crate::basis::{chirp_state, computational_basis, fourier_basis, ObservableBasis};
use crate::config::Settings;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::imposition::IterationConfig;
use crate::io::{
    parse_bases, parse_state, parse_targets, read_text, write_json, BasinSummaryJson,
    BifurcationJson, MubSetJson, PartnerSetJson, StateFile,
};
use crate::mubs::{find_mubs, find_mubs_prime_power, verify_mub_set, MubConfig, DEFAULT_UNBIAS_TOL};
use crate::partners::{
    enumerate_partners, scan_bifurcations, synthesize_problem, GeneratorPath, ReconstructionProblem,
    SeedStrategy, DEFAULT_DEDUP_TOL, DEFAULT_RNG_SEED, UNRELIABLE_FRACTION,
};
use crate::record::{record_path, RunRecord};
use crate::state::PureState;

pub const DEFAULT_RESOLUTION: usize = 100;
pub const DEFAULT_PATH_POINTS: usize = 50;

#[derive(Parser, Debug)]
#[command(
    name = "pauli-forge",
    version,
    about = "Pure-state reconstruction, Pauli partners and mutually unbiased bases"
)]
pub struct Cli {
    /// Worker threads for seed and grid evaluation [default: all cores]
    #[arg(long, global = true, env = "PAULI_FORGE_THREADS")]
    pub threads: Option<usize>,
    /// Seed for every random choice
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat `key = value` configuration file; flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the Pauli partners of a generator or of given distributions
    #[command(visible_alias = "partners")]
    Reconstruct(ReconstructArgs),
    /// Assemble mutually unbiased bases from flat-generator partners
    Mubs(MubsArgs),
    /// Map basins of attraction on the phase torus (dimension 3)
    Basin(BasinArgs),
    /// Count partners along a generator path and report where the count changes
    Bifurcate(BifurcateArgs),
    /// Check a set of bases for orthonormality and mutual unbiasedness
    VerifyMubs(VerifyArgs),
    /// Re-run a command from its run record after checking input digests
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct IterArgs {
    /// Convergence tolerance on residual and step
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap per seed
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Bures radius below which two solutions are the same
    #[arg(long)]
    pub dedup_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Bases file [default: computational and Fourier bases]
    #[arg(long, value_name = "FILE")]
    pub bases: Option<PathBuf>,
    /// Target distributions, one per basis
    #[arg(long, value_name = "FILE", required_unless_present = "generator", conflicts_with = "generator")]
    pub targets: Option<PathBuf>,
    /// Generator state whose distributions become the targets
    #[arg(long, value_name = "FILE")]
    pub generator: Option<PathBuf>,
    /// Seed layout, `grid:K` or `random:COUNT`
    #[arg(long)]
    pub strategy: Option<SeedStrategy>,
    #[command(flatten)]
    pub iter: IterArgs,
    #[arg(long, value_name = "FILE", default_value = "partners.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MubsArgs {
    /// Dimension, using computational and Fourier bases
    #[arg(long, required_unless_present = "prime_power", conflicts_with = "prime_power")]
    pub dim: Option<usize>,
    /// Dimension `P^R`, using the tensor Fourier basis second
    #[arg(long, num_args = 2, value_names = ["P", "R"])]
    pub prime_power: Option<Vec<usize>>,
    /// Wall-clock budget in seconds
    #[arg(long)]
    pub budget: Option<u64>,
    /// Unbiasedness tolerance on squared overlaps
    #[arg(long)]
    pub unbias_tol: Option<f64>,
    #[command(flatten)]
    pub iter: IterArgs,
    #[arg(long, value_name = "FILE", default_value = "mubs.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BasinArgs {
    /// Generator state file
    #[arg(long, value_name = "FILE", required_unless_present = "flat", conflicts_with = "flat")]
    pub generator: Option<PathBuf>,
    /// Flat targets in every basis
    #[arg(long)]
    pub flat: bool,
    /// Bases file [default: computational and Fourier bases of dimension 3]
    #[arg(long, value_name = "FILE")]
    pub bases: Option<PathBuf>,
    /// Cells per phase axis
    #[arg(long)]
    pub resolution: Option<usize>,
    #[command(flatten)]
    pub iter: IterArgs,
    /// Writes PREFIX.csv, PREFIX.ppm and PREFIX.json
    #[arg(long, value_name = "PREFIX", default_value = "basin")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BifurcateArgs {
    /// Start of the path [default: first computational basis vector]
    #[arg(long, value_name = "FILE")]
    pub from: Option<PathBuf>,
    /// End of the path [default: a chirp unbiased to computational and Fourier bases]
    #[arg(long, value_name = "FILE")]
    pub to: Option<PathBuf>,
    /// Dimension used when neither end is given
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Bases file [default: computational and Fourier bases]
    #[arg(long, value_name = "FILE")]
    pub bases: Option<PathBuf>,
    /// Generators along the geodesic, ends included
    #[arg(long)]
    pub points: Option<usize>,
    /// Seed layout, `grid:K` or `random:COUNT`
    #[arg(long)]
    pub strategy: Option<SeedStrategy>,
    #[command(flatten)]
    pub iter: IterArgs,
    #[arg(long, value_name = "FILE", default_value = "bifurcation.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// A bases file or the output of `mubs`
    #[arg(long, value_name = "FILE")]
    pub bases: PathBuf,
    #[arg(long, default_value_t = DEFAULT_UNBIAS_TOL)]
    pub tol: f64,
    /// Also write the verification report here
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// A `*.run.json` file
    pub record: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Flagged,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Flagged => 2,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command_line = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, command_line) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli, command_line: Vec<String>) -> Result<Outcome> {
    let file = match &cli.config {
        Some(path) => Settings::parse(&read_text(path)?)?,
        None => Settings::default(),
    };
    let flags = Settings {
        seed: cli.seed,
        threads: cli.threads,
        ..Settings::default()
    };
    let base = flags.or(file);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(base.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let mut ctx = Context {
        command_line,
        config_file: cli.config.clone(),
        threads: pool.current_num_threads(),
        seed: base.seed.unwrap_or(DEFAULT_RNG_SEED),
        inputs: Vec::new(),
        start: Instant::now(),
    };
    if let Some(path) = &cli.config {
        ctx.inputs.push(path.clone());
    }
    pool.install(|| match cli.command {
        Command::Reconstruct(a) => reconstruct(a, base, &mut ctx),
        Command::Mubs(a) => mubs(a, base, &mut ctx),
        Command::Basin(a) => basin(a, base, &mut ctx),
        Command::Bifurcate(a) => bifurcate(a, base, &mut ctx),
        Command::VerifyMubs(a) => verify(a, &mut ctx),
        Command::Replay(a) => replay(a),
    })
}

struct Context {
    command_line: Vec<String>,
    config_file: Option<PathBuf>,
    threads: usize,
    seed: u64,
    inputs: Vec<PathBuf>,
    start: Instant,
}

impl Context {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = read_text(path)?;
        self.inputs.push(path.to_path_buf());
        Ok(text)
    }

    fn record(&self, config: serde_json::Value, outputs: &[PathBuf]) -> Result<()> {
        let mut config = config;
        config["threads"] = json!(self.threads);
        config["seed"] = json!(self.seed);
        if let Some(path) = &self.config_file {
            config["config_file"] = json!(path.display().to_string());
        }
        let record = RunRecord::new(
            self.command_line.clone(),
            config,
            &self.inputs,
            outputs,
            self.start.elapsed(),
        )?;
        write_json(&record_path(&outputs[0]), &record)
    }
}

fn iter_settings(iter: &IterArgs) -> Settings {
    Settings {
        tol: iter.tol,
        max_iter: iter.max_iter,
        dedup_tol: iter.dedup_tol,
        ..Settings::default()
    }
}

fn default_bases(n: usize) -> Result<Vec<ObservableBasis>> {
    Ok(vec![computational_basis(n)?, fourier_basis(n)?])
}

fn load_bases(ctx: &mut Context, path: Option<&Path>, n: usize) -> Result<Vec<ObservableBasis>> {
    match path {
        Some(p) => {
            let bases = parse_bases(&ctx.read(p)?)?;
            if let Some((i, b)) = bases.iter().enumerate().find(|(_, b)| b.dim() != n) {
                return Err(Error::format(
                    format!("bases[{i}].dim"),
                    format!("expected {n}, found {}", b.dim()),
                ));
            }
            Ok(bases)
        }
        None => default_bases(n),
    }
}

fn load_state(ctx: &mut Context, path: &Path) -> Result<PureState> {
    parse_state(&ctx.read(path)?)
}

fn reconstruct(a: ReconstructArgs, base: Settings, ctx: &mut Context) -> Result<Outcome> {
    let s = Settings {
        strategy: a.strategy,
        ..iter_settings(&a.iter)
    }
    .or(base);
    let (problem, n) = if let Some(path) = &a.generator {
        let generator = load_state(ctx, path)?;
        let n = generator.dim();
        let bases = load_bases(ctx, a.bases.as_deref(), n)?;
        (synthesize_problem(&generator, &bases)?, n)
    } else {
        let path = a.targets.as_ref().expect("clap requires targets or generator");
        let targets = parse_targets(&ctx.read(path)?)?;
        let n = targets.first().map(Distribution::dim).ok_or_else(|| {
            Error::format("targets", "expected at least one distribution")
        })?;
        let bases = load_bases(ctx, a.bases.as_deref(), n)?;
        if targets.len() != bases.len() {
            return Err(Error::format(
                "targets",
                format!("expected {} distributions (one per basis), found {}", bases.len(), targets.len()),
            ));
        }
        if let Some((i, t)) = targets.iter().enumerate().find(|(_, t)| t.dim() != n) {
            return Err(Error::format(
                format!("targets[{i}]"),
                format!("expected {n} probabilities, found {}", t.dim()),
            ));
        }
        (ReconstructionProblem::new(bases, targets)?, n)
    };
    let config = s.iteration(IterationConfig::for_problem(n, problem.bases().len()));
    let strategy = s.strategy_or(SeedStrategy::default_for(n));
    let dedup_tol = s.dedup_tol.unwrap_or(DEFAULT_DEDUP_TOL);

    let set = enumerate_partners(&problem, &strategy, &config, dedup_tol)?;
    write_json(&a.out, &PartnerSetJson::new(&set, n, strategy.to_string()))?;
    ctx.record(
        json!({ "iteration": config, "strategy": strategy, "dedup_tol": dedup_tol }),
        &[a.out.clone()],
    )?;

    println!("\u{1D4A9} = {}", set.count());
    if set.is_pauli_unique() {
        println!("Pauli unique");
    }
    if !set.undesirables.is_empty() {
        println!("{} undesirable fixed points", set.undesirables.len());
    }
    println!("{} of {} seeds unresolved", set.unresolved, set.seeds_run);
    println!("wrote {}", a.out.display());
    if set.is_unreliable() {
        eprintln!(
            "warning: more than {:.0}% of seeds unresolved; the count may be incomplete",
            UNRELIABLE_FRACTION * 100.0
        );
        return Ok(Outcome::Flagged);
    }
    Ok(Outcome::Ok)
}

fn mubs(a: MubsArgs, base: Settings, ctx: &mut Context) -> Result<Outcome> {
    let s = Settings {
        budget: a.budget,
        unbias_tol: a.unbias_tol,
        ..iter_settings(&a.iter)
    }
    .or(base);
    let (n, power) = match (&a.dim, &a.prime_power) {
        (_, Some(pr)) => (pr[0].checked_pow(pr[1] as u32), Some((pr[0], pr[1]))),
        (Some(n), None) => (Some(*n), None),
        (None, None) => unreachable!("clap requires --dim or --prime-power"),
    };
    let n = n.ok_or_else(|| Error::format("prime-power", "dimension overflows"))?;
    let mut cfg = MubConfig::for_dim(n);
    cfg.iteration = s.iteration(cfg.iteration);
    if let Some(b) = s.budget {
        cfg.budget = std::time::Duration::from_secs(b);
    }
    if let Some(seed) = s.seed {
        cfg.rng_seed = seed;
    }
    if let Some(t) = s.dedup_tol {
        cfg.dedup_tol = t;
    }
    if let Some(t) = s.unbias_tol {
        cfg.unbias_tol = t;
    }
    let set = match power {
        Some((p, r)) => find_mubs_prime_power(p, r, &cfg)?,
        None => find_mubs(n, &cfg)?,
    };
    write_json(&a.out, &MubSetJson::from(&set))?;
    ctx.record(json!({ "mubs": cfg }), &[a.out.clone()])?;

    println!(
        "{} mutually unbiased bases in dimension {n} (max unbias error {:.2e}, max ortho error {:.2e})",
        set.len(),
        set.max_unbias_error,
        set.max_ortho_error
    );
    if let Some(note) = &set.diagnostics.note {
        println!("{note}");
    }
    println!("wrote {}", a.out.display());
    Ok(Outcome::Ok)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn basin(a: BasinArgs, base: Settings, ctx: &mut Context) -> Result<Outcome> {
    let s = Settings {
        resolution: a.resolution,
        ..iter_settings(&a.iter)
    }
    .or(base);
    let n = 3;
    let bases = load_bases(ctx, a.bases.as_deref(), n)?;
    let problem = match &a.generator {
        Some(path) => {
            let generator = load_state(ctx, path)?;
            synthesize_problem(&generator, &bases)?
        }
        None => {
            let flat = vec![Distribution::flat(n); bases.len()];
            ReconstructionProblem::new(bases, flat)?
        }
    };
    let config = s.iteration(IterationConfig::for_problem(n, problem.bases().len()));
    let dedup_tol = s.dedup_tol.unwrap_or(DEFAULT_DEDUP_TOL);
    let resolution = s.resolution.unwrap_or(DEFAULT_RESOLUTION);

    let grid = map_basins(&problem, resolution, &config, dedup_tol)?;
    let csv = with_suffix(&a.out, ".csv");
    let ppm = with_suffix(&a.out, ".ppm");
    let summary = with_suffix(&a.out, ".json");
    export_basin_csv(&grid, &csv)?;
    export_basin_image(&grid, &ppm)?;
    write_json(&summary, &BasinSummaryJson::from(&grid))?;
    ctx.record(
        json!({ "iteration": config, "resolution": resolution, "dedup_tol": dedup_tol }),
        &[summary.clone(), csv.clone(), ppm.clone()],
    )?;

    println!(
        "{} partner basins, {} undesirable attractors on a {resolution}x{resolution} grid",
        grid.partners.len(),
        grid.undesirables.len()
    );
    for area in &grid.areas {
        println!("  label {:>3}: {:.4}", area.label, area.fraction);
    }
    println!("wrote {}, {}, {}", csv.display(), ppm.display(), summary.display());
    if grid.is_unreliable() {
        eprintln!(
            "warning: {:.2}% of cells unresolved",
            grid.unresolved_fraction() * 100.0
        );
        return Ok(Outcome::Flagged);
    }
    Ok(Outcome::Ok)
}

fn bifurcate(a: BifurcateArgs, base: Settings, ctx: &mut Context) -> Result<Outcome> {
    let s = Settings {
        strategy: a.strategy,
        points: a.points,
        ..iter_settings(&a.iter)
    }
    .or(base);
    let from = a.from.as_ref().map(|p| load_state(ctx, p)).transpose()?;
    let to = a.to.as_ref().map(|p| load_state(ctx, p)).transpose()?;
    let n = from.as_ref().or(to.as_ref()).map_or(a.dim, PureState::dim);
    let from = match from {
        Some(s) => s,
        None => PureState::basis_vector(n, 0),
    };
    let to = match to {
        Some(s) => s,
        None => chirp_state(n)?,
    };
    let bases = load_bases(ctx, a.bases.as_deref(), n)?;
    let points = s.points.unwrap_or(DEFAULT_PATH_POINTS);
    let config = s.iteration(IterationConfig::for_problem(n, bases.len()));
    let strategy = s.strategy_or(SeedStrategy::default_for(n));
    let dedup_tol = s.dedup_tol.unwrap_or(DEFAULT_DEDUP_TOL);

    let path = GeneratorPath::geodesic(&from, &to, points)?;
    let scan = scan_bifurcations(&path, &bases, &strategy, &config, dedup_tol)?;
    let doc = BifurcationJson {
        strategy: strategy.to_string(),
        path: path.states.iter().map(StateFile::from_state).collect(),
        scan,
    };
    write_json(&a.out, &doc)?;
    ctx.record(
        json!({ "iteration": config, "strategy": strategy, "dedup_tol": dedup_tol, "points": points }),
        &[a.out.clone()],
    )?;

    let counts = &doc.scan.partner_counts;
    println!(
        "partner counts from {} to {} along {points} generators",
        counts[0],
        counts[counts.len() - 1]
    );
    for (lo, hi) in &doc.scan.bifurcation_intervals {
        println!("  count changes in [{lo:.4}, {hi:.4}]");
    }
    println!("wrote {}", a.out.display());
    let seeds = strategy.seed_count(n) as f64;
    if doc.scan.unresolved.iter().any(|&u| u as f64 / seeds > UNRELIABLE_FRACTION) {
        eprintln!("warning: some generators left too many seeds unresolved");
        return Ok(Outcome::Flagged);
    }
    Ok(Outcome::Ok)
}

fn verify(a: VerifyArgs, ctx: &mut Context) -> Result<Outcome> {
    let text = ctx.read(&a.bases)?;
    let bases = match serde_json::from_str::<MubSetJson>(&text) {
        Ok(doc) => doc
            .bases
            .iter()
            .enumerate()
            .map(|(i, b)| {
                b.to_basis().map_err(|e| match e {
                    Error::Format { field, message } => {
                        Error::format(format!("bases[{i}].{field}"), message)
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        Err(_) => parse_bases(&text)?,
    };
    let report = verify_mub_set(&bases, a.tol)?;
    if let Some(out) = &a.out {
        write_json(out, &report)?;
        ctx.record(json!({ "tol": a.tol }), &[out.clone()])?;
    }
    println!(
        "{} bases: {} (max unbias error {:.2e}, max ortho error {:.2e}, {} violations)",
        bases.len(),
        if report.ok { "mutually unbiased" } else { "NOT mutually unbiased" },
        report.max_unbias_error,
        report.max_ortho_error,
        report.violations.len()
    );
    Ok(if report.ok { Outcome::Ok } else { Outcome::Flagged })
}

fn replay(a: ReplayArgs) -> Result<Outcome> {
    let record = RunRecord::load(&a.record)?;
    let changed = record.check_inputs()?;
    if let Some(c) = changed.first() {
        return Err(Error::InvalidProblem(format!(
            "input {} changed since the run (sha256 {} recorded, {} now)",
            c.path, c.expected, c.found
        )));
    }
    Ok(match run(&record.command_line) {
        0 => Outcome::Ok,
        2 => Outcome::Flagged,
        _ => return Err(Error::InvalidProblem("replayed command failed".into())),
    })
}
