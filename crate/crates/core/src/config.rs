//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Values are bare numbers or words; surrounding double quotes are stripped.
//!
//! ```text
//! # tighter convergence, more seeds
//! tol = 1e-12
//! strategy = "random:20000"
//! seed = 7
//! ```
//!
//! Command-line flags take precedence over the file, which takes precedence
//! over built-in defaults; see [`Settings::or`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imposition::IterationConfig;
use crate::partners::SeedStrategy;

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "tol",
    "max_iter",
    "cycle_window",
    "cycle_residual_floor",
    "dedup_tol",
    "strategy",
    "seed",
    "threads",
    "budget",
    "resolution",
    "points",
    "unbias_tol",
];

/// Optional overrides; `None` defers to the next layer.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub cycle_window: Option<usize>,
    pub cycle_residual_floor: Option<f64>,
    pub dedup_tol: Option<f64>,
    pub strategy: Option<SeedStrategy>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// MUB search wall-clock budget in seconds.
    pub budget: Option<u64>,
    pub resolution: Option<usize>,
    pub points: Option<usize>,
    pub unbias_tol: Option<f64>,
}

fn value<T: FromStr>(key: &str, line: usize, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::format(key, format!("line {line}: cannot parse `{raw}`")))
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, val) = content.split_once('=').ok_or_else(|| {
                Error::format(format!("line {line}"), "expected `key = value`")
            })?;
            let key = key.trim();
            let val = val.trim();
            let val = val
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(val);
            match key {
                "tol" => s.tol = Some(value(key, line, val)?),
                "max_iter" => s.max_iter = Some(value(key, line, val)?),
                "cycle_window" => s.cycle_window = Some(value(key, line, val)?),
                "cycle_residual_floor" => s.cycle_residual_floor = Some(value(key, line, val)?),
                "dedup_tol" => s.dedup_tol = Some(value(key, line, val)?),
                "strategy" => s.strategy = Some(val.parse()?),
                "seed" => s.seed = Some(value(key, line, val)?),
                "threads" => s.threads = Some(value(key, line, val)?),
                "budget" => s.budget = Some(value(key, line, val)?),
                "resolution" => s.resolution = Some(value(key, line, val)?),
                "points" => s.points = Some(value(key, line, val)?),
                "unbias_tol" => s.unbias_tol = Some(value(key, line, val)?),
                other => {
                    return Err(Error::format(
                        other,
                        format!("line {line}: unknown key (known: {})", KEYS.join(", ")),
                    ))
                }
            }
        }
        Ok(s)
    }

    /// Fills every unset field from `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            tol: self.tol.or(fallback.tol),
            max_iter: self.max_iter.or(fallback.max_iter),
            cycle_window: self.cycle_window.or(fallback.cycle_window),
            cycle_residual_floor: self.cycle_residual_floor.or(fallback.cycle_residual_floor),
            dedup_tol: self.dedup_tol.or(fallback.dedup_tol),
            strategy: self.strategy.or(fallback.strategy),
            seed: self.seed.or(fallback.seed),
            threads: self.threads.or(fallback.threads),
            budget: self.budget.or(fallback.budget),
            resolution: self.resolution.or(fallback.resolution),
            points: self.points.or(fallback.points),
            unbias_tol: self.unbias_tol.or(fallback.unbias_tol),
        }
    }

    /// `base` with the iteration overrides applied.
    pub fn iteration(&self, base: IterationConfig) -> IterationConfig {
        IterationConfig {
            max_iter: self.max_iter.unwrap_or(base.max_iter),
            tol: self.tol.unwrap_or(base.tol),
            cycle_window: self.cycle_window.unwrap_or(base.cycle_window),
            cycle_residual_floor: self.cycle_residual_floor.unwrap_or(base.cycle_residual_floor),
        }
    }

    /// The configured strategy or `default`; a random strategy draws from `seed` when set.
    pub fn strategy_or(&self, default: SeedStrategy) -> SeedStrategy {
        match (self.strategy.unwrap_or(default), self.seed) {
            (SeedStrategy::Random { count, .. }, Some(rng_seed)) => {
                SeedStrategy::Random { count, rng_seed }
            }
            (s, _) => s,
        }
    }
}
