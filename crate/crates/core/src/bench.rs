//! Batch comparison of solvers over seeded random instances.
//!
//! Trial `i` draws one instance per follower distribution with seed
//! `base_seed + i` (topology and both probabilities are redrawn), applies
//! every budget pair, and runs every algorithm on that same instance. Values
//! are `f_BR` of each returned strategy as recomputed by the follower.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::follower::{Follower, DEFAULT_FOLLOWER_CAP};
use crate::model::{generate_instance, load_instance, redraw_probabilities, Game, GeneratorSpec, UniformDist};
use crate::report::{run_solver, Algorithm, SolverSettings};

/// Where trial instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSource {
    /// Random graphs in which every customer sees `round(mean_degree)` media.
    Synthetic { media: usize, customers: usize, mean_degree: f64 },
    /// A fixed topology read from an instance file; only the probabilities
    /// are redrawn.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instance: InstanceSource,
    /// Distribution of the leader's edge probabilities.
    pub p: UniformDist,
    /// One block of rows per follower distribution.
    pub follower_distributions: Vec<UniformDist>,
    /// `(k_L, k_F)` pairs.
    pub budgets: Vec<(usize, usize)>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub settings: SolverSettings,
    #[serde(default = "default_follower_cap")]
    pub follower_cap: u128,
}

fn default_trials() -> usize {
    30
}

fn default_follower_cap() -> u128 {
    DEFAULT_FOLLOWER_CAP
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("experiment spec: {e}")))
    }

    fn check(&self, media: usize) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("an experiment needs at least one trial".into()));
        }
        for &(kl, kf) in &self.budgets {
            if kl > media || kf > media {
                return Err(Error::InvalidInput(format!("budgets ({kl}, {kf}) exceed the {media} media")));
            }
        }
        for d in self.follower_distributions.iter().chain([&self.p]) {
            UniformDist::new(d.low, d.high)?;
        }
        Ok(())
    }
}

/// Aggregate of one algorithm on one (distribution, budgets) block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub dist: String,
    pub leader_budget: usize,
    pub follower_budget: usize,
    pub algorithm: Algorithm,
    /// `None` when the cell was skipped.
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
    pub mean_ms: Option<f64>,
    pub trials: usize,
    /// Per-trial values in seed order.
    pub values: Vec<f64>,
    pub skipped: Option<String>,
}

enum Cell {
    Done { value: f64, ms: f64 },
    Skipped(String),
}

fn skippable(e: &Error) -> bool {
    e.is_cap() || matches!(e, Error::NotDisjoint)
}

fn trial_instance(spec: &ExperimentSpec, base: Option<&Game>, dist: UniformDist, seed: u64) -> Result<Game> {
    Ok(match (&spec.instance, base) {
        (InstanceSource::Synthetic { media, customers, mean_degree }, _) => generate_instance(
            &GeneratorSpec {
                media: *media,
                customers: *customers,
                mean_degree: *mean_degree,
                p: spec.p,
                p_follower: dist,
                leader_budget: 0,
                follower_budget: 0,
            },
            seed,
        )?,
        (InstanceSource::File { .. }, Some(g)) => redraw_probabilities(g, spec.p, dist, seed)?,
        (InstanceSource::File { .. }, None) => unreachable!("file topology is loaded up front"),
    })
}

/// Cells of one trial, ordered by distribution, then budgets, then algorithm.
fn run_trial(spec: &ExperimentSpec, base: Option<&Game>, trial: usize) -> Result<Vec<Cell>> {
    let seed = spec.base_seed.wrapping_add(trial as u64);
    let mut cells = Vec::new();
    for &dist in &spec.follower_distributions {
        let instance = trial_instance(spec, base, dist, seed)?;
        for &(kl, kf) in &spec.budgets {
            let game = instance.with_budgets(kl, kf)?;
            let follower = match Follower::with_cap(&game, spec.follower_cap) {
                Ok(f) => f,
                Err(e) if skippable(&e) => {
                    let reason = e.to_string();
                    cells.extend(spec.algorithms.iter().map(|_| Cell::Skipped(reason.clone())));
                    continue;
                }
                Err(e) => return Err(e),
            };
            for &algorithm in &spec.algorithms {
                cells.push(match run_solver(&follower, algorithm, &spec.settings) {
                    Ok(r) => Cell::Done { value: r.value, ms: r.timings.solve_ms },
                    Err(e) if skippable(&e) => Cell::Skipped(e.to_string()),
                    Err(e) => return Err(e),
                });
            }
        }
    }
    Ok(cells)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    let base = match &spec.instance {
        InstanceSource::File { path } => {
            let file = std::fs::File::open(path)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            Some(load_instance(std::io::BufReader::new(file))?)
        }
        InstanceSource::Synthetic { .. } => None,
    };
    let media = match (&spec.instance, &base) {
        (InstanceSource::Synthetic { media, .. }, _) => *media,
        (_, Some(g)) => g.n_media(),
        _ => 0,
    };
    spec.check(media)?;

    let trials: Vec<Vec<Cell>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, base.as_ref(), t))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut column = 0;
    for dist in &spec.follower_distributions {
        for &(kl, kf) in &spec.budgets {
            for &algorithm in &spec.algorithms {
                rows.push(aggregate(dist.label(), kl, kf, algorithm, trials.iter().map(|t| &t[column])));
                column += 1;
            }
        }
    }
    Ok(rows)
}

fn aggregate<'a>(
    dist: String,
    kl: usize,
    kf: usize,
    algorithm: Algorithm,
    cells: impl Iterator<Item = &'a Cell>,
) -> ExperimentRow {
    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut skipped = None;
    for cell in cells {
        match cell {
            Cell::Done { value, ms } => {
                values.push(*value);
                times.push(*ms);
            }
            Cell::Skipped(reason) => {
                skipped.get_or_insert_with(|| reason.clone());
            }
        }
    }
    let trials = values.len();
    let (mean, std, mean_ms) = if skipped.is_some() || trials == 0 {
        (None, None, None)
    } else {
        let t = trials as f64;
        let mean = values.iter().sum::<f64>() / t;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t;
        (Some(mean), Some(var.sqrt()), Some(times.iter().sum::<f64>() / t))
    };
    ExperimentRow { dist, leader_budget: kl, follower_budget: kf, algorithm, mean, std, mean_ms, trials, values, skipped }
}

/// Writes `dist,kL,kF,algorithm,mean,std,mean_ms,trials`, with `skipped` in
/// the numeric columns of skipped cells.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("writing CSV: {e}"));
    w.write_record(["dist", "kL", "kF", "algorithm", "mean", "std", "mean_ms", "trials"]).map_err(io)?;
    let num = |v: Option<f64>| v.map_or_else(|| "skipped".to_string(), |v| v.to_string());
    for r in rows {
        w.write_record([
            r.dist.clone(),
            r.leader_budget.to_string(),
            r.follower_budget.to_string(),
            r.algorithm.to_string(),
            num(r.mean),
            num(r.std),
            num(r.mean_ms),
            r.trials.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))?;
    Ok(())
}
