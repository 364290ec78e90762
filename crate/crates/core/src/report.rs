//! One entry point for every solver, returning a serialisable report whose
//! numbers can all be recomputed from the reported strategy.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, ResponseLp};
use crate::follower::Follower;
use crate::heuristic;
use crate::model::{FractionalAllocation, MediaSet, MixedStrategy};
use crate::mwu::{self, ApproxCertificate, MwuConfig, RegretReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Mwu,
    Heuristic,
    #[serde(alias = "exact")]
    ExactMultiLp,
    #[serde(alias = "exact-disjoint")]
    ExactDisjointLp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::Mwu,
        Algorithm::Heuristic,
        Algorithm::ExactMultiLp,
        Algorithm::ExactDisjointLp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Mwu => "mwu",
            Algorithm::Heuristic => "heuristic",
            Algorithm::ExactMultiLp => "exact-multi-lp",
            Algorithm::ExactDisjointLp => "exact-disjoint-lp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Algorithm::Greedy),
            "mwu" => Ok(Algorithm::Mwu),
            "heuristic" => Ok(Algorithm::Heuristic),
            "exact" | "exact-multi-lp" => Ok(Algorithm::ExactMultiLp),
            "exact-disjoint" | "exact-disjoint-lp" => Ok(Algorithm::ExactDisjointLp),
            other => Err(Error::InvalidInput(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Knobs for all solvers; each solver reads only its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub iterations: usize,
    pub epsilon: f64,
    pub learning_rate: Option<f64>,
    pub ell: usize,
    pub leader_cap: u128,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let mwu = MwuConfig::default();
        Self {
            iterations: mwu.iterations,
            epsilon: mwu.epsilon,
            learning_rate: mwu.learning_rate,
            ell: 10,
            leader_cap: exact::DEFAULT_LEADER_CAP,
        }
    }
}

impl SolverSettings {
    pub fn mwu(&self) -> MwuConfig {
        MwuConfig { iterations: self.iterations, epsilon: self.epsilon, learning_rate: self.learning_rate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub media: MediaSet,
    pub prob: f64,
}

/// A mixed strategy as `{"support": [...], "allocation": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRecord {
    pub support: Vec<Atom>,
    pub allocation: FractionalAllocation,
}

impl StrategyRecord {
    pub fn new(x: &MixedStrategy, n: usize) -> Self {
        Self {
            support: x.iter().map(|(s, w)| Atom { media: s.clone(), prob: w }).collect(),
            allocation: x.allocation(n),
        }
    }

    pub fn to_strategy(&self) -> Result<MixedStrategy> {
        Ok(MixedStrategy::from_atoms(self.support.iter().map(|a| (a.media.clone(), a.prob)))?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timings {
    pub solve_ms: f64,
    pub verify_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub leader: StrategyRecord,
    /// The optimistic best response to `leader`.
    pub follower: MediaSet,
    /// Every follower strategy tied for best.
    pub best_responses: Vec<MediaSet>,
    /// `f_BR(leader)`.
    pub value: f64,
    /// `g(leader, follower)`.
    pub follower_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ApproxCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret: Option<RegretReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_response: Option<Vec<ResponseLp>>,
    pub timings: Timings,
}

/// Runs `algorithm` on the follower's game and re-evaluates the resulting
/// strategy with the follower.
pub fn run_solver(follower: &Follower<'_>, algorithm: Algorithm, settings: &SolverSettings) -> Result<SolveReport> {
    let game = follower.game();
    let start = Instant::now();
    let mut certificate = None;
    let mut regret = None;
    let mut per_response = None;
    let leader = match algorithm {
        Algorithm::Greedy => MixedStrategy::pure(heuristic::greedy_baseline_with(follower).0),
        Algorithm::Mwu => {
            let r = mwu::solve_mwu_with(follower, &settings.mwu())?;
            certificate = Some(r.certificate);
            regret = Some(r.regret);
            r.leader
        }
        Algorithm::Heuristic => heuristic::solve_heuristic_with(follower, settings.ell)?.leader,
        Algorithm::ExactMultiLp => {
            let r = exact::solve_multi_lp_using(follower, settings.leader_cap)?;
            per_response = Some(r.per_response);
            r.leader
        }
        Algorithm::ExactDisjointLp => {
            let r = exact::solve_disjoint_lp_using(follower)?;
            per_response = Some(r.per_response);
            r.leader
        }
    };
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    let br = follower.best_response(&leader);
    let verify_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(SolveReport {
        algorithm,
        leader: StrategyRecord::new(&leader, game.n_media()),
        follower: br.chosen,
        best_responses: br.responses,
        value: br.leader_value,
        follower_value: br.follower_value,
        certificate,
        regret,
        per_response,
        timings: Timings { solve_ms, verify_ms },
    })
}
