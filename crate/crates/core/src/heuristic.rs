//! Greedy fictitious play for the leader, and the follower-blind greedy
//! baseline.
//!
//! Round `i` of [`solve_heuristic`] builds a pure strategy `S` one medium at
//! a time, scoring each candidate by `f_BR` of the mixture that gives the
//! previous rounds weight `(i-1)/i` and the candidate `1/i`. A step is only
//! taken if it does not lower that score. The best mixture seen across all
//! rounds is returned.

use crate::error::Result;
use crate::follower::{BestResponseResult, Follower};
use crate::model::{Game, MediaSet, MixedStrategy};
use crate::mwu::greedy_coverage;
use crate::payoff::pure_activation;

/// Candidates closer than this count as tied, and a step may lower the
/// score by at most this much.
pub const ACCEPT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicResult {
    pub leader: MixedStrategy,
    pub best_response: BestResponseResult,
    /// Pure strategy added in each round.
    pub rounds: Vec<MediaSet>,
    /// `f_BR` of the running mixture after each round.
    pub round_values: Vec<f64>,
    /// Best-response computations performed.
    pub best_response_calls: u64,
}

pub fn solve_heuristic(game: &Game, ell: usize) -> Result<HeuristicResult> {
    let follower = Follower::new(game)?;
    solve_heuristic_with(&follower, ell)
}

pub fn solve_heuristic_with(follower: &Follower<'_>, ell: usize) -> Result<HeuristicResult> {
    if ell == 0 {
        return Err(crate::Error::InvalidInput("the heuristic needs at least one round".into()));
    }
    let game = follower.game();
    let n = game.n_media();
    let calls_before = follower.best_response_calls();

    let mut x = MixedStrategy::pure(MediaSet::empty());
    let mut x_act = vec![0.0; game.n_customers()];
    let mut best = x.clone();
    let mut best_value = follower.leader_value(&x_act);
    let mut rounds = Vec::with_capacity(ell);
    let mut round_values = Vec::with_capacity(ell);

    for i in 1..=ell {
        let keep = (i - 1) as f64 / i as f64;
        let fresh = 1.0 / i as f64;
        let mix = |set: &MediaSet| -> Vec<f64> {
            let pure = pure_activation(game, set);
            x_act.iter().zip(&pure).map(|(a, b)| keep * a + fresh * b).collect()
        };
        let mut set = MediaSet::empty();
        let mut current = follower.leader_value(&mix(&set));
        while set.len() < game.leader_budget().min(n) {
            let mut pick: Option<(MediaSet, f64)> = None;
            for u in (0..n).filter(|&u| !set.contains(u)) {
                let candidate = set.with(u);
                let value = follower.leader_value(&mix(&candidate));
                if pick.as_ref().is_none_or(|(_, b)| value > *b + ACCEPT_TOL) {
                    pick = Some((candidate, value));
                }
            }
            let Some((candidate, value)) = pick else { break };
            if value < current - ACCEPT_TOL {
                break;
            }
            set = candidate;
            current = value;
        }
        x_act = mix(&set);
        x = x.blend(keep, &MixedStrategy::pure(set.clone()));
        let value = follower.leader_value(&x_act);
        if value > best_value {
            best = x.clone();
            best_value = value;
        }
        rounds.push(set);
        round_values.push(value);
    }

    let best_response = follower.best_response(&best);
    Ok(HeuristicResult {
        leader: best,
        best_response,
        rounds,
        round_values,
        best_response_calls: follower.best_response_calls() - calls_before,
    })
}

/// Greedy on expected reach `sum_v P_v(z)` for exactly `min(k_L, n)` steps,
/// ignoring the follower, then evaluated against the follower's best
/// response.
pub fn greedy_baseline(game: &Game) -> Result<(MediaSet, BestResponseResult)> {
    let follower = Follower::new(game)?;
    Ok(greedy_baseline_with(&follower))
}

pub fn greedy_baseline_with(follower: &Follower<'_>) -> (MediaSet, BestResponseResult) {
    let game = follower.game();
    let ones = vec![1.0; game.n_customers()];
    let z = greedy_coverage(game, &ones, game.leader_budget(), false);
    let br = follower.best_response(&MixedStrategy::pure(z.clone()));
    (z, br)
}
