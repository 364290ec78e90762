//! Approximate leader strategies through the zero-sum surrogate game.
//!
//! Replacing the follower's utility by `Phi(x, y) = sum_v P_v(x) - g(x, y)`
//! gives a zero-sum game in which the follower minimises what the leader
//! keeps. Shifted by `C = max_y sum_v P_v(y)`, each payoff
//! `h_y(z) = Phi(z, y) + C` is non-negative, monotone and submodular in `z`,
//! so the leader's side can be played by greedy while the follower's side
//! runs exponential weights over `D_F`. The average of the leader's greedy
//! iterates is the output.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::VERIFY_TOL;
use crate::follower::{BestResponseResult, Follower};
use crate::model::{Game, MediaSet, MixedStrategy};
use crate::payoff::{leader_activation, pure_activation, utilities_mixed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MwuConfig {
    pub iterations: usize,
    pub epsilon: f64,
    /// `None` picks `sqrt(ln |D_F| / T)`.
    pub learning_rate: Option<f64>,
}

impl Default for MwuConfig {
    fn default() -> Self {
        Self { iterations: 100, epsilon: 0.5, learning_rate: None }
    }
}

impl MwuConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidInput("MWU needs at least one iteration".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if let Some(rate) = self.learning_rate {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::InvalidInput(format!("learning rate must be non-negative, got {rate}")));
            }
        }
        Ok(())
    }
}

/// Quantities bounding how far an MWU strategy can be from optimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxCertificate {
    pub epsilon: f64,
    /// `sum_v (1 - P_v(x')) P_v(y')` at the returned profile.
    pub epsilon1: f64,
    /// The same expression at an exact equilibrium, when one was supplied.
    pub epsilon2: Option<f64>,
    /// `C = max_y sum_v P_v(y)`.
    pub c: f64,
    /// `1 - 1/e - epsilon`.
    pub alpha: f64,
    /// `(1 - 1/e) epsilon2 - epsilon1 + (1/e + epsilon) C`.
    pub beta: Option<f64>,
    /// `f(x', y')`.
    pub value: f64,
    pub optimum: Option<f64>,
    /// Whether `value >= alpha * optimum - beta`.
    pub bound_holds: Option<bool>,
}

/// How well the follower-side weights tracked the best fixed response.
/// Losses are `h_y(z_t) / (m + C)`, averaged over iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretReport {
    pub learning_rate: f64,
    pub weighted_loss: f64,
    pub best_fixed_loss: f64,
    pub regret: f64,
    /// `ln |D_F| / (eta T) + eta / 8`, the textbook guarantee for the
    /// update used; absent when `eta = 0`.
    pub guarantee: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwuResult {
    pub leader: MixedStrategy,
    pub best_response: BestResponseResult,
    pub certificate: ApproxCertificate,
    pub regret: RegretReport,
    /// Greedy solution of every iteration, in order.
    pub iterates: Vec<MediaSet>,
}

/// Greedy maximiser of `sum_v coef_v P_v(z)` over `|z| <= budget`.
///
/// Adds the medium with the largest marginal gain (smallest index on ties).
/// With `stop_when_flat` it stops once no medium has positive gain;
/// otherwise it always picks `min(budget, n)` media.
pub fn greedy_coverage(game: &Game, coef: &[f64], budget: usize, stop_when_flat: bool) -> MediaSet {
    let n = game.n_media();
    let mut miss = vec![1.0; game.n_customers()];
    let mut chosen = vec![false; n];
    let mut picked = Vec::new();
    for _ in 0..budget.min(n) {
        let mut best: Option<(usize, f64)> = None;
        for u in (0..n).filter(|&u| !chosen[u]) {
            let gain: f64 = game.medium_edges(u).map(|e| coef[e.customer] * miss[e.customer] * e.p).sum();
            debug_assert!(gain >= -1e-9, "negative marginal gain {gain}");
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((u, gain));
            }
        }
        let Some((u, gain)) = best else { break };
        if stop_when_flat && gain <= 0.0 {
            break;
        }
        chosen[u] = true;
        picked.push(u);
        for e in game.medium_edges(u) {
            miss[e.customer] *= 1.0 - e.p;
        }
    }
    MediaSet::new(picked)
}

/// Greedy leader reply to a weighting of the follower's strategies in the
/// surrogate game. `weights` follow the order of `follower.strategies()`.
pub fn greedy_weighted_submodular(follower: &Follower<'_>, weights: &[f64], budget: usize) -> MediaSet {
    let coef = follower.surrogate_coefficients(weights);
    greedy_coverage(follower.game(), &coef, budget, true)
}

/// `C = max_y sum_v P_v(y)`.
pub fn surrogate_constant(follower: &Follower<'_>) -> f64 {
    let idle = vec![0.0; follower.game().n_customers()];
    follower.payoffs(&idle).iter().map(|u| u.follower).fold(0.0, f64::max)
}

/// `h_y(z)` for every follower strategy `y`.
pub fn surrogate_payoffs(follower: &Follower<'_>, z: &MediaSet, c: f64) -> Vec<f64> {
    let act = pure_activation(follower.game(), z);
    let reach: f64 = act.iter().sum();
    follower.payoffs(&act).iter().map(|u| reach - u.follower + c).collect()
}

pub fn solve_mwu(game: &Game, config: &MwuConfig) -> Result<MwuResult> {
    let follower = Follower::new(game)?;
    solve_mwu_with(&follower, config)
}

pub fn solve_mwu_with(follower: &Follower<'_>, config: &MwuConfig) -> Result<MwuResult> {
    config.validate()?;
    let game = follower.game();
    let strategies = follower.len();
    let rounds = config.iterations;
    let c = surrogate_constant(follower);
    let scale = game.n_customers() as f64 + c;
    let eta = config
        .learning_rate
        .unwrap_or_else(|| ((strategies as f64).ln() / rounds as f64).sqrt());

    let mut weights = vec![1.0 / strategies as f64; strategies];
    let mut cumulative = vec![0.0; strategies];
    let mut weighted_loss = 0.0;
    let mut iterates = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let z = greedy_weighted_submodular(follower, &weights, game.leader_budget());
        let payoffs = surrogate_payoffs(follower, &z, c);
        let mut total = 0.0;
        for ((w, acc), h) in weights.iter_mut().zip(cumulative.iter_mut()).zip(&payoffs) {
            let loss = if scale > 0.0 { h / scale } else { 0.0 };
            weighted_loss += *w * loss;
            *acc += loss;
            *w *= (-eta * loss).exp();
            total += *w;
        }
        weights.iter_mut().for_each(|w| *w /= total);
        iterates.push(z);
    }

    let leader = MixedStrategy::uniform(iterates.iter().cloned())?;
    let best_response = follower.best_response(&leader);
    let certificate = certify_with(follower, &leader, &best_response.chosen, None, config.epsilon)?;
    let best_fixed = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
    let t = rounds as f64;
    let regret = RegretReport {
        learning_rate: eta,
        weighted_loss: weighted_loss / t,
        best_fixed_loss: best_fixed / t,
        regret: (weighted_loss - best_fixed) / t,
        guarantee: (eta > 0.0).then(|| (strategies as f64).ln() / (eta * t) + eta / 8.0),
    };
    Ok(MwuResult { leader, best_response, certificate, regret, iterates })
}

fn shortfall(game: &Game, x: &MixedStrategy, y: &MediaSet) -> f64 {
    let lead = leader_activation(game, x);
    let resp = pure_activation(game, y);
    lead.iter().zip(&resp).map(|(a, b)| (1.0 - a) * b).sum()
}

/// Certificate for the profile `(x, y)`; `y` must be a best response to `x`.
/// `exact` is an equilibrium `(x*, y*)` to measure against.
pub fn certify(
    game: &Game,
    x: &MixedStrategy,
    y: &MediaSet,
    exact: Option<(&MixedStrategy, &MediaSet)>,
    epsilon: f64,
) -> Result<ApproxCertificate> {
    certify_with(&Follower::new(game)?, x, y, exact, epsilon)
}

pub fn certify_with(
    follower: &Follower<'_>,
    x: &MixedStrategy,
    y: &MediaSet,
    exact: Option<(&MixedStrategy, &MediaSet)>,
    epsilon: f64,
) -> Result<ApproxCertificate> {
    let game = follower.game();
    let br = follower.best_response(x);
    let at = utilities_mixed(game, x, y);
    if at.follower < br.follower_value - VERIFY_TOL {
        return Err(Error::Verification(format!(
            "{y} is not a best response: g = {} < {}",
            at.follower, br.follower_value
        )));
    }
    let c = surrogate_constant(follower);
    let inv_e = (-1.0f64).exp();
    let alpha = 1.0 - inv_e - epsilon;
    let epsilon1 = shortfall(game, x, y);
    let mut cert = ApproxCertificate {
        epsilon,
        epsilon1,
        epsilon2: None,
        c,
        alpha,
        beta: None,
        value: at.leader,
        optimum: None,
        bound_holds: None,
    };
    if let Some((xs, ys)) = exact {
        let epsilon2 = shortfall(game, xs, ys);
        let optimum = utilities_mixed(game, xs, ys).leader;
        let beta = (1.0 - inv_e) * epsilon2 - epsilon1 + (inv_e + epsilon) * c;
        cert.epsilon2 = Some(epsilon2);
        cert.beta = Some(beta);
        cert.optimum = Some(optimum);
        cert.bound_holds = Some(at.leader >= alpha * optimum - beta - 1e-9);
    }
    Ok(cert)
}
