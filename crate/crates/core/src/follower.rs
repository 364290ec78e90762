//! The follower's strategy set and optimistic best responses.
//!
//! The follower picks at most `k_F` media. Because `k_F` is small, the whole
//! strategy set `D_F` is materialised once, in lexicographic order, together
//! with each strategy's footprint: the customers it touches and their
//! recapture / fresh-activation probabilities. A best response then costs one
//! pass over the footprints, `O(sum of footprint sizes)`.
//!
//! Ties in the follower's utility (within [`TIE_TOL`]) are broken in the
//! leader's favour, and remaining ties by the lexicographic order of the
//! follower's media set.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Game, MediaSet, MixedStrategy};
use crate::payoff::{leader_activation, UtilityPair};

/// Default cap on `|D_F|`.
pub const DEFAULT_FOLLOWER_CAP: u128 = 1_000_000;
/// Absolute tolerance on `g` when collecting the follower's best responses.
pub const TIE_TOL: f64 = 1e-9;

/// `sum_{i=0}^{k} C(n, i)`, saturating.
pub fn count_subsets(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=k.min(n) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

/// All subsets of `0..n` with at most `k` elements in lexicographic order.
pub fn enumerate_subsets(n: usize, k: usize, cap: u128, what: &'static str) -> Result<Vec<MediaSet>> {
    let count = count_subsets(n, k);
    if count > cap {
        return Err(Error::EnumerationCap {
            what,
            count,
            cap,
            advice: if what.starts_with("follower") {
                "the follower budget must stay small for exact best responses"
            } else {
                "use the disjoint solver or an approximation"
            },
        });
    }
    fn walk(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MediaSet>) {
        out.push(MediaSet::new(cur.clone()));
        if cur.len() == k {
            return;
        }
        for u in start..n {
            cur.push(u);
            walk(u + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(count as usize);
    walk(0, n, k, &mut Vec::with_capacity(k), &mut out);
    Ok(out)
}

/// `D_F` for `game`.
pub fn enumerate_follower(game: &Game, cap: u128) -> Result<Vec<MediaSet>> {
    enumerate_subsets(game.n_media(), game.follower_budget(), cap, "follower strategy set")
}

/// A customer touched by a follower strategy.
#[derive(Debug, Clone, Copy)]
struct Touch {
    customer: usize,
    /// `P_{F,v}(y)`
    recapture: f64,
    /// `P_v(y)`
    fresh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseResult {
    /// Every maximiser of `g(x, .)` within the tie tolerance, in
    /// lexicographic order.
    pub responses: Vec<MediaSet>,
    pub follower_value: f64,
    /// The response the optimistic follower plays.
    pub chosen: MediaSet,
    /// `f(x, chosen)`, i.e. `f_BR(x)`.
    pub leader_value: f64,
}

/// The follower's side of a game: its materialised strategy set plus
/// counters for how much work best responses have done.
#[derive(Debug)]
pub struct Follower<'g> {
    game: &'g Game,
    strategies: Vec<MediaSet>,
    footprints: Vec<Vec<Touch>>,
    tie_tol: f64,
    evaluations: AtomicU64,
    calls: AtomicU64,
}

impl<'g> Follower<'g> {
    pub fn new(game: &'g Game) -> Result<Self> {
        Self::with_cap(game, DEFAULT_FOLLOWER_CAP)
    }

    pub fn with_cap(game: &'g Game, cap: u128) -> Result<Self> {
        let strategies = enumerate_follower(game, cap)?;
        let mut miss_f = vec![1.0; game.n_customers()];
        let mut miss_p = vec![1.0; game.n_customers()];
        let mut touched = Vec::new();
        let footprints = strategies
            .iter()
            .map(|y| {
                for u in y.iter() {
                    for e in game.medium_edges(u) {
                        if miss_f[e.customer] == 1.0 && miss_p[e.customer] == 1.0 {
                            touched.push(e.customer);
                        }
                        miss_f[e.customer] *= 1.0 - e.p_follower;
                        miss_p[e.customer] *= 1.0 - e.p;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let fp = touched
                    .iter()
                    .map(|&v| Touch { customer: v, recapture: 1.0 - miss_f[v], fresh: 1.0 - miss_p[v] })
                    .collect();
                for &v in &touched {
                    miss_f[v] = 1.0;
                    miss_p[v] = 1.0;
                }
                touched.clear();
                fp
            })
            .collect();
        Ok(Self {
            game,
            strategies,
            footprints,
            tie_tol: TIE_TOL,
            evaluations: AtomicU64::new(0),
            calls: AtomicU64::new(0),
        })
    }

    pub fn with_tie_tolerance(mut self, tol: f64) -> Self {
        self.tie_tol = tol;
        self
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn strategies(&self) -> &[MediaSet] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tol
    }

    /// Number of single `(f, g)` evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Number of best-response computations performed so far.
    pub fn best_response_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.evaluations.store(0, Ordering::Relaxed);
        self.calls.store(0, Ordering::Relaxed);
    }

    /// `(f(x, y), g(x, y))` for strategy `index`, given `P_v(x)`.
    pub fn payoff(&self, activation: &[f64], index: usize) -> UtilityPair {
        let reach: f64 = activation.iter().sum();
        self.payoff_with_reach(activation, reach, index)
    }

    fn payoff_with_reach(&self, activation: &[f64], reach: f64, index: usize) -> UtilityPair {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let mut lost = 0.0;
        let mut gained = 0.0;
        for t in &self.footprints[index] {
            let a = activation[t.customer];
            lost += a * t.recapture;
            gained += a * t.recapture + (1.0 - a) * t.fresh;
        }
        UtilityPair { leader: reach - lost, follower: gained }
    }

    /// `(f, g)` against every follower strategy, in enumeration order.
    pub fn payoffs(&self, activation: &[f64]) -> Vec<UtilityPair> {
        let reach: f64 = activation.iter().sum();
        (0..self.strategies.len())
            .map(|i| self.payoff_with_reach(activation, reach, i))
            .collect()
    }

    /// Optimistic best response to a leader mixed strategy.
    pub fn best_response(&self, x: &MixedStrategy) -> BestResponseResult {
        self.best_response_to_activation(&leader_activation(self.game, x))
    }

    /// Optimistic best response given the leader's activation probabilities
    /// `P_v(x)`. Performs exactly `|D_F|` evaluations.
    pub fn best_response_to_activation(&self, activation: &[f64]) -> BestResponseResult {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let values = self.payoffs(activation);
        self.select(&values)
    }

    /// Picks the optimistic best response from precomputed payoffs.
    pub fn select(&self, values: &[UtilityPair]) -> BestResponseResult {
        let best_g = values.iter().map(|u| u.follower).fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> =
            (0..values.len()).filter(|&i| values[i].follower >= best_g - self.tie_tol).collect();
        let best_f = tied.iter().map(|&i| values[i].leader).fold(f64::NEG_INFINITY, f64::max);
        let chosen = *tied
            .iter()
            .find(|&&i| values[i].leader >= best_f - self.tie_tol)
            .expect("at least one response");
        BestResponseResult {
            responses: tied.iter().map(|&i| self.strategies[i].clone()).collect(),
            follower_value: values[chosen].follower,
            chosen: self.strategies[chosen].clone(),
            leader_value: values[chosen].leader,
        }
    }

    /// `f_BR(x)` from activation probabilities.
    pub fn leader_value(&self, activation: &[f64]) -> f64 {
        self.best_response_to_activation(activation).leader_value
    }

    /// Per-customer coefficients `a_v = sum_y w_y (1 - P_{F,v}(y) + P_v(y))`.
    ///
    /// Against a weighting `w` of the follower's strategies the surrogate
    /// payoff `sum_y w_y (Phi(z, y) + C)` equals `sum_v a_v P_v(z)` plus a
    /// constant, so maximising it over `z` is weighted coverage.
    pub fn surrogate_coefficients(&self, weights: &[f64]) -> Vec<f64> {
        let total: f64 = weights.iter().sum();
        let mut coef = vec![total; self.game.n_customers()];
        for (fp, &w) in self.footprints.iter().zip(weights) {
            for t in fp {
                coef[t.customer] += w * (t.fresh - t.recapture);
            }
        }
        coef
    }

    /// Position of `y` in the enumeration, if it is a follower strategy.
    pub fn index_of(&self, y: &MediaSet) -> Option<usize> {
        self.strategies.binary_search(y).ok()
    }
}

/// One-shot optimistic best response with the default cap.
pub fn best_response(game: &Game, x: &MixedStrategy) -> Result<BestResponseResult> {
    Ok(Follower::new(game)?.best_response(x))
}
