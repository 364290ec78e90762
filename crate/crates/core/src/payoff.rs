//! Activation probabilities and the two players' utilities.
//!
//! For a customer `v` and a set of funded media `z`,
//! `P_v(z) = 1 - prod_{u in N_v, u in z} (1 - p_uv)` is the chance that `v`
//! is activated; `P_{F,v}(y)` is the same product over the recapture
//! probabilities. The leader keeps the customers she activates and the
//! follower does not recapture; the follower collects recaptured customers
//! plus fresh activations among those the leader missed.
//!
//! Everything here evaluates the formulas directly and is the reference the
//! faster sparse evaluators in [`crate::follower`] are tested against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::follower::enumerate_subsets;
use crate::model::{Game, MediaSet, MixedStrategy};

/// Expected customers retained by the leader and acquired by the follower.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityPair {
    pub leader: f64,
    pub follower: f64,
}

fn check_customer(game: &Game, v: usize) -> Result<()> {
    if v >= game.n_customers() {
        return Err(Error::CustomerOutOfRange { customer: v, customers: game.n_customers() });
    }
    Ok(())
}

fn activation_masked(game: &Game, v: usize, mask: &[bool]) -> f64 {
    let miss: f64 = game
        .customer_edges(v)
        .filter(|e| mask[e.medium])
        .map(|e| 1.0 - e.p)
        .product();
    1.0 - miss
}

fn recapture_masked(game: &Game, v: usize, mask: &[bool]) -> f64 {
    let miss: f64 = game
        .customer_edges(v)
        .filter(|e| mask[e.medium])
        .map(|e| 1.0 - e.p_follower)
        .product();
    1.0 - miss
}

/// `P_v(z)`.
pub fn activation_prob(game: &Game, v: usize, z: &MediaSet) -> Result<f64> {
    check_customer(game, v)?;
    Ok(activation_masked(game, v, &z.indicator(game.n_media())))
}

/// `P_{F,v}(y)`.
pub fn recapture_prob(game: &Game, v: usize, y: &MediaSet) -> Result<f64> {
    check_customer(game, v)?;
    Ok(recapture_masked(game, v, &y.indicator(game.n_media())))
}

/// Contribution of a single customer to `(f, g)` for pure strategies.
pub fn customer_utilities(game: &Game, v: usize, z: &MediaSet, y: &MediaSet) -> Result<UtilityPair> {
    check_customer(game, v)?;
    let zm = z.indicator(game.n_media());
    let ym = y.indicator(game.n_media());
    let lead = activation_masked(game, v, &zm);
    Ok(split(lead, recapture_masked(game, v, &ym), activation_masked(game, v, &ym)))
}

fn split(lead: f64, recapture: f64, fresh: f64) -> UtilityPair {
    UtilityPair {
        leader: lead * (1.0 - recapture),
        follower: lead * recapture + (1.0 - lead) * fresh,
    }
}

/// `P_v(z)` for every customer.
pub fn pure_activation(game: &Game, z: &MediaSet) -> Vec<f64> {
    let mask = z.indicator(game.n_media());
    (0..game.n_customers()).map(|v| activation_masked(game, v, &mask)).collect()
}

/// `P_v(x) = sum_z x_z P_v(z)` for every customer.
pub fn leader_activation(game: &Game, x: &MixedStrategy) -> Vec<f64> {
    let mut act = vec![0.0; game.n_customers()];
    for (z, w) in x.iter() {
        for (a, pz) in act.iter_mut().zip(pure_activation(game, z)) {
            *a += w * pz;
        }
    }
    act
}

/// `(f, g)` given the leader's per-customer activation probabilities.
pub fn utilities_from_activation(game: &Game, activation: &[f64], y: &MediaSet) -> UtilityPair {
    let ym = y.indicator(game.n_media());
    let mut total = UtilityPair { leader: 0.0, follower: 0.0 };
    for (v, &lead) in activation.iter().enumerate() {
        let part = split(lead, recapture_masked(game, v, &ym), activation_masked(game, v, &ym));
        total.leader += part.leader;
        total.follower += part.follower;
    }
    total
}

/// `f(z, y)`.
pub fn leader_utility_pure(game: &Game, z: &MediaSet, y: &MediaSet) -> f64 {
    utilities_from_activation(game, &pure_activation(game, z), y).leader
}

/// `g(z, y)`.
pub fn follower_utility_pure(game: &Game, z: &MediaSet, y: &MediaSet) -> f64 {
    utilities_from_activation(game, &pure_activation(game, z), y).follower
}

/// `(f(x, y), g(x, y))` for a leader mixed strategy, in
/// `O(|E| * |supp(x)|)`.
pub fn utilities_mixed(game: &Game, x: &MixedStrategy, y: &MediaSet) -> UtilityPair {
    utilities_from_activation(game, &leader_activation(game, x), y)
}

/// Zero-sum surrogate `Phi(x, y) = -g(x, y) + sum_v P_v(x)`.
pub fn phi(game: &Game, x: &MixedStrategy, y: &MediaSet) -> f64 {
    let act = leader_activation(game, x);
    let reach: f64 = act.iter().sum();
    reach - utilities_from_activation(game, &act, y).follower
}

/// `C = max_{y in D_F} sum_v P_v(y)`, the shift that makes `Phi + C`
/// non-negative. Enumerates the follower's strategies.
pub fn phi_constant(game: &Game, cap: u128) -> Result<f64> {
    let strategies = enumerate_subsets(game.n_media(), game.follower_budget(), cap, "follower strategy set")?;
    Ok(strategies
        .iter()
        .map(|y| pure_activation(game, y).iter().sum::<f64>())
        .fold(0.0, f64::max))
}
