//! Brute-force reference evaluations, written straight from the definitions
//! and sharing no code with the library's evaluators.

#![allow(dead_code)]

use rand::Rng;
use stackalloc::model::{Edge, Game};

/// All subsets of `0..n` with at most `k` elements, as bitmasks.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize <= k).collect()
}

pub fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|u| mask >> u & 1 == 1).collect()
}

/// `P_v(mask)` for every customer, using `p` or `p_F`.
pub fn activation(game: &Game, mask: u32, follower_probs: bool) -> Vec<f64> {
    let mut miss = vec![1.0; game.n_customers()];
    for e in game.edges() {
        if mask >> e.medium & 1 == 1 {
            miss[e.customer] *= 1.0 - if follower_probs { e.p_follower } else { e.p };
        }
    }
    miss.into_iter().map(|m| 1.0 - m).collect()
}

/// `(f, g)` given the leader's activation probabilities.
pub fn utilities(game: &Game, lead: &[f64], y: u32) -> (f64, f64) {
    let recapture = activation(game, y, true);
    let fresh = activation(game, y, false);
    let mut f = 0.0;
    let mut g = 0.0;
    for v in 0..game.n_customers() {
        f += lead[v] * (1.0 - recapture[v]);
        g += lead[v] * recapture[v] + (1.0 - lead[v]) * fresh[v];
    }
    (f, g)
}

/// Leader activation of a mixed strategy given as `(mask, weight)` pairs.
pub fn mixed_activation(game: &Game, atoms: &[(u32, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; game.n_customers()];
    for &(mask, w) in atoms {
        for (o, a) in out.iter_mut().zip(activation(game, mask, false)) {
            *o += w * a;
        }
    }
    out
}

/// `f_BR` with ties in `g` (within 1e-9) resolved in the leader's favour.
pub fn f_br(game: &Game, lead: &[f64]) -> f64 {
    let values: Vec<(f64, f64)> =
        subsets(game.n_media(), game.follower_budget()).into_iter().map(|y| utilities(game, lead, y)).collect();
    let best_g = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    values.iter().filter(|v| v.1 >= best_g - 1e-9).map(|v| v.0).fold(f64::NEG_INFINITY, f64::max)
}

pub fn mask_of(set: &stackalloc::MediaSet) -> u32 {
    set.iter().fold(0, |m, u| m | 1 << u)
}

/// A random instance with a leader budget of at least one. With `disjoint`,
/// each customer sees at most one medium.
pub fn random_game<R: Rng>(rng: &mut R, max_media: usize, max_customers: usize, max_kl: usize, max_kf: usize, disjoint: bool) -> Game {
    let n = rng.gen_range(1..=max_media);
    let m = rng.gen_range(1..=max_customers);
    let mut edges = Vec::new();
    for v in 0..m {
        let degree = if disjoint { rng.gen_range(0..=1) } else { rng.gen_range(0..=n.min(3)) };
        let media = rand::seq::index::sample(rng, n, degree).into_vec();
        for u in media {
            edges.push(Edge::new(u, v, rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)));
        }
    }
    let kl = rng.gen_range(1..=max_kl.min(n).max(1));
    let kf = rng.gen_range(0..=max_kf.min(n));
    Game::new(n, m, kl, kf, edges).unwrap()
}
