//! Small hand-built instances with known answers, used throughout the tests
//! and the guide.

use crate::model::{Edge, Game};

/// Three media, four customers, every edge `(p, pF) = (0.8, 0.5)`, budgets
/// `k_L = 2`, `k_F = 1`. Customer 1 is reachable from all three media.
pub fn recapture_example() -> Game {
    let edges = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 1), (2, 3)]
        .into_iter()
        .map(|(u, v)| Edge::new(u, v, 0.8, 0.5))
        .collect();
    Game::new(3, 4, 2, 1, edges).expect("valid instance")
}

/// Three media, four customers, `k_L = k_F = 1`. No pure leader strategy is
/// optimal here: mixing media 0 and 1 half-and-half earns 1.1 while the best
/// pure commitment earns 0.6.
pub fn mixed_optimum_example() -> Game {
    let edges = vec![
        Edge::new(0, 0, 0.1, 0.0),
        Edge::new(0, 1, 1.0, 0.5),
        Edge::new(1, 1, 1.0, 0.5),
        Edge::new(1, 2, 0.1, 0.0),
        Edge::new(2, 3, 0.599, 0.0),
    ];
    Game::new(3, 4, 1, 1, edges).expect("valid instance")
}

/// Three media, two customers, `k_L = 3`, `k_F = 1`. Funding every medium
/// leaves the leader with nothing, while funding medium 0 or 2 alone keeps
/// one customer.
pub fn idle_budget_example() -> Game {
    let edges = vec![
        Edge::new(0, 0, 1.0, 0.0),
        Edge::new(1, 0, 0.0, 1.0),
        Edge::new(1, 1, 0.0, 1.0),
        Edge::new(2, 1, 1.0, 0.0),
    ];
    Game::new(3, 2, 3, 1, edges).expect("valid instance")
}

/// Four media with 10, 6, 6 and 6 private customers, `p = 1`, `pF = 0.5`,
/// `k_L = 3`, `k_F = 2`. Every customer sees exactly one medium, and the
/// equilibrium value 18 is only reachable with a mixed strategy.
pub fn no_pure_equilibrium_example() -> Game {
    let sizes = [10, 6, 6, 6];
    let mut edges = Vec::new();
    let mut v = 0;
    for (u, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            edges.push(Edge::new(u, v, 1.0, 0.5));
            v += 1;
        }
    }
    Game::new(4, v, 3, 2, edges).expect("valid instance")
}
