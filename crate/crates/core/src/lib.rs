//! Leader strategies for Stackelberg budget allocation games on bipartite
//! influence graphs.
//!
//! A leader funds at most `k_L` media, each of which activates adjacent
//! customers independently; a follower then funds at most `k_F` media to
//! recapture the leader's customers and activate the rest. The leader commits
//! to a mixed strategy first and the follower best-responds, breaking ties in
//! the leader's favour.
//!
//! * [`model`]: instances, strategies, the text format and a generator.
//! * [`payoff`]: activation probabilities and utilities.
//! * [`follower`]: the follower's strategy set and best responses.
//! * [`exact`]: equilibrium by one LP per follower response, and the
//!   reduced LP with mixed-strategy recovery for disjoint customers.
//! * [`mwu`]: approximation through a zero-sum surrogate game.
//! * [`heuristic`]: greedy fictitious play and the greedy baseline.
//! * [`lp`]: the simplex kernel behind the exact solvers.
//! * [`report`]: one entry point for all solvers with re-verified results.
//! * [`bench`]: seeded batch experiments.

pub mod bench;
pub mod error;
pub mod exact;
pub mod follower;
pub mod heuristic;
pub mod instances;
pub mod lp;
pub mod model;
pub mod mwu;
pub mod payoff;
pub mod report;

pub use error::{Error, Result};
pub use follower::{BestResponseResult, Follower};
pub use model::{Edge, FractionalAllocation, Game, MediaSet, MixedStrategy};
pub use payoff::UtilityPair;
pub use report::{run_solver, Algorithm, SolveReport, SolverSettings};
