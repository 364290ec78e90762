//! Exact strong Stackelberg equilibria.
//!
//! [`solve_multi_lp`] works on any instance small enough to enumerate the
//! leader's pure strategies: for every follower strategy `y*` it solves an LP
//! over leader mixed strategies that makes `y*` a best response while
//! maximising the leader's utility, then keeps the best of these LPs.
//!
//! When every customer sees at most one medium, both utilities depend on a
//! mixed strategy only through its marginal funding vector `r`, and they are
//! bilinear in `(r, y)`. [`solve_disjoint_lp`] then solves one `n`-variable LP
//! per `y*` over the polytope `Q = {0 <= r <= 1, sum r <= k_L}` and turns the
//! optimal `r` back into a mixed strategy with [`decompose_allocation`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::follower::{enumerate_subsets, BestResponseResult, Follower};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, LpStatus, Relation};
use crate::model::{allocation_of, FractionalAllocation, Game, MediaSet, MixedStrategy, FEASIBILITY_TOL};
use crate::payoff::{pure_activation, utilities_mixed, UtilityPair};

/// Default cap on `|S_L|` for the multi-LP solver.
pub const DEFAULT_LEADER_CAP: u128 = 100_000;
/// LP weights at or below this are dropped from the reported strategy.
pub const PRUNE_TOL: f64 = 1e-12;
/// Slack when re-checking that `y*` is a best response to an LP solution.
pub const VERIFY_TOL: f64 = 1e-7;
const VALUE_TOL: f64 = 1e-6;
const SNAP_TOL: f64 = 1e-10;

/// `S_L`: leader pure strategies in lexicographic order.
pub fn enumerate_leader(game: &Game, cap: u128) -> Result<Vec<MediaSet>> {
    enumerate_subsets(game.n_media(), game.leader_budget(), cap, "leader strategy set")
}

/// Audit record of the LP solved for one candidate follower response.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseLp {
    pub response: MediaSet,
    pub status: LpStatus,
    /// LP optimum when feasible.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    #[serde(skip)]
    pub leader: MixedStrategy,
    /// The induced follower response `y*`.
    pub follower: MediaSet,
    /// `f(leader, follower)`, recomputed from the strategy.
    pub value: f64,
    pub allocation: FractionalAllocation,
    /// Best response of the follower module to `leader`.
    pub best_response: BestResponseResult,
    pub per_response: Vec<ResponseLp>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub leader_cap: u128,
    pub follower_cap: u128,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { leader_cap: DEFAULT_LEADER_CAP, follower_cap: crate::follower::DEFAULT_FOLLOWER_CAP }
    }
}

pub fn solve_multi_lp(game: &Game) -> Result<EquilibriumResult> {
    solve_multi_lp_with(game, &ExactOptions::default())
}

pub fn solve_multi_lp_with(game: &Game, opts: &ExactOptions) -> Result<EquilibriumResult> {
    let follower = Follower::with_cap(game, opts.follower_cap)?;
    solve_multi_lp_using(&follower, opts.leader_cap)
}

/// Multi-LP solve reusing an existing follower (and its tie tolerance).
pub fn solve_multi_lp_using(follower: &Follower<'_>, leader_cap: u128) -> Result<EquilibriumResult> {
    let game = follower.game();
    let leaders = enumerate_leader(game, leader_cap)?;
    // payoffs[z][y] = (f(z, y), g(z, y))
    let payoffs: Vec<Vec<UtilityPair>> = leaders
        .par_iter()
        .map(|z| follower.payoffs(&pure_activation(game, z)))
        .collect();
    let responses = follower.strategies();

    let outcomes: Vec<Result<LpOutcome>> = (0..responses.len())
        .into_par_iter()
        .map(|target| {
            let mut lp = LinearProgram::maximize(payoffs.iter().map(|row| row[target].leader).collect());
            for other in 0..responses.len() {
                let coeffs =
                    payoffs.iter().map(|row| row[target].follower - row[other].follower).collect();
                lp.add_row(coeffs, Relation::Ge, 0.0);
            }
            lp.add_row(vec![1.0; leaders.len()], Relation::Eq, 1.0);
            Ok(solve_lp(&lp)?)
        })
        .collect();

    let (best, per_response) = pick_best(responses, outcomes)?;
    let (target, outcome) = best.ok_or_else(|| {
        Error::Verification("no follower response is inducible, which cannot happen".into())
    })?;
    let leader = MixedStrategy::normalized(
        leaders
            .iter()
            .zip(&outcome.solution)
            .filter(|(_, &w)| w > PRUNE_TOL)
            .map(|(z, &w)| (z.clone(), w)),
    )?;
    finish(game, follower, leader, target, outcome.objective, per_response)
}

type Best = Option<(usize, LpOutcome)>;

fn pick_best(responses: &[MediaSet], outcomes: Vec<Result<LpOutcome>>) -> Result<(Best, Vec<ResponseLp>)> {
    let mut best: Best = None;
    let mut audit = Vec::with_capacity(outcomes.len());
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        audit.push(ResponseLp {
            response: responses[i].clone(),
            status: outcome.status,
            value: (outcome.status == LpStatus::Optimal).then_some(outcome.objective),
        });
        if outcome.status != LpStatus::Optimal {
            continue;
        }
        let better = match &best {
            None => true,
            Some((_, b)) => outcome.objective > b.objective + FEASIBILITY_TOL,
        };
        if better {
            best = Some((i, outcome));
        }
    }
    Ok((best, audit))
}

fn finish(
    game: &Game,
    follower: &Follower<'_>,
    leader: MixedStrategy,
    target: usize,
    lp_value: f64,
    per_response: Vec<ResponseLp>,
) -> Result<EquilibriumResult> {
    let y_star = follower.strategies()[target].clone();
    let best_response = follower.best_response(&leader);
    let induced = utilities_mixed(game, &leader, &y_star);
    let best_g = best_response.follower_value;
    if induced.follower < best_g - VERIFY_TOL {
        return Err(Error::Verification(format!(
            "{y_star} is not a best response: g = {} < {best_g}",
            induced.follower
        )));
    }
    if (induced.leader - lp_value).abs() > VALUE_TOL {
        return Err(Error::Verification(format!(
            "LP value {lp_value} disagrees with recomputed utility {}",
            induced.leader
        )));
    }
    if leader.max_atom_size() > game.leader_budget() {
        return Err(Error::Verification("an atom exceeds the leader budget".into()));
    }
    Ok(EquilibriumResult {
        allocation: allocation_of(&leader, game.n_media()),
        leader,
        follower: y_star,
        value: induced.leader,
        best_response,
        per_response,
    })
}

/// Whether `r` lies in `Q = {0 <= r <= 1, sum r <= k}`.
pub fn membership_q(r: &[f64], budget: usize) -> bool {
    FractionalAllocation(r.to_vec()).is_feasible(budget)
}

fn clamp_to_q(r: &[f64], budget: usize) -> Result<Vec<f64>> {
    let total: f64 = r.iter().sum();
    if r.iter().any(|&v| !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&v))
        || total > budget as f64 + FEASIBILITY_TOL
    {
        return Err(Error::InvalidInput(format!(
            "allocation lies outside the box/budget polytope (sum {total}, budget {budget})"
        )));
    }
    let mut out: Vec<f64> = r.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let total: f64 = out.iter().sum();
    if total > budget as f64 {
        let scale = budget as f64 / total;
        out.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(out)
}

/// Writes `r` as a convex combination of at most `n + 1` leader pure
/// strategies whose marginals reproduce `r`.
///
/// Each step takes the smallest face of `Q` containing the current point,
/// picks a vertex of that face (coordinates at 0 or 1 stay put; the largest
/// fractional coordinates are rounded up while the budget allows), removes
/// as much of that vertex as keeps the remainder inside `Q`, and rescales.
/// The remainder always lands on a strictly smaller face.
pub fn decompose_allocation(r: &FractionalAllocation, budget: usize) -> Result<MixedStrategy> {
    decompose_by(r, budget, |frac, cur| {
        frac.sort_by(|&a, &b| cur[b].total_cmp(&cur[a]).then(a.cmp(&b)));
    })
}

/// Like [`decompose_allocation`] but rounds fractional coordinates up in the
/// order given by `priority` (a permutation of the media) instead of by
/// value. Different priorities generally give different decompositions of
/// the same point.
pub fn decompose_with_priority(
    r: &FractionalAllocation,
    budget: usize,
    priority: &[usize],
) -> Result<MixedStrategy> {
    let mut rank = vec![usize::MAX; r.0.len()];
    for (pos, &u) in priority.iter().enumerate() {
        if u < rank.len() {
            rank[u] = pos;
        }
    }
    decompose_by(r, budget, |frac, _| frac.sort_by_key(|&u| (rank[u], u)))
}

fn decompose_by<F>(r: &FractionalAllocation, budget: usize, order: F) -> Result<MixedStrategy>
where
    F: Fn(&mut Vec<usize>, &[f64]),
{
    let n = r.0.len();
    let k = budget.min(n);
    let mut cur = clamp_to_q(&r.0, k)?;
    let mut mass = 1.0;
    let mut atoms: Vec<(MediaSet, f64)> = Vec::new();
    for _ in 0..=n {
        for v in cur.iter_mut() {
            if *v < SNAP_TOL {
                *v = 0.0;
            } else if *v > 1.0 - SNAP_TOL {
                *v = 1.0;
            }
        }
        let ones: Vec<usize> = (0..n).filter(|&u| cur[u] == 1.0).collect();
        let mut frac: Vec<usize> = (0..n).filter(|&u| cur[u] > 0.0 && cur[u] < 1.0).collect();
        if frac.is_empty() {
            atoms.push((MediaSet::new(ones), mass));
            return Ok(MixedStrategy::from_atoms(atoms)?);
        }
        let total: f64 = cur.iter().sum();
        order(&mut frac, &cur);
        let room = k.saturating_sub(ones.len()).min(frac.len());
        let chosen = &frac[..room];
        let vertex = MediaSet::new(ones.iter().chain(chosen).copied().collect());

        let mut step: f64 = 1.0;
        for &u in chosen {
            step = step.min(cur[u]);
        }
        for &u in &frac[room..] {
            step = step.min(1.0 - cur[u]);
        }
        if vertex.len() < k {
            step = step.min((k as f64 - total) / (k - vertex.len()) as f64);
        }
        if step <= 0.0 {
            return Err(Error::Verification(format!("decomposition stalled at {cur:?}")));
        }
        atoms.push((vertex.clone(), mass * step));
        if step >= 1.0 {
            return Ok(MixedStrategy::from_atoms(atoms)?);
        }
        for (u, v) in cur.iter_mut().enumerate() {
            let z = if vertex.contains(u) { 1.0 } else { 0.0 };
            *v = ((*v - step * z) / (1.0 - step)).clamp(0.0, 1.0);
        }
        mass *= 1.0 - step;
    }
    Err(Error::Verification("decomposition needed more than n + 1 atoms".into()))
}

pub fn solve_disjoint_lp(game: &Game) -> Result<EquilibriumResult> {
    solve_disjoint_lp_with(game, crate::follower::DEFAULT_FOLLOWER_CAP)
}

pub fn solve_disjoint_lp_with(game: &Game, follower_cap: u128) -> Result<EquilibriumResult> {
    if !game.is_disjoint() {
        return Err(Error::NotDisjoint);
    }
    solve_disjoint_lp_using(&Follower::with_cap(game, follower_cap)?)
}

/// Reduced-LP solve reusing an existing follower.
pub fn solve_disjoint_lp_using(follower: &Follower<'_>) -> Result<EquilibriumResult> {
    let game = follower.game();
    if !game.is_disjoint() {
        return Err(Error::NotDisjoint);
    }
    let n = game.n_media();
    // Per medium: sum p, sum p * pF, sum p * (p - pF) over its customers.
    let mut reach = vec![0.0; n];
    let mut recaptured = vec![0.0; n];
    let mut contested = vec![0.0; n];
    for e in game.edges() {
        reach[e.medium] += e.p;
        recaptured[e.medium] += e.p * e.p_follower;
        contested[e.medium] += e.p * (e.p - e.p_follower);
    }
    let responses = follower.strategies();
    let indicator: Vec<Vec<f64>> = responses
        .iter()
        .map(|y| y.indicator(n).into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect())
        .collect();

    let outcomes: Vec<Result<LpOutcome>> = (0..responses.len())
        .into_par_iter()
        .map(|target| {
            let star = &indicator[target];
            let objective = (0..n).map(|u| reach[u] - star[u] * recaptured[u]).collect();
            let mut lp = LinearProgram::maximize(objective);
            for other in &indicator {
                let diff: Vec<f64> = (0..n).map(|u| star[u] - other[u]).collect();
                let coeffs = (0..n).map(|u| -diff[u] * contested[u]).collect();
                let rhs = -(0..n).map(|u| diff[u] * reach[u]).sum::<f64>();
                lp.add_row(coeffs, Relation::Ge, rhs);
            }
            lp.add_row(vec![1.0; n], Relation::Le, game.leader_budget() as f64);
            for u in 0..n {
                lp.set_bounds(u, 0.0, 1.0);
            }
            Ok(solve_lp(&lp)?)
        })
        .collect();

    let (best, per_response) = pick_best(responses, outcomes)?;
    let (target, outcome) = best.ok_or_else(|| {
        Error::Verification("no follower response is inducible, which cannot happen".into())
    })?;
    let leader = decompose_allocation(&FractionalAllocation(outcome.solution.clone()), game.leader_budget())?;
    finish(game, follower, leader, target, outcome.objective, per_response)
}
