//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line even when `cargo test` captures
//! output; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{activation, f_br, mask_of, members, mixed_activation, random_game, subsets};
use stackalloc::bench::{run_experiment, ExperimentSpec, InstanceSource};
use stackalloc::exact::{decompose_allocation, solve_disjoint_lp, solve_multi_lp};
use stackalloc::heuristic::solve_heuristic;
use stackalloc::instances;
use stackalloc::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use stackalloc::model::{allocation_of, FractionalAllocation, UniformDist};
use stackalloc::mwu::{certify, solve_mwu, surrogate_constant, surrogate_payoffs, MwuConfig};
use stackalloc::payoff::{
    activation_prob, customer_utilities, follower_utility_pure, leader_utility_pure, phi, utilities_mixed,
};
use stackalloc::report::{Algorithm, SolverSettings};
use stackalloc::{Follower, Game, MediaSet, MixedStrategy};

type Outcome = Result<String, String>;

fn set(media: &[usize]) -> MediaSet {
    MediaSet::new(media.to_vec())
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want} (tol {tol})"))
    }
}

fn within(label: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("{label} took {elapsed:?}, limit {limit:?}"))
    }
}

fn pure_br(game: &Game, z: &[usize]) -> f64 {
    let z = members_mask(z);
    f_br(game, &activation(game, z, false))
}

fn members_mask(z: &[usize]) -> u32 {
    z.iter().fold(0, |m, u| m | 1 << u)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = instances::mixed_optimum_example();
    close("f_BR({u1})", pure_br(&g, &[0]), 0.6, 1e-6)?;
    close("f_BR({u2})", pure_br(&g, &[1]), 0.6, 1e-6)?;
    close("f_BR({u3})", pure_br(&g, &[2]), 0.599, 1e-6)?;
    let f = Follower::new(&g).map_err(|e| e.to_string())?;
    for (z, want) in [(0, 0.6), (1, 0.6), (2, 0.599)] {
        close("library f_BR", f.best_response(&MixedStrategy::pure(set(&[z]))).leader_value, want, 1e-6)?;
    }
    let eq = solve_multi_lp(&g).map_err(|e| e.to_string())?;
    close("multi-LP value", eq.value, 1.1, 1e-6)?;
    within("criterion 1", start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("pure values 0.6/0.6/0.599, mixed optimum {:.6}", eq.value))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let g = instances::idle_budget_example();
    let f = Follower::new(&g).map_err(|e| e.to_string())?;
    let lib = |z: &[usize]| f.best_response(&MixedStrategy::pure(set(z))).leader_value;
    close("f_BR(U)", lib(&[0, 1, 2]), 0.0, 1e-6)?;
    close("f_BR({u1})", lib(&[0]), 1.0, 1e-6)?;
    close("f_BR({u3})", lib(&[2]), 1.0, 1e-6)?;
    close("oracle f_BR(U)", pure_br(&g, &[0, 1, 2]), 0.0, 1e-6)?;
    close("oracle f_BR({u1})", pure_br(&g, &[0]), 1.0, 1e-6)?;
    let eq = solve_multi_lp(&g).map_err(|e| e.to_string())?;
    close("multi-LP value", eq.value, 1.0, 1e-6)?;
    // No mixture on a 1/6 grid over the 8 leader strategies does better.
    let leaders = subsets(3, 3);
    let mut best: f64 = 0.0;
    let mut parts = vec![0usize; leaders.len()];
    grid(&mut parts, 0, 6, &mut |parts| {
        let atoms: Vec<(u32, f64)> =
            leaders.iter().zip(parts).map(|(&z, &c)| (z, c as f64 / 6.0)).collect();
        best = best.max(f_br(&g, &mixed_activation(&g, &atoms)));
    });
    if best > eq.value + 1e-9 {
        return Err(format!("grid search found {best} above the LP value {}", eq.value));
    }
    within("criterion 2", start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("f_BR(U)=0, f_BR({{u1}})=f_BR({{u3}})=1, LP value {:.6}, grid best {best:.6}", eq.value))
}

/// Calls `visit` on every way of writing `left` as an ordered sum of
/// `parts.len() - at` non-negative integers.
fn grid(parts: &mut Vec<usize>, at: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
    if at + 1 == parts.len() {
        parts[at] = left;
        visit(parts);
        return;
    }
    for c in 0..=left {
        parts[at] = c;
        grid(parts, at + 1, left - c, visit);
    }
}

fn criterion_3() -> Outcome {
    let g = instances::recapture_example();
    let part = customer_utilities(&g, 1, &set(&[0, 1]), &set(&[2])).map_err(|e| e.to_string())?;
    close("g contribution of v2", part.follower, 0.512, 1e-12)?;
    Ok(format!("g_v2 = {}", part.follower))
}

fn criterion_4() -> Outcome {
    let g = instances::no_pure_equilibrium_example();
    let disjoint = solve_disjoint_lp(&g).map_err(|e| e.to_string())?;
    let multi = solve_multi_lp(&g).map_err(|e| e.to_string())?;
    close("reduced LP value", disjoint.value, 18.0, 1e-6)?;
    close("multi-LP value", multi.value, 18.0, 1e-6)?;
    let best_pure = subsets(4, 3)
        .into_iter()
        .map(|z| f_br(&g, &activation(&g, z, false)))
        .fold(f64::NEG_INFINITY, f64::max);
    if best_pure >= disjoint.value - 1e-6 {
        return Err(format!("a pure strategy reaches {best_pure}"));
    }
    Ok(format!("reduced LP {:.6}, multi-LP {:.6}, best pure {best_pure:.6}", disjoint.value, multi.value))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let g = random_game(&mut rng, 6, 12, 3, 2, true);
        let a = solve_disjoint_lp(&g).map_err(|e| format!("instance {i}: {e}"))?;
        let b = solve_multi_lp(&g).map_err(|e| format!("instance {i}: {e}"))?;
        worst = worst.max((a.value - b.value).abs());
        close(&format!("instance {i}"), a.value, b.value, 1e-6)?;
    }
    within("criterion 5", start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("50 instances, largest gap {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut largest_support = 0;
    for i in 0..1000 {
        let n = rng.gen_range(1..=10);
        let k = rng.gen_range(0..=n);
        let mut r: Vec<f64> = (0..n)
            .map(|_| match rng.gen_range(0..5) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.gen(),
            })
            .collect();
        let total: f64 = r.iter().sum();
        if total > k as f64 || rng.gen_bool(0.3) && total > 0.0 {
            let scale = (k as f64 / total).min(1.0 / r.iter().cloned().fold(0.0, f64::max));
            r.iter_mut().for_each(|v| *v *= scale);
        }
        let r = FractionalAllocation(r);
        let x = decompose_allocation(&r, k).map_err(|e| format!("point {i} {r:?}: {e}"))?;
        let back = allocation_of(&x, n);
        for (a, b) in back.0.iter().zip(&r.0) {
            worst = worst.max((a - b).abs());
        }
        if worst > 1e-9 {
            return Err(format!("point {i}: reconstruction error {worst}"));
        }
        if x.support_size() > n + 1 || x.max_atom_size() > k {
            return Err(format!("point {i}: support {} atoms, largest {}", x.support_size(), x.max_atom_size()));
        }
        close(&format!("point {i} total weight"), x.total_weight(), 1.0, 1e-12)?;
        largest_support = largest_support.max(x.support_size());
    }
    Ok(format!("1000 points, max error {worst:.2e}, largest support {largest_support}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let config = MwuConfig { iterations: 200, epsilon: 0.5, learning_rate: None };
    let mut tightest = f64::INFINITY;
    for i in 0..20 {
        let g = random_game(&mut rng, 8, 12, 3, 2, false);
        let eq = solve_multi_lp(&g).map_err(|e| format!("instance {i}: {e}"))?;
        let run = solve_mwu(&g, &config).map_err(|e| format!("instance {i}: {e}"))?;
        let cert = certify(&g, &run.leader, &run.best_response.chosen, Some((&eq.leader, &eq.follower)), 0.5)
            .map_err(|e| format!("instance {i}: {e}"))?;
        let slack = cert.value - (cert.alpha * cert.optimum.unwrap() - cert.beta.unwrap());
        tightest = tightest.min(slack);
        if cert.bound_holds != Some(true) {
            return Err(format!("instance {i}: bound violated, {cert:?}"));
        }
    }
    Ok(format!("20 instances, smallest slack {tightest:.4}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random_set = |rng: &mut ChaCha8Rng, n: usize, k: usize| -> MediaSet {
        let size = rng.gen_range(0..=k.min(n));
        MediaSet::new(rand::seq::index::sample(rng, n, size).into_vec())
    };

    // f + g = sum_v [1 - (1 - P_v(z)) (1 - P_v(y))]
    for i in 0..500 {
        let g = random_game(&mut rng, 7, 10, 3, 3, false);
        let z = random_set(&mut rng, g.n_media(), g.n_media());
        let y = random_set(&mut rng, g.n_media(), g.n_media());
        let total = leader_utility_pure(&g, &z, &y) + follower_utility_pure(&g, &z, &y);
        let pz = activation(&g, mask_of(&z), false);
        let py = activation(&g, mask_of(&y), false);
        let union: f64 = pz.iter().zip(&py).map(|(a, b)| 1.0 - (1.0 - a) * (1.0 - b)).sum();
        close(&format!("conservation case {i}"), total, union, 1e-12)?;
    }

    // Phi(x, y) = f(x, y) - sum_v (1 - P_v(x)) P_v(y)
    for i in 0..500 {
        let g = random_game(&mut rng, 7, 10, 3, 3, false);
        let x = random_mixed(&mut rng, &g);
        let y = random_set(&mut rng, g.n_media(), g.n_media());
        let atoms: Vec<(u32, f64)> = x.iter().map(|(s, w)| (mask_of(s), w)).collect();
        let lead = mixed_activation(&g, &atoms);
        let fresh = activation(&g, mask_of(&y), false);
        let missed: f64 = lead.iter().zip(&fresh).map(|(a, b)| (1.0 - a) * b).sum();
        let f = utilities_mixed(&g, &x, &y).leader;
        close(&format!("surrogate identity case {i}"), phi(&g, &x, &y), f - missed, 1e-12)?;
    }

    // Monotone submodularity of P_v and of h_y.
    let mut checks = 0;
    while checks < 500 {
        let g = random_game(&mut rng, 7, 10, 3, 3, false);
        let n = g.n_media();
        let b = random_set(&mut rng, n, n);
        let a = MediaSet::new(b.iter().filter(|_| rng.gen_bool(0.5)).collect());
        let Some(u) = (0..n).find(|&u| !b.contains(u)) else { continue };
        let v = rng.gen_range(0..g.n_customers());
        let p = |s: &MediaSet| activation_prob(&g, v, s).unwrap();
        let (ga, gb) = (p(&a.with(u)) - p(&a), p(&b.with(u)) - p(&b));
        if p(&b) < p(&a) - 1e-12 || ga < gb - 1e-12 {
            return Err(format!("P_v not monotone submodular: A={a}, B={b}, u={u}, v={v}"));
        }
        checks += 1;
    }
    checks = 0;
    while checks < 500 {
        let g = random_game(&mut rng, 6, 10, 3, 2, false);
        let n = g.n_media();
        let b = random_set(&mut rng, n, n);
        let a = MediaSet::new(b.iter().filter(|_| rng.gen_bool(0.5)).collect());
        let Some(u) = (0..n).find(|&u| !b.contains(u)) else { continue };
        let f = Follower::new(&g).unwrap();
        let c = surrogate_constant(&f);
        let y = rng.gen_range(0..f.len());
        let h = |s: &MediaSet| surrogate_payoffs(&f, s, c)[y];
        if h(&a) < -1e-12 || h(&b) < h(&a) - 1e-12 || h(&a.with(u)) - h(&a) < h(&b.with(u)) - h(&b) - 1e-12 {
            return Err(format!("h_y not monotone submodular: A={a}, B={b}, u={u}"));
        }
        checks += 1;
    }

    // Best responses: argmax g equals argmin Phi.
    for i in 0..100 {
        let g = random_game(&mut rng, 6, 10, 3, 2, false);
        let x = random_mixed(&mut rng, &g);
        let f = Follower::new(&g).unwrap();
        let phis: Vec<f64> = f.strategies().iter().map(|y| phi(&g, &x, y)).collect();
        let low = phis.iter().cloned().fold(f64::INFINITY, f64::min);
        let argmin: Vec<MediaSet> = f
            .strategies()
            .iter()
            .zip(&phis)
            .filter(|(_, &v)| v <= low + 1e-9)
            .map(|(y, _)| y.clone())
            .collect();
        if argmin != f.best_response(&x).responses {
            return Err(format!("case {i}: best-response sets differ"));
        }
    }
    Ok("conservation 500, surrogate identity 500, P_v 500, h_y 500, best-response sets 100".into())
}

fn random_mixed(rng: &mut ChaCha8Rng, g: &Game) -> MixedStrategy {
    let atoms = rng.gen_range(1..=4);
    let sets: Vec<(MediaSet, f64)> = (0..atoms)
        .map(|_| {
            let size = rng.gen_range(0..=g.leader_budget());
            (MediaSet::new(rand::seq::index::sample(rng, g.n_media(), size).into_vec()), rng.gen_range(0.1..1.0))
        })
        .collect();
    MixedStrategy::normalized(sets).unwrap()
}

/// Greedy on `f_BR` over pure strategies, written against the brute-force
/// evaluator: extend by the best candidate (smallest index on ties) while
/// that does not lower the value.
fn greedy_on_best_response(g: &Game) -> MixedStrategy {
    let n = g.n_media();
    let value = |s: &[usize]| f_br(g, &activation(g, members_mask(s), false));
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = value(&chosen);
    while chosen.len() < g.leader_budget().min(n) {
        let mut best: Option<(usize, f64)> = None;
        for u in (0..n).filter(|u| !chosen.contains(u)) {
            let mut next = chosen.clone();
            next.push(u);
            let v = value(&next);
            if best.is_none_or(|(_, b)| v > b + 1e-12) {
                best = Some((u, v));
            }
        }
        let (u, v) = best.unwrap();
        if v < current - 1e-12 {
            break;
        }
        chosen.push(u);
        current = v;
    }
    if current > 0.0 {
        MixedStrategy::pure(MediaSet::new(chosen))
    } else {
        MixedStrategy::pure(MediaSet::empty())
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let g = random_game(&mut rng, 7, 10, 3, 2, false);
        let got = solve_heuristic(&g, 1).map_err(|e| format!("instance {i}: {e}"))?.leader;
        let want = greedy_on_best_response(&g);
        if got != want {
            let show = |x: &MixedStrategy| x.iter().map(|(s, _)| members(mask_of(s))).collect::<Vec<_>>();
            return Err(format!("instance {i}: heuristic {:?}, greedy {:?}", show(&got), show(&want)));
        }
    }
    Ok("50 instances, identical strategies".into())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let spec = ExperimentSpec {
        instance: InstanceSource::Synthetic { media: 20, customers: 844, mean_degree: 4.15 },
        p: UniformDist::new(0.0, 0.2).unwrap(),
        follower_distributions: vec![UniformDist::new(0.1, 0.9).unwrap(), UniformDist::new(0.0, 0.2).unwrap()],
        budgets: vec![(1, 2)],
        algorithms: vec![Algorithm::Greedy, Algorithm::Mwu, Algorithm::Heuristic],
        trials: 30,
        base_seed: 0,
        settings: SolverSettings::default(),
        follower_cap: stackalloc::follower::DEFAULT_FOLLOWER_CAP,
    };
    let rows = run_experiment(&spec).map_err(|e| e.to_string())?;
    let mean = |r: usize| rows[r].mean.unwrap();
    let (greedy, heuristic) = (&rows[0].values, &rows[2].values);
    let wins = greedy.iter().zip(heuristic).filter(|(g, h)| **h >= **g - 1e-9).count();
    if mean(2) < mean(0) {
        return Err(format!("heuristic mean {} below greedy mean {}", mean(2), mean(0)));
    }
    if wins * 10 < 8 * greedy.len() {
        return Err(format!("heuristic matched greedy on only {wins}/30 instances"));
    }
    let low = [mean(3), mean(4), mean(5)];
    let hi = low.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = low.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi - lo > 0.05 * hi {
        return Err(format!("low-recapture means spread too far: {low:?}"));
    }
    within("criterion 10", start.elapsed(), Duration::from_secs(600))?;
    Ok(format!(
        "U(0.1,0.9): greedy {:.2}, mwu {:.2}, heuristic {:.2}, heuristic >= greedy on {wins}/30; U(0,0.2): {:.2}/{:.2}/{:.2}",
        mean(0),
        mean(1),
        mean(2),
        low[0],
        low[1],
        low[2]
    ))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_gap: f64 = 0.0;
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let rows = rng.gen_range(1..=8);
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let mut lp = LinearProgram::maximize((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        for _ in 0..rows {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let at: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
            let (rel, rhs) = match rng.gen_range(0..3) {
                0 => (Relation::Le, at + rng.gen_range(0.0..1.0)),
                1 => (Relation::Ge, at - rng.gen_range(0.0..1.0)),
                _ => (Relation::Eq, at),
            };
            lp.add_row(a, rel, rhs);
        }
        lp.add_row(vec![1.0; n], Relation::Le, x0.iter().sum::<f64>() + 5.0);
        let out = solve_lp(&lp).map_err(|e| format!("LP {i}: {e}"))?;
        if out.status != LpStatus::Optimal {
            return Err(format!("LP {i}: status {:?}", out.status));
        }
        if lp.max_violation(&out.solution) > 1e-7 {
            return Err(format!("LP {i}: primal violation {}", lp.max_violation(&out.solution)));
        }
        for (row, &y) in lp.rows.iter().zip(&out.duals) {
            let ok = match row.relation {
                Relation::Le => y >= -1e-9,
                Relation::Ge => y <= 1e-9,
                Relation::Eq => true,
            };
            if !ok {
                return Err(format!("LP {i}: dual sign"));
            }
        }
        for j in 0..n {
            let reduced: f64 = lp.rows.iter().zip(&out.duals).map(|(r, y)| r.coeffs[j] * y).sum();
            if reduced < lp.objective[j] - 1e-7 {
                return Err(format!("LP {i}: dual infeasible in column {j}"));
            }
        }
        let dual: f64 = lp.rows.iter().zip(&out.duals).map(|(r, y)| r.rhs * y).sum();
        let gap = (dual - out.objective).abs();
        worst_gap = worst_gap.max(gap);
        if gap > 1e-6 {
            return Err(format!("LP {i}: duality gap {gap}"));
        }
    }

    let classify = |lp: &LinearProgram| solve_lp(lp).map(|o| o.status).map_err(|e| e.to_string());
    let mut infeasible = LinearProgram::maximize(vec![1.0, 1.0]);
    infeasible.add_row(vec![1.0, 1.0], Relation::Le, 1.0).add_row(vec![1.0, 1.0], Relation::Ge, 2.0);
    let mut negative = LinearProgram::maximize(vec![1.0]);
    negative.add_row(vec![1.0], Relation::Eq, -1.0);
    let mut unbounded = LinearProgram::maximize(vec![1.0, 1.0]);
    unbounded.add_row(vec![1.0, -1.0], Relation::Le, 1.0);
    let free = LinearProgram::maximize(vec![0.0, 2.0]);
    let mut boxed = LinearProgram::maximize(vec![0.0, 2.0]);
    boxed.set_bounds(1, 0.0, 3.0);
    for (name, lp, want) in [
        ("contradictory rows", &infeasible, LpStatus::Infeasible),
        ("negative equality", &negative, LpStatus::Infeasible),
        ("open direction", &unbounded, LpStatus::Unbounded),
        ("no rows", &free, LpStatus::Unbounded),
        ("boxed", &boxed, LpStatus::Optimal),
    ] {
        let got = classify(lp)?;
        if got != want {
            return Err(format!("{name}: got {got:?}, expected {want:?}"));
        }
    }
    Ok(format!("200 random LPs, largest duality gap {worst_gap:.2e}; 5 constructed cases classified"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("mixed optimum example", criterion_1),
        ("idle budget example", criterion_2),
        ("recapture semantics", criterion_3),
        ("no pure equilibrium example", criterion_4),
        ("reduced LP matches multi-LP", criterion_5),
        ("allocation decomposition", criterion_6),
        ("MWU approximation bound", criterion_7),
        ("property suites", criterion_8),
        ("heuristic with one round is greedy", criterion_9),
        ("benchmark trend", criterion_10),
        ("LP kernel", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
