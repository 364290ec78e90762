//! Game instances, strategies and the instance text format.
//!
//! An instance is a bipartite graph between `n` media and `m` customers where
//! every edge `(u, v)` carries two probabilities: `p`, the chance that funding
//! medium `u` activates customer `v`, and `p_follower`, the chance that the
//! follower's medium `u` pulls `v` away once the leader has activated it.
//! Media and customers are plain `0..n` and `0..m` indices.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed when checking feasibility (budgets, boxes, weight sums).
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Tolerance used when comparing utility values for equality.
pub const EQUALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(Violation),
    #[error("generator: {0}")]
    Generator(String),
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The first broken instance invariant found by [`Game::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MediumOutOfRange { edge: usize, medium: usize },
    CustomerOutOfRange { edge: usize, customer: usize },
    DuplicateEdge { medium: usize, customer: usize },
    ProbabilityOutOfRange { medium: usize, customer: usize, value: f64 },
    BudgetExceedsMediaCount { budget: usize, media: usize },
    InconsistentAdjacency,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MediumOutOfRange { edge, medium } => {
                write!(f, "medium index out of range (edge {edge}, medium {medium})")
            }
            Violation::CustomerOutOfRange { edge, customer } => {
                write!(f, "customer index out of range (edge {edge}, customer {customer})")
            }
            Violation::DuplicateEdge { medium, customer } => {
                write!(f, "duplicate edge ({medium}, {customer})")
            }
            Violation::ProbabilityOutOfRange { medium, customer, value } => write!(
                f,
                "probability out of range ({value} on edge ({medium}, {customer}))"
            ),
            Violation::BudgetExceedsMediaCount { budget, media } => {
                write!(f, "budget exceeds media count ({budget} > {media})")
            }
            Violation::InconsistentAdjacency => write!(f, "adjacency lists disagree with edges"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub medium: usize,
    pub customer: usize,
    /// Basic activation probability.
    pub p: f64,
    /// Probability that the follower recaptures a customer the leader activated.
    pub p_follower: f64,
}

impl Edge {
    pub fn new(medium: usize, customer: usize, p: f64, p_follower: f64) -> Self {
        Self { medium, customer, p, p_follower }
    }
}

/// A Stackelberg budget allocation game on a bipartite influence graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    media: usize,
    customers: usize,
    leader_budget: usize,
    follower_budget: usize,
    edges: Vec<Edge>,
    by_customer: Vec<Vec<usize>>,
    by_medium: Vec<Vec<usize>>,
}

impl Game {
    /// Builds and validates an instance.
    pub fn new(
        media: usize,
        customers: usize,
        leader_budget: usize,
        follower_budget: usize,
        edges: Vec<Edge>,
    ) -> Result<Self, ModelError> {
        let game = Self::new_unchecked(media, customers, leader_budget, follower_budget, edges);
        game.validate().map_err(ModelError::Invalid)?;
        Ok(game)
    }

    /// Builds an instance without checking invariants. Edges with out-of-range
    /// endpoints are kept in the edge list but left out of the adjacency lists;
    /// [`Game::validate`] reports them.
    pub fn new_unchecked(
        media: usize,
        customers: usize,
        leader_budget: usize,
        follower_budget: usize,
        edges: Vec<Edge>,
    ) -> Self {
        let mut by_customer = vec![Vec::new(); customers];
        let mut by_medium = vec![Vec::new(); media];
        for (i, e) in edges.iter().enumerate() {
            if e.medium < media && e.customer < customers {
                by_customer[e.customer].push(i);
                by_medium[e.medium].push(i);
            }
        }
        Self { media, customers, leader_budget, follower_budget, edges, by_customer, by_medium }
    }

    /// Returns the first violated invariant, if any.
    pub fn validate(&self) -> Result<(), Violation> {
        let mut seen = HashSet::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if e.medium >= self.media {
                return Err(Violation::MediumOutOfRange { edge: i, medium: e.medium });
            }
            if e.customer >= self.customers {
                return Err(Violation::CustomerOutOfRange { edge: i, customer: e.customer });
            }
            if !seen.insert((e.medium, e.customer)) {
                return Err(Violation::DuplicateEdge { medium: e.medium, customer: e.customer });
            }
            for value in [e.p, e.p_follower] {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Violation::ProbabilityOutOfRange {
                        medium: e.medium,
                        customer: e.customer,
                        value,
                    });
                }
            }
        }
        for budget in [self.leader_budget, self.follower_budget] {
            if budget > self.media {
                return Err(Violation::BudgetExceedsMediaCount { budget, media: self.media });
            }
        }
        let consistent = self.by_customer.len() == self.customers
            && self.by_medium.len() == self.media
            && self.by_customer.iter().map(Vec::len).sum::<usize>() == self.edges.len()
            && self.by_medium.iter().map(Vec::len).sum::<usize>() == self.edges.len()
            && self.by_customer.iter().enumerate().all(|(v, ids)| {
                ids.iter().all(|&i| self.edges[i].customer == v)
            })
            && self.by_medium.iter().enumerate().all(|(u, ids)| {
                ids.iter().all(|&i| self.edges[i].medium == u)
            });
        if !consistent {
            return Err(Violation::InconsistentAdjacency);
        }
        Ok(())
    }

    pub fn n_media(&self) -> usize {
        self.media
    }

    pub fn n_customers(&self) -> usize {
        self.customers
    }

    pub fn leader_budget(&self) -> usize {
        self.leader_budget
    }

    pub fn follower_budget(&self) -> usize {
        self.follower_budget
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges incident to customer `v` (its neighbourhood `N_v`).
    pub fn customer_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.by_customer[v].iter().map(move |&i| &self.edges[i])
    }

    /// Edges incident to medium `u`.
    pub fn medium_edges(&self, u: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.by_medium[u].iter().map(move |&i| &self.edges[i])
    }

    pub fn customer_degree(&self, v: usize) -> usize {
        self.by_customer[v].len()
    }

    /// Same graph and probabilities with different budgets.
    pub fn with_budgets(&self, leader: usize, follower: usize) -> Result<Self, ModelError> {
        let mut game = self.clone();
        game.leader_budget = leader;
        game.follower_budget = follower;
        game.validate().map_err(ModelError::Invalid)?;
        Ok(game)
    }

    /// True when no customer is adjacent to more than one medium.
    ///
    /// Customers without any medium never activate and contribute nothing to
    /// either utility, so they do not break the bilinear structure.
    pub fn is_disjoint(&self) -> bool {
        self.by_customer.iter().all(|ids| ids.len() <= 1)
    }

    /// Parses the line-oriented instance format.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        load_instance(text.as_bytes())
    }

    /// Renders the instance in the text format read by [`Game::parse`].
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        write_instance(self, &mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("instance text is ASCII")
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse { line, message: message.into() }
}

/// Reads an instance: `#` comments, a `n m k_L k_F` header, then one
/// `u v p pF` line per edge.
pub fn load_instance<R: BufRead>(reader: R) -> Result<Game, ModelError> {
    let mut header: Option<(usize, [usize; 4])> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_error(line_no, format!("expected 4 fields, found {}", fields.len())));
        }
        match header {
            None => {
                let mut values = [0usize; 4];
                for (slot, field) in values.iter_mut().zip(&fields) {
                    *slot = field.parse().map_err(|_| {
                        parse_error(line_no, format!("expected a non-negative integer, found `{field}`"))
                    })?;
                }
                let [n, _, kl, kf] = values;
                if kl > n || kf > n {
                    return Err(parse_error(line_no, "budget exceeds media count"));
                }
                header = Some((line_no, values));
            }
            Some((_, [n, m, _, _])) => {
                let index = |field: &str, what: &str, bound: usize| -> Result<usize, ModelError> {
                    let value: usize = field.parse().map_err(|_| {
                        parse_error(line_no, format!("malformed {what} index `{field}`"))
                    })?;
                    if value >= bound {
                        return Err(parse_error(
                            line_no,
                            format!("{what} index {value} out of range (< {bound})"),
                        ));
                    }
                    Ok(value)
                };
                let prob = |field: &str| -> Result<f64, ModelError> {
                    let value: f64 = field.parse().map_err(|_| {
                        parse_error(line_no, format!("malformed probability `{field}`"))
                    })?;
                    if !(0.0..=1.0).contains(&value) {
                        return Err(parse_error(line_no, format!("probability out of range: {field}")));
                    }
                    Ok(value)
                };
                let u = index(fields[0], "medium", n)?;
                let v = index(fields[1], "customer", m)?;
                if !seen.insert((u, v)) {
                    return Err(parse_error(line_no, format!("duplicate edge ({u}, {v})")));
                }
                edges.push(Edge::new(u, v, prob(fields[2])?, prob(fields[3])?));
            }
        }
    }
    let (line_no, [n, m, kl, kf]) = header.ok_or_else(|| parse_error(0, "missing header line"))?;
    Game::new(n, m, kl, kf, edges).map_err(|e| parse_error(line_no, e.to_string()))
}

/// Writes the instance text format. Probabilities use the shortest decimal
/// that reads back to the same `f64`.
pub fn write_instance<W: Write>(game: &Game, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# n m k_L k_F")?;
    writeln!(
        out,
        "{} {} {} {}",
        game.media, game.customers, game.leader_budget, game.follower_budget
    )?;
    writeln!(out, "# u v p pF")?;
    for e in &game.edges {
        writeln!(out, "{} {} {} {}", e.medium, e.customer, e.p, e.p_follower)?;
    }
    Ok(())
}

/// A set of media, kept sorted and free of duplicates. Doubles as a pure
/// strategy for either player; the derived ordering is lexicographic on the
/// sorted indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MediaSet(Vec<usize>);

impl MediaSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(mut media: Vec<usize>) -> Self {
        media.sort_unstable();
        media.dedup();
        Self(media)
    }

    pub fn contains(&self, u: usize) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// The set with `u` added.
    pub fn with(&self, u: usize) -> Self {
        let mut media = self.0.clone();
        if let Err(pos) = media.binary_search(&u) {
            media.insert(pos, u);
        }
        Self(media)
    }

    /// 0/1 indicator vector of length `n`.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &u in &self.0 {
            if u < n {
                mask[u] = true;
            }
        }
        mask
    }
}

impl FromIterator<usize> for MediaSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl fmt::Display for MediaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, "}}")
    }
}

/// A finite-support distribution over leader pure strategies. Every stored
/// weight is positive and the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    weights: BTreeMap<MediaSet, f64>,
}

impl MixedStrategy {
    /// Point mass on `set`.
    pub fn pure(set: MediaSet) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(set, 1.0);
        Self { weights }
    }

    /// Builds a strategy from weighted atoms. Duplicate atoms are merged and
    /// zero weights dropped; negative weights or a total away from one are
    /// rejected.
    pub fn from_atoms<I>(atoms: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (MediaSet, f64)>,
    {
        let mut weights: BTreeMap<MediaSet, f64> = BTreeMap::new();
        for (set, w) in atoms {
            if !w.is_finite() || w < 0.0 {
                return Err(ModelError::Strategy(format!("weight {w} on {set}")));
            }
            if w > 0.0 {
                *weights.entry(set).or_insert(0.0) += w;
            }
        }
        let total: f64 = weights.values().sum();
        if (total - 1.0).abs() > FEASIBILITY_TOL {
            return Err(ModelError::Strategy(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    /// Like [`MixedStrategy::from_atoms`] but rescales the weights to sum to
    /// one. Used after pruning tiny LP weights.
    pub fn normalized<I>(atoms: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (MediaSet, f64)>,
    {
        let atoms: Vec<_> = atoms.into_iter().filter(|(_, w)| *w > 0.0).collect();
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(ModelError::Strategy("no positive weight".into()));
        }
        Self::from_atoms(atoms.into_iter().map(|(s, w)| (s, w / total)))
    }

    /// Uniform distribution over the given sets, counting repeats.
    pub fn uniform<I: IntoIterator<Item = MediaSet>>(sets: I) -> Result<Self, ModelError> {
        let sets: Vec<MediaSet> = sets.into_iter().collect();
        if sets.is_empty() {
            return Err(ModelError::Strategy("uniform mixture over no strategies".into()));
        }
        let w = 1.0 / sets.len() as f64;
        let mut weights: BTreeMap<MediaSet, f64> = BTreeMap::new();
        for s in sets {
            *weights.entry(s).or_insert(0.0) += w;
        }
        Ok(Self { weights })
    }

    /// `keep * self + (1 - keep) * other`, for `keep` in `[0, 1]`.
    pub fn blend(&self, keep: f64, other: &MixedStrategy) -> Self {
        let mut weights: BTreeMap<MediaSet, f64> = BTreeMap::new();
        for (s, &w) in &self.weights {
            *weights.entry(s.clone()).or_insert(0.0) += keep * w;
        }
        for (s, &w) in &other.weights {
            *weights.entry(s.clone()).or_insert(0.0) += (1.0 - keep) * w;
        }
        weights.retain(|_, w| *w > 0.0);
        Self { weights }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MediaSet, f64)> + '_ {
        self.weights.iter().map(|(s, &w)| (s, w))
    }

    pub fn weight(&self, set: &MediaSet) -> f64 {
        self.weights.get(set).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Largest number of media funded by any atom.
    pub fn max_atom_size(&self) -> usize {
        self.weights.keys().map(MediaSet::len).max().unwrap_or(0)
    }

    /// Fractional allocation `r_u = sum of weights of atoms containing u`.
    pub fn allocation(&self, n: usize) -> FractionalAllocation {
        allocation_of(self, n)
    }
}

/// Aggregates a mixed strategy into per-medium funding probabilities.
pub fn allocation_of(x: &MixedStrategy, n: usize) -> FractionalAllocation {
    let mut r = vec![0.0; n];
    for (set, w) in x.iter() {
        for u in set.iter() {
            r[u] += w;
        }
    }
    FractionalAllocation(r)
}

/// A point `r` of `[0,1]^n` with `sum r <= k_L`: the marginal funding
/// probabilities of a leader mixed strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FractionalAllocation(pub Vec<f64>);

impl FractionalAllocation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Box and budget constraints with the usual feasibility slack.
    pub fn is_feasible(&self, budget: usize) -> bool {
        self.0.iter().all(|&r| (-1e-12..=1.0 + 1e-12).contains(&r))
            && self.total() <= budget as f64 + FEASIBILITY_TOL
    }
}

/// `U(low, high)` with `0 <= low <= high <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformDist {
    pub low: f64,
    pub high: f64,
}

impl UniformDist {
    pub fn new(low: f64, high: f64) -> Result<Self, ModelError> {
        let dist = Self { low, high };
        dist.check()?;
        Ok(dist)
    }

    fn check(&self) -> Result<(), ModelError> {
        if !(0.0 <= self.low && self.low <= self.high && self.high <= 1.0) {
            return Err(ModelError::Generator(format!(
                "need 0 <= a <= b <= 1 for U(a,b), got U({},{})",
                self.low, self.high
            )));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            rng.gen_range(self.low..=self.high)
        }
    }

    pub fn label(&self) -> String {
        format!("U({},{})", self.low, self.high)
    }
}

/// Shape of a synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub media: usize,
    pub customers: usize,
    pub mean_degree: f64,
    pub p: UniformDist,
    pub p_follower: UniformDist,
    #[serde(default = "one")]
    pub leader_budget: usize,
    #[serde(default = "one")]
    pub follower_budget: usize,
}

fn one() -> usize {
    1
}

/// Draws a synthetic instance. Every customer gets `round(mean_degree)`
/// (at least one) distinct media chosen uniformly at random, then both edge
/// probabilities are drawn independently. Budgets are capped at `n`.
pub fn generate_instance(spec: &GeneratorSpec, seed: u64) -> Result<Game, ModelError> {
    spec.p.check()?;
    spec.p_follower.check()?;
    if !spec.mean_degree.is_finite() || spec.mean_degree > spec.media as f64 {
        return Err(ModelError::Generator(format!(
            "mean degree {} exceeds the number of media {}",
            spec.mean_degree, spec.media
        )));
    }
    let degree = (spec.mean_degree.round() as usize).max(1);
    if spec.customers > 0 && degree > spec.media {
        return Err(ModelError::Generator("instance has customers but no media".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(spec.customers * degree);
    for v in 0..spec.customers {
        let mut neighbours = index::sample(&mut rng, spec.media, degree).into_vec();
        neighbours.sort_unstable();
        for u in neighbours {
            let p = spec.p.sample(&mut rng);
            let pf = spec.p_follower.sample(&mut rng);
            edges.push(Edge::new(u, v, p, pf));
        }
    }
    Game::new(
        spec.media,
        spec.customers,
        spec.leader_budget.min(spec.media),
        spec.follower_budget.min(spec.media),
        edges,
    )
}

/// Redraws both probabilities on every edge of `game`, keeping its topology.
pub fn redraw_probabilities(
    game: &Game,
    p: UniformDist,
    p_follower: UniformDist,
    seed: u64,
) -> Result<Game, ModelError> {
    p.check()?;
    p_follower.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = game
        .edges()
        .iter()
        .map(|e| {
            let pv = p.sample(&mut rng);
            let pf = p_follower.sample(&mut rng);
            Edge::new(e.medium, e.customer, pv, pf)
        })
        .collect();
    Game::new(game.n_media(), game.n_customers(), game.leader_budget(), game.follower_budget(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn worked_instances_validate() {
        assert!(instances::idle_budget_example().validate().is_ok());
        let g = instances::mixed_optimum_example();
        assert!(g.validate().is_ok());
        assert_eq!((g.n_media(), g.n_customers(), g.edges().len()), (3, 4, 5));
    }

    #[test]
    fn probability_violation_is_reported() {
        let g = Game::new_unchecked(1, 1, 0, 0, vec![Edge::new(0, 0, 1.5, 0.2)]);
        let err = g.validate().unwrap_err();
        assert!(matches!(err, Violation::ProbabilityOutOfRange { .. }));
        assert!(err.to_string().contains("probability out of range"));
    }

    #[test]
    fn budget_violation_is_reported() {
        let g = Game::new_unchecked(2, 1, 3, 0, vec![Edge::new(0, 0, 0.5, 0.2)]);
        let err = g.validate().unwrap_err();
        assert!(err.to_string().contains("budget exceeds media count"));
    }

    #[test]
    fn duplicate_and_range_violations() {
        let dup = Game::new_unchecked(
            2,
            2,
            1,
            1,
            vec![Edge::new(0, 1, 0.5, 0.5), Edge::new(0, 1, 0.1, 0.1)],
        );
        assert!(matches!(dup.validate(), Err(Violation::DuplicateEdge { medium: 0, customer: 1 })));
        let oob = Game::new_unchecked(2, 2, 1, 1, vec![Edge::new(2, 0, 0.5, 0.5)]);
        assert!(matches!(oob.validate(), Err(Violation::MediumOutOfRange { .. })));
    }

    #[test]
    fn parses_minimal_instance() {
        let g = Game::parse("1 1 0 0\n0 0 0.5 0.5\n").unwrap();
        assert_eq!(g.n_media(), 1);
        assert_eq!(g.edges(), &[Edge::new(0, 0, 0.5, 0.5)]);
    }

    #[test]
    fn parses_worked_instance_text() {
        let text = "\
# three media, two customers
3 2 3 1
0 0 1 0
1 0 0 1
1 1 0 1
2 1 1 0
";
        assert_eq!(Game::parse(text).unwrap(), instances::idle_budget_example());
        let text = "3 4 1 1\n0 0 0.1 0\n0 1 1 0.5\n1 1 1 0.5\n1 2 0.1 0\n2 3 0.599 0\n";
        assert_eq!(Game::parse(text).unwrap(), instances::mixed_optimum_example());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Game::parse("2 2 1 1\n0 0 0.5 0.5\n0 0 0.3 0.3\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 3, .. }), "{err}");
        let err = Game::parse("# c\n2 2 1 1\n0 5 0.5 0.5\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 3, .. }), "{err}");
        let err = Game::parse("2 2 1 1\n0 0 x 0.5\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 2, .. }), "{err}");
        let err = Game::parse("2 2 1\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 1, .. }), "{err}");
        assert!(Game::parse("# only a comment\n").is_err());
    }

    #[test]
    fn text_round_trip_keeps_exact_values() {
        let g = instances::mixed_optimum_example();
        let text = g.to_text();
        assert!(text.contains("0.599"));
        assert_eq!(Game::parse(&text).unwrap(), g);
    }

    #[test]
    fn disjointness() {
        assert!(!instances::idle_budget_example().is_disjoint());
        assert!(instances::no_pure_equilibrium_example().is_disjoint());
        assert!(Game::new(2, 3, 1, 1, vec![]).unwrap().is_disjoint());
    }

    #[test]
    fn allocation_of_examples() {
        let x = MixedStrategy::from_atoms([
            (MediaSet::new(vec![0]), 0.5),
            (MediaSet::new(vec![1]), 0.5),
        ])
        .unwrap();
        assert_eq!(allocation_of(&x, 3).0, vec![0.5, 0.5, 0.0]);
        assert_eq!(allocation_of(&MixedStrategy::pure(MediaSet::empty()), 3).0, vec![0.0; 3]);
        let third = 1.0 / 3.0;
        let x = MixedStrategy::from_atoms([
            (MediaSet::new(vec![0, 3]), third),
            (MediaSet::new(vec![0, 1, 3]), third),
            (MediaSet::new(vec![0, 2, 3]), third),
        ])
        .unwrap();
        let r = allocation_of(&x, 4);
        for (got, want) in r.0.iter().zip([1.0, third, third, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(r.is_feasible(3));
    }

    #[test]
    fn mixed_strategy_rejects_bad_weights() {
        assert!(MixedStrategy::from_atoms([(MediaSet::empty(), 0.7)]).is_err());
        assert!(MixedStrategy::from_atoms([
            (MediaSet::empty(), 1.2),
            (MediaSet::new(vec![0]), -0.2)
        ])
        .is_err());
        let x = MixedStrategy::from_atoms([
            (MediaSet::new(vec![1]), 0.25),
            (MediaSet::new(vec![1]), 0.75),
            (MediaSet::new(vec![2]), 0.0),
        ])
        .unwrap();
        assert_eq!(x.support_size(), 1);
    }

    #[test]
    fn media_set_order_is_lexicographic() {
        let mut sets = [
            MediaSet::new(vec![1]),
            MediaSet::new(vec![0, 2]),
            MediaSet::empty(),
            MediaSet::new(vec![0]),
        ];
        sets.sort();
        assert_eq!(sets[0], MediaSet::empty());
        assert_eq!(sets[1], MediaSet::new(vec![0]));
        assert_eq!(sets[2], MediaSet::new(vec![0, 2]));
        assert_eq!(MediaSet::new(vec![3, 1, 3]).as_slice(), &[1, 3]);
        assert_eq!(MediaSet::new(vec![0, 4]).with(2).as_slice(), &[0, 2, 4]);
    }

    #[test]
    fn generator_shapes_and_determinism() {
        let spec = GeneratorSpec {
            media: 20,
            customers: 844,
            mean_degree: 3506.0 / 844.0,
            p: UniformDist::new(0.0, 0.2).unwrap(),
            p_follower: UniformDist::new(0.1, 0.9).unwrap(),
            leader_budget: 1,
            follower_budget: 2,
        };
        let a = generate_instance(&spec, 1).unwrap();
        let b = generate_instance(&spec, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges().len(), 844 * 4);
        assert!(a.validate().is_ok());
        assert!(a.edges().iter().all(|e| e.p <= 0.2 && (0.1..=0.9).contains(&e.p_follower)));
        assert_ne!(a, generate_instance(&spec, 2).unwrap());
    }

    #[test]
    fn degenerate_generator() {
        let spec = GeneratorSpec {
            media: 1,
            customers: 1,
            mean_degree: 1.0,
            p: UniformDist::new(0.3, 0.3).unwrap(),
            p_follower: UniformDist::new(0.3, 0.3).unwrap(),
            leader_budget: 1,
            follower_budget: 1,
        };
        let g = generate_instance(&spec, 99).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 0, 0.3, 0.3)]);
    }

    #[test]
    fn generator_rejects_bad_arguments() {
        assert!(UniformDist::new(0.2, 0.1).is_err());
        let spec = GeneratorSpec {
            media: 3,
            customers: 5,
            mean_degree: 4.0,
            p: UniformDist::new(0.0, 0.2).unwrap(),
            p_follower: UniformDist::new(0.0, 0.2).unwrap(),
            leader_budget: 1,
            follower_budget: 1,
        };
        assert!(generate_instance(&spec, 0).is_err());
    }
}
