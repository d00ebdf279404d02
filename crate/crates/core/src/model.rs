//! Core model types: action profiles, game specifications, and outcomes,
//! plus the marginal-value and desiring-set primitives everything else
//! consumes.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::games::LqPeerGame;
use crate::graph::{Graph, PlayerSet};
use crate::scalar::{Fnv1a, Scalar};

pub type PayoffFn<T> = Arc<dyn Fn(&Graph, &ActionProfile<T>, usize) -> T + Send + Sync>;
pub type IdioFn<T> = Arc<dyn Fn(&ActionProfile<T>, usize) -> T + Send + Sync>;
pub type LinkFn<T> = Arc<dyn Fn(&T, &T) -> T + Send + Sync>;

/// Common action set for all players.
#[derive(Clone)]
pub enum ActionDomain<T> {
    /// Nonnegative reals.
    ContinuousNonneg,
    /// Explicit finite grid, strictly ascending.
    Grid(Arc<[T]>),
}

impl<T: Scalar> ActionDomain<T> {
    pub fn grid(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty action grid".into()));
        }
        for w in values.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(
                    "action grid must be strictly ascending".into(),
                ));
            }
        }
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::InvalidParameter("non-finite grid value".into()));
        }
        Ok(ActionDomain::Grid(values.into()))
    }

    pub fn grid_values(&self) -> Option<&[T]> {
        match self {
            ActionDomain::Grid(g) => Some(g),
            ActionDomain::ContinuousNonneg => None,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, ActionDomain::Grid(_))
    }
}

impl<T: fmt::Debug> fmt::Debug for ActionDomain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionDomain::ContinuousNonneg => write!(f, "ContinuousNonneg"),
            ActionDomain::Grid(g) => write!(f, "Grid({g:?})"),
        }
    }
}

/// One action per player; grid profiles remember their indices so profile
/// comparisons and deviation scans never touch raw values.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionProfile<T> {
    values: Vec<T>,
    indices: Option<Vec<usize>>,
}

impl<T: Scalar> ActionProfile<T> {
    pub fn continuous(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(Error::Numeric("non-finite action value".into()));
        }
        Ok(ActionProfile {
            values,
            indices: None,
        })
    }

    pub fn on_grid(grid: &[T], indices: Vec<usize>) -> Result<Self> {
        let values = indices
            .iter()
            .map(|&ix| {
                grid.get(ix)
                    .cloned()
                    .ok_or_else(|| Error::InvalidParameter(format!("grid index {ix} out of range")))
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(ActionProfile {
            values,
            indices: Some(indices),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn index(&self, i: usize) -> Option<usize> {
        self.indices.as_ref().map(|ix| ix[i])
    }

    pub fn indices(&self) -> Option<&[usize]> {
        self.indices.as_deref()
    }

    pub fn is_grid(&self) -> bool {
        self.indices.is_some()
    }

    /// Copy with player `i`'s action replaced; the result is continuous-kind.
    pub fn with_value(&self, i: usize, value: T) -> Self {
        let mut values = self.values.clone();
        values[i] = value;
        ActionProfile {
            values,
            indices: None,
        }
    }

    /// Copy with player `i` moved to another grid point.
    pub fn with_index(&self, grid: &[T], i: usize, index: usize) -> Self {
        let mut out = self.clone();
        out.set_index(grid, i, index);
        out
    }

    /// In-place variant for scan loops.
    pub(crate) fn set_index(&mut self, grid: &[T], i: usize, index: usize) {
        self.values[i] = grid[index].clone();
        if let Some(ix) = self.indices.as_mut() {
            ix[i] = index;
        }
    }
}

/// A game: player count, action domain, and a payoff evaluator. Separable
/// games additionally expose their idiosyncratic part `v_i` and link value
/// `g`, in which case the payoff is `v_i(s) + sum over neighbors of
/// g(s_i, s_j)` by construction.
#[derive(Clone)]
pub struct GameSpec<T> {
    n: usize,
    domain: ActionDomain<T>,
    payoff: PayoffFn<T>,
    separable: Option<Separable<T>>,
    lq: Option<LqPeerGame<T>>,
    own_tables: Option<OwnActionTables<T>>,
}

#[derive(Clone)]
pub struct Separable<T> {
    pub v: IdioFn<T>,
    pub g: LinkFn<T>,
}

/// Grid-game fast path: `v` depends on own action only, both parts tabulated
/// against the domain grid.
#[derive(Clone, Debug)]
pub(crate) struct OwnActionTables<T> {
    pub v: Vec<Vec<T>>,
    pub g: Vec<Vec<T>>,
}

impl<T: Scalar> GameSpec<T> {
    pub fn from_payoff(n: usize, domain: ActionDomain<T>, payoff: PayoffFn<T>) -> Self {
        GameSpec {
            n,
            domain,
            payoff,
            separable: None,
            lq: None,
            own_tables: None,
        }
    }

    pub fn separable(n: usize, domain: ActionDomain<T>, v: IdioFn<T>, g: LinkFn<T>) -> Self {
        let payoff: PayoffFn<T> = {
            let v = v.clone();
            let g = g.clone();
            Arc::new(move |graph: &Graph, s: &ActionProfile<T>, i: usize| {
                let mut total = v(s, i);
                for j in graph.neighbors(i) {
                    total = total + g(s.value(i), s.value(j));
                }
                total
            })
        };
        GameSpec {
            n,
            domain,
            payoff,
            separable: Some(Separable { v, g }),
            lq: None,
            own_tables: None,
        }
    }

    pub(crate) fn with_lq(mut self, lq: LqPeerGame<T>) -> Self {
        self.lq = Some(lq);
        self
    }

    pub(crate) fn with_own_tables(mut self, tables: OwnActionTables<T>) -> Self {
        self.own_tables = Some(tables);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &ActionDomain<T> {
        &self.domain
    }

    pub fn grid(&self) -> Option<&[T]> {
        self.domain.grid_values()
    }

    pub fn separable_parts(&self) -> Option<&Separable<T>> {
        self.separable.as_ref()
    }

    pub fn is_separable(&self) -> bool {
        self.separable.is_some()
    }

    pub fn lq(&self) -> Option<&LqPeerGame<T>> {
        self.lq.as_ref()
    }

    pub(crate) fn own_tables(&self) -> Option<&OwnActionTables<T>> {
        self.own_tables.as_ref()
    }

    /// `u_i(G, s)`.
    pub fn payoff(&self, graph: &Graph, profile: &ActionProfile<T>, i: usize) -> T {
        (self.payoff)(graph, profile, i)
    }

    /// `g(s_i, s_j)` for separable games.
    pub fn link_value(&self, own: &T, partner: &T) -> Option<T> {
        self.separable.as_ref().map(|s| (s.g)(own, partner))
    }

    /// The link-value table sampled on the given grid (row = own action).
    pub fn link_table(&self, grid: &[T]) -> Option<Vec<Vec<T>>> {
        let sep = self.separable.as_ref()?;
        Some(
            grid.iter()
                .map(|x| grid.iter().map(|y| (sep.g)(x, y)).collect())
                .collect(),
        )
    }
}

impl<T: Scalar> fmt::Debug for GameSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSpec")
            .field("n", &self.n)
            .field("domain", &self.domain)
            .field("separable", &self.separable.is_some())
            .field("lq", &self.lq.is_some())
            .finish()
    }
}

/// A graph together with an action profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T> {
    graph: Graph,
    profile: ActionProfile<T>,
}

impl<T: Scalar> Outcome<T> {
    pub fn new(graph: Graph, profile: ActionProfile<T>) -> Result<Self> {
        if profile.len() != graph.n() {
            return Err(Error::InvalidParameter(format!(
                "profile has {} actions for {} players",
                profile.len(),
                graph.n()
            )));
        }
        Ok(Outcome { graph, profile })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn profile(&self) -> &ActionProfile<T> {
        &self.profile
    }

    pub fn into_parts(self) -> (Graph, ActionProfile<T>) {
        (self.graph, self.profile)
    }

    /// Reproducible fingerprint of the state (graph plus actions).
    pub fn state_hash(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write(&[self.graph.n() as u8]);
        h.write(&self.graph.edge_bits().to_le_bytes());
        match self.profile.indices() {
            Some(ix) => {
                for &k in ix {
                    h.write(&(k as u32).to_le_bytes());
                }
            }
            None => {
                for v in self.profile.values() {
                    h.write(&v.canonical_bytes());
                }
            }
        }
        h.finish()
    }
}

/// Marginal value of the link `ij` to player `i`:
/// `u_i(G + ij, s) - u_i(G - ij, s)`. Independent of whether `ij` is
/// currently present.
pub fn marginal_link_value<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    i: usize,
    j: usize,
) -> Result<T> {
    if i == j {
        return Err(Error::InvalidPair(i, j));
    }
    let with = outcome.graph().with_edge(i, j)?;
    let without = outcome.graph().without_edge(i, j)?;
    Ok(game.payoff(&with, outcome.profile(), i) - game.payoff(&without, outcome.profile(), i))
}

/// Players with a weak incentive to link with `i`, that is, all `j != i`
/// whose own marginal value of the link `ij` is nonnegative.
pub fn desiring_set<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    i: usize,
) -> Result<PlayerSet> {
    let mut set = PlayerSet::empty();
    for j in 0..game.n() {
        if j == i {
            continue;
        }
        if marginal_link_value(game, outcome, j, i)?.ge_zero() {
            set = set.with(j);
        }
    }
    Ok(set)
}

/// `u_i(G, s)` for every player.
pub fn payoff_vector<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>) -> Vec<T> {
    (0..game.n())
        .map(|i| game.payoff(outcome.graph(), outcome.profile(), i))
        .collect()
}

/// Checks that a game's payoff evaluator agrees with its separable parts at
/// the given outcome, up to `tol`.
pub fn separable_consistency_gap<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>) -> Option<T> {
    let sep = game.separable_parts()?;
    let mut worst = T::zero();
    for i in 0..game.n() {
        let mut expected = (sep.v)(outcome.profile(), i);
        for j in outcome.graph().neighbors(i) {
            expected = expected + (sep.g)(outcome.profile().value(i), outcome.profile().value(j));
        }
        let gap = (game.payoff(outcome.graph(), outcome.profile(), i) - expected).abs();
        if gap > worst {
            worst = gap;
        }
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::make_lq_peer_game;
    use crate::scalar::Ratio64;
    use crate::Rational;
    use num_traits::Zero;

    fn lq_game(b: &[i64], alpha_num: i64, alpha_den: i64) -> GameSpec<f64> {
        make_lq_peer_game(
            b.iter().map(|&v| Ratio64::int(v)).collect(),
            Ratio64::new(alpha_num, alpha_den).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn marginal_value_matches_direct_link_formula() {
        // alpha = 1, s_i = 4, s_j = 9: own-side value 1*4*9 - 16/2 = 28,
        // swapped 1*9*4 - 81/2 = -4.5; frozen from the closed form.
        let game = lq_game(&[4, 9], 1, 1);
        let profile = ActionProfile::continuous(vec![4.0, 9.0]).unwrap();
        for graph in [Graph::empty(2).unwrap(), Graph::complete(2).unwrap()] {
            let outcome = Outcome::new(graph, profile.clone()).unwrap();
            let d01 = marginal_link_value(&game, &outcome, 0, 1).unwrap();
            let d10 = marginal_link_value(&game, &outcome, 1, 0).unwrap();
            assert!((d01 - 28.0).abs() < 1e-12);
            assert!((d10 - (-4.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_value_rejects_self_pair() {
        let game = lq_game(&[4, 9], 1, 1);
        let outcome = Outcome::new(
            Graph::empty(2).unwrap(),
            ActionProfile::continuous(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            marginal_link_value(&game, &outcome, 1, 1),
            Err(Error::InvalidPair(1, 1))
        ));
    }

    #[test]
    fn desiring_sets_follow_link_signs() {
        // alpha = 1, s = (4, 4, 9): g(4,4) = 8 >= 0 but g(9,4) = -4.5 < 0,
        // so only player 1 wants player 0.
        let game = lq_game(&[4, 4, 9], 1, 1);
        let outcome = Outcome::new(
            Graph::empty(3).unwrap(),
            ActionProfile::continuous(vec![4.0, 4.0, 9.0]).unwrap(),
        )
        .unwrap();
        let s0 = desiring_set(&game, &outcome, 0).unwrap();
        assert_eq!(s0.iter().collect::<Vec<_>>(), vec![1]);
        // Everyone wants the high-action player: g(4,9) = 28 >= 0.
        let s2 = desiring_set(&game, &outcome, 2).unwrap();
        assert_eq!(s2.iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn desiring_set_under_constant_link_values() {
        let always_neg = GameSpec::<f64>::separable(
            2,
            ActionDomain::ContinuousNonneg,
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| -1.0),
        );
        let outcome = Outcome::new(
            Graph::empty(2).unwrap(),
            ActionProfile::continuous(vec![0.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert!(desiring_set(&always_neg, &outcome, 0).unwrap().is_empty());

        let indifferent = GameSpec::<f64>::separable(
            3,
            ActionDomain::ContinuousNonneg,
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 0.0),
        );
        let outcome = Outcome::new(
            Graph::empty(3).unwrap(),
            ActionProfile::continuous(vec![0.0, 0.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(desiring_set(&indifferent, &outcome, 1).unwrap().len(), 2);
    }

    #[test]
    fn payoff_vector_on_empty_graph_is_private_optimum() {
        // v_i(s) = b_i s_i - s_i^2/2 at s_i = b_i gives b_i^2/2.
        let game = lq_game(&[3, 5], 0, 1);
        let outcome = Outcome::new(
            Graph::empty(2).unwrap(),
            ActionProfile::continuous(vec![3.0, 5.0]).unwrap(),
        )
        .unwrap();
        let u = payoff_vector(&game, &outcome);
        assert!((u[0] - 4.5).abs() < 1e-12);
        assert!((u[1] - 12.5).abs() < 1e-12);
    }

    #[test]
    fn separable_payoff_agrees_with_parts_exactly() {
        let game = make_lq_peer_game::<Rational>(
            vec![Ratio64::int(4), Ratio64::int(6), Ratio64::int(9)],
            Ratio64::new(1, 2).unwrap(),
        )
        .unwrap();
        let profile = ActionProfile::continuous(vec![
            Rational::from_ratio(7, 2),
            Rational::from_ratio(5, 1),
            Rational::from_ratio(19, 3),
        ])
        .unwrap();
        let outcome = Outcome::new(Graph::complete(3).unwrap(), profile).unwrap();
        let gap = separable_consistency_gap(&game, &outcome).unwrap();
        assert!(gap.is_zero());
    }

    #[test]
    fn grid_profiles_track_indices() {
        let grid = [0.0, 0.5, 1.0];
        let p = ActionProfile::on_grid(&grid, vec![0, 2]).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0]);
        let q = p.with_index(&grid, 0, 1);
        assert_eq!(q.index(0), Some(1));
        assert_eq!(*q.value(0), 0.5);
        assert!(ActionProfile::on_grid(&grid, vec![3]).is_err());
    }

    #[test]
    fn state_hash_distinguishes_states() {
        let grid = [0.0, 1.0];
        let a = Outcome::new(
            Graph::empty(2).unwrap(),
            ActionProfile::on_grid(&grid, vec![0, 0]).unwrap(),
        )
        .unwrap();
        let b = Outcome::new(
            Graph::complete(2).unwrap(),
            ActionProfile::on_grid(&grid, vec![0, 0]).unwrap(),
        )
        .unwrap();
        let c = Outcome::new(
            Graph::empty(2).unwrap(),
            ActionProfile::on_grid(&grid, vec![1, 0]).unwrap(),
        )
        .unwrap();
        assert_ne!(a.state_hash(), b.state_hash());
        assert_ne!(a.state_hash(), c.state_hash());
        assert_eq!(a.state_hash(), a.clone().state_hash());
    }
}
