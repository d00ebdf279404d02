//! Stability checkers and exhaustive enumeration of stable outcomes.
//!
//! Three nested concepts are supported. In every case the action profile
//! must be a Nash equilibrium of the game holding the graph fixed; they
//! differ in how links are judged:
//!
//! * strict pairwise: every present link strictly benefits both endpoints,
//!   and no absent link weakly benefits both;
//! * pairwise: cutting a link must strictly improve the cutter to count,
//!   and an absent link violates only if both endpoints weakly gain and at
//!   least one strictly;
//! * pairwise Nash: pairwise, plus no player gains by simultaneously
//!   changing her action and deleting any subset of her links.

use std::ops::Range;

use crate::equilibrium::{finite_nash, lq_nash_on_graph};
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, MAX_ENUMERATION_PLAYERS};
use crate::model::{marginal_link_value, ActionProfile, GameSpec, Outcome};
use crate::scalar::Scalar;

/// Joint-deviation scans enumerate all subsets of a player's neighbors.
const MAX_PNS_DEGREE: usize = 12;

/// Stability concept selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Concept {
    Pairwise,
    StrictPairwise,
    PairwiseNash,
}

/// A profitable deviation witnessing instability.
#[derive(Clone, Debug, PartialEq)]
pub enum Deviation<T> {
    /// Player strictly gains by switching to `action`.
    Action { player: usize, action: T },
    /// Player gains (strictly under pairwise/PNS, weakly under strict
    /// pairwise) by cutting the link to `partner`.
    CutLink { player: usize, partner: usize },
    /// The pair gains by adding their link.
    AddLink { i: usize, j: usize },
    /// Player gains strictly by playing `action` after cutting every link
    /// to `cut`.
    Joint {
        player: usize,
        action: T,
        cut: Vec<usize>,
    },
}

/// Verdict plus the violations found; stable exactly when no witness exists.
#[derive(Clone, Debug)]
pub struct StabilityReport<T> {
    witnesses: Vec<Deviation<T>>,
}

impl<T> StabilityReport<T> {
    pub fn stable(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn witnesses(&self) -> &[Deviation<T>] {
        &self.witnesses
    }
}

/// Marginal value of link `ij` to `i`, via the separable link function when
/// one is available and payoff differences otherwise.
fn marginal<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>, i: usize, j: usize) -> T {
    match game.link_value(outcome.profile().value(i), outcome.profile().value(j)) {
        Some(v) => v,
        None => marginal_link_value(game, outcome, i, j).expect("distinct players"),
    }
}

/// First strictly improving unilateral action deviation, if any.
fn nash_witness<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<Option<Deviation<T>>> {
    let graph = outcome.graph();
    if let Some(grid) = game.grid() {
        let indices = outcome
            .profile()
            .indices()
            .map(<[usize]>::to_vec)
            .or_else(|| {
                outcome
                    .profile()
                    .values()
                    .iter()
                    .map(|v| grid.iter().position(|g| g == v))
                    .collect::<Option<Vec<usize>>>()
            });
        let Some(indices) = indices else {
            return Err(Error::UnsupportedDomain(
                "grid game evaluated at off-grid actions".into(),
            ));
        };
        let mut scratch = ActionProfile::on_grid(grid, indices.clone())?;
        for i in 0..game.n() {
            let cur = game.payoff(graph, &scratch, i);
            for x in 0..grid.len() {
                if x == indices[i] {
                    continue;
                }
                scratch.set_index(grid, i, x);
                let dev = game.payoff(graph, &scratch, i);
                if dev.exceeds(&cur) {
                    return Ok(Some(Deviation::Action {
                        player: i,
                        action: grid[x].clone(),
                    }));
                }
            }
            scratch.set_index(grid, i, indices[i]);
        }
        return Ok(None);
    }
    if let Some(lq) = game.lq() {
        for i in 0..game.n() {
            let br = lq.best_response(graph, outcome.profile(), i);
            if !br.near(outcome.profile().value(i)) {
                return Ok(Some(Deviation::Action {
                    player: i,
                    action: br,
                }));
            }
        }
        return Ok(None);
    }
    Err(Error::UnsupportedDomain(
        "Nash check needs a finite grid or a linear-quadratic game".into(),
    ))
}

fn link_witnesses<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    strict: bool,
    witnesses: &mut Vec<Deviation<T>>,
) {
    let graph = outcome.graph();
    for (i, j) in graph.pairs() {
        let di = marginal(game, outcome, i, j);
        let dj = marginal(game, outcome, j, i);
        if graph.has_edge(i, j) {
            // Cutting moves the payoff by -delta.
            if strict {
                if !di.gt_zero() {
                    witnesses.push(Deviation::CutLink {
                        player: i,
                        partner: j,
                    });
                }
                if !dj.gt_zero() {
                    witnesses.push(Deviation::CutLink {
                        player: j,
                        partner: i,
                    });
                }
            } else {
                if di.lt_zero() {
                    witnesses.push(Deviation::CutLink {
                        player: i,
                        partner: j,
                    });
                }
                if dj.lt_zero() {
                    witnesses.push(Deviation::CutLink {
                        player: j,
                        partner: i,
                    });
                }
            }
        } else {
            let violates = if strict {
                di.ge_zero() && dj.ge_zero()
            } else {
                di.ge_zero() && dj.ge_zero() && (di.gt_zero() || dj.gt_zero())
            };
            if violates {
                witnesses.push(Deviation::AddLink { i, j });
            }
        }
    }
}

/// One profitable joint deviation (action change plus link cuts) per
/// player, if any exists.
fn joint_witness<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    i: usize,
) -> Result<Option<Deviation<T>>> {
    let graph = outcome.graph();
    let neighbors: Vec<usize> = graph.neighbors(i).collect();
    let d = neighbors.len();
    if d > MAX_PNS_DEGREE {
        return Err(Error::SizeGuard(format!(
            "degree {d} exceeds the joint-deviation scan cap {MAX_PNS_DEGREE}"
        )));
    }
    let current = game.payoff(graph, outcome.profile(), i);

    if let Some(lq) = game.lq() {
        for mask in 1u32..(1 << d) {
            let mut cut_graph = *graph;
            let mut cut = Vec::new();
            for (pos, &k) in neighbors.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    cut_graph = cut_graph.without_edge(i, k)?;
                    cut.push(k);
                }
            }
            // Re-optimized action in closed form; at the best response the
            // payoff is (1 + d') s'^2 / 2.
            let best = lq.best_response(&cut_graph, outcome.profile(), i);
            let payoff = (T::from_int(1 + cut_graph.degree(i) as i64) * best.sq()).half();
            if payoff.exceeds(&current) {
                return Ok(Some(Deviation::Joint {
                    player: i,
                    action: best,
                    cut,
                }));
            }
        }
        return Ok(None);
    }

    let grid = game.grid().ok_or_else(|| {
        Error::UnsupportedDomain(
            "joint-deviation scan needs a finite grid or a linear-quadratic game".into(),
        )
    })?;
    for mask in 1u32..(1 << d) {
        let mut cut_graph = *graph;
        let mut cut = Vec::new();
        for (pos, &k) in neighbors.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                cut_graph = cut_graph.without_edge(i, k)?;
                cut.push(k);
            }
        }
        for x in grid {
            let trial = outcome.profile().with_value(i, x.clone());
            let payoff = game.payoff(&cut_graph, &trial, i);
            if payoff.exceeds(&current) {
                return Ok(Some(Deviation::Joint {
                    player: i,
                    action: x.clone(),
                    cut,
                }));
            }
        }
    }
    Ok(None)
}

/// Strict pairwise stability per the three-bullet definition.
pub fn check_strict_pairwise<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<StabilityReport<T>> {
    let mut witnesses = Vec::new();
    if let Some(w) = nash_witness(game, outcome)? {
        witnesses.push(w);
    }
    link_witnesses(game, outcome, true, &mut witnesses);
    Ok(StabilityReport { witnesses })
}

/// Pairwise stability: the weak-indifference variant.
pub fn check_pairwise<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<StabilityReport<T>> {
    let mut witnesses = Vec::new();
    if let Some(w) = nash_witness(game, outcome)? {
        witnesses.push(w);
    }
    link_witnesses(game, outcome, false, &mut witnesses);
    Ok(StabilityReport { witnesses })
}

/// Pairwise Nash stability: pairwise plus joint action-and-cut deviations.
pub fn check_pairwise_nash<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<StabilityReport<T>> {
    let mut report = check_pairwise(game, outcome)?;
    for i in 0..game.n() {
        if let Some(w) = joint_witness(game, outcome, i)? {
            report.witnesses.push(w);
        }
    }
    Ok(report)
}

pub fn check<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    concept: Concept,
) -> Result<StabilityReport<T>> {
    match concept {
        Concept::Pairwise => check_pairwise(game, outcome),
        Concept::StrictPairwise => check_strict_pairwise(game, outcome),
        Concept::PairwiseNash => check_pairwise_nash(game, outcome),
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// All stable outcomes of the game under the chosen concept, ordered by
/// graph bitmask ascending and then lexicographic profile.
///
/// Linear-quadratic games contribute their unique per-graph equilibrium;
/// grid games contribute every Nash profile of every graph.
pub fn enumerate_stable<T: Scalar>(
    game: &GameSpec<T>,
    concept: Concept,
) -> Result<Vec<Outcome<T>>> {
    enumerate_stable_with(game, concept, 1)
}

/// Parallel variant: graph bitmask ranges are scanned by up to `jobs`
/// workers and merged deterministically.
pub fn enumerate_stable_with<T: Scalar>(
    game: &GameSpec<T>,
    concept: Concept,
    jobs: usize,
) -> Result<Vec<Outcome<T>>> {
    let n = game.n();
    if n > MAX_ENUMERATION_PLAYERS {
        return Err(Error::SizeGuard(format!(
            "enumeration capped at {MAX_ENUMERATION_PLAYERS} players, got {n}"
        )));
    }
    if game.lq().is_none() && game.grid().is_none() {
        return Err(Error::UnsupportedDomain(
            "enumeration needs a finite grid or a linear-quadratic game".into(),
        ));
    }
    // Surface grid-size guards before spawning workers.
    if game.grid().is_some() {
        finite_nash(game, &Graph::empty(n)?)?;
    }

    let total: u128 = 1 << pair_count(n);
    let jobs = jobs.clamp(1, 64).min(total.try_into().unwrap_or(64));
    let chunk = total.div_ceil(jobs as u128);
    let ranges: Vec<Range<u128>> = (0..jobs as u128)
        .map(|w| (w * chunk)..((w + 1) * chunk).min(total))
        .collect();

    let run_range = |range: Range<u128>| -> Result<Vec<Outcome<T>>> {
        let mut found = Vec::new();
        for bits in range {
            let graph = Graph::from_edge_bits(n, bits)?;
            if let Some(lq) = game.lq() {
                let profile = lq_nash_on_graph(lq, &graph)?;
                let outcome = Outcome::new(graph, profile)?;
                if stable_at_equilibrium(game, &outcome, concept)? {
                    found.push(outcome);
                }
            } else {
                for profile in finite_nash(game, &graph)? {
                    let outcome = Outcome::new(graph, profile)?;
                    if stable_at_equilibrium(game, &outcome, concept)? {
                        found.push(outcome);
                    }
                }
            }
        }
        Ok(found)
    };

    if jobs == 1 {
        return run_range(0..total);
    }
    let results: Vec<Result<Vec<Outcome<T>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| scope.spawn(|| run_range(range)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Stability check for profiles already known to be Nash on their graph;
/// skips the action bullet and tests links (and joint deviations for PNS).
fn stable_at_equilibrium<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    concept: Concept,
) -> Result<bool> {
    let graph = outcome.graph();
    let strict = concept == Concept::StrictPairwise;
    for (i, j) in graph.pairs() {
        let di = marginal(game, outcome, i, j);
        let dj = marginal(game, outcome, j, i);
        if graph.has_edge(i, j) {
            let violated = if strict {
                !di.gt_zero() || !dj.gt_zero()
            } else {
                di.lt_zero() || dj.lt_zero()
            };
            if violated {
                return Ok(false);
            }
        } else {
            let violated = if strict {
                di.ge_zero() && dj.ge_zero()
            } else {
                di.ge_zero() && dj.ge_zero() && (di.gt_zero() || dj.gt_zero())
            };
            if violated {
                return Ok(false);
            }
        }
    }
    if concept == Concept::PairwiseNash {
        for i in 0..game.n() {
            if joint_witness(game, outcome, i)?.is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{make_nonexistence_example, make_table_game, LqPeerGame, StatusGame};
    use crate::scalar::Ratio64;
    use crate::Rational;

    fn rq(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn squadron(b: &[i64]) -> LqPeerGame<Rational> {
        LqPeerGame::from_ratios(
            &b.iter().map(|&v| Ratio64::int(v)).collect::<Vec<_>>(),
            Ratio64::int(1),
        )
        .unwrap()
    }

    #[test]
    fn complete_graph_equilibrium_is_strictly_stable_and_pns() {
        let lq = squadron(&[4, 4, 6, 6, 9]);
        let game = lq.game_spec();
        let graph = Graph::complete(5).unwrap();
        let outcome = Outcome::new(graph, lq_nash_on_graph(&lq, &graph).unwrap()).unwrap();
        assert!(check_strict_pairwise(&game, &outcome).unwrap().stable());
        assert!(check_pairwise(&game, &outcome).unwrap().stable());
        assert!(check_pairwise_nash(&game, &outcome).unwrap().stable());
    }

    #[test]
    fn two_clique_outcome_is_stable_for_spread_incentives() {
        let lq = squadron(&[4, 4, 9, 9, 9]);
        let game = lq.game_spec();
        let graph = Graph::disjoint_cliques(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap();
        let profile =
            ActionProfile::continuous(vec![rq(4, 1), rq(4, 1), rq(9, 1), rq(9, 1), rq(9, 1)])
                .unwrap();
        let outcome = Outcome::new(graph, profile).unwrap();
        // Cross links blocked: the high action player loses 4.5 from a link
        // to a low action player.
        assert!(check_strict_pairwise(&game, &outcome).unwrap().stable());
        assert!(check_pairwise_nash(&game, &outcome).unwrap().stable());
    }

    #[test]
    fn non_best_response_yields_action_witness() {
        let lq = squadron(&[4, 4, 6, 6, 9]);
        let game = lq.game_spec();
        let graph = Graph::empty(5).unwrap();
        let profile = ActionProfile::continuous(vec![
            rq(4, 1),
            rq(4, 1),
            rq(6, 1),
            rq(6, 1),
            rq(5, 1), // should be 9
        ])
        .unwrap();
        let outcome = Outcome::new(graph, profile).unwrap();
        let report = check_pairwise(&game, &outcome).unwrap();
        assert!(!report.stable());
        assert!(report
            .witnesses()
            .iter()
            .any(|w| matches!(w, Deviation::Action { player: 4, .. })));
    }

    // The discriminating boundary between the two concepts: a mutually
    // indifferent absent link violates strict pairwise stability only.
    #[test]
    fn indifferent_absent_link_separates_concepts() {
        let game = make_table_game::<f64>(
            vec![0.0, 1.0],
            vec![vec![1.0, 0.0]; 3],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        let grid = game.grid().unwrap().to_vec();
        let outcome = Outcome::new(
            Graph::empty(3).unwrap(),
            ActionProfile::on_grid(&grid, vec![0, 0, 0]).unwrap(),
        )
        .unwrap();
        assert!(check_pairwise(&game, &outcome).unwrap().stable());
        let strict = check_strict_pairwise(&game, &outcome).unwrap();
        assert!(!strict.stable());
        assert!(strict
            .witnesses()
            .iter()
            .all(|w| matches!(w, Deviation::AddLink { .. })));
    }

    #[test]
    fn status_cliques_with_small_gap_attract_cross_links() {
        let status =
            StatusGame::<Rational>::new(5, Ratio64::int(1), Ratio64::new(1, 2).unwrap()).unwrap();
        let game = status.game_spec();
        // Sizes (3, 2): gap delta = 1/2 < 1/delta = 2, so cross links are
        // mutually attractive and pairwise stability fails.
        let outcome = status
            .max_equilibrium(&[vec![0, 1, 2], vec![3, 4]])
            .unwrap();
        let report = check_pairwise(&game, &outcome).unwrap();
        assert!(!report.stable());
        assert!(report
            .witnesses()
            .iter()
            .any(|w| matches!(w, Deviation::AddLink { .. })));
        assert!(!check_pairwise_nash(&game, &outcome).unwrap().stable());
    }

    #[test]
    fn weak_spillovers_keep_the_empty_graph_stable() {
        // b = (1, 1), alpha = 2/5: nobody strictly gains from the link.
        let lq = LqPeerGame::<Rational>::from_ratios(
            &[Ratio64::int(1), Ratio64::int(1)],
            Ratio64::new(2, 5).unwrap(),
        )
        .unwrap();
        let game = lq.game_spec();
        let outcome = Outcome::new(
            Graph::empty(2).unwrap(),
            ActionProfile::continuous(vec![rq(1, 1), rq(1, 1)]).unwrap(),
        )
        .unwrap();
        assert!(check_pairwise(&game, &outcome).unwrap().stable());
    }

    #[test]
    fn vanishing_status_concern_sustains_the_complete_graph() {
        let status =
            StatusGame::<Rational>::new(4, Ratio64::int(1), Ratio64::new(1, 1000).unwrap())
                .unwrap();
        let game = status.game_spec();
        let outcome = status.max_equilibrium(&[vec![0, 1, 2, 3]]).unwrap();
        assert!(check_pairwise(&game, &outcome).unwrap().stable());
        assert!(check_strict_pairwise(&game, &outcome).unwrap().stable());
    }

    #[test]
    fn joint_scan_guards_high_degrees() {
        // Fourteen players on a complete graph: degree 13 exceeds the
        // subset-scan cap.
        let game = make_table_game::<f64>(
            vec![0.0, 1.0],
            vec![vec![0.0, -1.0]; 14],
            vec![vec![0.1, 0.1], vec![0.1, 0.1]],
        )
        .unwrap();
        let grid = game.grid().unwrap().to_vec();
        let outcome = Outcome::new(
            Graph::complete(14).unwrap(),
            ActionProfile::on_grid(&grid, vec![0; 14]).unwrap(),
        )
        .unwrap();
        assert!(check_pairwise(&game, &outcome).unwrap().stable());
        assert!(matches!(
            check_pairwise_nash(&game, &outcome),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn continuous_games_without_a_solver_are_rejected() {
        use crate::model::{ActionDomain, GameSpec};
        use std::sync::Arc;
        let game = GameSpec::<f64>::separable(
            3,
            ActionDomain::ContinuousNonneg,
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 0.0),
        );
        let outcome = Outcome::new(
            Graph::empty(3).unwrap(),
            ActionProfile::continuous(vec![0.0; 3]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            check_pairwise(&game, &outcome),
            Err(Error::UnsupportedDomain(_))
        ));
        assert!(matches!(
            enumerate_stable(&game, Concept::Pairwise),
            Err(Error::UnsupportedDomain(_))
        ));
    }

    #[test]
    fn enumeration_guards_player_count() {
        let b: Vec<Ratio64> = (1..=8).map(Ratio64::int).collect();
        let lq = LqPeerGame::<f64>::from_ratios(&b, Ratio64::new(1, 2).unwrap()).unwrap();
        assert!(matches!(
            enumerate_stable(&lq.game_spec(), Concept::Pairwise),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn nonexistence_game_has_no_stable_outcome() {
        let game = make_nonexistence_example::<Rational>();
        for concept in [
            Concept::Pairwise,
            Concept::StrictPairwise,
            Concept::PairwiseNash,
        ] {
            assert!(enumerate_stable(&game, concept).unwrap().is_empty());
        }
    }

    #[test]
    fn enumeration_order_is_bitmask_ascending() {
        let lq = squadron(&[4, 4, 9, 9, 9]);
        let game = lq.game_spec();
        let outcomes = enumerate_stable(&game, Concept::Pairwise).unwrap();
        let bits: Vec<u128> = outcomes.iter().map(|o| o.graph().edge_bits()).collect();
        let mut sorted = bits.clone();
        sorted.sort_unstable();
        assert_eq!(bits, sorted);
        // Contains both the two-clique outcome and the complete graph.
        assert!(outcomes.iter().any(|o| o.graph().is_complete()));
        let two_clique = Graph::disjoint_cliques(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap();
        assert!(outcomes.iter().any(|o| o.graph() == &two_clique));
    }

    #[test]
    fn parallel_enumeration_matches_serial() {
        let lq = squadron(&[4, 4, 6, 9, 9]);
        let game = lq.game_spec();
        let serial = enumerate_stable(&game, Concept::Pairwise).unwrap();
        let parallel = enumerate_stable_with(&game, Concept::Pairwise, 4).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn parallel_enumeration_matches_serial_on_grid_games() {
        let game = make_table_game::<f64>(
            vec![0.0, 1.0, 2.0],
            vec![vec![0.0, 0.6, 0.2]; 4],
            vec![
                vec![0.4, -0.3, -0.9],
                vec![0.7, 0.5, -0.2],
                vec![0.9, 0.6, 0.3],
            ],
        )
        .unwrap();
        for concept in [Concept::Pairwise, Concept::StrictPairwise, Concept::PairwiseNash] {
            let serial = enumerate_stable(&game, concept).unwrap();
            let parallel = enumerate_stable_with(&game, concept, 3).unwrap();
            assert_eq!(serial, parallel);
        }
    }

    #[test]
    fn pns_implies_pairwise_on_lq_enumeration() {
        let lq = LqPeerGame::<Rational>::from_ratios(
            &[Ratio64::int(2), Ratio64::int(3), Ratio64::int(4)],
            Ratio64::new(4, 5).unwrap(),
        )
        .unwrap();
        let game = lq.game_spec();
        let pns = enumerate_stable(&game, Concept::PairwiseNash).unwrap();
        let pairwise = enumerate_stable(&game, Concept::Pairwise).unwrap();
        assert!(!pns.is_empty());
        for outcome in &pns {
            assert!(pairwise.contains(outcome));
        }
    }

    #[test]
    fn relabeling_equal_incentive_players_permutes_stable_set() {
        let lq = squadron(&[4, 4, 9, 9, 9]);
        let game = lq.game_spec();
        let outcomes = enumerate_stable(&game, Concept::Pairwise).unwrap();
        // Swap the two low players and rotate the three high players.
        let perm = [1usize, 0, 3, 4, 2];
        let relabeled: Vec<(u128, Vec<Rational>)> = outcomes
            .iter()
            .map(|o| {
                let g = o.graph().relabel(&perm).unwrap();
                let mut values = vec![Rational::from_int(0); 5];
                for (i, v) in o.profile().values().iter().enumerate() {
                    values[perm[i]] = v.clone();
                }
                (g.edge_bits(), values)
            })
            .collect();
        let original: Vec<(u128, Vec<Rational>)> = outcomes
            .iter()
            .map(|o| (o.graph().edge_bits(), o.profile().values().to_vec()))
            .collect();
        for item in &relabeled {
            assert!(original.contains(item));
        }
        assert_eq!(relabeled.len(), original.len());
    }

    #[test]
    fn joint_deviation_catches_multi_cut_gains() {
        // Triangle where every link pays 0.1 at the low action and the
        // high action is poisoned by links: no deviation of any kind.
        let game = make_table_game::<f64>(
            vec![0.0, 1.0],
            vec![vec![0.0, 0.0]; 3],
            vec![vec![0.1, 0.1], vec![-1.0, -1.0]],
        )
        .unwrap();
        let grid = game.grid().unwrap().to_vec();
        let outcome = Outcome::new(
            Graph::complete(3).unwrap(),
            ActionProfile::on_grid(&grid, vec![0, 0, 0]).unwrap(),
        )
        .unwrap();
        assert!(check_pairwise_nash(&game, &outcome).unwrap().stable());

        // Make the high action privately dominant but poisoned by links:
        // the profitable deviation for the degree-one player is to cut her
        // single link and switch up, which neither the action bullet nor
        // the single-cut bullet catches on its own.
        let game = make_table_game::<f64>(
            vec![0.0, 1.0],
            vec![vec![0.0, 0.5]; 3],
            vec![vec![0.3, 0.3], vec![-1.0, -1.0]],
        )
        .unwrap();
        let outcome = Outcome::new(
            Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap(),
            ActionProfile::on_grid(&grid, vec![0, 0, 0]).unwrap(),
        )
        .unwrap();
        let report = check_pairwise_nash(&game, &outcome).unwrap();
        let joint = report.witnesses().iter().find_map(|w| match w {
            Deviation::Joint {
                player,
                action,
                cut,
            } => Some((*player, *action, cut.clone())),
            _ => None,
        });
        // Keeping both links at action 0 yields 0.6 for the center, so only
        // the leaves gain: 0.5 alone beats 0.3 linked.
        assert_eq!(joint, Some((1, 1.0, vec![0])));
    }
}
