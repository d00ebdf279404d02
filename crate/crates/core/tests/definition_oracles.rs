//! Cross-checks of the stability checkers and enumeration against
//! independent brute-force unrollings of the definitions, plus the ordinal
//! properties of single-crossing games on random outcomes.

use endnet_core::equilibrium::finite_nash;
use endnet_core::games::make_table_game;
use endnet_core::graph::{all_graphs, pair_count, Graph};
use endnet_core::model::{ActionProfile, GameSpec, Outcome};
use endnet_core::sampling::staircase_table_game;
use endnet_core::stability::{check, enumerate_stable, Concept, Deviation};
use endnet_core::structure::{
    check_alignment, check_consistency, derive_orders, ActionLink, OrderRelation, SpilloverSign,
    TaxonomyCell,
};
use endnet_core::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MARGIN: f64 = 1e-9;

fn u(game: &GameSpec<f64>, graph: &Graph, profile: &ActionProfile<f64>, i: usize) -> f64 {
    game.payoff(graph, profile, i)
}

/// Direct three-bullet unrolling over raw payoffs; no marginal-value
/// helpers involved.
fn brute_stable(game: &GameSpec<f64>, outcome: &Outcome<f64>, concept: Concept) -> bool {
    let graph = *outcome.graph();
    let profile = outcome.profile();
    let grid = game.grid().unwrap().to_vec();
    let n = game.n();

    // Nash in actions given the graph.
    for i in 0..n {
        let here = u(game, &graph, profile, i);
        for x in 0..grid.len() {
            let trial = profile.with_index(&grid, i, x);
            if u(game, &graph, &trial, i) > here + MARGIN {
                return false;
            }
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            if graph.has_edge(i, j) {
                let cut = graph.without_edge(i, j).unwrap();
                for &p in &[i, j] {
                    let gain = u(game, &cut, profile, p) - u(game, &graph, profile, p);
                    let violated = match concept {
                        Concept::StrictPairwise => gain >= -MARGIN,
                        _ => gain > MARGIN,
                    };
                    if violated {
                        return false;
                    }
                }
            } else {
                let joined = graph.with_edge(i, j).unwrap();
                let gain_i = u(game, &joined, profile, i) - u(game, &graph, profile, i);
                let gain_j = u(game, &joined, profile, j) - u(game, &graph, profile, j);
                let violated = match concept {
                    Concept::StrictPairwise => gain_i >= -MARGIN && gain_j >= -MARGIN,
                    _ => {
                        gain_i >= -MARGIN
                            && gain_j >= -MARGIN
                            && (gain_i > MARGIN || gain_j > MARGIN)
                    }
                };
                if violated {
                    return false;
                }
            }
        }
    }

    if concept == Concept::PairwiseNash {
        for i in 0..n {
            let here = u(game, &graph, profile, i);
            let neighbors: Vec<usize> = graph.neighbors(i).collect();
            for mask in 0u32..(1 << neighbors.len()) {
                let mut cut = graph;
                for (pos, &k) in neighbors.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        cut = cut.without_edge(i, k).unwrap();
                    }
                }
                for x in 0..grid.len() {
                    let trial = profile.with_index(&grid, i, x);
                    if u(game, &cut, &trial, i) > here + MARGIN {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn random_table_game(rng: &mut ChaCha8Rng, n: usize, k: usize) -> GameSpec<f64> {
    let grid: Vec<f64> = (0..k).map(|x| x as f64).collect();
    let v: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let g: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    make_table_game(grid, v, g).unwrap()
}

fn all_profiles(grid: &[f64], n: usize) -> Vec<ActionProfile<f64>> {
    let k = grid.len();
    let total = k.pow(n as u32);
    (0..total)
        .map(|code| {
            let indices: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
            ActionProfile::on_grid(grid, indices).unwrap()
        })
        .collect()
}

#[test]
fn checkers_agree_with_definition_unrolling() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..12 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(2..=3);
        let game = if round % 3 == 0 {
            let cell = TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Positive);
            staircase_table_game(&mut rng, n, k, cell).game_spec()
        } else {
            random_table_game(&mut rng, n, k)
        };
        let grid = game.grid().unwrap().to_vec();
        for graph in all_graphs(n).unwrap() {
            for profile in all_profiles(&grid, n) {
                let outcome = Outcome::new(graph, profile).unwrap();
                for concept in [
                    Concept::Pairwise,
                    Concept::StrictPairwise,
                    Concept::PairwiseNash,
                ] {
                    let report = check(&game, &outcome, concept).unwrap();
                    assert_eq!(
                        report.stable(),
                        brute_stable(&game, &outcome, concept),
                        "{concept:?} disagrees at {outcome:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn witnesses_replay_as_payoff_improvements() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..10 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(2..=3);
        let game = random_table_game(&mut rng, n, k);
        let grid = game.grid().unwrap().to_vec();
        for graph in all_graphs(n).unwrap() {
            for profile in all_profiles(&grid, n) {
                let outcome = Outcome::new(graph, profile.clone()).unwrap();
                for concept in [
                    Concept::Pairwise,
                    Concept::StrictPairwise,
                    Concept::PairwiseNash,
                ] {
                    let report = check(&game, &outcome, concept).unwrap();
                    for witness in report.witnesses() {
                        // Strict pairwise stability forbids even weak gains
                        // from cutting or joint addition, so its witnesses
                        // replay as weak improvements; everything else is
                        // strict.
                        let strict_concept = concept != Concept::StrictPairwise;
                        match witness {
                            Deviation::Action { player, action } => {
                                let trial = profile.with_value(*player, *action);
                                let gain = u(&game, &graph, &trial, *player)
                                    - u(&game, &graph, &profile, *player);
                                assert!(gain > MARGIN);
                            }
                            Deviation::CutLink { player, partner } => {
                                let cut = graph.without_edge(*player, *partner).unwrap();
                                let gain = u(&game, &cut, &profile, *player)
                                    - u(&game, &graph, &profile, *player);
                                if strict_concept {
                                    assert!(gain > MARGIN);
                                } else {
                                    assert!(gain >= -MARGIN);
                                }
                            }
                            Deviation::AddLink { i, j } => {
                                let joined = graph.with_edge(*i, *j).unwrap();
                                let gain_i = u(&game, &joined, &profile, *i)
                                    - u(&game, &graph, &profile, *i);
                                let gain_j = u(&game, &joined, &profile, *j)
                                    - u(&game, &graph, &profile, *j);
                                assert!(gain_i >= -MARGIN && gain_j >= -MARGIN);
                                if strict_concept {
                                    assert!(gain_i > MARGIN || gain_j > MARGIN);
                                }
                            }
                            Deviation::Joint {
                                player,
                                action,
                                cut,
                            } => {
                                let mut h = graph;
                                for &p in cut {
                                    h = h.without_edge(*player, p).unwrap();
                                }
                                let trial = profile.with_value(*player, *action);
                                let gain = u(&game, &h, &trial, *player)
                                    - u(&game, &graph, &profile, *player);
                                assert!(gain > MARGIN);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn enumeration_matches_definition_level_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..8 {
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(2..=3);
        let game = random_table_game(&mut rng, n, k);
        for concept in [
            Concept::Pairwise,
            Concept::StrictPairwise,
            Concept::PairwiseNash,
        ] {
            let enumerated = enumerate_stable(&game, concept).unwrap();
            let mut brute = Vec::new();
            for graph in all_graphs(n).unwrap() {
                for profile in finite_nash(&game, &graph).unwrap() {
                    let outcome = Outcome::new(graph, profile).unwrap();
                    if brute_stable(&game, &outcome, concept) {
                        brute.push(outcome);
                    }
                }
            }
            assert_eq!(enumerated, brute);
        }
    }
}

// For separable games the payoff-difference marginal must equal the link
// function at the two endpoint actions, whatever the graph.
#[test]
fn marginal_values_equal_link_function_on_separable_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(2..=4);
        let game = random_table_game(&mut rng, n, k);
        let grid = game.grid().unwrap().to_vec();
        for _round in 0..20 {
            let bits = rng.gen_range(0..(1u128 << pair_count(n)));
            let graph = Graph::from_edge_bits(n, bits).unwrap();
            let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let outcome =
                Outcome::new(graph, ActionProfile::on_grid(&grid, indices).unwrap()).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let by_difference =
                        endnet_core::model::marginal_link_value(&game, &outcome, i, j).unwrap();
                    let by_link = game
                        .link_value(outcome.profile().value(i), outcome.profile().value(j))
                        .unwrap();
                    assert!((by_difference - by_link).abs() <= 1e-12);
                }
            }
        }
    }
}

// At the exact ratio threshold the lower player strictly gains from the
// link while the upper is indifferent, so the closed-form verdict and the
// enumeration disagree by design; off the threshold they coincide.
#[test]
fn empty_graph_threshold_knife_edge() {
    use endnet_core::analytics::empty_graph_stable;
    use endnet_core::games::LqPeerGame;
    use endnet_core::Ratio64;
    use endnet_core::Rational;

    let on_edge: Vec<Rational> = [1, 2, 4, 8]
        .iter()
        .map(|&v| Rational::from_ratio(v, 1))
        .collect();
    let alpha = Rational::from_ratio(1, 1);
    assert!(
        empty_graph_stable(&on_edge, &alpha)
            .unwrap()
            .threshold
            .holds
    );
    let game = LqPeerGame::new(on_edge, alpha.clone()).unwrap().game_spec();
    let has_empty = enumerate_stable(&game, Concept::Pairwise)
        .unwrap()
        .iter()
        .any(|o| o.graph().is_empty_graph());
    assert!(
        !has_empty,
        "one-sided strict gain forms the link at the knife edge"
    );

    // Strictly past the threshold both routes agree.
    let spread = LqPeerGame::<Rational>::from_ratios(
        &[Ratio64::int(1), Ratio64::int(3), Ratio64::int(9)],
        Ratio64::int(1),
    )
    .unwrap();
    assert!(
        empty_graph_stable(spread.b(), spread.alpha())
            .unwrap()
            .threshold
            .holds
    );
    assert!(enumerate_stable(&spread.game_spec(), Concept::Pairwise)
        .unwrap()
        .iter()
        .any(|o| o.graph().is_empty_graph()));
}

#[test]
fn single_crossing_games_are_consistent_aligned_and_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let cells = [
        (
            TaxonomyCell::new(ActionLink::Complements, SpilloverSign::Positive),
            OrderRelation::Identical,
        ),
        (
            TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Negative),
            OrderRelation::Identical,
        ),
        (
            TaxonomyCell::new(ActionLink::Complements, SpilloverSign::Negative),
            OrderRelation::Opposed,
        ),
        (
            TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Positive),
            OrderRelation::Opposed,
        ),
    ];
    for (cell, expected_relation) in cells {
        for _ in 0..30 {
            let n = rng.gen_range(4..=5);
            let k = rng.gen_range(2..=4);
            let game = staircase_table_game(&mut rng, n, k, cell).game_spec();
            let grid = game.grid().unwrap().to_vec();
            let bits = rng.gen_range(0..(1u128 << pair_count(n)));
            let graph = Graph::from_edge_bits(n, bits).unwrap();
            let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let all_tied = indices.iter().all(|&x| x == indices[0]);
            let outcome = Outcome::new(
                graph,
                ActionProfile::on_grid(&grid, indices.clone()).unwrap(),
            )
            .unwrap();

            assert!(check_consistency(&game, &outcome).unwrap().is_none());
            assert!(check_alignment(&game, &outcome).unwrap().is_none());

            let orders = derive_orders(&game, &outcome).unwrap();
            if !all_tied {
                assert_eq!(orders.relation(), expected_relation, "cell {cell:?}");
            }

            // The defining implications, re-checked from raw marginals.
            let d = |a: usize, b: usize| {
                endnet_core::model::marginal_link_value(&game, &outcome, a, b).unwrap()
            };
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        if i == j || i == l || j == l {
                            continue;
                        }
                        if orders.in_ranks()[l] >= orders.in_ranks()[j] {
                            if d(i, j).gt_zero() {
                                assert!(d(i, l).gt_zero());
                            }
                            if d(i, j).ge_zero() {
                                assert!(d(i, l).ge_zero());
                            }
                        }
                        if orders.out_ranks()[l] >= orders.out_ranks()[j] {
                            if d(j, i).gt_zero() {
                                assert!(d(l, i).gt_zero());
                            }
                            if d(j, i).ge_zero() {
                                assert!(d(l, i).ge_zero());
                            }
                        }
                    }
                }
            }
        }
    }
}
