//! Acceptance suite: every headline result the library must reproduce, one
//! test per criterion, each ending in a printed pass line. Exact-arithmetic
//! criteria run over `Rational`; sampling suites run over `f64`.

use std::time::{Duration, Instant};

use endnet_core::analytics::{
    complete_graph_conditions, empty_graph_stable, natural_cliques, status_cstar,
    status_max_cliques,
};
use endnet_core::dynamics::{
    epsilon_pns_check, outcome_leq, simulate_revision, tarski_extremes, uncoordinated_outcomes,
    RevisionConfig,
};
use endnet_core::equilibrium::{clique_actions, extremal_nash, lq_nash_on_graph, Extremum};
use endnet_core::games::{
    make_nonexistence_example, make_table_game, GroupMatchGame, LqPeerGame, StatusGame,
};
use endnet_core::graph::{all_graphs, pair_count, Graph};
use endnet_core::model::{ActionProfile, LinkFn, Outcome};
use endnet_core::sampling::{random_lq_instance, staircase_table_game, supermodular_table_game};
use endnet_core::stability::{check_pairwise, check_pairwise_nash, enumerate_stable, Concept};
use endnet_core::structure::{verify_stable_structure, ActionLink, SpilloverSign, TaxonomyCell};
use endnet_core::{Ratio64, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn rq(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn lq_exact(b: &[i64], alpha: Ratio64) -> LqPeerGame<Rational> {
    LqPeerGame::from_ratios(
        &b.iter().map(|&v| Ratio64::int(v)).collect::<Vec<_>>(),
        alpha,
    )
    .unwrap()
}

#[test]
fn criterion_01_squadron_reproduction_exact() {
    let t0 = Instant::now();

    let expect_complete: [(&[i64], [Rational; 5]); 2] = [
        (
            &[4, 4, 6, 6, 9],
            [rq(11, 2), rq(11, 2), rq(35, 6), rq(35, 6), rq(19, 3)],
        ),
        (
            &[4, 4, 6, 9, 9],
            [rq(6, 1), rq(6, 1), rq(19, 3), rq(41, 6), rq(41, 6)],
        ),
    ];
    for (b, expected) in expect_complete {
        let game = lq_exact(b, Ratio64::int(1)).game_spec();
        let outcomes = enumerate_stable(&game, Concept::Pairwise).unwrap();
        assert_eq!(
            outcomes.len(),
            1,
            "mix {b:?} must have a unique stable outcome"
        );
        assert!(outcomes[0].graph().is_complete());
        assert_eq!(outcomes[0].profile().values(), expected.as_slice());
    }

    let third = lq_exact(&[4, 4, 9, 9, 9], Ratio64::int(1));
    let outcomes = enumerate_stable(&third.game_spec(), Concept::Pairwise).unwrap();
    let complete = outcomes
        .iter()
        .find(|o| o.graph().is_complete())
        .expect("complete graph stays stable in the spread mix");
    assert_eq!(
        complete.profile().values(),
        &[rq(13, 2), rq(13, 2), rq(22, 3), rq(22, 3), rq(22, 3)]
    );
    let two_clique = Graph::disjoint_cliques(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap();
    let split = outcomes
        .iter()
        .find(|o| o.graph() == &two_clique)
        .expect("segregated cliques are stable in the spread mix");
    assert_eq!(
        split.profile().values(),
        &[rq(4, 1), rq(4, 1), rq(9, 1), rq(9, 1), rq(9, 1)]
    );

    let uncoordinated = uncoordinated_outcomes(&third).unwrap();
    assert_eq!(uncoordinated.len(), 1);
    assert_eq!(&uncoordinated[0], split);

    // Welfare comparison across the two stable outcomes goes by
    // (1 + degree) * action^2 at best responses.
    let spec = third.game_spec();
    let u_complete = endnet_core::model::payoff_vector(&spec, complete);
    let u_split = endnet_core::model::payoff_vector(&spec, split);
    for i in 0..5 {
        let score = |o: &Outcome<Rational>| {
            rq(1 + o.graph().degree(i) as i64, 1) * o.profile().value(i).clone().pow(2)
        };
        assert_eq!(
            u_complete[i] > u_split[i],
            score(complete) > score(split),
            "player {i}"
        );
        assert_eq!(u_complete[i], score(complete).half());
        assert_eq!(u_split[i], score(split).half());
    }

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:.2?}");
    println!("PASS criterion 1: exact reproduction of the three peer-group mixes ({elapsed:.2?})");
}

#[test]
fn criterion_02_nonexistence() {
    let t0 = Instant::now();

    let exact = make_nonexistence_example::<Rational>();
    for concept in [
        Concept::Pairwise,
        Concept::StrictPairwise,
        Concept::PairwiseNash,
    ] {
        assert!(enumerate_stable(&exact, concept).unwrap().is_empty());
    }

    let game = make_nonexistence_example::<f64>();
    let grid = game.grid().unwrap().to_vec();
    let start = Outcome::new(
        Graph::empty(2).unwrap(),
        ActionProfile::on_grid(&grid, vec![0, 0]).unwrap(),
    )
    .unwrap();
    for seed in 0..20 {
        let cfg = RevisionConfig {
            lambda: 1.0,
            max_events: 10_000,
            seed,
            discount: 0.9,
        };
        let trace = simulate_revision(&game, &start, &cfg).unwrap();
        assert!(
            trace.absorbed.is_none(),
            "seed {seed} absorbed unexpectedly"
        );
        assert_eq!(trace.events.len(), 10_000);
    }

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:.2?}");
    println!("PASS criterion 2: no stable outcome, and revisions never absorb ({elapsed:.2?})");
}

#[test]
fn criterion_03_structure_taxonomy() {
    let t0 = Instant::now();
    let cells = [
        TaxonomyCell::new(ActionLink::Complements, SpilloverSign::Positive),
        TaxonomyCell::new(ActionLink::Complements, SpilloverSign::Negative),
        TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Positive),
        TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Negative),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8833);
    let mut outcomes_checked = 0usize;
    for cell in cells {
        for _ in 0..200 {
            let n = rng.gen_range(3..=5);
            let k = rng.gen_range(2..=4);
            let game = staircase_table_game(&mut rng, n, k, cell).game_spec();
            for outcome in enumerate_stable(&game, Concept::StrictPairwise).unwrap() {
                let report = verify_stable_structure(&game, &outcome).unwrap();
                assert!(
                    report.passed(),
                    "cell {cell:?}: failed checks {:?} at {outcome:?}",
                    report.checks
                );
                outcomes_checked += 1;
            }
        }
    }
    assert!(
        outcomes_checked > 500,
        "only {outcomes_checked} stable outcomes sampled"
    );

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:.2?}");
    println!(
        "PASS criterion 3: structure dichotomy on {outcomes_checked} strictly stable outcomes \
         across 800 games ({elapsed:.2?})"
    );
}

#[test]
fn criterion_04_empty_graph_biconditional() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4455);
    let mut done = 0usize;
    while done < 100 {
        let n = rng.gen_range(2..=5);
        let (b, alpha) = random_lq_instance(&mut rng, n);
        let b_t: Vec<Rational> = b.iter().map(Ratio64::to_scalar).collect();
        let alpha_t: Rational = alpha.to_scalar();
        // Stay off the knife edge where the formula's weak inequality and
        // the one-sided strict gain disagree.
        let knife = b_t
            .windows(2)
            .any(|w| w[1] == rq(2, 1) * alpha_t.clone() * w[0].clone());
        if knife {
            continue;
        }
        let verdict = empty_graph_stable(&b_t, &alpha_t).unwrap().threshold.holds;
        let game = LqPeerGame::new(b_t, alpha_t).unwrap().game_spec();
        let has_empty = enumerate_stable(&game, Concept::Pairwise)
            .unwrap()
            .iter()
            .any(|o| o.graph().is_empty_graph());
        assert_eq!(verdict, has_empty, "b={b:?} alpha={alpha:?}");
        done += 1;
    }

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:.2?}");
    println!(
        "PASS criterion 4: empty-graph condition matches enumeration on 100 draws ({elapsed:.2?})"
    );
}

#[test]
fn criterion_05_complete_graph_sufficiency() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5566);

    let mut draw = |alpha_lo: i64| -> (Vec<Rational>, Rational) {
        let n = rng.gen_range(2..=5);
        let (b, _) = random_lq_instance(&mut rng, n);
        let alpha = Ratio64::new(rng.gen_range(alpha_lo..=24), 24).unwrap();
        (
            b.iter().map(Ratio64::to_scalar).collect(),
            alpha.to_scalar(),
        )
    };

    // Sufficient existence.
    let mut found = 0usize;
    while found < 50 {
        let (b, alpha) = draw(12);
        let reports = complete_graph_conditions(&b, &alpha).unwrap();
        if !reports.exists.holds {
            continue;
        }
        let game = LqPeerGame::new(b, alpha).unwrap().game_spec();
        let outcomes = enumerate_stable(&game, Concept::Pairwise).unwrap();
        assert!(
            outcomes.iter().any(|o| o.graph().is_complete()),
            "existence condition held but no complete outcome"
        );
        found += 1;
    }

    // Sufficient uniqueness.
    let mut found = 0usize;
    while found < 50 {
        let (b, alpha) = draw(20);
        let reports = complete_graph_conditions(&b, &alpha).unwrap();
        if !reports.unique.holds {
            continue;
        }
        let game = LqPeerGame::new(b, alpha).unwrap().game_spec();
        let outcomes = enumerate_stable(&game, Concept::Pairwise).unwrap();
        assert_eq!(
            outcomes.len(),
            1,
            "uniqueness condition held but stable set is not a singleton"
        );
        assert!(outcomes[0].graph().is_complete());
        found += 1;
    }

    // Impossibility.
    let mut found = 0usize;
    while found < 20 {
        let (b, alpha) = draw(1);
        let reports = complete_graph_conditions(&b, &alpha).unwrap();
        if !reports.impossible.holds {
            continue;
        }
        let game = LqPeerGame::new(b, alpha).unwrap().game_spec();
        let outcomes = enumerate_stable(&game, Concept::Pairwise).unwrap();
        assert!(
            outcomes.iter().all(|o| !o.graph().is_complete()),
            "impossibility condition held but a complete outcome exists"
        );
        found += 1;
    }

    let elapsed = t0.elapsed();
    println!(
        "PASS criterion 5: complete-graph conditions verified on 120 instances ({elapsed:.2?})"
    );
}

/// All set partitions of `0..n` via restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn recurse(assignment: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>, n: usize) {
        if assignment.len() == n {
            let blocks = assignment.iter().copied().max().unwrap() + 1;
            out.push(
                (0..blocks)
                    .map(|b| {
                        assignment
                            .iter()
                            .enumerate()
                            .filter(|&(_, &a)| a == b)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect(),
            );
            return;
        }
        let cap = assignment.iter().copied().max().map_or(0, |m| m + 1);
        for block in 0..=cap {
            assignment.push(block);
            recurse(assignment, out, n);
            assignment.pop();
        }
    }
    let mut out = Vec::new();
    recurse(&mut vec![0], &mut out, n);
    out
}

#[test]
fn criterion_06_status_game() {
    let t0 = Instant::now();
    let delta = Ratio64::new(1, 2).unwrap();
    let status = StatusGame::<Rational>::new(5, Ratio64::int(1), delta).unwrap();
    let game = status.game_spec();

    // Premise: delta below the fragmentation threshold for five players.
    assert!(rq(1, 4) < rq(1, 3)); // delta^2 < 1/(n-2)

    let partitions = set_partitions(5);
    assert_eq!(partitions.len(), 52);
    for blocks in &partitions {
        let outcome = status.max_equilibrium(blocks).unwrap();
        // Clique actions are exactly b + (k-1) delta.
        for block in blocks {
            let level = rq(1, 1) + rq(block.len() as i64 - 1, 2);
            for &p in block {
                assert_eq!(outcome.profile().value(p), &level);
            }
        }
        let stable = check_pairwise(&game, &outcome).unwrap().stable();
        assert_eq!(
            stable,
            blocks.len() == 1,
            "partition {blocks:?} should be stable iff it is the complete graph"
        );
    }

    // The grid maximum equilibrium on the complete graph is the closed form.
    let top = extremal_nash(&game, &Graph::complete(5).unwrap(), Extremum::Max).unwrap();
    assert!(top.values().iter().all(|v| *v == rq(3, 1)));

    // Size-gap threshold interval identity on 1000 draws.
    let mut rng = ChaCha8Rng::seed_from_u64(6677);
    for _ in 0..1000 {
        let d: f64 = rng.gen_range(0.02..3.0);
        let c = status_cstar(&d).unwrap();
        assert!(d * d * c as f64 >= 1.0 - 1e-9);
        if c > 1 {
            assert!(((c - 1) as f64) * d * d < 1.0 + 1e-9);
        }
    }
    assert_eq!(status_cstar(&rq(1, 2)).unwrap(), 4);
    assert_eq!(status_max_cliques(10, &1.0f64).unwrap(), 4);

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:.2?}");
    println!("PASS criterion 6: status-game fragmentation facts ({elapsed:.2?})");
}

#[test]
fn criterion_07_clique_formula_crosscheck() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7788);
    for _ in 0..100 {
        let size = rng.gen_range(1..=7);
        let (b, alpha) = random_lq_instance(&mut rng, size);

        // Exact agreement in rational arithmetic.
        let b_q: Vec<Rational> = b.iter().map(Ratio64::to_scalar).collect();
        let alpha_q: Rational = alpha.to_scalar();
        let direct = clique_actions(&b_q, &alpha_q).unwrap();
        let game = LqPeerGame::new(b_q, alpha_q).unwrap();
        let solved = lq_nash_on_graph(&game, &Graph::complete(size).unwrap()).unwrap();
        assert_eq!(direct.as_slice(), solved.values());

        // Floating agreement within 1e-10.
        let b_f: Vec<f64> = b.iter().map(Ratio64::to_scalar).collect();
        let alpha_f: f64 = alpha.to_scalar();
        let direct = clique_actions(&b_f, &alpha_f).unwrap();
        let game = LqPeerGame::new(b_f, alpha_f).unwrap();
        let solved = lq_nash_on_graph(&game, &Graph::complete(size).unwrap()).unwrap();
        for (x, y) in direct.iter().zip(solved.values()) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
    let elapsed = t0.elapsed();
    println!("PASS criterion 7: clique closed form matches the linear solve on 100 draws ({elapsed:.2?})");
}

#[test]
fn criterion_08_lattice_extremes() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8899);
    for cell in [
        TaxonomyCell::new(ActionLink::Complements, SpilloverSign::Positive),
        TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Negative),
    ] {
        for _ in 0..30 {
            let n = rng.gen_range(2..=4);
            let k = rng.gen_range(2..=4);
            let game = supermodular_table_game(&mut rng, n, k, cell).game_spec();
            let extremes = tarski_extremes(&game, &cell).unwrap();
            assert!(check_pairwise(&game, &extremes.minimal).unwrap().stable());
            assert!(check_pairwise(&game, &extremes.maximal).unwrap().stable());
            let all = enumerate_stable(&game, Concept::Pairwise).unwrap();
            assert!(all.contains(&extremes.minimal));
            assert!(all.contains(&extremes.maximal));
            for outcome in &all {
                assert!(outcome_leq(&extremes.minimal, outcome, &cell));
                assert!(outcome_leq(outcome, &extremes.maximal, &cell));
            }
        }
    }
    let elapsed = t0.elapsed();
    println!("PASS criterion 8: lattice iteration reaches the stable-set extremes on 60 games ({elapsed:.2?})");
}

#[test]
fn criterion_09_deviation_game_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9900);
    for _ in 0..20 {
        let n = rng.gen_range(2..=3);
        let k: usize = rng.gen_range(2..=3);
        let grid: Vec<f64> = (0..k).map(|x| x as f64).collect();
        let v: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let g: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let game = make_table_game(grid.clone(), v, g).unwrap();
        for graph in all_graphs(n).unwrap() {
            let total = k.pow(n as u32);
            for code in 0..total {
                let indices: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
                let outcome =
                    Outcome::new(graph, ActionProfile::on_grid(&grid, indices).unwrap()).unwrap();
                assert_eq!(
                    epsilon_pns_check(&game, &outcome).unwrap(),
                    check_pairwise_nash(&game, &outcome).unwrap().stable(),
                    "disagreement at {outcome:?}"
                );
            }
        }
    }
    let elapsed = t0.elapsed();
    println!("PASS criterion 9: deviation game agrees with the joint checker on 20 games ({elapsed:.2?})");
}

#[test]
fn criterion_10_group_match_cliques() {
    let t0 = Instant::now();

    // Two types with separated private optima under full spillovers.
    let thetas = [4.0f64, 9.0];
    let v = Arc::new(move |x: &f64, t: usize| thetas[t] * x - x * x / 2.0);
    let g: LinkFn<f64> = Arc::new(|x: &f64, y: &f64| x * y - x * x / 2.0);
    let types = vec![0, 0, 1, 1, 1];
    let group = GroupMatchGame::new(types.clone(), v, g, (0.0, 12.0)).unwrap();

    let cliques = natural_cliques(&group)
        .unwrap()
        .expect("types split naturally");
    assert_eq!(cliques.blocks, vec![vec![0], vec![1]]);
    let graph = cliques.player_graph(&types).unwrap();
    assert_eq!(
        graph,
        Graph::disjoint_cliques(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap()
    );

    // Within-block equilibrium: same-type cliques sit at their private
    // optimum under full spillovers; verify through the clique closed form.
    for (theta, size) in [(4.0f64, 2usize), (9.0, 3)] {
        let actions = clique_actions(&vec![theta; size], &1.0).unwrap();
        assert!(actions.iter().all(|a| (a - theta).abs() < 1e-12));
    }

    // Stability of the partition outcome, checked on the exact action grid.
    let grid = vec![4.0f64, 9.0];
    let v_tables: Vec<Vec<f64>> = types
        .iter()
        .map(|&t| grid.iter().map(|x| thetas[t] * x - x * x / 2.0).collect())
        .collect();
    let g_table: Vec<Vec<f64>> = grid
        .iter()
        .map(|x| grid.iter().map(|y| x * y - x * x / 2.0).collect())
        .collect();
    let table_game = make_table_game(grid.clone(), v_tables, g_table).unwrap();
    let outcome = Outcome::new(
        graph,
        ActionProfile::on_grid(&grid, vec![0, 0, 1, 1, 1]).unwrap(),
    )
    .unwrap();
    let report = check_pairwise(&table_game, &outcome).unwrap();
    assert!(report.stable(), "witnesses: {:?}", report.witnesses());

    let elapsed = t0.elapsed();
    println!("PASS criterion 10: natural cliques form a stable partition outcome ({elapsed:.2?})");
}

#[test]
fn acceptance_reference_pair_counts() {
    // Sanity anchors used across the suite.
    assert_eq!(pair_count(5), 10);
    assert_eq!(all_graphs(5).unwrap().count(), 1024);
}
