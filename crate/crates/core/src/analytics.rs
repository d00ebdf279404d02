//! Closed-form threshold conditions for the linear-quadratic family,
//! status-game fragmentation quantities, and the natural-cliques
//! construction for group matching.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::games::GroupMatchGame;
use crate::graph::Graph;
use crate::scalar::Scalar;

/// One evaluated inequality: the verdict holds exactly when the comparison
/// between the two sides comes out as the condition specifies.
#[derive(Clone, Debug)]
pub struct ThresholdReport<T> {
    pub condition: &'static str,
    pub left: T,
    pub right: T,
    pub holds: bool,
}

/// Empty-graph stability condition for a linear-quadratic game.
#[derive(Clone, Debug)]
pub struct EmptyGraphReport<T> {
    pub threshold: ThresholdReport<T>,
    /// All private incentives distinct.
    pub all_b_distinct: bool,
}

impl<T> EmptyGraphReport<T> {
    /// Below some spillover floor no nonempty graph is stable; the floor
    /// strictly exceeds one half exactly when the incentives are distinct.
    pub fn alpha_floor_exceeds_half(&self) -> bool {
        self.all_b_distinct
    }
}

fn check_lq_args<T: Scalar>(b: &[T], alpha: &T) -> Result<()> {
    if b.is_empty() {
        return Err(Error::InvalidParameter("b must be nonempty".into()));
    }
    if b.iter().any(|v| !v.gt_zero()) {
        return Err(Error::InvalidParameter(
            "private incentives must be positive".into(),
        ));
    }
    if b.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("b must be sorted ascending".into()));
    }
    if !alpha.ge_zero() || !(T::one() - alpha.clone()).ge_zero() {
        return Err(Error::InvalidParameter("alpha outside [0,1]".into()));
    }
    Ok(())
}

/// The empty graph is part of a pairwise stable outcome exactly when every
/// adjacent incentive ratio `b_{i+1}/b_i` reaches `2 alpha`.
pub fn empty_graph_stable<T: Scalar>(b: &[T], alpha: &T) -> Result<EmptyGraphReport<T>> {
    check_lq_args(b, alpha)?;
    let two_alpha = T::from_int(2) * alpha.clone();
    let mut min_ratio: Option<T> = None;
    let mut holds = true;
    for w in b.windows(2) {
        let ratio = w[1].clone() / w[0].clone();
        // Compare in multiplied form to stay exact for rational scalars.
        holds &= w[1].at_least(&(two_alpha.clone() * w[0].clone()));
        min_ratio = match min_ratio {
            Some(m) if m <= ratio => Some(m),
            _ => Some(ratio),
        };
    }
    let all_b_distinct = b.windows(2).all(|w| w[0] != w[1]);
    Ok(EmptyGraphReport {
        threshold: ThresholdReport {
            condition: "empty-graph-stable",
            left: min_ratio.unwrap_or_else(|| two_alpha.clone()),
            right: two_alpha,
            holds,
        },
        all_b_distinct,
    })
}

/// The three complete-graph conditions: sufficient existence, sufficient
/// uniqueness, and impossibility. All are evaluated in cross-multiplied
/// form so they stay exact under rational arithmetic.
#[derive(Clone, Debug)]
pub struct CompleteGraphReports<T> {
    /// `b_n (1-a)(2a+n) <= b_1 a (1+n)`: the complete graph is part of a
    /// pairwise stable outcome.
    pub exists: ThresholdReport<T>,
    /// `b_n (a + (1-a)(n-1)) < 2 a b_1`: the pairwise stable outcome is
    /// unique and complete.
    pub unique: ThresholdReport<T>,
    /// `b_n (2a^2 + n(1-2a^2)) > b_1 a (4a - 1 + 2n(1-a))`: the complete
    /// graph is part of no pairwise stable outcome.
    pub impossible: ThresholdReport<T>,
}

pub fn complete_graph_conditions<T: Scalar>(b: &[T], alpha: &T) -> Result<CompleteGraphReports<T>> {
    check_lq_args(b, alpha)?;
    if b.len() < 2 {
        return Err(Error::InvalidParameter("need at least two players".into()));
    }
    let n = T::from_int(b.len() as i64);
    let one = T::one();
    let two = T::from_int(2);
    let b1 = b[0].clone();
    let bn = b[b.len() - 1].clone();
    let a = alpha.clone();

    let exists_left =
        bn.clone() * (one.clone() - a.clone()) * (two.clone() * a.clone() + n.clone());
    let exists_right = b1.clone() * a.clone() * (one.clone() + n.clone());
    let exists = ThresholdReport {
        condition: "complete-graph-exists",
        holds: exists_right.at_least(&exists_left),
        left: exists_left,
        right: exists_right,
    };

    let unique_left =
        bn.clone() * (a.clone() + (one.clone() - a.clone()) * (n.clone() - one.clone()));
    let unique_right = two.clone() * a.clone() * b1.clone();
    let unique = ThresholdReport {
        condition: "complete-graph-unique",
        holds: unique_right.exceeds(&unique_left),
        left: unique_left,
        right: unique_right,
    };

    let two_a_sq = two.clone() * a.sq();
    let impossible_left = bn * (two_a_sq.clone() + n.clone() * (one.clone() - two_a_sq));
    let impossible_right =
        b1 * a.clone() * (T::from_int(4) * a.clone() - one.clone() + two * n * (one - a));
    let impossible = ThresholdReport {
        condition: "complete-graph-impossible",
        holds: impossible_left.exceeds(&impossible_right),
        left: impossible_left,
        right: impossible_right,
    };

    Ok(CompleteGraphReports {
        exists,
        unique,
        impossible,
    })
}

/// Smallest integer `c` with `c delta^2 >= 1`: the minimum size gap between
/// distinct cliques in a stable status-game outcome.
pub fn status_cstar<T: Scalar>(delta: &T) -> Result<u64> {
    if !delta.gt_zero() {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let dsq = delta.sq();
    // Start near 1/delta^2 and walk to the exact threshold.
    let mut c = (1.0 / dsq.approx()).floor().max(1.0) as u64;
    c = c.saturating_sub(2).max(1);
    while !(T::from_int(c as i64) * dsq.clone()).at_least(&T::one()) {
        c += 1;
        if c > 1 << 40 {
            return Err(Error::Numeric("status gap search diverged".into()));
        }
    }
    // Interval identity: delta in [1/sqrt(c), 1/sqrt(c-1)).
    debug_assert!((T::from_int(c as i64) * dsq.clone()).at_least(&T::one()));
    debug_assert!(c == 1 || !(T::from_int(c as i64 - 1) * dsq).at_least(&T::one()));
    Ok(c)
}

/// Largest number of cliques a stable status-game outcome can sustain when
/// separate cliques need only differ by one member (`delta >= 1`): the
/// largest `k` with `k(k+1)/2 <= n`.
pub fn status_max_cliques<T: Scalar>(n: usize, delta: &T) -> Result<usize> {
    if !delta.at_least(&T::one()) {
        return Err(Error::PreconditionFailed(
            "clique counting applies for delta >= 1".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one player".into()));
    }
    let mut k = 1usize;
    while (k + 1) * (k + 2) / 2 <= n {
        k += 1;
    }
    Ok(k)
}

/// A partition of the game's type ids into blocks whose privately optimal
/// actions make within-block links weakly attractive and cross-block links
/// jointly unattractive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalCliques {
    pub blocks: Vec<Vec<usize>>,
}

impl NaturalCliques {
    /// Disjoint-clique graph on the game's players induced by the blocks.
    pub fn player_graph(&self, types: &[usize]) -> Result<Graph> {
        let blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|block| {
                (0..types.len())
                    .filter(|&p| block.contains(&types[p]))
                    .collect()
            })
            .collect();
        Graph::disjoint_cliques(types.len(), &blocks)
    }
}

/// Number of conformity samples drawn per player.
const CONFORMITY_SAMPLES: usize = 200;

/// Types cap for the exhaustive partition search.
const MAX_TYPES: usize = 6;

/// Searches for natural cliques: the first satisfying partition of the type
/// set in canonical order, or `None`. Also verifies by sampling that best
/// responses stay between the private optimum and the neighbors' actions
/// (weak preference for conformity); a sampled violation is an error.
pub fn natural_cliques<T: Scalar>(game: &GroupMatchGame<T>) -> Result<Option<NaturalCliques>> {
    verify_conformity(game)?;
    let type_ids = game.type_ids().to_vec();
    if type_ids.len() > MAX_TYPES {
        return Err(Error::SizeGuard(format!(
            "partition search capped at {MAX_TYPES} types, got {}",
            type_ids.len()
        )));
    }
    let optima: Vec<T> = type_ids.iter().map(|&t| game.private_optimum(t)).collect();

    let satisfies = |blocks: &[Vec<usize>]| -> bool {
        // Within blocks every ordered pair (including a type with itself)
        // is weakly attractive.
        for block in blocks {
            for &a in block {
                for &b in block {
                    if game.link_value(&optima[a], &optima[b]).lt_zero() {
                        return false;
                    }
                }
            }
        }
        // Across blocks, at least one side weakly loses and one strictly.
        for (x, block_a) in blocks.iter().enumerate() {
            for block_b in blocks.iter().skip(x + 1) {
                for &a in block_a {
                    for &b in block_b {
                        let ab = game.link_value(&optima[a], &optima[b]);
                        let ba = game.link_value(&optima[b], &optima[a]);
                        if !(ab.le_zero() || ba.le_zero()) {
                            return false;
                        }
                        if !(ab.lt_zero() || ba.lt_zero()) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    };

    let mut assignment = vec![0usize; type_ids.len()];
    let found = search_partitions(&mut assignment, 1, &satisfies);
    Ok(found.map(|assignment| {
        let block_count = assignment.iter().copied().max().unwrap_or(0) + 1;
        let blocks = (0..block_count)
            .map(|b| {
                assignment
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| a == b)
                    .map(|(ix, _)| type_ids[ix])
                    .collect()
            })
            .collect();
        NaturalCliques { blocks }
    }))
}

/// Restricted-growth enumeration of set partitions in canonical order. The
/// predicate sees blocks of type indices.
fn search_partitions(
    assignment: &mut Vec<usize>,
    fixed: usize,
    satisfies: &dyn Fn(&[Vec<usize>]) -> bool,
) -> Option<Vec<usize>> {
    if fixed == assignment.len() {
        let block_count = assignment.iter().copied().max().unwrap_or(0) + 1;
        let blocks: Vec<Vec<usize>> = (0..block_count)
            .map(|b| {
                assignment
                    .iter()
                    .enumerate()
                    .filter(|&(_, &a)| a == b)
                    .map(|(ix, _)| ix)
                    .collect()
            })
            .collect();
        return satisfies(&blocks).then(|| assignment.clone());
    }
    let cap = assignment[..fixed].iter().copied().max().unwrap_or(0) + 1;
    for block in 0..=cap {
        assignment[fixed] = block;
        if let Some(hit) = search_partitions(assignment, fixed + 1, satisfies) {
            return Some(hit);
        }
    }
    assignment[fixed] = 0;
    None
}

/// Samples random neighborhoods and partner profiles per player, checking
/// that the grid best response stays within the hull of the private optimum
/// and the neighbors' actions (up to one probe step).
fn verify_conformity<T: Scalar>(game: &GroupMatchGame<T>) -> Result<()> {
    let n = game.n();
    if n < 2 {
        return Ok(());
    }
    let probe = game.probe_grid();
    let step = probe[1].clone() - probe[0].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0f0);
    for i in 0..n {
        let t_i = game.types()[i];
        let private = game.private_optimum(t_i);
        for _ in 0..CONFORMITY_SAMPLES {
            let mut neighbors = Vec::new();
            for j in 0..n {
                if j != i && rng.gen_bool(0.5) {
                    neighbors.push(j);
                }
            }
            let partner_actions: Vec<T> = neighbors
                .iter()
                .map(|_| probe[rng.gen_range(0..probe.len())].clone())
                .collect();
            // Best response on the probe grid.
            let mut best = probe[0].clone();
            let mut best_val: Option<T> = None;
            for x in &probe {
                let mut u = game.idiosyncratic(x, t_i);
                for s_j in &partner_actions {
                    u = u + game.link_value(x, s_j);
                }
                if best_val.as_ref().is_none_or(|b| u > *b) {
                    best_val = Some(u);
                    best = x.clone();
                }
            }
            let mut lo = private.clone();
            let mut hi = private.clone();
            for s_j in &partner_actions {
                if *s_j < lo {
                    lo = s_j.clone();
                }
                if *s_j > hi {
                    hi = s_j.clone();
                }
            }
            if best < lo.clone() - step.clone() || best > hi.clone() + step.clone() {
                return Err(Error::ConformityViolated(format!(
                    "player {i} best response {best} falls outside [{lo}, {hi}]"
                )));
            }
        }
    }
    Ok(())
}
