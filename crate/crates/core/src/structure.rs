//! Structural classifiers for stable graphs: nested split graphs, ordered
//! overlapping cliques, the in/out orders on players derived from linking
//! incentives, and the two single-crossing families that place a separable
//! game in the two-by-two taxonomy.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{Graph, PlayerSet};
use crate::model::{marginal_link_value, GameSpec, Outcome};
use crate::scalar::Scalar;
use crate::stability::{check_strict_pairwise, StabilityReport};

/// Full permutation search for clique orders is capped at this many players.
pub const MAX_ORDER_SEARCH_PLAYERS: usize = 10;

// ---------------------------------------------------------------------------
// Nested split graphs
// ---------------------------------------------------------------------------

/// Verdict of the nested-split-graph test with a violating pair when false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsgCheck {
    pub is_nsg: bool,
    /// Pair `(i, j)` with `d_j >= d_i` but `G_i` not within `G_j + j`.
    pub violation: Option<(usize, usize)>,
}

/// A graph is a nested split graph when `d_j >= d_i` implies that i's
/// neighborhood is contained in j's closed neighborhood.
pub fn is_nested_split_graph(graph: &Graph) -> NsgCheck {
    let n = graph.n();
    for i in 0..n {
        for j in 0..n {
            if i == j || graph.degree(j) < graph.degree(i) {
                continue;
            }
            let allowed = graph.neighbor_set(j).with(j);
            if !graph.neighbor_set(i).is_subset_of(&allowed) {
                return NsgCheck {
                    is_nsg: false,
                    violation: Some((i, j)),
                };
            }
        }
    }
    NsgCheck {
        is_nsg: true,
        violation: None,
    }
}

/// Players grouped by degree: block 0 holds the isolated players (possibly
/// empty) and the remaining blocks carry strictly increasing degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreePartition {
    blocks: Vec<Vec<usize>>,
}

impl DegreePartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Blocks with nonzero degree, ascending.
    pub fn positive_blocks(&self) -> &[Vec<usize>] {
        &self.blocks[1..]
    }
}

pub fn degree_partition(graph: &Graph) -> DegreePartition {
    let n = graph.n();
    let mut by_degree: Vec<(usize, usize)> = (0..n).map(|i| (graph.degree(i), i)).collect();
    by_degree.sort_unstable();
    let mut blocks = vec![Vec::new()];
    let mut last_degree = 0usize;
    for (d, i) in by_degree {
        if d == 0 {
            blocks[0].push(i);
        } else if blocks.len() > 1 && d == last_degree {
            blocks.last_mut().unwrap().push(i);
        } else {
            blocks.push(vec![i]);
            last_degree = d;
        }
    }
    DegreePartition { blocks }
}

/// Alternative nested-split-graph characterization through the degree
/// partition: a player in the l-th positive block is adjacent to exactly
/// the union of the top l blocks, minus herself.
pub fn nsg_by_degree_partition(graph: &Graph) -> bool {
    let partition = degree_partition(graph);
    let positive = partition.positive_blocks();
    let k = positive.len();
    for (l, block) in positive.iter().enumerate() {
        // Union of the top (l + 1) blocks.
        let mut expected = PlayerSet::empty();
        for top in positive[k - l - 1..].iter() {
            for &p in top {
                expected = expected.with(p);
            }
        }
        for &i in block {
            let mut want = PlayerSet::empty();
            for p in expected.iter() {
                if p != i {
                    want = want.with(p);
                }
            }
            if graph.neighbor_set(i) != want {
                return false;
            }
        }
    }
    // Isolated players must really be isolated, which degree zero ensures.
    true
}

// ---------------------------------------------------------------------------
// Ordered overlapping cliques
// ---------------------------------------------------------------------------

/// Does the given player order make every closed neighborhood an interval
/// with weakly increasing endpoints?
pub fn is_overlapping_clique_order(graph: &Graph, order: &[usize]) -> bool {
    let n = graph.n();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (p, &player) in order.iter().enumerate() {
        if player >= n || pos[player] != usize::MAX {
            return false;
        }
        pos[player] = p;
    }
    let mut lo = vec![0usize; n];
    let mut hi = vec![0usize; n];
    for player in 0..n {
        let mut min_p = pos[player];
        let mut max_p = pos[player];
        let mut count = 1usize;
        for nb in graph.neighbors(player) {
            min_p = min_p.min(pos[nb]);
            max_p = max_p.max(pos[nb]);
            count += 1;
        }
        if max_p - min_p + 1 != count {
            return false; // not an interval
        }
        lo[pos[player]] = min_p;
        hi[pos[player]] = max_p;
    }
    for p in 1..n {
        if lo[p] < lo[p - 1] || hi[p] < hi[p - 1] {
            return false;
        }
    }
    true
}

/// Searches the linear extensions of a weak order (players of equal rank
/// may appear in any relative position) for one witnessing the overlapping
/// clique structure.
fn search_refining_order(graph: &Graph, ranks: &[usize]) -> Option<Vec<usize>> {
    let n = graph.n();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by_key(|&i| ranks[i]);
    for &i in &sorted {
        match classes.last_mut() {
            Some(class) if ranks[class[0]] == ranks[i] => class.push(i),
            _ => classes.push(vec![i]),
        }
    }
    let mut order = Vec::with_capacity(n);
    if extend_order(graph, &classes, 0, 0, &mut order) {
        Some(order)
    } else {
        None
    }
}

/// Backtracking permutation of each rank class in turn.
fn extend_order(
    graph: &Graph,
    classes: &[Vec<usize>],
    class_ix: usize,
    used: u16,
    order: &mut Vec<usize>,
) -> bool {
    if class_ix == classes.len() {
        return is_overlapping_clique_order(graph, order);
    }
    let class = &classes[class_ix];
    if used.count_ones() as usize == class.len() {
        return extend_order(graph, classes, class_ix + 1, 0, order);
    }
    for (pos, &p) in class.iter().enumerate() {
        if used & (1 << pos) != 0 {
            continue;
        }
        order.push(p);
        if extend_order(graph, classes, class_ix, used | (1 << pos), order) {
            return true;
        }
        order.pop();
    }
    false
}

/// An ordering under which the graph consists of ordered overlapping
/// cliques, or `None` when no ordering works. Cheap candidates (identity,
/// then players sorted by closed-neighborhood extremes) are tried before
/// the exhaustive permutation search.
pub fn find_overlapping_clique_order(graph: &Graph) -> Result<Option<Vec<usize>>> {
    let n = graph.n();
    let identity: Vec<usize> = (0..n).collect();
    if is_overlapping_clique_order(graph, &identity) {
        return Ok(Some(identity));
    }
    let mut by_extremes: Vec<usize> = (0..n).collect();
    by_extremes.sort_by_key(|&i| {
        let lo = graph.neighbors(i).min().unwrap_or(i).min(i);
        let hi = graph.neighbors(i).max().unwrap_or(i).max(i);
        (lo, hi, i)
    });
    if is_overlapping_clique_order(graph, &by_extremes) {
        return Ok(Some(by_extremes));
    }
    if n > MAX_ORDER_SEARCH_PLAYERS {
        return Err(Error::SizeGuard(format!(
            "exhaustive order search capped at {MAX_ORDER_SEARCH_PLAYERS} players, got {n}"
        )));
    }
    Ok(search_refining_order(graph, &vec![0; n]))
}

/// An overlapping-clique ordering that refines the given weak order (or its
/// reverse), when one exists.
pub fn clique_order_refining(graph: &Graph, ranks: &[usize]) -> Option<Vec<usize>> {
    if let Some(order) = search_refining_order(graph, ranks) {
        return Some(order);
    }
    let max = ranks.iter().copied().max().unwrap_or(0);
    let reversed: Vec<usize> = ranks.iter().map(|&r| max - r).collect();
    search_refining_order(graph, &reversed)
}

// ---------------------------------------------------------------------------
// Consistency, alignment, and the derived orders
// ---------------------------------------------------------------------------

/// Four players witnessing an ordinal violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrdinalWitness {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

/// `delta[i][j]` = marginal value of the link `ij` to player `i`; the
/// diagonal is unused.
fn delta_matrix<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>) -> Result<Vec<Vec<T>>> {
    let n = game.n();
    let mut delta = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                delta[i][j] = marginal_link_value(game, outcome, i, j)?;
            }
        }
    }
    Ok(delta)
}

/// Linking incentives are consistent at this outcome when no two players
/// disagree about the relative desirability of two partners: there is no
/// (i, j, k, l) with i wanting k but not l while j wants l but not k.
pub fn check_consistency<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<Option<OrdinalWitness>> {
    let delta = delta_matrix(game, outcome)?;
    Ok(consistency_witness(&delta))
}

fn consistency_witness<T: Scalar>(delta: &[Vec<T>]) -> Option<OrdinalWitness> {
    let n = delta.len();
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                for l in 0..n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    if delta[i][k].ge_zero()
                        && delta[i][l].lt_zero()
                        && delta[j][k].lt_zero()
                        && delta[j][l].ge_zero()
                    {
                        return Some(OrdinalWitness { i, j, k, l });
                    }
                }
            }
        }
    }
    None
}

/// Linking incentives are aligned at this outcome when, for any chain of
/// strictly nested desiring sets `S_i+ < S_j+ < S_k+` and any fourth
/// player l, player j's desire for l sits between i's and k's.
///
/// The inclusions are proper: players desired by exactly the same set are
/// not ranked against each other, which is what makes single-crossing link
/// values aligned at every outcome.
pub fn check_alignment<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<Option<OrdinalWitness>> {
    let delta = delta_matrix(game, outcome)?;
    Ok(alignment_witness(&delta))
}

fn alignment_witness<T: Scalar>(delta: &[Vec<T>]) -> Option<OrdinalWitness> {
    let n = delta.len();
    let desiring: Vec<PlayerSet> = (0..n)
        .map(|i| PlayerSet::from_players((0..n).filter(|&j| j != i && delta[j][i].ge_zero())))
        .collect();
    let proper = |a: &PlayerSet, b: &PlayerSet| a.is_subset_of(b) && a != b;
    for i in 0..n {
        for j in 0..n {
            if j == i || !proper(&desiring[i], &desiring[j]) {
                continue;
            }
            for k in 0..n {
                if k == i || k == j || !proper(&desiring[j], &desiring[k]) {
                    continue;
                }
                for l in 0..n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let strict_up =
                        delta[i][l].gt_zero() && delta[k][l].gt_zero() && !delta[j][l].gt_zero();
                    let weak_up =
                        delta[i][l].ge_zero() && delta[k][l].ge_zero() && !delta[j][l].ge_zero();
                    let down =
                        delta[i][l].lt_zero() && delta[k][l].lt_zero() && !delta[j][l].lt_zero();
                    if strict_up || weak_up || down {
                        return Some(OrdinalWitness { i, j, k, l });
                    }
                }
            }
        }
    }
    None
}

/// How the two derived orders relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderRelation {
    Identical,
    Opposed,
    Undetermined,
}

/// The weak orders ranking players by desirability as partners (`in`) and
/// eagerness to form links (`out`), with ties sharing ranks. Higher rank
/// means higher in the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderPair {
    in_ranks: Vec<usize>,
    out_ranks: Vec<usize>,
    relation: OrderRelation,
}

impl OrderPair {
    pub fn in_ranks(&self) -> &[usize] {
        &self.in_ranks
    }

    pub fn out_ranks(&self) -> &[usize] {
        &self.out_ranks
    }

    pub fn relation(&self) -> OrderRelation {
        self.relation
    }

    pub fn in_cmp(&self, i: usize, j: usize) -> Ordering {
        self.in_ranks[i].cmp(&self.in_ranks[j])
    }

    pub fn out_cmp(&self, i: usize, j: usize) -> Ordering {
        self.out_ranks[i].cmp(&self.out_ranks[j])
    }
}

/// Derives the in/out orders at an outcome.
///
/// Consistency and alignment are checked first and their witnesses are
/// returned as errors. For separable games with a classified cell the
/// orders follow the action order in the direction the cell dictates (a
/// choice that always satisfies the defining implications); otherwise the
/// relational construction is used: `i >=_in j` when every third player
/// who weakly wants j also wants i, and `i >=_out j` when i weakly wants
/// every third player j wants. Degenerate outcomes can make the raw
/// relations intransitive, which surfaces as a numeric error.
pub fn derive_orders<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>) -> Result<OrderPair> {
    let delta = delta_matrix(game, outcome)?;
    if let Some(w) = consistency_witness(&delta) {
        return Err(Error::NotConsistent {
            i: w.i,
            j: w.j,
            k: w.k,
            l: w.l,
        });
    }
    if let Some(w) = alignment_witness(&delta) {
        return Err(Error::NotAligned {
            i: w.i,
            j: w.j,
            k: w.k,
            l: w.l,
        });
    }

    if let Some(class) = game_taxonomy(game) {
        if !class.degenerate
            && class.cell.action_link != ActionLink::Neither
            && class.cell.spillovers != SpilloverSign::Neither
        {
            let ranks = action_ranks(outcome);
            let max = ranks.iter().copied().max().unwrap_or(0);
            let flip = |r: &usize| max - r;
            let in_ranks: Vec<usize> = match class.cell.spillovers {
                SpilloverSign::Positive => ranks.clone(),
                _ => ranks.iter().map(flip).collect(),
            };
            let out_ranks: Vec<usize> = match class.cell.action_link {
                ActionLink::Complements => ranks.clone(),
                _ => ranks.iter().map(flip).collect(),
            };
            if orders_satisfy_implications(&delta, &in_ranks, &out_ranks) {
                let relation = relation_from_ranks(&in_ranks, &out_ranks);
                return Ok(OrderPair {
                    in_ranks,
                    out_ranks,
                    relation,
                });
            }
        }
    }

    let n = delta.len();
    let mut in_ge = vec![vec![true; n]; n];
    let mut out_ge = vec![vec![true; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                // k wants j but not i: breaks i >=_in j.
                if delta[k][i].lt_zero() && delta[k][j].ge_zero() {
                    in_ge[i][j] = false;
                }
                // j wants k but i does not: breaks i >=_out j.
                if delta[j][k].ge_zero() && delta[i][k].lt_zero() {
                    out_ge[i][j] = false;
                }
            }
        }
    }
    let in_ranks = ranks_from_relation(&in_ge)?;
    let out_ranks = ranks_from_relation(&out_ge)?;
    let relation = relation_from_ranks(&in_ranks, &out_ranks);
    Ok(OrderPair {
        in_ranks,
        out_ranks,
        relation,
    })
}

/// Defining implications of the orders: whenever
/// `k >=_in j`, anyone who (strictly) wants j also (strictly) wants k, and
/// whenever `k >=_out j`, k (strictly) wants anyone j (strictly) wants.
fn orders_satisfy_implications<T: Scalar>(
    delta: &[Vec<T>],
    in_ranks: &[usize],
    out_ranks: &[usize],
) -> bool {
    let n = delta.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || i == k || j == k {
                    continue;
                }
                if in_ranks[k] >= in_ranks[j] {
                    if delta[i][j].gt_zero() && !delta[i][k].gt_zero() {
                        return false;
                    }
                    if delta[i][j].ge_zero() && !delta[i][k].ge_zero() {
                        return false;
                    }
                }
                if out_ranks[k] >= out_ranks[j] {
                    if delta[j][i].gt_zero() && !delta[k][i].gt_zero() {
                        return false;
                    }
                    if delta[j][i].ge_zero() && !delta[k][i].ge_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Identical when every pairwise comparison agrees, opposed when every one
/// reverses (ties matching ties); all-tied orders satisfy both and are
/// reported as undetermined.
fn relation_from_ranks(in_ranks: &[usize], out_ranks: &[usize]) -> OrderRelation {
    let n = in_ranks.len();
    let mut identical = true;
    let mut opposed = true;
    for i in 0..n {
        for j in 0..n {
            let a = in_ranks[i].cmp(&in_ranks[j]);
            let b = out_ranks[i].cmp(&out_ranks[j]);
            identical &= a == b;
            opposed &= a == b.reverse();
        }
    }
    match (identical, opposed) {
        (true, false) => OrderRelation::Identical,
        (false, true) => OrderRelation::Opposed,
        _ => OrderRelation::Undetermined,
    }
}

/// Dense ranks from a complete transitive `>=` relation.
fn ranks_from_relation(ge: &[Vec<bool>]) -> Result<Vec<usize>> {
    let n = ge.len();
    for i in 0..n {
        for j in 0..n {
            if i != j && !ge[i][j] && !ge[j][i] {
                return Err(Error::Numeric(format!(
                    "derived order incomplete between {i} and {j}"
                )));
            }
            for k in 0..n {
                if ge[i][j] && ge[j][k] && !ge[i][k] {
                    return Err(Error::Numeric(format!(
                        "derived order intransitive on ({i}, {j}, {k})"
                    )));
                }
            }
        }
    }
    let scores: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && ge[i][j]).count())
        .collect();
    let mut distinct: Vec<usize> = scores.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(scores
        .iter()
        .map(|s| distinct.iter().position(|d| d == s).unwrap())
        .collect())
}

// ---------------------------------------------------------------------------
// Single-crossing taxonomy
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionLink {
    Complements,
    Substitutes,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpilloverSign {
    Positive,
    Negative,
    Neither,
}

/// Cell of the two-by-two taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaxonomyCell {
    pub action_link: ActionLink,
    pub spillovers: SpilloverSign,
}

impl TaxonomyCell {
    pub fn new(action_link: ActionLink, spillovers: SpilloverSign) -> Self {
        TaxonomyCell {
            action_link,
            spillovers,
        }
    }

    /// Cells where the two orders coincide and nested split graphs emerge.
    pub fn is_diagonal(&self) -> bool {
        matches!(
            (self.action_link, self.spillovers),
            (ActionLink::Complements, SpilloverSign::Positive)
                | (ActionLink::Substitutes, SpilloverSign::Negative)
        )
    }
}

/// Taxonomy verdict plus degeneracy and strictness detail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub cell: TaxonomyCell,
    /// Set when the table never changes sign, so every direction holds and
    /// the reported cell is a convention.
    pub degenerate: bool,
    /// The chosen direction also satisfies the strict single-crossing form
    /// (nonnegative values never cross back below zero).
    pub strict_action_link: bool,
    pub strict_spillovers: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum LineVerdict {
    Up,
    Down,
    Both,
    Neither,
}

/// Weak single crossing along a sequence: once strictly positive, stay
/// strictly positive. The strict form adds: once nonnegative, stay
/// nonnegative.
fn crossing_up<T: Scalar>(line: &[&T], strict: bool) -> bool {
    let mut seen_pos = false;
    let mut seen_nonneg = false;
    for v in line {
        if seen_pos && !v.gt_zero() {
            return false;
        }
        if strict && seen_nonneg && !v.ge_zero() {
            return false;
        }
        seen_pos |= v.gt_zero();
        seen_nonneg |= v.ge_zero();
    }
    true
}

fn axis_verdict<T: Scalar>(lines: &[Vec<&T>], strict: bool) -> LineVerdict {
    let up = lines.iter().all(|l| crossing_up(l, strict));
    let down = lines.iter().all(|l| {
        let rev: Vec<&T> = l.iter().rev().copied().collect();
        crossing_up(&rev, strict)
    });
    match (up, down) {
        (true, true) => LineVerdict::Both,
        (true, false) => LineVerdict::Up,
        (false, true) => LineVerdict::Down,
        (false, false) => LineVerdict::Neither,
    }
}

/// Classifies a link-value table `g[x][y]` (row = own action, ascending)
/// into the taxonomy: single crossing in the own-action axis separates
/// complements from substitutes, and in the partner axis positive from
/// negative spillovers.
pub fn classify_single_crossing<T: Scalar>(g_table: &[Vec<T>]) -> Result<Classification> {
    let k = g_table.len();
    if k == 0 || g_table.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidParameter(
            "g table must be square and nonempty".into(),
        ));
    }
    // Own-action axis: vary the row index within each column.
    let columns: Vec<Vec<&T>> = (0..k)
        .map(|y| (0..k).map(|x| &g_table[x][y]).collect())
        .collect();
    // Partner axis: vary the column index within each row.
    let rows: Vec<Vec<&T>> = (0..k)
        .map(|x| (0..k).map(|y| &g_table[x][y]).collect())
        .collect();

    let own = axis_verdict(&columns, false);
    let partner = axis_verdict(&rows, false);
    let action_link = match own {
        LineVerdict::Up | LineVerdict::Both => ActionLink::Complements,
        LineVerdict::Down => ActionLink::Substitutes,
        LineVerdict::Neither => ActionLink::Neither,
    };
    let spillovers = match partner {
        LineVerdict::Up | LineVerdict::Both => SpilloverSign::Positive,
        LineVerdict::Down => SpilloverSign::Negative,
        LineVerdict::Neither => SpilloverSign::Neither,
    };
    let all = || g_table.iter().flatten();
    let degenerate = all().all(Scalar::ge_zero) || all().all(Scalar::le_zero);

    let strict_action_link = match action_link {
        ActionLink::Complements => matches!(
            axis_verdict(&columns, true),
            LineVerdict::Up | LineVerdict::Both
        ),
        ActionLink::Substitutes => matches!(
            axis_verdict(&columns, true),
            LineVerdict::Down | LineVerdict::Both
        ),
        ActionLink::Neither => false,
    };
    let strict_spillovers = match spillovers {
        SpilloverSign::Positive => matches!(
            axis_verdict(&rows, true),
            LineVerdict::Up | LineVerdict::Both
        ),
        SpilloverSign::Negative => matches!(
            axis_verdict(&rows, true),
            LineVerdict::Down | LineVerdict::Both
        ),
        SpilloverSign::Neither => false,
    };

    Ok(Classification {
        cell: TaxonomyCell {
            action_link,
            spillovers,
        },
        degenerate,
        strict_action_link,
        strict_spillovers,
    })
}

/// Taxonomy cell of a game, when one can be determined: grid games are
/// classified from their tabulated link values, linear-quadratic games
/// analytically (substitutes with positive spillovers for positive
/// spillover strength).
pub fn game_taxonomy<T: Scalar>(game: &GameSpec<T>) -> Option<Classification> {
    if let Some(lq) = game.lq() {
        if !lq.alpha().gt_zero() {
            return None;
        }
        return Some(Classification {
            cell: TaxonomyCell::new(ActionLink::Substitutes, SpilloverSign::Positive),
            degenerate: false,
            strict_action_link: false,
            strict_spillovers: false,
        });
    }
    let grid = game.grid()?;
    let table = game.link_table(grid)?;
    classify_single_crossing(&table).ok()
}

// ---------------------------------------------------------------------------
// Main structural verdict
// ---------------------------------------------------------------------------

/// Result of checking the structure of a strictly pairwise stable outcome.
#[derive(Clone, Debug)]
pub struct StructureVerdict {
    pub relation: OrderRelation,
    /// Named assertions with their verdicts.
    pub checks: Vec<(String, bool)>,
    /// Witness order when an overlapping-clique structure was confirmed.
    pub clique_order: Option<Vec<usize>>,
}

impl StructureVerdict {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Checks the structural dichotomy at a strictly pairwise stable outcome of
/// a game with consistent and aligned incentives: identical orders force a
/// nested split graph with degrees monotone in the order, opposed orders
/// force ordered overlapping cliques along the order. For separable games
/// with a classifiable cell, the degree/action monotonicity statements are
/// verified as well.
pub fn verify_stable_structure<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
) -> Result<StructureVerdict> {
    let stability: StabilityReport<T> = check_strict_pairwise(game, outcome)?;
    if !stability.stable() {
        return Err(Error::PreconditionFailed(
            "outcome is not strictly pairwise stable".into(),
        ));
    }
    let orders = match derive_orders(game, outcome) {
        Ok(op) => Some(op),
        Err(Error::Numeric(_)) => None, // degenerate relations; fall back below
        Err(e) => return Err(e),
    };
    let graph = outcome.graph();
    let mut checks = Vec::new();
    let mut clique_order = None;

    let relation = orders
        .as_ref()
        .map_or(OrderRelation::Undetermined, OrderPair::relation);
    match (relation, &orders) {
        (OrderRelation::Identical, Some(op)) => {
            let nsg = is_nested_split_graph(graph);
            checks.push(("nested split graph".into(), nsg.is_nsg));
            let monotone = (0..game.n()).all(|i| {
                (0..game.n()).all(|j| {
                    op.in_cmp(i, j) != Ordering::Greater || graph.degree(i) >= graph.degree(j)
                })
            });
            checks.push(("degrees monotone in the shared order".into(), monotone));
        }
        (OrderRelation::Opposed, Some(op)) => {
            let order = clique_order_refining(graph, op.in_ranks());
            checks.push((
                "ordered overlapping cliques along the in-order".into(),
                order.is_some(),
            ));
            clique_order = order;
        }
        _ => {
            let nsg = is_nested_split_graph(graph).is_nsg;
            let order = find_overlapping_clique_order(graph)?;
            checks.push((
                "nested split graph or ordered overlapping cliques".into(),
                nsg || order.is_some(),
            ));
            clique_order = order;
        }
    }

    if let Some(class) = game_taxonomy(game) {
        if !class.degenerate {
            cell_specific_checks(game, outcome, &class.cell, &mut checks, &mut clique_order);
        }
    }

    Ok(StructureVerdict {
        relation,
        checks,
        clique_order,
    })
}

/// Dense ranks of the action profile, ascending.
fn action_ranks<T: Scalar>(outcome: &Outcome<T>) -> Vec<usize> {
    let values = outcome.profile().values();
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0usize; n];
    let mut rank = 0usize;
    for w in 0..n {
        if w > 0 && values[order[w]] != values[order[w - 1]] {
            rank += 1;
        }
        ranks[order[w]] = rank;
    }
    ranks
}

fn cell_specific_checks<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    cell: &TaxonomyCell,
    checks: &mut Vec<(String, bool)>,
    clique_order: &mut Option<Vec<usize>>,
) {
    let graph = outcome.graph();
    let values = outcome.profile().values();
    let n = game.n();
    match (cell.action_link, cell.spillovers) {
        (ActionLink::Complements, SpilloverSign::Positive) => {
            checks.push((
                "nested split graph (complements, positive spillovers)".into(),
                is_nested_split_graph(graph).is_nsg,
            ));
            let mono = (0..n).all(|i| {
                (0..n).all(|j| graph.degree(i) <= graph.degree(j) || values[i].at_least(&values[j]))
            });
            checks.push(("higher degree takes weakly higher action".into(), mono));
        }
        (ActionLink::Substitutes, SpilloverSign::Negative) => {
            checks.push((
                "nested split graph (substitutes, negative spillovers)".into(),
                is_nested_split_graph(graph).is_nsg,
            ));
            let mono = (0..n).all(|i| {
                (0..n).all(|j| graph.degree(i) <= graph.degree(j) || values[j].at_least(&values[i]))
            });
            checks.push(("higher degree takes weakly lower action".into(), mono));
        }
        (ActionLink::Complements, SpilloverSign::Negative)
        | (ActionLink::Substitutes, SpilloverSign::Positive) => {
            let order = clique_order_refining(graph, &action_ranks(outcome));
            checks.push((
                "ordered overlapping cliques along the action order".into(),
                order.is_some(),
            ));
            if clique_order.is_none() {
                *clique_order = order;
            }
        }
        _ => {}
    }
}
