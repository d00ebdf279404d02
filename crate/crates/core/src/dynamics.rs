//! Adjustment dynamics: myopic link-addition paths from the empty graph,
//! monotone two-sided iteration to extremal stable outcomes, a
//! Poisson-clock revision simulator, and the two-stage deviation game that
//! characterizes pairwise Nash stability.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{extremal_nash, lq_nash_on_graph, Extremum, MAX_NASH_GRID};
use crate::error::{Error, Result};
use crate::games::LqPeerGame;
use crate::graph::{Graph, MAX_ENUMERATION_PLAYERS};
use crate::model::{marginal_link_value, ActionProfile, GameSpec, Outcome};
use crate::scalar::Scalar;
use crate::structure::{ActionLink, SpilloverSign, TaxonomyCell};

fn marginal<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>, i: usize, j: usize) -> T {
    match game.link_value(outcome.profile().value(i), outcome.profile().value(j)) {
        Some(v) => v,
        None => marginal_link_value(game, outcome, i, j).expect("distinct players"),
    }
}

// ---------------------------------------------------------------------------
// Uncoordinated outcomes
// ---------------------------------------------------------------------------

/// One myopically beneficial link addition: both endpoints weakly gain at
/// the pre-addition equilibrium, at least one strictly, and actions
/// re-equilibrate afterwards.
#[derive(Clone, Debug)]
pub struct AdjustmentStep<T> {
    pub added: (usize, usize),
    pub gain_i: T,
    pub gain_j: T,
    pub state: Outcome<T>,
}

/// A chain of beneficial additions from the empty graph.
#[derive(Clone, Debug)]
pub struct AdjustmentPath<T> {
    pub start: Outcome<T>,
    pub steps: Vec<AdjustmentStep<T>>,
}

impl<T> AdjustmentPath<T> {
    pub fn last(&self) -> &Outcome<T> {
        self.steps.last().map_or(&self.start, |s| &s.state)
    }
}

#[derive(Clone, Debug)]
pub struct UncoordinatedResult<T> {
    /// Pairwise stable outcomes reachable from the empty graph, ascending
    /// by graph bitmask.
    pub outcomes: Vec<Outcome<T>>,
    /// One witnessing addition path per outcome.
    pub paths: Vec<AdjustmentPath<T>>,
}

/// Searches every sequence of myopically beneficial link additions from the
/// empty graph (memoized on the graph bitmask) and returns the pairwise
/// stable outcomes among the reachable states.
pub fn uncoordinated_search<T: Scalar>(game: &LqPeerGame<T>) -> Result<UncoordinatedResult<T>> {
    let n = game.n();
    if n > MAX_ENUMERATION_PLAYERS {
        return Err(Error::SizeGuard(format!(
            "uncoordinated search capped at {MAX_ENUMERATION_PLAYERS} players, got {n}"
        )));
    }
    let spec = game.game_spec();
    let empty = Graph::empty(n)?;
    let mut equilibria: HashMap<u128, ActionProfile<T>> = HashMap::new();
    let mut parent: HashMap<u128, (u128, (usize, usize))> = HashMap::new();
    let mut queue = vec![empty.edge_bits()];
    equilibria.insert(empty.edge_bits(), lq_nash_on_graph(game, &empty)?);

    while let Some(bits) = queue.pop() {
        let graph = Graph::from_edge_bits(n, bits)?;
        let profile = equilibria[&bits].clone();
        for (i, j) in graph.pairs() {
            if graph.has_edge(i, j) {
                continue;
            }
            let gain_i = game.link_value(profile.value(i), profile.value(j));
            let gain_j = game.link_value(profile.value(j), profile.value(i));
            let beneficial =
                gain_i.ge_zero() && gain_j.ge_zero() && (gain_i.gt_zero() || gain_j.gt_zero());
            if !beneficial {
                continue;
            }
            let next = graph.with_edge(i, j)?;
            let next_bits = next.edge_bits();
            if equilibria.contains_key(&next_bits) {
                continue;
            }
            equilibria.insert(next_bits, lq_nash_on_graph(game, &next)?);
            parent.insert(next_bits, (bits, (i, j)));
            queue.push(next_bits);
        }
    }

    let mut stable_bits: Vec<u128> = Vec::new();
    for (&bits, profile) in &equilibria {
        let outcome = Outcome::new(Graph::from_edge_bits(n, bits)?, profile.clone())?;
        if crate::stability::check_pairwise(&spec, &outcome)?.stable() {
            stable_bits.push(bits);
        }
    }
    stable_bits.sort_unstable();

    let mut outcomes = Vec::new();
    let mut paths = Vec::new();
    for &bits in &stable_bits {
        let outcome = Outcome::new(Graph::from_edge_bits(n, bits)?, equilibria[&bits].clone())?;
        outcomes.push(outcome);
        // Rebuild the addition chain back to the empty graph.
        let mut chain = Vec::new();
        let mut cursor = bits;
        while let Some(&(prev, pair)) = parent.get(&cursor) {
            chain.push((prev, pair, cursor));
            cursor = prev;
        }
        chain.reverse();
        let start = Outcome::new(empty, equilibria[&empty.edge_bits()].clone())?;
        let mut steps = Vec::new();
        for (prev, (i, j), here) in chain {
            let before = &equilibria[&prev];
            let gain_i = game.link_value(before.value(i), before.value(j));
            let gain_j = game.link_value(before.value(j), before.value(i));
            steps.push(AdjustmentStep {
                added: (i, j),
                gain_i,
                gain_j,
                state: Outcome::new(Graph::from_edge_bits(n, here)?, equilibria[&here].clone())?,
            });
        }
        paths.push(AdjustmentPath { start, steps });
    }
    Ok(UncoordinatedResult { outcomes, paths })
}

/// The pairwise stable outcomes reachable through myopically beneficial
/// link additions from the empty graph.
pub fn uncoordinated_outcomes<T: Scalar>(game: &LqPeerGame<T>) -> Result<Vec<Outcome<T>>> {
    Ok(uncoordinated_search(game)?.outcomes)
}

// ---------------------------------------------------------------------------
// Monotone two-sided iteration
// ---------------------------------------------------------------------------

/// Extremal pairwise stable outcomes under the cell's product order.
///
/// For complements with positive spillovers the order is (more links,
/// higher actions); for substitutes with negative spillovers the action
/// order is reversed, so `maximal` pairs the largest graph with the lowest
/// actions.
#[derive(Clone, Debug)]
pub struct TarskiExtremes<T> {
    pub minimal: Outcome<T>,
    pub maximal: Outcome<T>,
}

fn precondition_samples<T: Scalar>(game: &GameSpec<T>, cell: &TaxonomyCell) -> Result<()> {
    let grid = game
        .grid()
        .ok_or_else(|| Error::UnsupportedDomain("lattice iteration needs a finite grid".into()))?;
    if grid.len() > MAX_NASH_GRID {
        return Err(Error::SizeGuard(
            "grid too large for lattice iteration".into(),
        ));
    }
    let n = game.n();
    let k = grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a51);
    let pairs_total = crate::graph::pair_count(n) as u32;
    for _ in 0..200 {
        let bits = rng.gen_range(0..(1u128 << pairs_total));
        let graph = Graph::from_edge_bits(n, bits)?;
        let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let profile = ActionProfile::on_grid(grid, indices.clone())?;
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let outcome = Outcome::new(graph, profile.clone())?;
        let d = marginal(game, &outcome, i, j);

        // Strategic complements: raising an opponent keeps upward action
        // deviations attractive.
        if indices[i] + 1 < k && indices[j] + 1 < k {
            let up_i = profile.with_index(grid, i, indices[i] + 1);
            let gain_low = game.payoff(&graph, &up_i, i) - game.payoff(&graph, &profile, i);
            let raised = profile.with_index(grid, j, indices[j] + 1);
            let up_both = raised.with_index(grid, i, indices[i] + 1);
            let gain_high = game.payoff(&graph, &up_both, i) - game.payoff(&graph, &raised, i);
            if (gain_low.ge_zero() && !gain_high.ge_zero())
                || (gain_low.gt_zero() && !gain_high.gt_zero())
            {
                return Err(Error::LatticePrecondition(
                    "strategic complements fail on a sampled configuration".into(),
                ));
            }
        }

        // Convexity in links: a weakly attractive link stays attractive
        // after more links appear elsewhere.
        let extra = rng.gen_range(0..(1u128 << pairs_total));
        let bigger = Graph::from_edge_bits(n, bits | extra)?;
        let d_big = marginal(game, &Outcome::new(bigger, profile.clone())?, i, j);
        if (d.ge_zero() && !d_big.ge_zero()) || (d.gt_zero() && !d_big.gt_zero()) {
            return Err(Error::LatticePrecondition(
                "convexity in links fails on a sampled configuration".into(),
            ));
        }

        // Cell conditions: own-action and partner-action single crossing of
        // the marginal link value, in the directions the cell dictates.
        let own_shift: isize = match cell.action_link {
            ActionLink::Complements => 1,
            ActionLink::Substitutes => -1,
            ActionLink::Neither => 0,
        };
        let partner_shift: isize = match cell.spillovers {
            SpilloverSign::Positive => 1,
            SpilloverSign::Negative => -1,
            SpilloverSign::Neither => 0,
        };
        let shifted_index = |ix: usize, by: isize| -> Option<usize> {
            let target = ix as isize + by;
            (0..k as isize).contains(&target).then_some(target as usize)
        };
        if let Some(ix) = shifted_index(indices[i], own_shift) {
            let moved = profile.with_index(grid, i, ix);
            let d2 = marginal(game, &Outcome::new(graph, moved)?, i, j);
            if (d.ge_zero() && !d2.ge_zero()) || (d.gt_zero() && !d2.gt_zero()) {
                return Err(Error::LatticePrecondition(
                    "own-action single crossing fails on a sampled configuration".into(),
                ));
            }
        }
        if let Some(jx) = shifted_index(indices[j], partner_shift) {
            let moved = profile.with_index(grid, j, jx);
            let d2 = marginal(game, &Outcome::new(graph, moved)?, i, j);
            if (d.ge_zero() && !d2.ge_zero()) || (d.gt_zero() && !d2.gt_zero()) {
                return Err(Error::LatticePrecondition(
                    "partner-action single crossing fails on a sampled configuration".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Largest pairwise stable graph holding the profile fixed: start complete
/// and delete links some endpoint strictly wants gone.
fn max_stable_graph<T: Scalar>(game: &GameSpec<T>, profile: &ActionProfile<T>) -> Result<Graph> {
    let n = game.n();
    let mut graph = Graph::complete(n)?;
    loop {
        let outcome = Outcome::new(graph, profile.clone())?;
        let mut cut = None;
        'scan: for (i, j) in graph.pairs() {
            if !graph.has_edge(i, j) {
                continue;
            }
            if marginal(game, &outcome, i, j).lt_zero() || marginal(game, &outcome, j, i).lt_zero()
            {
                cut = Some((i, j));
                break 'scan;
            }
        }
        match cut {
            Some((i, j)) => graph = graph.without_edge(i, j)?,
            None => return Ok(graph),
        }
    }
}

/// Smallest pairwise stable graph holding the profile fixed: start empty
/// and add links both endpoints weakly want, one strictly.
fn min_stable_graph<T: Scalar>(game: &GameSpec<T>, profile: &ActionProfile<T>) -> Result<Graph> {
    let n = game.n();
    let mut graph = Graph::empty(n)?;
    loop {
        let outcome = Outcome::new(graph, profile.clone())?;
        let mut add = None;
        'scan: for (i, j) in graph.pairs() {
            if graph.has_edge(i, j) {
                continue;
            }
            let di = marginal(game, &outcome, i, j);
            let dj = marginal(game, &outcome, j, i);
            if di.ge_zero() && dj.ge_zero() && (di.gt_zero() || dj.gt_zero()) {
                add = Some((i, j));
                break 'scan;
            }
        }
        match add {
            Some((i, j)) => graph = graph.with_edge(i, j)?,
            None => return Ok(graph),
        }
    }
}

/// One application of the extremal refinement map: the extremal stable
/// graph given the old profile, paired with the extremal Nash profile
/// given the old graph.
pub fn refine_extreme<T: Scalar>(
    game: &GameSpec<T>,
    outcome: &Outcome<T>,
    cell: &TaxonomyCell,
    which: Extremum,
) -> Result<Outcome<T>> {
    // Under reversed action order (substitutes/negative), the maximal
    // outcome carries the minimal action profile.
    let action_extreme = match (
        which,
        cell.is_diagonal() && cell.action_link == ActionLink::Substitutes,
    ) {
        (Extremum::Max, false) | (Extremum::Min, true) => Extremum::Max,
        _ => Extremum::Min,
    };
    let graph = match which {
        Extremum::Max => max_stable_graph(game, outcome.profile())?,
        Extremum::Min => min_stable_graph(game, outcome.profile())?,
    };
    let profile = extremal_nash(game, outcome.graph(), action_extreme)?;
    Outcome::new(graph, profile)
}

/// Iterates the two monotone refinement maps to the extremal pairwise
/// stable outcomes. The cell must be diagonal (complements with positive
/// spillovers, or substitutes with negative spillovers) and the sampled
/// lattice preconditions must hold.
pub fn tarski_extremes<T: Scalar>(
    game: &GameSpec<T>,
    cell: &TaxonomyCell,
) -> Result<TarskiExtremes<T>> {
    if !cell.is_diagonal() {
        return Err(Error::LatticePrecondition(
            "lattice iteration applies to complements/positive or substitutes/negative".into(),
        ));
    }
    precondition_samples(game, cell)?;
    let grid = game.grid().expect("checked in preconditions");
    let n = game.n();
    let k = grid.len();
    let reversed = cell.action_link == ActionLink::Substitutes;

    let start = |which: Extremum| -> Result<Outcome<T>> {
        let (graph, ix) = match (which, reversed) {
            (Extremum::Max, false) => (Graph::complete(n)?, k - 1),
            (Extremum::Max, true) => (Graph::complete(n)?, 0),
            (Extremum::Min, false) => (Graph::empty(n)?, 0),
            (Extremum::Min, true) => (Graph::empty(n)?, k - 1),
        };
        Outcome::new(graph, ActionProfile::on_grid(grid, vec![ix; n])?)
    };

    let iterate = |which: Extremum| -> Result<Outcome<T>> {
        let mut state = start(which)?;
        let cap = 2 * (crate::graph::pair_count(n) + n * k) + 8;
        for _ in 0..cap {
            let next = refine_extreme(game, &state, cell, which)?;
            if next == state {
                return Ok(state);
            }
            state = next;
        }
        Err(Error::Numeric("lattice iteration did not settle".into()))
    };

    Ok(TarskiExtremes {
        minimal: iterate(Extremum::Min)?,
        maximal: iterate(Extremum::Max)?,
    })
}

/// Product order on outcomes used by the lattice results: graphs by edge
/// inclusion, actions pointwise (reversed for substitutes/negative cells).
pub fn outcome_leq<T: Scalar>(a: &Outcome<T>, b: &Outcome<T>, cell: &TaxonomyCell) -> bool {
    let edges_a = a.graph().edge_bits();
    let edges_b = b.graph().edge_bits();
    if edges_a & !edges_b != 0 {
        return false;
    }
    let reversed = cell.action_link == ActionLink::Substitutes;
    a.profile()
        .values()
        .iter()
        .zip(b.profile().values())
        .all(|(x, y)| if reversed { y <= x } else { x <= y })
}

// ---------------------------------------------------------------------------
// Revision simulation
// ---------------------------------------------------------------------------

/// Which Poisson clock fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClockId {
    /// Player may revise her action.
    Action(usize),
    /// Ordered pair (owner, partner): owner may delete the link or propose
    /// it to the partner.
    Link(usize, usize),
}

/// What the acting player did.
#[derive(Clone, Debug, PartialEq)]
pub enum Decision<T> {
    KeepAction,
    SetAction(T),
    KeepLink,
    CutLink,
    ProposeAccepted,
    ProposeRejected,
    NoProposal,
}

#[derive(Clone, Debug)]
pub struct RevisionEvent<T> {
    pub time: f64,
    pub clock: ClockId,
    pub decision: Decision<T>,
    /// Hash of the state after the decision.
    pub state_hash: u64,
}

/// Event log of a revision run.
#[derive(Clone, Debug)]
pub struct RevisionTrace<T> {
    pub seed: u64,
    pub lambda: f64,
    /// Discount factor recorded for provenance; myopic agents ignore it.
    pub discount: f64,
    pub events: Vec<RevisionEvent<T>>,
    pub absorbed: Option<Outcome<T>>,
    pub final_state: Outcome<T>,
}

impl<T: Scalar> RevisionTrace<T> {
    /// Line-delimited event records: time, actor, decision, state hash.
    pub fn write_lines<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "# seed={} lambda={} discount={} events={}",
            self.seed,
            self.lambda,
            self.discount,
            self.events.len()
        )?;
        for e in &self.events {
            let actor = match e.clock {
                ClockId::Action(i) => format!("a{}", i + 1),
                ClockId::Link(i, j) => format!("l{}-{}", i + 1, j + 1),
            };
            let decision = match &e.decision {
                Decision::KeepAction => "keep".into(),
                Decision::SetAction(v) => format!("set={v}"),
                Decision::KeepLink => "keep-link".into(),
                Decision::CutLink => "cut".into(),
                Decision::ProposeAccepted => "propose-accepted".into(),
                Decision::ProposeRejected => "propose-rejected".into(),
                Decision::NoProposal => "no-proposal".into(),
            };
            writeln!(
                w,
                "t={:.9} actor={actor} decision={decision} state={:016x}",
                e.time, e.state_hash
            )?;
        }
        match &self.absorbed {
            Some(o) => writeln!(w, "# absorbed state={:016x}", o.state_hash()),
            None => writeln!(w, "# not absorbed"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RevisionConfig {
    pub lambda: f64,
    pub max_events: usize,
    pub seed: u64,
    /// Recorded in the trace; decisions are myopic.
    pub discount: f64,
}

/// Myopically optimal action change, if any strictly improves.
fn action_move<T: Scalar>(
    game: &GameSpec<T>,
    state: &Outcome<T>,
    i: usize,
) -> Result<Option<ActionProfile<T>>> {
    if let Some(grid) = game.grid() {
        let current = game.payoff(state.graph(), state.profile(), i);
        let mut best: Option<(T, ActionProfile<T>)> = None;
        for x in 0..grid.len() {
            if state.profile().index(i) == Some(x) {
                continue;
            }
            let trial = state.profile().with_index(grid, i, x);
            let u = game.payoff(state.graph(), &trial, i);
            let better_than_best = best.as_ref().is_none_or(|(b, _)| u.exceeds(b));
            if u.exceeds(&current) && better_than_best {
                best = Some((u, trial));
            }
        }
        return Ok(best.map(|(_, p)| p));
    }
    if let Some(lq) = game.lq() {
        let br = lq.best_response(state.graph(), state.profile(), i);
        if !br.near(state.profile().value(i)) {
            return Ok(Some(state.profile().with_value(i, br)));
        }
        return Ok(None);
    }
    Err(Error::UnsupportedDomain(
        "revision simulation needs a finite grid or a linear-quadratic game".into(),
    ))
}

/// Would any clock change the state? Mirrors the event decision rules.
fn is_absorbing<T: Scalar>(game: &GameSpec<T>, state: &Outcome<T>) -> Result<bool> {
    for i in 0..game.n() {
        if action_move(game, state, i)?.is_some() {
            return Ok(false);
        }
    }
    for (i, j) in state.graph().pairs() {
        let di = marginal(game, state, i, j);
        let dj = marginal(game, state, j, i);
        if state.graph().has_edge(i, j) {
            // An owner deletes only when strictly beneficial.
            if di.lt_zero() || dj.lt_zero() {
                return Ok(false);
            }
        } else {
            // Proposals are strict, acceptances weak.
            if (di.gt_zero() && dj.ge_zero()) || (dj.gt_zero() && di.ge_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Simulates myopic revisions at Poisson arrival times: every player has an
/// action clock and every ordered pair a link clock, all at rate `lambda`.
/// On an action clock the player best responds; on a link clock the owner
/// deletes if strictly beneficial, or proposes if strictly beneficial and
/// the partner accepts whenever the link is weakly beneficial to her.
pub fn simulate_revision<T: Scalar>(
    game: &GameSpec<T>,
    start: &Outcome<T>,
    cfg: &RevisionConfig,
) -> Result<RevisionTrace<T>> {
    if cfg.lambda <= 0.0 {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    let n = game.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let clock_count = n + n * (n - 1);
    let total_rate = cfg.lambda * clock_count as f64;
    let mut state = start.clone();
    let mut time = 0.0f64;
    let mut events = Vec::new();
    let mut absorbed = is_absorbing(game, &state)?.then(|| state.clone());

    while absorbed.is_none() && events.len() < cfg.max_events {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        time += -u.ln() / total_rate;
        let pick = rng.gen_range(0..clock_count);
        let clock = if pick < n {
            ClockId::Action(pick)
        } else {
            let r = pick - n;
            let owner = r / (n - 1);
            let slot = r % (n - 1);
            let partner = if slot >= owner { slot + 1 } else { slot };
            ClockId::Link(owner, partner)
        };
        let mut changed = false;
        let decision = match clock {
            ClockId::Action(i) => match action_move(game, &state, i)? {
                Some(profile) => {
                    let value = profile.value(i).clone();
                    state = Outcome::new(*state.graph(), profile)?;
                    changed = true;
                    Decision::SetAction(value)
                }
                None => Decision::KeepAction,
            },
            ClockId::Link(i, j) => {
                if state.graph().has_edge(i, j) {
                    if marginal(game, &state, i, j).lt_zero() {
                        state = Outcome::new(
                            state.graph().without_edge(i, j)?,
                            state.profile().clone(),
                        )?;
                        changed = true;
                        Decision::CutLink
                    } else {
                        Decision::KeepLink
                    }
                } else if marginal(game, &state, i, j).gt_zero() {
                    if marginal(game, &state, j, i).ge_zero() {
                        state =
                            Outcome::new(state.graph().with_edge(i, j)?, state.profile().clone())?;
                        changed = true;
                        Decision::ProposeAccepted
                    } else {
                        Decision::ProposeRejected
                    }
                } else {
                    Decision::NoProposal
                }
            }
        };
        events.push(RevisionEvent {
            time,
            clock,
            decision,
            state_hash: state.state_hash(),
        });
        if changed && is_absorbing(game, &state)? {
            absorbed = Some(state.clone());
        }
    }

    Ok(RevisionTrace {
        seed: cfg.seed,
        lambda: cfg.lambda,
        discount: cfg.discount,
        events,
        absorbed,
        final_state: state,
    })
}

// ---------------------------------------------------------------------------
// Two-stage deviation game
// ---------------------------------------------------------------------------

/// Cap on players for the explicit deviation-game analysis.
const MAX_EPS_PLAYERS: usize = 4;

/// Value of the optional second stage for player `i` at a state: her
/// payoff after the best strictly improving accepted proposal, or the
/// status quo payoff when no proposal is worth making.
fn stage_two_value<T: Scalar>(game: &GameSpec<T>, state: &Outcome<T>, i: usize) -> T {
    let here = game.payoff(state.graph(), state.profile(), i);
    let mut best = here.clone();
    for j in 0..game.n() {
        if j == i || state.graph().has_edge(i, j) {
            continue;
        }
        let with = state.graph().with_edge(i, j).expect("distinct players");
        let mine = game.payoff(&with, state.profile(), i);
        let theirs_gain =
            game.payoff(&with, state.profile(), j) - game.payoff(state.graph(), state.profile(), j);
        if theirs_gain.ge_zero() && mine.exceeds(&best) {
            best = mine;
        }
    }
    best
}

/// Subgame-perfect analysis of the two-stage deviation game at vanishing
/// second-stage probability: a player first makes any unilateral deviation
/// (action change plus link cuts), then with small probability may propose
/// one link, which the recipient accepts when weakly beneficial. Payoffs
/// compare lexicographically (first stage dominates), so the outcome is an
/// equilibrium for all sufficiently small stage probabilities exactly when
/// no player moves.
pub fn epsilon_pns_check<T: Scalar>(game: &GameSpec<T>, outcome: &Outcome<T>) -> Result<bool> {
    let n = game.n();
    if n > MAX_EPS_PLAYERS {
        return Err(Error::SizeGuard(format!(
            "deviation-game analysis capped at {MAX_EPS_PLAYERS} players, got {n}"
        )));
    }
    let grid = game
        .grid()
        .ok_or_else(|| Error::UnsupportedDomain("deviation game needs a finite grid".into()))?
        .to_vec();
    if grid.len() > MAX_NASH_GRID {
        return Err(Error::SizeGuard(
            "grid too large for the deviation game".into(),
        ));
    }

    for i in 0..n {
        let base_payoff = game.payoff(outcome.graph(), outcome.profile(), i);
        // Staying put must not trigger a second-stage move.
        let v2 = stage_two_value(game, outcome, i);
        if v2.exceeds(&base_payoff) {
            return Ok(false);
        }
        let neighbors: Vec<usize> = outcome.graph().neighbors(i).collect();
        for mask in 0u32..(1 << neighbors.len()) {
            let mut graph = *outcome.graph();
            for (pos, &k) in neighbors.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    graph = graph.without_edge(i, k)?;
                }
            }
            for x in 0..grid.len() {
                if mask == 0 && outcome.profile().index(i) == Some(x) {
                    continue;
                }
                let state = Outcome::new(graph, outcome.profile().with_index(&grid, i, x))?;
                let u_now = game.payoff(state.graph(), state.profile(), i);
                if u_now.exceeds(&base_payoff) {
                    return Ok(false);
                }
                // Lexicographic tie-break: an indifferent first-stage move
                // pays off if it unlocks a strictly better proposal.
                if u_now.near(&base_payoff) && stage_two_value(game, &state, i).exceeds(&v2) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
