//! Nash equilibrium computation on a fixed graph: exact linear solves for
//! the linear-quadratic family, closed forms for cliques, and exhaustive or
//! iterative search for finite grid games.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::games::LqPeerGame;
use crate::graph::Graph;
use crate::model::{ActionProfile, GameSpec};
use crate::scalar::Scalar;

/// Cap on grid size for exhaustive Nash scans.
pub const MAX_NASH_GRID: usize = 8;

/// Cap on profile count for iterated best-response sweeps.
const MAX_ITERATION_STARTS: usize = 20_000;

// ---------------------------------------------------------------------------
// Linear-quadratic games
// ---------------------------------------------------------------------------

/// The normalized first-order system `s = b~ + alpha G~ s` of a
/// linear-quadratic game on a fixed graph: `g~_ij = 1/(d_i + 1)` for every
/// edge `ij`, and `b~_i = b_i/(d_i + 1)`.
#[derive(Clone, Debug)]
pub struct LqLinearSystem<T> {
    g_tilde: Vec<Vec<T>>,
    b_tilde: Vec<T>,
    alpha: T,
}

impl<T: Scalar> LqLinearSystem<T> {
    pub fn new(game: &LqPeerGame<T>, graph: &Graph) -> Result<Self> {
        let n = game.n();
        if graph.n() != n {
            return Err(Error::InvalidParameter(format!(
                "graph has {} players, game has {n}",
                graph.n()
            )));
        }
        let mut g_tilde = vec![vec![T::zero(); n]; n];
        let mut b_tilde = Vec::with_capacity(n);
        for i in 0..n {
            let w = T::one() / T::from_int(graph.degree(i) as i64 + 1);
            for j in graph.neighbors(i) {
                g_tilde[i][j] = w.clone();
            }
            b_tilde.push(game.b()[i].clone() * w);
        }
        Ok(LqLinearSystem {
            g_tilde,
            b_tilde,
            alpha: game.alpha().clone(),
        })
    }

    pub fn g_tilde(&self) -> &[Vec<T>] {
        &self.g_tilde
    }

    pub fn b_tilde(&self) -> &[T] {
        &self.b_tilde
    }

    /// Solves `(I - alpha G~) s = b~`.
    pub fn solve(&self) -> Result<Vec<T>> {
        let n = self.b_tilde.len();
        let mut a = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let off = self.alpha.clone() * self.g_tilde[i][j].clone();
                a[i][j] = if i == j { T::one() - off } else { -off };
            }
        }
        solve_dense(a, self.b_tilde.clone())
    }
}

/// Dense Gaussian elimination with partial pivoting; works for both exact
/// and floating scalars.
fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut rhs: Vec<T>) -> Result<Vec<T>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .abs()
                    .partial_cmp(&a[r2][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty column");
        if a[pivot_row][col].is_zero() {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / pivot.clone();
            for k in col..n {
                let delta = factor.clone() * a[col][k].clone();
                a[row][k] = a[row][k].clone() - delta;
            }
            let delta = factor * rhs[col].clone();
            rhs[row] = rhs[row].clone() - delta;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok(x)
}

/// The unique Nash profile of a linear-quadratic game on `graph`: the
/// solution of `s_i = (b_i + alpha sum_{j in G_i} s_j)/(1 + d_i)`.
pub fn lq_nash_on_graph<T: Scalar>(
    game: &LqPeerGame<T>,
    graph: &Graph,
) -> Result<ActionProfile<T>> {
    let solution = LqLinearSystem::new(game, graph)?.solve()?;
    let profile = ActionProfile::continuous(solution)?;
    // The first-order condition must hold to solver precision, and actions
    // must stay positive for positive incentives. Wider sign margins
    // (single precision) widen the guard accordingly.
    let mut tol = T::from_ratio(1, 10_000_000_000);
    if T::sign_margin() > tol {
        tol = T::sign_margin();
    }
    for i in 0..game.n() {
        let br = game.best_response(graph, &profile, i);
        if (br - profile.value(i).clone()).abs() > tol {
            return Err(Error::Numeric(format!(
                "first-order residual too large at player {i}"
            )));
        }
        if !profile.value(i).gt_zero() {
            return Err(Error::Numeric(format!(
                "nonpositive equilibrium action for player {i}"
            )));
        }
    }
    Ok(profile)
}

/// Equilibrium actions inside an isolated clique with incentives `b_c`:
/// `s_i = (b_i + alpha |C| mean(b_c) / (alpha + (1 - alpha)|C|)) / (alpha + |C|)`.
pub fn clique_actions<T: Scalar>(b_c: &[T], alpha: &T) -> Result<Vec<T>> {
    check_clique_args(b_c, alpha)?;
    let c = T::from_int(b_c.len() as i64);
    let shared = shared_clique_term(b_c, alpha, &c);
    let outer = alpha.clone() + c;
    Ok(b_c
        .iter()
        .map(|b| (b.clone() + shared.clone()) / outer.clone())
        .collect())
}

/// Equilibrium payoffs inside an isolated clique:
/// `u_i = |C| (b_i + alpha |C| mean(b_c) / (alpha + (1 - alpha)|C|))^2 / (2 (alpha + |C|)^2)`.
pub fn clique_welfare<T: Scalar>(b_c: &[T], alpha: &T) -> Result<Vec<T>> {
    check_clique_args(b_c, alpha)?;
    let c = T::from_int(b_c.len() as i64);
    let shared = shared_clique_term(b_c, alpha, &c);
    let denom = (alpha.clone() + c.clone()).sq();
    Ok(b_c
        .iter()
        .map(|b| (c.clone() * (b.clone() + shared.clone()).sq() / denom.clone()).half())
        .collect())
}

fn check_clique_args<T: Scalar>(b_c: &[T], alpha: &T) -> Result<()> {
    if b_c.is_empty() {
        return Err(Error::InvalidParameter("empty clique".into()));
    }
    if !alpha.ge_zero() || !(T::one() - alpha.clone()).ge_zero() {
        return Err(Error::InvalidParameter("alpha outside [0,1]".into()));
    }
    Ok(())
}

/// `alpha |C| mean(b_c) / (alpha + (1 - alpha)|C|)`, shared by all members.
fn shared_clique_term<T: Scalar>(b_c: &[T], alpha: &T, c: &T) -> T {
    let sum = b_c.iter().fold(T::zero(), |acc, b| acc + b.clone());
    alpha.clone() * sum / (alpha.clone() + (T::one() - alpha.clone()) * c.clone())
}

// ---------------------------------------------------------------------------
// Finite grid games
// ---------------------------------------------------------------------------

fn check_grid_game<'g, T: Scalar>(game: &'g GameSpec<T>, graph: &Graph) -> Result<&'g [T]> {
    let grid = game
        .grid()
        .ok_or_else(|| Error::UnsupportedDomain("Nash scan needs a finite grid".into()))?;
    if graph.n() != game.n() {
        return Err(Error::InvalidParameter("graph/game size mismatch".into()));
    }
    if grid.len() > MAX_NASH_GRID {
        return Err(Error::SizeGuard(format!(
            "grid of {} points exceeds the scan cap {MAX_NASH_GRID}",
            grid.len()
        )));
    }
    if game.n() > crate::graph::MAX_ENUMERATION_PLAYERS {
        return Err(Error::SizeGuard(format!(
            "Nash scan capped at {} players",
            crate::graph::MAX_ENUMERATION_PLAYERS
        )));
    }
    Ok(grid)
}

/// All pure Nash profiles of a grid game on a fixed graph, by exhaustive
/// scan, in lexicographic index order. This is the oracle; the iterated
/// variant below is the fast path.
pub fn finite_nash<T: Scalar>(game: &GameSpec<T>, graph: &Graph) -> Result<Vec<ActionProfile<T>>> {
    let grid = check_grid_game(game, graph)?.to_vec();
    let n = game.n();
    let k = grid.len();
    let mut indices = vec![0usize; n];
    let mut scratch = ActionProfile::on_grid(&grid, indices.clone())?;
    let mut found = Vec::new();

    // Tabulated fast path: utilities decompose as v[i][x] + sum of g[x][y].
    let tables = game.own_tables().cloned();
    let mut util = vec![T::zero(); k];

    loop {
        let nash = if let Some(t) = &tables {
            let mut ok = true;
            'players: for i in 0..n {
                for (x, u) in util.iter_mut().enumerate() {
                    *u = t.v[i][x].clone();
                    for j in graph.neighbors(i) {
                        *u = u.clone() + t.g[x][indices[j]].clone();
                    }
                }
                let cur = &util[indices[i]];
                for u in &util {
                    if u.exceeds(cur) {
                        ok = false;
                        break 'players;
                    }
                }
            }
            ok
        } else {
            is_nash_scan(game, graph, &grid, &mut scratch, &indices)
        };
        if nash {
            found.push(ActionProfile::on_grid(&grid, indices.clone())?);
        }
        // Odometer step.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(found);
            }
            pos -= 1;
            if indices[pos] + 1 < k {
                indices[pos] += 1;
                scratch.set_index(&grid, pos, indices[pos]);
                break;
            }
            indices[pos] = 0;
            scratch.set_index(&grid, pos, 0);
        }
    }
}

fn is_nash_scan<T: Scalar>(
    game: &GameSpec<T>,
    graph: &Graph,
    grid: &[T],
    scratch: &mut ActionProfile<T>,
    indices: &[usize],
) -> bool {
    for i in 0..game.n() {
        let cur_ix = indices[i];
        let cur = game.payoff(graph, scratch, i);
        for x in 0..grid.len() {
            if x == cur_ix {
                continue;
            }
            scratch.set_index(grid, i, x);
            let dev = game.payoff(graph, scratch, i);
            if dev.exceeds(&cur) {
                scratch.set_index(grid, i, cur_ix);
                return false;
            }
        }
        scratch.set_index(grid, i, cur_ix);
    }
    true
}

/// Result of round-robin best-response iteration from every start profile.
#[derive(Clone, Debug)]
pub struct BrIteration<T> {
    pub equilibria: Vec<ActionProfile<T>>,
    pub cycle_detected: bool,
}

/// Iterates sequential best responses from every starting profile and
/// collects the fixed points reached. Whenever no start cycles, the fixed
/// points are exactly the Nash profiles of the game.
pub fn finite_nash_iterated<T: Scalar>(
    game: &GameSpec<T>,
    graph: &Graph,
) -> Result<BrIteration<T>> {
    let grid = check_grid_game(game, graph)?.to_vec();
    let n = game.n();
    let k = grid.len();
    let starts = k
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_ITERATION_STARTS);
    let Some(total) = starts else {
        return Err(Error::SizeGuard(format!(
            "{k}^{n} start profiles exceed the iteration cap {MAX_ITERATION_STARTS}"
        )));
    };

    let mut fixed: Vec<Vec<usize>> = Vec::new();
    let mut cycle_detected = false;
    for start in 0..total {
        let mut indices: Vec<usize> = (0..n).map(|i| start / k.pow(i as u32) % k).collect();
        let mut profile = ActionProfile::on_grid(&grid, indices.clone())?;
        let mut seen = HashSet::new();
        seen.insert(indices.clone());
        loop {
            let mut changed = false;
            for i in 0..n {
                let best = best_response_index(game, graph, &grid, &mut profile, &indices, i);
                if best != indices[i] {
                    indices[i] = best;
                    profile.set_index(&grid, i, best);
                    changed = true;
                }
            }
            if !changed {
                fixed.push(indices.clone());
                break;
            }
            if !seen.insert(indices.clone()) {
                cycle_detected = true;
                break;
            }
        }
    }
    fixed.sort_unstable();
    fixed.dedup();
    let equilibria = fixed
        .into_iter()
        .map(|ix| ActionProfile::on_grid(&grid, ix))
        .collect::<Result<Vec<_>>>()?;
    Ok(BrIteration {
        equilibria,
        cycle_detected,
    })
}

/// Best response index for player `i`; keeps the current action when it is
/// among the maximizers, otherwise takes the lowest maximizer.
fn best_response_index<T: Scalar>(
    game: &GameSpec<T>,
    graph: &Graph,
    grid: &[T],
    profile: &mut ActionProfile<T>,
    indices: &[usize],
    i: usize,
) -> usize {
    let cur_ix = indices[i];
    let mut best_ix = cur_ix;
    let mut best = game.payoff(graph, profile, i);
    for x in 0..grid.len() {
        if x == cur_ix {
            continue;
        }
        profile.set_index(grid, i, x);
        let u = game.payoff(graph, profile, i);
        if u.exceeds(&best) {
            best = u;
            best_ix = x;
        }
    }
    profile.set_index(grid, i, cur_ix);
    best_ix
}

/// Which extremal equilibrium simultaneous best-response iteration targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// Simultaneous best-response iteration from a grid extreme. Under
/// strategic complements this converges monotonically to the extremal Nash
/// equilibrium; without them it may fail to settle, which is an error.
pub fn extremal_nash<T: Scalar>(
    game: &GameSpec<T>,
    graph: &Graph,
    which: Extremum,
) -> Result<ActionProfile<T>> {
    let grid = check_grid_game(game, graph)?.to_vec();
    let n = game.n();
    let k = grid.len();
    let start = match which {
        Extremum::Min => 0,
        Extremum::Max => k - 1,
    };
    let mut indices = vec![start; n];
    let mut profile = ActionProfile::on_grid(&grid, indices.clone())?;
    let cap = 2 * n * k + 8;
    for _ in 0..cap {
        let mut next = indices.clone();
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = extremal_best_response(game, graph, &grid, &mut profile, &indices, i, which);
        }
        if next == indices {
            return ActionProfile::on_grid(&grid, indices);
        }
        for (i, &ix) in next.iter().enumerate() {
            profile.set_index(&grid, i, ix);
        }
        indices = next;
    }
    Err(Error::Numeric(
        "best-response iteration did not settle".into(),
    ))
}

/// Best response that breaks ties toward the requested extreme.
fn extremal_best_response<T: Scalar>(
    game: &GameSpec<T>,
    graph: &Graph,
    grid: &[T],
    profile: &mut ActionProfile<T>,
    indices: &[usize],
    i: usize,
    which: Extremum,
) -> usize {
    let cur_ix = indices[i];
    let order: Vec<usize> = match which {
        Extremum::Max => (0..grid.len()).rev().collect(),
        Extremum::Min => (0..grid.len()).collect(),
    };
    let mut best_ix = order[0];
    profile.set_index(grid, i, best_ix);
    let mut best = game.payoff(graph, profile, i);
    for &x in &order[1..] {
        profile.set_index(grid, i, x);
        let u = game.payoff(graph, profile, i);
        if u.exceeds(&best) {
            best = u;
            best_ix = x;
        }
    }
    profile.set_index(grid, i, cur_ix);
    best_ix
}
