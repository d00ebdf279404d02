//! Constructors for the concrete game families: linear-quadratic peer
//! games, status games, group-matching games, generic table games, and the
//! two-player game with no stable outcome.

use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{
    ActionDomain, ActionProfile, GameSpec, LinkFn, Outcome, OwnActionTables, PayoffFn,
};

/// Payoff of an action for a given type id.
pub type TypeValueFn<T> = Arc<dyn Fn(&T, usize) -> T + Send + Sync>;
use crate::scalar::{Ratio64, Scalar};

// ---------------------------------------------------------------------------
// Linear-quadratic peer game
// ---------------------------------------------------------------------------

/// Peer-effects game with payoff
/// `b_i s_i + alpha s_i sum_{j in G_i} s_j - (1 + d_i) s_i^2 / 2`,
/// i.e. idiosyncratic part `v_i(s) = b_i s_i - s_i^2 / 2` and link value
/// `g(x, y) = alpha x y - x^2 / 2`.
#[derive(Clone, Debug)]
pub struct LqPeerGame<T> {
    b: Vec<T>,
    alpha: T,
}

impl<T: Scalar> LqPeerGame<T> {
    pub fn new(b: Vec<T>, alpha: T) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidParameter("b must be nonempty".into()));
        }
        if !alpha.ge_zero() || !(T::one() - alpha.clone()).ge_zero() {
            return Err(Error::InvalidParameter("alpha outside [0,1]".into()));
        }
        if b.iter().any(|v| !v.gt_zero()) {
            return Err(Error::InvalidParameter(
                "private incentives must be positive".into(),
            ));
        }
        if b.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("b must be sorted ascending".into()));
        }
        Ok(LqPeerGame { b, alpha })
    }

    pub fn from_ratios(b: &[Ratio64], alpha: Ratio64) -> Result<Self> {
        Self::new(
            b.iter().map(Ratio64::to_scalar).collect(),
            alpha.to_scalar(),
        )
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    /// `g(x, y) = alpha x y - x^2 / 2`.
    pub fn link_value(&self, own: &T, partner: &T) -> T {
        self.alpha.clone() * own.clone() * partner.clone() - own.sq().half()
    }

    /// Optimal action for `i` given the graph and the others' actions.
    pub fn best_response(&self, graph: &Graph, profile: &ActionProfile<T>, i: usize) -> T {
        let mut spill = T::zero();
        for j in graph.neighbors(i) {
            spill = spill + profile.value(j).clone();
        }
        (self.b[i].clone() + self.alpha.clone() * spill) / T::from_int(1 + graph.degree(i) as i64)
    }

    pub fn game_spec(&self) -> GameSpec<T> {
        let b = self.b.clone();
        let alpha = self.alpha.clone();
        let v = Arc::new(move |s: &ActionProfile<T>, i: usize| {
            let x = s.value(i).clone();
            b[i].clone() * x.clone() - x.sq().half()
        });
        let g: LinkFn<T> = {
            let alpha = alpha.clone();
            Arc::new(move |x: &T, y: &T| alpha.clone() * x.clone() * y.clone() - x.sq().half())
        };
        GameSpec::separable(self.n(), ActionDomain::ContinuousNonneg, v, g).with_lq(self.clone())
    }
}

pub fn make_lq_peer_game<T: Scalar>(b: Vec<Ratio64>, alpha: Ratio64) -> Result<GameSpec<T>> {
    Ok(LqPeerGame::<T>::from_ratios(&b, alpha)?.game_spec())
}

// ---------------------------------------------------------------------------
// Status game
// ---------------------------------------------------------------------------

/// Status game with common private benefit `b` and status concern `delta`:
/// `u_i = b s_i - s_i^2 / 2 + sum_{j in G_i} (1 - delta max{s_j - s_i, 0})`.
///
/// Actions live on the grid `{0, h, 2h, ..., b + (n-1) delta}` where `h`
/// divides both `b` and `delta` exactly, so every clique equilibrium level
/// `b + k delta` is a grid point.
#[derive(Clone, Debug)]
pub struct StatusGame<T> {
    n: usize,
    b: T,
    delta: T,
    b_ratio: Ratio64,
    delta_ratio: Ratio64,
    grid: Arc<[T]>,
    step: Ratio64,
}

/// Largest grid the status discretization will accept.
const STATUS_GRID_CAP: usize = 4096;

impl<T: Scalar> StatusGame<T> {
    pub fn new(n: usize, b: Ratio64, delta: Ratio64) -> Result<Self> {
        if n == 0 || n > crate::graph::MAX_PLAYERS {
            return Err(Error::PlayerCountOutOfRange(n));
        }
        if !b.is_positive() {
            return Err(Error::InvalidParameter("b must be positive".into()));
        }
        if !delta.is_positive() {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
        // h = gcd(b, delta) over the rationals.
        let common_den = b.den() * delta.den();
        let b_num = b.num() * delta.den();
        let d_num = delta.num() * b.den();
        let g = b_num.gcd(&d_num);
        let step = Ratio64::new(g, common_den)?;
        // s_max = b + (n - 1) delta = (b_num + (n-1) d_num) / common_den.
        let top = b_num + (n as i64 - 1) * d_num;
        debug_assert_eq!(top % g, 0);
        let levels = (top / g) as usize + 1;
        if levels > STATUS_GRID_CAP {
            return Err(Error::SizeGuard(format!(
                "status grid would need {levels} points (cap {STATUS_GRID_CAP})"
            )));
        }
        let grid: Vec<T> = (0..levels)
            .map(|k| T::from_ratio(k as i64 * step.num(), step.den()))
            .collect();
        Ok(StatusGame {
            n,
            b: b.to_scalar(),
            delta: delta.to_scalar(),
            b_ratio: b,
            delta_ratio: delta,
            grid: grid.into(),
            step,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn delta(&self) -> &T {
        &self.delta
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    /// Grid spacing; divides both `b` and `delta` exactly.
    pub fn step(&self) -> Ratio64 {
        self.step
    }

    /// `g(x, y) = 1 - delta max{y - x, 0}`.
    pub fn link_value(&self, own: &T, partner: &T) -> T {
        let gap = partner.clone() - own.clone();
        if gap > T::zero() {
            T::one() - self.delta.clone() * gap
        } else {
            T::one()
        }
    }

    /// A link is viable only when the action gap is at most `1 / delta`.
    pub fn link_viable(&self, own: &T, partner: &T) -> bool {
        self.link_value(own, partner).ge_zero() && self.link_value(partner, own).ge_zero()
    }

    /// Grid index of the maximal clique action `b + (k - 1) delta`.
    fn clique_level_index(&self, clique_size: usize) -> usize {
        let b_num = self.b_ratio.num() * self.delta_ratio.den();
        let d_num = self.delta_ratio.num() * self.b_ratio.den();
        let g = b_num.gcd(&d_num);
        ((b_num + (clique_size as i64 - 1) * d_num) / g) as usize
    }

    /// Maximal equilibrium on a disjoint-clique graph: every member of a
    /// size-k clique plays `b + (k - 1) delta`.
    pub fn max_equilibrium(&self, blocks: &[Vec<usize>]) -> Result<Outcome<T>> {
        let graph = Graph::disjoint_cliques(self.n, blocks)?;
        let mut indices = vec![0usize; self.n];
        for block in blocks {
            let level = self.clique_level_index(block.len());
            for &p in block {
                indices[p] = level;
            }
        }
        Outcome::new(graph, ActionProfile::on_grid(&self.grid, indices)?)
    }

    pub fn game_spec(&self) -> GameSpec<T> {
        let b = self.b.clone();
        let delta = self.delta.clone();
        let v = Arc::new(move |s: &ActionProfile<T>, i: usize| {
            let x = s.value(i).clone();
            b.clone() * x.clone() - x.sq().half()
        });
        let g: LinkFn<T> = {
            let delta = delta.clone();
            Arc::new(move |x: &T, y: &T| {
                let gap = y.clone() - x.clone();
                if gap > T::zero() {
                    T::one() - delta.clone() * gap
                } else {
                    T::one()
                }
            })
        };
        let spec = GameSpec::separable(
            self.n,
            ActionDomain::Grid(self.grid.clone()),
            v.clone(),
            g.clone(),
        );
        let grid = &self.grid;
        let v_row: Vec<T> = grid
            .iter()
            .map(|x| self.b.clone() * x.clone() - x.sq().half())
            .collect();
        let tables = OwnActionTables {
            v: vec![v_row; self.n],
            g: grid
                .iter()
                .map(|x| grid.iter().map(|y| g(x, y)).collect())
                .collect(),
        };
        spec.with_own_tables(tables)
    }
}

pub fn make_status_game<T: Scalar>(n: usize, b: Ratio64, delta: Ratio64) -> Result<GameSpec<T>> {
    Ok(StatusGame::<T>::new(n, b, delta)?.game_spec())
}

/// Maximal-equilibrium actions for cliques of the given sizes, as plain
/// values: members of the k-th clique all play `b + (size_k - 1) delta`.
pub fn status_max_equilibrium<T: Scalar>(
    clique_sizes: &[usize],
    b: &T,
    delta: &T,
) -> ActionProfile<T> {
    let mut values = Vec::new();
    for &size in clique_sizes {
        let level = b.clone() + T::from_int(size as i64 - 1) * delta.clone();
        for _ in 0..size {
            values.push(level.clone());
        }
    }
    ActionProfile::continuous(values).expect("finite clique levels")
}

// ---------------------------------------------------------------------------
// Group-matching game
// ---------------------------------------------------------------------------

/// Finitely many types on a closed action interval; payoffs
/// `v(s_i, t_i) + sum_{j in G_i} g(s_i, s_j)`.
#[derive(Clone)]
pub struct GroupMatchGame<T> {
    types: Vec<usize>,
    type_ids: Vec<usize>,
    v: TypeValueFn<T>,
    g: LinkFn<T>,
    lo: T,
    hi: T,
    probe_points: usize,
}

impl<T: Scalar> GroupMatchGame<T> {
    pub fn new(
        types: Vec<usize>,
        v: TypeValueFn<T>,
        g: LinkFn<T>,
        interval: (T, T),
    ) -> Result<Self> {
        let (lo, hi) = interval;
        if types.is_empty() {
            return Err(Error::InvalidParameter("no players".into()));
        }
        if hi <= lo || !lo.is_finite_value() || !hi.is_finite_value() {
            return Err(Error::InvalidParameter(
                "action interval must be nondegenerate".into(),
            ));
        }
        let mut type_ids: Vec<usize> = types.clone();
        type_ids.sort_unstable();
        type_ids.dedup();
        let game = GroupMatchGame {
            types,
            type_ids,
            v,
            g,
            lo,
            hi,
            probe_points: 1000,
        };
        game.validate_best_responses()?;
        Ok(game)
    }

    /// Probe grid over the interval used for argmax searches.
    pub fn probe_grid(&self) -> Vec<T> {
        let steps = self.probe_points;
        let width = self.hi.clone() - self.lo.clone();
        (0..=steps)
            .map(|k| {
                self.lo.clone() + width.clone() * T::from_int(k as i64) / T::from_int(steps as i64)
            })
            .collect()
    }

    /// Each type's isolated payoff must be finite with a unique argmax on
    /// the probe grid.
    fn validate_best_responses(&self) -> Result<()> {
        let grid = self.probe_grid();
        for &t in &self.type_ids {
            let values: Vec<T> = grid.iter().map(|x| (self.v)(x, t)).collect();
            if values.iter().any(|u| !u.is_finite_value()) {
                return Err(Error::InvalidParameter(format!(
                    "v(., type {t}) is not finite on the action interval"
                )));
            }
            let mut best = 0usize;
            let mut ties = 1usize;
            for (k, u) in values.iter().enumerate().skip(1) {
                if *u > values[best] {
                    best = k;
                    ties = 1;
                } else if *u == values[best] {
                    ties += 1;
                }
            }
            if ties > 1 {
                return Err(Error::NonUniqueBestResponse(format!(
                    "type {t} has {ties} grid maximizers"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    /// Distinct type ids, ascending.
    pub fn type_ids(&self) -> &[usize] {
        &self.type_ids
    }

    pub fn interval(&self) -> (&T, &T) {
        (&self.lo, &self.hi)
    }

    pub fn idiosyncratic(&self, action: &T, type_id: usize) -> T {
        (self.v)(action, type_id)
    }

    pub fn link_value(&self, own: &T, partner: &T) -> T {
        (self.g)(own, partner)
    }

    /// Privately optimal action of a type: argmax of `v(., t)` on the probe
    /// grid.
    pub fn private_optimum(&self, type_id: usize) -> T {
        let grid = self.probe_grid();
        let mut best = grid[0].clone();
        let mut best_val = (self.v)(&best, type_id);
        for x in &grid[1..] {
            let u = (self.v)(x, type_id);
            if u > best_val {
                best_val = u;
                best = x.clone();
            }
        }
        best
    }

    pub fn game_spec(&self) -> GameSpec<T> {
        let v = self.v.clone();
        let types = self.types.clone();
        let idio = Arc::new(move |s: &ActionProfile<T>, i: usize| v(s.value(i), types[i]));
        GameSpec::separable(
            self.n(),
            ActionDomain::ContinuousNonneg,
            idio,
            self.g.clone(),
        )
    }
}

impl<T: Scalar> std::fmt::Debug for GroupMatchGame<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupMatchGame")
            .field("types", &self.types)
            .field("interval", &(&self.lo, &self.hi))
            .finish()
    }
}

pub fn make_group_match_game<T: Scalar>(
    types: Vec<usize>,
    v: TypeValueFn<T>,
    g: LinkFn<T>,
    interval: (T, T),
) -> Result<GameSpec<T>> {
    Ok(GroupMatchGame::new(types, v, g, interval)?.game_spec())
}

// ---------------------------------------------------------------------------
// Table game
// ---------------------------------------------------------------------------

/// Fully tabulated separable game on a finite grid: `v[i][x]` is player i's
/// own-action payoff, `g[x][y]` the link value (row = own action index).
#[derive(Clone, Debug)]
pub struct TableGame<T> {
    grid: Arc<[T]>,
    v: Vec<Vec<T>>,
    g: Vec<Vec<T>>,
}

impl<T: Scalar> TableGame<T> {
    pub fn new(grid: Vec<T>, v: Vec<Vec<T>>, g: Vec<Vec<T>>) -> Result<Self> {
        let domain = ActionDomain::grid(grid)?;
        let grid = match domain {
            ActionDomain::Grid(g) => g,
            ActionDomain::ContinuousNonneg => unreachable!(),
        };
        let k = grid.len();
        if v.is_empty() || v.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidParameter(format!(
                "v must be one row of {k} entries per player"
            )));
        }
        if g.len() != k || g.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidParameter(format!(
                "g must be a {k}x{k} table"
            )));
        }
        Ok(TableGame { grid, v, g })
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn g_table(&self) -> &[Vec<T>] {
        &self.g
    }

    fn position(grid: &[T], value: &T) -> usize {
        grid.iter()
            .position(|x| x == value)
            .expect("table games evaluate on-grid actions only")
    }

    pub fn game_spec(&self) -> GameSpec<T> {
        let v_tab = self.v.clone();
        let grid_for_v = self.grid.clone();
        let idio = Arc::new(move |s: &ActionProfile<T>, i: usize| {
            let x = s
                .index(i)
                .unwrap_or_else(|| Self::position(&grid_for_v, s.value(i)));
            v_tab[i][x].clone()
        });
        let g_tab = self.g.clone();
        let grid_for_g = self.grid.clone();
        let g: LinkFn<T> = Arc::new(move |x: &T, y: &T| {
            g_tab[Self::position(&grid_for_g, x)][Self::position(&grid_for_g, y)].clone()
        });
        GameSpec::separable(self.n(), ActionDomain::Grid(self.grid.clone()), idio, g)
            .with_own_tables(OwnActionTables {
                v: self.v.clone(),
                g: self.g.clone(),
            })
    }
}

pub fn make_table_game<T: Scalar>(
    grid: Vec<T>,
    v_tables: Vec<Vec<T>>,
    g_table: Vec<Vec<T>>,
) -> Result<GameSpec<T>> {
    Ok(TableGame::new(grid, v_tables, g_table)?.game_spec())
}

// ---------------------------------------------------------------------------
// Two-player game with no stable outcome
// ---------------------------------------------------------------------------

/// Two players on actions {0, 1}; payoff `s_i` on the empty graph and
/// `2 s_{-i} + (2 s_i s_{-i} - 1)/4 - s_i` on the complete graph. Not
/// separable, so it is stored as a direct payoff table.
pub fn make_nonexistence_example<T: Scalar>() -> GameSpec<T> {
    let grid = vec![T::zero(), T::one()];
    let payoff: PayoffFn<T> = Arc::new(|graph: &Graph, s: &ActionProfile<T>, i: usize| {
        let own = s.value(i).clone();
        let other = s.value(1 - i).clone();
        if graph.is_empty_graph() {
            own
        } else {
            let two = T::from_int(2);
            let quarter = T::from_ratio(1, 4);
            two.clone() * other.clone() + (two * own.clone() * other - T::one()) * quarter - own
        }
    });
    GameSpec::from_payoff(2, ActionDomain::grid(grid).expect("two-point grid"), payoff)
}
