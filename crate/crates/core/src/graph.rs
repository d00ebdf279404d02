//! Simple undirected graphs on up to 16 labeled players.
//!
//! Adjacency is stored as one 16-bit row per player, and a whole graph can
//! round-trip through a single `u128` edge bitmask, which makes exhaustive
//! enumeration a counter over `n*(n-1)/2`-bit integers.

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on the player count.
pub const MAX_PLAYERS: usize = 16;

/// Exhaustive graph enumeration is only allowed up to this many players
/// (2^21 graphs at seven players).
pub const MAX_ENUMERATION_PLAYERS: usize = 7;

/// A set of players as a 16-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PlayerSet(u16);

impl PlayerSet {
    pub fn empty() -> Self {
        PlayerSet(0)
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        let mut mask = 0u16;
        for p in players {
            debug_assert!(p < MAX_PLAYERS);
            mask |= 1 << p;
        }
        PlayerSet(mask)
    }

    pub fn contains(&self, player: usize) -> bool {
        player < MAX_PLAYERS && self.0 & (1 << player) != 0
    }

    pub fn with(&self, player: usize) -> Self {
        debug_assert!(player < MAX_PLAYERS);
        PlayerSet(self.0 | (1 << player))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: &PlayerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.0;
        (0..MAX_PLAYERS).filter(move |p| mask & (1 << p) != 0)
    }

    pub fn mask(&self) -> u16 {
        self.0
    }
}

impl fmt::Debug for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Number of unordered pairs on `n` players.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `{i, j}` (with `i < j`) among all pairs.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Undirected simple graph on `n` labeled players (0-indexed internally).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u8,
    rows: [u16; MAX_PLAYERS],
}

impl Graph {
    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(Error::PlayerCountOutOfRange(n));
        }
        Ok(())
    }

    fn check_player(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::PlayerOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_player(i)?;
        self.check_player(j)?;
        if i == j {
            return Err(Error::InvalidPair(i, j));
        }
        Ok(())
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        Ok(Graph {
            n: n as u8,
            rows: [0; MAX_PLAYERS],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        let full = if n == MAX_PLAYERS {
            u16::MAX
        } else {
            (1u16 << n) - 1
        };
        let mut rows = [0u16; MAX_PLAYERS];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = full & !(1 << i);
        }
        Ok(Graph { n: n as u8, rows })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            g = g.with_edge(i, j)?;
        }
        Ok(g)
    }

    /// Disjoint cliques, one per partition block; blocks must partition `0..n`.
    pub fn disjoint_cliques(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut seen = PlayerSet::empty();
        let mut g = Self::empty(n)?;
        for block in blocks {
            for &p in block {
                g.check_player(p)?;
                if seen.contains(p) {
                    return Err(Error::InvalidParameter(format!(
                        "player {p} appears in more than one block"
                    )));
                }
                seen = seen.with(p);
            }
            for (a, &i) in block.iter().enumerate() {
                for &j in &block[a + 1..] {
                    g = g.with_edge(i, j)?;
                }
            }
        }
        if seen.len() != n {
            return Err(Error::InvalidParameter(
                "blocks do not cover every player".into(),
            ));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n() && j < self.n() && self.rows[i] & (1 << j) != 0
    }

    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        self.check_pair(i, j)?;
        let mut g = *self;
        g.rows[i] |= 1 << j;
        g.rows[j] |= 1 << i;
        Ok(g)
    }

    pub fn without_edge(&self, i: usize, j: usize) -> Result<Self> {
        self.check_pair(i, j)?;
        let mut g = *self;
        g.rows[i] &= !(1 << j);
        g.rows[j] &= !(1 << i);
        Ok(g)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn neighbor_set(&self, i: usize) -> PlayerSet {
        PlayerSet(self.rows[i])
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.rows[i];
        (0..self.n()).filter(move |j| row & (1 << j) != 0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub fn is_empty_graph(&self) -> bool {
        self.edge_count() == 0
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == pair_count(self.n())
    }

    /// Packs the edge set into a bitmask in lexicographic pair order.
    pub fn edge_bits(&self) -> u128 {
        let mut bits = 0u128;
        for (i, j) in self.edges() {
            bits |= 1 << pair_index(self.n(), i, j);
        }
        bits
    }

    pub fn from_edge_bits(n: usize, bits: u128) -> Result<Self> {
        Self::check_n(n)?;
        let total = pair_count(n);
        if total < 128 && bits >> total != 0 {
            return Err(Error::InvalidParameter(format!(
                "edge bits exceed {total} pairs"
            )));
        }
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                if bits & (1 << pair_index(n, i, j)) != 0 {
                    g.rows[i] |= 1 << j;
                    g.rows[j] |= 1 << i;
                }
            }
        }
        Ok(g)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Graph with players renamed by `perm` (player `i` becomes `perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::InvalidParameter(
                "permutation length mismatch".into(),
            ));
        }
        let mut g = Self::empty(n)?;
        for (i, j) in self.edges() {
            g = g.with_edge(perm[i], perm[j])?;
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

/// Every graph on `n` players, ascending by edge bitmask.
pub fn all_graphs(n: usize) -> Result<impl Iterator<Item = Graph>> {
    if n > MAX_ENUMERATION_PLAYERS {
        return Err(Error::SizeGuard(format!(
            "exhaustive graph enumeration capped at {MAX_ENUMERATION_PLAYERS} players, got {n}"
        )));
    }
    Graph::check_n(n)?;
    let total: u128 = 1 << pair_count(n);
    Ok((0..total).map(move |bits| Graph::from_edge_bits(n, bits).expect("bitmask within range")))
}
