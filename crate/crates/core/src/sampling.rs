//! Random game generators for the property suites: sign-staircase tables
//! realizing each taxonomy cell, supermodular tables for the lattice
//! machinery, and random linear-quadratic instances with rational data.

use rand::Rng;

use crate::games::TableGame;
use crate::scalar::Ratio64;
use crate::structure::{ActionLink, SpilloverSign, TaxonomyCell};

/// Random table game whose link values realize the requested taxonomy cell:
/// the sign pattern of `g` is a monotone staircase, flipped per axis, with
/// magnitudes bounded away from zero.
pub fn staircase_table_game<R: Rng>(
    rng: &mut R,
    n: usize,
    grid_len: usize,
    cell: TaxonomyCell,
) -> TableGame<f64> {
    assert!(grid_len >= 2, "need at least two actions");
    assert!(
        cell.action_link != ActionLink::Neither && cell.spillovers != SpilloverSign::Neither,
        "cell must pick one direction per axis"
    );
    let k = grid_len;
    // Non-increasing thresholds t[y]: base sign is + exactly when x >= t[y].
    let mut t = vec![0usize; k];
    t[0] = rng.gen_range(1..=k - 1);
    for y in 1..k {
        t[y] = rng.gen_range(0..=t[y - 1]);
    }
    // Force a sign change along the partner axis as well.
    if t[k - 1] == t[0] {
        t[k - 1] = t[0] - 1;
    }
    let mut g = vec![vec![0.0f64; k]; k];
    for x in 0..k {
        for y in 0..k {
            let bx = match cell.action_link {
                ActionLink::Substitutes => k - 1 - x,
                _ => x,
            };
            let by = match cell.spillovers {
                SpilloverSign::Negative => k - 1 - y,
                _ => y,
            };
            let positive = bx >= t[by];
            g[x][y] = if positive {
                rng.gen_range(0.05..2.0)
            } else {
                -rng.gen_range(0.05..2.0)
            };
        }
    }
    let grid: Vec<f64> = (0..k).map(|x| x as f64).collect();
    let v: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    TableGame::new(grid, v, g).expect("generated tables are consistent")
}

/// Random supermodular table game for a diagonal cell (complements with
/// positive spillovers, or substitutes with negative spillovers): the link
/// value is monotone in both arguments with increasing differences, so the
/// induced game also exhibits strategic complements and convexity in links.
pub fn supermodular_table_game<R: Rng>(
    rng: &mut R,
    n: usize,
    grid_len: usize,
    cell: TaxonomyCell,
) -> TableGame<f64> {
    assert!(
        cell.is_diagonal(),
        "lattice construction needs a diagonal cell"
    );
    let k = grid_len;
    let mut a = vec![0.0f64; k];
    let mut b = vec![0.0f64; k];
    for x in 1..k {
        a[x] = a[x - 1] + rng.gen_range(0.05..0.6);
        b[x] = b[x - 1] + rng.gen_range(0.05..0.6);
    }
    let c = rng.gen_range(0.1..1.0);
    let raw = |x: usize, y: usize| a[x] + b[y] + c * (x as f64) * (y as f64);
    let mut g = vec![vec![0.0f64; k]; k];
    // Place the sign boundary so that both the first column and the first
    // row cross it, which pins the classification on both axes.
    let lo = raw(0, 0);
    let hi = raw(k - 1, 0).min(raw(0, k - 1));
    let mut threshold = lo + (hi - lo) * rng.gen_range(0.2..0.8);
    for _ in 0..16 {
        let min_abs = (0..k)
            .flat_map(|x| (0..k).map(move |y| (raw(x, y) - threshold).abs()))
            .fold(f64::INFINITY, f64::min);
        if min_abs > 1e-6 {
            break;
        }
        threshold += (hi - lo) * 1e-4;
    }
    for x in 0..k {
        for y in 0..k {
            let (bx, by) = match cell.action_link {
                ActionLink::Complements => (x, y),
                _ => (k - 1 - x, k - 1 - y),
            };
            g[x][y] = raw(bx, by) - threshold;
        }
    }
    let grid: Vec<f64> = (0..k).map(|x| x as f64).collect();
    let v: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(-0.5..0.5)).collect())
        .collect();
    TableGame::new(grid, v, g).expect("generated tables are consistent")
}

/// Random rational linear-quadratic instance: ascending positive `b`, and
/// spillover strength in `[0, 1]`.
pub fn random_lq_instance<R: Rng>(rng: &mut R, n: usize) -> (Vec<Ratio64>, Ratio64) {
    let mut b: Vec<Ratio64> = (0..n)
        .map(|_| Ratio64::new(rng.gen_range(1..=48), rng.gen_range(1..=6)).unwrap())
        .collect();
    b.sort_by(|x, y| (x.num() * y.den()).cmp(&(y.num() * x.den())));
    let alpha = Ratio64::new(rng.gen_range(0..=24), 24).unwrap();
    (b, alpha)
}
