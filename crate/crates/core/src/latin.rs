//! Generation and enumeration of Latin squares, represented as their graphs
//! (0/1 cubic matrices with all line sums 1).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::PairSet;
use crate::{nat, Matrix3};

fn graph_of(symbols: &[Vec<usize>]) -> Matrix3 {
    let n = symbols.len();
    let mut g = Matrix3::zeros((n, n, n));
    for (i0, row) in symbols.iter().enumerate() {
        for (j0, &v) in row.iter().enumerate() {
            g.set(i0 + 1, j0 + 1, v, nat(1));
        }
    }
    g
}

/// The cyclic Latin square of order `n`: `i * j = ((i + j - 2) mod n) + 1`.
pub fn cyclic(n: usize) -> Matrix3 {
    assert!(n >= 1, "order must be positive");
    let symbols: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).map(|j| ((i + j) % n) + 1).collect()).collect();
    graph_of(&symbols)
}

/// All Latin squares of order `n`, in lexicographic order of their symbol
/// tables. Exhaustive search; practical for `n <= 4` (576 squares).
pub fn enumerate(n: usize) -> Vec<Matrix3> {
    assert!(n >= 1, "order must be positive");
    let mut out = Vec::new();
    let mut grid = vec![vec![0usize; n]; n];
    let mut row_used = vec![vec![false; n + 1]; n];
    let mut col_used = vec![vec![false; n + 1]; n];
    fn go(
        pos: usize,
        n: usize,
        grid: &mut Vec<Vec<usize>>,
        row_used: &mut Vec<Vec<bool>>,
        col_used: &mut Vec<Vec<bool>>,
        out: &mut Vec<Matrix3>,
    ) {
        if pos == n * n {
            out.push(graph_of(grid));
            return;
        }
        let (i, j) = (pos / n, pos % n);
        for v in 1..=n {
            if !row_used[i][v] && !col_used[j][v] {
                row_used[i][v] = true;
                col_used[j][v] = true;
                grid[i][j] = v;
                go(pos + 1, n, grid, row_used, col_used, out);
                row_used[i][v] = false;
                col_used[j][v] = false;
            }
        }
    }
    go(0, n, &mut grid, &mut row_used, &mut col_used, &mut out);
    out
}

/// A random Latin square of order `n` by backtracking with shuffled symbol
/// order per cell. Fast for desk-scale orders (`n <= 10` or so); the
/// distribution is not uniform.
pub fn random<G: Rng>(n: usize, rng: &mut G) -> Matrix3 {
    assert!(n >= 1, "order must be positive");
    let mut grid = vec![vec![0usize; n]; n];
    let mut row_used = vec![vec![false; n + 1]; n];
    let mut col_used = vec![vec![false; n + 1]; n];
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let mut symbols: Vec<usize> = (1..=n).collect();
        symbols.shuffle(rng);
        choices.push(symbols);
    }
    fn go(
        pos: usize,
        n: usize,
        grid: &mut Vec<Vec<usize>>,
        row_used: &mut Vec<Vec<bool>>,
        col_used: &mut Vec<Vec<bool>>,
        choices: &[Vec<usize>],
    ) -> bool {
        if pos == n * n {
            return true;
        }
        let (i, j) = (pos / n, pos % n);
        for &v in &choices[pos] {
            if !row_used[i][v] && !col_used[j][v] {
                row_used[i][v] = true;
                col_used[j][v] = true;
                grid[i][j] = v;
                if go(pos + 1, n, grid, row_used, col_used, choices) {
                    return true;
                }
                row_used[i][v] = false;
                col_used[j][v] = false;
            }
        }
        false
    }
    let ok = go(0, n, &mut grid, &mut row_used, &mut col_used, &choices);
    assert!(ok, "backtracking fill cannot fail for a fresh square");
    graph_of(&grid)
}

/// Deletes each unit entry of a partial Latin square independently with the
/// given probability.
pub fn delete_entries<G: Rng>(square: &Matrix3, prob: f64, rng: &mut G) -> Matrix3 {
    let mut out = square.clone();
    for (i, j, l) in square.support() {
        if rng.gen_bool(prob) {
            out.set(i, j, l, nat(0));
        }
    }
    out
}

/// The defined domain of a partial Latin square: the pairs `(i,j)` whose
/// vertical line sums to 1.
pub fn defined_domain(square: &Matrix3) -> Result<PairSet> {
    let n = square.side()?;
    let one = nat(1);
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let sum = square.line_sum(&crate::tensor::Line3::vertical(i, j))?;
            if sum > one {
                return Err(Error::validation(format!(
                    "vertical line ({i},{j}) sums to {sum}; not a partial Latin square"
                )));
            }
            if sum == one {
                pairs.push((i, j));
            }
        }
    }
    PairSet::new(n, pairs)
}
