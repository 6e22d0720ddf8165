//! 2- and 3-indexed dense matrices, lines and line sums, ordered partitions,
//! the quotient operation, and the Latin-square predicates.
//!
//! All public indexing is 1-based, matching the convention `(n) = {1,...,n}`;
//! storage is 0-based row-major internally. Entries are validated nonnegative
//! at construction time.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::{Matrix2, Matrix3, Nat};

/// A line of a 2-indexed matrix: `axis` is the index that runs, `fixed` the
/// value of the other index.
///
/// `Line2::column(a)` runs the first index with the second fixed at `a`;
/// `Line2::row(a)` runs the second index with the first fixed at `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line2 {
    axis: usize,
    fixed: usize,
}

impl Line2 {
    pub fn new(axis: usize, fixed: usize) -> Result<Self> {
        if !(1..=2).contains(&axis) {
            return Err(Error::index(format!("2-indexed line axis must be 1 or 2, got {axis}")));
        }
        if fixed == 0 {
            return Err(Error::index("line indices are 1-based; got 0"));
        }
        Ok(Line2 { axis, fixed })
    }

    /// The line `{(x, a)}`: first index runs.
    pub fn column(a: usize) -> Self {
        Line2::new(1, a).expect("valid column line")
    }

    /// The line `{(a, x)}`: second index runs.
    pub fn row(a: usize) -> Self {
        Line2::new(2, a).expect("valid row line")
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn fixed(&self) -> usize {
        self.fixed
    }
}

/// A line of a 3-indexed matrix: `axis` is the index that runs, `fixed` holds
/// the values of the two remaining indices in increasing axis order.
///
/// Conventionally: axis 1 is a horizontal line `{(x,a,b)}`, axis 2 a
/// transversal line `{(a,x,b)}`, axis 3 a vertical line `{(a,b,x)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line3 {
    axis: usize,
    fixed: (usize, usize),
}

impl Line3 {
    pub fn new(axis: usize, fixed: (usize, usize)) -> Result<Self> {
        if !(1..=3).contains(&axis) {
            return Err(Error::index(format!("3-indexed line axis must be 1, 2 or 3, got {axis}")));
        }
        if fixed.0 == 0 || fixed.1 == 0 {
            return Err(Error::index("line indices are 1-based; got 0"));
        }
        Ok(Line3 { axis, fixed })
    }

    /// `{(x, a, b)}`.
    pub fn horizontal(a: usize, b: usize) -> Self {
        Line3::new(1, (a, b)).expect("valid horizontal line")
    }

    /// `{(a, x, b)}`.
    pub fn transversal(a: usize, b: usize) -> Self {
        Line3::new(2, (a, b)).expect("valid transversal line")
    }

    /// `{(a, b, x)}`.
    pub fn vertical(a: usize, b: usize) -> Self {
        Line3::new(3, (a, b)).expect("valid vertical line")
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn fixed(&self) -> (usize, usize) {
        self.fixed
    }
}

/// Dense 2-indexed matrix with nonnegative entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid2<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Grid2<T> {
    /// Builds an `rows x cols` matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims(format!("matrix sizes must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| *v < T::zero()) {
            return Err(Error::validation("matrix entries must be nonnegative"));
        }
        Ok(Grid2 { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::dims("ragged rows"));
        }
        Grid2::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Grid2::new(rows, cols, vec![T::zero(); rows * cols]).expect("positive sizes")
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut g = Grid2::zeros(n, n);
        for i in 1..=n {
            g.set(i, i, T::one());
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        assert!(
            (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j),
            "entry ({i},{j}) out of range for {}x{}",
            self.rows,
            self.cols
        );
        (i - 1) * self.cols + (j - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[self.offset(i, j)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        let o = self.offset(i, j);
        &mut self.data[o]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(v >= T::zero());
        let o = self.offset(i, j);
        self.data[o] = v;
    }

    pub fn line_sum(&self, line: &Line2) -> Result<T> {
        let bound = if line.axis == 1 { self.cols } else { self.rows };
        if line.fixed > bound {
            return Err(Error::index(format!(
                "line fixed index {} exceeds size {bound}",
                line.fixed
            )));
        }
        let mut sum = T::zero();
        match line.axis {
            1 => {
                for i in 1..=self.rows {
                    sum += self.get(i, line.fixed).clone();
                }
            }
            _ => {
                for j in 1..=self.cols {
                    sum += self.get(line.fixed, j).clone();
                }
            }
        }
        Ok(sum)
    }

    pub fn row_sums(&self) -> Vec<T> {
        (1..=self.rows)
            .map(|i| self.line_sum(&Line2::row(i)).expect("in range"))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        (1..=self.cols)
            .map(|j| self.line_sum(&Line2::column(j)).expect("in range"))
            .collect()
    }

    /// Sum of all entries.
    pub fn total(&self) -> T {
        let mut sum = T::zero();
        for v in &self.data {
            sum += v.clone();
        }
        sum
    }

    pub fn transpose(&self) -> Self {
        let mut out = Grid2::zeros(self.cols, self.rows);
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Quotient along `axis` (1 = first index, 2 = second): entries are summed
    /// over the blocks of `sigma` in that coordinate.
    ///
    /// ```
    /// use glsq::tensor::{mat2, Partition};
    ///
    /// let m = mat2(&[&[0, 3], &[5, 2]]);
    /// let sigma = Partition::new(vec![vec![1, 2]])?;
    /// assert_eq!(m.quotient(1, &sigma)?, mat2(&[&[5, 5]]));
    /// assert_eq!(m.quotient(2, &sigma)?, mat2(&[&[3], &[7]]));
    /// # Ok::<(), glsq::Error>(())
    /// ```
    pub fn quotient(&self, axis: usize, sigma: &Partition) -> Result<Self> {
        if !(1..=2).contains(&axis) {
            return Err(Error::index(format!("quotient axis must be 1 or 2, got {axis}")));
        }
        let axis_len = if axis == 1 { self.rows } else { self.cols };
        if sigma.n() != axis_len {
            return Err(Error::partition(format!(
                "partition of ({}) applied to axis of length {axis_len}",
                sigma.n()
            )));
        }
        let k = sigma.num_blocks();
        let (r, c) = if axis == 1 { (k, self.cols) } else { (self.rows, k) };
        let mut out = Grid2::zeros(r, c);
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                let (qi, qj) = if axis == 1 {
                    (sigma.block_of(i), j)
                } else {
                    (i, sigma.block_of(j))
                };
                *out.get_mut(qi, qj) += self.get(i, j).clone();
            }
        }
        Ok(out)
    }

    /// True iff the matrix is square and every line sum equals 1, i.e. it is
    /// the graph of a permutation.
    pub fn is_permutation(&self) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::dims(format!(
                "permutation test requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let one = T::one();
        Ok(self.row_sums().iter().all(|s| *s == one) && self.col_sums().iter().all(|s| *s == one))
    }

    /// 1-based positions of the nonzero entries, in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                if *self.get(i, j) != T::zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Dense 3-indexed matrix with nonnegative entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid3<T> {
    dims: (usize, usize, usize),
    data: Vec<T>,
}

impl<T: Scalar> Grid3<T> {
    pub fn new(dims: (usize, usize, usize), data: Vec<T>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::dims(format!("matrix sizes must be positive, got {n1}x{n2}x{n3}")));
        }
        if data.len() != n1 * n2 * n3 {
            return Err(Error::dims(format!(
                "expected {} entries for a {n1}x{n2}x{n3} matrix, got {}",
                n1 * n2 * n3,
                data.len()
            )));
        }
        if data.iter().any(|v| *v < T::zero()) {
            return Err(Error::validation("matrix entries must be nonnegative"));
        }
        Ok(Grid3 { dims, data })
    }

    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        Grid3::new(dims, vec![T::zero(); dims.0 * dims.1 * dims.2]).expect("positive sizes")
    }

    /// The 0/1 matrix supported exactly on `cells` (1-based), all inside a
    /// `k x k x k` cube.
    pub fn indicator(k: usize, cells: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let mut g = Grid3::zeros((k, k, k));
        for (i, j, l) in cells {
            if i == 0 || j == 0 || l == 0 || i > k || j > k || l > k {
                return Err(Error::index(format!("cell ({i},{j},{l}) outside ({k})^3")));
            }
            g.set(i, j, l, T::one());
        }
        Ok(g)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn is_cubic(&self) -> bool {
        self.dims.0 == self.dims.1 && self.dims.1 == self.dims.2
    }

    /// Side length of a cubic matrix.
    pub fn side(&self) -> Result<usize> {
        if self.is_cubic() {
            Ok(self.dims.0)
        } else {
            Err(Error::dims(format!(
                "expected a cubic matrix, got {}x{}x{}",
                self.dims.0, self.dims.1, self.dims.2
            )))
        }
    }

    fn offset(&self, i: usize, j: usize, l: usize) -> usize {
        let (n1, n2, n3) = self.dims;
        assert!(
            (1..=n1).contains(&i) && (1..=n2).contains(&j) && (1..=n3).contains(&l),
            "entry ({i},{j},{l}) out of range for {n1}x{n2}x{n3}"
        );
        ((i - 1) * n2 + (j - 1)) * n3 + (l - 1)
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> &T {
        &self.data[self.offset(i, j, l)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize, l: usize) -> &mut T {
        let o = self.offset(i, j, l);
        &mut self.data[o]
    }

    pub fn set(&mut self, i: usize, j: usize, l: usize, v: T) {
        debug_assert!(v >= T::zero());
        let o = self.offset(i, j, l);
        self.data[o] = v;
    }

    pub fn line_sum(&self, line: &Line3) -> Result<T> {
        let (n1, n2, n3) = self.dims;
        let (run, fixed_bounds) = match line.axis {
            1 => (n1, (n2, n3)),
            2 => (n2, (n1, n3)),
            _ => (n3, (n1, n2)),
        };
        let (a, b) = line.fixed;
        if a > fixed_bounds.0 || b > fixed_bounds.1 {
            return Err(Error::index(format!(
                "line fixed indices ({a},{b}) exceed sizes {fixed_bounds:?}"
            )));
        }
        let mut sum = T::zero();
        for x in 1..=run {
            let v = match line.axis {
                1 => self.get(x, a, b),
                2 => self.get(a, x, b),
                _ => self.get(a, b, x),
            };
            sum += v.clone();
        }
        Ok(sum)
    }

    pub fn total(&self) -> T {
        let mut sum = T::zero();
        for v in &self.data {
            sum += v.clone();
        }
        sum
    }

    /// Quotient along `axis` (1, 2 or 3).
    pub fn quotient(&self, axis: usize, sigma: &Partition) -> Result<Self> {
        if !(1..=3).contains(&axis) {
            return Err(Error::index(format!("quotient axis must be 1, 2 or 3, got {axis}")));
        }
        let (n1, n2, n3) = self.dims;
        let axis_len = [n1, n2, n3][axis - 1];
        if sigma.n() != axis_len {
            return Err(Error::partition(format!(
                "partition of ({}) applied to axis of length {axis_len}",
                sigma.n()
            )));
        }
        let k = sigma.num_blocks();
        let mut out_dims = [n1, n2, n3];
        out_dims[axis - 1] = k;
        let mut out = Grid3::zeros((out_dims[0], out_dims[1], out_dims[2]));
        for i in 1..=n1 {
            for j in 1..=n2 {
                for l in 1..=n3 {
                    let mut c = [i, j, l];
                    c[axis - 1] = sigma.block_of(c[axis - 1]);
                    *out.get_mut(c[0], c[1], c[2]) += self.get(i, j, l).clone();
                }
            }
        }
        Ok(out)
    }

    /// `((M o_1 sigma) o_2 sigma) o_3 sigma` for a cubic matrix. The axis
    /// order is irrelevant; quotients on distinct axes commute.
    pub fn triple_quotient(&self, sigma: &Partition) -> Result<Self> {
        self.side()?;
        self.quotient(1, sigma)?.quotient(2, sigma)?.quotient(3, sigma)
    }

    /// True iff all `3n^2` line sums equal 1 (the graph of a quasigroup).
    pub fn is_latin(&self) -> Result<bool> {
        let n = self.side()?;
        let one = T::one();
        for a in 1..=n {
            for b in 1..=n {
                for axis in 1..=3 {
                    if self.line_sum(&Line3::new(axis, (a, b))?)? != one {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// True iff every line sum is at most 1 and every vertical line over `s`
    /// sums to exactly 1 (the graph of a partial S-quasigroup).
    pub fn is_partial_s_latin(&self, s: &PairSet) -> Result<bool> {
        let n = self.side()?;
        if s.bound() != n {
            return Err(Error::index(format!(
                "pair set over ({}) applied to a matrix of side {n}",
                s.bound()
            )));
        }
        let one = T::one();
        for a in 1..=n {
            for b in 1..=n {
                for axis in 1..=3 {
                    let sum = self.line_sum(&Line3::new(axis, (a, b))?)?;
                    if sum > one {
                        return Ok(false);
                    }
                    if axis == 3 && s.contains(a, b) && sum != one {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// 1-based coordinates of the nonzero entries, in lexicographic order.
    pub fn support(&self) -> Vec<(usize, usize, usize)> {
        let (n1, n2, n3) = self.dims;
        let mut out = Vec::new();
        for i in 1..=n1 {
            for j in 1..=n2 {
                for l in 1..=n3 {
                    if *self.get(i, j, l) != T::zero() {
                        out.push((i, j, l));
                    }
                }
            }
        }
        out
    }

    /// The 2-indexed slice with the given axis fixed at `c`; remaining axes
    /// keep their relative order.
    pub fn slice(&self, axis: usize, c: usize) -> Result<Grid2<T>> {
        let (n1, n2, n3) = self.dims;
        let bound = match axis {
            1 => n1,
            2 => n2,
            3 => n3,
            _ => return Err(Error::index(format!("slice axis must be 1, 2 or 3, got {axis}"))),
        };
        if c == 0 || c > bound {
            return Err(Error::index(format!("slice index {c} out of range for axis {axis}")));
        }
        let (r, s) = match axis {
            1 => (n2, n3),
            2 => (n1, n3),
            _ => (n1, n2),
        };
        let mut out = Grid2::zeros(r, s);
        for i in 1..=r {
            for j in 1..=s {
                let v = match axis {
                    1 => self.get(c, i, j),
                    2 => self.get(i, c, j),
                    _ => self.get(i, j, c),
                };
                out.set(i, j, v.clone());
            }
        }
        Ok(out)
    }
}

/// An ordered partition `{P_1,...,P_k}` of `(n)` into nonempty blocks.
///
/// Blocks are stored sorted ascending; the block order itself is the order
/// given at construction, which matters (quotient axes are indexed by it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::partition("a partition needs at least one block"));
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut block_of = vec![0usize; n];
        let mut sorted = Vec::with_capacity(blocks.len());
        for (bi, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::partition(format!("block {} is empty", bi + 1)));
            }
            block.sort_unstable();
            for &x in &block {
                if x == 0 || x > n {
                    return Err(Error::partition(format!(
                        "element {x} outside (1..={n}); blocks must cover (n) exactly"
                    )));
                }
                if block_of[x - 1] != 0 {
                    return Err(Error::partition(format!("element {x} appears in two blocks")));
                }
                block_of[x - 1] = bi + 1;
            }
            sorted.push(block);
        }
        // Every slot filled: sizes sum to n and there are no duplicates.
        Ok(Partition { n, blocks: sorted, block_of })
    }

    /// The canonical partition with the given block sizes: `P_1 = {1..r_1}`,
    /// `P_2 = {r_1+1..r_1+r_2}`, and so on. All sizes must be positive.
    pub fn canonical(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::partition("block sizes must be positive"));
        }
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut next = 1usize;
        for &r in sizes {
            blocks.push((next..next + r).collect());
            next += r;
        }
        Partition::new(blocks)
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Partition::canonical(&vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// The block `P_i` (1-based), sorted ascending.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i - 1]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// 1-based index of the block containing `x`.
    pub fn block_of(&self, x: usize) -> usize {
        assert!((1..=self.n).contains(&x), "element {x} outside (1..={})", self.n);
        self.block_of[x - 1]
    }
}

/// A set of 1-based index pairs inside `(k) x (k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    bound: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl PairSet {
    pub fn new(bound: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            if i == 0 || j == 0 || i > bound || j > bound {
                return Err(Error::index(format!("pair ({i},{j}) outside ({bound})^2")));
            }
            set.insert((i, j));
        }
        Ok(PairSet { bound, pairs: set })
    }

    pub fn empty(bound: usize) -> Self {
        PairSet { bound, pairs: BTreeSet::new() }
    }

    pub fn full(bound: usize) -> Self {
        let pairs = (1..=bound).flat_map(|i| (1..=bound).map(move |j| (i, j))).collect();
        PairSet { bound, pairs }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// The blow-up `S' = U_{(i,j) in S} P_i x P_j` of a pair set over the
    /// blocks of `sigma`, as a pair set over `(n)`.
    pub fn expand(&self, sigma: &Partition) -> Result<PairSet> {
        if self.bound != sigma.num_blocks() {
            return Err(Error::index(format!(
                "pair set over ({}) expanded by a partition with {} blocks",
                self.bound,
                sigma.num_blocks()
            )));
        }
        let mut pairs = BTreeSet::new();
        for (i, j) in self.iter() {
            for &a in sigma.block(i) {
                for &b in sigma.block(j) {
                    pairs.insert((a, b));
                }
            }
        }
        Ok(PairSet { bound: sigma.n(), pairs })
    }
}

/// Convenience constructor for integer 2-indexed matrices; panics on ragged
/// input. Intended for tests and examples.
pub fn mat2(rows: &[&[u64]]) -> Matrix2 {
    Grid2::from_rows(rows.iter().map(|r| r.iter().map(|&v| Nat::from(v)).collect()).collect())
        .expect("well-formed literal")
}

/// Convenience constructor for integer 3-indexed matrices from `levels[i][j][l]`;
/// panics on ragged input. Intended for tests and examples.
pub fn mat3(levels: &[&[&[u64]]]) -> Matrix3 {
    let n1 = levels.len();
    let n2 = levels.first().map_or(0, |s| s.len());
    let n3 = levels.first().and_then(|s| s.first()).map_or(0, |r| r.len());
    let mut data = Vec::with_capacity(n1 * n2 * n3);
    for slab in levels {
        assert_eq!(slab.len(), n2, "ragged literal");
        for row in *slab {
            assert_eq!(row.len(), n3, "ragged literal");
            data.extend(row.iter().map(|&v| Nat::from(v)));
        }
    }
    Grid3::new((n1, n2, n3), data).expect("well-formed literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nat;

    /// The worked 4x4 example matrix.
    pub(crate) fn example_m() -> Matrix2 {
        mat2(&[&[0, 3, 3, 1], &[5, 2, 4, 0], &[1, 1, 0, 1], &[2, 3, 5, 0]])
    }

    fn halves() -> Partition {
        Partition::new(vec![vec![1, 2], vec![3, 4]]).unwrap()
    }

    pub(crate) fn order2_latin() -> Matrix3 {
        mat3(&[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]])
    }

    #[test]
    fn line_sums() {
        let id = Matrix2::identity(2);
        for a in 1..=2 {
            assert_eq!(id.line_sum(&Line2::row(a)).unwrap(), nat(1));
            assert_eq!(id.line_sum(&Line2::column(a)).unwrap(), nat(1));
        }

        let m = example_m();
        assert_eq!(m.line_sum(&Line2::row(1)).unwrap(), nat(7));
        assert_eq!(m.line_sum(&Line2::column(3)).unwrap(), nat(12));

        let z = Matrix3::zeros((3, 3, 3));
        for axis in 1..=3 {
            assert_eq!(z.line_sum(&Line3::new(axis, (2, 3)).unwrap()).unwrap(), nat(0));
        }

        assert!(m.line_sum(&Line2::row(5)).is_err());
    }

    #[test]
    fn quotient_of_worked_example() {
        let m = example_m();
        let sigma = halves();

        let q1 = m.quotient(1, &sigma).unwrap();
        assert_eq!(q1, mat2(&[&[5, 5, 7, 1], &[3, 4, 5, 1]]));

        let q2 = m.quotient(2, &sigma).unwrap();
        assert_eq!(q2, mat2(&[&[3, 4], &[7, 4], &[2, 1], &[5, 5]]));

        let q12 = q1.quotient(2, &sigma).unwrap();
        let q21 = q2.quotient(1, &sigma).unwrap();
        let expected = mat2(&[&[10, 8], &[7, 6]]);
        assert_eq!(q12, expected);
        assert_eq!(q21, expected);
    }

    #[test]
    fn quotient_by_singletons_is_identity() {
        let m = example_m();
        let sigma = Partition::singletons(4).unwrap();
        assert_eq!(m.quotient(1, &sigma).unwrap(), m);
        assert_eq!(m.quotient(2, &sigma).unwrap(), m);

        let l = order2_latin();
        let s2 = Partition::singletons(2).unwrap();
        assert_eq!(l.triple_quotient(&s2).unwrap(), l);
    }

    #[test]
    fn quotient_rejects_wrong_partition() {
        let m = example_m();
        let sigma = Partition::new(vec![vec![1, 2], vec![3]]).unwrap();
        assert!(m.quotient(1, &sigma).is_err());
    }

    #[test]
    fn triple_quotient_collapses_latin_square() {
        let l = order2_latin();
        let sigma = Partition::new(vec![vec![1, 2]]).unwrap();
        let q = l.triple_quotient(&sigma).unwrap();
        assert_eq!(q.dims(), (1, 1, 1));
        assert_eq!(*q.get(1, 1, 1), nat(4));
    }

    #[test]
    fn triple_quotient_requires_cubic() {
        let m: Matrix3 = Grid3::zeros((2, 2, 3));
        assert!(m.triple_quotient(&Partition::singletons(2).unwrap()).is_err());
    }

    #[test]
    fn latin_predicate() {
        // Graph of the cyclic group of order 3.
        let mut c3 = Matrix3::zeros((3, 3, 3));
        for i in 1..=3 {
            for j in 1..=3 {
                c3.set(i, j, ((i + j - 2) % 3) + 1, nat(1));
            }
        }
        assert!(c3.is_latin().unwrap());

        let ones = mat3(&[&[&[1, 1], &[1, 1]], &[&[1, 1], &[1, 1]]]);
        assert!(!ones.is_latin().unwrap());

        let unit = mat3(&[&[&[1]]]);
        assert!(unit.is_latin().unwrap());

        assert!(Matrix3::zeros((1, 2, 2)).is_latin().is_err());
    }

    #[test]
    fn partial_latin_predicate() {
        let z = Matrix3::zeros((3, 3, 3));
        assert!(z.is_partial_s_latin(&PairSet::empty(3)).unwrap());

        let l = order2_latin();
        assert!(l.is_partial_s_latin(&PairSet::full(2)).unwrap());

        let mut deleted = l.clone();
        deleted.set(1, 1, 1, nat(0));
        assert!(!deleted.is_partial_s_latin(&PairSet::full(2)).unwrap());
        // Without the demand on (1,1) the deleted square is still partial Latin.
        assert!(deleted
            .is_partial_s_latin(&PairSet::new(2, [(1, 2), (2, 1), (2, 2)]).unwrap())
            .unwrap());

        assert!(l.is_partial_s_latin(&PairSet::empty(3)).is_err());
    }

    #[test]
    fn permutation_predicate() {
        assert!(Matrix2::identity(3).is_permutation().unwrap());
        assert!(mat2(&[&[0, 1], &[1, 0]]).is_permutation().unwrap());
        assert!(!mat2(&[&[1, 1], &[1, 1]]).is_permutation().unwrap());
        assert!(mat2(&[&[1, 0]]).is_permutation().is_err());
    }

    #[test]
    fn latin_implies_partial_full() {
        let l = order2_latin();
        assert!(l.is_latin().unwrap());
        assert!(l.is_partial_s_latin(&PairSet::full(2)).unwrap());
    }

    #[test]
    fn quotient_of_partial_square_respects_block_bounds() {
        // The easy direction: quotients of a partial Latin square have line
        // sums at most r_i * r_j, with vertical equality on fully demanded
        // block products.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let n = rng.gen_range(2..=6);
            let full = crate::latin::random(n, &mut rng);
            let partial = crate::latin::delete_entries(&full, 0.3, &mut rng);
            let domain = crate::latin::defined_domain(&partial).unwrap();
            let sizes = {
                let mut left = n;
                let mut out = Vec::new();
                while left > 0 {
                    let take = rng.gen_range(1..=left);
                    out.push(take);
                    left -= take;
                }
                out
            };
            let sigma = Partition::canonical(&sizes).unwrap();
            let m = partial.triple_quotient(&sigma).unwrap();
            for i in 1..=sizes.len() {
                for j in 1..=sizes.len() {
                    let bound = nat((sizes[i - 1] * sizes[j - 1]) as u64);
                    for axis in 1..=3 {
                        let sum = m.line_sum(&Line3::new(axis, (i, j)).unwrap()).unwrap();
                        assert!(sum <= bound);
                        let demanded = sigma
                            .block(i)
                            .iter()
                            .all(|&a| sigma.block(j).iter().all(|&b| domain.contains(a, b)));
                        if axis == 3 && demanded {
                            assert_eq!(sum, bound);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(Partition::new(vec![vec![1], vec![]]).is_err());
        assert!(Partition::new(vec![vec![1, 3]]).is_err());
        assert!(Partition::new(vec![vec![2, 1], vec![3]]).is_ok());
        assert!(Partition::canonical(&[2, 0]).is_err());

        let p = Partition::canonical(&[2, 3]).unwrap();
        assert_eq!(p.n(), 5);
        assert_eq!(p.block(2), &[3, 4, 5]);
        assert_eq!(p.block_of(4), 2);
    }

    #[test]
    fn pair_set_expand() {
        let s = PairSet::new(2, [(1, 2)]).unwrap();
        let sigma = Partition::canonical(&[1, 2]).unwrap();
        let sp = s.expand(&sigma).unwrap();
        assert_eq!(sp.bound(), 3);
        let pairs: Vec<_> = sp.iter().collect();
        assert_eq!(pairs, vec![(1, 2), (1, 3)]);
        assert!(PairSet::new(2, [(0, 1)]).is_err());
        assert!(PairSet::new(2, [(1, 3)]).is_err());
    }

    #[test]
    fn slices() {
        let l = order2_latin();
        assert_eq!(l.slice(3, 1).unwrap(), mat2(&[&[1, 0], &[0, 1]]));
        assert_eq!(l.slice(1, 2).unwrap(), mat2(&[&[0, 1], &[1, 0]]));
        assert!(l.slice(3, 3).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid2::<Nat>::new(0, 2, vec![]).is_err());
        assert!(Grid2::new(1, 2, vec![nat(1)]).is_err());
        assert!(Grid2::<f64>::new(1, 2, vec![0.5, -0.25]).is_err());
        assert!(Grid3::<f64>::new((1, 1, 2), vec![0.5, 0.25]).is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn partition_of(n: usize) -> impl Strategy<Value = Partition> {
            proptest::collection::vec(1usize..=n.max(1), n).prop_map(move |labels| {
                // Relabel into consecutive block ids so every block is nonempty.
                let mut seen = Vec::new();
                let mut blocks: Vec<Vec<usize>> = Vec::new();
                for (x, lab) in labels.iter().enumerate() {
                    match seen.iter().position(|s| s == lab) {
                        Some(b) => blocks[b].push(x + 1),
                        None => {
                            seen.push(*lab);
                            blocks.push(vec![x + 1]);
                        }
                    }
                }
                Partition::new(blocks).unwrap()
            })
        }

        fn matrix_with_partitions() -> impl Strategy<Value = (Matrix3, Partition, Partition)> {
            (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(a, b, c)| {
                (
                    proptest::collection::vec(0u64..5, a * b * c),
                    partition_of(a),
                    partition_of(b),
                )
                    .prop_map(move |(vals, s1, s2)| {
                        let m =
                            Grid3::new((a, b, c), vals.into_iter().map(Nat::from).collect()).unwrap();
                        (m, s1, s2)
                    })
            })
        }

        proptest! {
            #[test]
            fn quotients_on_distinct_axes_commute((m, s1, s2) in matrix_with_partitions()) {
                let ab = m.quotient(1, &s1).unwrap().quotient(2, &s2).unwrap();
                let ba = m.quotient(2, &s2).unwrap().quotient(1, &s1).unwrap();
                prop_assert_eq!(ab, ba);
            }

            #[test]
            fn quotient_preserves_total((m, s1, _s2) in matrix_with_partitions()) {
                let q = m.quotient(1, &s1).unwrap();
                prop_assert_eq!(q.total(), m.total());
            }
        }
    }
}
