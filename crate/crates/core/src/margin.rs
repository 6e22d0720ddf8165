//! Margin-vector splitting, construction and decomposition of the matrix
//! classes `C(R,S)` and `C'_I(R,S)`, and permutation-matrix decomposition
//! via bipartite perfect matchings.
//!
//! Every nondeterministic choice in the underlying proofs (split points,
//! matchings, subtraction order) is pinned to a left-greedy / lexicographic /
//! row-major rule, so all outputs are reproducible.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::Grid2;
use crate::{nat, Matrix2, Nat};

/// A vector of nonnegative integer margins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginVector(Vec<Nat>);

impl MarginVector {
    pub fn new(values: Vec<Nat>) -> Self {
        MarginVector(values)
    }

    pub fn from_u64(values: &[u64]) -> Self {
        MarginVector(values.iter().map(|&v| nat(v)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        MarginVector(vec![Nat::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Nat] {
        &self.0
    }

    /// `|x|`, the sum of the components.
    pub fn total(&self) -> Nat {
        self.0.iter().sum()
    }

    pub fn componentwise_le(&self, other: &MarginVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &MarginVector) -> Result<MarginVector> {
        if !other.componentwise_le(self) {
            return Err(Error::margin("componentwise subtraction would underflow"));
        }
        Ok(MarginVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, k: &Nat) -> MarginVector {
        MarginVector(self.0.iter().map(|v| v * k).collect())
    }

    /// The components as machine sizes, for use as block sizes or piece
    /// counts. Fails when a component does not fit.
    pub fn as_usizes(&self) -> Result<Vec<usize>> {
        self.0
            .iter()
            .map(|v| {
                usize::try_from(v).map_err(|_| Error::validation("margin value exceeds addressable size"))
            })
            .collect()
    }
}

impl std::ops::Index<usize> for MarginVector {
    type Output = Nat;
    fn index(&self, i: usize) -> &Nat {
        &self.0[i]
    }
}

/// Row/column sum targets `(R, S)` plus the set `I` of columns whose sums
/// must be met exactly, describing the class `C'_I(R,S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginSpec {
    rows: MarginVector,
    cols: MarginVector,
    exact_cols: BTreeSet<usize>,
}

impl MarginSpec {
    pub fn new(
        rows: MarginVector,
        cols: MarginVector,
        exact_cols: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let exact: BTreeSet<usize> = exact_cols.into_iter().collect();
        if let Some(&j) = exact.iter().find(|&&j| j == 0 || j > cols.len()) {
            return Err(Error::index(format!(
                "exact column {j} outside (1..={})",
                cols.len()
            )));
        }
        Ok(MarginSpec { rows, cols, exact_cols: exact })
    }

    pub fn rows(&self) -> &MarginVector {
        &self.rows
    }

    pub fn cols(&self) -> &MarginVector {
        &self.cols
    }

    pub fn exact_cols(&self) -> &BTreeSet<usize> {
        &self.exact_cols
    }
}

/// Returns `y <= x` componentwise with `|y| = n`, filling greedily from the
/// left.
pub fn split_vector(x: &MarginVector, n: &Nat) -> Result<MarginVector> {
    if x.total() < *n {
        return Err(Error::margin(format!("cannot split off {n} from a vector of total {}", x.total())));
    }
    let mut remaining = n.clone();
    let mut out = Vec::with_capacity(x.len());
    for v in x.values() {
        let take = v.min(&remaining).clone();
        remaining -= &take;
        out.push(take);
    }
    Ok(MarginVector(out))
}

/// Splits `x` with `|x| = r * k` into `r` vectors of total `k` each, by
/// successive left-greedy splits.
pub fn split_vector_parts(x: &MarginVector, r: usize, k: &Nat) -> Result<Vec<MarginVector>> {
    if x.total() != nat(r as u64) * k {
        return Err(Error::margin(format!(
            "vector of total {} cannot split into {r} parts of {k}",
            x.total()
        )));
    }
    let mut rest = x.clone();
    let mut parts = Vec::with_capacity(r);
    for _ in 0..r {
        let part = split_vector(&rest, k)?;
        rest = rest.checked_sub(&part)?;
        parts.push(part);
    }
    Ok(parts)
}

/// Builds the left-greedy member of `C(R,S)`: row `i` is the greedy split of
/// the remaining column margins with total `R_i`.
pub fn construct_class(r: &MarginVector, s: &MarginVector) -> Result<Matrix2> {
    if r.is_empty() || s.is_empty() {
        return Err(Error::dims("margin vectors must be nonempty"));
    }
    if r.total() != s.total() {
        return Err(Error::margin(format!(
            "class C(R,S) is empty: |R| = {} but |S| = {}",
            r.total(),
            s.total()
        )));
    }
    let mut remaining = s.clone();
    let mut rows = Vec::with_capacity(r.len());
    for ri in r.values() {
        let row = split_vector(&remaining, ri)?;
        remaining = remaining.checked_sub(&row)?;
        rows.push(row.0);
    }
    Grid2::from_rows(rows)
}

/// Checks that all `2n` line sums of a square matrix equal a common positive
/// value, and returns it.
fn common_line_sum(m: &Matrix2) -> Result<Nat> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let rows = m.row_sums();
    let k = rows[0].clone();
    if rows.iter().any(|s| *s != k) || m.col_sums().iter().any(|s| *s != k) {
        return Err(Error::margin("line sums are not all equal"));
    }
    if k.is_zero() {
        return Err(Error::margin("line sums must be positive"));
    }
    Ok(k)
}

/// Finds the lexicographically least perfect matching on the support of `m`,
/// row by row, as a permutation matrix.
///
/// Requires every line sum of `m` to equal some `k > 0`; under that
/// hypothesis a perfect matching always exists, so failure to find one is
/// reported as an internal error rather than a precondition error.
pub fn find_permutation(m: &Matrix2) -> Result<Matrix2> {
    common_line_sum(m)?;
    let n = m.rows();
    let adj: Vec<Vec<usize>> = (1..=n)
        .map(|i| (1..=n).filter(|&j| !m.get(i, j).is_zero()).map(|j| j - 1).collect())
        .collect();

    let mut col_of: Vec<Option<usize>> = vec![None; n];
    let mut row_of: Vec<Option<usize>> = vec![None; n];

    fn augment(
        row: usize,
        adj: &[Vec<usize>],
        visited: &mut [bool],
        col_of: &mut [Option<usize>],
        row_of: &mut [Option<usize>],
    ) -> bool {
        for &c in &adj[row] {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            if row_of[c].is_none()
                || augment(row_of[c].unwrap(), adj, visited, col_of, row_of)
            {
                row_of[c] = Some(row);
                col_of[row] = Some(c);
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let mut visited = vec![false; n];
        if !augment(i, &adj, &mut visited, &mut col_of, &mut row_of) {
            return Err(Error::internal(
                "no perfect matching on the support despite equal line sums",
            ));
        }
    }

    // Lexicographic minimization: fix rows in order, moving each to the
    // smallest column for which the remaining rows can still be matched.
    for i in 0..n {
        let current = col_of[i].expect("perfect matching");
        for &c in &adj[i] {
            if c >= current {
                break;
            }
            let owner = row_of[c].expect("perfect matching");
            if owner <= i {
                continue; // column already fixed to an earlier row
            }
            // Tentatively give c to row i and try to re-augment the owner.
            col_of[i] = Some(c);
            row_of[c] = Some(i);
            row_of[current] = None;
            col_of[owner] = None;
            let mut visited = vec![false; n];
            for fixed in 0..=i {
                visited[col_of[fixed].expect("assigned")] = true;
            }
            if augment(owner, &adj, &mut visited, &mut col_of, &mut row_of) {
                break;
            }
            col_of[i] = Some(current);
            row_of[current] = Some(i);
            row_of[c] = Some(owner);
            col_of[owner] = Some(c);
        }
    }

    let mut p = Matrix2::zeros(n, n);
    for (i, c) in col_of.iter().enumerate() {
        p.set(i + 1, c.expect("perfect matching") + 1, nat(1));
    }
    Ok(p)
}

/// Decomposes a square matrix with all line sums `k > 0` into exactly `k`
/// permutation matrices by repeated matching and subtraction.
pub fn perm_decompose(m: &Matrix2) -> Result<Vec<Matrix2>> {
    let k = common_line_sum(m)?;
    let k = usize::try_from(&k)
        .map_err(|_| Error::validation("line sum exceeds addressable decomposition length"))?;
    let mut rest = m.clone();
    let mut parts = Vec::with_capacity(k);
    for step in 0..k {
        let p = if step + 1 == k {
            // The remainder has all line sums 1 and is its own last piece.
            rest.clone()
        } else {
            find_permutation(&rest)?
        };
        for i in 1..=m.rows() {
            for j in 1..=m.cols() {
                if !p.get(i, j).is_zero() {
                    let v = rest.get(i, j).clone();
                    rest.set(i, j, v - 1u32);
                }
            }
        }
        parts.push(p);
    }
    if !rest.total().is_zero() {
        return Err(Error::internal("nonzero remainder after permutation decomposition"));
    }
    if parts.last().map(|p| p.is_permutation()) != Some(Ok(true)) {
        return Err(Error::internal("final remainder is not a permutation matrix"));
    }
    Ok(parts)
}

/// Sums a matrix over consecutive row and column groups of the given sizes.
/// Zero-size groups contribute zero lines, so this is the inverse direction
/// of the expansion used in `class_decompose`.
fn group_sum(m: &Matrix2, row_sizes: &[usize], col_sizes: &[usize]) -> Matrix2 {
    let mut out = Matrix2::zeros(row_sizes.len(), col_sizes.len());
    let mut r0 = 0usize;
    for (gi, &rs) in row_sizes.iter().enumerate() {
        let mut c0 = 0usize;
        for (gj, &cs) in col_sizes.iter().enumerate() {
            let mut sum = Nat::zero();
            for i in r0..r0 + rs {
                for j in c0..c0 + cs {
                    sum += m.get(i + 1, j + 1);
                }
            }
            out.set(gi + 1, gj + 1, sum);
            c0 += cs;
        }
        r0 += rs;
    }
    out
}

/// Decomposes `m` in `C(kR, kS)` into `k` matrices of `C(R, S)`.
///
/// Each row `i` is expanded into `R_i` rows of sum `k`, each column `j` into
/// `S_j` columns of sum `k`; the expanded matrix decomposes into permutation
/// matrices, and folding those back through the two groupings yields the
/// pieces.
pub fn class_decompose(m: &Matrix2, r: &MarginVector, s: &MarginVector, k: usize) -> Result<Vec<Matrix2>> {
    if k == 0 {
        return Err(Error::validation("piece count k must be positive"));
    }
    let kn = nat(k as u64);
    if m.rows() != r.len() || m.cols() != s.len() {
        return Err(Error::dims("margin vector lengths must match the matrix"));
    }
    if MarginVector::new(m.row_sums()) != r.scale(&kn) || MarginVector::new(m.col_sums()) != s.scale(&kn) {
        return Err(Error::margin("matrix is not in C(kR, kS)"));
    }

    let row_sizes = r.as_usizes()?;
    let col_sizes = s.as_usizes()?;
    let side: usize = row_sizes.iter().sum();
    if side == 0 {
        // All margins zero: the k pieces are zero matrices.
        return Ok(vec![Matrix2::zeros(m.rows(), m.cols()); k]);
    }

    // Expand rows: row i becomes R_i rows of sum k.
    let mut expanded_rows: Vec<Vec<Nat>> = Vec::with_capacity(side);
    for i in 1..=m.rows() {
        let row = MarginVector::new((1..=m.cols()).map(|j| m.get(i, j).clone()).collect());
        for part in split_vector_parts(&row, row_sizes[i - 1], &kn)? {
            expanded_rows.push(part.0);
        }
    }
    let tall = Grid2::from_rows(expanded_rows)?;

    // Expand columns: column j becomes S_j columns of sum k.
    let mut expanded_cols: Vec<Vec<Nat>> = Vec::with_capacity(side);
    for j in 1..=tall.cols() {
        let col = MarginVector::new((1..=tall.rows()).map(|i| tall.get(i, j).clone()).collect());
        for part in split_vector_parts(&col, col_sizes[j - 1], &kn)? {
            expanded_cols.push(part.0);
        }
    }
    let mut square = Matrix2::zeros(side, side);
    for (j0, col) in expanded_cols.iter().enumerate() {
        for (i0, v) in col.iter().enumerate() {
            square.set(i0 + 1, j0 + 1, v.clone());
        }
    }

    let perms = perm_decompose(&square)?;
    Ok(perms.iter().map(|p| group_sum(p, &row_sizes, &col_sizes)).collect())
}

/// Decomposes `m` in `C'_I(kR, kS)` into `k` matrices of `C'_I(R, S)`:
/// row sums at most `R`, column sums at most `S`, and exactly `S_j` on the
/// columns `j` in `I`.
///
/// The deficiency is filled with the left-greedy complement of the margins,
/// the completed matrix is class-decomposed, and the complement is then
/// removed cell by cell in row-major order, draining earlier pieces first.
pub fn padded_decompose(m: &Matrix2, spec: &MarginSpec, k: usize) -> Result<Vec<Matrix2>> {
    if k == 0 {
        return Err(Error::validation("piece count k must be positive"));
    }
    let (r, s) = (spec.rows(), spec.cols());
    if m.rows() != r.len() || m.cols() != s.len() {
        return Err(Error::dims("margin vector lengths must match the matrix"));
    }
    if r.total() != s.total() {
        return Err(Error::margin(format!(
            "padding requires |R| = |S|, got {} and {}",
            r.total(),
            s.total()
        )));
    }
    let kn = nat(k as u64);
    let row_sums = MarginVector::new(m.row_sums());
    let col_sums = MarginVector::new(m.col_sums());
    let kr = r.scale(&kn);
    let ks = s.scale(&kn);
    if !row_sums.componentwise_le(&kr) {
        return Err(Error::margin("row sums exceed kR"));
    }
    if !col_sums.componentwise_le(&ks) {
        return Err(Error::margin("column sums exceed kS"));
    }
    for &j in spec.exact_cols() {
        if col_sums[j - 1] != ks[j - 1] {
            return Err(Error::margin(format!("column {j} must meet its margin exactly")));
        }
    }

    let complement = construct_class(&kr.checked_sub(&row_sums)?, &ks.checked_sub(&col_sums)?)?;
    let mut completed = m.clone();
    for i in 1..=m.rows() {
        for j in 1..=m.cols() {
            *completed.get_mut(i, j) += complement.get(i, j);
        }
    }
    let mut pieces = class_decompose(&completed, r, s, k)?;

    for i in 1..=m.rows() {
        for j in 1..=m.cols() {
            let mut owed = complement.get(i, j).clone();
            for piece in pieces.iter_mut() {
                if owed.is_zero() {
                    break;
                }
                let have = piece.get(i, j).clone();
                let take = have.clone().min(owed.clone());
                piece.set(i, j, have - &take);
                owed -= &take;
            }
            if !owed.is_zero() {
                return Err(Error::internal("complement removal exhausted all pieces"));
            }
        }
    }
    Ok(pieces)
}

/// Draws a uniform-ish random member of `C(R,S)`, distributing each row's
/// total over the columns one unit at a time, weighted by remaining column
/// capacity. Intended for test harnesses; requires `|R| = |S|`.
pub fn random_class_member<G: Rng>(r: &MarginVector, s: &MarginVector, rng: &mut G) -> Result<Matrix2> {
    if r.is_empty() || s.is_empty() {
        return Err(Error::dims("margin vectors must be nonempty"));
    }
    if r.total() != s.total() {
        return Err(Error::margin("class C(R,S) is empty"));
    }
    let mut caps: Vec<u64> = s
        .values()
        .iter()
        .map(|v| u64::try_from(v).map_err(|_| Error::validation("margin too large for sampling")))
        .collect::<Result<_>>()?;
    let mut out = Matrix2::zeros(r.len(), s.len());
    for (i0, ri) in r.values().iter().enumerate() {
        let mut left = u64::try_from(ri).map_err(|_| Error::validation("margin too large for sampling"))?;
        while left > 0 {
            let total: u64 = caps.iter().sum();
            let mut pick = rng.gen_range(0..total);
            let mut j0 = 0usize;
            while pick >= caps[j0] {
                pick -= caps[j0];
                j0 += 1;
            }
            caps[j0] -= 1;
            left -= 1;
            *out.get_mut(i0 + 1, j0 + 1) += nat(1);
        }
    }
    Ok(out)
}
