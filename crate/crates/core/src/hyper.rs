//! Sets of triples as line hypergraphs: weak/strong quotients, the covering
//! number `rho`, the independence number `alpha_bar`, the fractional
//! independence number `alpha_star`, containment tests, and the searches
//! reproducing the two counterexamples.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::margin::MarginVector;
use crate::ratlp::{self, LinearProgram, Relation};
use crate::scalar::Scalar;
use crate::tensor::{Grid3, PairSet, Partition};
use crate::{latin, Matrix3, Nat, Rat};

/// A set of triples inside `(k)^3`, viewed as a hypergraph whose edges are
/// the nonempty line intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    k: usize,
    triples: std::collections::BTreeSet<(usize, usize, usize)>,
}

impl SupportSet {
    pub fn new(k: usize, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        let mut set = std::collections::BTreeSet::new();
        for (i, j, l) in triples {
            if i == 0 || j == 0 || l == 0 || i > k || j > k || l > k {
                return Err(Error::index(format!("triple ({i},{j},{l}) outside ({k})^3")));
            }
            set.insert((i, j, l));
        }
        Ok(SupportSet { k, triples: set })
    }

    pub fn empty(k: usize) -> Self {
        SupportSet { k, triples: Default::default() }
    }

    pub fn full(k: usize) -> Self {
        let triples = (1..=k)
            .flat_map(|i| (1..=k).flat_map(move |j| (1..=k).map(move |l| (i, j, l))))
            .collect();
        SupportSet { k, triples }
    }

    /// The support of a cubic matrix.
    pub fn from_matrix<T: Scalar>(m: &Grid3<T>) -> Result<Self> {
        let k = m.side()?;
        SupportSet::new(k, m.support())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize, l: usize) -> bool {
        self.triples.contains(&(i, j, l))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.triples.iter().copied()
    }

    /// The 0/1 matrix supported on this set.
    pub fn indicator<T: Scalar>(&self) -> Grid3<T> {
        Grid3::indicator(self.k, self.iter()).expect("triples validated")
    }

    /// Keeps the triples whose first two coordinates lie in `s`.
    pub fn restrict_to_pairs(&self, s: &PairSet) -> Result<SupportSet> {
        if s.bound() != self.k {
            return Err(Error::index(format!(
                "pair set over ({}) applied to a support over ({})",
                s.bound(),
                self.k
            )));
        }
        SupportSet::new(self.k, self.iter().filter(|&(i, j, _)| s.contains(i, j)))
    }

    /// Block-index triples whose block product meets the set.
    pub fn weak_quotient(&self, sigma: &Partition) -> Result<SupportSet> {
        if sigma.n() != self.k {
            return Err(Error::partition(format!(
                "partition of ({}) applied to a support over ({})",
                sigma.n(),
                self.k
            )));
        }
        SupportSet::new(
            sigma.num_blocks(),
            self.iter().map(|(i, j, l)| (sigma.block_of(i), sigma.block_of(j), sigma.block_of(l))),
        )
    }

    /// Block-index triples whose block product is contained in the set.
    pub fn strong_quotient(&self, sigma: &Partition) -> Result<SupportSet> {
        if sigma.n() != self.k {
            return Err(Error::partition(format!(
                "partition of ({}) applied to a support over ({})",
                sigma.n(),
                self.k
            )));
        }
        let b = sigma.num_blocks();
        let mut triples = Vec::new();
        for i in 1..=b {
            for j in 1..=b {
                'cell: for l in 1..=b {
                    for &x in sigma.block(i) {
                        for &y in sigma.block(j) {
                            for &z in sigma.block(l) {
                                if !self.contains(x, y, z) {
                                    continue 'cell;
                                }
                            }
                        }
                    }
                    triples.push((i, j, l));
                }
            }
        }
        SupportSet::new(b, triples)
    }
}

/// The weak quotient of a pair set: block pairs whose block product meets it.
pub fn weak_quotient_pairs(s: &PairSet, sigma: &Partition) -> Result<PairSet> {
    if sigma.n() != s.bound() {
        return Err(Error::partition("partition does not match the pair set bound"));
    }
    PairSet::new(
        sigma.num_blocks(),
        s.iter().map(|(i, j)| (sigma.block_of(i), sigma.block_of(j))),
    )
}

/// The strong quotient of a pair set: block pairs whose block product is
/// contained in it.
pub fn strong_quotient_pairs(s: &PairSet, sigma: &Partition) -> Result<PairSet> {
    if sigma.n() != s.bound() {
        return Err(Error::partition("partition does not match the pair set bound"));
    }
    let b = sigma.num_blocks();
    let mut pairs = Vec::new();
    for i in 1..=b {
        'cell: for j in 1..=b {
            for &x in sigma.block(i) {
                for &y in sigma.block(j) {
                    if !s.contains(x, y) {
                        continue 'cell;
                    }
                }
            }
            pairs.push((i, j));
        }
    }
    PairSet::new(b, pairs)
}

/// Line bookkeeping shared by the exact searches: element ids, the 3 lines
/// through each element, and the elements on each line.
struct LineIncidence {
    elems: Vec<(usize, usize, usize)>,
    elem_lines: Vec<[usize; 3]>,
    line_elems: Vec<Vec<usize>>,
}

/// Line ids: axis-3 lines first, then axis-2, then axis-1, each in row-major
/// order of the fixed pair.
fn line_id(k: usize, axis: usize, a: usize, b: usize) -> usize {
    (3 - axis) * k * k + (a - 1) * k + (b - 1)
}

fn lines_of(k: usize, (i, j, l): (usize, usize, usize)) -> [usize; 3] {
    [line_id(k, 3, i, j), line_id(k, 2, i, l), line_id(k, 1, j, l)]
}

impl LineIncidence {
    fn new(h: &SupportSet) -> Self {
        let k = h.k();
        let elems: Vec<_> = h.iter().collect();
        let mut line_elems = vec![Vec::new(); 3 * k * k];
        let mut elem_lines = Vec::with_capacity(elems.len());
        for (id, &t) in elems.iter().enumerate() {
            let ls = lines_of(k, t);
            for &l in &ls {
                line_elems[l].push(id);
            }
            elem_lines.push(ls);
        }
        LineIncidence { elems, elem_lines, line_elems }
    }
}

/// The minimum number of lines covering `h`, by branch and bound: branch on
/// the three lines through the first uncovered element, prune with a greedy
/// upper bound and a coverage-capacity lower bound.
pub fn rho(h: &SupportSet) -> usize {
    if h.is_empty() {
        return 0;
    }
    let inc = LineIncidence::new(h);
    let n = inc.elems.len();
    let max_line = inc.line_elems.iter().map(Vec::len).max().unwrap_or(1).max(1);

    // Greedy cover for the initial upper bound.
    let mut covered = vec![false; n];
    let mut best = 0usize;
    let mut left = n;
    while left > 0 {
        let (li, _) = inc
            .line_elems
            .iter()
            .enumerate()
            .map(|(li, es)| (li, es.iter().filter(|&&e| !covered[e]).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("lines exist");
        for &e in &inc.line_elems[li] {
            if !covered[e] {
                covered[e] = true;
                left -= 1;
            }
        }
        best += 1;
    }

    fn dfs(
        inc: &LineIncidence,
        cover_count: &mut [u8],
        uncovered: usize,
        chosen: usize,
        best: &mut usize,
        max_line: usize,
    ) {
        if uncovered == 0 {
            *best = (*best).min(chosen);
            return;
        }
        if chosen + uncovered.div_ceil(max_line) >= *best {
            return;
        }
        let first = cover_count.iter().position(|&c| c == 0).expect("uncovered element");
        for &li in &inc.elem_lines[first] {
            let mut newly = 0usize;
            for &e in &inc.line_elems[li] {
                if cover_count[e] == 0 {
                    newly += 1;
                }
                cover_count[e] += 1;
            }
            dfs(inc, cover_count, uncovered - newly, chosen + 1, best, max_line);
            for &e in &inc.line_elems[li] {
                cover_count[e] -= 1;
            }
        }
    }

    let mut cover_count = vec![0u8; n];
    dfs(&inc, &mut cover_count, n, 0, &mut best, max_line);
    best
}

/// The largest subset meeting every line at most once, by backtracking in
/// lexicographic element order.
pub fn alpha_bar(h: &SupportSet) -> usize {
    if h.is_empty() {
        return 0;
    }
    let inc = LineIncidence::new(h);


    fn dfs(
        inc: &LineIncidence,
        idx: usize,
        count: usize,
        line_used: &mut [bool],
        best: &mut usize,
    ) {
        if count + (inc.elems.len() - idx) <= *best {
            return;
        }
        if idx == inc.elems.len() {
            *best = count;
            return;
        }
        let ls = inc.elem_lines[idx];
        if ls.iter().all(|&l| !line_used[l]) {
            for &l in &ls {
                line_used[l] = true;
            }
            dfs(inc, idx + 1, count + 1, line_used, best);
            for &l in &ls {
                line_used[l] = false;
            }
        }
        dfs(inc, idx + 1, count, line_used, best);
    }

    let mut best = 0usize;
    let mut line_used = vec![false; 3 * h.k() * h.k()];
    dfs(&inc, 0, 0, &mut line_used, &mut best);
    best
}

/// The fractional independence number: the exact optimum of the packing LP
/// with one variable per triple and one `<= 1` constraint per line.
pub fn alpha_star(h: &SupportSet) -> Result<Rat> {
    if h.is_empty() {
        return Ok(Rat::zero());
    }
    let inc = LineIncidence::new(h);
    let n = inc.elems.len();
    let mut lp = LinearProgram::new(n);
    lp.set_objective(vec![Rat::one(); n])?;
    for es in inc.line_elems.iter().filter(|es| !es.is_empty()) {
        let mut row = vec![Rat::zero(); n];
        for &e in es {
            row[e] = Rat::one();
        }
        lp.add_constraint(row, Relation::Le, Rat::one())?;
    }
    let sol = ratlp::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::internal("packing LP must have an optimum"));
    }
    Ok(sol.objective().expect("optimal").clone())
}

/// The three invariants of a support set; `alpha_bar <= alpha_star <= rho`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperNumbers {
    pub rho: usize,
    pub alpha_bar: usize,
    pub alpha_star: Rat,
}

pub fn hyper_numbers(h: &SupportSet) -> Result<HyperNumbers> {
    let numbers = HyperNumbers { rho: rho(h), alpha_bar: alpha_bar(h), alpha_star: alpha_star(h)? };
    debug_assert!(
        Rat::from_integer((numbers.alpha_bar as u64).into()) <= numbers.alpha_star
            && numbers.alpha_star <= Rat::from_integer((numbers.rho as u64).into())
    );
    Ok(numbers)
}

/// `h` contains an S-quasigroup iff the restriction to `s` has an
/// independent set of size `|s|`.
pub fn contains_s_quasigroup(h: &SupportSet, s: &PairSet) -> Result<bool> {
    Ok(alpha_bar(&h.restrict_to_pairs(s)?) == s.len())
}

/// `h` contains an S-GUQPQ iff the restriction to `s` has fractional
/// independence number exactly `|s|`.
pub fn contains_s_guqpq(h: &SupportSet, s: &PairSet) -> Result<bool> {
    Ok(alpha_star(&h.restrict_to_pairs(s)?)? == Rat::from_integer((s.len() as u64).into()))
}

/// Depth-first enumeration of `k x k x k` nonnegative integer matrices with
/// prescribed line sums, in lexicographic order of the entry sequence.
struct CubeSearch {
    k: usize,
    cell_lines: Vec<[usize; 3]>,
    cell_max: Vec<u64>,
    targets: Vec<u64>,
}

impl CubeSearch {
    fn new(k: usize, targets: Vec<u64>) -> Self {
        let mut cell_lines = Vec::with_capacity(k * k * k);
        let mut cell_max = Vec::with_capacity(k * k * k);
        for i in 1..=k {
            for j in 1..=k {
                for l in 1..=k {
                    let ls = lines_of(k, (i, j, l));
                    cell_max.push(ls.iter().map(|&li| targets[li]).min().unwrap_or(0));
                    cell_lines.push(ls);
                }
            }
        }
        CubeSearch { k, cell_lines, cell_max, targets }
    }

    /// Visits complete assignments until the visitor returns true; reports
    /// whether it did.
    fn search(&self, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
        let cells = self.k * self.k * self.k;
        let mut values = vec![0u64; cells];
        let mut sums = vec![0u64; self.targets.len()];
        let mut caps = vec![0u64; self.targets.len()];
        for (c, ls) in self.cell_lines.iter().enumerate() {
            for &l in ls {
                caps[l] += self.cell_max[c];
            }
        }
        self.dfs(0, &mut values, &mut sums, &mut caps, visit)
    }

    fn dfs(
        &self,
        pos: usize,
        values: &mut [u64],
        sums: &mut [u64],
        caps: &mut [u64],
        visit: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if pos == values.len() {
            return visit(values);
        }
        let lines = self.cell_lines[pos];
        let vmax = lines.iter().map(|&l| self.targets[l] - sums[l]).min().unwrap_or(0);
        for &l in &lines {
            caps[l] -= self.cell_max[pos];
        }
        for v in 0..=vmax {
            if lines.iter().any(|&l| sums[l] + v + caps[l] < self.targets[l]) {
                continue;
            }
            for &l in &lines {
                sums[l] += v;
            }
            values[pos] = v;
            if self.dfs(pos + 1, values, sums, caps, visit) {
                return true;
            }
            for &l in &lines {
                sums[l] -= v;
            }
        }
        values[pos] = 0;
        for &l in &lines {
            caps[l] += self.cell_max[pos];
        }
        false
    }
}

fn cube_from_values(k: usize, values: &[u64]) -> Matrix3 {
    Grid3::new((k, k, k), values.iter().map(|&v| Nat::from(v)).collect()).expect("valid cube")
}

fn support_mask(values: &[u64]) -> u32 {
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .fold(0u32, |m, (i, _)| m | (1 << i))
}

/// Searches for a `3 x 3 x 3` matrix with every line sum 2 whose support
/// contains no order-3 Latin square support, returning the first in
/// lexicographic order. Existence shows that equal line sums alone do not
/// force a Latin square inside the support.
pub fn find_statement_a_counterexample() -> Result<Matrix3> {
    let k = 3;
    let latin_masks: Vec<u32> = latin::enumerate(k)
        .iter()
        .map(|l| {
            l.support()
                .into_iter()
                .fold(0u32, |m, (i, j, c)| m | (1 << (((i - 1) * k + (j - 1)) * k + (c - 1))))
        })
        .collect();
    let search = CubeSearch::new(k, vec![2; 3 * k * k]);
    let mut found = None;
    search.search(&mut |values| {
        let mask = support_mask(values);
        if latin_masks.iter().all(|&lm| mask & lm != lm) {
            found = Some(cube_from_values(k, values));
            true
        } else {
            false
        }
    });
    found.ok_or_else(|| Error::internal("no line-sum-2 matrix avoids all Latin square supports"))
}

/// Searches for a support `H` carrying an integer matrix with the total
/// line-sum hypotheses at block sizes `(1,2,2)` while `alpha_star(H) < 9`,
/// i.e. a generalized quotient quasigroup containing no uniform one.
/// Returns the first witness in lexicographic order as `(H, M, r)`.
pub fn find_gqq_not_guqq() -> Result<(SupportSet, Matrix3, MarginVector)> {
    let k = 3;
    let r = [1u64, 2, 2];
    let mut targets = vec![0u64; 3 * k * k];
    for axis in 1..=3 {
        for a in 1..=k {
            for b in 1..=k {
                targets[line_id(k, axis, a, b)] = r[a - 1] * r[b - 1];
            }
        }
    }
    let nine = Rat::from_integer(9.into());
    let mut cache: HashMap<u32, bool> = HashMap::new();
    let search = CubeSearch::new(k, targets);
    let mut found: Option<(SupportSet, Matrix3)> = None;
    search.search(&mut |values| {
        let mask = support_mask(values);
        let small = *cache.entry(mask).or_insert_with(|| {
            let h = SupportSet::new(
                k,
                values.iter().enumerate().filter(|(_, &v)| v > 0).map(|(c, _)| {
                    (c / (k * k) + 1, (c / k) % k + 1, c % k + 1)
                }),
            )
            .expect("valid support");
            alpha_star(&h).expect("packing LP solves") < nine
        });
        if small {
            let m = cube_from_values(k, values);
            let h = SupportSet::from_matrix(&m).expect("cubic");
            found = Some((h, m));
            true
        } else {
            false
        }
    });
    let (h, m) =
        found.ok_or_else(|| Error::internal("no quotient witness with fractional defect found"))?;
    Ok((h, m, MarginVector::from_u64(&[1, 2, 2])))
}
