//! Lifting a `k x k x k` quotient matrix to a (partial) Latin square.
//!
//! The construction runs in three stages, splitting one axis at a time:
//! slices of the current matrix are decomposed with `padded_decompose` into
//! per-block pieces, which are stacked along a fresh axis of length `n`.
//! Stage 1 splits the third index, stage 2 the second, stage 3 the first;
//! after stage 3 every line sum is at most 1 and the vertical lines over the
//! blown-up pair set sum to exactly 1.
//!
//! Each stage's margin invariants are re-checked after assembly and reported
//! as internal errors if violated; they are what the correctness of the
//! construction rests on.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::margin::{padded_decompose, MarginSpec, MarginVector};
use crate::ratlp::{strict_feasible, StrictSystem};
use crate::tensor::{Grid3, Line3, PairSet, Partition};
use crate::{nat, Matrix2, Matrix3, Nat, Rat, RationalMatrix3};

/// A validated lifting instance: a cubic matrix, positive block sizes, and
/// the pair set demanding exact vertical sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientInstance {
    matrix: Matrix3,
    block_sizes: Vec<usize>,
    pairs: PairSet,
}

impl QuotientInstance {
    /// Validates the Theorem hypotheses; fails with the full violation report
    /// when any line is out of bounds.
    pub fn new(matrix: Matrix3, block_sizes: Vec<usize>, pairs: PairSet) -> Result<Self> {
        let report = check_conditions(&matrix, &block_sizes, &pairs)?;
        if !report.is_empty() {
            return Err(Error::validation(format!("instance is not liftable: {report}")));
        }
        Ok(QuotientInstance { matrix, block_sizes, pairs })
    }

    pub fn matrix(&self) -> &Matrix3 {
        &self.matrix
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }
}

/// One violated hypothesis: a line whose sum exceeds its bound, or a vertical
/// line over the pair set that misses it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionViolation {
    pub line: Line3,
    pub bound: Nat,
    pub actual: Nat,
    pub must_be_exact: bool,
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.line.fixed();
        let rel = if self.must_be_exact { "!=" } else { ">" };
        write!(
            f,
            "line l{}_({a},{b}) sums to {} {rel} {}",
            self.line.axis(),
            self.actual,
            self.bound
        )
    }
}

/// Every violated inequality/equality of the lifting hypotheses; empty iff
/// the instance is liftable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Checks the lifting hypotheses of `matrix` against block sizes `r` and the
/// pair set `s`: every line sum at most `r_i * r_j`, with equality on the
/// vertical lines over `s`.
pub fn check_conditions(matrix: &Matrix3, r: &[usize], s: &PairSet) -> Result<ConditionReport> {
    let k = matrix.side()?;
    if r.len() != k {
        return Err(Error::dims(format!("{} block sizes for a side-{k} matrix", r.len())));
    }
    if r.contains(&0) {
        return Err(Error::validation("block sizes must be positive"));
    }
    if s.bound() != k {
        return Err(Error::dims(format!("pair set over ({}) for a side-{k} matrix", s.bound())));
    }
    let mut report = ConditionReport::default();
    for i in 1..=k {
        for j in 1..=k {
            let bound = nat((r[i - 1] * r[j - 1]) as u64);
            for axis in 1..=3 {
                let line = Line3::new(axis, (i, j))?;
                let actual = matrix.line_sum(&line)?;
                let exact = axis == 3 && s.contains(i, j);
                if actual > bound || (exact && actual != bound) {
                    report.violations.push(ConditionViolation {
                        line,
                        bound: bound.clone(),
                        actual,
                        must_be_exact: exact,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// A constructed lift: the square `L`, the canonical partition, and the
/// blown-up pair set `S'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftResult {
    pub square: Matrix3,
    pub sigma: Partition,
    pub s_prime: PairSet,
}

/// Splits a slice into `pieces` parts with `padded_decompose`, with the exact
/// margin set applied to the slice's *rows* (the decomposition itself treats
/// columns as exact, so this transposes in and out).
fn split_slice_rows_exact(
    slice: &Matrix2,
    row_targets: &MarginVector,
    col_targets: &MarginVector,
    exact_rows: impl IntoIterator<Item = usize>,
    pieces: usize,
) -> Result<Vec<Matrix2>> {
    let spec = MarginSpec::new(col_targets.clone(), row_targets.clone(), exact_rows)?;
    let parts = padded_decompose(&slice.transpose(), &spec, pieces)?;
    Ok(parts.into_iter().map(|p| p.transpose()).collect())
}

fn ones(n: usize) -> MarginVector {
    MarginVector::new(vec![Nat::one(); n])
}

fn blocks_margin(r: &[usize]) -> MarginVector {
    MarginVector::new(r.iter().map(|&v| nat(v as u64)).collect())
}

/// Lifts a quotient instance to a partial `S'`-Latin square (the main
/// construction).
pub fn lift_partial(inst: &QuotientInstance) -> Result<LiftResult> {
    let m = inst.matrix();
    let r = inst.block_sizes();
    let s = inst.pairs();
    let k = m.side()?;
    let n: usize = r.iter().sum();
    let sigma = Partition::canonical(r)?;
    let r_margin = blocks_margin(r);

    // Stage 1: split the third index. The slice M(.,.,c) has row sums
    // M(l^2_{ic}) <= r_i r_c and column sums M(l^1_{jc}) <= r_j r_c, so it
    // decomposes into r_c pieces with row sums <= r_i and column sums <= r_j.
    let mut m1: Grid3<Nat> = Grid3::zeros((k, k, n));
    for c in 1..=k {
        let slice = m.slice(3, c)?;
        let spec = MarginSpec::new(r_margin.clone(), r_margin.clone(), [])?;
        let parts = padded_decompose(&slice, &spec, r[c - 1])?;
        for (piece, &gamma) in parts.iter().zip(sigma.block(c)) {
            for a in 1..=k {
                for b in 1..=k {
                    m1.set(a, b, gamma, piece.get(a, b).clone());
                }
            }
        }
    }
    check_stage1(&m1, m, r, s, &sigma)?;

    // Stage 2: split the second index. The slice M1(.,c,.) has row sums
    // M1(l^3_{ac}) <= r_a r_c (exact when (a,c) is demanded) and column sums
    // M1(l^1_{c,gamma}) <= r_c; pieces get row sums <= r_a (exact on the
    // demanded rows) and column sums <= 1.
    let mut m2: Grid3<Nat> = Grid3::zeros((k, n, n));
    for c in 1..=k {
        let slice = m1.slice(2, c)?;
        let exact_rows: Vec<usize> = (1..=k).filter(|&a| s.contains(a, c)).collect();
        let parts = split_slice_rows_exact(&slice, &r_margin, &ones(n), exact_rows, r[c - 1])?;
        for (piece, &gp) in parts.iter().zip(sigma.block(c)) {
            for a in 1..=k {
                for gamma in 1..=n {
                    m2.set(a, gp, gamma, piece.get(a, gamma).clone());
                }
            }
        }
    }
    check_stage2(&m2, &m1, r, s, &sigma)?;

    // Stage 3: split the first index, symmetrically; exact rows are the
    // blocks P_d with (c,d) demanded.
    let mut m3: Grid3<Nat> = Grid3::zeros((n, n, n));
    for c in 1..=k {
        let slice = m2.slice(1, c)?;
        let exact_rows: Vec<usize> = (1..=k)
            .filter(|&d| s.contains(c, d))
            .flat_map(|d| sigma.block(d).iter().copied())
            .collect();
        let parts = split_slice_rows_exact(&slice, &ones(n), &ones(n), exact_rows, r[c - 1])?;
        for (piece, &delta) in parts.iter().zip(sigma.block(c)) {
            for gp in 1..=n {
                for gamma in 1..=n {
                    m3.set(delta, gp, gamma, piece.get(gp, gamma).clone());
                }
            }
        }
    }

    let s_prime = s.expand(&sigma)?;
    if !m3.is_partial_s_latin(&s_prime)? {
        return Err(Error::internal("stage 3 did not produce a partial S'-Latin square"));
    }
    if m3.triple_quotient(&sigma)? != *m {
        return Err(Error::internal("lift does not quotient back to the instance"));
    }
    Ok(LiftResult { square: m3, sigma, s_prime })
}

fn check_stage1(m1: &Grid3<Nat>, m: &Matrix3, r: &[usize], s: &PairSet, sigma: &Partition) -> Result<()> {
    let k = r.len();
    let n: usize = r.iter().sum();
    if m1.quotient(3, sigma)? != *m {
        return Err(Error::internal("stage 1 does not quotient back to the instance"));
    }
    for a in 1..=k {
        for b in 1..=k {
            let sum = m1.line_sum(&Line3::vertical(a, b))?;
            let bound = nat((r[a - 1] * r[b - 1]) as u64);
            if sum > bound || (s.contains(a, b) && sum != bound) {
                return Err(Error::internal(format!("stage 1 vertical sums broken at ({a},{b})")));
            }
        }
    }
    for gamma in 1..=n {
        for a in 1..=k {
            if m1.line_sum(&Line3::transversal(a, gamma))? > nat(r[a - 1] as u64) {
                return Err(Error::internal(format!(
                    "stage 1 transversal sum at ({a},{gamma}) exceeds its block size"
                )));
            }
        }
        for b in 1..=k {
            if m1.line_sum(&Line3::horizontal(b, gamma))? > nat(r[b - 1] as u64) {
                return Err(Error::internal(format!(
                    "stage 1 horizontal sum at ({b},{gamma}) exceeds its block size"
                )));
            }
        }
    }
    Ok(())
}

fn check_stage2(m2: &Grid3<Nat>, m1: &Grid3<Nat>, r: &[usize], s: &PairSet, sigma: &Partition) -> Result<()> {
    let k = r.len();
    let n: usize = r.iter().sum();
    if m2.quotient(2, sigma)? != *m1 {
        return Err(Error::internal("stage 2 does not quotient back to stage 1"));
    }
    for a in 1..=k {
        for gp in 1..=n {
            let sum = m2.line_sum(&Line3::vertical(a, gp))?;
            let bound = nat(r[a - 1] as u64);
            let exact = s.contains(a, sigma.block_of(gp));
            if sum > bound || (exact && sum != bound) {
                return Err(Error::internal(format!("stage 2 vertical sums broken at ({a},{gp})")));
            }
        }
        for gamma in 1..=n {
            if m2.line_sum(&Line3::transversal(a, gamma))? > nat(r[a - 1] as u64) {
                return Err(Error::internal("stage 2 transversal sum exceeds its block size"));
            }
        }
    }
    for gp in 1..=n {
        for gamma in 1..=n {
            if m2.line_sum(&Line3::horizontal(gp, gamma))? > Nat::one() {
                return Err(Error::internal("stage 2 horizontal sum exceeds 1"));
            }
        }
    }
    Ok(())
}

/// Lifts a matrix all of whose line sums equal `r_i * r_j` exactly to a full
/// Latin square (the total case of the construction).
pub fn lift_hilton(matrix: &Matrix3, r: &[usize]) -> Result<LiftResult> {
    let k = matrix.side()?;
    let report = check_conditions(matrix, r, &PairSet::full(k))?;
    if !report.is_empty() {
        return Err(Error::validation(format!(
            "line sums must equal r_i * r_j exactly: {report}"
        )));
    }
    // With every vertical sum exact, horizontal and transversal sums are
    // forced to equality as well; still reject strict inequalities directly
    // so the error points at the offending line.
    for i in 1..=k {
        for j in 1..=k {
            for axis in 1..=2 {
                let actual = matrix.line_sum(&Line3::new(axis, (i, j))?)?;
                if actual != nat((r[i - 1] * r[j - 1]) as u64) {
                    return Err(Error::validation(format!(
                        "line l{axis}_({i},{j}) sums to {actual}, not r_{i} * r_{j}"
                    )));
                }
            }
        }
    }
    let inst = QuotientInstance::new(matrix.clone(), r.to_vec(), PairSet::full(k))?;
    let res = lift_partial(&inst)?;
    if !res.square.is_latin()? {
        return Err(Error::internal("total lift is not a Latin square"));
    }
    Ok(res)
}

/// Reasons a lift can fail verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    /// `L` is not a partial S'-Latin square (a line sum is off).
    LineSums(String),
    /// `S'` is not the blow-up of the instance's pair set.
    DomainMismatch,
    /// The triple quotient of `L` differs from the instance matrix.
    QuotientMismatch,
    /// Shapes do not line up at all.
    Shape(String),
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::LineSums(msg) => write!(f, "line sum: {msg}"),
            VerifyFailure::DomainMismatch => write!(f, "domain mismatch"),
            VerifyFailure::QuotientMismatch => write!(f, "quotient mismatch"),
            VerifyFailure::Shape(msg) => write!(f, "shape: {msg}"),
        }
    }
}

/// The outcome of independently re-checking a lift against its instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.failures.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Checks the three lift invariants independently: partial-Latin line sums,
/// the blown-up domain, and the quotient round trip.
pub fn verify_lift(inst: &QuotientInstance, res: &LiftResult) -> VerifyReport {
    let mut failures = Vec::new();

    let n: usize = inst.block_sizes().iter().sum();
    if res.sigma.block_sizes() != inst.block_sizes() {
        failures.push(VerifyFailure::Shape(format!(
            "partition blocks {:?} do not match the instance sizes {:?}",
            res.sigma.block_sizes(),
            inst.block_sizes()
        )));
        return VerifyReport { failures };
    }
    if res.square.dims() != (n, n, n) {
        failures.push(VerifyFailure::Shape(format!(
            "lift has dims {:?}, expected ({n},{n},{n})",
            res.square.dims()
        )));
        return VerifyReport { failures };
    }

    match res.square.is_partial_s_latin(&res.s_prime) {
        Ok(true) => {}
        Ok(false) => failures.push(VerifyFailure::LineSums(
            "a line sum exceeds 1 or a demanded vertical line misses 1".into(),
        )),
        Err(e) => failures.push(VerifyFailure::Shape(e.to_string())),
    }

    match inst.pairs().expand(&res.sigma) {
        Ok(expected) => {
            if expected != res.s_prime {
                failures.push(VerifyFailure::DomainMismatch);
            }
        }
        Err(e) => failures.push(VerifyFailure::Shape(e.to_string())),
    }

    match res.square.triple_quotient(&res.sigma) {
        Ok(q) => {
            if q != *inst.matrix() {
                failures.push(VerifyFailure::QuotientMismatch);
            }
        }
        Err(e) => failures.push(VerifyFailure::Shape(e.to_string())),
    }

    VerifyReport { failures }
}

/// A lift of a real(rational)-valued uniform instance, together with the
/// scaling certificate that turned it into an integer instance.
#[derive(Debug, Clone)]
pub struct RealLiftResult {
    pub lift: LiftResult,
    /// The uniform block size `r`.
    pub block_size: usize,
    /// The factor `r^2 / beta` applied to the rationalized matrix.
    pub scale: Rat,
    /// The strictly positive rational matrix found on the support.
    pub rationalized: RationalMatrix3,
}

/// Lifts a rational matrix with line sums at most `beta` (exactly `beta` on
/// the vertical lines over `s`): finds a strictly positive rational matrix
/// with the same support satisfying the same constraints, scales it to an
/// integer instance with uniform block size, and lifts that.
pub fn lift_real(matrix: &RationalMatrix3, beta: &Rat, s: &PairSet) -> Result<RealLiftResult> {
    let k = matrix.side()?;
    if s.bound() != k {
        return Err(Error::dims(format!("pair set over ({}) for a side-{k} matrix", s.bound())));
    }
    if !beta.is_positive() {
        return Err(Error::validation("beta must be positive"));
    }
    for i in 1..=k {
        for j in 1..=k {
            for axis in 1..=3 {
                let sum = matrix.line_sum(&Line3::new(axis, (i, j))?)?;
                if sum > *beta {
                    return Err(Error::validation(format!(
                        "line l{axis}_({i},{j}) sums to {sum} > beta"
                    )));
                }
                if axis == 3 && s.contains(i, j) && sum != *beta {
                    return Err(Error::validation(format!(
                        "vertical line ({i},{j}) sums to {sum}, not beta"
                    )));
                }
            }
        }
    }

    // One variable per supported cell; lines with support get their
    // constraint, vertical lines over the pair set as equalities.
    let support = matrix.support();
    let var_of = |cell: (usize, usize, usize)| support.iter().position(|&c| c == cell);
    let mut sys = StrictSystem {
        num_vars: support.len(),
        positive: (0..support.len()).collect(),
        ..Default::default()
    };
    for i in 1..=k {
        for j in 1..=k {
            for axis in 1..=3 {
                let mut row = vec![Rat::zero(); support.len()];
                let mut nonempty = false;
                for x in 1..=k {
                    let cell = match axis {
                        1 => (x, i, j),
                        2 => (i, x, j),
                        _ => (i, j, x),
                    };
                    if let Some(v) = var_of(cell) {
                        row[v] = Rat::one();
                        nonempty = true;
                    }
                }
                if axis == 3 && s.contains(i, j) {
                    sys.equalities.push((row, beta.clone()));
                } else if nonempty {
                    sys.inequalities.push((row, beta.clone()));
                }
            }
        }
    }
    let witness = strict_feasible(&sys)?.ok_or_else(|| {
        Error::internal("strictly feasible system has no rational point despite valid input")
    })?;

    // Smallest uniform block size r making (r^2 / beta) * witness integral.
    let mut denom = num_bigint::BigInt::one();
    for w in &witness {
        let scaled = w / beta;
        denom = denom.lcm(scaled.denom());
    }
    let denom_u: Option<u64> = denom.to_u64();
    let block_size = match denom_u {
        Some(d) => (1..=d)
            .find(|&r| (r * r) % d == 0)
            .map(|r| r as usize)
            .expect("r = d always divides"),
        None => return Err(Error::validation("rationalized solution has an oversized denominator")),
    };
    let scale = Rat::from_integer((block_size * block_size).into()) / beta;

    let mut lifted_entries = Vec::with_capacity(k * k * k);
    let mut grid_hat = RationalMatrix3::zeros((k, k, k));
    for (idx, &(i, j, l)) in support.iter().enumerate() {
        grid_hat.set(i, j, l, witness[idx].clone());
    }
    for i in 1..=k {
        for j in 1..=k {
            for l in 1..=k {
                let v = grid_hat.get(i, j, l) * &scale;
                if !v.is_integer() || v.is_negative() {
                    return Err(Error::internal("scaled solution is not a nonnegative integer"));
                }
                lifted_entries.push(v.to_integer().to_biguint().expect("nonnegative"));
            }
        }
    }
    let integral = Matrix3::new((k, k, k), lifted_entries)?;

    let inst = QuotientInstance::new(integral, vec![block_size; k], s.clone())?;
    let lift = lift_partial(&inst)?;
    Ok(RealLiftResult { lift, block_size, scale, rationalized: grid_hat })
}
