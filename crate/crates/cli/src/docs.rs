//! JSON documents: matrices, instances, lifts, supports, and reports.
//!
//! Entry arrays are nested row-major; the serialized arrays are naturally
//! 0-based while all index *values* (pairs in `S`, partition blocks, support
//! triples) are 1-based, matching the library's public indexing. Integer
//! entries are JSON numbers when they fit in a `u64` and decimal strings
//! beyond that; rational entries are always `"p/q"` strings (a bare `"p"`
//! when the denominator is 1), never floats.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use glsq::explore::{ConjectureReport, Finding, Verdict};
use glsq::hyper::{HyperNumbers, SupportSet};
use glsq::lift::{LiftResult, RealLiftResult};
use glsq::tensor::{Grid2, Grid3, PairSet, Partition};
use glsq::{Matrix2, Matrix3, Nat, Rat, RationalMatrix3};

/// Conversion failure between documents and library values; the message is a
/// single line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocError(pub String);

impl std::fmt::Display for DocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for DocError {}

type DocResult<T> = Result<T, DocError>;

fn err<T>(msg: impl Into<String>) -> DocResult<T> {
    Err(DocError(msg.into()))
}

/// A dense 2- or 3-indexed matrix document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dims: Vec<usize>,
    pub entries: Value,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub rational: bool,
}

/// A lifting instance: the matrix, block sizes, demanded pairs, and the
/// bound for the rational-valued path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub matrix: MatrixDocument,
    pub r: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
}

/// A constructed lift; `lift-real` additionally records its scaling
/// certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftDocument {
    #[serde(rename = "L")]
    pub square: MatrixDocument,
    pub sigma: Vec<Vec<usize>>,
    #[serde(rename = "S_prime")]
    pub s_prime: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationalized: Option<MatrixDocument>,
}

/// A set of triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportDocument {
    pub k: usize,
    pub triples: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperDocument {
    pub rho: usize,
    pub alpha_bar: usize,
    pub alpha_star: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecesDocument {
    pub pieces: Vec<MatrixDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GqqWitnessDocument {
    pub support: SupportDocument,
    pub matrix: MatrixDocument,
    pub r: Vec<usize>,
    pub alpha_star: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub ok: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingDocument {
    pub conjecture: u8,
    pub support: SupportDocument,
    #[serde(rename = "S")]
    pub pairs: Vec<[usize; 2]>,
    pub rho_restricted: usize,
    pub contains_bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreDocument {
    pub k: usize,
    pub r_max: usize,
    pub instances_checked: usize,
    pub verdict: String,
    pub counterexamples: Vec<FindingDocument>,
    pub candidates: Vec<FindingDocument>,
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> DocResult<Rat> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| DocError(format!("bad rational component {t:?}")))
    };
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return err("rational denominator is zero");
            }
            Rat::new(parse_int(p)?, q)
        }
        None => Rat::from_integer(parse_int(s)?),
    };
    Ok(r)
}

fn nat_to_value(n: &Nat) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::Number(Number::from(v)),
        Err(_) => Value::String(n.to_string()),
    }
}

fn value_to_nat(v: &Value) -> DocResult<Nat> {
    match v {
        Value::Number(num) => match num.as_u64() {
            Some(u) => Ok(Nat::from(u)),
            None => err(format!("entry {num} is not a nonnegative integer")),
        },
        Value::String(s) => {
            BigUint::from_str(s.trim()).map_err(|_| DocError(format!("bad integer entry {s:?}")))
        }
        other => err(format!("entry {other} is neither a number nor a string")),
    }
}

fn rat_to_value(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

fn value_to_rat(v: &Value) -> DocResult<Rat> {
    match v {
        Value::String(s) => {
            let r = parse_rat(s)?;
            if r.is_negative() {
                return err(format!("entry {s:?} is negative"));
            }
            Ok(r)
        }
        Value::Number(num) => match num.as_u64() {
            Some(u) => Ok(Rat::from_integer(u.into())),
            None => err(format!("entry {num} is not a nonnegative integer")),
        },
        other => err(format!("entry {other} is neither a string nor an integer")),
    }
}

fn rows_value<T>(n1: usize, n2: usize, get: impl Fn(usize, usize) -> T, enc: impl Fn(&T) -> Value) -> Value {
    Value::Array(
        (1..=n1)
            .map(|i| Value::Array((1..=n2).map(|j| enc(&get(i, j))).collect()))
            .collect(),
    )
}

fn expect_array<'a>(v: &'a Value, what: &str, len: usize) -> DocResult<&'a Vec<Value>> {
    match v {
        Value::Array(a) if a.len() == len => Ok(a),
        Value::Array(a) => err(format!("{what} has length {}, expected {len}", a.len())),
        _ => err(format!("{what} is not an array")),
    }
}

fn grid2_from_doc<T>(doc: &MatrixDocument, dec: &impl Fn(&Value) -> DocResult<T>) -> DocResult<Grid2<T>>
where
    T: glsq::Scalar,
{
    let [n1, n2] = doc.dims[..] else {
        return err(format!("expected 2 dims, got {:?}", doc.dims));
    };
    let rows = expect_array(&doc.entries, "entries", n1)?;
    let mut data = Vec::with_capacity(n1 * n2);
    for row in rows {
        for v in expect_array(row, "row", n2)? {
            data.push(dec(v)?);
        }
    }
    Grid2::new(n1, n2, data).map_err(|e| DocError(e.to_string()))
}

fn grid3_from_doc<T>(doc: &MatrixDocument, dec: &impl Fn(&Value) -> DocResult<T>) -> DocResult<Grid3<T>>
where
    T: glsq::Scalar,
{
    let [n1, n2, n3] = doc.dims[..] else {
        return err(format!("expected 3 dims, got {:?}", doc.dims));
    };
    let slabs = expect_array(&doc.entries, "entries", n1)?;
    let mut data = Vec::with_capacity(n1 * n2 * n3);
    for slab in slabs {
        for row in expect_array(slab, "slab", n2)? {
            for v in expect_array(row, "row", n3)? {
                data.push(dec(v)?);
            }
        }
    }
    Grid3::new((n1, n2, n3), data).map_err(|e| DocError(e.to_string()))
}

pub fn matrix2_from_doc(doc: &MatrixDocument) -> DocResult<Matrix2> {
    if doc.rational {
        return err("expected an integer matrix, got a rational one");
    }
    grid2_from_doc(doc, &value_to_nat)
}

pub fn matrix3_from_doc(doc: &MatrixDocument) -> DocResult<Matrix3> {
    if doc.rational {
        return err("expected an integer matrix, got a rational one");
    }
    grid3_from_doc(doc, &value_to_nat)
}

pub fn rational2_from_doc(doc: &MatrixDocument) -> DocResult<Grid2<Rat>> {
    grid2_from_doc(doc, &value_to_rat)
}

pub fn rational3_from_doc(doc: &MatrixDocument) -> DocResult<RationalMatrix3> {
    grid3_from_doc(doc, &value_to_rat)
}

pub fn doc_from_matrix2(m: &Matrix2) -> MatrixDocument {
    MatrixDocument {
        dims: vec![m.rows(), m.cols()],
        entries: rows_value(m.rows(), m.cols(), |i, j| m.get(i, j).clone(), nat_to_value),
        rational: false,
    }
}

pub fn doc_from_rational2(m: &Grid2<Rat>) -> MatrixDocument {
    MatrixDocument {
        dims: vec![m.rows(), m.cols()],
        entries: rows_value(m.rows(), m.cols(), |i, j| m.get(i, j).clone(), rat_to_value),
        rational: true,
    }
}

fn doc_from_grid3<T: glsq::Scalar>(
    m: &Grid3<T>,
    enc: impl Fn(&T) -> Value,
    rational: bool,
) -> MatrixDocument {
    let (n1, n2, n3) = m.dims();
    MatrixDocument {
        dims: vec![n1, n2, n3],
        entries: Value::Array(
            (1..=n1)
                .map(|i| {
                    Value::Array(
                        (1..=n2)
                            .map(|j| Value::Array((1..=n3).map(|l| enc(m.get(i, j, l))).collect()))
                            .collect(),
                    )
                })
                .collect(),
        ),
        rational,
    }
}

pub fn doc_from_matrix3(m: &Matrix3) -> MatrixDocument {
    doc_from_grid3(m, nat_to_value, false)
}

pub fn doc_from_rational3(m: &RationalMatrix3) -> MatrixDocument {
    doc_from_grid3(m, rat_to_value, true)
}

pub fn pairs_from_doc(bound: usize, pairs: &[[usize; 2]]) -> DocResult<PairSet> {
    PairSet::new(bound, pairs.iter().map(|&[i, j]| (i, j))).map_err(|e| DocError(e.to_string()))
}

pub fn doc_from_pairs(s: &PairSet) -> Vec<[usize; 2]> {
    s.iter().map(|(i, j)| [i, j]).collect()
}

pub fn support_from_doc(doc: &SupportDocument) -> DocResult<SupportSet> {
    SupportSet::new(doc.k, doc.triples.iter().map(|&[i, j, l]| (i, j, l)))
        .map_err(|e| DocError(e.to_string()))
}

pub fn doc_from_support(h: &SupportSet) -> SupportDocument {
    SupportDocument { k: h.k(), triples: h.iter().map(|(i, j, l)| [i, j, l]).collect() }
}

pub fn doc_from_lift(res: &LiftResult) -> LiftDocument {
    LiftDocument {
        square: doc_from_matrix3(&res.square),
        sigma: res.sigma.blocks().to_vec(),
        s_prime: doc_from_pairs(&res.s_prime),
        block_size: None,
        scale: None,
        rationalized: None,
    }
}

pub fn doc_from_real_lift(res: &RealLiftResult) -> LiftDocument {
    LiftDocument {
        block_size: Some(res.block_size),
        scale: Some(format_rat(&res.scale)),
        rationalized: Some(doc_from_rational3(&res.rationalized)),
        ..doc_from_lift(&res.lift)
    }
}

pub fn lift_from_doc(doc: &LiftDocument) -> DocResult<LiftResult> {
    let square = matrix3_from_doc(&doc.square)?;
    let sigma = Partition::new(doc.sigma.clone()).map_err(|e| DocError(e.to_string()))?;
    let s_prime = pairs_from_doc(sigma.n(), &doc.s_prime)?;
    Ok(LiftResult { square, sigma, s_prime })
}

pub fn doc_from_hyper(h: &HyperNumbers) -> HyperDocument {
    HyperDocument {
        rho: h.rho,
        alpha_bar: h.alpha_bar,
        alpha_star: format_rat(&h.alpha_star),
    }
}

fn doc_from_finding(f: &Finding, conjecture: u8) -> FindingDocument {
    FindingDocument {
        conjecture,
        support: doc_from_support(&f.support),
        pairs: doc_from_pairs(&f.pairs),
        rho_restricted: f.rho_restricted,
        contains_bounded: f.contains_bounded,
    }
}

pub fn doc_from_report(r: &ConjectureReport) -> ExploreDocument {
    ExploreDocument {
        k: r.k,
        r_max: r.r_max,
        instances_checked: r.instances_checked,
        verdict: match r.verdict {
            Verdict::ConsistentWithinBounds => "consistent-within-bounds".into(),
            Verdict::CounterexampleFound => "counterexample-found".into(),
        },
        counterexamples: r.counterexamples.iter().map(|f| doc_from_finding(f, 1)).collect(),
        candidates: r.candidates.iter().map(|f| doc_from_finding(f, 2)).collect(),
    }
}
