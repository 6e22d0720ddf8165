//! Command-line front end: quotients, lifts, decompositions, hypergraph
//! invariants, counterexample searches, and the conjecture harness.
//!
//! Results go to stdout as JSON documents; diagnostics go to stderr as a
//! single `error: ...` line. Exit codes: 0 on success, 1 on a precondition
//! or validation failure, 2 on malformed input.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use glsq::explore::{self, EnumerationPolicy};
use glsq::hyper;
use glsq::lift::{self, QuotientInstance};
use glsq::margin::{self, MarginSpec, MarginVector};
use glsq::tensor::Partition;
use glsq::{Matrix2, Nat};

use glsq_cli::docs::{self, InstanceDocument, LiftDocument, MatrixDocument, SupportDocument, VerifyDocument};

#[derive(Parser)]
#[command(name = "glsq", version, about = "Generalized quotients of (partial) Latin squares")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quotient a matrix along one axis (or all of them) by a partition.
    Quotient {
        /// 1, 2, 3 or "all".
        #[arg(long)]
        axis: String,
        /// Blocks as 1-based indices, e.g. "1,2|3,4".
        #[arg(long)]
        partition: String,
        matrix: PathBuf,
    },
    /// Lift an instance file to a partial Latin square.
    Lift { instance: PathBuf },
    /// Lift a rational instance (requires "beta"); emits the scaling
    /// certificate alongside the lift.
    LiftReal { instance: PathBuf },
    /// Re-check a lift file against its instance.
    Verify { instance: PathBuf, lift: PathBuf },
    /// Decompose a 2-indexed matrix into permutation matrices or class
    /// members.
    Decompose {
        #[arg(long)]
        mode: DecomposeMode,
        /// Row margin targets, e.g. "1,1" (class and padded modes).
        #[arg(long)]
        rows: Option<String>,
        /// Column margin targets (class and padded modes).
        #[arg(long)]
        cols: Option<String>,
        /// 1-based columns whose sums are exact (padded mode).
        #[arg(long)]
        exact: Option<String>,
        /// Number of pieces (class and padded modes).
        #[arg(short)]
        k: Option<usize>,
        matrix: PathBuf,
    },
    /// Covering, independence and fractional independence numbers of a
    /// support set.
    Hyper { support: PathBuf },
    /// Re-derive one of the two counterexamples by search.
    Counterexample {
        #[arg(long)]
        which: Which,
    },
    /// Run the conjecture harness.
    Explore {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rmax: usize,
        /// Seed for the sampled policy (k >= 3).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Supports to sample under the sampled policy.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Pair sets sampled per support.
        #[arg(long, default_value_t = 8)]
        pair_samples: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DecomposeMode {
    Perm,
    Class,
    Padded,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    A,
    Gqq,
}

/// Failure with its exit code: 1 for validation, 2 for malformed input.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(msg: impl Display) -> Self {
        Failure { code: 2, message: msg.to_string() }
    }

    fn invalid(msg: impl Display) -> Self {
        Failure { code: 1, message: msg.to_string() }
    }
}

impl From<glsq::Error> for Failure {
    fn from(e: glsq::Error) -> Self {
        Failure::invalid(e)
    }
}

impl From<docs::DocError> for Failure {
    fn from(e: docs::DocError) -> Self {
        Failure::malformed(e)
    }
}

type CmdResult = Result<(), Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::malformed(format!("cannot parse {}: {e}", path.display())))
}

fn emit<T: Serialize>(doc: &T) {
    println!("{}", serde_json::to_string_pretty(doc).expect("documents serialize"));
}

fn parse_partition(text: &str) -> Result<Partition, Failure> {
    let blocks: Vec<Vec<usize>> = text
        .split('|')
        .map(|block| {
            block
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| Failure::malformed(format!("bad partition element {v:?}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Partition::new(blocks).map_err(Failure::from)
}

fn parse_margin(text: &str) -> Result<MarginVector, Failure> {
    let values: Vec<Nat> = text
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<BigUint>()
                .map_err(|_| Failure::malformed(format!("bad margin value {v:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(MarginVector::new(values))
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::malformed(format!("bad index {v:?}")))
        })
        .collect()
}

fn cmd_quotient(axis: &str, partition: &str, path: &Path) -> CmdResult {
    let sigma = parse_partition(partition)?;
    let doc: MatrixDocument = read_json(path)?;
    let axes: Vec<usize> = match axis {
        "all" => (1..=doc.dims.len()).collect(),
        _ => vec![axis
            .parse::<usize>()
            .map_err(|_| Failure::malformed(format!("bad axis {axis:?}")))?],
    };

    match (doc.dims.len(), doc.rational) {
        (2, false) => {
            let mut m = docs::matrix2_from_doc(&doc)?;
            for &ax in &axes {
                m = m.quotient(ax, &sigma)?;
            }
            emit(&docs::doc_from_matrix2(&m));
        }
        (2, true) => {
            let mut m = docs::rational2_from_doc(&doc)?;
            for &ax in &axes {
                m = m.quotient(ax, &sigma)?;
            }
            emit(&docs::doc_from_rational2(&m));
        }
        (3, false) => {
            let mut m = docs::matrix3_from_doc(&doc)?;
            for &ax in &axes {
                m = m.quotient(ax, &sigma)?;
            }
            emit(&docs::doc_from_matrix3(&m));
        }
        (3, true) => {
            let mut m = docs::rational3_from_doc(&doc)?;
            for &ax in &axes {
                m = m.quotient(ax, &sigma)?;
            }
            emit(&docs::doc_from_rational3(&m));
        }
        _ => return Err(Failure::malformed(format!("expected 2 or 3 dims, got {:?}", doc.dims))),
    }
    Ok(())
}

fn instance_from_doc(doc: &InstanceDocument) -> Result<QuotientInstance, Failure> {
    let k = doc.r.len();
    if doc.matrix.dims != vec![k; 3] {
        return Err(Failure::malformed(format!(
            "instance dims {:?} are inconsistent with {} block sizes",
            doc.matrix.dims, k
        )));
    }
    let matrix = docs::matrix3_from_doc(&doc.matrix)?;
    let pairs = docs::pairs_from_doc(k, &doc.s)?;
    QuotientInstance::new(matrix, doc.r.clone(), pairs).map_err(Failure::from)
}

fn cmd_lift(path: &Path) -> CmdResult {
    let doc: InstanceDocument = read_json(path)?;
    let inst = instance_from_doc(&doc)?;
    let res = lift::lift_partial(&inst)?;
    emit(&docs::doc_from_lift(&res));
    Ok(())
}

fn cmd_lift_real(path: &Path) -> CmdResult {
    let doc: InstanceDocument = read_json(path)?;
    let beta = doc
        .beta
        .as_deref()
        .ok_or_else(|| Failure::invalid("lift-real requires a \"beta\" field"))?;
    let beta = docs::parse_rat(beta)?;
    let matrix = docs::rational3_from_doc(&doc.matrix)?;
    let pairs = docs::pairs_from_doc(matrix.side()?, &doc.s)?;
    let res = lift::lift_real(&matrix, &beta, &pairs)?;
    emit(&docs::doc_from_real_lift(&res));
    Ok(())
}

fn cmd_verify(instance: &Path, lift_path: &Path) -> CmdResult {
    let inst_doc: InstanceDocument = read_json(instance)?;
    let inst = instance_from_doc(&inst_doc)?;
    let lift_doc: LiftDocument = read_json(lift_path)?;
    let res = docs::lift_from_doc(&lift_doc)?;
    let report = lift::verify_lift(&inst, &res);
    emit(&VerifyDocument {
        ok: report.ok(),
        failures: report.failures.iter().map(|f| f.to_string()).collect(),
    });
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::invalid(format!("verification failed: {report}")))
    }
}

fn cmd_decompose(
    mode: DecomposeMode,
    rows: Option<&str>,
    cols: Option<&str>,
    exact: Option<&str>,
    k: Option<usize>,
    path: &Path,
) -> CmdResult {
    let doc: MatrixDocument = read_json(path)?;
    let m: Matrix2 = docs::matrix2_from_doc(&doc)?;
    let margin_args = |name: &str, v: Option<&str>| {
        v.map(parse_margin)
            .transpose()?
            .ok_or_else(|| Failure::invalid(format!("--{name} is required for this mode")))
    };
    let pieces = match mode {
        DecomposeMode::Perm => margin::perm_decompose(&m)?,
        DecomposeMode::Class => {
            let r = margin_args("rows", rows)?;
            let s = margin_args("cols", cols)?;
            let k = k.ok_or_else(|| Failure::invalid("-k is required for class mode"))?;
            margin::class_decompose(&m, &r, &s, k)?
        }
        DecomposeMode::Padded => {
            let r = margin_args("rows", rows)?;
            let s = margin_args("cols", cols)?;
            let k = k.ok_or_else(|| Failure::invalid("-k is required for padded mode"))?;
            let exact = exact.map(parse_index_list).transpose()?.unwrap_or_default();
            let spec = MarginSpec::new(r, s, exact)?;
            margin::padded_decompose(&m, &spec, k)?
        }
    };
    emit(&glsq_cli::docs::PiecesDocument {
        pieces: pieces.iter().map(docs::doc_from_matrix2).collect(),
    });
    Ok(())
}

fn cmd_hyper(path: &Path) -> CmdResult {
    let doc: SupportDocument = read_json(path)?;
    let h = docs::support_from_doc(&doc)?;
    let numbers = hyper::hyper_numbers(&h)?;
    emit(&docs::doc_from_hyper(&numbers));
    Ok(())
}

fn cmd_counterexample(which: Which) -> CmdResult {
    match which {
        Which::A => {
            let m = hyper::find_statement_a_counterexample()?;
            emit(&docs::doc_from_matrix3(&m));
        }
        Which::Gqq => {
            let (h, m, r) = hyper::find_gqq_not_guqq()?;
            let alpha = hyper::alpha_star(&h)?;
            emit(&glsq_cli::docs::GqqWitnessDocument {
                support: docs::doc_from_support(&h),
                matrix: docs::doc_from_matrix3(&m),
                r: r.as_usizes()?,
                alpha_star: docs::format_rat(&alpha),
            });
        }
    }
    Ok(())
}

fn cmd_explore(k: usize, rmax: usize, seed: u64, samples: usize, pair_samples: usize, threads: usize) -> CmdResult {
    let policy = if k <= 2 {
        EnumerationPolicy::Exhaustive
    } else {
        EnumerationPolicy::Sampled { supports: samples, pair_sets: pair_samples, seed }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::invalid(format!("cannot build thread pool: {e}")))?;
    let report = pool.install(|| explore::test_conjectures(k, rmax, &policy))?;
    emit(&docs::doc_from_report(&report));
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.cmd {
        Cmd::Quotient { axis, partition, matrix } => cmd_quotient(&axis, &partition, &matrix),
        Cmd::Lift { instance } => cmd_lift(&instance),
        Cmd::LiftReal { instance } => cmd_lift_real(&instance),
        Cmd::Verify { instance, lift } => cmd_verify(&instance, &lift),
        Cmd::Decompose { mode, rows, cols, exact, k, matrix } => {
            cmd_decompose(mode, rows.as_deref(), cols.as_deref(), exact.as_deref(), k, &matrix)
        }
        Cmd::Hyper { support } => cmd_hyper(&support),
        Cmd::Counterexample { which } => cmd_counterexample(which),
        Cmd::Explore { k, rmax, seed, samples, pair_samples, threads } => {
            cmd_explore(k, rmax, seed, samples, pair_samples, threads)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("bad invocation").to_string();
            eprintln!("error: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
