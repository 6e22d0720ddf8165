//! Desk-scale falsification harness for the two conjectures relating GQPQ
//! containment to the covering number of the restricted support.
//!
//! Containment at a fixed block-size vector is decided exactly by rational
//! LP feasibility (a rational witness scales to an integer one). The
//! existential over all block sizes is unbounded, so the harness only scans
//! `1..=r_max` per coordinate: a positive answer is exact, a negative one is
//! a lower bound, and conjecture-2 findings are therefore flagged as
//! candidates rather than counterexamples.

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyper::{rho, SupportSet};
use crate::ratlp::{self, LinearProgram, Relation};
use crate::tensor::PairSet;
use crate::{Rat, RationalMatrix3};

/// A rational witness that `h` contains an S-GQPQ with block sizes `r`:
/// a nonnegative matrix supported inside `h` restricted to `s`, line sums at
/// most `r_i * r_j`, vertical sums exactly `r_i * r_j` over `s`.
pub fn contains_s_gqpq_witness(
    h: &SupportSet,
    s: &PairSet,
    r: &[usize],
) -> Result<Option<RationalMatrix3>> {
    let k = h.k();
    if s.bound() != k {
        return Err(Error::dims("pair set bound must match the support side"));
    }
    if r.len() != k || r.contains(&0) {
        return Err(Error::validation("block sizes must be k positive integers"));
    }
    let cells: Vec<(usize, usize, usize)> = h.restrict_to_pairs(s)?.iter().collect();
    let var_of = |cell: (usize, usize, usize)| cells.iter().position(|&c| c == cell);

    let mut lp = LinearProgram::new(cells.len());
    for i in 1..=k {
        for j in 1..=k {
            let bound = Rat::from_integer(((r[i - 1] * r[j - 1]) as u64).into());
            for axis in 1..=3 {
                let mut row = vec![Rat::zero(); cells.len()];
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
                    lp.add_constraint(row, Relation::Eq, bound.clone())?;
                } else if nonempty {
                    lp.add_constraint(row, Relation::Le, bound.clone())?;
                }
            }
        }
    }
    let sol = ratlp::solve(&lp)?;
    match sol.status() {
        ratlp::LpStatus::Optimal => {
            let x = sol.assignment().expect("optimal");
            let mut m = RationalMatrix3::zeros((k, k, k));
            for (idx, &(i, j, l)) in cells.iter().enumerate() {
                m.set(i, j, l, x[idx].clone());
            }
            Ok(Some(m))
        }
        ratlp::LpStatus::Infeasible => Ok(None),
        ratlp::LpStatus::Unbounded => Err(Error::internal("feasibility LP cannot be unbounded")),
    }
}

/// Whether `h` contains an S-GQPQ with the given block sizes. Exact for the
/// fixed `r`: rational feasibility and integer feasibility agree up to
/// scaling `(M, r) -> (t^2 M, t r)`.
pub fn contains_s_gqpq(h: &SupportSet, s: &PairSet, r: &[usize]) -> Result<bool> {
    Ok(contains_s_gqpq_witness(h, s, r)?.is_some())
}

/// Disjunction of `contains_s_gqpq` over all block-size vectors with entries
/// in `1..=r_max`. Sound, but incomplete in the false direction: some larger
/// `r` might still succeed.
pub fn contains_s_gqpq_bounded(h: &SupportSet, s: &PairSet, r_max: usize) -> Result<bool> {
    if r_max == 0 {
        return Err(Error::validation("r_max must be positive"));
    }
    let k = h.k();
    let mut r = vec![1usize; k];
    loop {
        // Proportional vectors give the same LP; test only primitive ones.
        if r.iter().fold(0usize, |g, &v| g.gcd(&v)) == 1 && contains_s_gqpq(h, s, &r)? {
            return Ok(true);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(false);
            }
            pos -= 1;
            if r[pos] < r_max {
                r[pos] += 1;
                for v in r.iter_mut().skip(pos + 1) {
                    *v = 1;
                }
                break;
            }
        }
    }
}

/// How the pair-set/support enumeration is driven.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerationPolicy {
    /// All `2^(k^3)` supports crossed with all `2^(k^2)` pair sets; only
    /// sensible for `k <= 2`.
    Exhaustive,
    /// Seeded pseudo-random sampling.
    Sampled { supports: usize, pair_sets: usize, seed: u64 },
}

/// Which conjecture an instance bears on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingKind {
    /// Containment holds but the covering number differs from `|S|`: an
    /// exact counterexample to conjecture 1.
    ConjectureOneViolation,
    /// Covering number equals `|S|` but bounded containment failed: a
    /// candidate against conjecture 2, pending larger block sizes.
    ConjectureTwoCandidate,
}

/// One flagged instance, with the quantities that flagged it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub kind: FindingKind,
    pub support: SupportSet,
    pub pairs: PairSet,
    pub rho_restricted: usize,
    pub contains_bounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithinBounds,
    CounterexampleFound,
}

/// Outcome of a harness run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureReport {
    pub k: usize,
    pub r_max: usize,
    pub instances_checked: usize,
    pub counterexamples: Vec<Finding>,
    pub candidates: Vec<Finding>,
    pub verdict: Verdict,
}

fn support_from_mask(k: usize, mask: u64) -> SupportSet {
    SupportSet::new(
        k,
        (0..k * k * k)
            .filter(|c| mask >> c & 1 == 1)
            .map(|c| (c / (k * k) + 1, (c / k) % k + 1, c % k + 1)),
    )
    .expect("cells in range")
}

fn pairs_from_mask(k: usize, mask: u64) -> PairSet {
    PairSet::new(
        k,
        (0..k * k).filter(|c| mask >> c & 1 == 1).map(|c| (c / k + 1, c % k + 1)),
    )
    .expect("pairs in range")
}

/// Runs the harness over `(H, S)` instances: checks conjecture 1 exactly and
/// conjecture 2 up to the block-size bound, re-verifying every exact
/// counterexample from scratch before reporting it.
pub fn test_conjectures(k: usize, r_max: usize, policy: &EnumerationPolicy) -> Result<ConjectureReport> {
    if k == 0 || r_max == 0 {
        return Err(Error::validation("k and r_max must be positive"));
    }
    let instances: Vec<(SupportSet, PairSet)> = match policy {
        EnumerationPolicy::Exhaustive => {
            if k > 2 {
                return Err(Error::validation(
                    "exhaustive enumeration is only tractable for k <= 2; use sampling",
                ));
            }
            let cube_bits = k * k * k;
            let pair_bits = k * k;
            (0u64..1 << cube_bits)
                .flat_map(|hm| {
                    (0u64..1 << pair_bits)
                        .map(move |sm| (hm, sm))
                })
                .map(|(hm, sm)| (support_from_mask(k, hm), pairs_from_mask(k, sm)))
                .collect()
        }
        EnumerationPolicy::Sampled { supports, pair_sets, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut out = Vec::with_capacity(supports * pair_sets);
            for _ in 0..*supports {
                let density = rng.gen_range(0.2..0.8);
                let h: Vec<(usize, usize, usize)> = (1..=k)
                    .flat_map(|i| (1..=k).flat_map(move |j| (1..=k).map(move |l| (i, j, l))))
                    .filter(|_| rng.gen_bool(density))
                    .collect();
                let h = SupportSet::new(k, h)?;
                for _ in 0..*pair_sets {
                    let s: Vec<(usize, usize)> = (1..=k)
                        .flat_map(|i| (1..=k).map(move |j| (i, j)))
                        .filter(|_| rng.gen_bool(0.5))
                        .collect();
                    out.push((h.clone(), PairSet::new(k, s)?));
                }
            }
            out
        }
    };

    let classified: Vec<Result<Option<Finding>>> = instances
        .par_iter()
        .map(|(h, s)| {
            let rho_restricted = rho(&h.restrict_to_pairs(s)?);
            let contains = contains_s_gqpq_bounded(h, s, r_max)?;
            let kind = if contains && rho_restricted != s.len() {
                Some(FindingKind::ConjectureOneViolation)
            } else if !contains && rho_restricted == s.len() {
                Some(FindingKind::ConjectureTwoCandidate)
            } else {
                None
            };
            Ok(kind.map(|kind| Finding {
                kind,
                support: h.clone(),
                pairs: s.clone(),
                rho_restricted,
                contains_bounded: contains,
            }))
        })
        .collect();

    let mut counterexamples = Vec::new();
    let mut candidates = Vec::new();
    for item in classified {
        match item? {
            Some(f) if f.kind == FindingKind::ConjectureOneViolation => {
                // Re-verify from scratch before reporting.
                let fresh_h = SupportSet::new(f.support.k(), f.support.iter())?;
                let fresh_s = PairSet::new(f.pairs.bound(), f.pairs.iter())?;
                let again_rho = rho(&fresh_h.restrict_to_pairs(&fresh_s)?);
                let again_contains = contains_s_gqpq_bounded(&fresh_h, &fresh_s, r_max)?;
                if again_rho != f.rho_restricted || again_contains != f.contains_bounded {
                    return Err(Error::internal("counterexample did not re-verify"));
                }
                counterexamples.push(f);
            }
            Some(f) => candidates.push(f),
            None => {}
        }
    }

    let verdict = if counterexamples.is_empty() {
        Verdict::ConsistentWithinBounds
    } else {
        Verdict::CounterexampleFound
    };
    Ok(ConjectureReport {
        k,
        r_max,
        instances_checked: instances.len(),
        counterexamples,
        candidates,
        verdict,
    })
}
