//! Exact rational linear programming.
//!
//! A dense two-phase simplex over `BigRational` with Bland's anti-cycling
//! rule: deterministic, terminating, and free of floating point. Speed is a
//! non-goal; instances here are desk-scale (tens of variables).
//!
//! `Ratio` normalizes after every operation, so all values stay in lowest
//! terms throughout.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rat;

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Per-variable domain. The default is `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    /// `x >= l` for an arbitrary rational `l` (may be negative).
    LowerBound(Rat),
    Free,
}

#[derive(Debug, Clone)]
struct Constraint {
    coeffs: Vec<Rat>,
    relation: Relation,
    rhs: Rat,
}

/// A linear program in natural form: maximize `c . x` subject to rational
/// linear constraints and per-variable lower bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    names: Vec<String>,
    objective: Vec<Rat>,
    constraints: Vec<Constraint>,
    bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// A program over `num_vars` variables named `x1..xn`, objective zero,
    /// all variables nonnegative.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            names: (1..=num_vars).map(|i| format!("x{i}")).collect(),
            objective: vec![Rat::zero(); num_vars],
            constraints: Vec::new(),
            bounds: vec![VarBound::NonNegative; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn set_name(&mut self, var: usize, name: impl Into<String>) {
        self.names[var] = name.into();
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    /// Sets the coefficient vector of the (maximized) objective.
    pub fn set_objective(&mut self, coeffs: Vec<Rat>) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::dims("objective length must match variable count"));
        }
        self.objective = coeffs;
        Ok(())
    }

    pub fn set_bound(&mut self, var: usize, bound: VarBound) -> Result<()> {
        if var >= self.num_vars() {
            return Err(Error::index(format!("variable {var} out of range")));
        }
        self.bounds[var] = bound;
        Ok(())
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::dims("constraint length must match variable count"));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Exact satisfaction check of every constraint and bound.
    pub fn is_feasible_point(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        for (i, b) in self.bounds.iter().enumerate() {
            let ok = match b {
                VarBound::NonNegative => !x[i].is_negative(),
                VarBound::LowerBound(l) => x[i] >= *l,
                VarBound::Free => true,
            };
            if !ok {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: Rat = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }

    pub fn objective_at(&self, x: &[Rat]) -> Rat {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve; `assignment` and `objective` are present exactly when
/// the status is `Optimal`, and then satisfy every constraint exactly.
#[derive(Debug, Clone)]
pub struct LpSolution {
    status: LpStatus,
    assignment: Option<Vec<Rat>>,
    objective: Option<Rat>,
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        self.status
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn assignment(&self) -> Option<&[Rat]> {
        self.assignment.as_deref()
    }

    pub fn objective(&self) -> Option<&Rat> {
        self.objective.as_ref()
    }
}

/// Dense simplex tableau in equality form with nonnegative variables.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Reduced costs of the current cost vector.
    costs: Vec<Rat>,
    value: Rat,
    /// Columns barred from entering (artificials in phase 2).
    banned: Vec<bool>,
}

impl Tableau {
    fn num_cols(&self) -> usize {
        self.costs.len()
    }

    /// Eliminates basic columns from the cost row.
    fn price_out(&mut self) {
        for r in 0..self.rows.len() {
            let j = self.basis[r];
            if !self.costs[j].is_zero() {
                let f = self.costs[j].clone();
                for c in 0..self.num_cols() {
                    let delta = &f * &self.rows[r][c];
                    self.costs[c] -= delta;
                }
                self.value += &f * &self.rhs[r];
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        for c in 0..self.num_cols() {
            self.rows[r][c] /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i != r && !self.rows[i][j].is_zero() {
                let f = self.rows[i][j].clone();
                for c in 0..self.num_cols() {
                    let delta = &f * &self.rows[r][c];
                    self.rows[i][c] -= delta;
                }
                let delta = &f * &self.rhs[r];
                self.rhs[i] -= delta;
            }
        }
        if !self.costs[j].is_zero() {
            let f = self.costs[j].clone();
            for c in 0..self.num_cols() {
                let delta = &f * &self.rows[r][c];
                self.costs[c] -= delta;
            }
            self.value += &f * &self.rhs[r];
        }
        self.basis[r] = j;
    }

    /// Runs simplex iterations under Bland's rule. Returns false when the
    /// objective is unbounded above.
    fn optimize(&mut self) -> bool {
        loop {
            // Bland: the lowest-index column with positive reduced cost.
            let entering = (0..self.num_cols())
                .find(|&j| !self.banned[j] && self.costs[j].is_positive());
            let Some(j) = entering else {
                return true;
            };
            // Ratio test; ties broken by the smallest basic variable index.
            let mut best: Option<(Rat, usize, usize)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][j].is_positive() {
                    let ratio = &self.rhs[r] / &self.rows[r][j];
                    let key = (ratio, self.basis[r]);
                    match &best {
                        Some((br, bb, _)) if (&key.0, &key.1) >= (br, bb) => {}
                        _ => best = Some((key.0, key.1, r)),
                    }
                }
            }
            let Some((_, _, r)) = best else {
                return false;
            };
            self.pivot(r, j);
        }
    }
}

/// Solves the program exactly: two-phase dense simplex, Bland's rule.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();

    // Standardize variables: x = l + u (u >= 0) for lower-bounded variables,
    // x = u - v for free ones.
    #[derive(Clone)]
    enum VarMap {
        Shifted(usize, Rat),
        Split(usize, usize),
    }
    let mut var_map = Vec::with_capacity(n);
    let mut num_std = 0usize;
    for b in &lp.bounds {
        match b {
            VarBound::NonNegative => {
                var_map.push(VarMap::Shifted(num_std, Rat::zero()));
                num_std += 1;
            }
            VarBound::LowerBound(l) => {
                var_map.push(VarMap::Shifted(num_std, l.clone()));
                num_std += 1;
            }
            VarBound::Free => {
                var_map.push(VarMap::Split(num_std, num_std + 1));
                num_std += 2;
            }
        }
    }

    let expand = |coeffs: &[Rat]| -> (Vec<Rat>, Rat) {
        // Returns standardized coefficients and the constant contributed by
        // the lower-bound shifts.
        let mut out = vec![Rat::zero(); num_std];
        let mut shift = Rat::zero();
        for (i, c) in coeffs.iter().enumerate() {
            match &var_map[i] {
                VarMap::Shifted(u, l) => {
                    out[*u] += c;
                    shift += c * l;
                }
                VarMap::Split(u, v) => {
                    out[*u] += c;
                    out[*v] -= c;
                }
            }
        }
        (out, shift)
    };

    // Equality rows with slacks, rhs >= 0.
    let m = lp.constraints.len();
    let num_slacks = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let total_known = num_std + num_slacks;

    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    let mut slack_idx = num_std;
    for c in &lp.constraints {
        let (mut row, shift) = expand(&c.coeffs);
        row.resize(total_known, Rat::zero());
        let mut b = &c.rhs - shift;
        match c.relation {
            Relation::Le => {
                row[slack_idx] = Rat::one();
                slack_idx += 1;
            }
            Relation::Ge => {
                row[slack_idx] = -Rat::one();
                slack_idx += 1;
            }
            Relation::Eq => {}
        }
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
        }
        rows.push(row);
        rhs.push(b);
    }

    // Initial basis: a +1 slack where available, otherwise an artificial.
    let mut basis = vec![usize::MAX; m];
    let mut num_artificial = 0usize;
    for r in 0..m {
        if let Some(j) = (num_std..total_known).find(|&j| rows[r][j].is_one()) {
            if (0..m).all(|i| i == r || rows[i][j].is_zero()) {
                basis[r] = j;
            }
        }
        if basis[r] == usize::MAX {
            num_artificial += 1;
        }
    }
    let total = total_known + num_artificial;
    let mut art_idx = total_known;
    for row in rows.iter_mut() {
        row.resize(total, Rat::zero());
    }
    for r in 0..m {
        if basis[r] == usize::MAX {
            rows[r][art_idx] = Rat::one();
            basis[r] = art_idx;
            art_idx += 1;
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        costs: vec![Rat::zero(); total],
        value: Rat::zero(),
        banned: vec![false; total],
    };

    // Phase 1: maximize minus the sum of artificials.
    if num_artificial > 0 {
        for j in total_known..total {
            t.costs[j] = -Rat::one();
        }
        t.price_out();
        if !t.optimize() {
            return Err(Error::internal("phase-1 objective unbounded"));
        }
        if !t.value.is_zero() {
            return Ok(LpSolution { status: LpStatus::Infeasible, assignment: None, objective: None });
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= total_known {
                if let Some(j) = (0..total_known).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, j);
                } else {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
        for j in total_known..total {
            t.banned[j] = true;
        }
    }

    // Phase 2: original objective over the standardized variables.
    let (std_obj, obj_shift) = expand(&lp.objective);
    t.costs = vec![Rat::zero(); total];
    t.costs[..num_std].clone_from_slice(&std_obj);
    t.value = Rat::zero();
    t.price_out();
    if !t.optimize() {
        return Ok(LpSolution { status: LpStatus::Unbounded, assignment: None, objective: None });
    }

    let mut std_x = vec![Rat::zero(); total];
    for (r, &j) in t.basis.iter().enumerate() {
        std_x[j] = t.rhs[r].clone();
    }
    let assignment: Vec<Rat> = var_map
        .iter()
        .map(|vm| match vm {
            VarMap::Shifted(u, l) => l + &std_x[*u],
            VarMap::Split(u, v) => &std_x[*u] - &std_x[*v],
        })
        .collect();
    let objective = lp.objective_at(&assignment);

    debug_assert!(lp.is_feasible_point(&assignment), "optimal point violates a constraint");
    debug_assert_eq!(&objective, &(t.value.clone() + obj_shift));

    Ok(LpSolution {
        status: LpStatus::Optimal,
        assignment: Some(assignment),
        objective: Some(objective),
    })
}

/// A system of rational equalities `a . x = b`, inequalities `a . x <= b`,
/// and strict positivity demands on listed variables; all variables are
/// nonnegative.
#[derive(Debug, Clone, Default)]
pub struct StrictSystem {
    pub num_vars: usize,
    pub equalities: Vec<(Vec<Rat>, Rat)>,
    pub inequalities: Vec<(Vec<Rat>, Rat)>,
    /// 0-based indices of variables required strictly positive.
    pub positive: Vec<usize>,
}

/// Decides strict rational feasibility by maximizing a slack `eps` with
/// `x_i >= eps` on the listed variables (and `eps <= 1` so the program stays
/// bounded; any positive optimum certifies strict feasibility). Returns a
/// witness assignment iff the optimum is positive.
pub fn strict_feasible(sys: &StrictSystem) -> Result<Option<Vec<Rat>>> {
    let n = sys.num_vars;
    let mut lp = LinearProgram::new(n + 1);
    lp.set_name(n, "eps");
    let mut obj = vec![Rat::zero(); n + 1];
    obj[n] = Rat::one();
    lp.set_objective(obj)?;

    let widen = |coeffs: &[Rat]| -> Result<Vec<Rat>> {
        if coeffs.len() != n {
            return Err(Error::dims("system row length must match variable count"));
        }
        let mut row = coeffs.to_vec();
        row.push(Rat::zero());
        Ok(row)
    };
    for (coeffs, b) in &sys.equalities {
        lp.add_constraint(widen(coeffs)?, Relation::Eq, b.clone())?;
    }
    for (coeffs, b) in &sys.inequalities {
        lp.add_constraint(widen(coeffs)?, Relation::Le, b.clone())?;
    }
    for &i in &sys.positive {
        if i >= n {
            return Err(Error::index(format!("positive variable {i} out of range")));
        }
        let mut row = vec![Rat::zero(); n + 1];
        row[i] = Rat::one();
        row[n] = -Rat::one();
        lp.add_constraint(row, Relation::Ge, Rat::zero())?;
    }
    let mut cap = vec![Rat::zero(); n + 1];
    cap[n] = Rat::one();
    lp.add_constraint(cap, Relation::Le, Rat::one())?;

    let sol = solve(&lp)?;
    if !sol.is_optimal() {
        return Ok(None);
    }
    let x = sol.assignment().expect("optimal");
    if x[n].is_positive() {
        Ok(Some(x[..n].to_vec()))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn r(v: i64) -> Rat {
        rat(v, 1)
    }

    #[test]
    fn one_variable_cap() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![r(1)]).unwrap();
        lp.add_constraint(vec![r(1)], Relation::Le, r(3)).unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status(), LpStatus::Optimal);
        assert_eq!(sol.assignment().unwrap(), &[r(3)]);
        assert_eq!(sol.objective().unwrap(), &r(3));
    }

    #[test]
    fn two_variable_budget() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![r(1), r(1)]).unwrap();
        lp.add_constraint(vec![r(1), r(1)], Relation::Le, r(1)).unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective().unwrap(), &r(1));
    }

    #[test]
    fn infeasible_band() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![r(1)]).unwrap();
        lp.add_constraint(vec![r(1)], Relation::Le, r(1)).unwrap();
        lp.add_constraint(vec![r(1)], Relation::Ge, r(2)).unwrap();
        assert_eq!(solve(&lp).unwrap().status(), LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(vec![r(1)]).unwrap();
        lp.add_constraint(vec![r(1)], Relation::Ge, r(1)).unwrap();
        assert_eq!(solve(&lp).unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn free_and_shifted_variables() {
        let mut lp = LinearProgram::new(2);
        lp.set_bound(0, VarBound::Free).unwrap();
        lp.set_bound(1, VarBound::LowerBound(rat(-2, 1))).unwrap();
        lp.set_objective(vec![r(1), r(1)]).unwrap();
        lp.add_constraint(vec![r(1), r(0)], Relation::Le, r(-1)).unwrap();
        lp.add_constraint(vec![r(0), r(1)], Relation::Le, r(2)).unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status(), LpStatus::Optimal);
        assert_eq!(sol.assignment().unwrap(), &[r(-1), r(2)]);
        assert_eq!(sol.objective().unwrap(), &r(1));
    }

    #[test]
    fn beale_cycling_instance_terminates() {
        // Classic degenerate instance that cycles under Dantzig's rule.
        let mut lp = LinearProgram::new(4);
        lp.set_objective(vec![rat(3, 4), r(-150), rat(1, 50), r(-6)]).unwrap();
        lp.add_constraint(vec![rat(1, 4), r(-60), rat(-1, 25), r(9)], Relation::Le, r(0)).unwrap();
        lp.add_constraint(vec![rat(1, 2), r(-90), rat(-1, 50), r(3)], Relation::Le, r(0)).unwrap();
        lp.add_constraint(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1)).unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status(), LpStatus::Optimal);
        assert_eq!(sol.objective().unwrap(), &rat(1, 20));
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x + y with 2x + y <= 1 and x + 3y <= 2: optimum at (1/5, 3/5).
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![r(1), r(1)]).unwrap();
        lp.add_constraint(vec![r(2), r(1)], Relation::Le, r(1)).unwrap();
        lp.add_constraint(vec![r(1), r(3)], Relation::Le, r(2)).unwrap();
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.assignment().unwrap(), &[rat(1, 5), rat(3, 5)]);
        assert_eq!(sol.objective().unwrap(), &rat(4, 5));
    }

    #[test]
    fn strict_feasibility_examples() {
        let fixed = StrictSystem {
            num_vars: 1,
            equalities: vec![(vec![r(1)], r(1))],
            positive: vec![0],
            ..Default::default()
        };
        assert_eq!(strict_feasible(&fixed).unwrap(), Some(vec![r(1)]));

        let split = StrictSystem {
            num_vars: 2,
            equalities: vec![(vec![r(1), r(1)], r(1))],
            positive: vec![0, 1],
            ..Default::default()
        };
        assert_eq!(strict_feasible(&split).unwrap(), Some(vec![rat(1, 2), rat(1, 2)]));

        let pinned = StrictSystem {
            num_vars: 1,
            equalities: vec![(vec![r(1)], r(0))],
            positive: vec![0],
            ..Default::default()
        };
        assert_eq!(strict_feasible(&pinned).unwrap(), None);

        let contradictory = StrictSystem {
            num_vars: 1,
            equalities: vec![(vec![r(1)], r(1)), (vec![r(1)], r(2))],
            positive: vec![],
            ..Default::default()
        };
        assert_eq!(strict_feasible(&contradictory).unwrap(), None);
    }

    #[test]
    fn unconstrained_positivity_hits_the_cap() {
        // Nothing bounds x above, so eps reaches its cap and x = eps = 1.
        let open = StrictSystem { num_vars: 1, positive: vec![0], ..Default::default() };
        let x = strict_feasible(&open).unwrap().unwrap();
        assert!(x[0].is_positive());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_rat() -> impl Strategy<Value = Rat> {
            (0i64..=6, 1i64..=3).prop_map(|(p, q)| rat(p, q))
        }

        proptest! {
            // Packing LPs (nonnegative data) are feasible at zero; scaling an
            // optimum down keeps it feasible and cannot beat the optimum.
            #[test]
            fn scaled_optimum_stays_below(
                n in 1usize..=4,
                rows in proptest::collection::vec(proptest::collection::vec((0i64..=3, 1i64..=2), 4), 1..=4),
                caps in proptest::collection::vec(1i64..=5, 1..=4),
                num in 0i64..=4,
            ) {
                let mut lp = LinearProgram::new(n);
                lp.set_objective(vec![Rat::one(); n]).unwrap();
                for (row, cap) in rows.iter().zip(&caps) {
                    let coeffs: Vec<Rat> = row.iter().take(n).map(|&(p, q)| rat(p, q) + Rat::one()).collect();
                    if coeffs.len() == n {
                        lp.add_constraint(coeffs, Relation::Le, rat(*cap, 1)).unwrap();
                    }
                }
                let sol = solve(&lp).unwrap();
                prop_assert_eq!(sol.status(), LpStatus::Optimal);
                let x = sol.assignment().unwrap();
                prop_assert!(lp.is_feasible_point(x));
                let scale = rat(num, 4);
                let scaled: Vec<Rat> = x.iter().map(|v| v * &scale).collect();
                prop_assert!(lp.is_feasible_point(&scaled));
                prop_assert!(lp.objective_at(&scaled) <= *sol.objective().unwrap());
            }

            #[test]
            fn deterministic_resolve(p in small_rat(), q in small_rat()) {
                let mut lp = LinearProgram::new(2);
                lp.set_objective(vec![p.clone(), q.clone()]).unwrap();
                lp.add_constraint(vec![Rat::one(), Rat::one()], Relation::Le, rat(3, 2)).unwrap();
                lp.add_constraint(vec![p, q], Relation::Le, rat(2, 1)).unwrap();
                let a = solve(&lp).unwrap();
                let b = solve(&lp).unwrap();
                prop_assert_eq!(a.assignment(), b.assignment());
                prop_assert_eq!(a.objective(), b.objective());
            }
        }
    }
}
