//! Dense two-phase primal simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column with positive
//! reduced cost, lowest-index basic variable among ratio-test ties), so the
//! method terminates on degenerate problems. Problems are small; the tableau
//! is kept dense.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{serde_rational, Rational};

/// `maximize objective · x` subject to `row · x = rhs` for every equality,
/// `row · x ≥ rhs` for every inequality, and `x_k ≥ 0` where
/// `nonnegative[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub variables: Vec<String>,
    pub objective: Vec<Rational>,
    pub equalities: Vec<(Vec<Rational>, Rational)>,
    pub inequalities: Vec<(Vec<Rational>, Rational)>,
    pub nonnegative: Vec<bool>,
}

impl LpProblem {
    /// A problem over non-negative variables with no constraints yet.
    pub fn new(variables: Vec<String>, objective: Vec<Rational>) -> Self {
        let n = variables.len();
        assert_eq!(objective.len(), n, "objective needs one coefficient per variable");
        Self { variables, objective, equalities: Vec::new(), inequalities: Vec::new(), nonnegative: vec![true; n] }
    }

    pub fn add_equality(&mut self, row: Vec<Rational>, rhs: Rational) {
        assert_eq!(row.len(), self.variables.len());
        self.equalities.push((row, rhs));
    }

    /// Adds `row · x ≥ rhs`.
    pub fn add_inequality(&mut self, row: Vec<Rational>, rhs: Rational) {
        assert_eq!(row.len(), self.variables.len());
        self.inequalities.push((row, rhs));
    }

    pub fn constraint_count(&self) -> usize {
        self.equalities.len() + self.inequalities.len()
    }

    /// Exact check of every constraint and sign restriction.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.variables.len() {
            return false;
        }
        let dot = |row: &[Rational]| -> Rational { row.iter().zip(x).map(|(a, b)| a * b).sum() };
        self.nonnegative.iter().zip(x).all(|(&nn, v)| !nn || !v.is_negative())
            && self.equalities.iter().all(|(row, rhs)| &dot(row) == rhs)
            && self.inequalities.iter().all(|(row, rhs)| &dot(row) >= rhs)
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per problem variable; empty unless optimal.
    #[serde(serialize_with = "serialize_vec")]
    pub assignment: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub objective_value: Rational,
    /// Names of the basic columns at termination (`s<k>` are surplus columns,
    /// `<name>-` the negative part of a free variable).
    pub basis: Vec<String>,
    /// Final phase-two reduced costs per column; all non-positive at an optimum.
    #[serde(serialize_with = "serialize_vec")]
    pub reduced_costs: Vec<Rational>,
    pub pivots: usize,
}

fn serialize_vec<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&crate::rational::format_rational(x))?;
    }
    seq.end()
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let f = self.rows[r][col].clone();
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[r] -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut r = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    r[j] -= &cost[b] * v;
                }
            }
        }
        r
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| &cost[b] * v).sum()
    }

    /// Maximizes `cost` over the current basis; columns with `allowed[j] ==
    /// false` never enter. Returns false on unboundedness.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let reduced = self.reduced_costs(cost);
            let Some(enter) = (0..reduced.len()).find(|&j| allowed[j] && reduced[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
    }
}

/// Solves an [`LpProblem`] exactly. Infeasibility and unboundedness are
/// reported through [`LpSolution::status`].
pub fn solve_lp(problem: &LpProblem) -> LpSolution {
    let nv = problem.variables.len();
    // structural columns: each variable, plus a negative part for free ones
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(nv);
    let mut names: Vec<String> = Vec::new();
    for (k, name) in problem.variables.iter().enumerate() {
        let pos = names.len();
        names.push(name.clone());
        let neg = (!problem.nonnegative[k]).then(|| {
            names.push(format!("{name}-"));
            names.len() - 1
        });
        col_of_var.push((pos, neg));
    }
    let n_struct = names.len();
    let n_ineq = problem.inequalities.len();
    for k in 0..n_ineq {
        names.push(format!("s{k}"));
    }
    let m = problem.equalities.len() + n_ineq;
    let n_art = m;
    let ncols = n_struct + n_ineq + n_art;

    let expand = |row: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); ncols];
        for (k, v) in row.iter().enumerate() {
            let (pos, neg) = col_of_var[k];
            out[pos] = v.clone();
            if let Some(neg) = neg {
                out[neg] = -v;
            }
        }
        out
    };

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (row, b) in &problem.equalities {
        rows.push(expand(row));
        rhs.push(b.clone());
    }
    for (k, (row, b)) in problem.inequalities.iter().enumerate() {
        let mut r = expand(row);
        r[n_struct + k] = -Rational::from_integer(1.into());
        rows.push(r);
        rhs.push(b.clone());
    }
    for i in 0..m {
        if rhs[i].is_negative() {
            for v in rows[i].iter_mut() {
                *v = -&*v;
            }
            rhs[i] = -&rhs[i];
        }
        rows[i][n_struct + n_ineq + i] = Rational::from_integer(1.into());
    }
    let mut t = Tableau { rows, rhs, basis: (n_struct + n_ineq..ncols).collect(), pivots: 0 };

    // phase one: maximize −Σ artificials
    let mut phase1 = vec![Rational::zero(); ncols];
    for c in phase1.iter_mut().skip(n_struct + n_ineq) {
        *c = -Rational::from_integer(1.into());
    }
    let all = vec![true; ncols];
    t.optimize(&phase1, &all);
    let infeasible = |pivots| LpSolution {
        status: LpStatus::Infeasible,
        assignment: Vec::new(),
        objective_value: Rational::zero(),
        basis: Vec::new(),
        reduced_costs: Vec::new(),
        pivots,
    };
    if t.value(&phase1).is_negative() {
        return infeasible(t.pivots);
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let is_art = |j: usize| j >= n_struct + n_ineq;
    let mut i = 0;
    while i < t.rows.len() {
        if is_art(t.basis[i]) {
            if let Some(j) = (0..n_struct + n_ineq).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            } else {
                t.rows.remove(i);
                t.rhs.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    let mut cost = vec![Rational::zero(); ncols];
    for (k, c) in problem.objective.iter().enumerate() {
        let (pos, neg) = col_of_var[k];
        cost[pos] = c.clone();
        if let Some(neg) = neg {
            cost[neg] = -c;
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art(j)).collect();
    if !t.optimize(&cost, &allowed) {
        return LpSolution {
            status: LpStatus::Unbounded,
            assignment: Vec::new(),
            objective_value: Rational::zero(),
            basis: Vec::new(),
            reduced_costs: Vec::new(),
            pivots: t.pivots,
        };
    }

    let mut column_value = vec![Rational::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        column_value[b] = t.rhs[i].clone();
    }
    let assignment: Vec<Rational> = col_of_var
        .iter()
        .map(|&(pos, neg)| match neg {
            Some(neg) => &column_value[pos] - &column_value[neg],
            None => column_value[pos].clone(),
        })
        .collect();
    let mut reduced_costs = t.reduced_costs(&cost);
    reduced_costs.truncate(n_struct + n_ineq);
    LpSolution {
        status: LpStatus::Optimal,
        objective_value: problem.objective_at(&assignment),
        assignment,
        basis: t.basis.iter().map(|&b| names[b].clone()).collect(),
        reduced_costs,
        pivots: t.pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("x{k}")).collect()
    }

    #[test]
    fn single_bound() {
        let mut p = LpProblem::new(names(1), vec![int(1)]);
        p.add_inequality(vec![int(-1)], int(-1)); // x ≤ 1
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.assignment, vec![int(1)]);
        assert_eq!(s.objective_value, int(1));
        assert!(s.reduced_costs.iter().all(|r| !r.is_positive()));
    }

    #[test]
    fn degenerate_simplex_face() {
        let mut p = LpProblem::new(names(2), vec![int(1), int(1)]);
        p.add_equality(vec![int(1), int(1)], int(1));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective_value, int(1));
        assert!(p.is_feasible(&s.assignment));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(names(1), vec![int(1)]);
        p.add_equality(vec![int(1)], int(-1));
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);

        let mut p = LpProblem::new(names(2), vec![int(1), int(0)]);
        p.add_inequality(vec![int(1), int(-1)], int(0));
        assert_eq!(solve_lp(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut p = LpProblem::new(names(2), vec![int(3), int(5)]);
        p.add_inequality(vec![int(-1), int(0)], int(-4));
        p.add_inequality(vec![int(0), int(-2)], int(-12));
        p.add_inequality(vec![int(-3), int(-2)], int(-18));
        let s = solve_lp(&p);
        assert_eq!(s.assignment, vec![int(2), int(6)]);
        assert_eq!(s.objective_value, int(36));
    }

    #[test]
    fn free_variable_and_redundant_rows() {
        // max x0 − x1 with x0 free, x0 + x1 = 1/2 (twice), x1 ≥ 0, x0 ≥ −3
        let mut p = LpProblem::new(names(2), vec![int(1), int(-1)]);
        p.nonnegative[0] = false;
        p.add_equality(vec![int(1), int(1)], rat(1, 2));
        p.add_equality(vec![int(2), int(2)], int(1));
        p.add_inequality(vec![int(1), int(0)], int(-3));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.assignment, vec![rat(1, 2), int(0)]);
        assert!(p.is_feasible(&s.assignment));

        let mut q = LpProblem::new(names(1), vec![int(-1)]);
        q.nonnegative[0] = false;
        q.add_inequality(vec![int(1)], int(-3));
        let s = solve_lp(&q);
        assert_eq!(s.assignment, vec![int(-3)]);
    }

    #[test]
    fn deterministic_bases() {
        let mut p = LpProblem::new(names(3), vec![int(1), int(1), int(1)]);
        p.add_equality(vec![int(1), int(1), int(1)], int(1));
        p.add_inequality(vec![int(1), int(-1), int(0)], int(0));
        assert_eq!(solve_lp(&p), solve_lp(&p));
    }

    proptest::proptest! {
        /// Random bounded problems: the optimum is feasible and no vertex of a
        /// small grid beats it.
        #[test]
        fn optimum_dominates_grid(
            c in proptest::collection::vec(-5i64..6, 2),
            a in proptest::collection::vec(0i64..5, 4),
            b in proptest::collection::vec(1i64..8, 2),
        ) {
            let mut p = LpProblem::new(names(2), c.iter().map(|&v| int(v)).collect());
            p.add_inequality(vec![int(-a[0]), int(-a[1])], int(-b[0]));
            p.add_inequality(vec![int(-a[2]), int(-a[3])], int(-b[1]));
            p.add_inequality(vec![int(-1), int(-1)], int(-10));
            let s = solve_lp(&p);
            proptest::prop_assert_eq!(s.status, LpStatus::Optimal);
            proptest::prop_assert!(p.is_feasible(&s.assignment));
            for x in 0..=20 {
                for y in 0..=20 {
                    let pt = vec![rat(x, 2), rat(y, 2)];
                    if p.is_feasible(&pt) {
                        proptest::prop_assert!(p.objective_at(&pt) <= s.objective_value);
                    }
                }
            }
        }
    }
}
