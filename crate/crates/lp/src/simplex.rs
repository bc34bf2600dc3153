use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::{LpError, LpProblem, LpSolution, LpStatus, Rational};

/// Dense simplex tableau.
///
/// Columns are laid out as `[structural (n) | artificial (m) | rhs]`. The
/// artificial block is kept for the whole solve: in phase two its reduced
/// costs are exactly the negated dual multipliers.
#[derive(Clone, Debug)]
pub struct Tableau {
    num_vars: usize,
    rows: Vec<Vec<Rational>>,
    /// Reduced costs for every column; the rhs slot holds minus the current
    /// objective value.
    costs: Vec<Rational>,
    basis: Vec<usize>,
    /// Rows that were multiplied by -1 to make the rhs non-negative.
    negated: Vec<bool>,
    phase: u8,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    /// Phase-one tableau with an artificial basis.
    pub fn new(problem: &LpProblem) -> Result<Self, LpError> {
        problem.validate()?;
        let n = problem.num_vars;
        let m = problem.constraints.len();
        let width = n + m + 1;

        let mut rows = Vec::with_capacity(m);
        let mut negated = Vec::with_capacity(m);
        for (i, c) in problem.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let mut row = vec![Rational::zero(); width];
            for (j, a) in c.row.iter().enumerate() {
                row[j] = if flip { -a } else { a.clone() };
            }
            row[n + i] = Rational::one();
            row[width - 1] = if flip { -&c.rhs } else { c.rhs.clone() };
            rows.push(row);
            negated.push(flip);
        }

        // Phase-one objective: maximize minus the sum of artificials.
        let mut costs = vec![Rational::zero(); width];
        for row in &rows {
            for j in (0..n).chain(std::iter::once(width - 1)) {
                if !row[j].is_zero() {
                    costs[j] += &row[j];
                }
            }
        }

        Ok(Self {
            num_vars: n,
            rows,
            costs,
            basis: (n..n + m).collect(),
            negated,
            phase: 1,
            pivots: 0,
        })
    }

    fn width(&self) -> usize {
        self.costs.len()
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width() - 1]
    }

    /// Current objective value of the active phase.
    pub fn objective(&self) -> Rational {
        -&self.costs[self.width() - 1]
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let p = prow[c].clone();
        let nonzero: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        if !p.is_one() {
            let inv = p.recip();
            for &j in &nonzero {
                prow[j] *= &inv;
            }
        }

        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nonzero {
                row[j] -= &f * &prow[j];
            }
        }
        if !self.costs[c].is_zero() {
            let f = self.costs[c].clone();
            for &j in &nonzero {
                self.costs[j] -= &f * &prow[j];
            }
        }

        self.rows[r] = prow;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland's rule: the lowest-index improving column enters; among the
    /// minimum-ratio rows the one with the lowest basic index leaves.
    /// `Err(column)` signals an unbounded ray.
    fn choose_pivot(&self, eligible: usize) -> Option<Result<(usize, usize), usize>> {
        let c = (0..eligible).find(|&j| self.costs[j].is_positive())?;
        Some(match self.ratio_test(c) {
            Some((r, _)) => Ok((r, c)),
            None => Err(c),
        })
    }

    fn ratio_test(&self, c: usize) -> Option<(usize, Rational)> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[c].is_positive() {
                continue;
            }
            let ratio = self.rhs(i) / &row[c];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best
    }

    fn run(&mut self, eligible: usize, trace: &mut dyn FnMut(&Tableau)) -> Outcome {
        loop {
            match self.choose_pivot(eligible) {
                None => return Outcome::Optimal,
                Some(Err(_)) => return Outcome::Unbounded,
                Some(Ok((r, c))) => {
                    self.pivot(r, c);
                    trace(self);
                }
            }
        }
    }

    /// Pivot basic artificials out wherever a structural column allows it.
    /// Rows where none does are linearly dependent and keep their artificial
    /// at level zero for the rest of the solve.
    fn expel_artificials(&mut self, trace: &mut dyn FnMut(&Tableau)) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.num_vars {
                continue;
            }
            if let Some(c) = (0..self.num_vars).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, c);
                trace(self);
            }
        }
    }

    fn install_objective(&mut self, objective: &[Rational]) {
        let width = self.width();
        let mut costs = vec![Rational::zero(); width];
        costs[..self.num_vars].clone_from_slice(objective);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = match objective.get(b) {
                Some(v) if !v.is_zero() => v,
                _ => continue,
            };
            for j in 0..width {
                if !row[j].is_zero() {
                    costs[j] -= cb * &row[j];
                }
            }
        }
        self.costs = costs;
        self.phase = 2;
    }

    fn extract(&self, problem: &LpProblem) -> LpSolution {
        let n = self.num_vars;
        let mut primal = vec![Rational::zero(); n];
        let mut basis = Vec::new();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                primal[b] = self.rhs(i).clone();
                basis.push(b);
            }
        }
        basis.sort_unstable();
        let duals = self
            .negated
            .iter()
            .enumerate()
            .map(|(k, &flip)| {
                let y = -&self.costs[n + k];
                if flip {
                    -y
                } else {
                    y
                }
            })
            .collect();
        LpSolution {
            status: LpStatus::Optimal,
            value: problem.objective_value(&primal),
            primal,
            basis,
            duals,
            reduced_costs: self.costs[..n].to_vec(),
            pivots: self.pivots,
        }
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "phase {} pivots {} objective {}",
            self.phase,
            self.pivots,
            self.objective()
        )?;
        for (row, b) in self.rows.iter().zip(&self.basis) {
            write!(f, "x{b:<5}|")?;
            for v in row {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        write!(f, "cost  |")?;
        for v in &self.costs {
            write!(f, " {v}")?;
        }
        writeln!(f)
    }
}

/// Solve `max c·x s.t. Ax = b, x >= 0` exactly.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    solve_with_trace(problem, |_| {})
}

/// Like [`solve`], calling `trace` after every pivot.
pub fn solve_with_trace(
    problem: &LpProblem,
    mut trace: impl FnMut(&Tableau),
) -> Result<LpSolution, LpError> {
    let mut tableau = Tableau::new(problem)?;
    let n = problem.num_vars;
    let total = tableau.width() - 1;

    // Phase one cannot be unbounded: its objective is bounded above by zero.
    tableau.run(total, &mut trace);
    if !tableau.objective().is_zero() {
        return Ok(LpSolution::without_optimum(
            LpStatus::Infeasible,
            tableau.pivots,
        ));
    }
    tableau.expel_artificials(&mut trace);

    tableau.install_objective(&problem.objective);
    match tableau.run(n, &mut trace) {
        Outcome::Unbounded => Ok(LpSolution::without_optimum(
            LpStatus::Unbounded,
            tableau.pivots,
        )),
        Outcome::Optimal => Ok(tableau.extract(problem)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Constraint;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn int(n: i64) -> Rational {
        q(n, 1)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn single_equality() {
        let p = LpProblem::new(ints(&[1, 0]), vec![Constraint::new(ints(&[1, 1]), int(1))]).unwrap();
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, int(1));
        assert_eq!(s.primal, ints(&[1, 0]));
    }

    #[test]
    fn degenerate_objective() {
        let p = LpProblem::new(ints(&[1, 1]), vec![Constraint::new(ints(&[1, 1]), int(1))]).unwrap();
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, int(1));
    }

    #[test]
    fn negative_rhs_is_infeasible() {
        let p = LpProblem::new(ints(&[1]), vec![Constraint::new(ints(&[1]), int(-1))]).unwrap();
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn negated_row_is_feasible() {
        // -x1 - x2 = -2
        let p = LpProblem::new(ints(&[2, 1]), vec![Constraint::new(ints(&[-1, -1]), int(-2))]).unwrap();
        let s = solve(&p).unwrap();
        assert_eq!(s.value, int(4));
        assert_eq!(s.duals, ints(&[-2]));
    }

    #[test]
    fn unbounded_ray() {
        // x1 - x2 = 0, maximize x1
        let p = LpProblem::new(ints(&[1, 0]), vec![Constraint::new(ints(&[1, -1]), int(0))]).unwrap();
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let rows = vec![
            Constraint::new(ints(&[1, 1, 0]), int(1)),
            Constraint::new(ints(&[2, 2, 0]), int(2)),
            Constraint::new(ints(&[0, 1, 1]), q(1, 2)),
        ];
        let p = LpProblem::new(ints(&[1, 0, 1]), rows).unwrap();
        let s = solve(&p).unwrap();
        assert_eq!(s.value, q(3, 2));
        assert_eq!(s.primal, vec![int(1), int(0), q(1, 2)]);
    }

    #[test]
    fn row_length_mismatch() {
        let err = LpProblem::new(ints(&[1, 0]), vec![Constraint::new(ints(&[1]), int(1))]).unwrap_err();
        assert_eq!(
            err,
            LpError::RowLength {
                index: 0,
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn trace_sees_every_pivot() {
        let p = LpProblem::new(ints(&[1, 2]), vec![Constraint::new(ints(&[1, 1]), int(3))]).unwrap();
        let mut seen = 0;
        let s = solve_with_trace(&p, |t| {
            seen += 1;
            assert!(!t.to_string().is_empty());
        })
        .unwrap();
        assert_eq!(seen, s.pivots);
        assert_eq!(s.value, int(6));
    }
}
