//! Exact-rational linear programming for small, dense, equality-form problems.
//!
//! Problems have the shape
//!
//! ```text
//! maximize    c·x
//! subject to  A x = b,  x >= 0
//! ```
//!
//! and are solved with a two-phase tableau simplex using Bland's smallest-index
//! rule, so the solver always terminates and is deterministic for a given
//! input. Every returned optimum carries a dual vector that
//! [`check_certificate`] verifies without touching the tableau.

mod certificate;
mod simplex;

pub use certificate::{check_certificate, CertificateError};
pub use simplex::{solve, solve_with_trace, Tableau};

use num_rational::BigRational;
use thiserror::Error;

pub type Rational = BigRational;

/// One equality row `row · x = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub row: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(row: Vec<Rational>, rhs: Rational) -> Self {
        Self { row, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    /// Maximized.
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("objective has {got} entries, expected {expected}")]
    ObjectiveLength { expected: usize, got: usize },
    #[error("constraint {index} has {got} entries, expected {expected}")]
    RowLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("problem has no constraints")]
    NoConstraints,
    #[error("problem has no variables")]
    NoVariables,
}

impl LpProblem {
    pub fn new(objective: Vec<Rational>, constraints: Vec<Constraint>) -> Result<Self, LpError> {
        let problem = Self {
            num_vars: objective.len(),
            objective,
            constraints,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.num_vars == 0 {
            return Err(LpError::NoVariables);
        }
        if self.objective.len() != self.num_vars {
            return Err(LpError::ObjectiveLength {
                expected: self.num_vars,
                got: self.objective.len(),
            });
        }
        if self.constraints.is_empty() {
            return Err(LpError::NoConstraints);
        }
        for (index, c) in self.constraints.iter().enumerate() {
            if c.row.len() != self.num_vars {
                return Err(LpError::RowLength {
                    index,
                    expected: self.num_vars,
                    got: c.row.len(),
                });
            }
        }
        Ok(())
    }

    /// Objective value `c·x`.
    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; zero unless `status` is `Optimal`.
    pub value: Rational,
    /// Primal vertex; empty unless `status` is `Optimal`.
    pub primal: Vec<Rational>,
    /// Indices of the basic structural variables, ascending.
    pub basis: Vec<usize>,
    /// One multiplier per constraint row. Rows found redundant in phase one get 0.
    pub duals: Vec<Rational>,
    /// `c_j - duals·A_j` for every structural column.
    pub reduced_costs: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    fn without_optimum(status: LpStatus, pivots: usize) -> Self {
        Self {
            status,
            value: Rational::from_integer(0.into()),
            primal: Vec::new(),
            basis: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            pivots,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    use num_traits::Zero;
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}
