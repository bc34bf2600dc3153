//! Optimality check that uses only the original problem data and the
//! solution's primal and dual vectors.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::{dot, LpProblem, LpSolution, LpStatus, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("solution is not optimal ({0:?})")]
    NotOptimal(LpStatus),
    #[error("primal has {got} entries, expected {expected}")]
    PrimalLength { expected: usize, got: usize },
    #[error("dual has {got} entries, expected {expected}")]
    DualLength { expected: usize, got: usize },
    #[error("primal variable {index} is negative: {value}")]
    NegativePrimal { index: usize, value: Rational },
    #[error("constraint {index} has residual {residual}")]
    Residual { index: usize, residual: Rational },
    #[error("reported value {reported} differs from c·x = {actual}")]
    ValueMismatch { reported: Rational, actual: Rational },
    #[error("reduced cost of column {index} is positive: {value}")]
    PositiveReducedCost { index: usize, value: Rational },
    #[error("basic column {index} has non-zero reduced cost {value}")]
    BasicReducedCost { index: usize, value: Rational },
    #[error("duality gap: b·y = {dual} but c·x = {primal}")]
    DualityGap { primal: Rational, dual: Rational },
}

/// Verify that `solution` is an optimal primal/dual pair for `problem`.
///
/// Checks, recomputing everything from `problem`:
/// primal feasibility with zero residual, non-positive reduced costs
/// `c_j - y·A_j` on every column (dual feasibility), zero reduced cost on
/// every basic column, and `b·y = c·x`.
pub fn check_certificate(problem: &LpProblem, solution: &LpSolution) -> Result<(), CertificateError> {
    if solution.status != LpStatus::Optimal {
        return Err(CertificateError::NotOptimal(solution.status));
    }
    let n = problem.num_vars;
    let m = problem.constraints.len();
    if solution.primal.len() != n {
        return Err(CertificateError::PrimalLength {
            expected: n,
            got: solution.primal.len(),
        });
    }
    if solution.duals.len() != m {
        return Err(CertificateError::DualLength {
            expected: m,
            got: solution.duals.len(),
        });
    }

    for (index, x) in solution.primal.iter().enumerate() {
        if x.is_negative() {
            return Err(CertificateError::NegativePrimal {
                index,
                value: x.clone(),
            });
        }
    }
    for (index, c) in problem.constraints.iter().enumerate() {
        let residual = dot(&c.row, &solution.primal) - &c.rhs;
        if !residual.is_zero() {
            return Err(CertificateError::Residual { index, residual });
        }
    }
    let actual = problem.objective_value(&solution.primal);
    if actual != solution.value {
        return Err(CertificateError::ValueMismatch {
            reported: solution.value.clone(),
            actual,
        });
    }

    let mut reduced = problem.objective.clone();
    for (c, y) in problem.constraints.iter().zip(&solution.duals) {
        if y.is_zero() {
            continue;
        }
        for (r, a) in reduced.iter_mut().zip(&c.row) {
            if !a.is_zero() {
                *r -= y * a;
            }
        }
    }
    for (index, value) in reduced.iter().enumerate() {
        if value.is_positive() {
            return Err(CertificateError::PositiveReducedCost {
                index,
                value: value.clone(),
            });
        }
    }
    for &index in &solution.basis {
        if !reduced[index].is_zero() {
            return Err(CertificateError::BasicReducedCost {
                index,
                value: reduced[index].clone(),
            });
        }
    }

    let dual = problem
        .constraints
        .iter()
        .zip(&solution.duals)
        .fold(Rational::zero(), |acc, (c, y)| acc + &c.rhs * y);
    if dual != actual {
        return Err(CertificateError::DualityGap {
            primal: actual,
            dual,
        });
    }
    Ok(())
}
