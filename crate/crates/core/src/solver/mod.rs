//! Deterministic LP and box-constrained QP solvers.
//!
//! Both are dense and single-threaded; identical input produces a
//! bit-identical [`SolveReport`].

#![allow(clippy::needless_range_loop)]

mod dense;
mod lp;
mod qp;

pub use lp::{solve_lp, solve_lp_with, LinearProgram, LpOptions, Row, Sense};
pub use qp::{solve_box_qp, BoxQp, QpOptions};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration-limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: Status,
    /// Objective in the problem's own sense; `None` unless optimal.
    pub objective: Option<f64>,
    /// Primal solution over the structural variables; `None` unless optimal.
    pub solution: Option<Vec<f64>>,
    pub iterations: usize,
    /// Tolerance and iteration cap the solve ran with.
    pub tol: f64,
    pub max_iter: usize,
    /// LP only: Lagrangian bound from the final basis multipliers.
    pub dual_bound: Option<f64>,
    /// QP only: max of primal and dual KKT residuals at the returned point.
    pub kkt_residual: Option<f64>,
}

impl SolveReport {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    fn without_solution(status: Status, iterations: usize, tol: f64, max_iter: usize) -> Self {
        SolveReport {
            status,
            objective: None,
            solution: None,
            iterations,
            tol,
            max_iter,
            dual_bound: None,
            kkt_residual: None,
        }
    }
}
