//! Convex QP with a diagonal Hessian, sparse linear equalities and box bounds.
//!
//! The solver is an operator-splitting (ADMM) iteration in the style of
//! OSQP, followed by an active-set polish that solves the equality-constrained
//! subproblem on the free variables and verifies the KKT conditions. All
//! linear systems are banded, so the cost per iteration is linear in the
//! number of variables when the equality rows are local (dynamics chains).

use super::dense::Banded;
use super::{SolveReport, Status};
use crate::{Error, Result};

/// `min ½ Σ h_j x_j² + c·x  s.t.  E x = b,  lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxQp {
    pub hess_diag: Vec<f64>,
    pub linear: Vec<f64>,
    pub eq_rows: Vec<Vec<(usize, f64)>>,
    pub eq_rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxQp {
    /// `n` variables, zero objective, unbounded box, no equalities.
    pub fn new(n: usize) -> Self {
        BoxQp {
            hess_diag: vec![0.0; n],
            linear: vec![0.0; n],
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.hess_diag.len()
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.eq_rows.push(coeffs);
        self.eq_rhs.push(rhs);
        self.eq_rows.len() - 1
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.hess_diag)
            .zip(&self.linear)
            .map(|((&v, &h), &c)| 0.5 * h * v * v + c * v)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.linear.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(Error::param("qp", "vector lengths disagree"));
        }
        if self.eq_rows.len() != self.eq_rhs.len() {
            return Err(Error::param(
                "qp",
                "equality rows and right-hand sides disagree",
            ));
        }
        for j in 0..n {
            if !(self.hess_diag[j] >= 0.0) || !self.hess_diag[j].is_finite() {
                return Err(Error::param(
                    "hess_diag",
                    format!("entry {j} must be finite and non-negative"),
                ));
            }
            if !self.linear[j].is_finite() {
                return Err(Error::param("linear", format!("entry {j} is not finite")));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::param("bounds", format!("variable {j} has lo > hi")));
            }
        }
        for (i, row) in self.eq_rows.iter().enumerate() {
            if !self.eq_rhs[i].is_finite() {
                return Err(Error::param("eq_rhs", format!("entry {i} is not finite")));
            }
            for &(j, a) in row {
                if j >= n || !a.is_finite() {
                    return Err(Error::param(
                        "eq_rows",
                        format!("row {i} has a bad entry ({j}, {a})"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn bandwidth(&self) -> usize {
        self.eq_rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| {
                let lo = r.iter().map(|e| e.0).min().unwrap_or(0);
                let hi = r.iter().map(|e| e.0).max().unwrap_or(0);
                hi - lo
            })
            .max()
            .unwrap_or(0)
    }

    fn eq_residual(&self, x: &[f64]) -> f64 {
        self.eq_rows
            .iter()
            .zip(&self.eq_rhs)
            .map(|(r, &b)| (r.iter().map(|&(j, a)| a * x[j]).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    /// `h∘x + c + Eᵀy`.
    fn gradient(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = (0..x.len())
            .map(|j| self.hess_diag[j] * x[j] + self.linear[j])
            .collect();
        for (row, &yi) in self.eq_rows.iter().zip(y) {
            for &(j, a) in row {
                g[j] += a * yi;
            }
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpOptions {
    /// Target for the primal and dual KKT residuals (∞-norm).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        QpOptions {
            tol: 1e-6,
            max_iter: 200_000,
        }
    }
}

const SIGMA: f64 = 1e-6;
const ALPHA: f64 = 1.6;
const RHO_EQ_SCALE: f64 = 1e3;
const RHO_INIT: f64 = 0.1;
const ADAPT_EVERY: usize = 25;
const POLISH_GATE: f64 = 1e-3;

pub fn solve_box_qp(qp: &BoxQp, opts: &QpOptions) -> SolveReport {
    if qp.validate().is_err() {
        return SolveReport::without_solution(Status::Infeasible, 0, opts.tol, opts.max_iter);
    }
    Admm::new(qp, opts).run()
}

struct Admm<'a> {
    qp: &'a BoxQp,
    opts: QpOptions,
    bw: usize,
    rho: f64,
    kkt: Banded,
    x: Vec<f64>,
    z: Vec<f64>,
    y_box: Vec<f64>,
    y_eq: Vec<f64>,
}

impl<'a> Admm<'a> {
    fn new(qp: &'a BoxQp, opts: &QpOptions) -> Self {
        let n = qp.n_vars();
        let x: Vec<f64> = (0..n)
            .map(|j| 0.0f64.clamp(qp.lower[j], qp.upper[j]))
            .collect();
        let bw = qp.bandwidth();
        let mut s = Admm {
            qp,
            opts: *opts,
            bw,
            rho: RHO_INIT,
            kkt: Banded::zeros(0, 0),
            z: x.clone(),
            x,
            y_box: vec![0.0; n],
            y_eq: vec![0.0; qp.eq_rows.len()],
        };
        s.kkt = s.factor(s.rho);
        s
    }

    fn factor(&self, rho: f64) -> Banded {
        let qp = self.qp;
        let n = qp.n_vars();
        let mut k = Banded::zeros(n, self.bw);
        for j in 0..n {
            k.add(j, j, qp.hess_diag[j] + SIGMA + rho);
        }
        add_gram(&mut k, &qp.eq_rows, RHO_EQ_SCALE * rho, |_| true);
        let ok = k.factor();
        debug_assert!(ok, "ADMM system is positive definite by construction");
        k
    }

    fn run(mut self) -> SolveReport {
        let qp = self.qp;
        let n = qp.n_vars();
        let m = qp.eq_rows.len();
        let tol = self.opts.tol;
        let mut rhs = vec![0.0; n];
        let mut ez = vec![0.0; m];
        for it in 1..=self.opts.max_iter {
            let rho = self.rho;
            let rho_eq = RHO_EQ_SCALE * rho;
            for j in 0..n {
                rhs[j] = SIGMA * self.x[j] - qp.linear[j] + rho * self.z[j] - self.y_box[j];
            }
            for (i, row) in qp.eq_rows.iter().enumerate() {
                let w = rho_eq * qp.eq_rhs[i] - self.y_eq[i];
                for &(j, a) in row {
                    rhs[j] += a * w;
                }
            }
            self.kkt.solve(&mut rhs);
            let xt = &rhs;
            for (i, row) in qp.eq_rows.iter().enumerate() {
                ez[i] = row.iter().map(|&(j, a)| a * xt[j]).sum();
            }
            for j in 0..n {
                self.x[j] = ALPHA * xt[j] + (1.0 - ALPHA) * self.x[j];
                let v = ALPHA * xt[j] + (1.0 - ALPHA) * self.z[j];
                let znew = (v + self.y_box[j] / rho).clamp(qp.lower[j], qp.upper[j]);
                self.y_box[j] += rho * (v - znew);
                self.z[j] = znew;
            }
            for i in 0..m {
                let v = ALPHA * ez[i] + (1.0 - ALPHA) * qp.eq_rhs[i];
                self.y_eq[i] += rho_eq * (v - qp.eq_rhs[i]);
            }

            let residuals = self.residuals();
            let converged = residuals.0 <= tol && residuals.1 <= tol;
            let gate =
                it % ADAPT_EVERY == 0 && residuals.0 <= POLISH_GATE && residuals.1 <= POLISH_GATE;
            if converged || gate {
                if let Some((x, kkt)) = self.polish() {
                    return self.report(Status::Optimal, x, kkt, it);
                }
            }
            if converged {
                let x: Vec<f64> = (0..n)
                    .map(|j| self.x[j].clamp(qp.lower[j], qp.upper[j]))
                    .collect();
                let kkt = residuals.0.max(residuals.1);
                return self.report(Status::Optimal, x, kkt, it);
            }
            if it % ADAPT_EVERY == 0 {
                self.adapt_rho(residuals);
            }
        }
        SolveReport::without_solution(
            Status::IterationLimit,
            self.opts.max_iter,
            tol,
            self.opts.max_iter,
        )
    }

    /// (primal, dual) residuals in the ∞-norm.
    fn residuals(&self) -> (f64, f64) {
        let qp = self.qp;
        let box_gap = self
            .x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let prim = box_gap.max(qp.eq_residual(&self.x));
        let g = qp.gradient(&self.x, &self.y_eq);
        let dual = g
            .iter()
            .zip(&self.y_box)
            .map(|(g, y)| (g + y).abs())
            .fold(0.0, f64::max);
        (prim, dual)
    }

    fn adapt_rho(&mut self, (prim, dual): (f64, f64)) {
        let qp = self.qp;
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let prim_scale = inf(&self.x).max(inf(&self.z)).max(1e-10);
        let hx: Vec<f64> = (0..self.x.len())
            .map(|j| qp.hess_diag[j] * self.x[j])
            .collect();
        let dual_scale = inf(&hx)
            .max(inf(&qp.linear))
            .max(inf(&self.y_box))
            .max(inf(&self.y_eq))
            .max(1e-10);
        let num = prim / prim_scale;
        let den = (dual / dual_scale).max(1e-16);
        let new_rho = (self.rho * (num / den).sqrt()).clamp(1e-6, 1e6);
        if new_rho > 5.0 * self.rho || new_rho < self.rho / 5.0 {
            self.rho = new_rho;
            self.kkt = self.factor(new_rho);
        }
    }

    /// Guesses the active set from the ADMM iterate, solves the reduced
    /// equality-constrained problem and checks the KKT conditions.
    fn polish(&self) -> Option<(Vec<f64>, f64)> {
        let qp = self.qp;
        let n = qp.n_vars();
        let m = qp.eq_rows.len();
        let tol = self.opts.tol;

        let mut fixed: Vec<Option<f64>> = vec![None; n];
        for j in 0..n {
            let (lo, hi) = (qp.lower[j], qp.upper[j]);
            if lo == hi || (lo.is_finite() && self.z[j] - lo < -self.y_box[j]) {
                fixed[j] = Some(lo);
            } else if hi.is_finite() && hi - self.z[j] < self.y_box[j] {
                fixed[j] = Some(hi);
            }
        }

        let delta = 1e-7;
        let rho_p = 1e6;
        let mut k = Banded::zeros(n, self.bw);
        for j in 0..n {
            let d = if fixed[j].is_some() {
                1.0
            } else {
                qp.hess_diag[j] + delta
            };
            k.add(j, j, d);
        }
        add_gram(&mut k, &qp.eq_rows, rho_p, |j| fixed[j].is_none());
        if !k.factor() {
            return None;
        }
        // Right-hand sides with the fixed variables moved across.
        let b: Vec<f64> = qp
            .eq_rows
            .iter()
            .zip(&qp.eq_rhs)
            .map(|(row, &rhs)| {
                rhs - row
                    .iter()
                    .filter_map(|&(j, a)| fixed[j].map(|v| a * v))
                    .sum::<f64>()
            })
            .collect();

        let mut x: Vec<f64> = (0..n).map(|j| fixed[j].unwrap_or(self.x[j])).collect();
        let mut y = self.y_eq.clone();
        let mut rhs = vec![0.0; n];
        for _ in 0..60 {
            for j in 0..n {
                rhs[j] = match fixed[j] {
                    Some(v) => v,
                    None => delta * x[j] - qp.linear[j],
                };
            }
            for (i, row) in qp.eq_rows.iter().enumerate() {
                let w = rho_p * b[i] - y[i];
                for &(j, a) in row {
                    if fixed[j].is_none() {
                        rhs[j] += a * w;
                    }
                }
            }
            k.solve(&mut rhs);
            let step = x
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            x.copy_from_slice(&rhs);
            let mut eq_gap: f64 = 0.0;
            for i in 0..m {
                let r = qp.eq_rows[i]
                    .iter()
                    .filter(|&&(j, _)| fixed[j].is_none())
                    .map(|&(j, a)| a * x[j])
                    .sum::<f64>()
                    - b[i];
                y[i] += rho_p * r;
                eq_gap = eq_gap.max(r.abs());
            }
            if step <= 1e-13 * (1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs())))
                && eq_gap <= 1e-12
            {
                break;
            }
        }

        let g = qp.gradient(&x, &y);
        let mut kkt = qp.eq_residual(&x);
        for j in 0..n {
            let (lo, hi) = (qp.lower[j], qp.upper[j]);
            kkt = kkt.max(lo - x[j]).max(x[j] - hi);
            match fixed[j] {
                None => kkt = kkt.max(g[j].abs()),
                Some(_) if lo == hi => {}
                Some(v) if v == lo => kkt = kkt.max(-g[j]),
                Some(_) => kkt = kkt.max(g[j]),
            }
        }
        if !(kkt <= tol) {
            return None;
        }
        for j in 0..n {
            x[j] = x[j].clamp(qp.lower[j], qp.upper[j]);
        }
        Some((x, kkt))
    }

    fn report(&self, status: Status, x: Vec<f64>, kkt: f64, iterations: usize) -> SolveReport {
        SolveReport {
            status,
            objective: Some(self.qp.objective(&x)),
            solution: Some(x),
            iterations,
            tol: self.opts.tol,
            max_iter: self.opts.max_iter,
            dual_bound: None,
            kkt_residual: Some(kkt),
        }
    }
}

/// Adds `w·EᵀE` restricted to columns where `keep` holds.
fn add_gram(k: &mut Banded, rows: &[Vec<(usize, f64)>], w: f64, keep: impl Fn(usize) -> bool) {
    for row in rows {
        for &(i, a) in row {
            if !keep(i) {
                continue;
            }
            for &(j, b) in row {
                if j <= i && keep(j) {
                    k.add(i, j, w * a * b);
                }
            }
        }
    }
}
