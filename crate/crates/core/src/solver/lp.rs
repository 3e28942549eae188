//! Dense bounded-variable primal simplex.
//!
//! Every row `lo ≤ a·x ≤ hi` gets a slack `s = a·x` carrying the row bounds,
//! so the working form is `[A | −I]·(x, s) = 0` with bounds on every column
//! and the all-slack starting basis needs no artificials. Phase 1 minimizes
//! the sum of bound infeasibilities of the basic variables. Pricing is
//! Dantzig's rule; after a run of degenerate pivots the solver switches to
//! Bland's rule until the objective moves again, which rules out cycling.

use std::io::{self, Write};

use super::{SolveReport, Status};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    /// `n_vars` variables, zero objective, bounds `[0, +∞)`.
    pub fn new(sense: Sense, n_vars: usize) -> Self {
        LinearProgram {
            sense,
            objective: vec![0.0; n_vars],
            lower: vec![0.0; n_vars],
            upper: vec![f64::INFINITY; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }
    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn set_objective(&mut self, j: usize, c: f64) {
        self.objective[j] = c;
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    /// Adds `lower ≤ Σ coeffs·x ≤ upper` and returns the row index.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, lower: f64, upper: f64) -> usize {
        self.rows.push(Row {
            coeffs,
            lower,
            upper,
        });
        self.rows.len() - 1
    }

    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, f64::NEG_INFINITY, rhs)
    }

    pub fn add_ge(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, rhs, f64::INFINITY)
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, rhs, rhs)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        for j in 0..n {
            if !self.objective[j].is_finite() {
                return Err(Error::param(
                    "objective",
                    format!("coefficient {j} is not finite"),
                ));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::param("bounds", format!("variable {j} has lo > hi")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.lower.is_nan() || row.upper.is_nan() || row.lower > row.upper {
                return Err(Error::param("rows", format!("row {i} has lo > hi")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n || !a.is_finite() {
                    return Err(Error::param(
                        "rows",
                        format!("row {i} has a bad entry ({j}, {a})"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Row activities `a·x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    /// Largest bound violation of `x` over variables and rows.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n_vars() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for (row, act) in self.rows.iter().zip(self.activities(x)) {
            worst = worst.max(row.lower - act).max(act - row.upper);
        }
        worst
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text tabular dump for cross-checking with external solvers.
    ///
    /// One line per variable (`var j lo hi c`) followed by one line per row
    /// (`row i lo hi j:a j:a ...`).
    pub fn write_tabular<W: Write>(&self, mut w: W) -> io::Result<()> {
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        writeln!(w, "{sense} vars={} rows={}", self.n_vars(), self.n_rows())?;
        for j in 0..self.n_vars() {
            writeln!(
                w,
                "var {j} {} {} {}",
                self.lower[j], self.upper[j], self.objective[j]
            )?;
        }
        for (i, row) in self.rows.iter().enumerate() {
            write!(w, "row {i} {} {}", row.lower, row.upper)?;
            for &(j, a) in &row.coeffs {
                write!(w, " {j}:{a}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Feasibility tolerance on variable and row bounds.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            tol: 1e-9,
            max_iter: 200_000,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram, tol: f64) -> SolveReport {
    solve_lp_with(
        lp,
        &LpOptions {
            tol,
            ..LpOptions::default()
        },
    )
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &LpOptions) -> SolveReport {
    if lp.validate().is_err() {
        return SolveReport::without_solution(Status::Infeasible, 0, opts.tol, opts.max_iter);
    }
    let mut s = Simplex::new(lp, opts);
    let status = s.run();
    s.report(lp, status)
}

const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_RUN: usize = 50;
const REFRESH_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Place {
    Basic(usize),
    Lower,
    Upper,
    /// Free nonbasic variable held at zero.
    Zero,
}

struct Simplex {
    m: usize,
    n: usize,
    cols: usize,
    /// `m × cols` tableau `B⁻¹·[A | −I]`.
    t: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Minimization costs over all columns.
    cost: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    place: Vec<Place>,
    ftol: f64,
    dtol: f64,
    iterations: usize,
    max_iter: usize,
    bland: bool,
    degenerate_run: usize,
}

impl Simplex {
    fn new(lp: &LinearProgram, opts: &LpOptions) -> Self {
        let m = lp.n_rows();
        let n = lp.n_vars();
        let cols = n + m;
        let mut t = vec![0.0; m * cols];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                t[i * cols + j] -= a;
            }
            t[i * cols + n + i] = 1.0;
        }
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        lo.extend(lp.rows.iter().map(|r| r.lower));
        hi.extend(lp.rows.iter().map(|r| r.upper));
        let sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost: Vec<f64> = lp.objective.iter().map(|c| sign * c).collect();
        cost.resize(cols, 0.0);

        let mut place = Vec::with_capacity(cols);
        let mut x = vec![0.0; cols];
        for j in 0..n {
            let (p, v) = if lo[j].is_finite() {
                (Place::Lower, lo[j])
            } else if hi[j].is_finite() {
                (Place::Upper, hi[j])
            } else {
                (Place::Zero, 0.0)
            };
            place.push(p);
            x[j] = v;
        }
        place.extend((0..m).map(Place::Basic));
        let mut s = Simplex {
            m,
            n,
            cols,
            t,
            lo,
            hi,
            cost,
            x,
            basis: (n..cols).collect(),
            place,
            ftol: opts.tol,
            dtol: opts.tol.max(1e-12),
            iterations: 0,
            max_iter: opts.max_iter,
            bland: false,
            degenerate_run: 0,
        };
        s.refresh_basics();
        s
    }

    fn refresh_basics(&mut self) {
        let cols = self.cols;
        for i in 0..self.m {
            let row = &self.t[i * cols..(i + 1) * cols];
            let mut v = 0.0;
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 && !matches!(self.place[j], Place::Basic(_)) {
                    v -= a * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] - self.ftol {
            v - self.lo[j]
        } else if v > self.hi[j] + self.ftol {
            v - self.hi[j]
        } else {
            0.0
        }
    }

    fn run(&mut self) -> Status {
        // Phase 1
        loop {
            let costs: Vec<f64> = self
                .basis
                .iter()
                .map(|&j| match self.infeasibility(j) {
                    v if v > 0.0 => 1.0,
                    v if v < 0.0 => -1.0,
                    _ => 0.0,
                })
                .collect();
            if costs.iter().all(|&c| c == 0.0) {
                break;
            }
            let d = self.reduced_costs(&costs, false);
            match self.choose_entering(&d) {
                None => return Status::Infeasible,
                Some((q, dir)) => {
                    if self.iterations >= self.max_iter {
                        return Status::IterationLimit;
                    }
                    if !self.step(q, dir, true) {
                        return Status::Infeasible;
                    }
                }
            }
        }
        // Phase 2
        self.bland = false;
        self.degenerate_run = 0;
        loop {
            let costs: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
            let d = self.reduced_costs(&costs, true);
            match self.choose_entering(&d) {
                None => return Status::Optimal,
                Some((q, dir)) => {
                    if self.iterations >= self.max_iter {
                        return Status::IterationLimit;
                    }
                    if !self.step(q, dir, false) {
                        return Status::Unbounded;
                    }
                }
            }
        }
    }

    /// Reduced costs of nonbasic columns for basic costs `cb` (plus the
    /// column's own cost when `with_own`); basic columns get 0.
    fn reduced_costs(&self, cb: &[f64], with_own: bool) -> Vec<f64> {
        let cols = self.cols;
        let mut d = if with_own {
            self.cost.clone()
        } else {
            vec![0.0; cols]
        };
        for (i, &c) in cb.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &self.t[i * cols..(i + 1) * cols];
            for (dj, &a) in d.iter_mut().zip(row) {
                *dj -= c * a;
            }
        }
        for &j in &self.basis {
            d[j] = 0.0;
        }
        d
    }

    fn choose_entering(&self, d: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols {
            let dir = match self.place[j] {
                Place::Basic(_) => continue,
                _ if self.lo[j] == self.hi[j] => continue,
                Place::Lower if d[j] < -self.dtol => 1.0,
                Place::Upper if d[j] > self.dtol => -1.0,
                Place::Zero if d[j] < -self.dtol => 1.0,
                Place::Zero if d[j] > self.dtol => -1.0,
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            let score = d[j].abs();
            if best.is_none_or(|b| score > b.2) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Moves column `q` in direction `dir` as far as the bounds allow and
    /// pivots. Returns `false` if nothing blocks the move.
    fn step(&mut self, q: usize, dir: f64, phase1: bool) -> bool {
        self.iterations += 1;
        let cols = self.cols;
        let mut limit = if self.lo[q].is_finite() && self.hi[q].is_finite() {
            self.hi[q] - self.lo[q]
        } else {
            f64::INFINITY
        };
        // (row, bound value, rate)
        let mut leave: Option<(usize, f64)> = None;
        let mut leave_rate = 0.0;
        for i in 0..self.m {
            let rate = -self.t[i * cols + q] * dir;
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[i];
            let v = self.x[j];
            let (lo, hi) = (self.lo[j], self.hi[j]);
            let target = if rate < 0.0 {
                if phase1 && v > hi + self.ftol {
                    hi
                } else if phase1 && v < lo - self.ftol {
                    continue;
                } else {
                    lo
                }
            } else if phase1 && v < lo - self.ftol {
                lo
            } else if phase1 && v > hi + self.ftol {
                continue;
            } else {
                hi
            };
            if !target.is_finite() {
                continue;
            }
            let ratio = ((target - v) / rate).max(0.0);
            let better = match leave {
                None => ratio < limit,
                Some((r, _)) => {
                    if ratio < limit - 1e-12 {
                        true
                    } else if ratio <= limit + 1e-12 {
                        if self.bland {
                            j < self.basis[r]
                        } else {
                            rate.abs() > leave_rate
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                limit = ratio.min(limit);
                leave = Some((i, target));
                leave_rate = rate.abs();
            }
        }
        if !limit.is_finite() {
            return false;
        }

        if limit <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run >= DEGENERATE_RUN {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }

        // Update values along the ray.
        if limit > 0.0 {
            for i in 0..self.m {
                let a = self.t[i * cols + q];
                if a != 0.0 {
                    let j = self.basis[i];
                    self.x[j] -= a * dir * limit;
                }
            }
            self.x[q] += dir * limit;
        }

        match leave {
            None => {
                // Bound flip.
                if dir > 0.0 {
                    self.x[q] = self.hi[q];
                    self.place[q] = Place::Upper;
                } else {
                    self.x[q] = self.lo[q];
                    self.place[q] = Place::Lower;
                }
            }
            Some((r, target)) => {
                let out = self.basis[r];
                self.x[out] = target;
                self.place[out] = if target == self.lo[out] {
                    Place::Lower
                } else {
                    Place::Upper
                };
                self.pivot(r, q);
                self.basis[r] = q;
                self.place[q] = Place::Basic(r);
            }
        }
        if self.iterations.is_multiple_of(REFRESH_EVERY) {
            self.refresh_basics();
        }
        true
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let p = self.t[r * cols + q];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for row in before
            .chunks_exact_mut(cols)
            .chain(after.chunks_exact_mut(cols))
        {
            let f = row[q];
            if f == 0.0 {
                continue;
            }
            for (v, &pr) in row.iter_mut().zip(pivot_row.iter()) {
                if pr != 0.0 {
                    *v -= f * pr;
                }
            }
            row[q] = 0.0;
        }
    }

    /// Rebuilds the tableau from the original rows for the current basis.
    fn reinvert(&mut self, lp: &LinearProgram) -> bool {
        let (m, n, cols) = (self.m, self.n, self.cols);
        let mut t = vec![0.0; m * cols];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                t[i * cols + j] += a;
            }
            t[i * cols + n + i] = -1.0;
        }
        let mut assigned = vec![false; m];
        let mut new_basis = vec![usize::MAX; m];
        for &col in &self.basis {
            let piv = (0..m).filter(|&i| !assigned[i]).max_by(|&a, &b| {
                t[a * cols + col]
                    .abs()
                    .total_cmp(&t[b * cols + col].abs())
                    .then(b.cmp(&a))
            });
            let Some(r) = piv else { return false };
            if t[r * cols + col].abs() < 1e-12 {
                return false;
            }
            assigned[r] = true;
            new_basis[r] = col;
            let p = t[r * cols + col];
            for v in &mut t[r * cols..(r + 1) * cols] {
                *v /= p;
            }
            let pivot_row: Vec<f64> = t[r * cols..(r + 1) * cols].to_vec();
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = t[i * cols + col];
                if f != 0.0 {
                    for (v, &pr) in t[i * cols..(i + 1) * cols].iter_mut().zip(&pivot_row) {
                        *v -= f * pr;
                    }
                }
            }
        }
        self.t = t;
        self.basis = new_basis;
        for (i, &j) in self.basis.iter().enumerate() {
            self.place[j] = Place::Basic(i);
        }
        self.refresh_basics();
        true
    }

    fn report(&mut self, lp: &LinearProgram, status: Status) -> SolveReport {
        if status != Status::Optimal {
            return SolveReport::without_solution(
                status,
                self.iterations,
                self.ftol,
                self.max_iter,
            );
        }
        self.refresh_basics();
        let mut x: Vec<f64> = self.x[..self.n].to_vec();
        if lp.max_violation(&x) > self.ftol && self.reinvert(lp) {
            x = self.x[..self.n].to_vec();
        }
        // Snap structural values that drifted within tolerance of a bound.
        for j in 0..self.n {
            x[j] = x[j].clamp(self.lo[j], self.hi[j]);
        }
        let objective = lp.evaluate(&x);
        let dual_bound = self.dual_bound(lp);
        SolveReport {
            status,
            objective: Some(objective),
            solution: Some(x),
            iterations: self.iterations,
            tol: self.ftol,
            max_iter: self.max_iter,
            dual_bound,
            kkt_residual: None,
        }
    }

    /// Lagrangian bound `Σ_j min(d_j·lo_j, d_j·hi_j)` with `y = B⁻ᵀc_B` and
    /// `d = c − [A | −I]ᵀy` recomputed from the original rows.
    fn dual_bound(&self, lp: &LinearProgram) -> Option<f64> {
        let (m, n, cols) = (self.m, self.n, self.cols);
        // B⁻¹ = −(slack block of the tableau)
        let mut y = vec![0.0; m];
        for r in 0..m {
            let cb = self.cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                *yi -= self.t[r * cols + n + i] * cb;
            }
        }
        let mut d: Vec<f64> = self.cost.clone();
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                d[j] -= y[i] * a;
            }
            d[n + i] += y[i];
        }
        let mut bound = 0.0;
        for j in 0..cols {
            let dj = d[j];
            if dj.abs() <= 1e-12 {
                continue;
            }
            let b = if dj > 0.0 { self.lo[j] } else { self.hi[j] };
            if !b.is_finite() {
                if dj.abs() <= self.dtol * 10.0 {
                    continue;
                }
                return None;
            }
            bound += dj * b;
        }
        Some(match lp.sense {
            Sense::Minimize => bound,
            Sense::Maximize => -bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opt(lp: &LinearProgram) -> (f64, Vec<f64>) {
        let r = solve_lp(lp, 1e-9);
        assert_eq!(r.status, Status::Optimal, "{r:?}");
        (r.objective.unwrap(), r.solution.unwrap())
    }

    #[test]
    fn maximize_single_bounded_variable() {
        let mut lp = LinearProgram::new(Sense::Maximize, 1);
        lp.set_objective(0, 1.0);
        lp.set_bounds(0, 0.0, 1.0);
        let (obj, x) = opt(&lp);
        assert_eq!(obj, 1.0);
        assert_eq!(x, vec![1.0]);
    }

    #[test]
    fn textbook_two_variable() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(Sense::Maximize, 2);
        lp.set_objective(0, 3.0);
        lp.set_objective(1, 5.0);
        lp.add_le(vec![(0, 1.0)], 4.0);
        lp.add_le(vec![(1, 2.0)], 12.0);
        lp.add_le(vec![(0, 3.0), (1, 2.0)], 18.0);
        let (obj, x) = opt(&lp);
        assert!((obj - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn needs_phase_one() {
        // min x + y, x + y ≥ 2, x − y = 0.5
        let mut lp = LinearProgram::new(Sense::Minimize, 2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.add_ge(vec![(0, 1.0), (1, 1.0)], 2.0);
        lp.add_eq(vec![(0, 1.0), (1, -1.0)], 0.5);
        let (obj, x) = opt(&lp);
        assert!((obj - 2.0).abs() < 1e-9);
        assert!((x[0] - 1.25).abs() < 1e-9);
    }

    #[test]
    fn degenerate_with_redundant_equalities() {
        // Same equality three times plus a degenerate vertex at the origin.
        let mut lp = LinearProgram::new(Sense::Maximize, 3);
        for j in 0..3 {
            lp.set_objective(j, 1.0 + j as f64);
        }
        for _ in 0..3 {
            lp.add_eq(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.0);
        }
        lp.add_le(vec![(0, 1.0), (1, -1.0)], 0.0);
        lp.add_le(vec![(1, 1.0), (2, -1.0)], 0.0);
        let (obj, x) = opt(&lp);
        assert!((obj - 3.0).abs() < 1e-9, "{x:?}");
    }

    #[test]
    fn infeasible_and_unbounded_are_reported() {
        let mut lp = LinearProgram::new(Sense::Minimize, 1);
        lp.add_ge(vec![(0, 1.0)], 2.0);
        lp.add_le(vec![(0, 1.0)], 1.0);
        assert_eq!(solve_lp(&lp, 1e-9).status, Status::Infeasible);

        let mut lp = LinearProgram::new(Sense::Maximize, 2);
        lp.set_objective(0, 1.0);
        lp.add_le(vec![(0, 1.0), (1, -1.0)], 1.0);
        let r = solve_lp(&lp, 1e-9);
        assert_eq!(r.status, Status::Unbounded);
        assert!(r.solution.is_none());
    }

    #[test]
    fn free_variables_and_negative_bounds() {
        // min |x − 3| via epigraph with free x
        let mut lp = LinearProgram::new(Sense::Minimize, 2);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_objective(1, 1.0);
        lp.add_ge(vec![(1, 1.0), (0, -1.0)], -3.0);
        lp.add_ge(vec![(1, 1.0), (0, 1.0)], 3.0);
        let (obj, x) = opt(&lp);
        assert!(obj.abs() < 1e-9);
        assert!((x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_limit() {
        let mut lp = LinearProgram::new(Sense::Maximize, 2);
        lp.set_objective(0, 3.0);
        lp.set_objective(1, 5.0);
        lp.add_le(vec![(0, 3.0), (1, 2.0)], 18.0);
        lp.add_le(vec![(1, 2.0)], 12.0);
        let r = solve_lp_with(
            &lp,
            &LpOptions {
                tol: 1e-9,
                max_iter: 0,
            },
        );
        assert_eq!(r.status, Status::IterationLimit);
    }

    #[test]
    fn tabular_dump() {
        let mut lp = LinearProgram::new(Sense::Minimize, 2);
        lp.set_objective(1, 2.0);
        lp.add_le(vec![(0, 1.0), (1, 1.0)], 3.0);
        let mut buf = Vec::new();
        lp.write_tabular(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("minimize vars=2 rows=1\n"));
        assert!(s.contains("row 0 -inf 3 0:1 1:1"));
    }
}
