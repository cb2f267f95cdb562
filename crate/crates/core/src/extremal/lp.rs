//! Dense two-phase simplex for small standard-form problems
//! `maximize c.x subject to A x = b, x >= 0`.
//!
//! Pivoting uses the largest reduced cost and switches to Bland's rule
//! after a run of degenerate pivots. The final basis is re-solved by
//! Gaussian elimination so that the primal values and the multipliers do
//! not carry the accumulated tableau error.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 100_000;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Debug)]
pub struct LpSolution {
    /// Primal values, one per column.
    pub x: Vec<f64>,
    /// Basic column per row; `None` marks a redundant row.
    pub basis: Vec<Option<usize>>,
    pub objective: f64,
    /// Multipliers `y` with `B^T y = c_B`; the optimal point of the dual
    /// `minimize b.y subject to A^T y >= c`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    // rows x (width + 1), last entry of each row is the right-hand side
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.width + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * (self.width + 1) + self.width]
    }

    fn pivot(&mut self, r: usize, col: usize, cost_row: &mut [f64]) {
        let w = self.width + 1;
        let p = self.at(r, col);
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + col];
            if f != 0.0 {
                for (j, pv) in pivot_row.iter().enumerate() {
                    self.t[i * w + j] -= f * pv;
                }
            }
        }
        let f = cost_row[col];
        if f != 0.0 {
            for (j, pv) in pivot_row.iter().enumerate() {
                cost_row[j] -= f * pv;
            }
        }
        self.basis[r] = col;
    }

    /// Runs simplex iterations on `cost_row` (reduced costs, last entry the
    /// negated objective) over columns `0..allowed`.
    fn optimize(&mut self, cost_row: &mut [f64], allowed: usize, iterations: &mut usize) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            if *iterations >= MAX_ITERATIONS {
                return Err(Error::Solver("simplex iteration limit reached".into()));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = PIVOT_TOL;
            for (j, &d) in cost_row.iter().enumerate().take(allowed) {
                if d > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(col) = enter else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, col);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-14 || (ratio <= best + 1e-14 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            if ratio.abs() < 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, col, cost_row);
            *iterations += 1;
        }
    }
}

/// Solves `A y = rhs` for a square matrix given by columns, with partial
/// pivoting. Returns `None` when singular.
fn solve_columns(cols: &[Vec<f64>], rhs: &[f64], transpose: bool) -> Option<Vec<f64>> {
    let m = rhs.len();
    // a[i][j] = entry (i, j) of the system matrix
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if transpose { cols[i][j] } else { cols[j][i] })
                .collect()
        })
        .collect();
    let mut b = rhs.to_vec();
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..m {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..m {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// `maximize c.x` subject to `A x = b`, `x >= 0`, with `A` given by its
/// columns (each of length `b.len()`).
pub fn maximize(cols: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = b.len();
    let n = cols.len();
    if c.len() != n || cols.iter().any(|col| col.len() != m) {
        return Err(Error::Solver("inconsistent problem dimensions".into()));
    }
    let flip: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let width = n + m;
    let mut t = vec![0.0; m * (width + 1)];
    for i in 0..m {
        let row = &mut t[i * (width + 1)..(i + 1) * (width + 1)];
        for (j, col) in cols.iter().enumerate() {
            row[j] = flip[i] * col[i];
        }
        row[n + i] = 1.0;
        row[width] = flip[i] * b[i];
    }
    let mut tab = Tableau {
        rows: m,
        width,
        t,
        basis: (n..n + m).collect(),
    };
    let mut iterations = 0;

    // phase 1: maximize -sum(artificials)
    let mut cost = vec![0.0; width + 1];
    for i in 0..m {
        for (j, cj) in cost.iter_mut().enumerate().take(n) {
            *cj += tab.at(i, j);
        }
        cost[width] += tab.rhs(i);
    }
    tab.optimize(&mut cost, n, &mut iterations)?;
    let infeasibility = cost[width];
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if infeasibility > 1e-9 * scale {
        return Err(Error::Solver(format!(
            "linear program infeasible (phase-1 residual {infeasibility:e})"
        )));
    }
    // drive remaining artificials out where possible
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| tab.at(r, j).abs() > 1e-9) {
                let mut dummy = vec![0.0; width + 1];
                tab.pivot(r, col, &mut dummy);
            }
        }
    }

    // phase 2
    let mut cost = vec![0.0; width + 1];
    cost[..n].copy_from_slice(c);
    for r in 0..m {
        let bj = tab.basis[r];
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..=width {
                cost[j] -= cb * tab.at(r, j);
            }
        }
    }
    tab.optimize(&mut cost, n, &mut iterations)?;

    // re-solve on the final basis
    let basis: Vec<Option<usize>> = tab.basis.iter().map(|&j| (j < n).then_some(j)).collect();
    let bcols: Vec<Vec<f64>> = tab
        .basis
        .iter()
        .map(|&j| {
            if j < n {
                cols[j].clone()
            } else {
                let mut e = vec![0.0; m];
                e[j - n] = flip[j - n];
                e
            }
        })
        .collect();
    let xb = solve_columns(&bcols, b, false)
        .ok_or_else(|| Error::Solver("singular final basis".into()))?;
    let cb: Vec<f64> = tab.basis.iter().map(|&j| if j < n { c[j] } else { 0.0 }).collect();
    let duals = solve_columns(&bcols, &cb, true)
        .ok_or_else(|| Error::Solver("singular final basis".into()))?;
    let mut x = vec![0.0; n];
    for (r, &j) in tab.basis.iter().enumerate() {
        if j < n {
            x[j] = xb[r];
        }
    }
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    Ok(LpSolution {
        x,
        basis,
        objective,
        duals,
        iterations,
    })
}

/// Revised simplex for `maximize c.x, A x = b, x >= 0` started from a
/// known feasible basis. Columns can be appended between solves; the
/// previous optimal basis stays feasible, so each re-solve is warm.
///
/// The right-hand side is perturbed by a few parts in `1e11` to break
/// degenerate ties. The reported objective is `b.y` for the unperturbed
/// `b`, which bounds the true optimum from above by weak duality.
#[derive(Clone, Debug)]
pub struct WarmLp {
    b_true: Vec<f64>,
    b: Vec<f64>,
    cols: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    xb: Vec<f64>,
    iterations: usize,
}

const REFACTOR_EVERY: usize = 64;
const PERTURB: f64 = 1e-11;

fn invert(cols: &[&Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let m = cols.len();
    let mut a: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| cols[j][i]).collect()).collect();
    let mut inv: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        inv.swap(k, p);
        let d = a[k][k];
        for j in 0..m {
            a[k][j] /= d;
            inv[k][j] /= d;
        }
        for i in 0..m {
            if i != k {
                let f = a[i][k];
                if f != 0.0 {
                    for j in 0..m {
                        a[i][j] -= f * a[k][j];
                        inv[i][j] -= f * inv[k][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

impl WarmLp {
    /// `basis` lists one column index per row; it must be feasible.
    pub fn new(b: Vec<f64>, cols: Vec<Vec<f64>>, cost: Vec<f64>, basis: Vec<usize>) -> Result<Self> {
        let m = b.len();
        let b_orig = b.clone();
        if basis.len() != m || cols.len() != cost.len() || cols.iter().any(|c| c.len() != m) {
            return Err(Error::Solver("inconsistent problem dimensions".into()));
        }
        let b_scale = b.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        let b = b
            .iter()
            .enumerate()
            .map(|(i, v)| v + PERTURB * b_scale * (1.0 + (i as f64 * 0.618_034).fract()))
            .collect();
        let mut lp = WarmLp {
            b_true: b_orig,
            b,
            cols,
            cost,
            basis,
            binv: Vec::new(),
            xb: Vec::new(),
            iterations: 0,
        };
        lp.refactor()?;
        if lp.xb.iter().any(|&x| x < -1e-12) {
            return Err(Error::Solver("initial basis is infeasible".into()));
        }
        Ok(lp)
    }

    fn refactor(&mut self) -> Result<()> {
        let bcols: Vec<&Vec<f64>> = self.basis.iter().map(|&j| &self.cols[j]).collect();
        self.binv = invert(&bcols).ok_or_else(|| Error::Solver("singular basis".into()))?;
        self.xb = self
            .binv
            .iter()
            .map(|row| row.iter().zip(&self.b).map(|(a, b)| a * b).sum())
            .collect();
        Ok(())
    }

    pub fn add_column(&mut self, col: Vec<f64>, cost: f64) {
        debug_assert_eq!(col.len(), self.b.len());
        self.cols.push(col);
        self.cost.push(cost);
    }

    pub fn columns(&self) -> usize {
        self.cols.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `y = c_B B^-1`, the coefficients of the dual optimum.
    pub fn duals(&self) -> Vec<f64> {
        let m = self.b.len();
        let bcols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.cols[j].clone()).collect();
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        solve_columns(&bcols, &cb, true).unwrap_or_else(|| {
            (0..m)
                .map(|k| (0..m).map(|i| cb[i] * self.binv[i][k]).sum())
                .collect()
        })
    }

    pub fn objective(&self) -> f64 {
        self.duals().iter().zip(&self.b_true).map(|(y, b)| y * b).sum()
    }

    /// Primal values of the perturbed problem.
    pub fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.cols.len()];
        for (&j, &v) in self.basis.iter().zip(&self.xb) {
            x[j] = v;
        }
        x
    }

    pub fn solve(&mut self) -> Result<()> {
        let m = self.b.len();
        let scale = 1.0 + self.cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let enter_tol = 1e-13 * scale;
        let mut degenerate = 0usize;
        let mut since_refactor = 0usize;
        let mut in_basis = vec![false; self.cols.len()];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::Solver("simplex iteration limit reached".into()));
            }
            let y: Vec<f64> = (0..m)
                .map(|k| (0..m).map(|i| self.cost[self.basis[i]] * self.binv[i][k]).sum())
                .collect();
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = enter_tol;
            for (j, col) in self.cols.iter().enumerate() {
                if in_basis[j] {
                    continue;
                }
                let d = self.cost[j] - col.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>();
                if d > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(col) = enter else {
                return Ok(());
            };
            let u: Vec<f64> = self
                .binv
                .iter()
                .map(|row| row.iter().zip(&self.cols[col]).map(|(a, b)| a * b).sum())
                .collect();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if u[i] > 1e-12 {
                    let ratio = self.xb[i].max(0.0) / u[i];
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-15
                                || (ratio <= best + 1e-15 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, step)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            degenerate = if step < 1e-15 { degenerate + 1 } else { 0 };
            let pr = u[r];
            for j in 0..m {
                self.binv[r][j] /= pr;
            }
            self.xb[r] /= pr;
            for i in 0..m {
                if i != r && u[i] != 0.0 {
                    let f = u[i];
                    for j in 0..m {
                        self.binv[i][j] -= f * self.binv[r][j];
                    }
                    self.xb[i] -= f * self.xb[r];
                }
            }
            in_basis[self.basis[r]] = false;
            in_basis[col] = true;
            self.basis[r] = col;
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
        }
    }
}
