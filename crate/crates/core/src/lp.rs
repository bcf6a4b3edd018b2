//! Dense bounded-variable primal simplex for covering-type linear programs.
//!
//! Solves `min c·x` subject to `A x ≥ b` and `lo ≤ x ≤ hi`, where every
//! bound is finite. Each row gets a surplus variable; rows that the starting
//! point (all variables at their lower bounds) leaves unsatisfied also get an
//! artificial variable, driven to zero in phase one and frozen at zero in
//! phase two. Variables sit at either bound when nonbasic, so bound flips
//! replace pivots whenever the entering variable reaches its opposite bound
//! first.
//!
//! Pricing is Dantzig's rule; after `3(m + n)` consecutive degenerate steps
//! the solver switches to Bland's rule for the rest of the solve. The total
//! number of steps is capped at `50(m + n)`.

use crate::model::{CoverSystem, RelaxedPoint};

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterLimit,
    Unbounded,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::IterLimit => "iteration limit",
            LpStatus::Unbounded => "unbounded",
        };
        f.write_str(s)
    }
}

/// `min objective·x` s.t. `rows·x ≥ rhs`, `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Relaxed covering polytope `Dx ≥ 1, 0 ≤ x ≤ 1`.
    pub fn covering(sys: &CoverSystem, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), sys.n());
        let n = sys.n();
        let rows = (0..sys.m())
            .map(|i| (0..n).map(|j| sys.get(i, j) as f64).collect())
            .collect();
        Self {
            objective,
            rows,
            rhs: vec![1.0; sys.m()],
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.objective.len()
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Fixes `x_j = value`.
    pub fn fix(&mut self, j: usize, value: f64) -> &mut Self {
        self.lower[j] = value;
        self.upper[j] = value;
        self
    }

    pub fn with_fixings(mut self, fixings: &[(usize, f64)]) -> Self {
        for &(j, v) in fixings {
            self.fix(j, v);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub x: RelaxedPoint,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    n: usize,
    ncols: usize,
    /// `B⁻¹A`, row-major `m × ncols`.
    t: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    value: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Original constraint columns, for recomputing basic values.
    a: Vec<f64>,
    rhs: Vec<f64>,
    /// Row index of each artificial column, in column order.
    artificial_rows: Vec<usize>,
    iterations: usize,
    cap: usize,
    degenerate_run: usize,
    bland: bool,
}

enum Phase {
    Done,
    Unbounded,
    Capped,
}

impl Tableau {
    fn build(p: &LpProblem) -> Self {
        let (m, n) = (p.m(), p.n());
        let residual: Vec<f64> = (0..m)
            .map(|i| p.rhs[i] - (0..n).map(|j| p.rows[i][j] * p.lower[j]).sum::<f64>())
            .collect();
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| residual[i] > 0.0).collect();
        let ncols = n + m + artificial_rows.len();

        let mut a = vec![0.0; m * ncols];
        for i in 0..m {
            a[i * ncols..i * ncols + n].copy_from_slice(&p.rows[i]);
            a[i * ncols + n + i] = -1.0;
        }
        for (k, &i) in artificial_rows.iter().enumerate() {
            a[i * ncols + n + m + k] = 1.0;
        }

        let mut lower = p.lower.clone();
        let mut upper = p.upper.clone();
        lower.extend(std::iter::repeat_n(0.0, m + artificial_rows.len()));
        upper.extend(std::iter::repeat_n(
            f64::INFINITY,
            m + artificial_rows.len(),
        ));

        let mut value = lower.clone();
        let mut state = vec![VarState::AtLower; ncols];
        let mut basis = vec![0; m];
        let mut t = vec![0.0; m * ncols];
        let mut art = 0;
        for i in 0..m {
            let row = &a[i * ncols..(i + 1) * ncols];
            if residual[i] > 0.0 {
                let col = n + m + art;
                art += 1;
                basis[i] = col;
                value[col] = residual[i];
                t[i * ncols..(i + 1) * ncols].copy_from_slice(row);
            } else {
                let col = n + i;
                basis[i] = col;
                value[col] = -residual[i];
                for (dst, src) in t[i * ncols..(i + 1) * ncols].iter_mut().zip(row) {
                    *dst = -src;
                }
            }
            state[basis[i]] = VarState::Basic;
        }
        let cap = 50 * (m + n).max(1);
        Self {
            m,
            n,
            ncols,
            t,
            basis,
            state,
            value,
            lower,
            upper,
            a,
            rhs: p.rhs.clone(),
            artificial_rows,
            iterations: 0,
            cap,
            degenerate_run: 0,
            bland: false,
        }
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
            for (dj, tij) in d.iter_mut().zip(row) {
                *dj -= cb * tij;
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + j];
        for v in &mut self.t[r * nc..(r + 1) * nc] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.t[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            row[j] = 0.0;
        }
    }

    /// Recomputes basic values as `B⁻¹(b − N x_N)`. The surplus columns are
    /// `−I`, so `B⁻¹` is the negated surplus block of the tableau.
    fn refresh_basic_values(&mut self) {
        let (m, nc, n) = (self.m, self.ncols, self.n);
        let mut r = self.rhs.clone();
        for j in 0..nc {
            if self.state[j] == VarState::Basic || self.value[j] == 0.0 {
                continue;
            }
            for i in 0..m {
                r[i] -= self.a[i * nc + j] * self.value[j];
            }
        }
        for i in 0..m {
            let row = &self.t[i * nc..(i + 1) * nc];
            let v: f64 = (0..m).map(|k| -row[n + k] * r[k]).sum();
            self.value[self.basis[i]] = v;
        }
    }

    fn run(&mut self, cost: &[f64]) -> Phase {
        loop {
            if self.iterations >= self.cap {
                return Phase::Capped;
            }
            let d = self.reduced_costs(cost);
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.ncols {
                let dir = match self.state[j] {
                    VarState::Basic => continue,
                    _ if self.upper[j] - self.lower[j] <= 0.0 => continue,
                    VarState::AtLower if d[j] < -COST_TOL => 1.0,
                    VarState::AtUpper if d[j] > COST_TOL => -1.0,
                    _ => continue,
                };
                if self.bland {
                    entering = Some((j, dir));
                    break;
                }
                if d[j].abs() > best {
                    best = d[j].abs();
                    entering = Some((j, dir));
                }
            }
            let Some((j, dir)) = entering else {
                return Phase::Done;
            };

            let nc = self.ncols;
            let mut step = self.upper[j] - self.lower[j];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_alpha = 0.0;
            for i in 0..self.m {
                let alpha = dir * self.t[i * nc + j];
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL {
                    ((self.value[b] - self.lower[b]) / alpha).max(0.0)
                } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.value[b]) / -alpha).max(0.0)
                } else {
                    continue;
                };
                let better = if limit < step - 1e-12 {
                    true
                } else if limit <= step + 1e-12 {
                    match leave {
                        Some((r, _)) if self.bland => b < self.basis[r],
                        Some(_) => alpha.abs() > leave_alpha,
                        None => false,
                    }
                } else {
                    false
                };
                if better {
                    step = limit;
                    leave = Some((i, alpha > 0.0));
                    leave_alpha = alpha.abs();
                }
            }
            if !step.is_finite() {
                return Phase::Unbounded;
            }

            self.iterations += 1;
            if step <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > 3 * (self.m + self.n) {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }

            self.value[j] += dir * step;
            for i in 0..self.m {
                let tij = self.t[i * nc + j];
                if tij != 0.0 {
                    let b = self.basis[i];
                    self.value[b] -= dir * step * tij;
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    if dir > 0.0 {
                        self.state[j] = VarState::AtUpper;
                        self.value[j] = self.upper[j];
                    } else {
                        self.state[j] = VarState::AtLower;
                        self.value[j] = self.lower[j];
                    }
                }
                Some((r, to_lower)) => {
                    let out = self.basis[r];
                    if to_lower {
                        self.state[out] = VarState::AtLower;
                        self.value[out] = self.lower[out];
                    } else {
                        self.state[out] = VarState::AtUpper;
                        self.value[out] = self.upper[out];
                    }
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.state[j] = VarState::Basic;
                }
            }
        }
    }

    fn artificial_sum(&self) -> f64 {
        let base = self.n + self.m;
        (0..self.artificial_rows.len())
            .map(|k| self.value[base + k].max(0.0))
            .sum()
    }
}

/// Solves `p` to optimality, or reports infeasibility / the iteration cap.
pub fn solve_lp(p: &LpProblem) -> LpSolution {
    let (m, n) = (p.m(), p.n());
    debug_assert!(p.rows.iter().all(|r| r.len() == n));
    debug_assert!((0..n)
        .all(|j| p.lower[j] <= p.upper[j] && p.lower[j].is_finite() && p.upper[j].is_finite()));

    let mut tab = Tableau::build(p);
    let fail = |status: LpStatus, iterations: usize| LpSolution {
        status,
        value: f64::NAN,
        x: RelaxedPoint::derived(p.lower.clone()),
        iterations,
    };

    if !tab.artificial_rows.is_empty() {
        let mut phase_one = vec![0.0; tab.ncols];
        for c in phase_one.iter_mut().skip(n + m) {
            *c = 1.0;
        }
        match tab.run(&phase_one) {
            Phase::Done => {}
            Phase::Capped => return fail(LpStatus::IterLimit, tab.iterations),
            Phase::Unbounded => unreachable!("phase one is bounded below by zero"),
        }
        tab.refresh_basic_values();
        if tab.artificial_sum() > FEAS_TOL {
            return fail(LpStatus::Infeasible, tab.iterations);
        }
        for k in 0..tab.artificial_rows.len() {
            let col = n + m + k;
            tab.upper[col] = 0.0;
            if tab.state[col] != VarState::Basic {
                tab.state[col] = VarState::AtLower;
                tab.value[col] = 0.0;
            }
        }
    }

    let mut cost = p.objective.clone();
    cost.resize(tab.ncols, 0.0);
    let status = match tab.run(&cost) {
        Phase::Done => LpStatus::Optimal,
        Phase::Capped => LpStatus::IterLimit,
        Phase::Unbounded => LpStatus::Unbounded,
    };
    tab.refresh_basic_values();

    let x: Vec<f64> = (0..n)
        .map(|j| tab.value[j].clamp(p.lower[j], p.upper[j]))
        .collect();
    let value = x.iter().zip(&p.objective).map(|(x, c)| x * c).sum();
    LpSolution {
        status,
        value,
        x: RelaxedPoint::derived(x),
        iterations: tab.iterations,
    }
}

/// Largest violation of `rows·x ≥ rhs` at `x`.
pub fn row_violation(p: &LpProblem, x: &[f64]) -> f64 {
    p.rows
        .iter()
        .zip(&p.rhs)
        .map(|(row, b)| b - row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>())
        .fold(0.0, f64::max)
}
