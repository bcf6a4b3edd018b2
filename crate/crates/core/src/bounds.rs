//! Natural lower bounds for quadratic set covering.
//!
//! For a cover family `F` and column `k`, the restricted minima
//!
//! ```text
//! l_k = c_k + min { Σ_j q_kj x_j : x ∈ F, x_k = 1 }      (row side)
//! m_k = c_k + min { Σ_i q_ik x_i : x ∈ F, x_k = 1 }      (column side)
//! ```
//!
//! give `f(x) ≥ Σ_k l_k x_k` and `f(x) ≥ Σ_k m_k x_k` on `F`. Minimizing
//! those linear functions yields `α` and `β`, and `max(α, β)` bounds the
//! optimum. The relaxed variants replace the restricted minima by LP values
//! over `0 ≤ x ≤ 1, Dx ≥ 1`, rounded up when the data are integral; `NLB_R`
//! also minimizes the outer problem over the relaxation while `NLB_R1`
//! solves it exactly. On every instance
//! `NLB_R ≤ NLB_R1 ≤ NLB ≤ optimum`.
//!
//! A column whose restricted problem has no solution gets the value `+∞`
//! and is excluded from the outer problem.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::model::{CoverSystem, QscpInstance, Representation};

/// Node limit for each exact linear covering subproblem.
pub const LINEAR_NODE_CAP: usize = 200_000;

/// Slack subtracted before rounding an LP value up to an integer.
pub const CEIL_SLACK: f64 = 1e-7;

pub(crate) fn ceil_integral(v: f64) -> f64 {
    if v.is_finite() {
        (v - CEIL_SLACK).ceil()
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Row,
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NlbVariant {
    Nlb,
    NlbR,
    NlbR1,
}

impl NlbVariant {
    pub const ALL: [NlbVariant; 3] = [NlbVariant::Nlb, NlbVariant::NlbR, NlbVariant::NlbR1];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "nlb" => Ok(NlbVariant::Nlb),
            "nlbr" => Ok(NlbVariant::NlbR),
            "nlbr1" => Ok(NlbVariant::NlbR1),
            _ => Err(Error::InvalidArgument(format!(
                "unknown bound variant '{s}'"
            ))),
        }
    }

    fn relaxed_inner(self) -> bool {
        self != NlbVariant::Nlb
    }
}

impl fmt::Display for NlbVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NlbVariant::Nlb => "NLB",
            NlbVariant::NlbR => "NLB_R",
            NlbVariant::NlbR1 => "NLB_R1",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlbReport {
    /// Row-side restricted minima (`l_k` or `l_k^R`), `+∞` when excluded.
    pub l: Vec<f64>,
    /// Column-side restricted minima.
    pub m_vec: Vec<f64>,
    /// Row-side outer coefficients after rounding.
    pub alpha_coefficients: Vec<f64>,
    /// Column-side outer coefficients after rounding.
    pub beta_coefficients: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub bound: f64,
    pub variant: NlbVariant,
    pub inner_subproblems: usize,
    pub outer_subproblems: usize,
    pub subproblems_solved: usize,
    /// Whether restricted values were rounded up (integral data only).
    pub ceiling_applied: bool,
    /// False when some exact subproblem hit its node limit; the bound is
    /// still valid but may be weaker.
    pub exact: bool,
}

/// Outcome of an exact linear covering solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoverSolution {
    pub value: f64,
    pub x: Vec<u8>,
    pub proven: bool,
    /// Valid lower bound on the optimum; equals `value` when proven.
    pub lower_bound: f64,
    pub nodes: usize,
}

/// LP over the relaxed node family `{0 ≤ x ≤ 1, Dx ≥ 1, x_j = f_j}` with
/// covered rows and fixed columns removed.
pub(crate) enum FamilyLp {
    Infeasible,
    Limit,
    Solved { value: f64, x: Vec<f64> },
}

pub(crate) fn uncovered_rows(sys: &CoverSystem, fix: &[Option<u8>]) -> Option<Vec<usize>> {
    let mut rows = Vec::new();
    for i in 0..sys.m() {
        let support = sys.row_support(i);
        if support.iter().any(|&j| fix[j] == Some(1)) {
            continue;
        }
        if !support.iter().any(|&j| fix[j].is_none()) {
            return None;
        }
        rows.push(i);
    }
    Some(rows)
}

pub(crate) fn family_lp(sys: &CoverSystem, weights: &[f64], fix: &[Option<u8>]) -> FamilyLp {
    let Some(rows) = uncovered_rows(sys, fix) else {
        return FamilyLp::Infeasible;
    };
    let free: Vec<usize> = (0..sys.n()).filter(|&j| fix[j].is_none()).collect();
    let constant: f64 = (0..sys.n())
        .filter(|&j| fix[j] == Some(1))
        .map(|j| weights[j])
        .sum();
    let p = LpProblem {
        objective: free.iter().map(|&j| weights[j]).collect(),
        rows: rows
            .iter()
            .map(|&i| free.iter().map(|&j| sys.get(i, j) as f64).collect())
            .collect(),
        rhs: vec![1.0; rows.len()],
        lower: vec![0.0; free.len()],
        upper: vec![1.0; free.len()],
    };
    let s = solve_lp(&p);
    match s.status {
        LpStatus::Optimal => {
            let mut x: Vec<f64> = fix.iter().map(|f| f.map_or(0.0, f64::from)).collect();
            for (t, &j) in free.iter().enumerate() {
                x[j] = s.x.as_slice()[t];
            }
            FamilyLp::Solved {
                value: constant + s.value,
                x,
            }
        }
        LpStatus::Infeasible => FamilyLp::Infeasible,
        LpStatus::IterLimit | LpStatus::Unbounded => FamilyLp::Limit,
    }
}

/// Greedy cover completing the fixings: cheapest cost per newly covered row,
/// then redundant positive-cost columns are dropped.
fn greedy_linear(sys: &CoverSystem, cost: &[f64], fix: &[Option<u8>]) -> Option<Vec<u8>> {
    let n = sys.n();
    let mut x: Vec<u8> = fix.iter().map(|f| f.unwrap_or(0)).collect();
    let mut covered: Vec<bool> = (0..sys.m())
        .map(|i| sys.row_support(i).iter().any(|&j| x[j] == 1))
        .collect();
    while covered.iter().any(|c| !c) {
        let mut best: Option<(f64, usize)> = None;
        for j in (0..n).filter(|&j| fix[j].is_none() && x[j] == 0) {
            let gain = (0..sys.m())
                .filter(|&r| !covered[r] && sys.get(r, j) == 1)
                .count();
            if gain == 0 {
                continue;
            }
            let score = cost[j] / gain as f64;
            if best.is_none_or(|(b, _)| score < b) {
                best = Some((score, j));
            }
        }
        let (_, j) = best?;
        x[j] = 1;
        for (r, c) in covered.iter_mut().enumerate() {
            if sys.get(r, j) == 1 {
                *c = true;
            }
        }
    }
    let mut order: Vec<usize> = (0..n)
        .filter(|&j| fix[j].is_none() && x[j] == 1 && cost[j] > 0.0)
        .collect();
    order.sort_by(|&a, &b| cost[b].partial_cmp(&cost[a]).unwrap().then(a.cmp(&b)));
    for j in order {
        x[j] = 0;
        if !sys.contains_bits(&x) {
            x[j] = 1;
        }
    }
    Some(x)
}

fn linear_value(cost: &[f64], x: &[u8]) -> f64 {
    cost.iter()
        .zip(x)
        .filter(|(_, &b)| b == 1)
        .map(|(c, _)| c)
        .sum()
}

/// Exact `min cost·x` over covers satisfying the fixings, by LP-based
/// depth-first branch and bound. Returns `None` when no cover satisfies the
/// fixings.
///
/// Free columns with nonpositive cost are set to one up front. Branching is
/// on the most fractional LP variable (lowest index on ties), exploring
/// `x_j = 1` first. With integral costs the LP bound is rounded up.
pub fn solve_linear_cover(
    sys: &CoverSystem,
    cost: &[f64],
    fixings: &[Option<u8>],
    node_cap: usize,
) -> Option<LinearCoverSolution> {
    let n = sys.n();
    assert_eq!(cost.len(), n);
    assert_eq!(fixings.len(), n);
    let integral = cost.iter().all(|c| c.fract() == 0.0);
    let mut root = fixings.to_vec();
    for j in 0..n {
        if root[j].is_none() && cost[j] <= 0.0 {
            root[j] = Some(1);
        }
    }
    uncovered_rows(sys, &root)?;

    let mut best_x = greedy_linear(sys, cost, &root)?;
    let mut best = linear_value(cost, &best_x);
    let mut stack: Vec<(Vec<Option<u8>>, f64)> = vec![(root, f64::NEG_INFINITY)];
    let mut nodes = 0;

    while let Some((fix, parent_bound)) = stack.pop() {
        if nodes >= node_cap {
            stack.push((fix, parent_bound));
            break;
        }
        nodes += 1;
        let (bound, x) = match family_lp(sys, cost, &fix) {
            FamilyLp::Infeasible => continue,
            FamilyLp::Limit => (parent_bound, None),
            FamilyLp::Solved { value, x } => {
                let b = if integral {
                    ceil_integral(value)
                } else {
                    value
                };
                (b, Some(x))
            }
        };
        if bound >= best - 1e-9 {
            continue;
        }
        let branch = match &x {
            Some(x) => most_fractional(x, &fix),
            None => (0..n).find(|&j| fix[j].is_none()),
        };
        match branch {
            None => {
                if let Some(x) = x {
                    let bits: Vec<u8> = x.iter().map(|v| (*v > 0.5) as u8).collect();
                    let v = linear_value(cost, &bits);
                    if v < best - 1e-12 && sys.contains_bits(&bits) {
                        best = v;
                        best_x = bits;
                    }
                }
            }
            Some(j) => {
                let mut zero = fix.clone();
                zero[j] = Some(0);
                let mut one = fix;
                one[j] = Some(1);
                stack.push((zero, bound));
                stack.push((one, bound));
            }
        }
    }

    let proven = stack.is_empty();
    let lower_bound = stack.iter().map(|(_, b)| *b).fold(best, f64::min);
    Some(LinearCoverSolution {
        value: best,
        x: best_x,
        proven,
        lower_bound,
        nodes,
    })
}

/// Most fractional free variable, lowest index on ties; `None` when the
/// point is integral on the free variables.
pub(crate) fn most_fractional(x: &[f64], fix: &[Option<u8>]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (j, &v) in x.iter().enumerate() {
        if fix[j].is_some() {
            continue;
        }
        let frac = v.min(1.0 - v);
        if frac > 1e-6 && best.is_none_or(|(b, _)| frac > b + 1e-12) {
            best = Some((frac, j));
        }
    }
    best.map(|(_, j)| j)
}

fn side_weights(rep: &Representation, k: usize, side: Side) -> Vec<f64> {
    let q = rep.q();
    match side {
        Side::Row => q.row(k).to_vec(),
        Side::Col => (0..q.n()).map(|i| q.get(i, k)).collect(),
    }
}

struct Restricted {
    value: f64,
    exact: bool,
}

fn restricted(
    sys: &CoverSystem,
    rep: &Representation,
    fix: &[Option<u8>],
    k: usize,
    side: Side,
    relaxed: bool,
) -> Restricted {
    if fix[k] == Some(0) {
        return Restricted {
            value: f64::INFINITY,
            exact: true,
        };
    }
    let w = side_weights(rep, k, side);
    let ck = rep.c().as_slice()[k];
    let mut f = fix.to_vec();
    f[k] = Some(1);
    if relaxed {
        match family_lp(sys, &w, &f) {
            FamilyLp::Solved { value, .. } => Restricted {
                value: ck + value,
                exact: true,
            },
            FamilyLp::Infeasible => Restricted {
                value: f64::INFINITY,
                exact: true,
            },
            // Without an LP value nothing better than -∞ is certified.
            FamilyLp::Limit => Restricted {
                value: f64::NEG_INFINITY,
                exact: false,
            },
        }
    } else {
        match solve_linear_cover(sys, &w, &f, LINEAR_NODE_CAP) {
            Some(s) => Restricted {
                value: ck + s.lower_bound,
                exact: s.proven,
            },
            None => Restricted {
                value: f64::INFINITY,
                exact: true,
            },
        }
    }
}

/// `c_k + min Σ_j q_kj x_j` (row side) or `c_k + min Σ_i q_ik x_i` (column
/// side) over covers with `x_k = 1`, or over the LP relaxation when
/// `relaxed`. Returns `+∞` when no cover contains column `k`.
pub fn restricted_lcop(inst: &QscpInstance, k: usize, side: Side, relaxed: bool) -> Result<f64> {
    if k >= inst.n() {
        return Err(Error::OutOfRange {
            index: k,
            value: k as f64,
        });
    }
    let fix = vec![None; inst.n()];
    Ok(restricted(&inst.system, &inst.rep, &fix, k, side, relaxed).value)
}

struct Outer {
    value: f64,
    exact: bool,
}

fn outer(sys: &CoverSystem, coef: &[f64], fix: &[Option<u8>], relaxed: bool) -> Outer {
    let mut f = fix.to_vec();
    let mut w = coef.to_vec();
    for j in 0..coef.len() {
        if coef[j] == f64::INFINITY {
            if f[j] == Some(1) {
                return Outer {
                    value: f64::INFINITY,
                    exact: true,
                };
            }
            f[j] = Some(0);
            w[j] = 0.0;
        } else if coef[j] == f64::NEG_INFINITY {
            return Outer {
                value: f64::NEG_INFINITY,
                exact: false,
            };
        }
    }
    if relaxed {
        match family_lp(sys, &w, &f) {
            FamilyLp::Solved { value, .. } => Outer { value, exact: true },
            FamilyLp::Infeasible => Outer {
                value: f64::INFINITY,
                exact: true,
            },
            FamilyLp::Limit => Outer {
                value: f64::NEG_INFINITY,
                exact: false,
            },
        }
    } else {
        match solve_linear_cover(sys, &w, &f, LINEAR_NODE_CAP) {
            Some(s) => Outer {
                value: s.lower_bound,
                exact: s.proven,
            },
            None => Outer {
                value: f64::INFINITY,
                exact: true,
            },
        }
    }
}

/// Natural lower bound of `variant` over the covers of `inst`.
pub fn natural_lower_bound(inst: &QscpInstance, variant: NlbVariant) -> Result<NlbReport> {
    if let Some(row) = inst.system.first_empty_row() {
        return Err(Error::InfeasibleSystem { row });
    }
    let fix = vec![None; inst.n()];
    Ok(nlb_over(&inst.system, &inst.rep, &fix, variant))
}

/// Natural lower bound over the subfamily of covers agreeing with `fix`.
/// Columns fixed to zero receive the `+∞` sentinel.
pub fn nlb_over(
    sys: &CoverSystem,
    rep: &Representation,
    fix: &[Option<u8>],
    variant: NlbVariant,
) -> NlbReport {
    let n = sys.n();
    let symmetric = rep.q().is_symmetric();
    let relaxed = variant.relaxed_inner();
    let ceiling = relaxed && rep.is_integral();

    let sides: &[Side] = if symmetric {
        &[Side::Row]
    } else {
        &[Side::Row, Side::Col]
    };
    let jobs: Vec<(Side, usize)> = sides
        .iter()
        .flat_map(|&s| (0..n).map(move |k| (s, k)))
        .collect();
    let results: Vec<Restricted> = jobs
        .par_iter()
        .map(|&(side, k)| restricted(sys, rep, fix, k, side, relaxed))
        .collect();
    let mut exact = results.iter().all(|r| r.exact);
    let l: Vec<f64> = results[..n].iter().map(|r| r.value).collect();
    let m_vec: Vec<f64> = if symmetric {
        l.clone()
    } else {
        results[n..].iter().map(|r| r.value).collect()
    };
    let round = |v: &Vec<f64>| -> Vec<f64> {
        if ceiling {
            v.iter().map(|&x| ceil_integral(x)).collect()
        } else {
            v.clone()
        }
    };
    let alpha_coefficients = round(&l);
    let beta_coefficients = round(&m_vec);

    let outer_relaxed = variant == NlbVariant::NlbR;
    let a = outer(sys, &alpha_coefficients, fix, outer_relaxed);
    let (beta, outer_subproblems) = if symmetric {
        (a.value, 1)
    } else {
        let b = outer(sys, &beta_coefficients, fix, outer_relaxed);
        exact &= b.exact;
        (b.value, 2)
    };
    exact &= a.exact;
    let alpha = a.value;
    NlbReport {
        l,
        m_vec,
        alpha_coefficients,
        beta_coefficients,
        alpha,
        beta,
        bound: alpha.max(beta),
        variant,
        inner_subproblems: jobs.len(),
        outer_subproblems,
        subproblems_solved: jobs.len() + outer_subproblems,
        ceiling_applied: ceiling,
        exact,
    }
}
