//! Exact and heuristic solvers for quadratic set covering.

use std::fmt;
use std::sync::Arc;

use crate::bounds::{
    ceil_integral, family_lp, most_fractional, nlb_over, uncovered_rows, FamilyLp, NlbVariant,
};
use crate::error::{Error, Result};
use crate::model::{for_each_feasible_mask, BinaryPoint, QscpInstance, Representation};
use crate::tol;

/// Default node limit for [`branch_and_bound`].
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// Node bounding strategy for [`branch_and_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Relaxed natural bound recomputed on the node family at depth ≤ 2;
    /// deeper nodes reuse the nearest ancestor's linearization.
    NlbBound,
    /// Relaxed restricted minima of the root, reused at every node.
    LpLinearized,
    /// Feasibility pruning only.
    None,
}

impl BoundKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nlb" => Ok(BoundKind::NlbBound),
            "lp" => Ok(BoundKind::LpLinearized),
            "none" => Ok(BoundKind::None),
            _ => Err(Error::InvalidArgument(format!("unknown bound kind '{s}'"))),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::NlbBound => "nlb",
            BoundKind::LpLinearized => "lp",
            BoundKind::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    BruteForce,
    Greedy,
    BranchAndBound(BoundKind),
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveMethod::BruteForce => f.write_str("brute"),
            SolveMethod::Greedy => f.write_str("greedy"),
            SolveMethod::BranchAndBound(k) => write!(f, "bb-{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub optimal_value: f64,
    pub x: BinaryPoint,
    pub nodes: usize,
    pub method: SolveMethod,
    pub proven: bool,
}

fn value_of(rep: &Representation, bits: &[u8]) -> f64 {
    let q = rep.q();
    let c = rep.c().as_slice();
    let support: Vec<usize> = (0..bits.len()).filter(|&j| bits[j] == 1).collect();
    let mut v = 0.0;
    for &i in &support {
        v += c[i];
        let row = q.row(i);
        for &j in &support {
            v += row[j];
        }
    }
    v
}

fn require_feasible(inst: &QscpInstance) -> Result<()> {
    match inst.system.first_empty_row() {
        Some(row) => Err(Error::InfeasibleSystem { row }),
        None => Ok(()),
    }
}

/// Exhaustive minimum over every cover, for `n ≤ 25`. Among optimal covers
/// the one with the smallest bitmask (bit `j` = `x_j`) is returned.
pub fn brute_force_solve(inst: &QscpInstance) -> Result<SolveReport> {
    require_feasible(inst)?;
    let n = inst.n();
    let q = inst.rep.q();
    let c = inst.rep.c().as_slice();
    let mut best = (f64::INFINITY, 0u64);
    let mut count = 0;
    let mut support = Vec::with_capacity(n);
    for_each_feasible_mask(&inst.system, tol::ENUMERATION_CAP, |mask| {
        count += 1;
        support.clear();
        support.extend((0..n).filter(|&j| mask >> j & 1 == 1));
        let mut v = 0.0;
        for &i in &support {
            v += c[i];
            let row = q.row(i);
            for &j in &support {
                v += row[j];
            }
        }
        if v < best.0 {
            best = (v, mask);
        }
    })?;
    Ok(SolveReport {
        optimal_value: best.0,
        x: BinaryPoint::from_mask(n, best.1),
        nodes: count,
        method: SolveMethod::BruteForce,
        proven: true,
    })
}

/// Change in objective from adding column `j` to the cover `bits`
/// (`j` not in it).
fn add_delta(rep: &Representation, bits: &[u8], j: usize) -> f64 {
    let q = rep.q();
    let mut d = rep.c().as_slice()[j] + q.get(j, j);
    for i in (0..bits.len()).filter(|&i| bits[i] == 1 && i != j) {
        d += q.get(i, j) + q.get(j, i);
    }
    d
}

/// Marginal-cost greedy cover followed by a local search that adds columns
/// with negative marginal cost and drops columns whose removal keeps the
/// cover feasible and lowers the objective.
pub fn greedy_upper(inst: &QscpInstance) -> Result<SolveReport> {
    require_feasible(inst)?;
    let x = greedy_completion(inst, &vec![None; inst.n()]).expect("feasible system has a cover");
    let value = value_of(&inst.rep, &x);
    Ok(SolveReport {
        optimal_value: value,
        x: BinaryPoint::new(x)?,
        nodes: 0,
        method: SolveMethod::Greedy,
        proven: false,
    })
}

fn greedy_completion(inst: &QscpInstance, fix: &[Option<u8>]) -> Option<Vec<u8>> {
    let sys = &inst.system;
    let rep = &inst.rep;
    let n = inst.n();
    uncovered_rows(sys, fix)?;
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
            let marginal = add_delta(rep, &x, j);
            let score = if marginal <= 0.0 {
                marginal
            } else if gain > 0 {
                marginal / gain as f64
            } else {
                continue;
            };
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
    local_improve(inst, fix, &mut x);
    Some(x)
}

fn local_improve(inst: &QscpInstance, fix: &[Option<u8>], x: &mut [u8]) {
    let n = inst.n();
    loop {
        let mut best: Option<(f64, usize)> = None;
        for j in (0..n).filter(|&j| fix[j].is_none()) {
            let delta = if x[j] == 0 {
                add_delta(&inst.rep, x, j)
            } else {
                x[j] = 0;
                let ok = inst.system.contains_bits(x);
                let d = -add_delta(&inst.rep, x, j);
                x[j] = 1;
                if !ok {
                    continue;
                }
                d
            };
            if delta < -1e-12 && best.is_none_or(|(b, _)| delta < b) {
                best = Some((delta, j));
            }
        }
        match best {
            Some((_, j)) => x[j] ^= 1,
            None => return,
        }
    }
}

/// Coefficient vectors `w` with `f(x) ≥ Σ w_k x_k` on a node family and all
/// of its descendants.
struct Linearization {
    vectors: Vec<Vec<f64>>,
}

impl Linearization {
    fn at(inst: &QscpInstance, fix: &[Option<u8>]) -> Self {
        let r = nlb_over(&inst.system, &inst.rep, fix, NlbVariant::NlbR);
        let mut vectors = vec![r.alpha_coefficients];
        if r.beta_coefficients != vectors[0] {
            vectors.push(r.beta_coefficients);
        }
        Self { vectors }
    }
}

struct Node {
    fix: Vec<Option<u8>>,
    depth: usize,
    lin: Option<Arc<Linearization>>,
}

/// Depth-first branch and bound.
///
/// The incumbent starts from [`greedy_upper`]. A node is pruned when its
/// bound reaches the incumbent minus `1e-9`; with integral data the bound is
/// rounded up first. Each node's linear bound is the largest LP minimum of
/// its linearization vectors over the relaxed node family; variables with
/// `+∞` coefficients are fixed to zero in that LP. Branching takes the most
/// fractional variable of that LP, otherwise the free column covering the
/// most uncovered rows, lowest index on ties, and explores `x_j = 1` first.
/// Reaching `node_cap` returns the incumbent with `proven = false`.
pub fn branch_and_bound(
    inst: &QscpInstance,
    kind: BoundKind,
    node_cap: usize,
) -> Result<SolveReport> {
    require_feasible(inst)?;
    let n = inst.n();
    let sys = &inst.system;
    let integral = inst.rep.is_integral();
    let greedy = greedy_upper(inst)?;
    let mut best = greedy.optimal_value;
    let mut best_x = greedy.x.bits().to_vec();

    let root_lin = match kind {
        BoundKind::None => None,
        _ => Some(Arc::new(Linearization::at(inst, &vec![None; n]))),
    };
    let mut stack = vec![Node {
        fix: vec![None; n],
        depth: 0,
        lin: root_lin,
    }];
    let mut nodes = 0;

    while let Some(mut node) = stack.pop() {
        if nodes >= node_cap {
            stack.push(node);
            break;
        }
        nodes += 1;
        let Some(uncovered) = uncovered_rows(sys, &node.fix) else {
            continue;
        };
        let free: Vec<usize> = (0..n).filter(|&j| node.fix[j].is_none()).collect();
        if free.is_empty() {
            let bits: Vec<u8> = node.fix.iter().map(|f| f.unwrap()).collect();
            let v = value_of(&inst.rep, &bits);
            if v < best {
                best = v;
                best_x = bits;
            }
            continue;
        }
        if kind == BoundKind::NlbBound && node.depth > 0 && node.depth <= 2 {
            node.lin = Some(Arc::new(Linearization::at(inst, &node.fix)));
        }

        let mut bound = f64::NEG_INFINITY;
        let mut lp_x: Option<Vec<f64>> = None;
        if let Some(lin) = &node.lin {
            let mut pruned = false;
            for w in &lin.vectors {
                let mut fix = node.fix.clone();
                let mut weights = w.clone();
                for j in 0..n {
                    if weights[j] == f64::INFINITY {
                        if fix[j] == Some(1) {
                            pruned = true;
                        }
                        fix[j] = Some(0);
                        weights[j] = 0.0;
                    }
                }
                if pruned || weights.iter().any(|v| !v.is_finite()) {
                    break;
                }
                match family_lp(sys, &weights, &fix) {
                    FamilyLp::Infeasible => {
                        pruned = true;
                        break;
                    }
                    FamilyLp::Limit => {}
                    FamilyLp::Solved { value, x } => {
                        if value > bound {
                            bound = value;
                            lp_x = Some(x);
                        }
                    }
                }
            }
            if pruned {
                continue;
            }
        }
        if integral {
            bound = ceil_integral(bound);
        }
        if bound >= best - 1e-9 {
            continue;
        }

        let mut branch = None;
        if let Some(x) = &lp_x {
            let bits: Vec<u8> = x.iter().map(|v| (*v > 0.5) as u8).collect();
            if sys.contains_bits(&bits) {
                let v = value_of(&inst.rep, &bits);
                if v < best {
                    best = v;
                    best_x = bits;
                }
            }
            branch = most_fractional(x, &node.fix);
        }
        let j = branch.unwrap_or_else(|| {
            let gain = |j: usize| uncovered.iter().filter(|&&i| sys.get(i, j) == 1).count();
            let mut pick = free[0];
            for &j in &free {
                if gain(j) > gain(pick) {
                    pick = j;
                }
            }
            pick
        });
        let mut zero = node.fix.clone();
        zero[j] = Some(0);
        let mut one = node.fix;
        one[j] = Some(1);
        stack.push(Node {
            fix: zero,
            depth: node.depth + 1,
            lin: node.lin.clone(),
        });
        stack.push(Node {
            fix: one,
            depth: node.depth + 1,
            lin: node.lin,
        });
    }

    let optimal_value = value_of(&inst.rep, &best_x);
    Ok(SolveReport {
        optimal_value,
        x: BinaryPoint::new(best_x)?,
        nodes,
        method: SolveMethod::BranchAndBound(kind),
        proven: stack.is_empty(),
    })
}
