mod common;

use common::{enumerate_min, random_cover, random_instance, wilcoxon_enumeration_p};
use proptest::prelude::*;
use qcop::bench::lp_file_string;
use qcop::bounds::{natural_lower_bound, restricted_lcop, solve_linear_cover, NlbVariant, Side};
use qcop::lp::{solve_lp, LpProblem};
use qcop::model::{
    enumerate_feasible, evaluate, is_feasible, BinaryPoint, QMatrix, QscpInstance, Representation,
};
use qcop::qscp::{read_instance, write_instance};
use qcop::rng::SplitMix64;
use qcop::solver::{branch_and_bound, brute_force_solve, greedy_upper, BoundKind};
use qcop::stats::wilcoxon_differences;
use qcop::transforms::transpose_repr;

fn instance(seed: u64, m: usize, n: usize) -> QscpInstance {
    random_instance(&mut SplitMix64::new(seed), m, n, -6, 9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_leaves_values_unchanged(seed: u64, n in 1usize..9, mask: u64) {
        let inst = instance(seed, 3, n);
        let x = BinaryPoint::from_mask(n, mask & ((1 << n) - 1));
        let t = transpose_repr(&inst.rep);
        prop_assert_eq!(evaluate(&inst.rep, &x).unwrap(), evaluate(&t, &x).unwrap());
    }

    #[test]
    fn feasibility_is_upward_closed(seed: u64, n in 1usize..10, mask: u64, extra in 0usize..10) {
        let sys = random_cover(&mut SplitMix64::new(seed), 5, n);
        let mut x = BinaryPoint::from_mask(n, mask & ((1 << n) - 1));
        if is_feasible(&sys, &x).unwrap() {
            x.set(extra % n, true);
            prop_assert!(is_feasible(&sys, &x).unwrap());
        }
    }

    #[test]
    fn enumeration_equals_filtering(seed: u64, m in 1usize..6, n in 1usize..10) {
        let sys = random_cover(&mut SplitMix64::new(seed), m, n);
        let listed: Vec<Vec<u8>> = enumerate_feasible(&sys, 20).unwrap().iter().map(|x| x.bits().to_vec()).collect();
        let filtered: Vec<Vec<u8>> = (0..1u64 << n)
            .map(|mask| BinaryPoint::from_mask(n, mask))
            .filter(|x| is_feasible(&sys, x).unwrap())
            .map(|x| x.bits().to_vec())
            .collect();
        let (mut a, mut b) = (listed, filtered);
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lp_relaxation_below_linear_optimum(seed: u64, m in 1usize..8, n in 2usize..11) {
        let mut rng = SplitMix64::new(seed);
        let sys = random_cover(&mut rng, m, n);
        let cost: Vec<f64> = (0..n).map(|_| rng.range_i64(-2, 10) as f64).collect();
        let lp = solve_lp(&LpProblem::covering(&sys, cost.clone()));
        let exact = solve_linear_cover(&sys, &cost, &vec![None; n], 100_000).unwrap();
        let brute = enumerate_feasible(&sys, 20)
            .unwrap()
            .iter()
            .map(|x| x.support().map(|j| cost[j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(exact.proven);
        prop_assert_eq!(exact.value, brute);
        prop_assert!(lp.value <= brute + 1e-7);
    }

    #[test]
    fn fixing_never_lowers_the_optimum(seed: u64, m in 1usize..6, n in 2usize..10, j in 0usize..10, bit in 0u8..2) {
        let mut rng = SplitMix64::new(seed);
        let sys = random_cover(&mut rng, m, n);
        let cost: Vec<f64> = (0..n).map(|_| rng.range_i64(-2, 10) as f64).collect();
        let free = solve_linear_cover(&sys, &cost, &vec![None; n], 100_000).unwrap();
        let mut fix = vec![None; n];
        fix[j % n] = Some(bit);
        if let Some(fixed) = solve_linear_cover(&sys, &cost, &fix, 100_000) {
            prop_assert!(fixed.value >= free.value - 1e-9);
            prop_assert_eq!(fixed.x[j % n], bit);
        }
    }

    #[test]
    fn relaxed_restriction_is_weaker(seed: u64, m in 1usize..6, n in 2usize..9, k in 0usize..9) {
        let inst = instance(seed, m, n);
        for side in [Side::Row, Side::Col] {
            let exact = restricted_lcop(&inst, k % n, side, false).unwrap();
            let relaxed = restricted_lcop(&inst, k % n, side, true).unwrap();
            prop_assert!(relaxed <= exact + 1e-7, "{relaxed} > {exact}");
        }
    }

    #[test]
    fn bounds_and_solvers_agree_with_enumeration(seed: u64, m in 1usize..6, n in 2usize..10) {
        let inst = instance(seed, m, n);
        let opt = enumerate_min(&inst);
        prop_assert_eq!(brute_force_solve(&inst).unwrap().optimal_value, opt);
        prop_assert!(greedy_upper(&inst).unwrap().optimal_value >= opt);
        for kind in [BoundKind::NlbBound, BoundKind::LpLinearized, BoundKind::None] {
            let r = branch_and_bound(&inst, kind, 1_000_000).unwrap();
            prop_assert!(r.proven);
            prop_assert!((r.optimal_value - opt).abs() < 1e-9, "{kind}: {} vs {opt}", r.optimal_value);
        }
        for v in NlbVariant::ALL {
            prop_assert!(natural_lower_bound(&inst, v).unwrap().bound <= opt + 1e-7);
        }
    }

    #[test]
    fn native_format_round_trips(seed: u64, m in 1usize..6, n in 1usize..8) {
        let inst = instance(seed, m, n);
        prop_assert_eq!(read_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn wilcoxon_matches_enumeration(d in prop::collection::vec(prop::sample::select(vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]), 1..12)) {
        prop_assume!(d.iter().any(|v| *v != 0.0));
        prop_assert_eq!(wilcoxon_differences(&d).unwrap().p_value, wilcoxon_enumeration_p(&d));
    }

    #[test]
    fn wilcoxon_invariant_under_sign_flip_and_scaling(d in prop::collection::vec(-50i32..50, 1..25), scale in 1u32..7) {
        let d: Vec<f64> = d.into_iter().map(f64::from).collect();
        prop_assume!(d.iter().any(|v| *v != 0.0));
        let base = wilcoxon_differences(&d).unwrap();
        let flipped: Vec<f64> = d.iter().map(|v| -v).collect();
        let scaled: Vec<f64> = d.iter().map(|v| v * f64::from(scale)).collect();
        let f = wilcoxon_differences(&flipped).unwrap();
        let s = wilcoxon_differences(&scaled).unwrap();
        prop_assert!((base.p_value - f.p_value).abs() < 1e-12);
        prop_assert_eq!(base.w_plus, f.w_minus);
        prop_assert_eq!(base.p_value, s.p_value);
        prop_assert!((0.0..=1.0).contains(&base.p_value));
    }
}

#[test]
fn zero_q_bound_is_the_linear_optimum() {
    let mut rng = SplitMix64::new(17);
    let sys = random_cover(&mut rng, 6, 10);
    let c = qcop::model::LinearCost::new((0..10).map(|_| rng.range_i64(1, 9) as f64).collect())
        .unwrap();
    let inst = QscpInstance::new(
        sys,
        Representation::original(QMatrix::zeros(10), c).unwrap(),
    )
    .unwrap();
    let nlb = natural_lower_bound(&inst, NlbVariant::Nlb).unwrap();
    assert_eq!(nlb.bound, enumerate_min(&inst));
}

/// Reads the objective back out of an exported LP file and compares it with
/// direct evaluation.
#[test]
fn lp_file_objective_reparses() {
    let q = QMatrix::from_rows(&[vec![2.0, -3.0], vec![5.0, -1.0]]).unwrap();
    let c = qcop::model::LinearCost::new(vec![4.0, -7.0]).unwrap();
    let sys = qcop::model::CoverSystem::from_rows(&[vec![1, 1]]).unwrap();
    let inst = QscpInstance::new(sys, Representation::original(q, c).unwrap()).unwrap();
    let text = lp_file_string(&inst);
    let obj = text
        .split("obj:")
        .nth(1)
        .unwrap()
        .split("Subject To")
        .next()
        .unwrap();
    let (linear, quad) = obj.split_once('[').unwrap();
    let quad = quad.split(']').next().unwrap();
    let eval = |x: [f64; 2]| {
        let terms = |s: &str| -> Vec<(f64, Vec<usize>)> {
            let toks: Vec<&str> = s.split_whitespace().collect();
            let mut out = Vec::new();
            let mut i = 0;
            while i < toks.len() {
                let sign = if toks[i] == "-" { -1.0 } else { 1.0 };
                let coef: f64 = toks[i + 1].parse().unwrap();
                let a: usize = toks[i + 2][1..].parse().unwrap();
                if toks.get(i + 3) == Some(&"*") {
                    let b: usize = toks[i + 4][1..].parse().unwrap();
                    out.push((sign * coef, vec![a, b]));
                    i += 5;
                } else if toks.get(i + 3) == Some(&"^") {
                    out.push((sign * coef, vec![a, a]));
                    i += 5;
                } else {
                    out.push((sign * coef, vec![a]));
                    i += 3;
                }
            }
            out
        };
        let mut v = 0.0;
        for (coef, vars) in terms(linear.trim_end().trim_end_matches('+')) {
            v += coef * vars.iter().map(|j| x[j - 1]).product::<f64>();
        }
        for (coef, vars) in terms(quad) {
            v += coef / 2.0 * vars.iter().map(|j| x[j - 1]).product::<f64>();
        }
        v
    };
    for mask in 0..4u64 {
        let x = BinaryPoint::from_mask(2, mask);
        let xf = [x.get(0) as u8 as f64, x.get(1) as u8 as f64];
        assert_eq!(eval(xf), evaluate(&inst.rep, &x).unwrap(), "mask {mask}");
    }
}
