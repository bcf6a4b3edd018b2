//! Acceptance criteria. Runs without the test harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero when any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{generated, random_cover, wilcoxon_enumeration_p};
use qcop::bounds::{natural_lower_bound, NlbVariant};
use qcop::linalg::is_psd;
use qcop::lp::{row_violation, solve_lp, LpProblem, LpStatus};
use qcop::model::{
    enumerate_feasible, evaluate, is_feasible, CoverSystem, FixedCardinality, LinearCost, QMatrix,
    QscpInstance, Representation, Tag,
};
use qcop::qscp::{load_orlib, read_instance, write_instance, write_orlib, GeneratorConfig, QClass};
use qcop::rng::SplitMix64;
use qcop::solver::{branch_and_bound, brute_force_solve, BoundKind};
use qcop::stats::{exact_p_value, normal_p_value, signed_ranks, wilcoxon_differences};
use qcop::transforms::*;

type Outcome = Result<String, String>;
type Dims = (usize, usize);

const SHIFT: f64 = 10_000.0;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn standard_reps(inst: &QscpInstance) -> Vec<QscpInstance> {
    Tag::STANDARD
        .iter()
        .map(|t| inst.with_rep(standard_representation(&inst.rep, t, SHIFT).unwrap()))
        .collect()
}

/// Criterion 1: every transformation preserves the objective on every
/// feasible point of 40 generated instances.
fn equivalence_suite() -> Outcome {
    let mut checks = 0;
    let mut rng = SplitMix64::new(0xACCE_0001);
    for class in 1..=8u8 {
        for t in 0..5u64 {
            let n = 8 + (t as usize % 8);
            let m = 4 + (t as usize % 7);
            let inst = generated(m, n, 100 + 10 * class as u64 + t, class);
            let rep = &inst.rep;
            let fam = &inst.system;
            let y = SkewSymmetric::from_upper(n, |_, _| rng.range_i64(-7, 7) as f64);
            let u = DiagonalPerturbation((0..n).map(|_| rng.range_i64(-9, 9) as f64).collect());
            let wit_a =
                QMatrix::from_fn(n, |i, j| if i == j { u.0[i] } else { y.matrix().get(i, j) });
            let witness =
                DiagonalizableWitness::structural(wit_a, u.0.clone()).map_err(|e| e.to_string())?;
            let zero_cvp =
                CvpVector::new(vec![0.0; n], 0.0, (0..n).map(|j| j as f64).collect(), fam)
                    .map_err(|e| e.to_string())?;

            let exact: Vec<(&str, Representation)> = vec![
                ("transpose", transpose_repr(rep)),
                ("symmetrize", symmetrize(rep)),
                ("perturb", perturb(rep, &y, &u).unwrap()),
                ("dannil", diagonal_annihilate(rep)),
                ("lannil", linear_annihilate(rep)),
                (
                    "convexify",
                    convexify(rep, ShiftPolicy::Fixed(SHIFT)).unwrap(),
                ),
                (
                    "convexify-gershgorin",
                    convexify(rep, ShiftPolicy::Gershgorin).unwrap(),
                ),
                ("concavify", concavify(rep, SHIFT).unwrap()),
                ("triangularize", triangularize(rep)),
                (
                    "sym-convexify",
                    sym_convexify(rep, ShiftPolicy::Fixed(SHIFT)).unwrap(),
                ),
                (
                    "diagonalizable",
                    perturb_by_diagonalizable(rep, &[witness], &[3.0]).unwrap(),
                ),
                ("cvp", cvp_reformulate(rep, &[zero_cvp], &u).unwrap()),
            ];
            let approximate: Vec<(&str, Representation)> = vec![
                (
                    "combination",
                    convex_combine(
                        &[rep.clone(), transpose_repr(rep), symmetrize(rep)],
                        &[0.3, 0.45, 0.25],
                    )
                    .unwrap(),
                ),
                (
                    "convexify-eigen",
                    convexify(&symmetrize(rep), ShiftPolicy::SmallestEigenvalue).unwrap(),
                ),
                (
                    "sym-convexify-eigen",
                    sym_convexify(rep, ShiftPolicy::SmallestEigenvalue).unwrap(),
                ),
            ];
            for (tol, list) in [(0.0, &exact), (1e-7, &approximate)] {
                for (name, r) in list.iter() {
                    let rep_out =
                        verify_equivalence_within(rep, r, fam, tol).map_err(|e| e.to_string())?;
                    check(rep_out.equivalent && rep_out.exhaustive, || {
                        format!(
                            "{name} on class {class} instance {t}: {:?}",
                            rep_out.counterexample
                        )
                    })?;
                    checks += 1;
                }
            }

            // Family-specific transforms over a fixed-cardinality family.
            let k = 1 + n / 3;
            let card = FixedCardinality { n, k };
            let g: Vec<f64> = (0..n).map(|_| rng.range_i64(-4, 4) as f64).collect();
            let cc = cc_perturb(rep, k, &y, &u, &g).unwrap();
            let ones = CvpVector::new(
                vec![1.0; n],
                k as f64,
                (0..n).map(|_| rng.range_i64(-3, 3) as f64).collect(),
                &card,
            )
            .map_err(|e| e.to_string())?;
            let cvp = cvp_reformulate(rep, &[ones], &u).unwrap();
            for (name, r) in [("cc-perturb", cc), ("cvp-cardinality", cvp)] {
                let out =
                    verify_equivalence_within(rep, &r, &card, 0.0).map_err(|e| e.to_string())?;
                check(out.equivalent && out.exhaustive, || {
                    format!("{name} on class {class} instance {t}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!(
        "{checks} exhaustive equivalence checks on 40 instances"
    ))
}

fn thirty_instances() -> Vec<QscpInstance> {
    (0..30u64)
        .map(|t| {
            let class = (t % 8) as u8 + 1;
            let n = 10 + (t as usize % 9);
            let m = 5 + (t as usize % 8);
            generated(m, n, 5000 + t, class)
        })
        .collect()
}

/// Criterion 2: identical optima across the six representations, matching
/// brute force.
fn optimal_value_equality(instances: &[QscpInstance], optima: &mut Vec<f64>) -> Outcome {
    let mut solves = 0;
    for (t, inst) in instances.iter().enumerate() {
        let brute = brute_force_solve(inst).map_err(|e| e.to_string())?;
        optima.push(brute.optimal_value);
        for r in standard_reps(inst) {
            let brute_r = brute_force_solve(&r).map_err(|e| e.to_string())?;
            let bb =
                branch_and_bound(&r, BoundKind::NlbBound, 5_000_000).map_err(|e| e.to_string())?;
            let tag = r.rep.tag().clone();
            check(bb.proven, || format!("instance {t} {tag}: not proven"))?;
            check(is_feasible(&r.system, &bb.x).unwrap(), || {
                format!("instance {t} {tag}: infeasible x")
            })?;
            let at_x = evaluate(&r.rep, &bb.x).unwrap();
            check((at_x - bb.optimal_value).abs() <= 1e-7, || {
                format!("instance {t} {tag}: f(x) = {at_x}")
            })?;
            for v in [bb.optimal_value, brute_r.optimal_value] {
                check((v - brute.optimal_value).abs() <= 1e-7, || {
                    format!(
                        "instance {t} {tag}: {v} vs brute force {}",
                        brute.optimal_value
                    )
                })?;
            }
            solves += 1;
        }
    }
    Ok(format!(
        "{solves} branch-and-bound solves agree with brute force"
    ))
}

/// Criterion 3: NLB_R ≤ NLB_R1 ≤ NLB ≤ optimum.
fn bound_ordering(instances: &[QscpInstance], optima: &[f64]) -> Outcome {
    let mut checked = 0;
    for (t, inst) in instances.iter().enumerate() {
        for r in standard_reps(inst) {
            let b = |v| natural_lower_bound(&r, v).unwrap().bound;
            let (nr, nr1, nlb) = (
                b(NlbVariant::NlbR),
                b(NlbVariant::NlbR1),
                b(NlbVariant::Nlb),
            );
            let opt = optima[t];
            check(
                nr <= nr1 + 1e-7 && nr1 <= nlb + 1e-7 && nlb <= opt + 1e-7,
                || {
                    format!(
                        "instance {t} {}: {nr} ≤ {nr1} ≤ {nlb} ≤ {opt} violated",
                        r.rep.tag()
                    )
                },
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "0 violations over {checked} instance-representation pairs"
    ))
}

/// Criterion 4: symmetric representations need n inner problems and give
/// α = β.
fn symmetric_shortcut(instances: &[QscpInstance]) -> Outcome {
    let mut reports = 0;
    for (t, inst) in instances.iter().enumerate() {
        let sym = inst.with_rep(symmetrize(&inst.rep));
        for v in NlbVariant::ALL {
            let r = natural_lower_bound(&sym, v).unwrap();
            check(r.alpha == r.beta, || {
                format!("instance {t} {v}: α = {} β = {}", r.alpha, r.beta)
            })?;
            check(r.inner_subproblems == inst.n(), || {
                format!(
                    "instance {t} {v}: {} inner problems for n = {}",
                    r.inner_subproblems,
                    inst.n()
                )
            })?;
            reports += 1;
        }
    }
    Ok(format!(
        "{reports} SYM reports with α = β and n inner problems"
    ))
}

/// Criterion 5: SYM's natural bound is at least ORG's on ≥ 80% of fresh
/// class 4/5/6 instances.
fn sym_dominates_org() -> Outcome {
    let mut wins = 0;
    let mut total = 0;
    let mut strict = 0;
    for (i, class) in [4u8, 5, 6].iter().cycle().take(20).enumerate() {
        let inst = generated(12, 20, 900_000 + i as u64, *class);
        let org = natural_lower_bound(&inst, NlbVariant::Nlb).unwrap().bound;
        let sym = natural_lower_bound(&inst.with_rep(symmetrize(&inst.rep)), NlbVariant::Nlb)
            .unwrap()
            .bound;
        total += 1;
        if sym >= org - 1e-7 {
            wins += 1;
        }
        if sym > org + 1e-7 {
            strict += 1;
        }
    }
    let detail = format!("SYM ≥ ORG on {wins}/{total} instances ({strict} strictly)");
    if wins * 10 >= total * 8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 6: Gershgorin and eigenvalue shifts make symmetrized class-4
/// matrices positive semidefinite.
fn psd_guarantee() -> Outcome {
    for trial in 0..100u64 {
        let n = 2 + (trial as usize % 29);
        let cfg = GeneratorConfig::new(3, n, QClass::new(4).unwrap()).with_seed(77_000 + trial);
        let q = qcop::qscp::generate_q(&cfg).unwrap();
        let sym = symmetrize(&Representation::original(q, LinearCost::ones(n)).unwrap());
        for policy in [ShiftPolicy::Gershgorin, ShiftPolicy::SmallestEigenvalue] {
            let cnx = convexify(&sym, policy).unwrap();
            check(is_psd(cnx.q(), 1e-8), || {
                format!("trial {trial} (n = {n}) {policy:?} not PSD")
            })?;
        }
    }
    Ok("100/100 trials PSD under both policies".into())
}

/// Criterion 7: Wilcoxon p-values against sign-pattern enumeration.
fn wilcoxon_correctness() -> Outcome {
    let mut rng = SplitMix64::new(0x57A7);
    for v in 0..200 {
        let len = 1 + rng.below(10) as usize;
        let d: Vec<f64> = (0..len)
            .map(|_| {
                let x = rng.range_i64(1, 3) as f64;
                if rng.next_u64() & 1 == 1 {
                    x
                } else {
                    -x
                }
            })
            .collect();
        let got = wilcoxon_differences(&d).unwrap().p_value;
        let want = wilcoxon_enumeration_p(&d);
        check(got == want, || {
            format!("vector {v} {d:?}: p = {got}, enumeration gives {want}")
        })?;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d: Vec<f64> = (0..15)
            .map(|_| {
                let x = 0.5 + rng.unit_f64() * 10.0;
                if rng.next_u64().is_multiple_of(3) {
                    -x
                } else {
                    x
                }
            })
            .collect();
        let ranks: Vec<f64> = signed_ranks(&d).iter().map(|(r, _)| *r).collect();
        let w: f64 = signed_ranks(&d)
            .iter()
            .filter(|(_, p)| *p)
            .map(|(r, _)| r)
            .sum();
        let exact = wilcoxon_enumeration_p(&d);
        check(exact_p_value(&ranks, w) == exact, || {
            "exact p disagrees at n = 15".into()
        })?;
        worst = worst.max((normal_p_value(&ranks, w) - exact).abs());
    }
    check(worst <= 0.03, || {
        format!("normal approximation off by {worst:.4} at n = 15")
    })?;
    Ok(format!(
        "200/200 exact p-values match; normal approximation within {worst:.4} at n = 15"
    ))
}

/// Criterion 8: LP values bound the integer optimum from below.
fn lp_soundness() -> Outcome {
    let mut rng = SplitMix64::new(0x1F00);
    let mut integral = 0;
    let mut gaps = 0;
    for t in 0..50 {
        let m = 1 + rng.below(12) as usize;
        let n = 2 + rng.below(15) as usize;
        let (sys, c) = if t % 5 == 0 {
            // Odd cycles with unit costs have half-integral LP optima.
            let k = 3 + 2 * (t / 5 % 6);
            let lists: Vec<Vec<usize>> = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
            (
                CoverSystem::from_row_lists(k, &lists).unwrap(),
                vec![1.0; k],
            )
        } else {
            let sys = random_cover(&mut rng, m, n);
            let c: Vec<f64> = (0..n).map(|_| rng.range_i64(-3, 12) as f64).collect();
            (sys, c)
        };
        let p = LpProblem::covering(&sys, c.clone());
        let s = solve_lp(&p);
        check(s.status == LpStatus::Optimal, || {
            format!("system {t}: status {}", s.status)
        })?;
        let x = s.x.as_slice();
        check(row_violation(&p, x) < 1e-7, || {
            format!("system {t}: row residual {}", row_violation(&p, x))
        })?;
        check(x.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)), || {
            format!("system {t}: bound violation")
        })?;
        let best = enumerate_feasible(&sys, 25)
            .unwrap()
            .iter()
            .map(|x| x.support().map(|j| c[j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        check(s.value <= best + 1e-7, || {
            format!("system {t}: LP {} above optimum {best}", s.value)
        })?;
        if s.value < best - 1e-7 {
            gaps += 1;
        }
        if x.iter().all(|v| v.min(1.0 - v).abs() < 1e-9) {
            integral += 1;
            check((s.value - best).abs() < 1e-7, || {
                format!("system {t}: integral LP {} ≠ {best}", s.value)
            })?;
        }
    }
    Ok(format!(
        "50 systems sound; {integral} integral vertices equal the optimum, {gaps} strict gaps"
    ))
}

/// Criterion 9: `gen` output is byte-identical across runs and matches golden
/// files produced by an independent implementation.
fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qcop");
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let cases = [
        (
            &["--m", "6", "--n", "8", "--qclass", "4"][..],
            "gen_m6_n8_s45_q4.qscp",
        ),
        (
            &["--m", "5", "--n", "7", "--seed", "123", "--qclass", "2"][..],
            "gen_m5_n7_s123_q2.qscp",
        ),
        (
            &["--m", "7", "--n", "9", "--seed", "9", "--qclass", "8"][..],
            "gen_m7_n9_s9_q8.qscp",
        ),
    ];
    for (args, golden) in cases {
        let run = || {
            let out = Command::new(bin)
                .arg("gen")
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            check(out.status.success(), || format!("gen {args:?} failed"))?;
            Ok::<_, String>(out.stdout)
        };
        let (a, b) = (run()?, run()?);
        check(a == b, || format!("gen {args:?} differs between runs"))?;
        let want = std::fs::read(data.join(golden)).map_err(|e| e.to_string())?;
        check(a == want, || format!("gen {args:?} differs from {golden}"))?;
    }
    Ok("3 configurations byte-identical across runs and against golden files".into())
}

fn synthesize_scp(rng: &mut SplitMix64, m: usize, n: usize) -> String {
    let sys = random_cover(rng, m, n);
    let c = LinearCost::new((0..n).map(|_| rng.range_i64(1, 100) as f64).collect()).unwrap();
    write_orlib(&sys, &c)
}

/// Criterion 10: OR-Library files load and round-trip through the native
/// format.
fn orlib_ingestion() -> Outcome {
    let mut rng = SplitMix64::new(0x0A11);
    let mut files: Vec<(String, String, Option<Dims>)> = vec![
        (
            "synthetic 50x500".into(),
            synthesize_scp(&mut rng, 50, 500),
            Some((50, 500)),
        ),
        (
            "synthetic 511x210".into(),
            synthesize_scp(&mut rng, 511, 210),
            Some((511, 210)),
        ),
        (
            "hand-written".into(),
            "2 3\n1 1 1\n2 1 2\n2 2 3\n".into(),
            Some((2, 3)),
        ),
    ];
    let mut supplied = 0;
    if let Ok(dir) = std::env::var("QCOP_ORLIB_DIR") {
        for (name, dims) in [("scpe1.txt", (50, 500)), ("scpclr10.txt", (511, 210))] {
            if let Ok(text) = std::fs::read_to_string(Path::new(&dir).join(name)) {
                files.push((name.into(), text, Some(dims)));
                supplied += 1;
            }
        }
    }
    for (name, text, dims) in &files {
        let (sys, c) = load_orlib(text).map_err(|e| format!("{name}: {e}"))?;
        if let Some((m, n)) = dims {
            check((sys.m(), sys.n()) == (*m, *n), || {
                format!("{name}: header {}x{}", sys.m(), sys.n())
            })?;
        }
        let n = sys.n();
        let inst = QscpInstance::new(sys, Representation::original(QMatrix::zeros(n), c).unwrap())
            .unwrap();
        let back = read_instance(&write_instance(&inst)).map_err(|e| format!("{name}: {e}"))?;
        check(back == inst, || {
            format!("{name}: native round trip lost data")
        })?;
        let again =
            load_orlib(&write_orlib(&back.system, back.rep.c())).map_err(|e| e.to_string())?;
        check(again.0 == inst.system && &again.1 == inst.rep.c(), || {
            format!("{name}: scp round trip")
        })?;
    }
    Ok(format!(
        "{} files round-trip losslessly ({supplied} user-supplied via QCOP_ORLIB_DIR)",
        files.len()
    ))
}

fn main() {
    let instances = thirty_instances();
    let mut optima = Vec::new();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    };
    report(1, "equivalence preservation", &mut equivalence_suite);
    report(2, "cross-representation optima", &mut || {
        optimal_value_equality(&instances, &mut optima)
    });
    report(3, "bound ordering", &mut || {
        if optima.len() != instances.len() {
            return Err("optima unavailable because criterion 2 stopped early".into());
        }
        bound_ordering(&instances, &optima)
    });
    report(4, "symmetric shortcut", &mut || {
        symmetric_shortcut(&instances)
    });
    report(5, "SYM versus ORG natural bound", &mut sym_dominates_org);
    report(6, "PSD guarantee", &mut psd_guarantee);
    report(7, "Wilcoxon correctness", &mut wilcoxon_correctness);
    report(8, "LP soundness", &mut lp_soundness);
    report(9, "determinism", &mut determinism);
    report(10, "OR-Library ingestion", &mut orlib_ingestion);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
