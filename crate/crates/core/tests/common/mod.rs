#![allow(dead_code)]

use qcop::model::{CoverSystem, LinearCost, QMatrix, QscpInstance, Representation};
use qcop::qscp::{assemble_instance, GeneratorConfig, QClass};
use qcop::rng::SplitMix64;

pub fn generated(m: usize, n: usize, seed: u64, class: u8) -> QscpInstance {
    assemble_instance(&GeneratorConfig::new(m, n, QClass::new(class).unwrap()).with_seed(seed))
        .unwrap()
}

/// Random feasible cover system with every row covered by 1..=n/2+1 columns.
pub fn random_cover(rng: &mut SplitMix64, m: usize, n: usize) -> CoverSystem {
    let lists: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            let k = rng.range_i64(1, (n / 2 + 1).min(n) as i64) as usize;
            rng.sample_distinct(n, k)
        })
        .collect();
    CoverSystem::from_row_lists(n, &lists).unwrap()
}

pub fn random_instance(rng: &mut SplitMix64, m: usize, n: usize, lo: i64, hi: i64) -> QscpInstance {
    let sys = random_cover(rng, m, n);
    let q = QMatrix::new(
        n,
        (0..n * n).map(|_| rng.range_i64(lo, hi) as f64).collect(),
    )
    .unwrap();
    let c = LinearCost::new((0..n).map(|_| rng.range_i64(lo, hi) as f64).collect()).unwrap();
    QscpInstance::new(sys, Representation::original(q, c).unwrap()).unwrap()
}

/// Minimum of `c·x + xᵀQx` over all covers by plain enumeration of `{0,1}ⁿ`.
pub fn enumerate_min(inst: &QscpInstance) -> f64 {
    let n = inst.n();
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << n) {
        let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
        let covered = (0..inst.m()).all(|i| (0..n).any(|j| x[j] && inst.system.get(i, j) == 1));
        if !covered {
            continue;
        }
        let mut v = 0.0;
        for i in 0..n {
            if !x[i] {
                continue;
            }
            v += inst.rep.c().as_slice()[i];
            for j in 0..n {
                if x[j] {
                    v += inst.rep.q().get(i, j);
                }
            }
        }
        best = best.min(v);
    }
    best
}

/// Exact two-sided Wilcoxon p-value by listing all sign patterns.
pub fn wilcoxon_enumeration_p(d: &[f64]) -> f64 {
    let nz: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
    let n = nz.len();
    if n == 0 {
        return 1.0;
    }
    // Doubled average ranks by counting smaller and equal magnitudes.
    let ranks2: Vec<i64> = nz
        .iter()
        .map(|v| {
            let less = nz.iter().filter(|w| w.abs() < v.abs()).count() as i64;
            let equal = nz.iter().filter(|w| w.abs() == v.abs()).count() as i64;
            2 * less + equal + 1
        })
        .collect();
    let total: i64 = ranks2.iter().sum();
    let observed: i64 = (0..n).filter(|&i| nz[i] > 0.0).map(|i| ranks2[i]).sum();
    let dev = (2 * observed - total).abs();
    let mut extreme = 0u64;
    for signs in 0u64..(1 << n) {
        let w: i64 = (0..n)
            .filter(|&i| signs >> i & 1 == 1)
            .map(|i| ranks2[i])
            .sum();
        if (2 * w - total).abs() >= dev {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}
