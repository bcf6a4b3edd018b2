use std::collections::BTreeMap;
use std::fmt::{self, Write};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, SolveChoice};
use crate::bounds::{natural_lower_bound, NlbVariant};
use crate::error::{Error, Result};
use crate::model::{QscpInstance, Tag};
use crate::qscp::{assemble_instance, format_number, GeneratorConfig};
use crate::solver::{branch_and_bound, brute_force_solve, SolveReport};
use crate::transforms::standard_representation;

/// Bounds within this distance of the best count as tied.
pub const TIE_TOL: f64 = 1e-7;

pub const CSV_SCHEMA: &str = "schema=1";

fn build(g: &GeneratorConfig, tag: &Tag, shift: f64) -> Result<QscpInstance> {
    let base = assemble_instance(g)?;
    let rep = standard_representation(&base.rep, tag, shift)?;
    Ok(base.with_rep(rep))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub instance: usize,
    pub config: GeneratorConfig,
    pub representation: Tag,
    pub variant: NlbVariant,
    pub value: Option<f64>,
    pub time_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrequencyCount {
    /// Instances where this representation alone attained the largest bound.
    pub strict: usize,
    /// Instances where it attained the largest bound, possibly with others.
    pub tied: usize,
}

/// Per class, representation and variant: how often each representation
/// gave the tightest bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrequencyTable {
    pub counts: BTreeMap<(u8, String, NlbVariant), FrequencyCount>,
    pub instances_per_class: BTreeMap<u8, usize>,
    pub representations: Vec<Tag>,
    pub variants: Vec<NlbVariant>,
}

impl FrequencyTable {
    pub fn get(&self, class: u8, tag: &Tag, variant: NlbVariant) -> FrequencyCount {
        self.counts
            .get(&(class, tag.to_string(), variant))
            .copied()
            .unwrap_or_default()
    }
}

impl fmt::Display for FrequencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for variant in &self.variants {
            write!(f, "{variant:<8} class  count")?;
            for tag in &self.representations {
                write!(f, " {:>9}", tag.to_string())?;
            }
            writeln!(f)?;
            for (&class, &count) in &self.instances_per_class {
                write!(f, "{:<8} {class:>5} {count:>6}", "")?;
                for tag in &self.representations {
                    let c = self.get(class, tag, *variant);
                    write!(f, " {:>9}", format!("{}/{}", c.strict, c.tied))?;
                }
                writeln!(f)?;
            }
        }
        write!(f, "(strict/tied counts of the tightest bound)")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingSummary {
    pub q_class: u8,
    pub representation: Tag,
    pub variant: NlbVariant,
    pub min_ms: f64,
    pub max_ms: f64,
    pub avg_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundExperiment {
    pub rows: Vec<BoundRow>,
    pub table: FrequencyTable,
    pub timing: Vec<TimingSummary>,
}

impl BoundExperiment {
    /// One row per instance, representation and variant, in that order.
    pub fn csv(&self) -> String {
        let mut out =
            format!("{CSV_SCHEMA}\ninstance,m,n,seed,qclass,repr,variant,value,time_ms,status\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:.3},{}",
                r.instance,
                r.config.m,
                r.config.n,
                r.config.seed,
                r.config.q_class,
                r.representation,
                r.variant,
                r.value.map(format_number).unwrap_or_default(),
                r.time_ms,
                r.error.as_deref().map_or("ok".to_string(), |e| format!(
                    "error: {}",
                    e.replace(',', ";")
                )),
            );
        }
        out
    }

    pub fn timing_csv(&self) -> String {
        let mut out = format!("{CSV_SCHEMA}\nqclass,repr,variant,min_ms,max_ms,avg_ms\n");
        for t in &self.timing {
            let _ = writeln!(
                out,
                "{},{},{},{:.3},{:.3},{:.3}",
                t.q_class, t.representation, t.variant, t.min_ms, t.max_ms, t.avg_ms
            );
        }
        out
    }
}

fn bound_rows(index: usize, g: &GeneratorConfig, cfg: &ExperimentConfig) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for tag in &cfg.representations {
        let inst = build(g, tag, cfg.shift);
        for &variant in &cfg.variants {
            let start = Instant::now();
            let result = inst
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|i| natural_lower_bound(i, variant));
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            let (value, error) = match result {
                Ok(r) => (Some(r.bound), None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(BoundRow {
                instance: index,
                config: g.clone(),
                representation: tag.clone(),
                variant,
                value,
                time_ms,
                error,
            });
        }
    }
    rows
}

/// Computes every configured bound variant for every instance and
/// representation, then tallies which representation was tightest.
/// Failures are recorded in their row and the run continues.
pub fn run_bound_experiment(cfg: &ExperimentConfig) -> Result<BoundExperiment> {
    cfg.validate()?;
    cfg.require_comparison()?;
    let per_instance: Vec<Vec<BoundRow>> = cfg
        .instances
        .par_iter()
        .enumerate()
        .map(|(i, g)| bound_rows(i, g, cfg))
        .collect();

    let mut table = FrequencyTable {
        representations: cfg.representations.clone(),
        variants: cfg.variants.clone(),
        ..Default::default()
    };
    for (g, rows) in cfg.instances.iter().zip(&per_instance) {
        let class = g.q_class.get();
        *table.instances_per_class.entry(class).or_default() += 1;
        for &variant in &cfg.variants {
            let values: Vec<(&Tag, f64)> = rows
                .iter()
                .filter(|r| r.variant == variant)
                .filter_map(|r| r.value.map(|v| (&r.representation, v)))
                .collect();
            let Some(best) = values.iter().map(|(_, v)| *v).reduce(f64::max) else {
                continue;
            };
            let winners: Vec<&Tag> = values
                .iter()
                .filter(|(_, v)| *v >= best - TIE_TOL)
                .map(|(t, _)| *t)
                .collect();
            for t in &winners {
                let c = table
                    .counts
                    .entry((class, t.to_string(), variant))
                    .or_default();
                c.tied += 1;
                if winners.len() == 1 {
                    c.strict += 1;
                }
            }
        }
    }

    let rows: Vec<BoundRow> = per_instance.into_iter().flatten().collect();
    let mut groups: BTreeMap<(u8, usize, NlbVariant), Vec<f64>> = BTreeMap::new();
    for r in &rows {
        let pos = cfg
            .representations
            .iter()
            .position(|t| *t == r.representation)
            .unwrap();
        groups
            .entry((r.config.q_class.get(), pos, r.variant))
            .or_default()
            .push(r.time_ms);
    }
    let timing = groups
        .into_iter()
        .map(|((q_class, pos, variant), t)| TimingSummary {
            q_class,
            representation: cfg.representations[pos].clone(),
            variant,
            min_ms: t.iter().copied().fold(f64::INFINITY, f64::min),
            max_ms: t.iter().copied().fold(0.0, f64::max),
            avg_ms: t.iter().sum::<f64>() / t.len() as f64,
        })
        .collect();
    Ok(BoundExperiment {
        rows,
        table,
        timing,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRow {
    pub instance: usize,
    pub config: GeneratorConfig,
    pub representation: Tag,
    pub report: SolveReport,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverExperiment {
    pub rows: Vec<SolveRow>,
}

impl SolverExperiment {
    pub fn csv(&self) -> String {
        let mut out = format!(
            "{CSV_SCHEMA}\ninstance,m,n,seed,qclass,repr,method,value,nodes,time_ms,proven\n"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:.3},{}",
                r.instance,
                r.config.m,
                r.config.n,
                r.config.seed,
                r.config.q_class,
                r.representation,
                r.report.method,
                format_number(r.report.optimal_value),
                r.report.nodes,
                r.time_ms,
                r.report.proven,
            );
        }
        out
    }
}

/// Solves every instance in every representation and checks that proven
/// optima agree across representations to within `1e-7`.
pub fn run_solver_experiment(cfg: &ExperimentConfig) -> Result<SolverExperiment> {
    cfg.validate()?;
    let per_instance: Vec<Result<Vec<SolveRow>>> = cfg
        .instances
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rows = Vec::new();
            for tag in &cfg.representations {
                let inst = build(g, tag, cfg.shift)?;
                let start = Instant::now();
                let report = match cfg.solver {
                    SolveChoice::Brute => brute_force_solve(&inst)?,
                    SolveChoice::BranchAndBound(kind) => {
                        branch_and_bound(&inst, kind, cfg.node_cap)?
                    }
                };
                rows.push(SolveRow {
                    instance: i,
                    config: g.clone(),
                    representation: tag.clone(),
                    report,
                    time_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
            let proven: Vec<&SolveRow> = rows.iter().filter(|r| r.report.proven).collect();
            if let Some(first) = proven.first() {
                for r in &proven[1..] {
                    if (r.report.optimal_value - first.report.optimal_value).abs() > 1e-7 {
                        return Err(Error::Experiment(format!(
                            "instance {i}: {} optimum {} differs from {} optimum {}",
                            r.representation,
                            r.report.optimal_value,
                            first.representation,
                            first.report.optimal_value
                        )));
                    }
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_instance {
        rows.extend(r?);
    }
    Ok(SolverExperiment { rows })
}
