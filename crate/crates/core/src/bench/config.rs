//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # one explicit instance per line: m n seed qclass (seed may be "default")
//! instance = 10 20 71 4
//! # or a sweep: `sweep.count` instances for each listed class
//! sweep.classes = 4,5,6
//! sweep.m = 10
//! sweep.n = 20
//! sweep.count = 20
//! sweep.seed = 1000
//! representations = ORG,SYM,CNX,CNV,UT,SYMI
//! variants = nlb,nlbr,nlbr1
//! M = 10000
//! method = bb
//! bound = nlb
//! node_cap = 1000000
//! csv = results.csv
//! ```
//!
//! Sweep instance `t` of class `q` uses seed `sweep.seed + 1000·q + t`, with
//! `sweep.seed` defaulting to `2n + 3m + 11`.

use std::path::{Path, PathBuf};

use crate::bounds::NlbVariant;
use crate::error::{Error, Result};
use crate::model::Tag;
use crate::qscp::{default_seed, GeneratorConfig, QClass};
use crate::solver::{BoundKind, DEFAULT_NODE_CAP};
use crate::transforms::EXPERIMENT_SHIFT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveChoice {
    Brute,
    BranchAndBound(BoundKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instances: Vec<GeneratorConfig>,
    pub representations: Vec<Tag>,
    pub variants: Vec<NlbVariant>,
    pub shift: f64,
    pub solver: SolveChoice,
    pub node_cap: usize,
    pub csv: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            representations: Tag::STANDARD.to_vec(),
            variants: NlbVariant::ALL.to_vec(),
            shift: EXPERIMENT_SHIFT,
            solver: SolveChoice::BranchAndBound(BoundKind::NlbBound),
            node_cap: DEFAULT_NODE_CAP,
            csv: None,
        }
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut sweep_classes: Vec<QClass> = Vec::new();
        let (mut sweep_m, mut sweep_n, mut sweep_count, mut sweep_seed) =
            (None, None, 1usize, None);
        let mut method = "bb".to_string();
        let mut bound = BoundKind::NlbBound;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected key = value, found '{body}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |msg: String| Error::Parse { line, msg };
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| bad(format!("{key}: invalid integer '{v}'")))
            };
            match key {
                "instance" => {
                    let t: Vec<&str> = value.split_whitespace().collect();
                    if t.len() != 4 {
                        return Err(bad("instance needs 'm n seed qclass'".into()));
                    }
                    let (m, n) = (int(t[0])? as usize, int(t[1])? as usize);
                    let class = QClass::new(int(t[3])? as u8).map_err(|e| bad(e.to_string()))?;
                    let seed = if t[2] == "default" {
                        default_seed(m, n)
                    } else {
                        int(t[2])?
                    };
                    let g = GeneratorConfig::new(m, n, class).with_seed(seed);
                    g.validate().map_err(|e| bad(e.to_string()))?;
                    cfg.instances.push(g);
                }
                "sweep.classes" => {
                    sweep_classes = list(value)
                        .map(|v| QClass::new(int(v)? as u8).map_err(|e| bad(e.to_string())))
                        .collect::<Result<_>>()?;
                }
                "sweep.m" => sweep_m = Some(int(value)? as usize),
                "sweep.n" => sweep_n = Some(int(value)? as usize),
                "sweep.count" => sweep_count = int(value)? as usize,
                "sweep.seed" => sweep_seed = Some(int(value)?),
                "representations" => cfg.representations = list(value).map(Tag::parse).collect(),
                "variants" => {
                    cfg.variants = list(value)
                        .map(|v| NlbVariant::parse(v).map_err(|e| bad(e.to_string())))
                        .collect::<Result<_>>()?
                }
                "M" => {
                    cfg.shift = value
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v >= 0.0)
                        .ok_or_else(|| bad(format!("M: invalid shift '{value}'")))?
                }
                "method" => method = value.to_ascii_lowercase(),
                "bound" => bound = BoundKind::parse(value).map_err(|e| bad(e.to_string()))?,
                "node_cap" => cfg.node_cap = int(value)? as usize,
                "csv" => cfg.csv = Some(PathBuf::from(value)),
                _ => return Err(bad(format!("unknown key '{key}'"))),
            }
        }

        if !sweep_classes.is_empty() {
            let (Some(m), Some(n)) = (sweep_m, sweep_n) else {
                return Err(Error::InvalidArgument(
                    "a sweep needs sweep.m and sweep.n".into(),
                ));
            };
            let base = sweep_seed.unwrap_or_else(|| default_seed(m, n));
            for class in sweep_classes {
                for t in 0..sweep_count {
                    let seed = base + 1000 * class.get() as u64 + t as u64;
                    let g = GeneratorConfig::new(m, n, class).with_seed(seed);
                    g.validate()?;
                    cfg.instances.push(g);
                }
            }
        }
        cfg.solver = match method.as_str() {
            "brute" => SolveChoice::Brute,
            "bb" => SolveChoice::BranchAndBound(bound),
            other => return Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(Error::InvalidArgument(
                "configuration lists no instances".into(),
            ));
        }
        if self.representations.is_empty() {
            return Err(Error::InvalidArgument(
                "configuration lists no representations".into(),
            ));
        }
        for (i, t) in self.representations.iter().enumerate() {
            if !Tag::STANDARD.contains(t) {
                return Err(Error::InvalidArgument(format!(
                    "{t} is not a standard representation"
                )));
            }
            if self.representations[..i].contains(t) {
                return Err(Error::InvalidArgument(format!(
                    "representation {t} listed twice"
                )));
            }
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidArgument(
                "configuration lists no bound variants".into(),
            ));
        }
        Ok(())
    }

    /// Comparison runs need at least two representations.
    pub fn require_comparison(&self) -> Result<()> {
        if self.representations.len() < 2 {
            return Err(Error::InvalidArgument(
                "comparison runs need at least two representations".into(),
            ));
        }
        Ok(())
    }
}
