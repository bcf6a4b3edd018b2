use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CoverSystem, LinearCost, QMatrix, QscpInstance, Representation};
use crate::rng::SplitMix64;

/// Mixed into the seed for the stream that draws `Q`, so that the cover
/// and the cost matrix come from independent streams.
pub const Q_STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// The eight classes of quadratic cost matrices.
///
/// | class | construction | default ranges |
/// |---|---|---|
/// | 1 | uniform integers | `[5, 10]` |
/// | 2 | `BBᵀ`, `B` integer `n × n` | `B ∈ [−5, 5]` |
/// | 3 | `BBᵀ`, `B` integer `n × n` | `B ∈ [5, 10]` |
/// | 4 | uniform integers | `[−5, 5]` |
/// | 5 | uniform integers | `[−5, 10]` |
/// | 6 | uniform integers | `[−10, 5]` |
/// | 7 | `a bᵀ` | `a ∈ [−10, 10]`, `b ∈ [−5, 5]` |
/// | 8 | `a₁b₁ᵀ + a₂b₂ᵀ` | `a ∈ [−10, 10]`, `b ∈ [−5, 5]` |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QClass(u8);

impl QClass {
    pub const ALL: [QClass; 8] = [
        QClass(1),
        QClass(2),
        QClass(3),
        QClass(4),
        QClass(5),
        QClass(6),
        QClass(7),
        QClass(8),
    ];

    pub fn new(class: u8) -> Result<Self> {
        if (1..=8).contains(&class) {
            Ok(QClass(class))
        } else {
            Err(Error::InvalidArgument(format!(
                "Q-class must be in 1..=8, got {class}"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn default_ranges(self) -> QRanges {
        let (primary, secondary) = match self.0 {
            1 => ((5, 10), (0, 0)),
            2 => ((-5, 5), (0, 0)),
            3 => ((5, 10), (0, 0)),
            4 => ((-5, 5), (0, 0)),
            5 => ((-5, 10), (0, 0)),
            6 => ((-10, 5), (0, 0)),
            _ => ((-10, 10), (-5, 5)),
        };
        QRanges { primary, secondary }
    }
}

impl fmt::Display for QClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Integer ranges of a class. `primary` bounds the entries (classes 1, 4, 5,
/// 6), the factor `B` (classes 2, 3) or the vectors `a` (classes 7, 8);
/// `secondary` bounds the vectors `b` of classes 7 and 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRanges {
    pub primary: (i64, i64),
    pub secondary: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub q_class: QClass,
    pub ranges: QRanges,
}

impl GeneratorConfig {
    /// Configuration with the default seed `2n + 3m + 11` and the class's
    /// default ranges.
    pub fn new(m: usize, n: usize, q_class: QClass) -> Self {
        Self {
            m,
            n,
            seed: default_seed(m, n),
            q_class,
            ranges: q_class.default_ranges(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ranges(mut self, ranges: QRanges) -> Self {
        self.ranges = ranges;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "n must be at least 2 so that ⌊n/2⌋ ≥ 1, got {}",
                self.n
            )));
        }
        for (lo, hi) in [self.ranges.primary, self.ranges.secondary] {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

pub fn default_seed(m: usize, n: usize) -> u64 {
    2 * n as u64 + 3 * m as u64 + 11
}

/// Random cover system: row `i` draws `k_i` uniformly from `[1, ⌊n/2⌋]` and
/// is covered by `k_i` distinct columns chosen by a partial Fisher-Yates
/// shuffle of `0..n`. Columns may end up empty.
pub fn generate_cover(cfg: &GeneratorConfig) -> Result<CoverSystem> {
    cfg.validate()?;
    let (m, n) = (cfg.m, cfg.n);
    let mut rng = SplitMix64::new(cfg.seed);
    let mut d = vec![0u8; m * n];
    for i in 0..m {
        let k = rng.range_i64(1, (n / 2) as i64) as usize;
        for j in rng.sample_distinct(n, k) {
            d[i * n + j] = 1;
        }
    }
    CoverSystem::new(m, n, d)
}

fn draw_vec(rng: &mut SplitMix64, n: usize, (lo, hi): (i64, i64)) -> Vec<f64> {
    (0..n).map(|_| rng.range_i64(lo, hi) as f64).collect()
}

/// Random cost matrix of the configured class, drawn from the stream seeded
/// with `seed ^ Q_STREAM_SALT`. Entries are drawn row-major; outer-product
/// classes draw `a` then `b` (then `a₂`, `b₂`).
pub fn generate_q(cfg: &GeneratorConfig) -> Result<QMatrix> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = SplitMix64::new(cfg.seed ^ Q_STREAM_SALT);
    let QRanges { primary, secondary } = cfg.ranges;
    let data: Vec<f64> = match cfg.q_class.get() {
        1 | 4 | 5 | 6 => draw_vec(&mut rng, n * n, primary),
        2 | 3 => {
            let b = draw_vec(&mut rng, n * n, primary);
            let mut q = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    q[i * n + j] = (0..n).map(|t| b[i * n + t] * b[j * n + t]).sum();
                }
            }
            q
        }
        7 => {
            let a = draw_vec(&mut rng, n, primary);
            let b = draw_vec(&mut rng, n, secondary);
            (0..n * n).map(|k| a[k / n] * b[k % n]).collect()
        }
        _ => {
            let a1 = draw_vec(&mut rng, n, primary);
            let b1 = draw_vec(&mut rng, n, secondary);
            let a2 = draw_vec(&mut rng, n, primary);
            let b2 = draw_vec(&mut rng, n, secondary);
            (0..n * n)
                .map(|k| a1[k / n] * b1[k % n] + a2[k / n] * b2[k % n])
                .collect()
        }
    };
    QMatrix::new(n, data)
}

/// Cover system, cost matrix and the all-ones linear cost, tagged `ORG`.
pub fn assemble_instance(cfg: &GeneratorConfig) -> Result<QscpInstance> {
    let system = generate_cover(cfg)?;
    let q = generate_q(cfg)?;
    let rep = Representation::original(q, LinearCost::ones(cfg.n))?;
    QscpInstance::new(system, rep)
}
