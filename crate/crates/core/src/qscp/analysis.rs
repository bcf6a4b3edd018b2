use std::fmt;

use crate::model::CoverSystem;

/// Row and column sum statistics of a cover system. A `minrow` of zero
/// means some element cannot be covered.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceAnalysis {
    pub m: usize,
    pub n: usize,
    pub minrow: usize,
    pub maxrow: usize,
    pub avgrow: f64,
    pub mincol: usize,
    pub maxcol: usize,
    pub avgcol: f64,
    /// Number of all-zero columns.
    pub empty_subsets: usize,
    /// Fraction of ones in `D`.
    pub density: f64,
}

pub fn analyze(sys: &CoverSystem) -> InstanceAnalysis {
    let (m, n) = (sys.m(), sys.n());
    let rows: Vec<usize> = (0..m).map(|i| sys.row_support(i).len()).collect();
    let cols: Vec<usize> = (0..n).map(|j| sys.column_sum(j)).collect();
    let total: usize = rows.iter().sum();
    let avg = |count: usize| {
        if count == 0 {
            0.0
        } else {
            total as f64 / count as f64
        }
    };
    InstanceAnalysis {
        m,
        n,
        minrow: rows.iter().copied().min().unwrap_or(0),
        maxrow: rows.iter().copied().max().unwrap_or(0),
        avgrow: avg(m),
        mincol: cols.iter().copied().min().unwrap_or(0),
        maxcol: cols.iter().copied().max().unwrap_or(0),
        avgcol: avg(n),
        empty_subsets: cols.iter().filter(|&&s| s == 0).count(),
        density: if m * n == 0 {
            0.0
        } else {
            total as f64 / (m * n) as f64
        },
    }
}

impl fmt::Display for InstanceAnalysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m {}", self.m)?;
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "minrow {}", self.minrow)?;
        writeln!(f, "maxrow {}", self.maxrow)?;
        writeln!(f, "avgrow {:.4}", self.avgrow)?;
        writeln!(f, "mincol {}", self.mincol)?;
        writeln!(f, "maxcol {}", self.maxcol)?;
        writeln!(f, "avgcol {:.4}", self.avgcol)?;
        writeln!(f, "empty_subsets {}", self.empty_subsets)?;
        write!(f, "density {:.4}", self.density)
    }
}
