//! Instance model: cost data, cover systems, points and objective evaluation.
//!
//! A quadratic combinatorial optimization problem minimizes
//! `f(Q, c, x) = c·x + xᵀQx` over a family of binary points. For the set
//! covering case the family is `{x ∈ {0,1}ⁿ : Dx ≥ 1}` and its continuous
//! relaxation replaces `x ∈ {0,1}ⁿ` by `0 ≤ x ≤ 1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tol;

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_magnitude(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| v.abs() > tol::MAX_MAGNITUDE) {
        Some(index) => Err(Error::MagnitudeExceeded {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Dense `n × n` quadratic cost matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    n: usize,
    data: Vec<f64>,
}

impl QMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values
    /// and magnitudes above `2^20`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::NotSquare { n, len: data.len() });
        }
        check_finite(&data)?;
        check_magnitude(&data)?;
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    /// Matrix produced by internal arithmetic; only finiteness is checked.
    pub(crate) fn derived(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::derived(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Exact entrywise symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric_within(0.0)
    }

    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Upper triangular with a zero diagonal.
    pub fn is_strictly_upper(&self) -> bool {
        (0..self.n).all(|i| (0..=i).all(|j| self.get(i, j) == 0.0))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.fract() == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Linear cost vector `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCost(Vec<f64>);

impl LinearCost {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        check_magnitude(&values)?;
        Ok(Self(values))
    }

    pub(crate) fn derived(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|v| v.fract() == 0.0)
    }
}

/// Provenance of a representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Org,
    Sym,
    Cnx,
    Cnv,
    Ut,
    Symi,
    Custom(String),
}

impl Tag {
    /// The six representations compared in the experiments.
    pub const STANDARD: [Tag; 6] = [Tag::Org, Tag::Sym, Tag::Cnx, Tag::Cnv, Tag::Ut, Tag::Symi];

    pub fn parse(s: &str) -> Tag {
        match s.to_ascii_uppercase().as_str() {
            "ORG" => Tag::Org,
            "SYM" => Tag::Sym,
            "CNX" => Tag::Cnx,
            "CNV" => Tag::Cnv,
            "UT" => Tag::Ut,
            "SYMI" => Tag::Symi,
            _ => Tag::Custom(s.to_string()),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Org => f.write_str("ORG"),
            Tag::Sym => f.write_str("SYM"),
            Tag::Cnx => f.write_str("CNX"),
            Tag::Cnv => f.write_str("CNV"),
            Tag::Ut => f.write_str("UT"),
            Tag::Symi => f.write_str("SYMI"),
            Tag::Custom(s) => f.write_str(s),
        }
    }
}

/// A pair `(Q, c)` together with its provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub(crate) q: QMatrix,
    pub(crate) c: LinearCost,
    pub(crate) tag: Tag,
}

impl Representation {
    /// Checks dimensions and the structural promise made by `tag`
    /// (`SYM` is symmetric, `UT` is strictly upper triangular).
    pub fn new(q: QMatrix, c: LinearCost, tag: Tag) -> Result<Self> {
        if q.n() != c.n() {
            return Err(Error::DimensionMismatch {
                expected: q.n(),
                found: c.n(),
            });
        }
        let ok = match tag {
            Tag::Sym => q.is_symmetric(),
            Tag::Ut => q.is_strictly_upper(),
            _ => true,
        };
        if !ok {
            return Err(Error::TagInvariant {
                tag: tag.to_string(),
            });
        }
        Ok(Self { q, c, tag })
    }

    pub fn original(q: QMatrix, c: LinearCost) -> Result<Self> {
        Self::new(q, c, Tag::Org)
    }

    pub(crate) fn derived(q: QMatrix, c: LinearCost, tag: Tag) -> Self {
        debug_assert_eq!(q.n(), c.n());
        Self { q, c, tag }
    }

    pub fn q(&self) -> &QMatrix {
        &self.q
    }

    pub fn c(&self) -> &LinearCost {
        &self.c
    }

    pub fn tag(&self) -> &Tag {
        &self.tag
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn with_tag(mut self, tag: Tag) -> Self {
        self.tag = tag;
        self
    }

    /// All entries of `Q` and `c` have zero fractional part.
    pub fn is_integral(&self) -> bool {
        self.q.is_integral() && self.c.is_integral()
    }
}

/// A point of `{0,1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPoint(Vec<u8>);

impl BinaryPoint {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(index) = bits.iter().position(|&b| b > 1) {
            return Err(Error::NotBinary {
                index,
                value: bits[index] as f64,
            });
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| b as u8).collect())
    }

    /// Point whose bit `j` is bit `j` of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self((0..n).map(|j| ((mask >> j) & 1) as u8).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, j: usize) -> bool {
        self.0[j] == 1
    }

    pub fn set(&mut self, j: usize, value: bool) {
        self.0[j] = value as u8;
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(j, _)| j)
    }

    pub fn cardinality(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn to_relaxed(&self) -> RelaxedPoint {
        RelaxedPoint(self.0.iter().map(|&b| b as f64).collect())
    }
}

impl fmt::Display for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A point of the box `[0,1]ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedPoint(Vec<f64>);

impl RelaxedPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || !(-tol::BOX..=1.0 + tol::BOX).contains(&value) {
                return Err(Error::OutOfRange { index, value });
            }
        }
        Ok(Self(values))
    }

    pub(crate) fn derived(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Returns the binary point if every coordinate is within `tol` of 0 or 1.
    pub fn to_binary(&self, tol: f64) -> Option<BinaryPoint> {
        let mut bits = Vec::with_capacity(self.0.len());
        for &v in &self.0 {
            if v.abs() <= tol {
                bits.push(0);
            } else if (v - 1.0).abs() <= tol {
                bits.push(1);
            } else {
                return None;
            }
        }
        Some(BinaryPoint(bits))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `f(Q, c, x) = c·x + xᵀQx` at a binary point.
pub fn evaluate(rep: &Representation, x: &BinaryPoint) -> Result<f64> {
    check_dim(rep.n(), x.n())?;
    Ok(evaluate_unchecked(rep, x.bits()))
}

pub(crate) fn evaluate_unchecked(rep: &Representation, bits: &[u8]) -> f64 {
    let support: Vec<usize> = (0..bits.len()).filter(|&j| bits[j] == 1).collect();
    let c = rep.c.as_slice();
    let mut total = 0.0;
    for &i in &support {
        total += c[i];
        let row = rep.q.row(i);
        for &j in &support {
            total += row[j];
        }
    }
    total
}

/// The same bilinear form on the relaxed box, without rounding `x`.
pub fn evaluate_relaxed(rep: &Representation, x: &RelaxedPoint) -> Result<f64> {
    check_dim(rep.n(), x.n())?;
    for (index, &value) in x.as_slice().iter().enumerate() {
        if !value.is_finite() || !(-tol::BOX..=1.0 + tol::BOX).contains(&value) {
            return Err(Error::OutOfRange { index, value });
        }
    }
    let xs = x.as_slice();
    let c = rep.c.as_slice();
    let mut total = 0.0;
    for i in 0..xs.len() {
        total += c[i] * xs[i];
        if xs[i] == 0.0 {
            continue;
        }
        let row = rep.q.row(i);
        let mut inner = 0.0;
        for j in 0..xs.len() {
            inner += row[j] * xs[j];
        }
        total += xs[i] * inner;
    }
    Ok(total)
}

/// The 0/1 incidence matrix `D` of a covering family `Dx ≥ 1`.
///
/// Rows are elements, columns are subsets. Columns may be empty; an empty
/// row makes the system infeasible, which is recorded rather than repaired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSystem {
    m: usize,
    n: usize,
    d: Vec<u8>,
    rows: Vec<Vec<usize>>,
    first_empty_row: Option<usize>,
}

impl CoverSystem {
    pub fn new(m: usize, n: usize, d: Vec<u8>) -> Result<Self> {
        if d.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: m * n,
                found: d.len(),
            });
        }
        if let Some(index) = d.iter().position(|&v| v > 1) {
            return Err(Error::NotBinary {
                index,
                value: d[index] as f64,
            });
        }
        let rows: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..n).filter(|&j| d[i * n + j] == 1).collect())
            .collect();
        let first_empty_row = rows.iter().position(|r| r.is_empty());
        Ok(Self {
            m,
            n,
            d,
            rows,
            first_empty_row,
        })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let mut d = Vec::with_capacity(m * n);
        for r in rows {
            check_dim(n, r.len())?;
            d.extend_from_slice(r);
        }
        Self::new(m, n, d)
    }

    /// Builds the system from the covering column lists of each row.
    pub fn from_row_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let m = lists.len();
        let mut d = vec![0u8; m * n];
        for (i, list) in lists.iter().enumerate() {
            for &j in list {
                if j >= n {
                    return Err(Error::InvalidArgument(format!(
                        "row {i} references column {j} but n = {n}"
                    )));
                }
                d[i * n + j] = 1;
            }
        }
        Self::new(m, n, d)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.d[i * self.n + j]
    }

    /// Columns covering row `i`.
    pub fn row_support(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn column_sum(&self, j: usize) -> usize {
        (0..self.m).map(|i| self.get(i, j) as usize).sum()
    }

    /// True unless some row has no covering column.
    pub fn is_satisfiable(&self) -> bool {
        self.first_empty_row.is_none()
    }

    pub fn first_empty_row(&self) -> Option<usize> {
        self.first_empty_row
    }

    pub fn contains_bits(&self, bits: &[u8]) -> bool {
        self.rows.iter().all(|r| r.iter().any(|&j| bits[j] == 1))
    }

    /// Row masks for `n ≤ 64`.
    pub(crate) fn row_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.rows
            .iter()
            .map(|r| r.iter().fold(0u64, |m, &j| m | (1 << j)))
            .collect()
    }
}

/// True iff every row of `D` is covered by `x`.
pub fn is_feasible(sys: &CoverSystem, x: &BinaryPoint) -> Result<bool> {
    check_dim(sys.n(), x.n())?;
    Ok(sys.contains_bits(x.bits()))
}

/// All feasible binary points of `sys`, ordered by the bit string
/// `x₁x₂…xₙ` read lexicographically. `max_dim` caps `n`.
pub fn enumerate_feasible(sys: &CoverSystem, max_dim: usize) -> Result<Vec<BinaryPoint>> {
    let mut out = Vec::new();
    for_each_feasible_mask(sys, max_dim, |mask| {
        out.push(BinaryPoint::from_mask(sys.n(), mask))
    })?;
    out.sort();
    Ok(out)
}

/// Calls `visit` with the bit mask of every feasible point.
pub(crate) fn for_each_feasible_mask(
    sys: &CoverSystem,
    max_dim: usize,
    mut visit: impl FnMut(u64),
) -> Result<()> {
    let n = sys.n();
    let cap = max_dim.min(63);
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    if !sys.is_satisfiable() {
        return Ok(());
    }
    let masks = sys.row_masks();
    for x in 0u64..(1u64 << n) {
        if masks.iter().all(|&r| r & x != 0) {
            visit(x);
        }
    }
    Ok(())
}

/// A family of binary points over which equivalence is checked.
pub trait FeasibleFamily: Sync {
    fn dim(&self) -> usize;

    fn contains(&self, bits: &[u8]) -> bool;

    /// Every member, for `dim() ≤ max_dim`.
    fn enumerate(&self, max_dim: usize) -> Result<Vec<BinaryPoint>>;

    /// Pseudo-random members; may contain repeats.
    fn sample(&self, rng: &mut SplitMix64, count: usize) -> Vec<BinaryPoint>;
}

impl FeasibleFamily for CoverSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, bits: &[u8]) -> bool {
        self.contains_bits(bits)
    }

    fn enumerate(&self, max_dim: usize) -> Result<Vec<BinaryPoint>> {
        enumerate_feasible(self, max_dim)
    }

    /// Greedy randomization: a random subset is repaired by adding random
    /// covering columns for every uncovered row.
    fn sample(&self, rng: &mut SplitMix64, count: usize) -> Vec<BinaryPoint> {
        if !self.is_satisfiable() {
            return Vec::new();
        }
        (0..count)
            .map(|_| {
                let mut bits: Vec<u8> = (0..self.n).map(|_| (rng.next_u64() & 1) as u8).collect();
                for row in &self.rows {
                    if !row.iter().any(|&j| bits[j] == 1) {
                        let pick = row[rng.below(row.len() as u64) as usize];
                        bits[pick] = 1;
                    }
                }
                BinaryPoint(bits)
            })
            .collect()
    }
}

/// All binary points of a fixed cardinality `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedCardinality {
    pub n: usize,
    pub k: usize,
}

impl FeasibleFamily for FixedCardinality {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, bits: &[u8]) -> bool {
        bits.iter().filter(|&&b| b == 1).count() == self.k
    }

    fn enumerate(&self, max_dim: usize) -> Result<Vec<BinaryPoint>> {
        let cap = max_dim.min(63);
        if self.n > cap {
            return Err(Error::EnumerationCap { n: self.n, cap });
        }
        let mut out: Vec<BinaryPoint> = (0u64..(1u64 << self.n))
            .filter(|x| x.count_ones() as usize == self.k)
            .map(|x| BinaryPoint::from_mask(self.n, x))
            .collect();
        out.sort();
        Ok(out)
    }

    fn sample(&self, rng: &mut SplitMix64, count: usize) -> Vec<BinaryPoint> {
        (0..count)
            .map(|_| {
                let mut bits = vec![0u8; self.n];
                for j in rng.sample_distinct(self.n, self.k.min(self.n)) {
                    bits[j] = 1;
                }
                BinaryPoint(bits)
            })
            .collect()
    }
}

/// Every point of `{0,1}ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unconstrained {
    pub n: usize,
}

impl FeasibleFamily for Unconstrained {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, _bits: &[u8]) -> bool {
        true
    }

    fn enumerate(&self, max_dim: usize) -> Result<Vec<BinaryPoint>> {
        let cap = max_dim.min(63);
        if self.n > cap {
            return Err(Error::EnumerationCap { n: self.n, cap });
        }
        let mut out: Vec<BinaryPoint> = (0u64..(1u64 << self.n))
            .map(|x| BinaryPoint::from_mask(self.n, x))
            .collect();
        out.sort();
        Ok(out)
    }

    fn sample(&self, rng: &mut SplitMix64, count: usize) -> Vec<BinaryPoint> {
        (0..count)
            .map(|_| BinaryPoint((0..self.n).map(|_| (rng.next_u64() & 1) as u8).collect()))
            .collect()
    }
}

/// A cover system paired with a representation: the unit of bounding and
/// solving.
#[derive(Debug, Clone, PartialEq)]
pub struct QscpInstance {
    pub system: CoverSystem,
    pub rep: Representation,
}

impl QscpInstance {
    pub fn new(system: CoverSystem, rep: Representation) -> Result<Self> {
        check_dim(system.n(), rep.n())?;
        Ok(Self { system, rep })
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    /// Same cover system, different representation.
    pub fn with_rep(&self, rep: Representation) -> Self {
        assert_eq!(rep.n(), self.n());
        Self {
            system: self.system.clone(),
            rep,
        }
    }
}
