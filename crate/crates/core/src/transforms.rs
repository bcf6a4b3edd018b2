//! Equivalence-preserving transformations of `(Q, c)`.
//!
//! Two representations are equivalent over a family `F` when
//! `f(Q, c, x) = f(Q', c', x)` for every `x ∈ F`. Every map here preserves
//! that identity; most of them rely on two facts about binary points:
//! `xᵀYx = 0` for skew-symmetric `Y`, and `x_i² = x_i`, so a diagonal can be
//! traded against the linear term.
//!
//! | transform | `Q'` | `c'` |
//! |---|---|---|
//! | [`symmetrize`] | `½(Q + Qᵀ)` | `c` |
//! | [`perturb`] | `Q + Y + U` | `c − diag(U)` |
//! | [`diagonal_annihilate`] | `Q − Diag(Q)` | `c + diag(Q)` |
//! | [`linear_annihilate`] | `Q + Diag(c)` | `0` |
//! | [`convexify`] | `Q + M·I` | `c − M·1` |
//! | [`concavify`] | `Q − M·I` | `c + M·1` |
//! | [`triangularize`] | strict upper part of `Q + Qᵀ` | `c + diag(Q)` |

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    evaluate_unchecked, BinaryPoint, FeasibleFamily, LinearCost, QMatrix, Representation, Tag,
};
use crate::rng::SplitMix64;
use crate::tol;

/// Sample size for equivalence and property checks above the enumeration cap.
pub const SAMPLE_POINTS: usize = 10_000;
const SAMPLE_SEED: u64 = 0x0005_EED0_FEC0;

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A skew-symmetric matrix `Y` (`y_ij = −y_ji`, zero diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct SkewSymmetric(QMatrix);

impl SkewSymmetric {
    pub fn new(y: QMatrix) -> Result<Self> {
        let n = y.n();
        for i in 0..n {
            for j in i..n {
                if (y.get(i, j) + y.get(j, i)).abs() > tol::STRUCTURE {
                    return Err(Error::NotSkewSymmetric { i, j });
                }
            }
        }
        Ok(Self(y))
    }

    pub fn zeros(n: usize) -> Self {
        Self(QMatrix::zeros(n))
    }

    /// `½(Q − Qᵀ)`.
    pub fn skew_part(q: &QMatrix) -> Self {
        Self(QMatrix::from_fn(q.n(), |i, j| {
            0.5 * (q.get(i, j) - q.get(j, i))
        }))
    }

    /// Builds `Y` from its strict upper triangle, given row by row.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = upper(i, j);
                data[i * n + j] = v;
                data[j * n + i] = -v;
            }
        }
        Self(QMatrix::derived(n, data))
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }
}

/// Diagonal of a diagonal matrix `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPerturbation(pub Vec<f64>);

impl DiagonalPerturbation {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// A matrix `A` whose quadratic form equals `d·x` on the feasible family.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizableWitness {
    a: QMatrix,
    d: Vec<f64>,
}

impl DiagonalizableWitness {
    /// Accepts `A` when `A − Diag(d)` is skew-symmetric, which makes `A`
    /// diagonalizable over every binary family.
    pub fn structural(a: QMatrix, d: Vec<f64>) -> Result<Self> {
        same_dim(a.n(), d.len())?;
        let n = a.n();
        for i in 0..n {
            if (a.get(i, i) - d[i]).abs() > tol::STRUCTURE {
                return Err(Error::InvalidWitness(format!(
                    "diagonal entry {i} is {} but the diagonalization says {}",
                    a.get(i, i),
                    d[i]
                )));
            }
        }
        SkewSymmetric::new(QMatrix::from_fn(
            n,
            |i, j| if i == j { 0.0 } else { a.get(i, j) },
        ))
        .map_err(|e| Error::InvalidWitness(e.to_string()))?;
        Ok(Self { a, d })
    }

    /// Accepts `A` when `xᵀAx = d·x` holds on `family` (exhaustively up to
    /// the enumeration cap, on samples above it).
    pub fn verified<F: FeasibleFamily + ?Sized>(
        a: QMatrix,
        d: Vec<f64>,
        family: &F,
    ) -> Result<Self> {
        same_dim(a.n(), d.len())?;
        same_dim(a.n(), family.dim())?;
        let rep = Representation::derived(
            a.clone(),
            LinearCost::zeros(a.n()),
            Tag::Custom("witness".into()),
        );
        let (points, _) = family_points(family)?;
        for x in points {
            let lhs = evaluate_unchecked(&rep, x.bits());
            let rhs: f64 = x.support().map(|j| d[j]).sum();
            if (lhs - rhs).abs() > tol::EQUIVALENCE {
                return Err(Error::InvalidWitness(format!(
                    "xᵀAx = {lhs} but d·x = {rhs} at feasible point {x}"
                )));
            }
        }
        Ok(Self { a, d })
    }

    pub fn a(&self) -> &QMatrix {
        &self.a
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }
}

/// `Q = S + Y` with `S` a weak-sum matrix in symmetric normal form
/// (`s_ij = g_i + g_j` off the diagonal) and `Y` skew-symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSumDecomposition {
    pub g: Vec<f64>,
    pub y: SkewSymmetric,
    /// Diagonalization for cardinality `k`: `d_i = 2(k − 1)g_i + q_ii`.
    pub diagonal: Vec<f64>,
    pub k: usize,
}

/// A cost vector `a` with `a·x = b` on every feasible point, and the
/// multipliers `α` used to build `G = ½(αᵀa + aᵀα)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CvpVector {
    a: Vec<f64>,
    b: f64,
    alpha: Vec<f64>,
}

impl CvpVector {
    /// Verifies the constant value property against `family`.
    pub fn new<F: FeasibleFamily + ?Sized>(
        a: Vec<f64>,
        b: f64,
        alpha: Vec<f64>,
        family: &F,
    ) -> Result<Self> {
        same_dim(a.len(), alpha.len())?;
        same_dim(family.dim(), a.len())?;
        let (points, _) = family_points(family)?;
        for x in points {
            let value: f64 = x.support().map(|j| a[j]).sum();
            if (value - b).abs() > tol::EQUIVALENCE {
                return Err(Error::CvpViolation {
                    point: x.to_string(),
                    value,
                    expected: b,
                });
            }
        }
        Ok(Self { a, b, alpha })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `G = ½(αᵀa + aᵀα)`, symmetric by construction.
    pub fn g_matrix(&self) -> QMatrix {
        let (a, al) = (&self.a, &self.alpha);
        QMatrix::from_fn(a.len(), |i, j| 0.5 * (al[i] * a[j] + al[j] * a[i]))
    }
}

/// How the diagonal shift `M` of [`convexify`] is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftPolicy {
    Fixed(f64),
    /// `max_i (Σ_{j≠i} |s_ij| − s_ii)` on the symmetric part, clamped at 0.
    Gershgorin,
    /// Negative of the smallest eigenvalue, clamped at 0. Symmetric input only.
    SmallestEigenvalue,
}

/// The shift used in the experiments.
pub const EXPERIMENT_SHIFT: f64 = 10_000.0;

impl Default for ShiftPolicy {
    fn default() -> Self {
        ShiftPolicy::Fixed(EXPERIMENT_SHIFT)
    }
}

fn shifted(rep: &Representation, m: f64, tag: Tag) -> Representation {
    let n = rep.n();
    let q = QMatrix::from_fn(n, |i, j| rep.q.get(i, j) + if i == j { m } else { 0.0 });
    let c = LinearCost::derived(rep.c.as_slice().iter().map(|v| v - m).collect());
    Representation::derived(q, c, tag)
}

/// `(Qᵀ, c)`.
pub fn transpose_repr(rep: &Representation) -> Representation {
    Representation::derived(
        rep.q.transpose(),
        rep.c.clone(),
        Tag::Custom("transpose".into()),
    )
}

/// `(Σ αᵢQⁱ / Σαᵢ, Σ αᵢcⁱ / Σαᵢ)`.
pub fn convex_combine(reps: &[Representation], weights: &[f64]) -> Result<Representation> {
    let first = reps.first().ok_or(Error::Empty("representation list"))?;
    same_dim(reps.len(), weights.len())?;
    let n = first.n();
    for r in reps {
        same_dim(n, r.n())?;
    }
    let sum: f64 = weights.iter().sum();
    if sum.abs() < tol::WEIGHT_SUM {
        return Err(Error::ZeroWeightSum { sum });
    }
    let mut q = vec![0.0; n * n];
    let mut c = vec![0.0; n];
    for (r, &w) in reps.iter().zip(weights) {
        for (acc, v) in q.iter_mut().zip(r.q.as_slice()) {
            *acc += w * v;
        }
        for (acc, v) in c.iter_mut().zip(r.c.as_slice()) {
            *acc += w * v;
        }
    }
    q.iter_mut().for_each(|v| *v /= sum);
    c.iter_mut().for_each(|v| *v /= sum);
    Ok(Representation::derived(
        QMatrix::derived(n, q),
        LinearCost::derived(c),
        Tag::Custom("combination".into()),
    ))
}

/// `(½(Q + Qᵀ), c)`. The result equals its transpose exactly.
pub fn symmetrize(rep: &Representation) -> Representation {
    let q = QMatrix::from_fn(rep.n(), |i, j| 0.5 * (rep.q.get(i, j) + rep.q.get(j, i)));
    Representation::derived(q, rep.c.clone(), Tag::Sym)
}

/// `(Q + Y + U, c − diag(U))`.
pub fn perturb(
    rep: &Representation,
    y: &SkewSymmetric,
    u: &DiagonalPerturbation,
) -> Result<Representation> {
    let n = rep.n();
    same_dim(n, y.n())?;
    same_dim(n, u.n())?;
    let q = QMatrix::from_fn(n, |i, j| {
        rep.q.get(i, j) + y.0.get(i, j) + if i == j { u.0[i] } else { 0.0 }
    });
    let c = LinearCost::derived(
        rep.c
            .as_slice()
            .iter()
            .zip(&u.0)
            .map(|(c, u)| c - u)
            .collect(),
    );
    Ok(Representation::derived(q, c, Tag::Custom("perturb".into())))
}

/// Moves the diagonal of `Q` into `c`.
pub fn diagonal_annihilate(rep: &Representation) -> Representation {
    let n = rep.n();
    let q = QMatrix::from_fn(n, |i, j| if i == j { 0.0 } else { rep.q.get(i, j) });
    let c = LinearCost::derived(
        (0..n)
            .map(|i| rep.c.as_slice()[i] + rep.q.get(i, i))
            .collect(),
    );
    Representation::derived(q, c, Tag::Custom("dannil".into()))
}

/// Moves `c` onto the diagonal of `Q`.
pub fn linear_annihilate(rep: &Representation) -> Representation {
    let n = rep.n();
    let c = rep.c.as_slice();
    let q = QMatrix::from_fn(n, |i, j| rep.q.get(i, j) + if i == j { c[i] } else { 0.0 });
    Representation::derived(q, LinearCost::zeros(n), Tag::Custom("lannil".into()))
}

/// Resolves a [`ShiftPolicy`] to the shift `M` for `rep`.
pub fn shift_for(rep: &Representation, policy: ShiftPolicy) -> Result<f64> {
    match policy {
        ShiftPolicy::Fixed(m) if m >= 0.0 && m.is_finite() => Ok(m),
        ShiftPolicy::Fixed(m) => Err(Error::InvalidArgument(format!(
            "convexification shift must be a non-negative number, got {m}"
        ))),
        ShiftPolicy::Gershgorin => {
            let q = &rep.q;
            let n = q.n();
            let mut m = 0.0f64;
            for i in 0..n {
                let mut radius = 0.0;
                for j in 0..n {
                    if j != i {
                        radius += (0.5 * (q.get(i, j) + q.get(j, i))).abs();
                    }
                }
                m = m.max(radius - q.get(i, i));
            }
            Ok(m)
        }
        ShiftPolicy::SmallestEigenvalue => {
            if !rep.q.is_symmetric_within(tol::STRUCTURE) {
                return Err(Error::NotSymmetric);
            }
            Ok((-linalg::smallest_eigenvalue(&rep.q)).max(0.0))
        }
    }
}

/// `(Q + M·I, c − M·1)`.
pub fn convexify(rep: &Representation, policy: ShiftPolicy) -> Result<Representation> {
    let m = shift_for(rep, policy)?;
    Ok(shifted(rep, m, Tag::Cnx))
}

/// `(Q − M·I, c + M·1)`.
pub fn concavify(rep: &Representation, m: f64) -> Result<Representation> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "concavification shift must be a non-negative number, got {m}"
        )));
    }
    Ok(shifted(rep, -m, Tag::Cnv))
}

/// Strict upper-triangular `Q'` with `q'_ij = q_ij + q_ji` for `i < j`;
/// the diagonal moves into `c`.
pub fn triangularize(rep: &Representation) -> Representation {
    let n = rep.n();
    let q = QMatrix::from_fn(n, |i, j| {
        if i < j {
            rep.q.get(i, j) + rep.q.get(j, i)
        } else {
            0.0
        }
    });
    let c = LinearCost::derived(
        (0..n)
            .map(|i| rep.c.as_slice()[i] + rep.q.get(i, i))
            .collect(),
    );
    Representation::derived(q, c, Tag::Ut)
}

/// Symmetrization followed by convexification.
pub fn sym_convexify(rep: &Representation, policy: ShiftPolicy) -> Result<Representation> {
    Ok(convexify(&symmetrize(rep), policy)?.with_tag(Tag::Symi))
}

/// Builds one of the six standard representations from `rep`.
pub fn standard_representation(rep: &Representation, tag: &Tag, m: f64) -> Result<Representation> {
    Ok(match tag {
        Tag::Org => rep.clone().with_tag(Tag::Org),
        Tag::Sym => symmetrize(rep),
        Tag::Cnx => convexify(rep, ShiftPolicy::Fixed(m))?,
        Tag::Cnv => concavify(rep, m)?,
        Tag::Ut => triangularize(rep),
        Tag::Symi => sym_convexify(rep, ShiftPolicy::Fixed(m))?,
        Tag::Custom(s) => {
            return Err(Error::InvalidArgument(format!(
                "{s} is not a standard representation"
            )))
        }
    })
}

/// Diagonalizability over every family: `Q − Diag(Q)` must be
/// skew-symmetric, and then `d = diag(Q)`.
pub fn check_diagonalizable(q: &QMatrix) -> Option<DiagonalizableWitness> {
    DiagonalizableWitness::structural(q.clone(), q.diagonal()).ok()
}

/// Diagonalizability over fixed-cardinality families: the symmetric part
/// must be a weak-sum matrix. Generators are recovered from the first three
/// indices and then checked against every off-diagonal pair.
pub fn check_diagonalizable_cc(q: &QMatrix, k: usize) -> Result<Option<WeakSumDecomposition>> {
    let n = q.n();
    if n < 3 {
        return Err(Error::Underdetermined { n });
    }
    if k == 0 {
        return Err(Error::InvalidArgument(
            "cardinality must be at least 1".into(),
        ));
    }
    let s = |i: usize, j: usize| 0.5 * (q.get(i, j) + q.get(j, i));
    let g: Vec<f64> = (0..n)
        .map(|i| {
            let mut others = (0..3).filter(|&t| t != i);
            let j = others.next().unwrap();
            let l = others.next().unwrap();
            0.5 * (s(i, j) + s(i, l) - s(j, l))
        })
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            if (s(i, j) - g[i] - g[j]).abs() > tol::DERIVED {
                return Ok(None);
            }
        }
    }
    let diagonal = (0..n)
        .map(|i| 2.0 * (k as f64 - 1.0) * g[i] + q.get(i, i))
        .collect();
    Ok(Some(WeakSumDecomposition {
        g,
        y: SkewSymmetric::skew_part(q),
        diagonal,
        k,
    }))
}

/// `(Q + Σ αᵢAⁱ, c − Σ αᵢ dⁱ)`.
pub fn perturb_by_diagonalizable(
    rep: &Representation,
    witnesses: &[DiagonalizableWitness],
    scalars: &[f64],
) -> Result<Representation> {
    same_dim(witnesses.len(), scalars.len())?;
    let n = rep.n();
    let mut q = rep.q.as_slice().to_vec();
    let mut c = rep.c.as_slice().to_vec();
    for (w, &s) in witnesses.iter().zip(scalars) {
        same_dim(n, w.a.n())?;
        for (acc, v) in q.iter_mut().zip(w.a.as_slice()) {
            *acc += s * v;
        }
        for (acc, v) in c.iter_mut().zip(&w.d) {
            *acc -= s * v;
        }
    }
    Ok(Representation::derived(
        QMatrix::derived(n, q),
        LinearCost::derived(c),
        Tag::Custom("diagonalizable".into()),
    ))
}

/// Perturbation valid when every feasible point has cardinality `k`:
/// `Q' = Q + Y + U + P` with `p_ij = g_i + g_j` off the diagonal and zero
/// on it, `c' = c − diag(U) − 2(k − 1)g`.
pub fn cc_perturb(
    rep: &Representation,
    k: usize,
    y: &SkewSymmetric,
    u: &DiagonalPerturbation,
    g: &[f64],
) -> Result<Representation> {
    let n = rep.n();
    same_dim(n, g.len())?;
    let base = perturb(rep, y, u)?;
    let q = QMatrix::from_fn(n, |i, j| {
        base.q.get(i, j) + if i == j { 0.0 } else { g[i] + g[j] }
    });
    let factor = k as f64 - 1.0;
    let c = LinearCost::derived(
        base.c
            .as_slice()
            .iter()
            .zip(g)
            .map(|(c, g)| c - factor * 2.0 * g)
            .collect(),
    );
    Ok(Representation::derived(
        q,
        c,
        Tag::Custom("cc-perturb".into()),
    ))
}

/// `(Q + D + Σ Gⁱ, c − Σ bᵢαⁱ − diag(D))` for verified CVP vectors.
pub fn cvp_reformulate(
    rep: &Representation,
    vectors: &[CvpVector],
    d: &DiagonalPerturbation,
) -> Result<Representation> {
    let n = rep.n();
    same_dim(n, d.n())?;
    let mut q = rep.q.as_slice().to_vec();
    let mut c: Vec<f64> = rep
        .c
        .as_slice()
        .iter()
        .zip(&d.0)
        .map(|(c, d)| c - d)
        .collect();
    for i in 0..n {
        q[i * n + i] += d.0[i];
    }
    for v in vectors {
        same_dim(n, v.a.len())?;
        let g = v.g_matrix();
        for (acc, x) in q.iter_mut().zip(g.as_slice()) {
            *acc += x;
        }
        for (acc, a) in c.iter_mut().zip(&v.alpha) {
            *acc -= v.b * a;
        }
    }
    Ok(Representation::derived(
        QMatrix::derived(n, q),
        LinearCost::derived(c),
        Tag::Custom("cvp".into()),
    ))
}

/// Outcome of [`verify_equivalence`].
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub points_checked: usize,
    pub exhaustive: bool,
    /// First feasible point where the objectives differ, with both values.
    pub counterexample: Option<(BinaryPoint, f64, f64)>,
}

pub(crate) fn family_points<F: FeasibleFamily + ?Sized>(
    family: &F,
) -> Result<(Vec<BinaryPoint>, bool)> {
    if family.dim() <= tol::ENUMERATION_CAP {
        Ok((family.enumerate(tol::ENUMERATION_CAP)?, true))
    } else {
        let mut rng = SplitMix64::new(SAMPLE_SEED);
        Ok((family.sample(&mut rng, SAMPLE_POINTS), false))
    }
}

/// Compares objectives on every feasible point (or on 10⁴ sampled points
/// above the enumeration cap) with tolerance `1e-7`.
pub fn verify_equivalence<F: FeasibleFamily + ?Sized>(
    r1: &Representation,
    r2: &Representation,
    family: &F,
) -> Result<EquivalenceReport> {
    verify_equivalence_within(r1, r2, family, tol::EQUIVALENCE)
}

pub fn verify_equivalence_within<F: FeasibleFamily + ?Sized>(
    r1: &Representation,
    r2: &Representation,
    family: &F,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    same_dim(r1.n(), r2.n())?;
    same_dim(r1.n(), family.dim())?;
    let (points, exhaustive) = family_points(family)?;
    let points_checked = points.len();
    for x in points {
        let a = evaluate_unchecked(r1, x.bits());
        let b = evaluate_unchecked(r2, x.bits());
        if (a - b).abs() > tolerance {
            return Ok(EquivalenceReport {
                equivalent: false,
                points_checked,
                exhaustive,
                counterexample: Some((x, a, b)),
            });
        }
    }
    Ok(EquivalenceReport {
        equivalent: true,
        points_checked,
        exhaustive,
        counterexample: None,
    })
}
