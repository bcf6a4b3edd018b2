//! Equivalent representations, natural lower bounds and exact solvers for
//! quadratic 0-1 set covering.
//!
//! A quadratic combinatorial optimization problem minimizes
//! `c·x + xᵀQx` over a family of binary vectors. Many pairs `(Q, c)` describe
//! the same objective on that family; this crate builds such representations,
//! computes natural lower bounds for each, solves small instances exactly,
//! and runs the experiments that compare representations.
//!
//! ```
//! use qcop::model::{evaluate, BinaryPoint, CoverSystem, LinearCost, QMatrix, QscpInstance, Representation};
//! use qcop::solver::brute_force_solve;
//!
//! let sys = CoverSystem::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]])?;
//! let q = QMatrix::from_rows(&[vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]])?;
//! let rep = Representation::original(q, LinearCost::ones(3))?;
//! assert_eq!(evaluate(&rep, &BinaryPoint::ones(3))?, 6.0);
//!
//! let best = brute_force_solve(&QscpInstance::new(sys, rep)?)?;
//! assert_eq!(best.optimal_value, 1.0);
//! # Ok::<(), qcop::Error>(())
//! ```

pub mod bench;
pub mod bounds;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod qscp;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod tol;
pub mod transforms;

pub use error::{Error, Result};

// Runs the guide's code blocks (and the README's) as doctests, one module
// per file.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/representations.md")]
    mod representations {}
    #[doc = include_str!("../../../book/src/diagonalizable.md")]
    mod diagonalizable {}
    #[doc = include_str!("../../../book/src/natural-bound.md")]
    mod natural_bound {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
