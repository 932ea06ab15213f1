//! Sketch-and-solve for highly overdetermined linear least-squares problems.
//!
//! A problem `min ||A x - b||` with `A` of size `m x d`, `m >> d`, is
//! compressed by a sketch operator `F` (`s x m`, `d <= s << m`) and the small
//! problem `min ||F A x - F b||` is solved exactly. The structured sketch
//! kinds are sparse scaled-unitary matrices, so applying them costs far fewer
//! operations than a dense Gaussian sketch.
//!
//! ```
//! use sketchls::generators::{gen_gaussian_input, gen_rhs, RhsRecipe};
//! use sketchls::sketch::{make_sketch, SketchKind};
//! use sketchls::solver::{sketch_and_solve, solve_exact, LlspProblem};
//!
//! let a = gen_gaussian_input(1024, 8, 1).unwrap();
//! let b = gen_rhs(&a, &RhsRecipe::default(), 2).unwrap();
//! let p = LlspProblem::new(a, b).unwrap();
//! let exact = solve_exact(&p).unwrap();
//! let op = make_sketch(SketchKind::Asph, 48, 1024, 3).unwrap();
//! let sol = sketch_and_solve(&p, &op, Some(&exact)).unwrap();
//! assert!(sol.relative_residual.unwrap() >= 1.0);
//! ```

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod linalg;
pub mod rng;
pub mod sketch;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Vector};
pub use sketch::{CostMeter, SketchKind, SketchOperator};
pub use solver::{LlspProblem, Solution};
