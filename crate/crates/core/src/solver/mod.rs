//! Self-contained optimization kernels: linear programming, concave
//! maximization over a polytope, and small-dimension vertex enumeration.
//!
//! Kernels are stateless per call and deterministic: identical inputs give
//! bitwise-identical outputs.

pub mod concave;
pub mod lp;
pub mod vertex;

pub use concave::{solve_concave, ConcaveProgram, ConcaveSolution};
pub use lp::{solve_lp, LinearProgram, LpConstraint, LpSolution, LpStatus, VarBound};
pub use vertex::{enumerate_vertices, BoundingBox};
