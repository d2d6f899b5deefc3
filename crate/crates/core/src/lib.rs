//! Efficiency measurement over non-parametric production technologies.
//!
//! The crate evaluates directional efficiency measures built from
//! generalized power means over production sets (variable-returns hulls,
//! free-disposal hulls, and explicit halfspace intersections), computes the
//! corresponding dual price programs, and verifies duality gaps. An order
//! parameter `p` on the extended real line selects the measure: the
//! directional distance function at `p = -inf`, the multiplicative measure
//! at `p = 0`, the mean-of-expansions measure at `p = 1`, and the
//! asymmetric (best single coordinate) measure at `p = +inf`.
//!
//! Everything is pure and deterministic; evaluations over different units
//! or orders may run concurrently.

pub mod dual;
pub mod error;
pub mod extreal;
pub mod gmean;
pub mod oracle;
pub mod primal;
pub mod solver;
pub mod technology;

pub use dual::{AuditReport, DualCriterion, DualResult, NormalizationRule};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use gmean::{PParameter, UtilitySpec};
pub use primal::{EvalResult, SolverStats};
pub use solver::{ConcaveProgram, LinearProgram, LpStatus};
pub use technology::{Direction, EfficiencyStatus, Halfspace, NetputVector, Technology};
