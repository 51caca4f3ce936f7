//! Finite set-theoretical solutions of the Yang–Baxter equation built from
//! shelves and racks, and matched products of such solutions.
//!
//! - [`algebra`]: operation tables, permutations, shelf and rack predicates.
//! - [`solution`]: solutions `r(x, y) = (λₓ(y), ρ_y(x))`, the braid relation,
//!   structure shelves and derived solutions.
//! - [`matched`]: matched product systems, the product solution and the
//!   simplified criteria for products of shelf solutions.
//! - [`enumerate`]: exhaustive and sampled generation of shelves, solutions
//!   and systems, and isomorphism classification.
//! - [`theorem`]: bounded mechanical checks of the structural results.

pub mod algebra;
pub mod enumerate;
pub mod error;
pub mod matched;
pub mod solution;
pub mod theorem;

pub use algebra::{OperationTable, Permutation, ShelfSide};
pub use enumerate::{SearchMode, SearchSpec};
pub use error::{Error, Result};
pub use matched::{
    ActionFamily, Case, CheckReport, Condition, MatchedProductSystem, PairEncoding, Violation, WitnessMode,
};
pub use solution::{ShelfType, Solution, SolutionProps, YbeMode};
pub use theorem::{TheoremId, TheoremReport};
