//! Full binary reduction trees: construction, S/D labeling, balance
//! measurement, exact counting, and floating-point summation schedules.
//!
//! A reduction tree over `n` inputs is a full binary tree with `n` leaves;
//! each internal node combines its two children. Internal nodes split into
//! two kinds: an S node has children with equal leaf counts (a "same" merge),
//! a D node has children with different leaf counts. Trees that achieve the
//! minimum possible number of D nodes, `ω(n) - 1` for `ω(n)` the number of
//! ones in the binary expansion of `n`, are called MinD trees here; their
//! Colless index sits within a vanishing normalized gap of the optimum, and
//! they are good summation schedules in binary64 arithmetic.
//!
//! The crate exposes:
//! - [`tree`]: the arena tree type, S/D labeling, Colless index, canonical
//!   forms, classic constructions (ladder, divide and conquer, largest
//!   power-of-two splitting, perfect), and Newick/DOT/JSON text forms.
//! - [`mind`]: MinD construction from the binary decomposition of `n`,
//!   the descending and ascending exponent arrangements, and exhaustive
//!   enumeration of MinD isomorphism classes.
//! - [`formulas`]: exact integer formulas for S and D counts of the
//!   halving constructions, Takagi-function dilations, and the Colless
//!   values and bounds of MinD trees.
//! - [`counting`]: exact counts of reduction-tree shapes by S-node count
//!   and related product counts.
//! - [`oracle`]: brute-force shape enumeration and cross-checks of the
//!   formula and counting modules against it.
//! - [`sumplan`]: binary64 summation schedules over a tree, exact and
//!   correctly-rounded reference sums, and rounding-error reports.
//! - [`fp`]: exact conversions between `f64` and rationals, correctly
//!   rounded reconstruction, ULP distance, and hex-float text.

pub mod counting;
pub mod formulas;
pub mod fp;
pub mod mind;
pub mod oracle;
pub mod sumplan;
pub mod tree;

pub use counting::CountingError;
pub use formulas::FormulaError;
pub use fp::FpError;
pub use mind::MindError;
pub use oracle::OracleError;
pub use sumplan::SumError;
pub use tree::{CanonicalForm, NodeKind, SdKind, SdLabeling, Tree, TreeError};
