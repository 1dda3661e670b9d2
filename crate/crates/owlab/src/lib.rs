//! Exact boundary calculus on cancellative semigroups, ε-filling patterns
//! and quasi-tilings, and Ornstein–Weiss convergence diagnostics for
//! subadditive right-subinvariant set functions, with entropy instances
//! from symbolic dynamics.
//!
//! Combinatorics is exact (big integers and rationals throughout);
//! floating point enters only where logarithms force it, in entropy values
//! and convergence ratios.

pub mod boundary;
pub mod dynamics;
pub mod error;
pub mod filling;
pub mod folner;
pub mod sample;
pub mod semigroup;
pub mod subadditive;
pub mod textio;

pub use boundary::{alpha, boundary, interior, translate_sum, AmenabilityConstant, ExactRatio};
pub use error::{Error, Result};
pub use filling::{
    compute_n0, eps_disjoint_verify, filling_theorem_run, greedy_filling, FillingPattern,
    TilingMode, TilingResult, WitnessedFamily,
};
pub use folner::{builtin_folner, defect, folner_report, FolnerKind, FolnerSequence};
pub use semigroup::{Element, FinSubset, FiniteTable, Semigroup};
pub use subadditive::{ow_certificate, ow_estimate, Certificate, OWEstimate, SetFunction};
