//! Double ramification cycles with cyclic orbifold targets `B Z_m`, computed
//! as exact tautological classes on moduli of stable curves.

pub mod engine;
pub mod error;
pub mod exact;
pub mod graphs;
pub mod orbifold;
pub mod psi;
pub mod taut;
pub mod weights;

pub use engine::{
    class_at_r, dr_cycle, dr_cycle_with, leading_term_class, normalization, polynomial_class, validate_dr_problem,
    Branch, DRProblem, EngineConfig, RPolyClass, TopData, ValidationReport,
};
pub use error::{Error, Result};
pub use exact::{Rational, UniPoly};
pub use graphs::{enumerate_graphs, StableGraph};
pub use orbifold::{BundleRep, Sector};
pub use psi::{evaluate_class_integral, psi_integral};
pub use taut::{Ambient, TautClass, TermKey};
pub use weights::{enumerate_decorations, Decoration, WeightFunction};
