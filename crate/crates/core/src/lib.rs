//! Exact toric and Picard-lattice geometry for testing properness of the
//! K-energy on Kähler classes.
//!
//! Everything is computed over the rationals. Floating point appears only
//! in display helpers.

pub mod alpha;
pub mod error;
pub mod exact;
pub mod par;
pub mod picard;
pub mod polytope;
pub mod properness;
pub mod toric;

pub use alpha::{alpha_invariant, alpha_oracle, class_stabilizer, GroupMode, SymmetryContext};
pub use error::{Error, Result};
pub use exact::{IntMatrix, Rational};
pub use picard::{exceptional_curves, BlowupSurface, PicardClass};
pub use polytope::Polytope;
pub use properness::{
    check_fano, check_negative_c1, check_three_conditions, feasible_a_interval, jflow_condition_surface, sweep_lambda,
    AlphaSource, Backend, KClassSetup, ParametricFamily, PropernessReport, SweepConfig,
};
pub use toric::{Fan, ToricDivisor};
