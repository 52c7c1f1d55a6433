//! Schur multipliers, non-abelian tensor and exterior squares, and capability
//! of finite p-groups given by power-commutator presentations.

pub mod catalog;
pub mod error;
pub mod expected;
pub mod functors;
pub mod linalg;
pub mod nu;
pub mod pc;
pub mod pquotient;
pub mod snf;
pub mod special_be;
pub mod verify;

pub use error::{Error, Result};
pub use pc::{ExponentVector, PcPresentation, Subgroup};
pub use snf::AbelianInvariants;
