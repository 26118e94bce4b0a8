//! Characteristic bisets and characteristic idempotents for the saturated
//! fusion systems on the extraspecial group of order p^3 and exponent p in
//! which every maximal subgroup is radical.

pub mod error;
pub mod fusion;
pub mod gl2;
pub mod group;
pub mod idempotent;
pub mod linalg;
pub mod oracle;
pub mod realization;
pub mod solver;
pub mod biset;

pub use error::{Error, Result};
pub use fusion::{FusionSystem, FusionSystemSpec, LineClass};
pub use gl2::Mat2;
pub use group::{Elem, ElemSet, GroupElement, GroupMorphism, Heisenberg, Subgroup};
