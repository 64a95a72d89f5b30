//! Exact computations with subgroups of GL2(Z/nZ).

pub mod abelian;
pub mod arith;
pub mod budget;
pub mod cache;
pub mod classify;
pub mod conjugacy;
pub mod error;
pub mod inertia;
pub mod lattice;
pub mod mat2;
pub mod scan;
pub mod standard;
pub mod subgroup;
pub mod verify;

pub use error::{Error, Result};
pub use mat2::Mat2;
pub use subgroup::{Subgroup, SubgroupKey};
