//! Kazhdan-Lusztig combinatorics of dihedral groups, decategorified cell
//! modules of the dihedral Soergel category, and a bounded classifier for
//! nonnegative integer matrix pairs that can arise from simple transitive
//! 2-representations.

pub mod algebra;
pub mod cells;
pub mod classify;
pub mod dihedral;
pub mod error;
pub mod matrix;
pub mod nimrep;
pub mod perron;
pub mod poly;
pub mod reps;
pub mod verify;

pub use error::{Error, Result};
