//! Whitney jets of class `C^{m,omega}`: jet algebra, Whitney-condition
//! checks, cells with associated distance functions, derivative bounds, and
//! an explicit extension construction with numeric verification.

pub mod calculus;
pub mod cells;
pub mod error;
pub mod jet;
pub mod modulus;
pub mod multiindex;
pub mod poly;
pub mod series;
pub mod shvartsman;
pub mod extend;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
