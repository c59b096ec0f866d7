//! Exact p-adic linear algebra, random matrix products over `GL_n(ℚₚ)` and `GSp_{2n}(ℚₚ)`,
//! and Hall-Littlewood predictions for their singular numbers.

pub mod ensembles;
pub mod error;
pub mod hall_littlewood;
pub mod padic;
pub mod processes;
pub mod signature;
pub mod stats;
pub mod symplectic;

pub use error::{Error, Result};
pub use padic::{PadicMatrix, Prime};
pub use signature::{IntVector, Signature};
