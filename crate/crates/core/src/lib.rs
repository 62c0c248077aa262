//! Spin connections, metric connections and curvature for causal fermion
//! systems of spin dimension two, with the Minkowski vacuum as reference model.

pub mod ambient;
pub mod clifford;
pub mod dirac_sea;
pub mod error;
pub mod gamma;
pub mod geometry;
pub mod special;
pub mod spin;
pub mod synthetic;
pub mod tolerance;
pub mod transport;

pub use clifford::{CliffordSubspace, SignOperator};
pub use error::{ConnectReason, Error, Result};
pub use spin::{SpinOperator, Spinor, C64};
pub use tolerance::Tolerances;
