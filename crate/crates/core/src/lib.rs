//! Linear symmetries and quadrature solutions of first-order ODEs.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod fxqx;
pub mod ode;
pub mod problem;
pub mod report;
pub mod riccati;
pub mod solve;

pub use classify::{find_linear_symmetry, Classification, Verified};
pub use error::{Error, Result};
pub use ode::{LinearSymmetry, LinearTransform, Ode, Outcome};
