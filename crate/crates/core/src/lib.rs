//! Numerical analysis of Liénard systems `ẋ = y − F(x)`, `ẏ = −g(x)`:
//! limit-cycle detection via the half-return map, the ᾱ amplitude
//! estimate, hypothesis checks for the exact-count theorems, and the
//! small-μ averaging criterion.

pub mod amplitude;
pub mod asymptotics;
pub mod builtin;
pub mod cycles;
pub mod error;
pub mod functions;
pub mod integrator;
pub mod model_file;
pub mod quadrature;
pub mod reference;
pub mod report;
pub mod roots;
pub mod system;
pub mod theorem;

pub use error::{Error, Result};
pub use system::LienardSystem;
