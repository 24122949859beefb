//! Decidability fragments of the realizability problem and distributed
//! architectures.

mod architecture;
mod classify;
mod linear;

pub use architecture::{Architecture, ArchitectureError, InfoFork, Process};
pub use classify::{classify, classify_nonlinear, FragmentClass, FragmentVerdict};
pub use linear::{check_linear_on_system, LinearCheck, LinearityError};
