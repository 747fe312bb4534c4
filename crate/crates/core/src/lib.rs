//! Bound states of the generalized Woods-Saxon potential under the generalized
//! fractional derivative, solved with the fractional Nikiforov-Uvarov method and
//! cross-checked against Numerov shooting.

pub mod error;
pub mod expr;
pub mod gfd;
pub mod nucore;
pub mod numerov;
pub mod par;
pub mod specfun;
pub mod spectrum;
pub mod verify;
pub mod wavefun;

pub use error::{Error, Result};
pub use gfd::FractionalOrder;
pub use nucore::{DimensionlessParams, WellShape};
pub use par::Execution;
pub use spectrum::{EnergyLevel, MiddleSign, PotentialParams, SolveOptions};
