//! Bell-inequality experiments with bounded quantum reference frames.
//!
//! Measurement directions are carried by spin coherent states of finite size
//! `j_RF`. Each party measures the total spin of (system + frame) and reads the
//! outcome as a spin projection of the system along the frame. The crate
//! provides the angular-momentum kernels, the resulting POVMs, two-party and
//! multi-party correlation functions, CHSH/Mermin evaluation and the scan for
//! the minimal frame size that still violates local realism.

pub mod angular;
pub mod bell;
pub mod correlations;
mod error;
pub mod measurements;
pub mod search;
pub mod states;

pub use angular::HalfInt;
pub use correlations::Frame;
pub use error::{Error, Result};
pub use states::Direction;

/// Margin used on every "violated" decision.
pub const VIOLATION_EPS: f64 = 1e-9;
