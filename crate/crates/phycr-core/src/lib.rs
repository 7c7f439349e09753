//! Physics-informed convolutional-recurrent networks for 2D spatiotemporal
//! PDEs, trained without labeled data.
//!
//! The crate bundles a double-precision reverse-mode autodiff engine
//! ([`tensor`]), the encoder/ConvLSTM/pixel-shuffle network and its
//! autoregressive rollout ([`layers`]), filter-based PDE residual losses
//! ([`physics`]), classical reference solvers used only for evaluation
//! ([`refsolve`]), the training loop ([`trainer`]), error metrics ([`eval`]),
//! and the binary/config file formats ([`io`]).

pub mod error;
pub mod eval;
pub mod field;
pub mod gradcheck;
pub mod io;
pub mod layers;
pub mod physics;
pub mod refsolve;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
pub use field::{Field, Trajectory};
