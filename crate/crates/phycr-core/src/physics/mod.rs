//! Governing equations, hard boundary encoding, and the filter-based
//! physics residual loss.

mod fd;
mod loss;
mod pad;
mod stencil;
mod system;

pub use fd::{ddt, grad_xy, laplacian};
pub use loss::{bind_stencils, physics_loss, physics_loss_tape, residual, residual_tape, TapeStencils};
pub use pad::pad_bc;
pub use stencil::StencilSet;
pub use system::{BcKind, LoExponent, PdeKind, PdeSystem};
