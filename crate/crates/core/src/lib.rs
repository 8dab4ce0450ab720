//! Exact Fock-space calculus for the cohomology of Hilbert schemes of
//! points on a surface, together with audits of the G-degree behaviour of
//! the ring structure.

pub mod error;
pub mod exact;
pub mod surface;
pub mod fock;
pub mod heisenberg;
pub mod fibration;
pub mod taut;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{Matrix, Rational, SparseVec, SpanBuilder};
pub use surface::{ClassArg, Side, SurfaceModel};
