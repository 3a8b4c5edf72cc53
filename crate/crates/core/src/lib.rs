//! Matrix-free solvers for ill-conditioned symmetric linear systems `Au = f`.
//!
//! The central method integrates the Cauchy problem
//!
//! ```text
//! u'(t) = i(A + ia) u(t) + f,    u(0) = 0
//! ```
//!
//! whose large-time state satisfies `-i u(t) -> (A + ia)^{-1} f`, which tends to the
//! minimal-norm solution as the shift `a` goes to zero. Only matrix-vector products
//! with `A` are ever needed.
//!
//! Module map:
//!
//! * [`linops`]: dense symmetric operators, complex states, Jacobi eigensolver.
//! * [`oracle`]: eigenbasis ground truth (minimal-norm solution, closed-form trajectory).
//! * [`dsm`]: RK4 integration, noise-level schedules, solution extraction.
//! * [`regbase`]: Tikhonov baseline solved by conjugate gradients.
//! * [`problems`]: benchmark generators, exact-norm noise, Matrix Market I/O.
//! * [`verify`]: the invariant suite behind `dsm verify`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dsm;
mod error;
pub mod linops;
pub mod oracle;
pub mod problems;
pub mod regbase;
pub mod verify;

pub use error::{Error, Result};
pub use linops::{ComplexState, Condition, EigenDecomposition, SymmetricOperator};
