//! Model-order reduction for continuous-time LTI state-space systems with an
//! emphasis on frequency-limited accuracy and preservation of selected modes.
//!
//! The crate is organised bottom-up:
//!
//! * [`matfun`]: dense kernels (Sylvester/Lyapunov solvers, principal matrix
//!   logarithm, the band integral `F(A)`, eigendecomposition helpers).
//! * [`ltimodel`]: the [`StateSpace`] carrier, transfer evaluation, Gramians,
//!   `H2` and band-limited `H2` norms.
//! * [`reduction`]: PORK, FLPORK, O-FLPORK, frequency-limited balanced
//!   truncation and modal truncation.
//! * [`powergrid`]: classical swing-equation fixtures and seeded synthetic
//!   benchmarks.
//! * [`verify`]: quadrature oracles and certificate checkers.

pub mod error;
pub mod ltimodel;
pub mod matfun;
pub mod powergrid;
pub mod reduction;
pub mod verify;

pub use error::{Error, Result};
pub use ltimodel::StateSpace;
pub use matfun::{ComplexMatrix, FrequencyBand, RealMatrix};

pub use num_complex::Complex64;
