//! Criteria-based detection of genuine multipartite entanglement (GME) in
//! multi-qubit states, and Monte Carlo estimates of how likely a randomly
//! oriented local measurement basis is to detect it.
//!
//! The crate is organised bottom-up:
//!
//! - [`states`]: GHZ/W/Dicke constructors, density matrices, isotropic noise,
//!   and the text file format for density matrices.
//! - [`haar`]: Haar-random SU(2) blocks and local unitaries over the product
//!   or symmetric subgroup.
//! - [`criteria`]: the element-wise criteria `Q0` and `Q_m`, and detectors
//!   combining several of them by maximum.
//! - [`oracle`]: a literal two-copy implementation of the same criteria, kept
//!   slow on purpose and used to certify [`criteria`].
//! - [`estimator`]: detection probability estimates with Wilson intervals and
//!   noise sweeps.
//! - [`reference`]: closed-form detection probabilities used as targets.
//! - [`cli`]: the `gme` command line front end.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod estimator;
pub mod haar;
pub mod oracle;
pub mod reference;
pub mod states;

pub use error::{Error, Result};

/// Complex amplitude / matrix entry type used throughout.
pub type C64 = num_complex::Complex64;
