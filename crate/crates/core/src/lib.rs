//! Geometric phase of an open qubit coupled to a squeezed thermal bath.
//!
//! Two system-bath interactions are covered: a purely dephasing (QND)
//! coupling, equivalent to a phase damping channel, and a dissipative
//! coupling in the Born-Markov RWA, equivalent to a squeezed generalized
//! amplitude damping (SGAD) channel. Every quantity is computed by at
//! least two independent routes (closed form, Kraus channel, numerical
//! master-equation integration) so results can be cross-validated.

pub mod dephasing;
pub mod dissipative;
pub mod error;
pub mod gp;
pub mod numerics;
pub mod spheroid;
pub mod state;

pub use error::Error;
pub use state::{apply_kraus, eigensystem, from_angles, EigenPair, KrausSet, Mat2, QubitState};

/// Convenience alias used throughout the crate.
pub type C64 = num_complex::Complex64;
