//! Exact-arithmetic construction, verification, and application of
//! multivariate symmetric wavelet filter banks for arbitrary integer
//! dilation matrices.
//!
//! Coefficients are Gaussian rationals, sqrt(m) scale factors stay
//! symbolic, and every structural claim (sum rules, vanishing moments,
//! symmetry, the polyphase extension identity, perfect reconstruction in
//! rational mode) is checked with zero tolerance.

pub mod error;
pub mod gauss;
pub mod mat;
pub mod multiindex;

pub mod laurent;

pub mod lattice;
pub mod theta;

pub mod polyphase;
pub mod verify;

pub mod maskgen;
pub mod dualgen;
pub mod extension;

pub mod transform;

pub mod io;

pub use error::{Error, Result};
