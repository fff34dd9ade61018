//! Entanglement in a periodic lattice of harmonically coupled charged
//! oscillators, across the transition from a linear chain to a zig-zag.

pub mod check;
pub mod covariance;
pub mod entanglement;
pub mod error;
pub mod lattice;
pub mod phase;
pub mod quadrature;
pub mod spectrum;
pub mod sweep;
pub mod value;
pub mod witness;

pub use error::{Error, Result};
pub use lattice::{Configuration, CouplingCoefficients, LatticeParams, Model};
pub use spectrum::{ModeEntry, ModeSpectrum};
pub use value::{Divergence, Extended};
