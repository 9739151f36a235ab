//! Finite fields, Heisenberg-Weyl displacements and the restricted Clifford
//! group in prime-power dimension q <= 9, with the canonical MUB, the Hesse
//! SIC, orbit/stabilizer computations and numerical design certification.
//!
//! Field arithmetic is exact. Everything built from complex amplitudes is
//! generic over [`scalar::Real`] (`f32` or `f64`); the `*64` and `*32` aliases
//! below fix the precision.

pub mod clifford;
pub mod designs;
pub mod error;
pub mod gf;
pub mod hw;
pub mod io;
pub mod linalg;
pub mod orbits;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};

/// Double-precision aliases.
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type PureState64 = states::PureState<f64>;
pub type StateSet64 = states::StateSet<f64>;
pub type HwGroup64 = hw::HwGroup<f64>;
pub type GroupTable64 = clifford::GroupTable<f64>;
pub type Orbit64 = orbits::Orbit<f64>;

/// Single-precision aliases.
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type PureState32 = states::PureState<f32>;
pub type StateSet32 = states::StateSet<f32>;
pub type HwGroup32 = hw::HwGroup<f32>;
pub type GroupTable32 = clifford::GroupTable<f32>;
pub type Orbit32 = orbits::Orbit<f32>;
