//! Electric dipole-dipole coupling tensors between two point emitters.
//!
//! Geometries covered:
//!
//! * three-dimensional free space, with the two time orderings kept apart,
//!   plus the reduced two- and one-dimensional scalar couplings;
//! * a perfect planar mirror cavity with plates at `z = 0` and `z = L`;
//! * a perfectly conducting rectangular channel with walls at `y = 0, a`
//!   and `z = 0, b`.
//!
//! Every cavity tensor is split into its radiation-dominant (RD, propagating)
//! and non-radiation-dominant (NRD, evanescent) parts, and each closed form is
//! paired with an independent quadrature oracle built from the mode functions.
//!
//! Units: `ħ = c = 1`, lengths in any consistent unit with the exciton
//! wavenumber `p` in the inverse unit.

pub mod analysis;
pub mod channel;
pub mod control;
pub mod error;
pub mod freespace;
pub mod planar;
pub mod quad;
pub mod rates;
pub mod specfun;
pub mod tensor;

pub use control::SumControl;
pub use error::{Error, Result};
pub use tensor::{Component, CouplingResult, Tensor3};
