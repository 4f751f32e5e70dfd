//! Periodic lattices, grid functions, the Littlewood–Paley bank and the norms built on it.

pub mod bank;
pub mod grid;
pub mod lattice;
pub mod norms;

pub use bank::DyadicBank;
pub use grid::{GridFunction, TrigPoly};
pub use lattice::Lattice;
pub use norms::{besov_norm, holder_norm, interpolation_check, smooth_approx, HolderNorm, InterpolationCheck};
