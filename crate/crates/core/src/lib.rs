//! Scalable Lévy measures, generalized Hölder–Zygmund norms and nonlocal parabolic problems
//! on periodic lattices.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod levy;
pub mod lp;
pub mod math;
pub mod operators;
pub mod rng;
pub mod scaling;
pub mod solver;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
