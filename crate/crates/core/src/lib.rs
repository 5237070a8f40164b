#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod characterization;
pub mod convergence;
pub mod cumulant;
pub mod dpa;
pub mod expm;
pub mod fock;
pub mod lindblad;
pub mod models;
pub mod ode;
pub mod filter;
pub mod outfield;
pub mod phase_space;
pub mod quad;
pub mod recon;
pub mod sparse;

pub use error::{Error, Result};
pub use fock::{annihilation, creation, displacement_operator, expectation, number, DensityMatrix, FockOperator};
pub use num_complex::Complex64;
