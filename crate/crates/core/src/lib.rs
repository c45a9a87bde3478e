//! Random unitary quantum channels and their master equations.
//!
//! The same reduced dynamics is produced three ways: as a Kraus average over
//! unitaries, as the ensemble average over a disordered Hamiltonian, and as the
//! reduced state of a system coupled to a static environment. The master
//! equations of the weak-coupling expansion (Redfield, pure dephasing, and the
//! semigroup limit) are solved and compared against that exact dynamics.
//!
//! Units: ħ = 1 throughout.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod channel;
pub mod ensemble;
pub mod error;
pub mod linops;
pub mod mastereq;

pub use error::{Error, Result};
