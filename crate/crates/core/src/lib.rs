//! Single-mode model of a dipolar spin-1 condensate driven through an
//! adiabatic Mach-Zehnder sequence: Fock basis and collective spin operators,
//! the model Hamiltonian, spectra, time evolution, state diagnostics and the
//! trap-geometry dependence of the dipolar coupling.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod jacobi;
pub mod linalg;
pub mod observables;
pub mod spectra;
pub mod spin_fock;
pub mod table;

pub use error::{Error, Result};
