//! q-deformed Jaynes-Cummings toolkit.
//!
//! Exact q-combinatorics over Laurent polynomials in `s = q^{1/4}`, truncated
//! super-Fock operator matrices, a pseudo-Grassmann coefficient algebra,
//! q-supercoherent states and a normal-ordering engine for the deformed algebra.

pub mod qnumbers;
pub mod grassmann;
pub mod qcalculus;
pub mod superfock;
pub mod opcalc;
pub mod qscs;
pub mod jchamiltonian;
