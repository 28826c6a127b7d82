//! Core algorithms for fault-tolerant Clifford circuit synthesis and for the
//! merged color/surface code: F2 symplectic algebra, gate-time circuit
//! encodings, symbolic formulas, fault-tolerance constraints, an exhaustive
//! flag oracle and the topological code constructions.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod circuit;
pub mod codes;
pub mod constraints;
pub mod f2;
pub mod faults;
pub mod formula;
pub mod oracle;

pub use error::{CircuitError, CodeError, ConstraintError, F2Error};
