//! Fault-tolerant Clifford circuit synthesis through an external SMT
//! solver, and Monte Carlo tooling for the merged color/surface code.

pub mod fit;
pub mod io;
pub mod noise;
pub mod schedule;
pub mod smt;
pub mod synth;
