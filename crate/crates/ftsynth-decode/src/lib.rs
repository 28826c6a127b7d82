//! Matching-based decoding for the merged color/surface code: minimum-weight
//! A-perfect matching and the two-stage merged code decoder.

pub mod apm;
pub mod decoder;
pub mod error;

pub use apm::{brute_force_apm, exact_mwpm, min_weight_apm, WeightedGraph};
pub use decoder::{Bcc, Correction, DecodeTrace, DecoderConfig, MergedDecoder, Pairing};
pub use error::{DecodeError, MatchingError};
