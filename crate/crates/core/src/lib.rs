//! Matrices of relations: a checker and synthesizer for nondeterministic
//! cryptographic protocols.

pub mod cells;
pub mod cli;
pub mod dsl;
pub mod protocols;
pub mod relcore;
pub mod search;
pub mod structures;
