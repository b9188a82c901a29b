//! Language definitions as objects of a program logic.
//!
//! A `.lan` file describes a language by a grammar and an inference system.
//! This crate parses such files, derives assertions about them (which
//! argument positions evaluation contexts cover, which reduction rules may
//! duplicate effects, which type constructors are contravariant, ...) and
//! produces derivation trees that [`prover::check_derivation`] re-validates
//! independently.

pub mod assertion;
pub mod cli;
mod error;
pub mod grammar;
pub mod prover;
pub mod rules;
pub mod syntax;

pub use error::{Error, Result};
