//! Compositional distributional semantics for relative clauses.
//!
//! Grammar is handled by pregroup types ([`pregroup`]); meaning lives in
//! dense tensors ([`tensor`]) wired together by string diagrams
//! ([`diagram`]). [`semantics`] maps typed phrases to diagrams and
//! implements the relative-pronoun tensors, [`models`] supplies word
//! meanings, and [`cli`] is the command-line front end.

pub mod cli;
pub mod diagram;
pub mod models;
pub mod pregroup;
pub mod semantics;
pub mod tensor;
