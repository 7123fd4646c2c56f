//! Structured argumentation over a modal deontic-epistemic-action language.
//!
//! The pipeline runs [`theory::load_theory`] → [`theory::instantiate_schemes`]
//! → [`arguments::construct_arguments`] → [`semantics::compute_defeats`] →
//! [`semantics::stable_extensions`].

pub mod arguments;
pub mod cli;
pub mod formula;
pub mod hohfeld;
pub mod semantics;
pub mod theory;
