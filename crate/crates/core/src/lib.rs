//! Possible-worlds decision procedures for causal compatibility with latent
//! variables.
//!
//! A causal structure is a DAG over visible and latent variables. Given such
//! a structure and an observed support (or a full distribution), this crate
//! decides whether some assignment of deterministic response functions and
//! latent distributions reproduces it, and produces a checkable certificate
//! when one exists.

pub mod cnf;
pub mod graph;
pub mod hierarchy;
pub mod parallel;
pub mod possibilistic;
pub mod prob;
pub mod scenarios;
pub mod structure;
pub mod worlds;

pub use graph::{DirectedGraph, GraphError, VertexId};
pub use parallel::Parallelism;
pub use structure::{CausalStructure, StructureError, VertexKind};
