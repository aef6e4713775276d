//! mereoscan: dependency-graph extraction and wholeness analysis.
//!
//! The crate is organised around a four-stage pipeline:
//!
//! 1. [`graph`] extracts a typed file dependency graph from a source tree
//!    (import/include grammars) and/or an `edges/v1` manifest, and provides
//!    the connectivity algorithms (entry points, elementary cycles, orphans,
//!    undirected path queries).
//! 2. [`classify`] assigns each file a participation mode — optional,
//!    mandatory, or essential — from graph evidence and optional external
//!    removal/replacement probe runs.
//! 3. [`model`] holds the finite time-indexed relational model and the axiom
//!    checkers: unity, non-contingency, weak supplementation, and the
//!    aggregate classification (functional whole / collective / mere set /
//!    contingent sum).
//! 4. [`verdict`] assembles the model from graph plus classification, runs
//!    the axioms per connected component, and produces the wholeness report
//!    with its infringement-unit count.
//!
//! [`config`] carries the shared tool configuration consumed by the CLI.
//!
//! Everything except probe execution is a pure function of immutable inputs;
//! graphs and models can be shared read-only across threads.

pub mod classify;
pub mod config;
pub mod graph;
pub mod model;
pub mod verdict;

/// Version string embedded in structured reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
