//! Reasoning and planning engine for tentacular multi-agent systems.
//!
//! The crate is organized around five layers:
//!
//! - [`kernel`] — the sorted term/formula language: signatures, parsing,
//!   sort checking, substitution, printing, and knowledge bases.
//! - [`prover`] — bounded natural-deduction proof search producing proof
//!   objects, plus an independent proof checker and a consistency test.
//! - [`eventcalc`] — the discrete event-calculus axioms and a closed-world
//!   state-projection evaluator used as a fast path and test oracle.
//! - [`planner`] — exhaustive plan search with satisfaction proofs, plan
//!   reification, and bounded nonexistence certificates.
//! - [`agents`] — the agent runtime: contracts, goal generation, the
//!   level-1/level-2 declaration protocols, and obligation resolution.

pub mod agents;
pub mod eventcalc;
pub mod kernel;
pub mod planner;
pub mod prover;
