//! A finite-domain constraint propagation kernel organised around
//! *generalized support*.
//!
//! Constraints are given an extensional meaning as relations over schemata
//! (which may repeat variables). Propagators are derived from support
//! properties: predicates over a signature and a set of support elements.
//! Every shipped propagator can be checked against its property by the
//! brute-force [`oracle`], which enumerates bounded signature lattices.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command line live in the companion `gensupport-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod propagators;
pub mod search;
pub mod semantics;
pub mod support;
pub mod triggers;

pub use error::{Error, Result};
pub use model::{Domain, ProjectionMap, Relation, Schema, Selection, Signature, Tuple, VarId};
pub use semantics::{ConstraintSpec, Instance};
pub use support::{Lit, SupportElement, SupportProperty, SupportSet};
pub use triggers::{PropagatorOutcome, TriggerKind, TriggerStore};
