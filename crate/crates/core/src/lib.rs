//! Unique registrability of patch-based networks.
//!
//! A network of `N` nodes in `R^d` is observed through `M` overlapping
//! patches, each in its own local coordinate frame. Registration recovers
//! global coordinates plus one Euclidean transform per patch. This crate
//! decides whether that recovery is unique (modulo one global transform)
//! from the node/patch incidence alone:
//!
//! - [`model`]: instances, correspondence and body graphs, frameworks,
//!   Euclidean transforms.
//! - [`connectivity`]: vertex connectivity and quasi connectivity through
//!   unit-capacity max-flow.
//! - [`rigidity`]: randomized generic local, redundant and global rigidity
//!   tests in exact prime-field arithmetic.
//! - [`registrability`]: the verdict engine.
//! - [`instances`]: worked examples, generators and synthetic data.
//! - [`harness`]: a numerical registration solver and an empirical
//!   uniqueness probe.
//! - [`selftest`]: the worked-example checks behind `netreg selftest`.
//!
//! ```
//! use netreg::{instances, registrability};
//!
//! let inst = instances::gen_fig2();
//! let verdict = registrability::analyze(&inst, 7).unwrap();
//! assert_eq!(verdict.uniquely_registrable, Some(true));
//! ```

pub mod connectivity;
pub mod error;
pub mod field;
pub mod graph;
pub mod harness;
pub mod instances;
pub mod model;
pub mod registrability;
pub mod rigidity;
mod seed;
pub mod selftest;

pub use error::{Error, Result};
pub use graph::Graph;
pub use model::{
    BodyGraph, Configuration, CorrespondenceGraph, EuclideanTransform, Framework, Instance,
    Solution,
};
pub use registrability::{analyze, Verdict};
