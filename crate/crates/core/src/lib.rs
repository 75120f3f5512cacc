//! Top-k tag selection for item reviewing.
//!
//! Given a rule base linking item attribute values to sentiment-labeled tags,
//! pick `k` tags for a reviewer that respect a positive/negative quota derived
//! from the user factor `alpha`, retain at least `beta` of the best achievable
//! relevance, and maximize either independent or dependent attribute coverage.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] and [`rules_file`]: instances, parameters, ingestion.
//! * [`relevance`]: relevance totals and the `rel_max` benchmark.
//! * [`coverage`]: `cov_ic`, `cov_dc` and the dummy-augmented `theta_dc`.
//! * [`solvers`]: enumeration, branch-and-bound and greedy solvers.
//! * [`datagen`]: synthetic matrices, rule extraction, user-factor estimation.
//! * [`bench`]: parameter sweeps emitting CSV.

pub mod bench;
pub mod bitset;
pub mod coverage;
pub mod datagen;
pub mod error;
pub mod model;
pub mod relevance;
pub mod rules_file;
pub mod solvers;

pub use bitset::AttrSet;
pub use coverage::{cov_dc, cov_ic, theta_dc, DcGraph, DummyPolicy, EdgeLabel, Node};
pub use error::{Error, Result};
pub use model::{build_instance, make_params, AttrId, Instance, Objective, Params, Rule, Selection, Sentiment, Tag};
pub use relevance::{rel_total, RelBenchmark, REL_EPS};
pub use solvers::{Algorithm, SolveReport, SolverConfig};
