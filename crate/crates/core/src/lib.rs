//! Fraud analytics on bipartite claim–party networks.
//!
//! The crate builds an immutable claim–party graph, propagates known fraud
//! through it with a personalized bipartite ranking, turns the scores and the
//! neighborhood structure into per-claim features, and evaluates logistic
//! fraud models on top of them.

pub mod birank;
pub mod error;
pub mod features;
pub mod graph;
pub mod intrinsic;
pub mod labels;
pub mod ml;
pub mod motifs;
pub mod pipeline;
pub mod synth;

pub use birank::{birank, birank_direct, BiRankConfig, QueryVector, ScoreSet};
pub use error::{Error, Result};
pub use features::{featurize_claims, FeatureFrame, NetworkFeatureRow};
pub use graph::{build_graph, BipartiteGraph, EdgeRecord, NodeId, NodeKind, PartyKind};
pub use labels::{ClaimLabel, ClaimLabels};

/// Version string recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
