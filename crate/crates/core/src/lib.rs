//! Rank-maximal matchings in bipartite applicant–post instances where
//! applicants rank posts (ties allowed), with a stage-wise solver and a
//! dynamic engine that keeps the matching and its reduced graphs current
//! under vertex and edge insertions and deletions.

pub mod bench;
pub mod decomposition;
pub mod dynamic;
pub mod format;
pub mod generate;
pub mod instance;
pub mod matching;
pub mod ops;
pub mod oracle;
pub mod solver;
pub mod store;
pub mod verify;

pub use decomposition::{classify_eou, AlternatingPath, EouLabeling, Label, ScanOrder, StageGraph};
pub use instance::{EdgeId, Instance, InstanceError, RankedEdge, Side, VertexId};
pub use matching::{signature_of, Matching, Signature};
pub use solver::{reconstruct_reduced_graph, solve, stage_matching, SolveResult};
pub use store::PreprocessStore;
pub use dynamic::{Engine, UpdateReport};
pub use ops::Op;
