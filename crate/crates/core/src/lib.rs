//! Dynamic longest increasing subsequence.
//!
//! Maintains the level decomposition of a sequence of `(index, value)` pairs
//! under insertion anywhere, deletion and append, with each level stored in a
//! join-based AVL tree.

pub mod bench;
pub mod counters;
pub mod dynlis;
pub mod levels;
pub mod oracle;
pub mod replay;
pub mod tree;
pub mod workload;

pub use counters::CostCounters;
pub use dynlis::{DynLis, DynLisError, Violation};
pub use levels::{Element, IndexKey, LevelError, LevelSet, Value};
