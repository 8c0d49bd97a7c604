//! Replayable traces, the positional-to-keyed adapter and workload generators.

mod adapter;
mod gen;
mod trace;

pub use adapter::{AdapterError, KeyedOp, PositionalAdapter, Relabel, Resolved, LABEL_STRIDE};
pub use gen::{adversarial, gen_workload, generate, Adversarial, GenConfig, GenError, Mix, DEFAULT_VALUES};
pub use trace::{emit_trace, parse_trace, ParseError, WorkloadOp};
