//! Trace replay against the forest, with optional oracle verification.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::counters::CostCounters;
use crate::dynlis::{DynLis, DynLisError};
use crate::levels::{Element, IndexKey, Value};
use crate::oracle::{oracle_is_valid_lis, oracle_length_fast, oracle_levels};
use crate::workload::{AdapterError, KeyedOp, PositionalAdapter, Relabel, WorkloadOp};

/// Level oracle runs only while the structure holds at most this many elements.
pub const LEVEL_ORACLE_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Forest(#[from] DynLisError),
}

impl ReplayError {
    pub fn kind(&self) -> &'static str {
        match self {
            ReplayError::Adapter(AdapterError::PositionOutOfRange { .. }) => "PositionOutOfRange",
            ReplayError::Adapter(AdapterError::KeyNotFound(_)) => "KeyNotFound",
            ReplayError::Adapter(AdapterError::DuplicateKey(_)) => "DuplicateKey",
            ReplayError::Forest(DynLisError::DuplicateIndex(_)) => "DuplicateIndex",
            ReplayError::Forest(DynLisError::IndexNotFound(_)) => "IndexNotFound",
            ReplayError::Forest(DynLisError::NotAnAppend { .. }) => "NotAnAppend",
            ReplayError::Forest(DynLisError::InvalidLevel { .. }) => "InvalidLevel",
            ReplayError::Forest(DynLisError::StructuralBug(_)) => "StructuralBug",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Inserted(Element),
    Appended(Element),
    Deleted(IndexKey),
    Length(usize),
    Witness(Vec<Element>),
}

/// Result of applying one op.
#[derive(Debug, Clone)]
pub struct Step {
    pub outcome: Outcome,
    /// Forest work for the mutation itself, excluding any relabel rebuild.
    pub costs: CostCounters,
    pub side_updates: u64,
    pub relabeled: bool,
    pub nanos: u128,
}

/// Drives a [`DynLis`] from workload ops through a [`PositionalAdapter`],
/// mirroring the live elements in a plain map for the oracles.
#[derive(Debug, Clone, Default)]
pub struct Replayer {
    forest: DynLis,
    adapter: PositionalAdapter,
    model: BTreeMap<IndexKey, Value>,
    rebuild_costs: CostCounters,
}

impl Replayer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn forest(&self) -> &DynLis {
        &self.forest
    }

    /// Live elements in index order, from the mirror rather than the forest.
    pub fn sequence(&self) -> Vec<Element> {
        self.model.iter().map(|(&k, &v)| Element::new(k, v)).collect()
    }

    pub fn relabels(&self) -> u64 {
        self.adapter.relabels()
    }

    /// Accumulated work of forest rebuilds after relabels.
    pub fn rebuild_costs(&self) -> CostCounters {
        self.rebuild_costs
    }

    fn rebuild(&mut self, relabel: &Relabel) -> Result<(), DynLisError> {
        let mut model = BTreeMap::new();
        let mut forest = DynLis::new();
        for &(old, new) in &relabel.mapping {
            let v = self.model[&old];
            model.insert(new, v);
            forest.insert_append(Element::new(new, v))?;
            self.rebuild_costs += forest.last_costs();
        }
        self.model = model;
        self.forest = forest;
        Ok(())
    }

    pub fn apply(&mut self, op: WorkloadOp) -> Result<Step, ReplayError> {
        match op {
            WorkloadOp::DeleteKey { key } if !self.forest.contains(key) => {
                return Err(DynLisError::IndexNotFound(key).into())
            }
            WorkloadOp::InsertKey { key, .. } if self.forest.contains(key) => {
                return Err(DynLisError::DuplicateIndex(key).into())
            }
            _ => {}
        }
        let resolved = self.adapter.resolve(op)?;
        if let Some(relabel) = &resolved.relabel {
            self.rebuild(relabel)?;
        }
        let start = Instant::now();
        let outcome = match resolved.op {
            KeyedOp::Insert(e) => {
                self.forest.insert(e)?;
                self.model.insert(e.index, e.value);
                Outcome::Inserted(e)
            }
            KeyedOp::Append(e) => {
                self.forest.insert_append(e)?;
                self.model.insert(e.index, e.value);
                Outcome::Appended(e)
            }
            KeyedOp::Delete(k) => {
                self.forest.delete(k)?;
                self.model.remove(&k);
                Outcome::Deleted(k)
            }
            KeyedOp::Query => Outcome::Length(self.forest.lis_length()),
            KeyedOp::Extract => Outcome::Witness(self.forest.extract_lis()),
        };
        let nanos = start.elapsed().as_nanos();
        let mutated = op.is_mutation();
        Ok(Step {
            outcome,
            costs: if mutated { self.forest.last_costs() } else { CostCounters::new() },
            side_updates: if mutated { self.forest.last_side_updates() } else { 0 },
            relabeled: resolved.relabel.is_some(),
            nanos,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Invariant sweep, level oracle (small states) and length oracle after
    /// every mutation; witness validity on every extract.
    Full,
    /// Length oracle after every mutation only.
    LengthOnly,
}

impl FromStr for VerifyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(VerifyMode::Full),
            "length_only" | "length-only" => Ok(VerifyMode::LengthOnly),
            other => Err(format!("unknown mode `{other}` (expected full or length_only)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyStatus {
    Ok,
    /// The forest disagreed with an oracle or broke an invariant.
    Mismatch { op_index: usize, detail: String },
    /// The trace itself could not be applied (bad position, absent key, ...).
    Error { op_index: usize, kind: String, detail: String },
}

/// Deterministic, timing-free replay report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub ops: usize,
    pub mutations: usize,
    pub queries: usize,
    pub extracts: usize,
    pub relabels: u64,
    pub final_length: usize,
    pub final_elements: usize,
    pub status: VerifyStatus,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.status == VerifyStatus::Ok
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "summary: ops={} mutations={} queries={} extracts={} relabels={} final_length={} final_elements={}",
            self.ops, self.mutations, self.queries, self.extracts, self.relabels, self.final_length, self.final_elements
        );
        match &self.status {
            VerifyStatus::Ok => out.push_str("status: ok\n"),
            VerifyStatus::Mismatch { op_index, detail } => {
                let _ = writeln!(out, "status: mismatch at op {op_index}: {detail}");
            }
            VerifyStatus::Error { op_index, kind, detail } => {
                let _ = writeln!(out, "status: error at op {op_index}: {kind}: {detail}");
            }
        }
        out
    }
}

fn check_after_mutation(r: &Replayer, mode: VerifyMode) -> Result<(), String> {
    let seq = r.sequence();
    let forest = r.forest();
    if mode == VerifyMode::Full {
        forest.check_invariants().map_err(|v| format!("invariant violated: {v}"))?;
        if seq.len() <= LEVEL_ORACLE_LIMIT {
            let expect = oracle_levels(&seq);
            if let Some((k, want)) = expect.iter().find(|(k, l)| forest.level_map().get(k) != Some(l)) {
                return Err(format!(
                    "level of index {k}: forest says {:?}, oracle says {want}",
                    forest.level_map().get(k)
                ));
            }
        }
    }
    let want = oracle_length_fast(&seq);
    if forest.lis_length() != want {
        return Err(format!("length: forest says {}, oracle says {want}", forest.lis_length()));
    }
    Ok(())
}

fn fmt_witness(w: &[Element]) -> String {
    let parts: Vec<String> = w.iter().map(Element::to_string).collect();
    format!("[{}]", parts.join(" "))
}

/// Replays `ops`, checking the forest against the oracles, and stops at the
/// first failure.
pub fn verify_trace(ops: &[WorkloadOp], mode: VerifyMode) -> VerifyReport {
    let mut r = Replayer::new();
    let mut report = VerifyReport {
        lines: Vec::new(),
        ops: ops.len(),
        mutations: 0,
        queries: 0,
        extracts: 0,
        relabels: 0,
        final_length: 0,
        final_elements: 0,
        status: VerifyStatus::Ok,
    };
    for (i, op) in ops.iter().enumerate() {
        let step = match r.apply(*op) {
            Ok(s) => s,
            Err(e) => {
                report.status = VerifyStatus::Error {
                    op_index: i,
                    kind: e.kind().to_string(),
                    detail: format!("{op}: {e}"),
                };
                break;
            }
        };
        let failure = match &step.outcome {
            Outcome::Length(n) => {
                report.queries += 1;
                report.lines.push(format!("op {i}: query -> {n}"));
                None
            }
            Outcome::Witness(w) => {
                report.extracts += 1;
                report.lines.push(format!("op {i}: extract -> {}", fmt_witness(w)));
                (mode == VerifyMode::Full && !oracle_is_valid_lis(&r.sequence(), w))
                    .then(|| format!("{op}: witness {} is not a maximum increasing subsequence", fmt_witness(w)))
            }
            _ => {
                report.mutations += 1;
                check_after_mutation(&r, mode).err().map(|d| format!("{op}: {d}"))
            }
        };
        if let Some(detail) = failure {
            report.status = VerifyStatus::Mismatch { op_index: i, detail };
            break;
        }
    }
    report.relabels = r.relabels();
    report.final_length = r.forest().lis_length();
    report.final_elements = r.forest().len();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn appends(values: &[i64]) -> Vec<WorkloadOp> {
        values.iter().map(|&value| WorkloadOp::Append { value }).collect()
    }

    #[test]
    fn pi_digits_trace_verifies() {
        let mut ops = appends(&[3, 1, 4, 1, 5, 9, 2, 6]);
        ops.push(WorkloadOp::QueryLength);
        let rep = verify_trace(&ops, VerifyMode::Full);
        assert!(rep.is_ok(), "{}", rep.render());
        assert_eq!(rep.final_length, 4);
        assert_eq!(rep.lines, vec!["op 8: query -> 4".to_string()]);
    }

    #[test]
    fn empty_trace_is_ok() {
        let rep = verify_trace(&[], VerifyMode::Full);
        assert!(rep.is_ok());
        assert_eq!(rep.ops, 0);
    }

    #[test]
    fn absent_key_delete_is_reported() {
        let mut ops = appends(&[1, 2]);
        ops.push(WorkloadOp::DeleteKey { key: 99 });
        let rep = verify_trace(&ops, VerifyMode::LengthOnly);
        match &rep.status {
            VerifyStatus::Error { op_index, kind, .. } => {
                assert_eq!(*op_index, 2);
                assert_eq!(kind, "IndexNotFound");
            }
            other => panic!("unexpected status {other:?}"),
        }
        assert!(rep.render().contains("IndexNotFound"));
    }

    #[test]
    fn relabel_preserves_answers() {
        // Keys 0 and 1 leave no room in between, forcing a relabel.
        let ops = vec![
            WorkloadOp::InsertKey { key: 0, value: 5 },
            WorkloadOp::InsertKey { key: 1, value: 7 },
            WorkloadOp::InsertKey { key: 3, value: 1 },
            WorkloadOp::InsertAfterPos { pos: 0, value: 6 },
            WorkloadOp::QueryLength,
            WorkloadOp::Extract,
        ];
        let rep = verify_trace(&ops, VerifyMode::Full);
        assert!(rep.is_ok(), "{}", rep.render());
        assert_eq!(rep.relabels, 1);
        assert_eq!(rep.final_length, 3);
    }
}
