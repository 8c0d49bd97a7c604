//! Per-mutation cost records and the CSV report.
//!
//! Costs are judged on [`CostCounters::tree_primitive_count`]; wall time is
//! recorded for information only.

use std::io::{self, Write};

use crate::counters::CostCounters;
use crate::replay::{Outcome, ReplayError, Replayer};
use crate::workload::WorkloadOp;

/// Documented cost constant `C`: every insert satisfies
/// `tree_ops <= C * (r + 1) * (log2(n / max(r, 1)) + 2)` and every append
/// `tree_ops <= C * (log2(n) + 2)`, with `n` and `r` taken before the op.
pub const COST_CONSTANT: f64 = 12.0;

pub const CSV_HEADER: &str = "op_index,op_kind,n_before,r_before,tree_ops,side_ops,ns";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub op_index: usize,
    pub op_kind: &'static str,
    pub n_before: usize,
    pub r_before: usize,
    pub tree_primitive_count: u64,
    pub side_map_updates: u64,
    pub wall_time_nanoseconds: u128,
}

/// `(r + 1) * (log2(max(n, 1) / max(r, 1)) + 2)`.
pub fn insert_budget(n: usize, r: usize) -> f64 {
    let n = n.max(1) as f64;
    let r = r as f64;
    (r + 1.0) * ((n / r.max(1.0)).log2() + 2.0)
}

/// `log2(max(n, 1)) + 2`.
pub fn append_budget(n: usize) -> f64 {
    (n.max(1) as f64).log2() + 2.0
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchSummary {
    pub mutations: usize,
    pub inserts: usize,
    pub appends: usize,
    pub deletes: usize,
    pub relabels: u64,
    /// Max over all inserts (appends included) of tree_ops / insert_budget.
    pub max_insert_ratio: f64,
    /// Max over appends of tree_ops / append_budget.
    pub max_append_ratio: f64,
    /// Max over deletes of tree_ops / insert_budget; informational.
    pub max_delete_ratio: f64,
    pub rebuild_costs: CostCounters,
}

#[derive(Debug, Clone, Default)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    pub summary: BenchSummary,
}

/// Replays `ops`, recording one row per mutation.
pub fn run_bench(ops: &[WorkloadOp]) -> Result<BenchRun, ReplayError> {
    let mut r = Replayer::new();
    let mut run = BenchRun::default();
    for (i, op) in ops.iter().enumerate() {
        let n_before = r.forest().len();
        let r_before = r.forest().lis_length();
        let step = r.apply(*op)?;
        if !op.is_mutation() {
            continue;
        }
        let tree_ops = step.costs.tree_primitive_count();
        let s = &mut run.summary;
        s.mutations += 1;
        let ins = tree_ops as f64 / insert_budget(n_before, r_before);
        match step.outcome {
            Outcome::Appended(_) => {
                s.inserts += 1;
                s.appends += 1;
                s.max_insert_ratio = s.max_insert_ratio.max(ins);
                s.max_append_ratio = s.max_append_ratio.max(tree_ops as f64 / append_budget(n_before));
            }
            Outcome::Inserted(_) => {
                s.inserts += 1;
                s.max_insert_ratio = s.max_insert_ratio.max(ins);
            }
            Outcome::Deleted(_) => {
                s.deletes += 1;
                s.max_delete_ratio = s.max_delete_ratio.max(ins);
            }
            Outcome::Length(_) | Outcome::Witness(_) => {}
        }
        run.records.push(BenchRecord {
            op_index: i,
            op_kind: op.name(),
            n_before,
            r_before,
            tree_primitive_count: tree_ops,
            side_map_updates: step.side_updates,
            wall_time_nanoseconds: step.nanos,
        });
    }
    run.summary.relabels = r.relabels();
    run.summary.rebuild_costs = r.rebuild_costs();
    Ok(run)
}

/// Header, one row per record, then `#` footer lines with the summary.
pub fn write_csv<W: Write>(run: &BenchRun, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &run.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.op_index,
            r.op_kind,
            r.n_before,
            r.r_before,
            r.tree_primitive_count,
            r.side_map_updates,
            r.wall_time_nanoseconds
        )?;
    }
    let s = &run.summary;
    writeln!(w, "# cost_constant={COST_CONSTANT}")?;
    writeln!(
        w,
        "# mutations={} inserts={} appends={} deletes={} relabels={}",
        s.mutations, s.inserts, s.appends, s.deletes, s.relabels
    )?;
    writeln!(w, "# max_insert_ratio={:.4}", s.max_insert_ratio)?;
    writeln!(w, "# max_append_ratio={:.4}", s.max_append_ratio)?;
    writeln!(w, "# max_delete_ratio={:.4}", s.max_delete_ratio)?;
    writeln!(w, "# relabel_rebuild_tree_ops={}", s.rebuild_costs.tree_primitive_count())?;
    Ok(())
}
