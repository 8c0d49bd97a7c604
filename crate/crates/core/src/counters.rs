use std::fmt;
use std::ops::{Add, AddAssign, Sub};

/// Work performed by the tree primitives during one public operation.
///
/// The invocation fields count calls into the primitive layer. `node_visits`
/// and `rotations_or_rebalances` count the work those calls did, and
/// `directory_probes` counts comparisons made against the per-level tails
/// directory. [`CostCounters::tree_primitive_count`] is the figure the
/// complexity checks are judged on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostCounters {
    pub splits: u64,
    pub joins: u64,
    pub pred_queries: u64,
    pub succ_queries: u64,
    pub value_searches: u64,
    pub min_max_queries: u64,
    pub point_updates: u64,
    pub rotations_or_rebalances: u64,
    pub node_visits: u64,
    pub directory_probes: u64,
}

impl CostCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Primitive calls plus the work they did: nodes touched, rotations
    /// performed and tails directory probes.
    pub fn tree_primitive_count(&self) -> u64 {
        self.invocations() + self.node_visits + self.rotations_or_rebalances + self.directory_probes
    }

    /// Number of primitive calls, irrespective of their size.
    pub fn invocations(&self) -> u64 {
        self.splits
            + self.joins
            + self.pred_queries
            + self.succ_queries
            + self.value_searches
            + self.min_max_queries
            + self.point_updates
    }

    #[inline]
    pub(crate) fn visit(&mut self) {
        self.node_visits += 1;
    }

    #[inline]
    pub(crate) fn rotate(&mut self, n: u64) {
        self.rotations_or_rebalances += n;
    }
}

impl Add for CostCounters {
    type Output = CostCounters;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for CostCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.splits += rhs.splits;
        self.joins += rhs.joins;
        self.pred_queries += rhs.pred_queries;
        self.succ_queries += rhs.succ_queries;
        self.value_searches += rhs.value_searches;
        self.min_max_queries += rhs.min_max_queries;
        self.point_updates += rhs.point_updates;
        self.rotations_or_rebalances += rhs.rotations_or_rebalances;
        self.node_visits += rhs.node_visits;
        self.directory_probes += rhs.directory_probes;
    }
}

// Saturating so that a delta against a reset snapshot never underflows.
impl Sub for CostCounters {
    type Output = CostCounters;

    fn sub(self, rhs: Self) -> Self {
        CostCounters {
            splits: self.splits.saturating_sub(rhs.splits),
            joins: self.joins.saturating_sub(rhs.joins),
            pred_queries: self.pred_queries.saturating_sub(rhs.pred_queries),
            succ_queries: self.succ_queries.saturating_sub(rhs.succ_queries),
            value_searches: self.value_searches.saturating_sub(rhs.value_searches),
            min_max_queries: self.min_max_queries.saturating_sub(rhs.min_max_queries),
            point_updates: self.point_updates.saturating_sub(rhs.point_updates),
            rotations_or_rebalances: self
                .rotations_or_rebalances
                .saturating_sub(rhs.rotations_or_rebalances),
            node_visits: self.node_visits.saturating_sub(rhs.node_visits),
            directory_probes: self.directory_probes.saturating_sub(rhs.directory_probes),
        }
    }
}

impl fmt::Display for CostCounters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "splits={} joins={} pred={} succ={} value={} minmax={} point={} rot={} visits={} probes={}",
            self.splits,
            self.joins,
            self.pred_queries,
            self.succ_queries,
            self.value_searches,
            self.min_max_queries,
            self.point_updates,
            self.rotations_or_rebalances,
            self.node_visits,
            self.directory_probes
        )
    }
}
