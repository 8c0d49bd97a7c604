//! Level sets: index-ordered sets of elements whose values never increase
//! along the index order.

use std::fmt;

use thiserror::Error;

use crate::counters::CostCounters;
use crate::tree::AvlTree;

pub type IndexKey = i64;
pub type Value = i64;

/// An `(index, value)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub index: IndexKey,
    pub value: Value,
}

impl Element {
    pub const fn new(index: IndexKey, value: Value) -> Self {
        Element { index, value }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.index, self.value)
    }
}

impl From<(IndexKey, Value)> for Element {
    fn from((index, value): (IndexKey, Value)) -> Self {
        Element { index, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// One level of the forest.
///
/// Ordered by index; traversal in index order yields non-increasing values.
/// Every method takes the cost meter of the operation it is part of.
#[derive(Clone, Debug, Default)]
pub struct LevelSet {
    tree: AvlTree<IndexKey, Value>,
}

fn elem((k, v): (&IndexKey, &Value)) -> Element {
    Element::new(*k, *v)
}

impl LevelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(e: Element) -> Self {
        LevelSet {
            tree: AvlTree::singleton(e.index, e.value),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn height(&self) -> usize {
        self.tree.height()
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.tree.iter().map(elem)
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    /// Builds a level set from index-sorted elements, validating the value order.
    pub fn from_sorted(elems: &[Element], m: &mut CostCounters) -> Result<Self, LevelError> {
        elems
            .iter()
            .try_fold(LevelSet::new(), |ls, &e| ls.insert_max(e, m))
    }

    pub fn min(&self, m: &mut CostCounters) -> Option<Element> {
        m.min_max_queries += 1;
        self.tree.first(m).map(elem)
    }

    pub fn max(&self, m: &mut CostCounters) -> Option<Element> {
        m.min_max_queries += 1;
        self.tree.last(m).map(elem)
    }

    /// Appends `e` after the current maximum index.
    pub fn insert_max(self, e: Element, m: &mut CostCounters) -> Result<Self, LevelError> {
        if let Some(last) = self.max(m) {
            if e.index <= last.index {
                return Err(LevelError::PreconditionViolated(format!(
                    "index {} not above current maximum {}",
                    e.index, last.index
                )));
            }
            if e.value > last.value {
                return Err(LevelError::PreconditionViolated(format!(
                    "value {} exceeds value {} of the current last element",
                    e.value, last.value
                )));
            }
        }
        m.point_updates += 1;
        Ok(LevelSet {
            tree: self.tree.push_back(e.index, e.value, m),
        })
    }

    /// Element with the largest index strictly below `i`.
    pub fn pred_by_index(&self, i: IndexKey, m: &mut CostCounters) -> Option<Element> {
        m.pred_queries += 1;
        self.tree.pred(&i, m).map(elem)
    }

    /// Element with the smallest index strictly above `i`.
    pub fn succ_by_index(&self, i: IndexKey, m: &mut CostCounters) -> Option<Element> {
        m.succ_queries += 1;
        self.tree.succ(&i, m).map(elem)
    }

    pub fn get(&self, i: IndexKey, m: &mut CostCounters) -> Option<Element> {
        self.tree.get(&i, m).map(|v| Element::new(i, *v))
    }

    /// Maximum-index element with value strictly above `v`. The qualifying
    /// elements form an index prefix, so this is a single descent.
    pub fn last_with_value_above(&self, v: Value, m: &mut CostCounters) -> Option<Element> {
        m.value_searches += 1;
        self.tree.last_where(|_, val| *val > v, m).map(elem)
    }

    /// `(index <= i, index > i)`.
    pub fn split_at(self, i: IndexKey, m: &mut CostCounters) -> (LevelSet, LevelSet) {
        m.splits += 1;
        let (l, r) = self.tree.split_by(|k, _| *k <= i, m);
        (LevelSet { tree: l }, LevelSet { tree: r })
    }

    /// `(index < i, index >= i)`.
    pub fn split_before(self, i: IndexKey, m: &mut CostCounters) -> (LevelSet, LevelSet) {
        m.splits += 1;
        let (l, r) = self.tree.split_by(|k, _| *k < i, m);
        (LevelSet { tree: l }, LevelSet { tree: r })
    }

    /// `(value > v, value <= v)`: the index prefix whose values exceed `v`
    /// and the remaining suffix.
    pub fn split_above_value(self, v: Value, m: &mut CostCounters) -> (LevelSet, LevelSet) {
        m.splits += 1;
        let (l, r) = self.tree.split_by(|_, val| *val > v, m);
        (LevelSet { tree: l }, LevelSet { tree: r })
    }

    /// Ordered union of two level sets whose index ranges do not interleave and
    /// whose boundary values keep the non-increasing order.
    pub fn join(self, right: LevelSet, m: &mut CostCounters) -> Result<LevelSet, LevelError> {
        m.joins += 1;
        if self.is_empty() {
            return Ok(right);
        }
        if right.is_empty() {
            return Ok(self);
        }
        let a = self.max(m).expect("nonempty");
        let b = right.min(m).expect("nonempty");
        if a.index >= b.index {
            return Err(LevelError::PreconditionViolated(format!(
                "index ranges overlap: left ends at {} and right starts at {}",
                a.index, b.index
            )));
        }
        if a.value < b.value {
            return Err(LevelError::PreconditionViolated(format!(
                "value order broken at the seam: {a} then {b}"
            )));
        }
        Ok(LevelSet {
            tree: self.tree.concat(right.tree, m),
        })
    }

    /// Tree shape plus the non-increasing value order.
    pub fn check(&self) -> Result<(), String> {
        self.tree.check()?;
        let mut prev: Option<Element> = None;
        for e in self.iter() {
            if let Some(p) = prev {
                if p.value < e.value {
                    return Err(format!("values increase from {p} to {e}"));
                }
            }
            prev = Some(e);
        }
        Ok(())
    }
}

impl PartialEq for LevelSet {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().eq(other.iter())
    }
}

impl Eq for LevelSet {}
