use thiserror::Error;

use crate::counters::CostCounters;
use crate::levels::{Element, IndexKey};
use crate::tree::AvlTree;
use crate::workload::trace::WorkloadOp;

/// Spacing used for keys allocated at either end and after a relabel.
pub const LABEL_STRIDE: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error("position {pos} out of range for {len} elements")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("key {0} not found")]
    KeyNotFound(IndexKey),
    #[error("key {0} already present")]
    DuplicateKey(IndexKey),
}

/// Old-to-new key mapping produced when the label space between two
/// neighbours ran out. Pairs are in key order; the relabel is order preserving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabel {
    pub mapping: Vec<(IndexKey, IndexKey)>,
}

/// Keyed form of a [`WorkloadOp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyedOp {
    Insert(Element),
    /// The new key exceeds every live key.
    Append(Element),
    Delete(IndexKey),
    Query,
    Extract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub op: KeyedOp,
    /// Set when this op forced a relabel; applied before `op`'s key was chosen.
    pub relabel: Option<Relabel>,
}

/// Maps list positions to integer keys whose order matches the positions.
///
/// New keys go at the midpoint of their neighbours' keys, or one
/// [`LABEL_STRIDE`] past the end when inserted at either end. When no integer
/// is left between two neighbours every live key is respaced evenly.
#[derive(Debug, Clone, Default)]
pub struct PositionalAdapter {
    keys: AvlTree<IndexKey, ()>,
    meter: CostCounters,
    relabels: u64,
}

fn midpoint(lo: i128, hi: i128) -> Option<IndexKey> {
    (hi - lo >= 2).then(|| (lo + (hi - lo) / 2) as IndexKey)
}

const LO: i128 = i64::MIN as i128;
const HI: i128 = i64::MAX as i128;

impl PositionalAdapter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Number of relabels performed so far.
    pub fn relabels(&self) -> u64 {
        self.relabels
    }

    /// Tree work spent on position lookups; kept apart from the forest's budget.
    pub fn costs(&self) -> CostCounters {
        self.meter
    }

    pub fn keys(&self) -> impl Iterator<Item = IndexKey> + '_ {
        self.keys.iter().map(|(k, _)| *k)
    }

    pub fn key_at(&mut self, pos: usize) -> Result<IndexKey, AdapterError> {
        let len = self.len();
        self.keys
            .select(pos, &mut self.meter)
            .map(|(k, _)| *k)
            .ok_or(AdapterError::PositionOutOfRange { pos, len })
    }

    pub fn contains(&mut self, key: IndexKey) -> bool {
        self.keys.get(&key, &mut self.meter).is_some()
    }

    fn first(&mut self) -> Option<IndexKey> {
        self.keys.first(&mut self.meter).map(|(k, _)| *k)
    }

    fn last(&mut self) -> Option<IndexKey> {
        self.keys.last(&mut self.meter).map(|(k, _)| *k)
    }

    fn front_label(&mut self) -> Option<IndexKey> {
        match self.first() {
            None => Some(0),
            Some(f) => f
                .checked_sub(LABEL_STRIDE)
                .filter(|&k| k > i64::MIN)
                .or_else(|| midpoint(LO, f as i128)),
        }
    }

    fn back_label(&mut self) -> Option<IndexKey> {
        match self.last() {
            None => Some(0),
            Some(l) => l
                .checked_add(LABEL_STRIDE)
                .filter(|&k| k < i64::MAX)
                .or_else(|| midpoint(l as i128, HI)),
        }
    }

    fn after_label(&mut self, pos: usize) -> Result<Option<IndexKey>, AdapterError> {
        let len = self.len();
        if pos >= len {
            return Err(AdapterError::PositionOutOfRange { pos, len });
        }
        if pos + 1 == len {
            return Ok(self.back_label());
        }
        let a = self.key_at(pos)?;
        let b = self.key_at(pos + 1)?;
        Ok(midpoint(a as i128, b as i128))
    }

    /// Respaces every live key evenly around zero.
    pub fn relabel(&mut self) -> Relabel {
        let n = self.len() as i128;
        let stride = (LABEL_STRIDE as i128).min((HI - LO) / (n + 2)).max(1);
        let old: Vec<IndexKey> = self.keys().collect();
        let mut tree = AvlTree::new();
        let mut mapping = Vec::with_capacity(old.len());
        for (i, k) in old.into_iter().enumerate() {
            let new = ((i as i128 - n / 2) * stride) as IndexKey;
            tree = tree.push_back(new, (), &mut self.meter);
            mapping.push((k, new));
        }
        self.keys = tree;
        self.relabels += 1;
        Relabel { mapping }
    }

    fn allocate<F>(&mut self, mut label: F) -> Result<(IndexKey, Option<Relabel>), AdapterError>
    where
        F: FnMut(&mut Self) -> Result<Option<IndexKey>, AdapterError>,
    {
        if let Some(k) = label(self)? {
            self.keys.insert(k, (), &mut self.meter);
            return Ok((k, None));
        }
        let relabel = self.relabel();
        let k = label(self)?.expect("relabel leaves room between neighbours");
        self.keys.insert(k, (), &mut self.meter);
        Ok((k, Some(relabel)))
    }

    pub fn insert_front(&mut self) -> (IndexKey, Option<Relabel>) {
        self.allocate(|a| Ok(a.front_label())).expect("front insertion cannot fail")
    }

    pub fn append(&mut self) -> (IndexKey, Option<Relabel>) {
        self.allocate(|a| Ok(a.back_label())).expect("append cannot fail")
    }

    /// Allocates a key for a new element placed right after position `pos`.
    pub fn insert_after(&mut self, pos: usize) -> Result<(IndexKey, Option<Relabel>), AdapterError> {
        self.allocate(|a| a.after_label(pos))
    }

    /// Registers an explicit key.
    pub fn insert_key(&mut self, key: IndexKey) -> Result<(), AdapterError> {
        if self.contains(key) {
            return Err(AdapterError::DuplicateKey(key));
        }
        self.keys.insert(key, (), &mut self.meter);
        Ok(())
    }

    pub fn remove_pos(&mut self, pos: usize) -> Result<IndexKey, AdapterError> {
        let key = self.key_at(pos)?;
        self.keys.remove(&key, &mut self.meter);
        Ok(key)
    }

    pub fn remove_key(&mut self, key: IndexKey) -> Result<(), AdapterError> {
        self.keys
            .remove(&key, &mut self.meter)
            .ok_or(AdapterError::KeyNotFound(key))
    }

    /// Turns a positional op into a keyed one, updating the live key set.
    pub fn resolve(&mut self, op: WorkloadOp) -> Result<Resolved, AdapterError> {
        let (op, relabel) = match op {
            WorkloadOp::InsertKey { key, value } => {
                let is_append = self.last().is_none_or(|l| key > l);
                self.insert_key(key)?;
                let e = Element::new(key, value);
                (if is_append { KeyedOp::Append(e) } else { KeyedOp::Insert(e) }, None)
            }
            WorkloadOp::InsertAfterPos { pos, value } => {
                let (key, relabel) = self.insert_after(pos)?;
                (KeyedOp::Insert(Element::new(key, value)), relabel)
            }
            WorkloadOp::InsertFront { value } => {
                let (key, relabel) = self.insert_front();
                (KeyedOp::Insert(Element::new(key, value)), relabel)
            }
            WorkloadOp::Append { value } => {
                let (key, relabel) = self.append();
                (KeyedOp::Append(Element::new(key, value)), relabel)
            }
            WorkloadOp::DeleteKey { key } => {
                self.remove_key(key)?;
                (KeyedOp::Delete(key), None)
            }
            WorkloadOp::DeletePos { pos } => (KeyedOp::Delete(self.remove_pos(pos)?), None),
            WorkloadOp::QueryLength => (KeyedOp::Query, None),
            WorkloadOp::Extract => (KeyedOp::Extract, None),
        };
        Ok(Resolved { op, relabel })
    }
}
