//! The dynamic LIS forest.
//!
//! Elements are partitioned into level sets `L_1..L_m`, where an element's
//! level is the length of the longest strictly increasing subsequence ending
//! at it. Inside one level the values never increase along the index order,
//! and each element of `L_k` (k > 1) is dominated by its index-predecessor in
//! `L_{k-1}`. Those two facts make every set of elements whose level changes
//! during one insertion or deletion a contiguous index range of its level, so
//! a mutation is a handful of splits and joins per touched level.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::counters::CostCounters;
use crate::levels::{Element, IndexKey, LevelError, LevelSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynLisError {
    #[error("index {0} is already present")]
    DuplicateIndex(IndexKey),
    #[error("index {0} not found")]
    IndexNotFound(IndexKey),
    #[error("index {index} is not an append (current maximum index is {max})")]
    NotAnAppend { index: IndexKey, max: IndexKey },
    #[error("invalid level {level}: {reason}")]
    InvalidLevel { level: usize, reason: String },
    /// An internal join or split precondition failed mid-mutation. The
    /// structure is left in an unspecified state and must be discarded.
    #[error("structural bug: {0}")]
    StructuralBug(String),
}

fn bug(e: LevelError) -> DynLisError {
    DynLisError::StructuralBug(e.to_string())
}

/// First invariant found broken by [`DynLis::check_invariants`]. Levels are
/// reported 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyLevel { level: usize },
    TreeShape { level: usize, detail: String },
    ValueOrder { level: usize, earlier: Element, later: Element },
    PredecessorSupport { level: usize, element: Element, predecessor: Option<Element> },
    TailMismatch { level: usize, recorded: Option<Element>, actual: Option<Element> },
    TailsNotIncreasing { level: usize, lower: Element, upper: Element },
    Partition { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyLevel { level } => write!(f, "level {level} is empty"),
            Violation::TreeShape { level, detail } => write!(f, "level {level} tree: {detail}"),
            Violation::ValueOrder { level, earlier, later } => write!(
                f,
                "level {level} values not non-increasing: {earlier} precedes {later}"
            ),
            Violation::PredecessorSupport { level, element, predecessor } => match predecessor {
                Some(p) => write!(
                    f,
                    "element {element} at level {level}: predecessor {p} one level down does not have a smaller value"
                ),
                None => write!(
                    f,
                    "element {element} at level {level}: no predecessor one level down"
                ),
            },
            Violation::TailMismatch { level, recorded, actual } => write!(
                f,
                "tail of level {level} recorded as {recorded:?} but level maximum is {actual:?}"
            ),
            Violation::TailsNotIncreasing { level, lower, upper } => write!(
                f,
                "tail values not strictly increasing between level {level} ({lower}) and level {} ({upper})",
                level + 1
            ),
            Violation::Partition { detail } => write!(f, "partition: {detail}"),
        }
    }
}

/// Level-set forest with a tails directory and a side map from index to level.
#[derive(Clone, Debug, Default)]
pub struct DynLis {
    levels: Vec<LevelSet>,
    // Max-index element of each level; values strictly increase with level.
    tails: Vec<Element>,
    // index -> 1-based level
    level_of: BTreeMap<IndexKey, usize>,
    last_costs: CostCounters,
    last_side_updates: u64,
}

impl DynLis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a forest from explicit level contents without checking that
    /// levels match the LIS definition. Each level must be index-sorted with
    /// non-increasing values and nonempty, and indices must be distinct.
    /// Intended for tests and for reproducing reported states; run
    /// [`DynLis::check_invariants`] afterwards.
    pub fn from_raw_levels(levels: Vec<Vec<Element>>) -> Result<Self, DynLisError> {
        let mut d = DynLis::new();
        let mut m = CostCounters::new();
        for (k, elems) in levels.into_iter().enumerate() {
            if elems.is_empty() {
                return Err(DynLisError::InvalidLevel {
                    level: k + 1,
                    reason: "empty".into(),
                });
            }
            for e in &elems {
                if d.level_of.insert(e.index, k + 1).is_some() {
                    return Err(DynLisError::DuplicateIndex(e.index));
                }
            }
            let ls = LevelSet::from_sorted(&elems, &mut m).map_err(|e| DynLisError::InvalidLevel {
                level: k + 1,
                reason: e.to_string(),
            })?;
            d.tails.push(*elems.last().expect("nonempty"));
            d.levels.push(ls);
        }
        Ok(d)
    }

    /// Number of stored elements.
    pub fn len(&self) -> usize {
        self.level_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.level_of.is_empty()
    }

    /// Length of the longest strictly increasing subsequence.
    pub fn lis_length(&self) -> usize {
        self.levels.len()
    }

    pub fn contains(&self, i: IndexKey) -> bool {
        self.level_of.contains_key(&i)
    }

    pub fn max_index(&self) -> Option<IndexKey> {
        self.level_of.keys().next_back().copied()
    }

    pub fn levels(&self) -> &[LevelSet] {
        &self.levels
    }

    /// Per-level element lists, level 1 first.
    pub fn level_snapshot(&self) -> Vec<Vec<Element>> {
        self.levels.iter().map(LevelSet::to_vec).collect()
    }

    /// Tails directory: the max-index element of each level.
    pub fn tails(&self) -> &[Element] {
        &self.tails
    }

    /// Index to 1-based level for every element.
    pub fn level_map(&self) -> &BTreeMap<IndexKey, usize> {
        &self.level_of
    }

    /// All elements in index order.
    pub fn elements(&self) -> Vec<Element> {
        let mut all: Vec<Element> = self.levels.iter().flat_map(LevelSet::iter).collect();
        all.sort_unstable_by_key(|e| e.index);
        all
    }

    /// Tree work done by the most recent mutation.
    pub fn last_costs(&self) -> CostCounters {
        self.last_costs
    }

    /// Side-map writes done by the most recent mutation. Not part of the
    /// tree budget.
    pub fn last_side_updates(&self) -> u64 {
        self.last_side_updates
    }

    /// 1-based level of the element at index `i`.
    pub fn level_of(&self, i: IndexKey) -> Result<usize, DynLisError> {
        self.level_of.get(&i).copied().ok_or(DynLisError::IndexNotFound(i))
    }

    /// Level `e` would occupy if inserted now.
    pub fn find_insert_level(&self, e: Element) -> usize {
        self.insert_level(e, &mut CostCounters::new())
    }

    // Largest k whose index-predecessor of `e` in L_k has a smaller value.
    // That predicate is downward closed in k, so binary search applies.
    fn insert_level(&self, e: Element, m: &mut CostCounters) -> usize {
        let (mut lo, mut hi) = (0usize, self.levels.len());
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            let supported = self.levels[mid - 1]
                .pred_by_index(e.index, m)
                .is_some_and(|p| p.value < e.value);
            if supported {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo + 1
    }

    /// Inserts `e` anywhere in the sequence.
    pub fn insert(&mut self, e: Element) -> Result<(), DynLisError> {
        if self.contains(e.index) {
            return Err(DynLisError::DuplicateIndex(e.index));
        }
        let mut m = CostCounters::new();
        let mut side = 0;
        let level = self.insert_level(e, &mut m);
        let res = self.promote(e, level - 1, &mut m, &mut side);
        self.last_costs = m;
        self.last_side_updates = side;
        res
    }

    // Places `e` on level `start` (0-based) and pushes each displaced range
    // one level up until nothing is displaced.
    fn promote(&mut self, e: Element, start: usize, m: &mut CostCounters, side: &mut u64) -> Result<(), DynLisError> {
        let mut carry = LevelSet::singleton(e);
        let mut carry_min = e.index;
        let mut carry_max = e;
        let mut k = start;
        loop {
            for x in carry.iter() {
                self.level_of.insert(x.index, k + 1);
            }
            *side += carry.len() as u64;

            if k == self.levels.len() {
                self.levels.push(carry);
                self.tails.push(carry_max);
                return Ok(());
            }

            let level = std::mem::take(&mut self.levels[k]);
            // Displaced: index above carry_min and value above carry_max's.
            // Values do not increase with index, so that is one contiguous run.
            let (left, rest) = level.split_at(carry_min, m);
            let (displaced, right) = rest.split_above_value(carry_max.value, m);
            if right.is_empty() {
                self.tails[k] = carry_max;
            }
            self.levels[k] = left.join(carry, m).and_then(|t| t.join(right, m)).map_err(bug)?;

            let (Some(lo), Some(hi)) = (displaced.min(m), displaced.max(m)) else {
                return Ok(());
            };
            carry_min = lo.index;
            carry_max = hi;
            carry = displaced;
            k += 1;
        }
    }

    /// Appends `e` after every stored index: a tails binary search and one
    /// push onto a single level.
    pub fn insert_append(&mut self, e: Element) -> Result<(), DynLisError> {
        if self.contains(e.index) {
            return Err(DynLisError::DuplicateIndex(e.index));
        }
        if let Some(max) = self.max_index() {
            if e.index < max {
                return Err(DynLisError::NotAnAppend { index: e.index, max });
            }
        }
        let mut m = CostCounters::new();
        let (mut lo, mut hi) = (0usize, self.tails.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            m.directory_probes += 1;
            if self.tails[mid].value < e.value {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let res = if lo == self.levels.len() {
            self.levels.push(LevelSet::singleton(e));
            self.tails.push(e);
            Ok(())
        } else {
            let level = std::mem::take(&mut self.levels[lo]);
            match level.insert_max(e, &mut m) {
                Ok(ls) => {
                    self.levels[lo] = ls;
                    self.tails[lo] = e;
                    Ok(())
                }
                Err(err) => Err(bug(err)),
            }
        };
        if res.is_ok() {
            self.level_of.insert(e.index, lo + 1);
        }
        self.last_costs = m;
        self.last_side_updates = 1;
        res
    }

    /// Removes the element at index `i`.
    pub fn delete(&mut self, i: IndexKey) -> Result<(), DynLisError> {
        let k0 = self.level_of(i)? - 1;
        let mut m = CostCounters::new();
        let mut side = 0;
        let res = self.demote(i, k0, &mut m, &mut side);
        self.last_costs = m;
        self.last_side_updates = side;
        res
    }

    // Removes `i` from level `k0` (0-based), then repeatedly moves the
    // elements of the next level whose whole support vanished down into the
    // hole. The vanished support of level k is a contiguous range with
    // smallest index `gap_lo`, followed by the survivor `gap_hi` and preceded
    // by a survivor of value `ceiling`. An element of L_{k+1} loses all its
    // support iff its index lies in (gap_lo, gap_hi) and its value does not
    // exceed the ceiling.
    fn demote(&mut self, i: IndexKey, k0: usize, m: &mut CostCounters, side: &mut u64) -> Result<(), DynLisError> {
        self.level_of.remove(&i);
        *side += 1;

        let level = std::mem::take(&mut self.levels[k0]);
        let mut ceiling = level.pred_by_index(i, m).map(|e| e.value);
        let (mut hole_left, rest) = level.split_before(i, m);
        let (_, mut hole_right) = rest.split_at(i, m);
        let mut gap_lo = i;
        let mut gap_hi = hole_right.min(m).map(|e| e.index);
        let mut k = k0;

        loop {
            if k + 1 == self.levels.len() {
                let merged = hole_left.join(hole_right, m).map_err(bug)?;
                self.set_level(k, merged, m);
                break;
            }

            let upper = std::mem::take(&mut self.levels[k + 1]);
            let (u_left, rest) = upper.split_at(gap_lo, m);
            let (window, u_right) = match gap_hi {
                Some(h) => rest.split_before(h, m),
                None => (rest, LevelSet::new()),
            };
            let (stay, dropped) = match ceiling {
                None => (LevelSet::new(), window),
                Some(c) => window.split_above_value(c, m),
            };

            if dropped.is_empty() {
                let merged = hole_left.join(hole_right, m).map_err(bug)?;
                self.set_level(k, merged, m);
                self.levels[k + 1] = u_left
                    .join(stay, m)
                    .and_then(|t| t.join(u_right, m))
                    .map_err(bug)?;
                break;
            }

            let next_lo = dropped.min(m).expect("nonempty").index;
            let next_hi = u_right.min(m).map(|e| e.index);
            let next_ceiling = match stay.max(m) {
                Some(e) => Some(e.value),
                None => u_left.max(m).map(|e| e.value),
            };
            for x in dropped.iter() {
                self.level_of.insert(x.index, k + 1);
            }
            *side += dropped.len() as u64;

            let merged = hole_left
                .join(dropped, m)
                .and_then(|t| t.join(hole_right, m))
                .map_err(bug)?;
            self.set_level(k, merged, m);

            hole_left = u_left.join(stay, m).map_err(bug)?;
            hole_right = u_right;
            gap_lo = next_lo;
            gap_hi = next_hi;
            ceiling = next_ceiling;
            k += 1;
        }

        while self.levels.last().is_some_and(LevelSet::is_empty) {
            self.levels.pop();
            self.tails.pop();
        }
        Ok(())
    }

    fn set_level(&mut self, k: usize, ls: LevelSet, m: &mut CostCounters) {
        if let Some(t) = ls.max(m) {
            self.tails[k] = t;
        }
        self.levels[k] = ls;
    }

    /// A maximum-length strictly increasing subsequence, in index order.
    ///
    /// Starts at the max-index element of the top level and follows
    /// index-predecessors downward.
    pub fn extract_lis(&self) -> Vec<Element> {
        self.extract_lis_counted().0
    }

    pub fn extract_lis_counted(&self) -> (Vec<Element>, CostCounters) {
        let mut m = CostCounters::new();
        let Some(&top) = self.tails.last() else {
            return (Vec::new(), m);
        };
        let mut out = Vec::with_capacity(self.levels.len());
        out.push(top);
        for level in self.levels[..self.levels.len() - 1].iter().rev() {
            let next = out.last().expect("nonempty").index;
            let p = level
                .pred_by_index(next, &mut m)
                .expect("every element above level 1 has a predecessor one level down");
            out.push(p);
        }
        out.reverse();
        (out, m)
    }

    /// Full linear sweep over every structural invariant.
    pub fn check_invariants(&self) -> Result<(), Violation> {
        if self.levels.len() != self.tails.len() {
            return Err(Violation::Partition {
                detail: format!("{} levels but {} tails", self.levels.len(), self.tails.len()),
            });
        }
        let mut total = 0usize;
        for (k, level) in self.levels.iter().enumerate() {
            let lvl = k + 1;
            if level.is_empty() {
                return Err(Violation::EmptyLevel { level: lvl });
            }
            if let Err(detail) = level.check() {
                return Err(Violation::TreeShape { level: lvl, detail });
            }
            let elems = level.to_vec();
            if let Some(w) = elems.windows(2).find(|w| w[0].value < w[1].value) {
                return Err(Violation::ValueOrder {
                    level: lvl,
                    earlier: w[0],
                    later: w[1],
                });
            }
            for e in &elems {
                if self.level_of.get(&e.index) != Some(&lvl) {
                    return Err(Violation::Partition {
                        detail: format!(
                            "element {e} stored on level {lvl} but side map says {:?}",
                            self.level_of.get(&e.index)
                        ),
                    });
                }
            }
            total += elems.len();

            if k > 0 {
                // Merge walk against the level below.
                let below = self.levels[k - 1].to_vec();
                let mut j = 0;
                for e in &elems {
                    while j < below.len() && below[j].index < e.index {
                        j += 1;
                    }
                    let pred = j.checked_sub(1).map(|p| below[p]);
                    if !pred.is_some_and(|p| p.value < e.value) {
                        return Err(Violation::PredecessorSupport {
                            level: lvl,
                            element: *e,
                            predecessor: pred,
                        });
                    }
                }
            }
            let actual = elems.last().copied();
            if actual != Some(self.tails[k]) {
                return Err(Violation::TailMismatch {
                    level: lvl,
                    recorded: Some(self.tails[k]),
                    actual,
                });
            }
            if k > 0 && self.tails[k - 1].value >= self.tails[k].value {
                return Err(Violation::TailsNotIncreasing {
                    level: k,
                    lower: self.tails[k - 1],
                    upper: self.tails[k],
                });
            }
        }
        if total != self.level_of.len() {
            return Err(Violation::Partition {
                detail: format!("{} elements in levels but {} in side map", total, self.level_of.len()),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: i64, v: i64) -> Element {
        Element::new(i, v)
    }

    fn staircase() -> DynLis {
        DynLis::from_raw_levels(vec![vec![e(10, 1)], vec![e(20, 5)], vec![e(30, 9)]]).unwrap()
    }

    fn appended(values: &[i64]) -> DynLis {
        let mut d = DynLis::new();
        for (i, &v) in values.iter().enumerate() {
            d.insert_append(e(i as i64 + 1, v)).unwrap();
        }
        d
    }

    const PI: [i64; 8] = [3, 1, 4, 1, 5, 9, 2, 6];

    #[test]
    fn find_insert_level_cases() {
        assert_eq!(DynLis::new().find_insert_level(e(10, 5)), 1);
        let d = staircase();
        assert_eq!(d.find_insert_level(e(15, 3)), 2);
        assert_eq!(d.find_insert_level(e(5, 0)), 1);
    }

    #[test]
    fn insert_into_middle_promotes_chain() {
        let mut d = staircase();
        d.insert(e(15, 3)).unwrap();
        assert_eq!(
            d.level_snapshot(),
            vec![vec![e(10, 1)], vec![e(15, 3)], vec![e(20, 5)], vec![e(30, 9)]]
        );
        assert_eq!(d.lis_length(), 4);
        d.check_invariants().unwrap();
    }

    #[test]
    fn insert_into_empty() {
        let mut d = DynLis::new();
        d.insert(e(10, 5)).unwrap();
        assert_eq!(d.level_snapshot(), vec![vec![e(10, 5)]]);
        assert_eq!(d.lis_length(), 1);
    }

    #[test]
    fn pi_digits_levels() {
        let expected = vec![
            vec![e(1, 3), e(2, 1), e(4, 1)],
            vec![e(3, 4), e(7, 2)],
            vec![e(5, 5)],
            vec![e(6, 9), e(8, 6)],
        ];
        let a = appended(&PI);
        assert_eq!(a.level_snapshot(), expected);
        let mut b = DynLis::new();
        for (i, &v) in PI.iter().enumerate() {
            b.insert(e(i as i64 + 1, v)).unwrap();
        }
        assert_eq!(b.level_snapshot(), expected);
        assert_eq!(a.lis_length(), 4);
        assert_eq!(a.level_of(7), Ok(2));
    }

    #[test]
    fn duplicate_index_rejected() {
        let mut d = staircase();
        assert_eq!(d.insert(e(20, 0)), Err(DynLisError::DuplicateIndex(20)));
        assert_eq!(d.insert_append(e(30, 100)), Err(DynLisError::DuplicateIndex(30)));
    }

    #[test]
    fn append_path_cases() {
        let tails = || DynLis::from_raw_levels(vec![vec![e(1, 1)], vec![e(2, 5)], vec![e(3, 9)]]).unwrap();
        let mut d = tails();
        d.insert_append(e(4, 6)).unwrap();
        assert_eq!(d.level_of(4), Ok(3));
        assert_eq!(d.tails()[2], e(4, 6));
        assert_eq!(d.lis_length(), 3);

        let mut d = tails();
        d.insert_append(e(4, 12)).unwrap();
        assert_eq!(d.lis_length(), 4);

        let mut d = tails();
        d.insert_append(e(4, 0)).unwrap();
        assert_eq!(d.level_of(4), Ok(1));

        let mut d = tails();
        assert_eq!(
            d.insert_append(e(2, 0)),
            Err(DynLisError::DuplicateIndex(2))
        );
        assert_eq!(
            d.insert_append(e(0, 0)),
            Err(DynLisError::NotAnAppend { index: 0, max: 3 })
        );
    }

    #[test]
    fn delete_cases() {
        let mut d = staircase();
        d.insert(e(15, 3)).unwrap();
        d.delete(15).unwrap();
        assert_eq!(d.level_snapshot(), vec![vec![e(10, 1)], vec![e(20, 5)], vec![e(30, 9)]]);
        d.check_invariants().unwrap();

        let mut one = DynLis::new();
        one.insert(e(1, 1)).unwrap();
        one.delete(1).unwrap();
        assert!(one.is_empty());
        assert_eq!(one.lis_length(), 0);
        one.check_invariants().unwrap();

        let mut p = appended(&PI);
        p.delete(2).unwrap();
        assert_eq!(p.level_snapshot()[0], vec![e(1, 3), e(4, 1)]);
        assert_eq!(p.level_of(3), Ok(2));
        p.check_invariants().unwrap();

        assert_eq!(p.delete(99), Err(DynLisError::IndexNotFound(99)));
    }

    #[test]
    fn delete_cascades_to_top() {
        // 1 2 3 4: deleting the first shifts everything down.
        let mut d = appended(&[1, 2, 3, 4]);
        d.delete(1).unwrap();
        assert_eq!(d.lis_length(), 3);
        assert_eq!(d.level_of(4), Ok(3));
        d.check_invariants().unwrap();
    }

    #[test]
    fn delete_keeps_element_supported_outside_range() {
        // Level 1 holds (1,10),(2,5),(3,3); (4,4) sits on level 2 supported by (3,3) only.
        let mut d = appended(&[10, 5, 3, 4]);
        assert_eq!(d.level_of(4), Ok(2));
        d.delete(2).unwrap();
        assert_eq!(d.level_of(4), Ok(2));
        d.delete(3).unwrap();
        assert_eq!(d.level_of(4), Ok(1));
        d.check_invariants().unwrap();
    }

    #[test]
    fn extract_cases() {
        assert!(DynLis::new().extract_lis().is_empty());
        let mut d = staircase();
        d.insert(e(15, 3)).unwrap();
        assert_eq!(d.extract_lis(), vec![e(10, 1), e(15, 3), e(20, 5), e(30, 9)]);
        let w = appended(&PI).extract_lis();
        assert_eq!(w.iter().map(|x| x.index).collect::<Vec<_>>(), vec![2, 3, 5, 8]);
        assert_eq!(w.iter().map(|x| x.value).collect::<Vec<_>>(), vec![1, 4, 5, 6]);
    }

    #[test]
    fn level_of_cases() {
        let mut d = DynLis::new();
        d.insert(e(3, 3)).unwrap();
        assert_eq!(d.level_of(3), Ok(1));
        assert_eq!(d.level_of(4), Err(DynLisError::IndexNotFound(4)));
    }

    #[test]
    fn invariant_checker_flags_unsupported_element() {
        assert!(DynLis::new().check_invariants().is_ok());
        // (20,5) cannot sit above (10,7): no smaller predecessor.
        let d = DynLis::from_raw_levels(vec![vec![e(10, 7)], vec![e(20, 5)]]).unwrap();
        assert!(matches!(
            d.check_invariants(),
            Err(Violation::PredecessorSupport { level: 2, .. })
        ));
        let d = DynLis::from_raw_levels(vec![vec![e(10, 1)], vec![e(5, 3)]]).unwrap();
        assert!(matches!(
            d.check_invariants(),
            Err(Violation::PredecessorSupport { level: 2, predecessor: None, .. })
        ));
    }

    #[test]
    fn raw_levels_validation() {
        assert!(matches!(
            DynLis::from_raw_levels(vec![vec![e(1, 1), e(2, 2)]]),
            Err(DynLisError::InvalidLevel { level: 1, .. })
        ));
        assert!(matches!(
            DynLis::from_raw_levels(vec![vec![]]),
            Err(DynLisError::InvalidLevel { .. })
        ));
        assert_eq!(
            DynLis::from_raw_levels(vec![vec![e(1, 1)], vec![e(1, 2)]]).unwrap_err(),
            DynLisError::DuplicateIndex(1)
        );
    }
}
