//! Join-based AVL tree.
//!
//! Every bulk operation is expressed through a single `join(left, key, right)`
//! that rebalances along one spine. Split, concatenation, point insertion and
//! removal all reduce to it. Bounds are worst case:
//!
//! * `join(l, k, r)` touches `O(|h(l) - h(r)| + 1)` nodes,
//! * `split_by` touches `O(log n)` nodes (the joins along the search path
//!   telescope),
//! * `concat`, predecessor/successor, `last_where`, `select` and point updates
//!   touch `O(log n)` nodes.
//!
//! Nodes carry subtree sizes so `len` is O(1) after splits and positional
//! lookups (`select`, `rank`) are available, and the first and last entry of
//! their subtree so `first`/`last` are O(1).

// Subtrees are passed as owned boxes so nodes are reused, never reallocated.
#![allow(clippy::boxed_local)]

use std::cmp::Ordering;

use crate::counters::CostCounters;

type Link<K, V> = Option<Box<Node<K, V>>>;

#[derive(Clone, Debug)]
struct Node<K, V> {
    key: K,
    val: V,
    height: i32,
    size: usize,
    first: (K, V),
    last: (K, V),
    left: Link<K, V>,
    right: Link<K, V>,
}

#[inline]
fn height<K, V>(t: &Link<K, V>) -> i32 {
    t.as_ref().map_or(0, |n| n.height)
}

#[inline]
fn size<K, V>(t: &Link<K, V>) -> usize {
    t.as_ref().map_or(0, |n| n.size)
}

impl<K: Copy, V: Copy> Node<K, V> {
    fn boxed(left: Link<K, V>, key: K, val: V, right: Link<K, V>) -> Box<Self> {
        let mut n = Box::new(Node {
            key,
            val,
            height: 0,
            size: 0,
            first: (key, val),
            last: (key, val),
            left,
            right,
        });
        n.update();
        n
    }

    #[inline]
    fn update(&mut self) {
        self.height = 1 + height(&self.left).max(height(&self.right));
        self.size = 1 + size(&self.left) + size(&self.right);
        self.first = self.left.as_ref().map_or((self.key, self.val), |l| l.first);
        self.last = self.right.as_ref().map_or((self.key, self.val), |r| r.last);
    }

    fn into_parts(self) -> (Link<K, V>, K, V, Link<K, V>) {
        (self.left, self.key, self.val, self.right)
    }
}

fn rotate_left<K: Copy, V: Copy>(mut n: Box<Node<K, V>>) -> Box<Node<K, V>> {
    let mut r = n.right.take().expect("rotate_left without right child");
    n.right = r.left.take();
    n.update();
    r.left = Some(n);
    r.update();
    r
}

fn rotate_right<K: Copy, V: Copy>(mut n: Box<Node<K, V>>) -> Box<Node<K, V>> {
    let mut l = n.left.take().expect("rotate_right without left child");
    n.left = l.right.take();
    n.update();
    l.right = Some(n);
    l.update();
    l
}

// `tl` is taller than `tr` by at least two.
fn join_right<K: Copy, V: Copy>(
    tl: Box<Node<K, V>>,
    key: K,
    val: V,
    tr: Link<K, V>,
    m: &mut CostCounters,
) -> Box<Node<K, V>> {
    m.visit();
    let (l, lk, lv, c) = tl.into_parts();
    if height(&c) <= height(&tr) + 1 {
        let t = Node::boxed(c, key, val, tr);
        if t.height <= height(&l) + 1 {
            Node::boxed(l, lk, lv, Some(t))
        } else {
            m.rotate(2);
            rotate_left(Node::boxed(l, lk, lv, Some(rotate_right(t))))
        }
    } else {
        let t = join_right(c.expect("taller side has a child"), key, val, tr, m);
        let th = t.height;
        let t2 = Node::boxed(l, lk, lv, Some(t));
        if th <= height(&t2.left) + 1 {
            t2
        } else {
            m.rotate(1);
            rotate_left(t2)
        }
    }
}

fn join_left<K: Copy, V: Copy>(
    tl: Link<K, V>,
    key: K,
    val: V,
    tr: Box<Node<K, V>>,
    m: &mut CostCounters,
) -> Box<Node<K, V>> {
    m.visit();
    let (c, rk, rv, r) = tr.into_parts();
    if height(&c) <= height(&tl) + 1 {
        let t = Node::boxed(tl, key, val, c);
        if t.height <= height(&r) + 1 {
            Node::boxed(Some(t), rk, rv, r)
        } else {
            m.rotate(2);
            rotate_right(Node::boxed(Some(rotate_left(t)), rk, rv, r))
        }
    } else {
        let t = join_left(tl, key, val, c.expect("taller side has a child"), m);
        let th = t.height;
        let t2 = Node::boxed(Some(t), rk, rv, r);
        if th <= height(&t2.right) + 1 {
            t2
        } else {
            m.rotate(1);
            rotate_right(t2)
        }
    }
}

/// All keys of `l` precede `key`, which precedes all keys of `r`.
fn join<K: Copy, V: Copy>(l: Link<K, V>, key: K, val: V, r: Link<K, V>, m: &mut CostCounters) -> Box<Node<K, V>> {
    let (hl, hr) = (height(&l), height(&r));
    if hl > hr + 1 {
        join_right(l.expect("nonempty"), key, val, r, m)
    } else if hr > hl + 1 {
        join_left(l, key, val, r.expect("nonempty"), m)
    } else {
        m.visit();
        Node::boxed(l, key, val, r)
    }
}

fn split_last<K: Copy, V: Copy>(t: Box<Node<K, V>>, m: &mut CostCounters) -> (Link<K, V>, K, V) {
    m.visit();
    let (l, k, v, r) = t.into_parts();
    match r {
        None => (l, k, v),
        Some(r) => {
            let (rest, lk, lv) = split_last(r, m);
            (Some(join(l, k, v, rest, m)), lk, lv)
        }
    }
}

fn split_first<K: Copy, V: Copy>(t: Box<Node<K, V>>, m: &mut CostCounters) -> (K, V, Link<K, V>) {
    m.visit();
    let (l, k, v, r) = t.into_parts();
    match l {
        None => (k, v, r),
        Some(l) => {
            let (fk, fv, rest) = split_first(l, m);
            (fk, fv, Some(join(rest, k, v, r, m)))
        }
    }
}

// Borrows the middle key from the shorter side.
fn concat<K: Copy, V: Copy>(l: Link<K, V>, r: Link<K, V>, m: &mut CostCounters) -> Link<K, V> {
    match (l, r) {
        (None, r) => r,
        (l, None) => l,
        (Some(l), Some(r)) if l.height <= r.height => {
            let (rest, k, v) = split_last(l, m);
            Some(join(rest, k, v, Some(r), m))
        }
        (l, Some(r)) => {
            let (k, v, rest) = split_first(r, m);
            Some(join(l, k, v, rest, m))
        }
    }
}

fn split_by<K: Copy, V: Copy, F>(t: Link<K, V>, goes_left: &mut F, m: &mut CostCounters) -> (Link<K, V>, Link<K, V>)
where
    F: FnMut(&K, &V) -> bool,
{
    match t {
        None => (None, None),
        Some(n) => {
            m.visit();
            let (l, k, v, r) = n.into_parts();
            if goes_left(&k, &v) {
                let (rl, rr) = split_by(r, goes_left, m);
                (Some(join(l, k, v, rl, m)), rr)
            } else {
                let (ll, lr) = split_by(l, goes_left, m);
                (ll, Some(join(lr, k, v, r, m)))
            }
        }
    }
}

/// Ordered map backed by a join-based AVL tree.
#[derive(Clone, Debug)]
pub struct AvlTree<K, V> {
    root: Link<K, V>,
}

impl<K, V> Default for AvlTree<K, V> {
    fn default() -> Self {
        AvlTree { root: None }
    }
}

impl<K: Ord + Copy, V: Copy> AvlTree<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(key: K, val: V) -> Self {
        AvlTree {
            root: Some(Node::boxed(None, key, val, None)),
        }
    }

    pub fn len(&self) -> usize {
        size(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn height(&self) -> usize {
        height(&self.root) as usize
    }

    pub fn first(&self, m: &mut CostCounters) -> Option<(&K, &V)> {
        let n = self.root.as_deref()?;
        m.visit();
        Some((&n.first.0, &n.first.1))
    }

    pub fn last(&self, m: &mut CostCounters) -> Option<(&K, &V)> {
        let n = self.root.as_deref()?;
        m.visit();
        Some((&n.last.0, &n.last.1))
    }

    /// Last entry for which `pred` holds, given that `pred` holds on a
    /// (possibly empty) prefix of the in-order sequence.
    pub fn last_where<F>(&self, mut pred: F, m: &mut CostCounters) -> Option<(&K, &V)>
    where
        F: FnMut(&K, &V) -> bool,
    {
        let mut best = None;
        let mut cur = self.root.as_deref();
        while let Some(n) = cur {
            m.visit();
            if pred(&n.key, &n.val) {
                best = Some((&n.key, &n.val));
                cur = n.right.as_deref();
            } else {
                cur = n.left.as_deref();
            }
        }
        best
    }

    /// Largest key strictly below `key`.
    pub fn pred(&self, key: &K, m: &mut CostCounters) -> Option<(&K, &V)> {
        self.last_where(|k, _| k < key, m)
    }

    /// Smallest key strictly above `key`.
    pub fn succ(&self, key: &K, m: &mut CostCounters) -> Option<(&K, &V)> {
        let mut best = None;
        let mut cur = self.root.as_deref();
        while let Some(n) = cur {
            m.visit();
            if n.key > *key {
                best = Some((&n.key, &n.val));
                cur = n.left.as_deref();
            } else {
                cur = n.right.as_deref();
            }
        }
        best
    }

    pub fn get(&self, key: &K, m: &mut CostCounters) -> Option<&V> {
        let mut cur = self.root.as_deref();
        while let Some(n) = cur {
            m.visit();
            match key.cmp(&n.key) {
                Ordering::Less => cur = n.left.as_deref(),
                Ordering::Greater => cur = n.right.as_deref(),
                Ordering::Equal => return Some(&n.val),
            }
        }
        None
    }

    /// Entry at in-order position `pos`.
    pub fn select(&self, mut pos: usize, m: &mut CostCounters) -> Option<(&K, &V)> {
        let mut cur = self.root.as_deref();
        while let Some(n) = cur {
            m.visit();
            let ls = size(&n.left);
            match pos.cmp(&ls) {
                Ordering::Less => cur = n.left.as_deref(),
                Ordering::Equal => return Some((&n.key, &n.val)),
                Ordering::Greater => {
                    pos -= ls + 1;
                    cur = n.right.as_deref();
                }
            }
        }
        None
    }

    /// Number of keys strictly below `key`.
    pub fn rank(&self, key: &K, m: &mut CostCounters) -> usize {
        let mut acc = 0;
        let mut cur = self.root.as_deref();
        while let Some(n) = cur {
            m.visit();
            if n.key < *key {
                acc += size(&n.left) + 1;
                cur = n.right.as_deref();
            } else {
                cur = n.left.as_deref();
            }
        }
        acc
    }

    /// Splits into the entries for which `goes_left` holds and the rest.
    /// `goes_left` must hold on a prefix of the in-order sequence.
    pub fn split_by<F>(self, mut goes_left: F, m: &mut CostCounters) -> (Self, Self)
    where
        F: FnMut(&K, &V) -> bool,
    {
        let (l, r) = split_by(self.root, &mut goes_left, m);
        (AvlTree { root: l }, AvlTree { root: r })
    }

    /// Concatenates two trees. Every key of `self` must precede every key of
    /// `right`; callers are responsible for checking this.
    pub fn concat(self, right: Self, m: &mut CostCounters) -> Self {
        AvlTree {
            root: concat(self.root, right.root, m),
        }
    }

    /// Appends an entry whose key exceeds every key in the tree.
    pub fn push_back(self, key: K, val: V, m: &mut CostCounters) -> Self {
        AvlTree {
            root: Some(join(self.root, key, val, None, m)),
        }
    }

    /// Inserts `key`, returning the previous value if it was present.
    pub fn insert(&mut self, key: K, val: V, m: &mut CostCounters) -> Option<V> {
        let root = self.root.take();
        let (l, r) = split_by(root, &mut |k: &K, _: &V| *k < key, m);
        let (mid, r) = split_by(r, &mut |k: &K, _: &V| *k == key, m);
        let old = mid.map(|n| n.val);
        self.root = Some(join(l, key, val, r, m));
        old
    }

    pub fn remove(&mut self, key: &K, m: &mut CostCounters) -> Option<V> {
        let root = self.root.take();
        let (l, r) = split_by(root, &mut |k: &K, _: &V| k < key, m);
        let (mid, r) = split_by(r, &mut |k: &K, _: &V| k == key, m);
        self.root = concat(l, r, m);
        mid.map(|n| n.val)
    }

    pub fn iter(&self) -> Iter<'_, K, V> {
        let mut it = Iter { stack: Vec::new() };
        it.push_left(self.root.as_deref());
        it
    }

    /// Validates ordering, AVL balance and cached heights/sizes.
    pub fn check(&self) -> Result<(), String> {
        fn walk<K: Ord + Copy, V: Copy>(
            t: &Link<K, V>,
            lo: Option<&K>,
            hi: Option<&K>,
        ) -> Result<(i32, usize), String> {
            let Some(n) = t.as_deref() else {
                return Ok((0, 0));
            };
            if lo.is_some_and(|lo| n.key <= *lo) || hi.is_some_and(|hi| n.key >= *hi) {
                return Err("key order violated".into());
            }
            let (hl, sl) = walk(&n.left, lo, Some(&n.key))?;
            let (hr, sr) = walk(&n.right, Some(&n.key), hi)?;
            if (hl - hr).abs() > 1 {
                return Err(format!("unbalanced node: heights {hl} and {hr}"));
            }
            if n.height != 1 + hl.max(hr) || n.size != 1 + sl + sr {
                return Err("stale height or size".into());
            }
            let first = n.left.as_ref().map_or(&n.key, |l| &l.first.0);
            let last = n.right.as_ref().map_or(&n.key, |r| &r.last.0);
            if n.first.0 != *first || n.last.0 != *last {
                return Err("stale first/last cache".into());
            }
            Ok((n.height, n.size))
        }
        walk(&self.root, None, None).map(|_| ())
    }
}

pub struct Iter<'a, K, V> {
    stack: Vec<&'a Node<K, V>>,
}

impl<'a, K, V> Iter<'a, K, V> {
    fn push_left(&mut self, mut cur: Option<&'a Node<K, V>>) {
        while let Some(n) = cur {
            self.stack.push(n);
            cur = n.left.as_deref();
        }
    }
}

impl<'a, K, V> Iterator for Iter<'a, K, V> {
    type Item = (&'a K, &'a V);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.stack.pop()?;
        self.push_left(n.right.as_deref());
        Some((&n.key, &n.val))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn build(keys: &[i64], m: &mut CostCounters) -> AvlTree<i64, i64> {
        let mut t = AvlTree::new();
        for &k in keys {
            t.insert(k, -k, m);
        }
        t
    }

    fn keys(t: &AvlTree<i64, i64>) -> Vec<i64> {
        t.iter().map(|(k, _)| *k).collect()
    }

    #[test]
    fn empty_tree_queries() {
        let mut m = CostCounters::new();
        let t: AvlTree<i64, i64> = AvlTree::new();
        assert!(t.first(&mut m).is_none());
        assert!(t.last(&mut m).is_none());
        assert!(t.pred(&3, &mut m).is_none());
        assert!(t.select(0, &mut m).is_none());
        assert_eq!(t.len(), 0);
    }

    #[test]
    fn sequential_push_back_stays_balanced() {
        let mut m = CostCounters::new();
        let mut t = AvlTree::new();
        for k in 0..10_000i64 {
            t = t.push_back(k, k, &mut m);
        }
        t.check().unwrap();
        assert_eq!(t.len(), 10_000);
        // AVL height bound: 1.4405 log2(n + 2)
        assert!(t.height() <= 20);
    }

    #[test]
    fn concat_unequal_heights() {
        let mut m = CostCounters::new();
        let small = build(&[1, 2], &mut m);
        let big = build(&(10..5000).collect::<Vec<_>>(), &mut m);
        let t = small.concat(big.clone(), &mut m);
        t.check().unwrap();
        assert_eq!(t.len(), 4992);
        let t2 = big.concat(build(&[9000], &mut m), &mut m);
        t2.check().unwrap();
        assert_eq!(t2.last(&mut m), Some((&9000, &-9000)));
    }

    #[test]
    fn select_and_rank_agree() {
        let mut m = CostCounters::new();
        let t = build(&[5, 1, 9, 3, 7], &mut m);
        assert_eq!(t.select(2, &mut m).map(|(k, _)| *k), Some(5));
        assert_eq!(t.rank(&6, &mut m), 3);
        assert_eq!(t.rank(&0, &mut m), 0);
        assert!(t.select(5, &mut m).is_none());
    }

    proptest! {
        #[test]
        fn split_concat_round_trip(mut ks in prop::collection::btree_set(-1000i64..1000, 0..300), pivot in -1100i64..1100) {
            let mut m = CostCounters::new();
            let ks: Vec<i64> = std::mem::take(&mut ks).into_iter().collect();
            let t = build(&ks, &mut m);
            let (l, r) = t.split_by(|k, _| *k <= pivot, &mut m);
            l.check().unwrap();
            r.check().unwrap();
            prop_assert!(keys(&l).iter().all(|k| *k <= pivot));
            prop_assert!(keys(&r).iter().all(|k| *k > pivot));
            let t = l.concat(r, &mut m);
            t.check().unwrap();
            prop_assert_eq!(keys(&t), ks);
        }

        #[test]
        fn matches_btreemap(ops in prop::collection::vec((any::<bool>(), -50i64..50), 0..400)) {
            let mut m = CostCounters::new();
            let mut t = AvlTree::new();
            let mut model = std::collections::BTreeMap::new();
            for (ins, k) in ops {
                if ins {
                    prop_assert_eq!(t.insert(k, k * 2, &mut m), model.insert(k, k * 2));
                } else {
                    prop_assert_eq!(t.remove(&k, &mut m), model.remove(&k));
                }
                t.check().unwrap();
                prop_assert_eq!(t.len(), model.len());
            }
            for probe in -55i64..55 {
                prop_assert_eq!(t.pred(&probe, &mut m).map(|(k, _)| *k), model.range(..probe).next_back().map(|(k, _)| *k));
                prop_assert_eq!(t.succ(&probe, &mut m).map(|(k, _)| *k), model.range(probe + 1..).next().map(|(k, _)| *k));
            }
        }
    }
}
