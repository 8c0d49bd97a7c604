//! Reference LIS computations that share no code with the level-set forest.

use std::collections::BTreeMap;

use crate::levels::{Element, IndexKey, Value};

/// Level of every element: length of the longest strictly increasing
/// subsequence ending there. Quadratic DP over the index-sorted sequence.
pub fn oracle_levels(seq: &[Element]) -> BTreeMap<IndexKey, usize> {
    let mut levels: Vec<usize> = Vec::with_capacity(seq.len());
    for (i, e) in seq.iter().enumerate() {
        let best = seq[..i]
            .iter()
            .zip(&levels)
            .filter(|(p, _)| p.index < e.index && p.value < e.value)
            .map(|(_, l)| *l)
            .max()
            .unwrap_or(0);
        levels.push(best + 1);
    }
    seq.iter().map(|e| e.index).zip(levels).collect()
}

/// Patience-sorting tails: entry `l` is the smallest last value of any
/// strictly increasing subsequence of length `l + 1`.
pub fn patience_tails<I>(values: I) -> Vec<Value>
where
    I: IntoIterator<Item = Value>,
{
    let mut tails: Vec<Value> = Vec::new();
    for v in values {
        patience_step(&mut tails, v);
    }
    tails
}

/// One online step of patience sorting.
pub fn patience_step(tails: &mut Vec<Value>, v: Value) {
    let pos = tails.partition_point(|&t| t < v);
    if pos == tails.len() {
        tails.push(v);
    } else {
        tails[pos] = v;
    }
}

/// LIS length in `O(n log n)`.
pub fn oracle_length_fast(seq: &[Element]) -> usize {
    patience_tails(seq.iter().map(|e| e.value)).len()
}

/// Whether `witness` is a maximum-length strictly increasing subsequence of `seq`.
pub fn oracle_is_valid_lis(seq: &[Element], witness: &[Element]) -> bool {
    if witness.len() != oracle_length_fast(seq) {
        return false;
    }
    if witness
        .windows(2)
        .any(|w| w[0].index >= w[1].index || w[0].value >= w[1].value)
    {
        return false;
    }
    // Every witness element must occur in the sequence with the same value.
    let mut rest = seq.iter();
    witness.iter().all(|w| rest.any(|e| e == w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(values: &[i64]) -> Vec<Element> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| Element::new(i as i64 + 1, v))
            .collect()
    }

    #[test]
    fn levels_of_pi_digits() {
        let lv = oracle_levels(&seq(&[3, 1, 4, 1, 5, 9, 2, 6]));
        assert_eq!(lv.values().copied().collect::<Vec<_>>(), vec![1, 1, 2, 1, 3, 4, 2, 4]);
    }

    #[test]
    fn levels_edge_cases() {
        assert!(oracle_levels(&[]).is_empty());
        let lv = oracle_levels(&seq(&[9, 7, 5, 3]));
        assert!(lv.values().all(|&l| l == 1));
    }

    #[test]
    fn fast_length_cases() {
        assert_eq!(oracle_length_fast(&seq(&[3, 1, 4, 1, 5, 9, 2, 6])), 4);
        assert_eq!(oracle_length_fast(&seq(&[42])), 1);
        assert_eq!(oracle_length_fast(&seq(&(0..50).collect::<Vec<_>>())), 50);
        assert_eq!(oracle_length_fast(&[]), 0);
    }

    #[test]
    fn validity_cases() {
        let s = seq(&[1, 5, 9]);
        assert!(oracle_is_valid_lis(&s, &s));
        let s2 = seq(&[1, 5, 5, 9]);
        assert!(!oracle_is_valid_lis(&s2, &[s2[0], s2[1], s2[2]]));
        assert!(!oracle_is_valid_lis(&s, &s[..2]));
        // Right values, but at an index the sequence does not hold.
        assert!(!oracle_is_valid_lis(&s, &[Element::new(1, 1), Element::new(2, 5), Element::new(4, 9)]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn two_oracles_agree(values in prop::collection::vec(-20i64..20, 0..2048)) {
            let s = seq(&values);
            let dp_max = oracle_levels(&s).values().copied().max().unwrap_or(0);
            prop_assert_eq!(oracle_length_fast(&s), dp_max);
        }
    }
}
