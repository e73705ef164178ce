//! Distance between token strings.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Levenshtein distance over tokens.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// F1 of the two token multisets.
pub fn bag_f1<T: Ord>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut bag: BTreeMap<&T, i64> = BTreeMap::new();
    for x in a {
        *bag.entry(x).or_insert(0) += 1;
    }
    let mut overlap = 0usize;
    for y in b {
        if let Some(n) = bag.get_mut(y).filter(|n| **n > 0) {
            *n -= 1;
            overlap += 1;
        }
    }
    2.0 * overlap as f64 / (a.len() + b.len()) as f64
}

/// Half one minus bag F1, half edit distance over the longer length. In
/// [0, 1], zero exactly for equal strings, symmetric.
pub fn string_distance<T: Ord>(a: &[T], b: &[T]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    0.5 * (1.0 - bag_f1(a, b)) + 0.5 * edit_distance(a, b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_substitution_in_four() {
        let a = ["w", "x", "y", "z"];
        let b = ["w", "x", "q", "z"];
        assert!((string_distance(&a, &b) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reorder_costs_only_edits() {
        let a = ["a", "b"];
        let b = ["b", "a"];
        assert_eq!(bag_f1(&a, &b), 1.0);
        assert_eq!(string_distance(&a, &b), 0.5);
    }

    #[test]
    fn disjoint_strings_are_at_distance_one() {
        assert_eq!(string_distance(&["a"], &["b", "c"]), 1.0);
        assert_eq!(string_distance::<&str>(&[], &["b"]), 1.0);
        assert_eq!(string_distance::<&str>(&[], &[]), 0.0);
    }
}
