use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Sorted set of distinct non-negative integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet(Vec<u64>);

impl IndexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn members(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// `n(r, Λ) = card{λ ∈ Λ : λ ≤ r}`.
    pub fn counting(&self, r: f64) -> usize {
        if r < 0.0 {
            return 0;
        }
        self.0.partition_point(|&x| (x as f64) <= r)
    }

    pub fn count_le(&self, x: u64) -> usize {
        self.0.partition_point(|&v| v <= x)
    }

    /// Members in the closed range `[lo, hi]`.
    pub fn count_between(&self, lo: u64, hi: u64) -> usize {
        if hi < lo {
            return 0;
        }
        self.count_le(hi) - self.0.partition_point(|&v| v < lo)
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::from_unsorted(v)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }
}

impl FromIterator<u64> for IndexSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Self::from_unsorted(iter.into_iter().collect())
    }
}

/// Indices `m` at which `signs[m]·signs[k] < 0` for the nearest preceding
/// nonzero `signs[k]`. Zeros are skipped and never reported.
pub fn sign_changes_of_signs(signs: &[i8]) -> IndexSet {
    let mut out = Vec::new();
    let mut last = 0i8;
    for (m, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            out.push(m as u64);
        }
        last = s;
    }
    IndexSet(out)
}

pub fn sign_of<T: Scalar>(x: &T) -> i8 {
    // num-traits treats +0.0 as positive for floats.
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign changes of a real sequence.
pub fn sign_changes<T: Scalar>(seq: &[T]) -> IndexSet {
    let signs: Vec<i8> = seq.iter().map(sign_of).collect();
    sign_changes_of_signs(&signs)
}

/// Sign changes of floating data, treating `|x| <= eps` as zero.
pub fn sign_changes_f64(seq: &[f64], eps: f64) -> IndexSet {
    let signs: Vec<i8> = seq
        .iter()
        .map(|&x| {
            if x.abs() <= eps {
                0
            } else if x > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    sign_changes_of_signs(&signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn definition_examples() {
        assert_eq!(sign_changes(&[1.0, 0.0, -2.0, 3.0]).members(), &[2, 3]);
        assert!(sign_changes(&[1.0, 2.0, 3.0]).is_empty());
        assert_eq!(sign_changes(&[0.0, 5.0, 0.0, 0.0, -1.0, 1.0]).members(), &[4, 5]);
        assert!(sign_changes::<f64>(&[]).is_empty());
    }

    #[test]
    fn float_epsilon_suppresses_noise() {
        let seq = [1.0, -1e-310, 2.0];
        assert!(sign_changes_f64(&seq, 1e-300).is_empty());
        assert_eq!(sign_changes_f64(&seq, 0.0).members(), &[1, 2]);
    }

    #[test]
    fn counting_examples() {
        let l = IndexSet::from_unsorted(vec![8, 2, 4]);
        assert_eq!(l.counting(5.0), 2);
        assert_eq!(l.counting(1.9), 0);
        let full: IndexSet = (1..=100).collect();
        assert_eq!(full.counting(100.0), 100);
        assert_eq!(full.count_between(10, 19), 10);
    }

    proptest! {
        #[test]
        fn changes_bounded_by_nonzero_terms(v in prop::collection::vec(-3i32..=3, 0..60)) {
            let xs: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            let s = sign_changes(&xs);
            let nonzero = xs.iter().filter(|x| **x != 0.0).count();
            prop_assert!(s.len() <= nonzero);
            for &m in s.members() {
                prop_assert!(xs[m as usize] != 0.0);
            }
        }

        #[test]
        fn invariant_under_scaling_and_flip(v in prop::collection::vec(-5i32..=5, 0..60), c in 1u32..50) {
            let xs: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            let scaled: Vec<f64> = xs.iter().map(|x| x * c as f64).collect();
            let flipped: Vec<f64> = xs.iter().map(|x| -x).collect();
            let base = sign_changes(&xs);
            prop_assert_eq!(&base, &sign_changes(&scaled));
            prop_assert_eq!(&base, &sign_changes(&flipped));
        }
    }
}
