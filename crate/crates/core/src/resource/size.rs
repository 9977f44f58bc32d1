use std::cmp::Ordering;

use crate::syntax::{Combination, Simple};

/// The multiset of sizes of a combination's support.
///
/// Ordered by the reverse lexicographic order on multisets: `m < n` when,
/// at the largest size where the two counts differ, `m` has fewer
/// elements. β-steps strictly decrease it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SizeMultiset {
    // sorted in decreasing order
    sizes: Vec<usize>,
}

impl SizeMultiset {
    pub fn new(mut sizes: Vec<usize>) -> SizeMultiset {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        SizeMultiset { sizes }
    }

    /// Sizes in decreasing order.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of elements of size `n`.
    pub fn count(&self, n: usize) -> usize {
        self.sizes.iter().filter(|&&s| s == n).count()
    }
}

impl Ord for SizeMultiset {
    // With both sides sorted decreasingly, the first differing position is
    // the largest size whose counts differ; a missing tail means fewer.
    fn cmp(&self, other: &Self) -> Ordering {
        self.sizes.cmp(&other.sizes)
    }
}

impl PartialOrd for SizeMultiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `‖S‖`.
pub fn ssize<T: Simple>(s: &Combination<T>) -> SizeMultiset {
    SizeMultiset::new(s.support().map(Simple::size).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_counts(a: &SizeMultiset, b: &SizeMultiset) -> Ordering {
        let top = a.sizes().iter().chain(b.sizes()).copied().max().unwrap_or(0);
        for n in (0..=top).rev() {
            match a.count(n).cmp(&b.count(n)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    #[test]
    fn order_matches_the_counting_definition() {
        let samples: Vec<SizeMultiset> =
            vec![vec![], vec![3], vec![3, 1], vec![2, 2, 2], vec![3, 3], vec![1, 1, 1, 1, 1], vec![4], vec![3, 2, 2]]
                .into_iter()
                .map(SizeMultiset::new)
                .collect();
        for a in &samples {
            for b in &samples {
                assert_eq!(a.cmp(b), by_counts(a, b), "{a:?} vs {b:?}");
            }
        }
    }
}
