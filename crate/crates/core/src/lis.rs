//! Static and incremental longest increasing subsequence.
//!
//! Everything here is patience sorting: a sorted array of pile tops, one
//! binary search per element, and a predecessor link per element so that a
//! witness can be read back from the top of the last pile.

use crate::error::{Error, Result};
use crate::point::{Chain, Point, PointSet};

/// Normalizes arbitrary values into a point set with rank y-coordinates.
///
/// Ties are broken so that the earlier of two equal values receives the
/// larger rank, which keeps the length of the longest *strictly* increasing
/// subsequence unchanged.
pub fn normalize<T: Ord>(values: &[T]) -> PointSet {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // equal values: later index first, so the earlier one ranks higher
    order.sort_by(|&a, &b| values[a].cmp(&values[b]).then(b.cmp(&a)));
    let mut ranks = vec![0u32; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank as u32;
    }
    PointSet::from_ranks(&ranks).expect("ranks are a permutation")
}

/// Patience piles over precomputed keys.
///
/// `push` must be called with elements in increasing x order; the keys are the
/// y-keys. Element ids are opaque to the piles and only come back out through
/// [`Patience::witness`].
#[derive(Clone, Debug, Default)]
pub(crate) struct Patience {
    top_keys: Vec<u64>,
    top_slots: Vec<u32>,
    // per pushed element: (id, slot of predecessor or u32::MAX)
    slots: Vec<(u32, u32)>,
}

impl Patience {
    pub(crate) fn clear(&mut self) {
        self.top_keys.clear();
        self.top_slots.clear();
        self.slots.clear();
    }

    /// Pushes an element and returns the 1-based pile it landed on, i.e. the
    /// length of the longest chain ending at it.
    #[inline]
    pub(crate) fn push(&mut self, key: u64, id: u32) -> usize {
        let pile = self.top_keys.partition_point(|&t| t < key);
        let pred = if pile == 0 { u32::MAX } else { self.top_slots[pile - 1] };
        let slot = self.slots.len() as u32;
        self.slots.push((id, pred));
        if pile == self.top_keys.len() {
            self.top_keys.push(key);
            self.top_slots.push(slot);
        } else {
            self.top_keys[pile] = key;
            self.top_slots[pile] = slot;
        }
        pile + 1
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.top_keys.len()
    }

    /// Ids of a longest chain, in push order.
    pub(crate) fn witness(&self, out: &mut Vec<u32>) {
        out.clear();
        let mut slot = match self.top_slots.last() {
            Some(&s) => s,
            None => return,
        };
        while slot != u32::MAX {
            let (id, pred) = self.slots[slot as usize];
            out.push(id);
            slot = pred;
        }
        out.reverse();
    }
}

/// Exact LIS of an x-sorted point set, with one witness chain.
pub fn lis_static(points: &[Point]) -> (usize, Chain) {
    let mut piles = Patience::default();
    for (i, p) in points.iter().enumerate() {
        piles.push(p.y as u64, i as u32);
    }
    let mut ids = Vec::new();
    piles.witness(&mut ids);
    let chain = ids.iter().map(|&i| points[i as usize]).collect();
    (piles.len(), chain)
}

/// LIS length of a plain slice of distinct-or-not values (strict).
pub fn lis_len<T: Ord>(values: &[T]) -> usize {
    let mut tops: Vec<&T> = Vec::new();
    for v in values {
        let pile = tops.partition_point(|t| *t < v);
        if pile == tops.len() {
            tops.push(v);
        } else {
            tops[pile] = v;
        }
    }
    tops.len()
}

/// LIS maintained under appending points with increasing x.
#[derive(Clone, Debug, Default)]
pub struct IncrementalLis {
    piles: Patience,
    points: Vec<Point>,
}

impl IncrementalLis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a point and returns the LIS length of everything appended so
    /// far. The x-coordinate must exceed that of the previous point.
    pub fn append(&mut self, p: Point) -> Result<usize> {
        if let Some(last) = self.points.last() {
            if p.x <= last.x {
                return Err(Error::NonMonotoneAppend { prev: last.x as u64, got: p.x as u64 });
            }
        }
        self.points.push(p);
        self.piles.push(p.y as u64, (self.points.len() - 1) as u32);
        Ok(self.piles.len())
    }

    pub fn len(&self) -> usize {
        self.piles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn witness(&self) -> Chain {
        let mut ids = Vec::new();
        self.piles.witness(&mut ids);
        ids.iter().map(|&i| self.points[i as usize]).collect()
    }
}

/// Partitions an x-sorted point set into exactly `LIS` decreasing chains.
///
/// Part `l` (0-based) holds the points whose longest increasing chain ending
/// at them has length `l + 1`. Each part is listed in increasing x, hence
/// decreasing y.
pub fn decreasing_partition(points: &[Point]) -> Vec<Vec<Point>> {
    let mut piles = Patience::default();
    let mut parts: Vec<Vec<Point>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let pile = piles.push(p.y as u64, i as u32);
        if pile > parts.len() {
            parts.push(Vec::new());
        }
        parts[pile - 1].push(*p);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{is_chain, Plain};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dp(values: &[i64]) -> usize {
        let mut best = vec![1usize; values.len()];
        for i in 0..values.len() {
            for j in 0..i {
                if values[j] < values[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    fn perm(n: usize, rng: &mut ChaCha8Rng) -> PointSet {
        let mut ys: Vec<u32> = (0..n as u32).collect();
        ys.shuffle(rng);
        PointSet::from_ranks(&ys).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[10, 20, 15]).ys(), vec![0, 2, 1]);
        let tied = normalize(&[5, 5, 3]);
        assert_eq!(tied.ys(), vec![2, 1, 0]);
        assert_eq!(lis_static(tied.points()).0, 1);
        assert_eq!(lis_len(&[5, 5, 3]), 1);
    }

    #[test]
    fn normalize_preserves_strict_lis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.gen_range(0..40);
            let values: Vec<i64> = (0..n).map(|_| rng.gen_range(0..8)).collect();
            let ps = normalize(&values);
            let ranks: Vec<i64> = ps.ys().iter().map(|&y| y as i64).collect();
            assert_eq!(dp(&values), dp(&ranks), "{values:?}");
        }
    }

    #[test]
    fn static_examples() {
        let sorted = PointSet::from_ranks(&(0..50).collect::<Vec<_>>()).unwrap();
        assert_eq!(lis_static(sorted.points()).0, 50);
        let reversed = PointSet::from_ranks(&(0..50).rev().collect::<Vec<_>>()).unwrap();
        assert_eq!(lis_static(reversed.points()).0, 1);
        let ps = normalize(&[3, 1, 4, 5, 9, 2, 6]);
        let (len, chain) = lis_static(ps.points());
        assert_eq!(len, 4);
        assert_eq!(chain.len(), 4);
        assert!(is_chain(&Plain, &chain));
        assert_eq!(lis_static(&[]), (0, vec![]));
    }

    #[test]
    fn static_matches_dp_with_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(0..120);
            let ps = perm(n, &mut rng);
            let values: Vec<i64> = ps.ys().iter().map(|&y| y as i64).collect();
            let (len, chain) = lis_static(ps.points());
            assert_eq!(len, dp(&values));
            assert_eq!(chain.len(), len);
            assert!(is_chain(&Plain, &chain));
        }
    }

    #[test]
    fn incremental_examples() {
        let mut acc = IncrementalLis::new();
        let lens: Vec<usize> = (1..=3).map(|i| acc.append(Point::new(i, i)).unwrap()).collect();
        assert_eq!(lens, vec![1, 2, 3]);

        let mut acc = IncrementalLis::new();
        let lens: Vec<usize> =
            [3, 2, 1].iter().enumerate().map(|(i, &y)| acc.append(Point::new(i as u32, y)).unwrap()).collect();
        assert_eq!(lens, vec![1, 1, 1]);
        assert!(matches!(acc.append(Point::new(1, 9)), Err(Error::NonMonotoneAppend { .. })));
    }

    #[test]
    fn incremental_matches_prefixes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ps = perm(200, &mut rng);
        let mut acc = IncrementalLis::new();
        for (i, p) in ps.points().iter().enumerate() {
            let len = acc.append(*p).unwrap();
            assert_eq!(len, lis_static(&ps.points()[..=i]).0);
        }
        let w = acc.witness();
        assert_eq!(w.len(), acc.len());
        assert!(is_chain(&Plain, &w));
    }

    #[test]
    fn decreasing_partition_examples() {
        let sorted = PointSet::from_ranks(&(0..9).collect::<Vec<_>>()).unwrap();
        let parts = decreasing_partition(sorted.points());
        assert_eq!(parts.len(), 9);
        assert!(parts.iter().all(|p| p.len() == 1));

        let reversed = PointSet::from_ranks(&(0..9).rev().collect::<Vec<_>>()).unwrap();
        let parts = decreasing_partition(reversed.points());
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].len(), 9);
    }

    #[test]
    fn decreasing_partition_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let ps = perm(200, &mut rng);
            let values: Vec<i64> = ps.ys().iter().map(|&y| y as i64).collect();
            let parts = decreasing_partition(ps.points());
            assert_eq!(parts.len(), dp(&values));
            let mut all: Vec<Point> = parts.iter().flatten().copied().collect();
            for part in &parts {
                assert!(part.windows(2).all(|w| w[0].x < w[1].x && w[0].y > w[1].y));
            }
            all.sort();
            assert_eq!(all, ps.points());
        }
    }
}
