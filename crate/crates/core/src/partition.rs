//! Splitting a permutation into few monotone subsequences.

use crate::decremental::DecrementalLis;
use crate::error::{Error, Result};
use crate::lis::decreasing_partition;
use crate::point::{Chain, Point, PointSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonePartition {
    pub parts: Vec<(Direction, Chain)>,
}

impl MonotonePartition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Disjoint, covering `perm`, and each part monotone as labelled.
    pub fn is_valid_for(&self, perm: &PointSet) -> bool {
        let n = perm.len();
        let mut seen = vec![false; n];
        for (dir, chain) in &self.parts {
            if chain.is_empty() {
                return false;
            }
            for w in chain.windows(2) {
                let ok = w[0].x < w[1].x
                    && match dir {
                        Direction::Increasing => w[0].y < w[1].y,
                        Direction::Decreasing => w[0].y > w[1].y,
                    };
                if !ok {
                    return false;
                }
            }
            for p in chain {
                let i = p.x as usize;
                if i >= n || seen[i] || perm.points()[i] != *p {
                    return false;
                }
                seen[i] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// At most `3 sqrt(n)` parts: chains of length at least `sqrt(n)` while the
/// 2-approximation reports one, then a decreasing partition of the rest.
pub fn es_partition(perm: &PointSet) -> Result<MonotonePartition> {
    let n = perm.len();
    let t = (n as f64).sqrt();
    extract_then_split(perm, 1.0, |_| t)
}

/// At most `ceil((1 + eps) sqrt(2n))` parts.
pub fn es_partition_tight(perm: &PointSet, epsilon: f64) -> Result<MonotonePartition> {
    let s = (2.0 * perm.len() as f64).sqrt();
    extract_then_split(perm, epsilon, |i| s - i as f64)
}

fn extract_then_split<F: Fn(usize) -> f64>(perm: &PointSet, epsilon: f64, need: F) -> Result<MonotonePartition> {
    if !perm.is_permutation() {
        return Err(Error::NotPermutation(perm.len()));
    }
    let mut out = MonotonePartition::default();
    if perm.is_empty() {
        return Ok(out);
    }
    let mut d = DecrementalLis::build(perm, epsilon)?;
    while !d.is_empty() {
        let (score, chain) = d.query_all();
        if score == 0 || (score as f64) < need(out.len()) {
            break;
        }
        for p in chain.iter().rev() {
            let i = d.position_of(p.x).expect("witness points are live");
            d.delete(i)?;
        }
        out.parts.push((Direction::Increasing, chain));
    }
    let rest: Vec<Point> = d.live_points();
    out.parts.extend(decreasing_partition(&rest).into_iter().map(|c| (Direction::Decreasing, c)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(n: usize, seed: u64) -> PointSet {
        let mut ys: Vec<u32> = (0..n as u32).collect();
        ys.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        PointSet::from_ranks(&ys).unwrap()
    }

    #[test]
    fn identity_is_one_part() {
        let p = PointSet::from_ranks(&(0..100).collect::<Vec<_>>()).unwrap();
        for part in [es_partition(&p).unwrap(), es_partition_tight(&p, 0.5).unwrap()] {
            assert_eq!(part.len(), 1);
            assert_eq!(part.parts[0].0, Direction::Increasing);
            assert!(part.is_valid_for(&p));
        }
    }

    #[test]
    fn reversed_is_decreasing() {
        let n = 100;
        let p = PointSet::from_ranks(&(0..n as u32).rev().collect::<Vec<_>>()).unwrap();
        let part = es_partition(&p).unwrap();
        assert!(part.is_valid_for(&p));
        assert!(part.parts.iter().any(|(d, c)| *d == Direction::Decreasing && c.len() == n));
        let tight = es_partition_tight(&p, 0.5).unwrap();
        assert!(tight.is_valid_for(&p));
        assert!(tight.len() as f64 <= (1.5 * (2.0 * n as f64).sqrt()).ceil());
    }

    #[test]
    fn random_permutations_respect_the_bounds() {
        for seed in 0..6 {
            let n = 300 + 50 * seed as usize;
            let p = perm(n, seed);
            let part = es_partition(&p).unwrap();
            assert!(part.is_valid_for(&p));
            assert!(part.len() as f64 <= 3.0 * (n as f64).sqrt());
            let tight = es_partition_tight(&p, 0.5).unwrap();
            assert!(tight.is_valid_for(&p));
            assert!(tight.len() as f64 <= (1.5 * (2.0 * n as f64).sqrt()).ceil());
        }
    }

    #[test]
    fn validity_checker_rejects_bad_partitions() {
        let p = PointSet::from_ranks(&[1, 0, 2]).unwrap();
        let pts = p.points().to_vec();
        let good = MonotonePartition {
            parts: vec![(Direction::Decreasing, vec![pts[0], pts[1]]), (Direction::Increasing, vec![pts[2]])],
        };
        assert!(good.is_valid_for(&p));
        let wrong_dir = MonotonePartition {
            parts: vec![(Direction::Increasing, vec![pts[0], pts[1]]), (Direction::Increasing, vec![pts[2]])],
        };
        assert!(!wrong_dir.is_valid_for(&p));
        let missing = MonotonePartition { parts: vec![(Direction::Increasing, vec![pts[0], pts[2]])] };
        assert!(!missing.is_valid_for(&p));
    }

    #[test]
    fn non_permutation_is_rejected() {
        let p = PointSet::from_ranks(&[0, 5]).unwrap();
        assert_eq!(es_partition(&p).unwrap_err(), Error::NotPermutation(2));
    }
}
