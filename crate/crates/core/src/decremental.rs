//! Deletion-only structure over dyadic rectangles.
//!
//! Every nonempty dyadic rectangle keeps its points and a covering family.
//! Levels are either the greedy cover built up front or, after their first
//! recomputation, the union of the left and right rectangles' covers with the
//! stored output of the last Merge of the bottom and top families.

use std::collections::HashMap;

use crate::cover::{query_levels, Cover};
use crate::error::{Error, Result};
use crate::levels::{lis_by, shared, LevelState, Schedule};
use crate::merge::{combine, merge, MergeParams};
use crate::pbst::PTree;
use crate::point::{Chain, Plain, Point, PointSet};

/// `(x level, y level, x index, y index)`: the rectangle spanning
/// `[xi 2^kx, (xi + 1) 2^kx)` by `[yi 2^ky, (yi + 1) 2^ky)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RectId {
    pub kx: u8,
    pub ky: u8,
    pub xi: u32,
    pub yi: u32,
}

impl RectId {
    fn left(self) -> RectId {
        RectId { kx: self.kx - 1, xi: 2 * self.xi, ..self }
    }
    fn right(self) -> RectId {
        RectId { kx: self.kx - 1, xi: 2 * self.xi + 1, ..self }
    }
    fn bottom(self) -> RectId {
        RectId { ky: self.ky - 1, yi: 2 * self.yi, ..self }
    }
    fn top(self) -> RectId {
        RectId { ky: self.ky - 1, yi: 2 * self.yi + 1, ..self }
    }
    fn mid(self) -> u32 {
        (2 * self.xi + 1) << (self.kx - 1)
    }
    fn is_leaf(self) -> bool {
        self.kx == 0 || self.ky == 0
    }
}

#[derive(Clone, Debug)]
pub struct Rect {
    pub points: PTree<u32, u32>,
    pub levels: Vec<LevelState>,
}

/// Counters collected while running.
#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub deletions: u64,
    pub merges: u64,
    pub max_merge_output: usize,
}

#[derive(Clone, Debug)]
pub struct DecrementalLis {
    log: u32,
    epsilon: f64,
    sched: Schedule,
    rects: HashMap<RectId, Rect>,
    deleted: Vec<bool>,
    ys: Vec<u32>,
    cap_override: Option<usize>,
    sparsify: bool,
    stats: Stats,
}

impl DecrementalLis {
    pub fn build(points: &PointSet, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Epsilon(epsilon));
        }
        if !points.is_permutation() {
            return Err(Error::NotPermutation(points.len()));
        }
        let log = Self::log_of(points.len());
        Ok(Self::assemble(points, epsilon, epsilon / (8.0 * log.max(1) as f64)))
    }

    /// Builds with a given `eps'` instead of the one derived from `epsilon`,
    /// so that small inputs get approximate levels.
    #[doc(hidden)]
    pub fn build_with_eps_prime(points: &PointSet, eps_prime: f64) -> Result<Self> {
        if !(eps_prime > 0.0 && eps_prime < 1.0) {
            return Err(Error::Epsilon(eps_prime));
        }
        if !points.is_permutation() {
            return Err(Error::NotPermutation(points.len()));
        }
        let log = Self::log_of(points.len());
        Ok(Self::assemble(points, eps_prime * 8.0 * log.max(1) as f64, eps_prime))
    }

    fn log_of(n: usize) -> u32 {
        n.max(1).next_power_of_two().trailing_zeros()
    }

    fn assemble(points: &PointSet, epsilon: f64, eps_prime: f64) -> Self {
        let n = points.len();
        let log = Self::log_of(n);
        let sched = Schedule::new(eps_prime, 2, false);

        let mut groups: HashMap<RectId, Vec<Point>> = HashMap::new();
        for p in points.points() {
            for ky in 0..=log as u8 {
                for kx in 0..=log as u8 {
                    let id = RectId { kx, ky, xi: p.x >> kx, yi: p.y >> ky };
                    groups.entry(id).or_default().push(*p);
                }
            }
        }
        let mut rects = HashMap::with_capacity(groups.len());
        for (id, pts) in groups {
            let limit = lis_by(&Plain, &pts);
            let levels = sched.build(&Plain, id.ky as u32, &pts, limit);
            let tree = PTree::from_sorted(pts.iter().map(|p| (p.x, p.y)).collect());
            rects.insert(id, Rect { points: tree, levels });
        }
        DecrementalLis {
            log,
            epsilon,
            sched,
            rects,
            deleted: vec![false; n],
            ys: points.ys(),
            cap_override: None,
            sparsify: true,
            stats: Stats::default(),
        }
    }

    fn root_id(&self) -> RectId {
        RectId { kx: self.log as u8, ky: self.log as u8, xi: 0, yi: 0 }
    }

    pub fn len(&self) -> usize {
        self.rects.get(&self.root_id()).map_or(0, |r| r.points.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eps_prime(&self) -> f64 {
        self.sched.eps_prime
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Live points in position order.
    pub fn live_points(&self) -> Vec<Point> {
        self.rects
            .get(&self.root_id())
            .map_or_else(Vec::new, |r| r.points.iter().map(|(&x, &y)| Point::new(x, y)).collect())
    }

    /// Current position of the live point with original x-coordinate `x`.
    pub fn position_of(&self, x: u32) -> Option<usize> {
        let root = self.rects.get(&self.root_id())?;
        root.points.get(&x)?;
        Some(root.points.rank(&x))
    }

    /// Test hook: replaces every counter cap, exact levels included.
    pub fn set_cap_override(&mut self, cap: Option<usize>) {
        self.cap_override = cap;
    }

    /// Test hook: skips the greedy pass inside Merge.
    pub fn set_sparsify(&mut self, on: bool) {
        self.sparsify = on;
    }

    fn original_x(&self, index: usize) -> Result<u32> {
        let len = self.len();
        let root = self.rects.get(&self.root_id()).ok_or(Error::IndexOutOfRange { index, len })?;
        root.points.find_rank(index).map(|(&x, _)| x).ok_or(Error::IndexOutOfRange { index, len })
    }

    /// Deletes the element currently at position `index`.
    pub fn delete(&mut self, index: usize) -> Result<()> {
        let x = self.original_x(index)?;
        let p = Point::new(x, self.ys[x as usize]);
        self.deleted[x as usize] = true;
        self.stats.deletions += 1;
        for ky in 0..=self.log as u8 {
            for kx in 0..=self.log as u8 {
                let id = RectId { kx, ky, xi: p.x >> kx, yi: p.y >> ky };
                self.update_rect(id, p);
            }
        }
        Ok(())
    }

    fn update_rect(&mut self, id: RectId, p: Point) {
        let Some(mut rect) = self.rects.remove(&id) else { return };
        rect.points = rect.points.delete(&p.x);
        if rect.points.is_empty() {
            return;
        }
        debug_assert!(!id.is_leaf());
        for l in 0..rect.levels.len() {
            let level = &mut rect.levels[l];
            level.counter += 1;
            let due = match self.cap_override {
                Some(cap) => level.counter >= cap,
                None if level.exact => level.owns_point(&Plain, p),
                None => level.counter >= level.cap,
            };
            if due {
                self.recompute(id, &mut rect, l);
            } else if rect.levels[l].merged.is_some() {
                self.rederive(id, &mut rect, l);
            }
        }
        self.rects.insert(id, rect);
    }

    fn recompute(&mut self, id: RectId, rect: &mut Rect, l: usize) {
        let (bottom, top) = (self.rects.get(&id.bottom()), self.rects.get(&id.top()));
        let no_levels: &[LevelState] = &[];
        let level = &rect.levels[l];
        let params = MergeParams {
            m: id.mid() as u64,
            k: level.target,
            apx: !level.exact,
            lambda: self.sched.lambda,
            sparsify: self.sparsify,
            window: None,
        };
        let deleted = &self.deleted;
        let out = merge(
            &Plain,
            bottom.map_or(no_levels, |r| &r.levels),
            top.map_or(no_levels, |r| &r.levels),
            &params,
            |q| !deleted[q.x as usize],
        );
        self.stats.merges += 1;
        self.stats.max_merge_output = self.stats.max_merge_output.max(out.len());
        let level = &mut rect.levels[l];
        level.merged = Some(shared(out));
        level.counter = 0;
        level.derived = None;
        self.rederive(id, rect, l);
    }

    fn rederive(&self, id: RectId, rect: &mut Rect, l: usize) {
        let empty = Cover::new();
        let child = |cid: RectId| self.rects.get(&cid).and_then(|r| r.levels.get(l)).map_or(&empty, |lv| &lv.tree);
        let (left, right) = (child(id.left()), child(id.right()));
        let level = &mut rect.levels[l];
        if let Some((dl, dr)) = &level.derived {
            if dl.ptr_eq(left) && dr.ptr_eq(right) {
                return;
            }
        }
        let merged = level.merged.as_ref().expect("derived level without merge output");
        level.tree = combine(&Plain, left, right, id.mid() as u64, merged);
        level.derived = Some((left.clone(), right.clone()));
    }

    /// Recomputes one level of one rectangle immediately.
    pub fn rebuild_level(&mut self, id: RectId, level: usize) {
        if let Some(mut rect) = self.rects.remove(&id) {
            if level < rect.levels.len() && !id.is_leaf() {
                self.recompute(id, &mut rect, level);
            }
            self.rects.insert(id, rect);
        }
    }

    fn check_interval(&self, i: usize, j: usize) -> Result<(u32, u32)> {
        let len = self.len();
        if i > j || j >= len {
            return Err(Error::InvalidInterval { i, j, len });
        }
        Ok((self.original_x(i)?, self.original_x(j)?))
    }

    /// Approximate LIS of the current positions `i..=j`.
    pub fn query(&self, i: usize, j: usize) -> Result<usize> {
        Ok(self.query_chain(i, j)?.0)
    }

    /// Like [`query`](Self::query), with a witness of at least that length.
    pub fn query_chain(&self, i: usize, j: usize) -> Result<(usize, Chain)> {
        let (xi, xj) = self.check_interval(i, j)?;
        let root = &self.rects[&self.root_id()];
        let levels = &root.levels;
        if levels.is_empty() {
            return Ok((0, Vec::new()));
        }
        Ok(match query_levels(&Plain, levels.len(), |l| &levels[l].tree, xi as u64, xj as u64) {
            Some((l, seg)) => {
                let chain: Chain = seg.chain.iter().copied().filter(|q| !self.deleted[q.x as usize]).collect();
                (levels[l].k1, chain)
            }
            None => (0, Vec::new()),
        })
    }

    /// Full-range query; 0 when empty.
    pub fn query_all(&self) -> (usize, Chain) {
        match self.len() {
            0 => (0, Vec::new()),
            n => self.query_chain(0, n - 1).unwrap(),
        }
    }

    pub fn rect(&self, id: RectId) -> Option<&Rect> {
        self.rects.get(&id)
    }

    pub fn rect_ids(&self) -> Vec<RectId> {
        let mut ids: Vec<RectId> = self.rects.keys().copied().collect();
        ids.sort();
        ids
    }

    /// Largest cover depth over all rectangles, and whether every cover
    /// respects `1 + h (6 / eps' + 2)` for its rectangle height `h`.
    pub fn depth_report(&self) -> (usize, bool) {
        let slack = 6.0 / self.sched.eps_prime + 2.0;
        let mut worst = 0;
        let mut ok = true;
        for (id, rect) in &self.rects {
            for lv in &rect.levels {
                let keys: Vec<_> = lv.tree.keys();
                let d = crate::cover::depth(&keys);
                worst = worst.max(d);
                if d as f64 > 1.0 + id.ky as f64 * slack {
                    ok = false;
                }
            }
        }
        (worst, ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{lis_dp, IntervalLis};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn perm(n: usize, rng: &mut ChaCha8Rng) -> PointSet {
        let mut ys: Vec<u32> = (0..n as u32).collect();
        ys.shuffle(rng);
        PointSet::from_ranks(&ys).unwrap()
    }

    #[test]
    fn single_point() {
        let mut d = DecrementalLis::build(&PointSet::from_ranks(&[0]).unwrap(), 0.5).unwrap();
        assert_eq!(d.query(0, 0).unwrap(), 1);
        d.delete(0).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.query_all().0, 0);
        assert!(d.query(0, 0).is_err());
    }

    #[test]
    fn sorted_input() {
        let ps = PointSet::from_ranks(&(0..16).collect::<Vec<_>>()).unwrap();
        let d = DecrementalLis::build(&ps, 0.5).unwrap();
        let (s, c) = d.query_all();
        assert!(s as f64 >= 16.0 / 1.5 && s <= 16);
        assert!(c.len() >= s);
    }

    #[test]
    fn bad_parameters() {
        let ps = PointSet::from_ranks(&[0, 1]).unwrap();
        assert_eq!(DecrementalLis::build(&ps, 0.0).unwrap_err(), Error::Epsilon(0.0));
        assert_eq!(DecrementalLis::build(&ps, 1.5).unwrap_err(), Error::Epsilon(1.5));
        let gap = PointSet::from_ranks(&[0, 2]).unwrap();
        assert_eq!(DecrementalLis::build(&gap, 0.5).unwrap_err(), Error::NotPermutation(2));
    }

    #[test]
    fn delete_sorted_one_by_one() {
        let n = 40;
        let ps = PointSet::from_ranks(&(0..n as u32).collect::<Vec<_>>()).unwrap();
        let mut d = DecrementalLis::build(&ps, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for live in (1..=n).rev() {
            let s = d.query_all().0;
            assert!(s as f64 >= live as f64 / 2.0 && s <= live, "live {live} got {s}");
            d.delete(rng.gen_range(0..live)).unwrap();
        }
        assert!(d.is_empty());
    }

    #[test]
    fn random_deletions_with_interval_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for eps in [1.0, 0.5] {
            let ps = perm(64, &mut rng);
            let mut d = DecrementalLis::build(&ps, eps).unwrap();
            while !d.is_empty() {
                let live = d.live_points();
                let t = IntervalLis::new(&live);
                for _ in 0..5 {
                    let i = rng.gen_range(0..live.len());
                    let j = rng.gen_range(i..live.len());
                    let opt = t.query(live[i].x, live[j].x);
                    let (s, chain) = d.query_chain(i, j).unwrap();
                    assert!(s <= opt && s as f64 * (1.0 + eps) >= opt as f64, "opt {opt} got {s}");
                    assert!(chain.len() >= s);
                    assert!(crate::oracle::chain_ok(&chain, &live[i..=j]));
                }
                d.delete(rng.gen_range(0..live.len())).unwrap();
            }
        }
    }

    #[test]
    fn family_audit_after_deletions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ps = perm(32, &mut rng);
        let mut d = DecrementalLis::build(&ps, 1.0).unwrap();
        for _ in 0..16 {
            let n = d.len();
            d.delete(rng.gen_range(0..n)).unwrap();
            for id in d.rect_ids() {
                let rect = d.rect(id).unwrap();
                let pts: Vec<Point> = rect.points.iter().map(|(&x, &y)| Point::new(x, y)).collect();
                let t = IntervalLis::new(&pts);
                for lv in &rect.levels {
                    let v = t.validate(&lv.tree.keys(), lv.k1, lv.k2);
                    assert!(v.is_valid(), "{id:?} k1={} {v:?}", lv.k1);
                }
            }
        }
        let values: Vec<u32> = d.live_points().iter().map(|p| p.y).collect();
        assert!(d.query_all().0 <= lis_dp(&values));
    }

    fn audit(d: &DecrementalLis) {
        for id in d.rect_ids() {
            let rect = d.rect(id).unwrap();
            let pts: Vec<Point> = rect.points.iter().map(|(&x, &y)| Point::new(x, y)).collect();
            let t = IntervalLis::new(&pts);
            for lv in &rect.levels {
                let v = t.validate(&lv.tree.keys(), lv.k1, lv.k2);
                assert!(v.is_valid(), "{id:?} k1={} exact={} {v:?}", lv.k1, lv.exact);
            }
        }
    }

    #[test]
    fn approximate_levels_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, eps_prime) in [(64, 0.3), (128, 0.45), (64, 0.6)] {
            // mostly sorted, so that long chains exist
            let mut ys: Vec<u32> = (0..n as u32).collect();
            for _ in 0..n / 8 {
                ys.swap(rng.gen_range(0..n), rng.gen_range(0..n));
            }
            let ps = PointSet::from_ranks(&ys).unwrap();
            let mut d = DecrementalLis::build_with_eps_prime(&ps, eps_prime).unwrap();
            let approx = d.rect_ids().iter().any(|&id| d.rect(id).unwrap().levels.iter().any(|l| !l.exact));
            assert!(approx);
            audit(&d);
            let mut merged_approx = false;
            while !d.is_empty() {
                d.delete(rng.gen_range(0..d.len())).unwrap();
                audit(&d);
                merged_approx |= d
                    .rect_ids()
                    .iter()
                    .any(|&id| d.rect(id).unwrap().levels.iter().any(|l| !l.exact && l.merged.is_some()));
                let live = d.live_points();
                if !live.is_empty() {
                    let (s, chain) = d.query_all();
                    assert!(chain.len() >= s && crate::oracle::chain_ok(&chain, &live));
                }
            }
            assert!(merged_approx);
        }
    }
}
