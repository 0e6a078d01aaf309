//! Combining the covering families of a bottom/top split into segments that
//! cover intervals crossing a vertical line, and folding those segments into
//! the joined covers of the left/right split.

use std::sync::Arc;

use crate::cover::{cover_exact_by, greedy, seg_order, Cover, Level, Segment};
use crate::point::{Coords, Point};

/// Read access to one level of a covering family.
pub trait LevelView {
    fn score(&self) -> usize;
    fn cover(&self) -> &Cover;
}

impl LevelView for Level {
    fn score(&self) -> usize {
        self.k1
    }
    fn cover(&self) -> &Cover {
        &self.cover
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MergeParams {
    /// Key of the split line; crossing means `begin < m <= end`.
    pub m: u64,
    pub k: usize,
    pub apx: bool,
    pub lambda: f64,
    /// Turning this off skips the greedy pass over the candidate points.
    pub sparsify: bool,
    /// Half-open key window `[lo, hi)` every output chain must stay in.
    pub window: Option<(u64, u64)>,
}

/// Merge over two families given as slices of levels in increasing score.
///
/// `live` tells which chain points still exist; dead points are dropped from
/// the candidate chains before trimming.
pub fn merge<C, L, F>(c: &C, bottom: &[L], top: &[L], p: &MergeParams, live: F) -> Vec<Segment>
where
    C: Coords,
    L: LevelView,
    F: Fn(&Point) -> bool,
{
    let k = p.k;
    if k == 0 {
        return Vec::new();
    }
    let empty = Cover::new();
    // sparsified runs only need the union of candidate points
    let mut pts: Vec<Point> = Vec::new();
    let mut cands: Vec<Segment> = Vec::new();
    let mut seen = Seen::take();
    let mut concat = |a: Option<&Segment>, b: Option<&Segment>| {
        let start = pts.len();
        let mut taken = 0;
        for s in [a, b].into_iter().flatten() {
            for q in s.chain.iter() {
                if taken == k {
                    break;
                }
                if live(q) {
                    taken += 1;
                    if !p.sparsify || seen.insert(q.x) {
                        pts.push(*q);
                    }
                }
            }
        }
        if !p.sparsify && taken > 0 {
            cands.push(Segment::from_chain(pts.drain(start..).collect()));
        }
    };

    // index 0 stands for the artificial zero-score level
    let b_levels = bottom.len() + 1;
    for bi in 0..b_levels {
        let (r1, cb) = if bi == 0 { (0, &empty) } else { (bottom[bi - 1].score(), bottom[bi - 1].cover()) };
        let need = k.saturating_sub(r1);
        let ct = if need == 0 {
            Some(&empty)
        } else if p.apx {
            let t = top.partition_point(|l| l.score() < need);
            top.get(t).map(|l| l.cover())
        } else {
            top.iter().find(|l| l.score() == need).map(|l| l.cover())
        };
        let Some(ct) = ct else { continue };
        if cb.is_empty() && ct.is_empty() {
            continue;
        }
        for u in around(c, cb, p.m) {
            let ue = c.x_key(u.end);
            let v = ct.find_first(|s, _| c.x_key(s.begin) > ue).map(|(s, _)| s);
            concat(Some(u), v);
        }
        for v in around(c, ct, p.m) {
            let vb = c.x_key(v.begin);
            let u = cb.find_last(|s, _| c.x_key(s.end) < vb).map(|(s, _)| s);
            concat(u, Some(v));
        }
    }

    let mut segs = if p.sparsify {
        seen.give_back();
        let mut keyed: Vec<(u64, Point)> = pts.iter().map(|q| (c.x_key(q.x), *q)).collect();
        keyed.sort_unstable_by_key(|e| e.0);
        let pts: Vec<Point> = keyed.into_iter().map(|e| e.1).collect();
        if p.apx {
            let lo = ((k as f64 / p.lambda).ceil() as usize).clamp(1, k.max(2) - 1);
            greedy(c, &pts, k, lo, false)
        } else {
            cover_exact_by(c, &pts, k)
        }
    } else {
        cands
    };
    if let Some((lo, hi)) = p.window {
        segs.retain(|s| s.chain.iter().all(|q| (lo..hi).contains(&c.x_key(q.x))));
    }
    keep_near(c, segs, p.m)
}

/// Per-thread set of x ids, cleared in O(1) by bumping an epoch.
struct Seen {
    stamp: Vec<u32>,
    epoch: u32,
}

thread_local! {
    static SEEN: std::cell::RefCell<Option<Seen>> = const { std::cell::RefCell::new(None) };
}

impl Seen {
    fn take() -> Seen {
        let mut s = SEEN.with(|c| c.borrow_mut().take()).unwrap_or(Seen { stamp: Vec::new(), epoch: 0 });
        s.epoch = s.epoch.wrapping_add(1);
        if s.epoch == 0 {
            s.stamp.iter_mut().for_each(|v| *v = 0);
            s.epoch = 1;
        }
        s
    }

    fn insert(&mut self, x: u32) -> bool {
        let i = x as usize;
        if i >= self.stamp.len() {
            self.stamp.resize((i + 1).next_power_of_two(), 0);
        }
        let fresh = self.stamp[i] != self.epoch;
        self.stamp[i] = self.epoch;
        fresh
    }

    fn give_back(self) {
        SEEN.with(|c| *c.borrow_mut() = Some(self));
    }
}

/// Segments of `cover` from the last one ending before `m` through the first
/// one starting at or after `m`.
fn around<'a, C: Coords>(c: &'a C, cover: &'a Cover, m: u64) -> impl Iterator<Item = &'a Segment> + 'a {
    let before = cover.count_while(|s, _| c.x_key(s.end) < m);
    let upto = cover.count_while(|s, _| c.x_key(s.begin) < m);
    let from = before.saturating_sub(1);
    let to = (upto + 1).min(cover.len());
    cover.iter_from(from).take(to.saturating_sub(from)).map(|(s, _)| s)
}

/// Keeps the segments crossing `m` plus the nearest one on each side.
fn keep_near<C: Coords>(c: &C, segs: Vec<Segment>, m: u64) -> Vec<Segment> {
    let mut left: Option<Segment> = None;
    let mut right: Option<Segment> = None;
    let mut out = Vec::new();
    for s in segs {
        let (b, e) = (c.x_key(s.begin), c.x_key(s.end));
        if e < m {
            if left.as_ref().is_none_or(|l| c.x_key(l.end) < e) {
                left = Some(s);
            }
        } else if b >= m {
            if right.as_ref().is_none_or(|r| b < c.x_key(r.begin)) {
                right = Some(s);
            }
        } else {
            out.push(s);
        }
    }
    out.extend(left);
    out.extend(right);
    out.sort_by(seg_order(c));
    out
}

/// Joins the left and right covers and adds `new`, keeping the result free
/// of nested segments.
pub fn combine<C: Coords>(c: &C, left: &Cover, right: &Cover, m: u64, new: &[Segment]) -> Cover {
    let key = |x: u32| c.x_key(x);
    let mut l = left.clone();
    let mut r = right.clone();
    let mut keep: Vec<&Segment> = Vec::with_capacity(new.len());
    for s in new {
        let (b, e) = (key(s.begin), key(s.end));
        if e < m || b >= m {
            let side = if e < m { &mut l } else { &mut r };
            if side.find_first(|t, _| key(t.begin) >= b).is_some_and(|(t, _)| key(t.end) <= e) {
                continue;
            }
            let lo = side.count_while(|t, _| key(t.end) < e);
            let hi = side.count_while(|t, _| key(t.begin) <= b);
            if lo < hi {
                let first = side.find_rank(lo).unwrap().0.clone();
                let last = side.find_rank(hi - 1).unwrap().0.clone();
                *side = side.delete_interval_by(&first, &last, seg_order(c));
            }
            keep.push(s);
        } else {
            if l.find_first(|t, _| key(t.begin) >= b).is_some() {
                continue;
            }
            if r.first().is_some_and(|(t, _)| key(t.end) <= e) {
                continue;
            }
            keep.push(s);
        }
    }
    let mut tree = l.join_unchecked(&r);
    let order = seg_order(c);
    for s in keep {
        tree = tree.insert_by(s.clone(), (), &order);
    }
    tree
}

/// Merge output stored on a level, shared between versions.
pub type MergeOutput = Arc<[Segment]>;
