//! Segments, covers and covering families.
//!
//! A cover stores segments in a persistent tree ordered by `(begin, end)`.
//! Covers built by the greedy constructors never nest, so that order is also
//! the order of ends, and "the first segment starting at or after `i`" is
//! the segment inside `[i, j]` with the smallest end, if any is.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lis::Patience;
use crate::pbst::PTree;
use crate::point::{Coords, Plain, Point};

#[derive(Clone, PartialEq, Eq)]
pub struct Segment {
    pub begin: u32,
    pub end: u32,
    pub chain: Arc<[Point]>,
}

impl Segment {
    /// A tight segment spanning its chain. The chain must be nonempty.
    pub fn from_chain(chain: Vec<Point>) -> Self {
        let begin = chain.first().expect("segment chain is empty").x;
        let end = chain.last().unwrap().x;
        Segment { begin, end, chain: chain.into() }
    }

    pub fn score(&self) -> usize {
        self.chain.len()
    }
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]#{}", self.begin, self.end, self.chain.len())
    }
}

pub type Cover = PTree<Segment, ()>;

/// `(begin, end)` order under the given coordinates.
pub fn seg_order<C: Coords>(c: &C) -> impl Fn(&Segment, &Segment) -> Ordering + '_ {
    move |a, b| (c.x_key(a.begin), c.x_key(a.end)).cmp(&(c.x_key(b.begin), c.x_key(b.end)))
}

pub fn cover_from_segments<C: Coords>(c: &C, mut segs: Vec<Segment>) -> Cover {
    let order = seg_order(c);
    segs.sort_by(&order);
    segs.dedup_by(|a, b| order(a, b) == Ordering::Equal);
    PTree::from_sorted(segs.into_iter().map(|s| (s, ())).collect())
}

/// The shared greedy loop: shortest prefix from `i` holding a `k_pre`-chain,
/// then the shortest suffix of it holding a `k_suf`-chain, then advance.
pub(crate) fn greedy<C: Coords>(c: &C, points: &[Point], k_pre: usize, k_suf: usize, skip_begin: bool) -> Vec<Segment> {
    let n = points.len();
    let mut out = Vec::new();
    if k_pre == 0 || k_suf == 0 || n < k_pre {
        return out;
    }
    let keys: Vec<u64> = points.iter().map(|p| c.y_key(p.y)).collect();
    let mut fwd = Patience::default();
    let mut bwd = Patience::default();
    let mut ids = Vec::new();
    let mut i = 0;
    let mut last_q: Option<usize> = None;
    while i < n {
        fwd.clear();
        let mut end = None;
        for (j, &key) in keys.iter().enumerate().skip(i) {
            if fwd.push(key, j as u32) >= k_pre {
                end = Some(j);
                break;
            }
        }
        let Some(j) = end else { break };
        bwd.clear();
        let mut q = j;
        // prepending is appending on the reversed, negated sequence
        while bwd.push(u64::MAX - keys[q], q as u32) < k_suf {
            q -= 1;
        }
        bwd.witness(&mut ids);
        out.push(Segment::from_chain(ids.iter().rev().map(|&id| points[id as usize]).collect()));
        debug_assert!(last_q.is_none_or(|l| q > l), "greedy begin did not advance");
        i = match last_q {
            Some(l) if q <= l => l + 1,
            _ if skip_begin => q + 1,
            _ => q,
        };
        last_q = Some(q);
    }
    out
}

/// Greedy exact `k`-cover of an x-sorted point list.
pub fn cover_exact_by<C: Coords>(c: &C, points: &[Point], k: usize) -> Vec<Segment> {
    greedy(c, points, k, k, true)
}

pub fn cover_exact(points: &[Point], k: usize) -> Vec<Segment> {
    cover_exact_by(&Plain, points, k)
}

/// Greedy `(k1, k2)`-cover of an x-sorted point list.
pub fn cover_approx_by<C: Coords>(c: &C, points: &[Point], k1: usize, k2: usize) -> Result<Vec<Segment>> {
    if k1 == 0 || k2 <= k1 {
        return Err(Error::CoverParams { k1, k2 });
    }
    Ok(greedy(c, points, k2, k1, false))
}

pub fn cover_approx(points: &[Point], k1: usize, k2: usize) -> Result<Vec<Segment>> {
    cover_approx_by(&Plain, points, k1, k2)
}

/// Largest number of segment intervals sharing one x-coordinate.
pub fn depth_by<'a, C, I>(c: &C, segs: I) -> usize
where
    C: Coords,
    I: IntoIterator<Item = &'a Segment>,
{
    // closed intervals: at equal keys, openings come before closings
    let mut events: Vec<(u64, u8)> = Vec::new();
    for s in segs {
        events.push((c.x_key(s.begin), 0));
        events.push((c.x_key(s.end), 1));
    }
    events.sort_unstable();
    let (mut open, mut best) = (0usize, 0usize);
    for (_, kind) in events {
        if kind == 0 {
            open += 1;
            best = best.max(open);
        } else {
            open -= 1;
        }
    }
    best
}

pub fn depth(segs: &[Segment]) -> usize {
    depth_by(&Plain, segs)
}

/// First segment of `cover` lying inside the closed key range `[i, j]`.
pub fn segment_inside<'a, C: Coords>(c: &C, cover: &'a Cover, i: u64, j: u64) -> Option<&'a Segment> {
    let (s, _) = cover.find_first(|s, _| c.x_key(s.begin) >= i)?;
    (c.x_key(s.end) <= j).then_some(s)
}

/// Binary search for the highest level holding a segment inside `[i, j]`.
///
/// The predicate is not monotone over levels. The search keeps `lo` on a
/// level known to succeed, which is all the approximation argument needs;
/// ties resolve towards the larger level.
pub fn query_levels<'a, C, F>(c: &C, nlevels: usize, cover_at: F, i: u64, j: u64) -> Option<(usize, &'a Segment)>
where
    C: Coords,
    F: Fn(usize) -> &'a Cover,
{
    let first = segment_inside(c, cover_at(0), i, j)?;
    let (mut lo, mut hi) = (0usize, nlevels);
    let mut found = first;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match segment_inside(c, cover_at(mid), i, j) {
            Some(s) => {
                lo = mid;
                found = s;
            }
            None => hi = mid,
        }
    }
    Some((lo, found))
}

#[derive(Clone, Debug)]
pub struct Level {
    pub k1: usize,
    pub k2: f64,
    pub cover: Cover,
}

/// A `(gamma, r)`-covering family over a fixed point set.
#[derive(Clone, Debug)]
pub struct CoveringFamily {
    pub gamma: f64,
    pub r: u32,
    pub levels: Vec<Level>,
}

/// Number of exact levels: `min(n, ceil(3 / (gamma - 1)))`.
pub fn exact_threshold(gamma: f64, n: usize) -> usize {
    let k = (3.0 / (gamma - 1.0)).ceil();
    if k >= n as f64 {
        n
    } else {
        k as usize
    }
}

/// Builds a covering family with the greedy constructors.
///
/// `r = 0` gives one exact cover per chain length and ignores `gamma`.
pub fn build_family(points: &[Point], gamma: f64, r: u32) -> Result<CoveringFamily> {
    if r == 1 {
        return Err(Error::Exponent);
    }
    if r > 0 && !(gamma > 1.0 && gamma < 2.0) {
        return Err(Error::Gamma(gamma));
    }
    let n = points.len();
    let lis = crate::lis::lis_static(points).0;
    let exact = if r == 0 { n } else { exact_threshold(gamma, n) };
    let mut levels = Vec::new();
    for k in 1..=exact {
        let segs = if k <= lis { cover_exact(points, k) } else { Vec::new() };
        levels.push(Level { k1: k, k2: k as f64, cover: cover_from_segments(&Plain, segs) });
    }
    if r > 0 {
        let base = exact as f64;
        for j in 1.. {
            let k2 = base * gamma.powi(j + r as i32 - 1);
            if k2 > n as f64 {
                break;
            }
            let k1 = (base * gamma.powi(j)).ceil() as usize;
            let k2i = (k2.ceil() as usize).max(k1 + 1);
            let segs = if k2i <= lis { greedy(&Plain, points, k2i, k1, false) } else { Vec::new() };
            levels.push(Level { k1, k2, cover: cover_from_segments(&Plain, segs) });
        }
    }
    Ok(CoveringFamily { gamma, r, levels })
}

/// Reported score and segment of the highest matching level for `[i, j]`;
/// `(0, None)` when nothing fits.
pub fn family_query(family: &CoveringFamily, i: u32, j: u32) -> (usize, Option<Segment>) {
    if family.levels.is_empty() || i > j {
        return (0, None);
    }
    let levels = &family.levels;
    match query_levels(&Plain, levels.len(), |l| &levels[l].cover, i as u64, j as u64) {
        Some((l, seg)) => (levels[l].k1, Some(seg.clone())),
        None => (0, None),
    }
}
