//! Per-rectangle covering families with counters, shared by both structures.

use std::sync::Arc;

use crate::cover::{cover_exact_by, cover_from_segments, greedy, Cover, Segment};
use crate::lis::Patience;
use crate::merge::{LevelView, MergeOutput};
use crate::point::{Coords, Point};

/// One maintained level.
#[derive(Clone, Debug)]
pub struct LevelState {
    pub k1: usize,
    pub k2: f64,
    pub exact: bool,
    /// Score asked of Merge when this level is recomputed.
    pub target: usize,
    pub cap: usize,
    pub counter: usize,
    pub tree: Cover,
    /// Output of the last Merge; `None` while the level is still the one
    /// built by the greedy constructor.
    pub merged: Option<MergeOutput>,
    /// Child covers `tree` was last derived from.
    pub(crate) derived: Option<(Cover, Cover)>,
}

impl LevelView for LevelState {
    fn score(&self) -> usize {
        self.k1
    }
    fn cover(&self) -> &Cover {
        &self.tree
    }
}

impl LevelState {
    pub(crate) fn from_spec(sp: &LevelSpec, tree: Cover) -> Self {
        LevelState {
            k1: sp.k1,
            k2: sp.k2,
            exact: sp.exact,
            target: sp.target,
            cap: sp.cap,
            counter: 0,
            tree,
            merged: None,
            derived: None,
        }
    }

    /// Whether `p` is on the chain of a segment this level owns: the merge
    /// output, or the greedy tree before the first merge.
    pub(crate) fn owns_point<C: Coords>(&self, c: &C, p: Point) -> bool {
        match &self.merged {
            Some(m) => m.iter().any(|s| s.chain.contains(&p)),
            None => {
                let px = c.x_key(p.x);
                let from = self.tree.count_while(|s, _| c.x_key(s.end) < px);
                self.tree.iter_from(from).take_while(|(s, _)| c.x_key(s.begin) <= px).any(|(s, _)| s.chain.contains(&p))
            }
        }
    }
}

/// Level parameters of every family in one structure.
#[derive(Clone, Copy, Debug)]
pub struct Schedule {
    pub eps_prime: f64,
    pub lambda: f64,
    /// Number of exact levels.
    pub exact: usize,
    /// Exponent multiplier: `r = per_height * h`.
    pub per_height: u32,
    /// Build approximate levels as `(k1 lambda, k2 / lambda)` covers instead
    /// of `(k1 lambda, k2)`.
    pub two_sided: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSpec {
    pub k1: usize,
    pub k2: f64,
    pub exact: bool,
    pub target: usize,
    pub cap: usize,
    /// Chain lengths handed to the greedy constructor: (prefix, suffix).
    pub build: (usize, usize),
}

impl Schedule {
    pub fn new(eps_prime: f64, per_height: u32, two_sided: bool) -> Self {
        let lambda = 1.0 + eps_prime;
        Schedule { eps_prime, lambda, exact: (3.0 / eps_prime).ceil() as usize, per_height, two_sided }
    }

    /// Parameters of level `idx` (0-based) in a family of height `h`, or
    /// `None` past the last level whose score does not exceed `limit`.
    pub fn spec(&self, h: u32, idx: usize, limit: usize) -> Option<LevelSpec> {
        let r = self.per_height * h;
        if idx < self.exact || r == 0 {
            let k = idx + 1;
            return (k <= limit).then_some(LevelSpec {
                k1: k,
                k2: k as f64,
                exact: true,
                target: k,
                cap: 1,
                build: (k, k),
            });
        }
        let j = (idx + 1 - self.exact) as i32;
        let base = self.exact as f64;
        let gamma = self.lambda * self.lambda;
        let k1 = (base * gamma.powi(j)).ceil() as usize;
        if k1 > limit {
            return None;
        }
        let k2 = base * gamma.powi(j + r as i32 - 1);
        let target = (base * self.lambda.powi(2 * j + 2)).ceil() as usize;
        let cap = ((self.eps_prime * k1 as f64).floor() as usize).saturating_sub(1).max(1);
        let suf = (k1 as f64 * self.lambda).ceil() as usize;
        let pre = if self.two_sided { k2 / self.lambda } else { k2 };
        let pre = (pre.ceil() as usize).max(suf + 1);
        Some(LevelSpec { k1, k2, exact: false, target, cap, build: (pre, suf) })
    }

    /// Builds every level up to `limit` with the greedy constructors.
    pub fn build<C: Coords>(&self, c: &C, h: u32, points: &[Point], limit: usize) -> Vec<LevelState> {
        let lis = lis_by(c, points);
        let mut out = Vec::new();
        for idx in 0.. {
            let Some(sp) = self.spec(h, idx, limit) else { break };
            let segs: Vec<Segment> = if sp.build.0 > lis {
                Vec::new()
            } else if sp.exact {
                cover_exact_by(c, points, sp.k1)
            } else {
                greedy(c, points, sp.build.0, sp.build.1, false)
            };
            out.push(LevelState::from_spec(&sp, cover_from_segments(c, segs)));
        }
        out
    }
}

pub(crate) fn lis_by<C: Coords>(c: &C, points: &[Point]) -> usize {
    let mut piles = Patience::default();
    for (i, p) in points.iter().enumerate() {
        piles.push(c.y_key(p.y), i as u32);
    }
    piles.len()
}

pub(crate) fn shared(segs: Vec<Segment>) -> MergeOutput {
    Arc::from(segs)
}
