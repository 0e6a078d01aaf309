//! Points, chains and coordinate orders.
//!
//! A [`Point`] carries two coordinate *ids*. In the decremental structure the
//! ids are the coordinates themselves; in the fully dynamic structure they are
//! order-maintenance handles whose relative order can only be resolved through
//! the owning structure. Everything that compares coordinates therefore goes
//! through a [`Coords`] implementation.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Resolves coordinate ids to comparable keys.
///
/// Keys are only meaningful relative to each other and only until the next
/// mutation of whatever backs the ids.
pub trait Coords {
    fn x_key(&self, x: u32) -> u64;
    fn y_key(&self, y: u32) -> u64;

    #[inline]
    fn x_lt(&self, a: u32, b: u32) -> bool {
        self.x_key(a) < self.x_key(b)
    }

    #[inline]
    fn y_lt(&self, a: u32, b: u32) -> bool {
        self.y_key(a) < self.y_key(b)
    }

    /// Strict domination in both coordinates.
    #[inline]
    fn precedes(&self, a: Point, b: Point) -> bool {
        self.x_lt(a.x, b.x) && self.y_lt(a.y, b.y)
    }
}

/// Ids are the coordinates.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plain;

impl Coords for Plain {
    #[inline]
    fn x_key(&self, x: u32) -> u64 {
        x as u64
    }
    #[inline]
    fn y_key(&self, y: u32) -> u64 {
        y as u64
    }
}

impl<C: Coords + ?Sized> Coords for &C {
    #[inline]
    fn x_key(&self, x: u32) -> u64 {
        (**self).x_key(x)
    }
    #[inline]
    fn y_key(&self, y: u32) -> u64 {
        (**self).y_key(y)
    }
}

/// A chain: points strictly increasing in both coordinates.
pub type Chain = Vec<Point>;

pub fn is_chain<C: Coords>(coords: &C, chain: &[Point]) -> bool {
    chain.windows(2).all(|w| coords.precedes(w[0], w[1]))
}

/// The array as a point set: `x` is the position, `y` the value rank.
///
/// Both coordinates are distinct across the set and the points are kept in
/// increasing `x` order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    /// Builds a point set from `ys[i]` at `x = i`. Returns `None` if two
    /// values coincide.
    pub fn from_ranks(ys: &[u32]) -> Option<Self> {
        let mut seen = std::collections::HashSet::with_capacity(ys.len());
        if !ys.iter().all(|y| seen.insert(*y)) {
            return None;
        }
        Some(PointSet { points: ys.iter().enumerate().map(|(i, &y)| Point::new(i as u32, y)).collect() })
    }

    /// Wraps points that are already x-sorted with distinct coordinates.
    pub fn from_sorted_points(points: Vec<Point>) -> Option<Self> {
        if !points.windows(2).all(|w| w[0].x < w[1].x) {
            return None;
        }
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        if !points.iter().all(|p| seen.insert(p.y)) {
            return None;
        }
        Some(PointSet { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ys(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.y).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when the y-coordinates are exactly `0..len`.
    pub fn is_permutation(&self) -> bool {
        let n = self.points.len();
        let mut seen = vec![false; n];
        for p in &self.points {
            let y = p.y as usize;
            if y >= n || seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }
}
