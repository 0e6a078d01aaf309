//! Persistent order-statistic AVL tree.
//!
//! Nodes are immutable and shared through `Arc`; every operation copies the
//! path it touches and leaves all previous versions intact. All updates are
//! expressed through `join`/`split`, which keeps the balancing logic in one
//! place.
//!
//! Key comparison is supplied by the caller (`*_by` methods) because keys of
//! the fully dynamic structure are order-maintenance handles. Keys with a
//! natural order get plain wrappers.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};

type Link<K, V> = Option<Arc<Node<K, V>>>;

#[derive(Debug)]
struct Node<K, V> {
    key: K,
    val: V,
    left: Link<K, V>,
    right: Link<K, V>,
    height: u8,
    size: u32,
}

#[inline]
fn height<K, V>(t: &Link<K, V>) -> u8 {
    t.as_ref().map_or(0, |n| n.height)
}

#[inline]
fn size<K, V>(t: &Link<K, V>) -> usize {
    t.as_ref().map_or(0, |n| n.size as usize)
}

#[inline]
fn mk<K, V>(key: K, val: V, left: Link<K, V>, right: Link<K, V>) -> Arc<Node<K, V>> {
    let height = 1 + height(&left).max(height(&right));
    let size = 1 + (size(&left) + size(&right)) as u32;
    Arc::new(Node { key, val, left, right, height, size })
}

#[derive(Debug)]
pub struct PTree<K, V> {
    root: Link<K, V>,
}

impl<K, V> Clone for PTree<K, V> {
    fn clone(&self) -> Self {
        PTree { root: self.root.clone() }
    }
}

impl<K, V> Default for PTree<K, V> {
    fn default() -> Self {
        PTree { root: None }
    }
}

impl<K: Clone, V: Clone> PTree<K, V> {
    pub fn new() -> Self {
        PTree { root: None }
    }

    pub fn len(&self) -> usize {
        size(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn height(&self) -> usize {
        height(&self.root) as usize
    }

    /// True when both handles point at the same version.
    pub fn ptr_eq(&self, other: &Self) -> bool {
        match (&self.root, &other.root) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Builds a perfectly balanced tree from items already sorted by key.
    pub fn from_sorted(items: Vec<(K, V)>) -> Self {
        fn build<K: Clone, V: Clone>(items: &[(K, V)]) -> Link<K, V> {
            if items.is_empty() {
                return None;
            }
            let mid = items.len() / 2;
            let (k, v) = items[mid].clone();
            Some(mk(k, v, build(&items[..mid]), build(&items[mid + 1..])))
        }
        PTree { root: build(&items) }
    }

    // ---- balancing core -------------------------------------------------

    fn rotate_left(t: Arc<Node<K, V>>) -> Arc<Node<K, V>> {
        let r = t.right.as_ref().expect("rotate_left needs a right child");
        let left = mk(t.key.clone(), t.val.clone(), t.left.clone(), r.left.clone());
        mk(r.key.clone(), r.val.clone(), Some(left), r.right.clone())
    }

    fn rotate_right(t: Arc<Node<K, V>>) -> Arc<Node<K, V>> {
        let l = t.left.as_ref().expect("rotate_right needs a left child");
        let right = mk(t.key.clone(), t.val.clone(), l.right.clone(), t.right.clone());
        mk(l.key.clone(), l.val.clone(), l.left.clone(), Some(right))
    }

    fn join_right(tl: &Arc<Node<K, V>>, key: K, val: V, tr: Link<K, V>) -> Arc<Node<K, V>> {
        let (l, c) = (&tl.left, &tl.right);
        if height(c) <= height(&tr) + 1 {
            let t = mk(key, val, c.clone(), tr);
            if t.height <= height(l) + 1 {
                mk(tl.key.clone(), tl.val.clone(), l.clone(), Some(t))
            } else {
                let t = Self::rotate_right(t);
                Self::rotate_left(mk(tl.key.clone(), tl.val.clone(), l.clone(), Some(t)))
            }
        } else {
            let t = Self::join_right(c.as_ref().unwrap(), key, val, tr);
            let h = t.height;
            let out = mk(tl.key.clone(), tl.val.clone(), l.clone(), Some(t));
            if h <= height(l) + 1 {
                out
            } else {
                Self::rotate_left(out)
            }
        }
    }

    fn join_left(tl: Link<K, V>, key: K, val: V, tr: &Arc<Node<K, V>>) -> Arc<Node<K, V>> {
        let (c, r) = (&tr.left, &tr.right);
        if height(c) <= height(&tl) + 1 {
            let t = mk(key, val, tl, c.clone());
            if t.height <= height(r) + 1 {
                mk(tr.key.clone(), tr.val.clone(), Some(t), r.clone())
            } else {
                let t = Self::rotate_left(t);
                Self::rotate_right(mk(tr.key.clone(), tr.val.clone(), Some(t), r.clone()))
            }
        } else {
            let t = Self::join_left(tl, key, val, c.as_ref().unwrap());
            let h = t.height;
            let out = mk(tr.key.clone(), tr.val.clone(), Some(t), r.clone());
            if h <= height(r) + 1 {
                out
            } else {
                Self::rotate_right(out)
            }
        }
    }

    /// Joins `l`, a middle item and `r`; every key of `l` precedes `key`,
    /// which precedes every key of `r`.
    fn join3(l: Link<K, V>, key: K, val: V, r: Link<K, V>) -> Link<K, V> {
        let (hl, hr) = (height(&l), height(&r));
        Some(if hl > hr + 1 {
            Self::join_right(l.as_ref().unwrap(), key, val, r)
        } else if hr > hl + 1 {
            Self::join_left(l, key, val, r.as_ref().unwrap())
        } else {
            mk(key, val, l, r)
        })
    }

    fn split_last(t: &Arc<Node<K, V>>) -> (Link<K, V>, K, V) {
        match &t.right {
            None => (t.left.clone(), t.key.clone(), t.val.clone()),
            Some(r) => {
                let (r2, k, v) = Self::split_last(r);
                (Self::join3(t.left.clone(), t.key.clone(), t.val.clone(), r2), k, v)
            }
        }
    }

    fn join2(l: Link<K, V>, r: Link<K, V>) -> Link<K, V> {
        match l {
            None => r,
            Some(ln) => {
                let (l2, k, v) = Self::split_last(&ln);
                Self::join3(l2, k, v, r)
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn split_link<F>(t: &Link<K, V>, key: &K, cmp: &F) -> (Link<K, V>, Option<(K, V)>, Link<K, V>)
    where
        F: Fn(&K, &K) -> Ordering,
    {
        match t {
            None => (None, None, None),
            Some(n) => match cmp(key, &n.key) {
                Ordering::Equal => (n.left.clone(), Some((n.key.clone(), n.val.clone())), n.right.clone()),
                Ordering::Less => {
                    let (ll, m, lr) = Self::split_link(&n.left, key, cmp);
                    (ll, m, Self::join3(lr, n.key.clone(), n.val.clone(), n.right.clone()))
                }
                Ordering::Greater => {
                    let (rl, m, rr) = Self::split_link(&n.right, key, cmp);
                    (Self::join3(n.left.clone(), n.key.clone(), n.val.clone(), rl), m, rr)
                }
            },
        }
    }

    // ---- public operations ----------------------------------------------

    /// Concatenates two trees. Every key of `self` must precede every key of
    /// `other`.
    pub fn join_by<F>(&self, other: &Self, cmp: F) -> Result<Self>
    where
        F: Fn(&K, &K) -> Ordering,
    {
        if let (Some(a), Some(b)) = (self.last(), other.first()) {
            if cmp(a.0, b.0) != Ordering::Less {
                return Err(Error::JoinOrder);
            }
        }
        Ok(self.join_unchecked(other))
    }

    /// `join_by` without the boundary check, for callers that know the key
    /// ranges are separated.
    pub fn join_unchecked(&self, other: &Self) -> Self {
        PTree { root: Self::join2(self.root.clone(), other.root.clone()) }
    }

    /// Splits into keys `< key` and keys `>= key`.
    pub fn split_by<F>(&self, key: &K, cmp: F) -> (Self, Self)
    where
        F: Fn(&K, &K) -> Ordering,
    {
        let (l, m, r) = Self::split_link(&self.root, key, &cmp);
        let r = match m {
            Some((k, v)) => Self::join3(None, k, v, r),
            None => r,
        };
        (PTree { root: l }, PTree { root: r })
    }

    /// Inserts or replaces the item with `key`.
    pub fn insert_by<F>(&self, key: K, val: V, cmp: F) -> Self
    where
        F: Fn(&K, &K) -> Ordering,
    {
        let (l, _, r) = Self::split_link(&self.root, &key, &cmp);
        PTree { root: Self::join3(l, key, val, r) }
    }

    pub fn delete_by<F>(&self, key: &K, cmp: F) -> Self
    where
        F: Fn(&K, &K) -> Ordering,
    {
        let (l, m, r) = Self::split_link(&self.root, key, &cmp);
        if m.is_none() {
            return self.clone();
        }
        PTree { root: Self::join2(l, r) }
    }

    /// Removes every key in the closed range `[lo, hi]`: two splits and a join.
    pub fn delete_interval_by<F>(&self, lo: &K, hi: &K, cmp: F) -> Self
    where
        F: Fn(&K, &K) -> Ordering,
    {
        if cmp(lo, hi) == Ordering::Greater {
            return self.clone();
        }
        let (l, _, rest) = Self::split_link(&self.root, lo, &cmp);
        let (_, _, r) = Self::split_link(&rest, hi, &cmp);
        PTree { root: Self::join2(l, r) }
    }

    pub fn get_by<F>(&self, key: &K, cmp: F) -> Option<(&K, &V)>
    where
        F: Fn(&K, &K) -> Ordering,
    {
        let mut cur = &self.root;
        while let Some(n) = cur {
            match cmp(key, &n.key) {
                Ordering::Equal => return Some((&n.key, &n.val)),
                Ordering::Less => cur = &n.left,
                Ordering::Greater => cur = &n.right,
            }
        }
        None
    }

    /// The item with the largest key not greater than `key`.
    pub fn find_by<F>(&self, key: &K, cmp: F) -> Option<(&K, &V)>
    where
        F: Fn(&K, &K) -> Ordering,
    {
        self.find_last(|k, _| cmp(k, key) != Ordering::Greater)
    }

    /// The item with the smallest key not less than `key`.
    pub fn successor_by<F>(&self, key: &K, cmp: F) -> Option<(&K, &V)>
    where
        F: Fn(&K, &K) -> Ordering,
    {
        self.find_first(|k, _| cmp(k, key) != Ordering::Less)
    }

    /// Number of keys strictly less than `key`.
    pub fn rank_by<F>(&self, key: &K, cmp: F) -> usize
    where
        F: Fn(&K, &K) -> Ordering,
    {
        self.count_while(|k, _| cmp(k, key) == Ordering::Less)
    }

    /// The item of rank `r` (0-based).
    pub fn find_rank(&self, mut r: usize) -> Option<(&K, &V)> {
        let mut cur = &self.root;
        while let Some(n) = cur {
            let ls = size(&n.left);
            match r.cmp(&ls) {
                Ordering::Less => cur = &n.left,
                Ordering::Equal => return Some((&n.key, &n.val)),
                Ordering::Greater => {
                    r -= ls + 1;
                    cur = &n.right;
                }
            }
        }
        None
    }

    /// Length of the prefix on which `pred` holds; `pred` must be true on a
    /// prefix of the in-order sequence and false afterwards.
    pub fn count_while<F>(&self, pred: F) -> usize
    where
        F: Fn(&K, &V) -> bool,
    {
        let mut cur = &self.root;
        let mut acc = 0;
        while let Some(n) = cur {
            if pred(&n.key, &n.val) {
                acc += size(&n.left) + 1;
                cur = &n.right;
            } else {
                cur = &n.left;
            }
        }
        acc
    }

    /// Last item of the prefix on which `pred` holds.
    pub fn find_last<F>(&self, pred: F) -> Option<(&K, &V)>
    where
        F: Fn(&K, &V) -> bool,
    {
        let mut cur = &self.root;
        let mut best = None;
        while let Some(n) = cur {
            if pred(&n.key, &n.val) {
                best = Some((&n.key, &n.val));
                cur = &n.right;
            } else {
                cur = &n.left;
            }
        }
        best
    }

    /// First item of the suffix on which `pred` holds; `pred` must be false
    /// on a prefix and true afterwards.
    pub fn find_first<F>(&self, pred: F) -> Option<(&K, &V)>
    where
        F: Fn(&K, &V) -> bool,
    {
        let mut cur = &self.root;
        let mut best = None;
        while let Some(n) = cur {
            if pred(&n.key, &n.val) {
                best = Some((&n.key, &n.val));
                cur = &n.left;
            } else {
                cur = &n.right;
            }
        }
        best
    }

    pub fn first(&self) -> Option<(&K, &V)> {
        let mut cur = self.root.as_ref()?;
        while let Some(l) = &cur.left {
            cur = l;
        }
        Some((&cur.key, &cur.val))
    }

    pub fn last(&self) -> Option<(&K, &V)> {
        let mut cur = self.root.as_ref()?;
        while let Some(r) = &cur.right {
            cur = r;
        }
        Some((&cur.key, &cur.val))
    }

    /// In-order iterator starting at rank `from`.
    pub fn iter_from(&self, from: usize) -> Iter<'_, K, V> {
        let mut stack = Vec::with_capacity(self.height());
        let mut cur = &self.root;
        let mut r = from;
        while let Some(n) = cur {
            let ls = size(&n.left);
            if r < ls {
                stack.push(&**n);
                cur = &n.left;
            } else if r == ls {
                stack.push(&**n);
                break;
            } else {
                r -= ls + 1;
                cur = &n.right;
            }
        }
        Iter { stack }
    }

    pub fn iter(&self) -> Iter<'_, K, V> {
        self.iter_from(0)
    }

    pub fn keys(&self) -> Vec<K> {
        self.iter().map(|(k, _)| k.clone()).collect()
    }

    /// Checks AVL balance, subtree sizes and key order. Used by tests.
    pub fn check_by<F>(&self, cmp: F) -> std::result::Result<(), String>
    where
        F: Fn(&K, &K) -> Ordering,
    {
        fn walk<K, V>(t: &Link<K, V>) -> std::result::Result<(u8, usize), String> {
            match t {
                None => Ok((0, 0)),
                Some(n) => {
                    let (hl, sl) = walk(&n.left)?;
                    let (hr, sr) = walk(&n.right)?;
                    if hl.abs_diff(hr) > 1 {
                        return Err(format!("unbalanced node: heights {hl} / {hr}"));
                    }
                    if n.height != 1 + hl.max(hr) {
                        return Err("stale height".into());
                    }
                    if n.size as usize != 1 + sl + sr {
                        return Err("stale size".into());
                    }
                    Ok((n.height, n.size as usize))
                }
            }
        }
        walk(&self.root)?;
        let keys: Vec<&K> = self.iter().map(|(k, _)| k).collect();
        if keys.windows(2).any(|w| cmp(w[0], w[1]) != Ordering::Less) {
            return Err("keys out of order".into());
        }
        Ok(())
    }
}

impl<K: Ord + Clone, V: Clone> PTree<K, V> {
    pub fn insert(&self, key: K, val: V) -> Self {
        self.insert_by(key, val, K::cmp)
    }

    pub fn delete(&self, key: &K) -> Self {
        self.delete_by(key, K::cmp)
    }

    pub fn get(&self, key: &K) -> Option<&V> {
        self.get_by(key, K::cmp).map(|(_, v)| v)
    }

    pub fn find(&self, key: &K) -> Option<(&K, &V)> {
        self.find_by(key, K::cmp)
    }

    pub fn successor(&self, key: &K) -> Option<(&K, &V)> {
        self.successor_by(key, K::cmp)
    }

    pub fn rank(&self, key: &K) -> usize {
        self.rank_by(key, K::cmp)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.join_by(other, K::cmp)
    }

    pub fn split(&self, key: &K) -> (Self, Self) {
        self.split_by(key, K::cmp)
    }

    pub fn delete_interval(&self, lo: &K, hi: &K) -> Self {
        self.delete_interval_by(lo, hi, K::cmp)
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        self.check_by(K::cmp)
    }
}

pub struct Iter<'a, K, V> {
    stack: Vec<&'a Node<K, V>>,
}

impl<'a, K, V> Iterator for Iter<'a, K, V> {
    type Item = (&'a K, &'a V);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.stack.pop()?;
        let mut cur = &n.right;
        while let Some(c) = cur {
            self.stack.push(c);
            cur = &c.left;
        }
        Some((&n.key, &n.val))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tree(keys: impl IntoIterator<Item = i64>) -> PTree<i64, ()> {
        keys.into_iter().fold(PTree::new(), |t, k| t.insert(k, ()))
    }

    #[test]
    fn find_rank_after_ascending_inserts() {
        let t = tree(1..=64);
        t.check().unwrap();
        for r in 0..64 {
            assert_eq!(t.find_rank(r).map(|(k, _)| *k), Some(r as i64 + 1));
        }
        assert!(t.find_rank(64).is_none());
        assert!(t.height() <= 8);
    }

    #[test]
    fn delete_interval_keeps_old_version() {
        let v1 = tree(1..=8);
        let v2 = v1.delete_interval(&3, &6);
        assert_eq!(v1.keys(), (1..=8).collect::<Vec<_>>());
        assert_eq!(v2.keys(), vec![1, 2, 7, 8]);
        v2.check().unwrap();
    }

    #[test]
    fn find_successor_rank() {
        let t = tree([10, 20, 30]);
        assert_eq!(t.find(&25).map(|(k, _)| *k), Some(20));
        assert_eq!(t.find(&5), None);
        assert_eq!(t.find(&30).map(|(k, _)| *k), Some(30));
        assert_eq!(t.successor(&25).map(|(k, _)| *k), Some(30));
        assert_eq!(t.successor(&31), None);
        assert_eq!(t.rank(&25), 2);
        assert_eq!(t.rank(&10), 0);
    }

    #[test]
    fn join_and_split() {
        let a = tree(0..50);
        let b = tree(50..120);
        let j = a.join(&b).unwrap();
        j.check().unwrap();
        assert_eq!(j.keys(), (0..120).collect::<Vec<_>>());
        assert_eq!(b.join(&a).unwrap_err(), Error::JoinOrder);
        let (l, r) = j.split(&77);
        assert_eq!(l.keys(), (0..77).collect::<Vec<_>>());
        assert_eq!(r.keys(), (77..120).collect::<Vec<_>>());
        l.check().unwrap();
        r.check().unwrap();
        // unbalanced joins
        let small = tree([1000]);
        let big = j.join(&small).unwrap();
        big.check().unwrap();
        let big = tree([-5]).join(&big).unwrap();
        big.check().unwrap();
        assert_eq!(big.len(), 122);
    }

    #[test]
    fn iter_from_rank() {
        let t = tree((0..100).map(|k| k * 2));
        let tail: Vec<i64> = t.iter_from(90).map(|(k, _)| *k).collect();
        assert_eq!(tail, (90..100).map(|k| k * 2).collect::<Vec<_>>());
        assert_eq!(t.iter_from(100).count(), 0);
    }

    #[test]
    fn differential_against_sorted_vec() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut t: PTree<i64, i64> = PTree::new();
        let mut model: Vec<i64> = Vec::new();
        let mut history: Vec<(PTree<i64, i64>, Vec<i64>)> = Vec::new();
        for step in 0..100_000 {
            let k = rng.gen_range(0..2000);
            match rng.gen_range(0..10) {
                0..=3 => {
                    t = t.insert(k, k * 3);
                    if let Err(pos) = model.binary_search(&k) {
                        model.insert(pos, k);
                    }
                }
                4..=6 => {
                    t = t.delete(&k);
                    if let Ok(pos) = model.binary_search(&k) {
                        model.remove(pos);
                    }
                }
                7 => {
                    let hi = k + rng.gen_range(0..100);
                    t = t.delete_interval(&k, &hi);
                    model.retain(|&x| x < k || x > hi);
                }
                8 => {
                    let expect = model.iter().rev().find(|&&x| x <= k).copied();
                    assert_eq!(t.find(&k).map(|(k, _)| *k), expect);
                    let expect = model.iter().find(|&&x| x >= k).copied();
                    assert_eq!(t.successor(&k).map(|(k, _)| *k), expect);
                }
                _ => {
                    if !model.is_empty() {
                        let r = rng.gen_range(0..model.len());
                        assert_eq!(t.find_rank(r).map(|(k, v)| (*k, *v)), Some((model[r], model[r] * 3)));
                    }
                }
            }
            assert_eq!(t.len(), model.len());
            if step % 5000 == 0 {
                t.check().unwrap();
                assert_eq!(t.keys(), model);
                history.push((t.clone(), model.clone()));
            }
        }
        for (old, keys) in &history {
            assert_eq!(&old.keys(), keys);
            old.check().unwrap();
        }
    }

    #[test]
    fn height_is_logarithmic() {
        let t = tree(0..10_000);
        // AVL: h < 1.4405 log2(n + 2)
        assert!((t.height() as f64) < 1.4405 * (10_002f64).log2());
    }
}
