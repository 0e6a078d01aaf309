//! Order maintenance: handles into a list that answer "does a precede b".
//!
//! Every live handle has a `u64` key that increases along the list, so
//! comparisons are a single integer compare. Keys change when labels are
//! redistributed; only their relative order is stable.

use crate::error::{Error, Result};

pub type Handle = u32;

const NIL: u32 = u32::MAX;
const BUCKET_CAP: u32 = 64;

/// Labeling scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OmMode {
    /// Buckets of at most 64 items; bucket labels in the high half of the key.
    #[default]
    TwoLevel,
    /// One label per item, relabeled over aligned ranges.
    SingleLevel,
}

/// Linked list with labels in `[0, 2^bits)`. An insertion into a full gap
/// spreads out the smallest aligned label range around it whose density is
/// below `0.8^i` for a range of size `2^i`.
#[derive(Clone, Debug)]
struct Labeled {
    bits: u32,
    label: Vec<u64>,
    prev: Vec<u32>,
    next: Vec<u32>,
    alive: Vec<bool>,
}

impl Labeled {
    /// Two end slots, `0` and `1`.
    fn with_ends(bits: u32) -> Self {
        let max = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        Labeled { bits, label: vec![0, max], prev: vec![NIL, 0], next: vec![1, NIL], alive: vec![true, true] }
    }

    fn insert_after(&mut self, a: u32) -> u32 {
        let b = self.next[a as usize];
        debug_assert!(b != NIL);
        let id = self.label.len() as u32;
        let (la, lb) = (self.label[a as usize], self.label[b as usize]);
        self.label.push(la);
        self.prev.push(a);
        self.next.push(b);
        self.alive.push(true);
        self.next[a as usize] = id;
        self.prev[b as usize] = id;
        if lb - la >= 2 {
            self.label[id as usize] = la + (lb - la) / 2;
        } else {
            self.spread(id);
        }
        id
    }

    fn remove(&mut self, id: u32) {
        let (p, n) = (self.prev[id as usize], self.next[id as usize]);
        self.next[p as usize] = n;
        self.prev[n as usize] = p;
        self.alive[id as usize] = false;
    }

    fn spread(&mut self, id: u32) {
        let base = self.label[id as usize];
        let mut density = 1.0f64;
        for i in 1..=self.bits {
            density *= 0.8;
            let span: u128 = 1u128 << i;
            let lo = (base as u128 & !(span - 1)) as u64;
            let hi = (lo as u128 + span - 1) as u64;
            let mut run = vec![id];
            let mut s = self.prev[id as usize];
            while s != NIL && self.label[s as usize] >= lo {
                run.push(s);
                s = self.prev[s as usize];
            }
            run.reverse();
            let mut s = self.next[id as usize];
            while s != NIL && self.label[s as usize] <= hi && s != id {
                run.push(s);
                s = self.next[s as usize];
            }
            let fits = (run.len() as f64) <= span as f64 * density || i == self.bits;
            if fits && (run.len() as u128) <= span {
                let step = span / run.len() as u128;
                for (j, &s) in run.iter().enumerate() {
                    self.label[s as usize] = (lo as u128 + j as u128 * step) as u64;
                }
                // the end slot keeps the top label so that it stays last
                if *run.last().unwrap() == 1 {
                    self.label[1] = hi;
                }
                return;
            }
        }
        panic!("order maintenance label space exhausted");
    }
}

#[derive(Clone, Debug)]
pub struct OrderMaintenance {
    mode: OmMode,
    top: Labeled,
    // two-level only, indexed by item
    bucket: Vec<u32>,
    local: Vec<u32>,
    prev: Vec<u32>,
    next: Vec<u32>,
    alive: Vec<bool>,
    // two-level only, indexed by bucket
    first: Vec<u32>,
    size: Vec<u32>,
    len: usize,
}

impl Default for OrderMaintenance {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderMaintenance {
    /// Handle of the `-inf` guard.
    pub const MIN: Handle = 0;
    /// Handle of the `+inf` guard.
    pub const MAX: Handle = 1;

    pub fn new() -> Self {
        Self::with_mode(OmMode::TwoLevel)
    }

    pub fn with_mode(mode: OmMode) -> Self {
        match mode {
            OmMode::TwoLevel => OrderMaintenance {
                mode,
                top: Labeled::with_ends(32),
                bucket: vec![0, 1],
                local: vec![0, 0],
                prev: vec![NIL, 0],
                next: vec![1, NIL],
                alive: vec![true, true],
                first: vec![0, 1],
                size: vec![1, 1],
                len: 0,
            },
            OmMode::SingleLevel => OrderMaintenance {
                mode,
                top: Labeled::with_ends(62),
                bucket: Vec::new(),
                local: Vec::new(),
                prev: Vec::new(),
                next: Vec::new(),
                alive: Vec::new(),
                first: Vec::new(),
                size: Vec::new(),
                len: 0,
            },
        }
    }

    pub fn mode(&self) -> OmMode {
        self.mode
    }

    /// Number of live handles, guards excluded.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_live(&self, h: Handle) -> bool {
        let alive = match self.mode {
            OmMode::TwoLevel => &self.alive,
            OmMode::SingleLevel => &self.top.alive,
        };
        alive.get(h as usize).copied().unwrap_or(false)
    }

    fn live(&self, h: Handle) -> Result<()> {
        if self.is_live(h) {
            Ok(())
        } else {
            Err(Error::StaleHandle(h))
        }
    }

    /// Current key of a live handle.
    pub fn key(&self, h: Handle) -> u64 {
        debug_assert!(self.is_live(h));
        match self.mode {
            OmMode::TwoLevel => {
                (self.top.label[self.bucket[h as usize] as usize] << 32) | self.local[h as usize] as u64
            }
            OmMode::SingleLevel => self.top.label[h as usize],
        }
    }

    /// Whether `a` precedes `b`.
    pub fn order(&self, a: Handle, b: Handle) -> Result<bool> {
        self.live(a)?;
        self.live(b)?;
        Ok(self.key(a) < self.key(b))
    }

    /// Inserts a new handle right after `a`.
    pub fn insert_after(&mut self, a: Handle) -> Result<Handle> {
        self.live(a)?;
        if a == Self::MAX {
            return Err(Error::StaleHandle(a));
        }
        self.len += 1;
        Ok(match self.mode {
            OmMode::SingleLevel => self.top.insert_after(a),
            OmMode::TwoLevel => self.insert_two_level(a),
        })
    }

    /// Inserts a new handle right before `b`.
    pub fn insert_before(&mut self, b: Handle) -> Result<Handle> {
        self.live(b)?;
        let p = match self.mode {
            OmMode::TwoLevel => self.prev[b as usize],
            OmMode::SingleLevel => self.top.prev[b as usize],
        };
        if p == NIL {
            return Err(Error::StaleHandle(b));
        }
        self.insert_after(p)
    }

    pub fn delete(&mut self, h: Handle) -> Result<()> {
        self.live(h)?;
        if h == Self::MIN || h == Self::MAX {
            return Err(Error::StaleHandle(h));
        }
        self.len -= 1;
        match self.mode {
            OmMode::SingleLevel => self.top.remove(h),
            OmMode::TwoLevel => {
                let (p, n) = (self.prev[h as usize], self.next[h as usize]);
                self.next[p as usize] = n;
                self.prev[n as usize] = p;
                self.alive[h as usize] = false;
                let b = self.bucket[h as usize];
                self.size[b as usize] -= 1;
                if self.size[b as usize] == 0 {
                    self.top.remove(b);
                } else if self.first[b as usize] == h {
                    self.first[b as usize] = n;
                }
            }
        }
        Ok(())
    }

    /// Live handles in list order, guards excluded.
    pub fn handles(&self) -> Vec<Handle> {
        let next = match self.mode {
            OmMode::TwoLevel => &self.next,
            OmMode::SingleLevel => &self.top.next,
        };
        let mut out = Vec::with_capacity(self.len);
        let mut h = next[Self::MIN as usize];
        while h != Self::MAX {
            out.push(h);
            h = next[h as usize];
        }
        out
    }

    fn insert_two_level(&mut self, a: Handle) -> Handle {
        let b = self.bucket[a as usize];
        let n = self.next[a as usize];
        let id = self.bucket.len() as u32;
        self.bucket.push(b);
        self.local.push(0);
        self.prev.push(a);
        self.next.push(n);
        self.alive.push(true);
        self.next[a as usize] = id;
        self.prev[n as usize] = id;
        self.size[b as usize] += 1;

        let lo = self.local[a as usize] as u64;
        let hi = if self.bucket[n as usize] == b { self.local[n as usize] as u64 } else { 1 << 32 };
        if hi - lo >= 2 {
            self.local[id as usize] = (lo + (hi - lo) / 2) as u32;
        } else if self.size[b as usize] <= BUCKET_CAP {
            self.relabel_bucket(b);
        } else {
            self.split_bucket(b);
        }
        id
    }

    fn bucket_items(&self, b: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.size[b as usize] as usize);
        let mut h = self.first[b as usize];
        for _ in 0..self.size[b as usize] {
            out.push(h);
            h = self.next[h as usize];
        }
        out
    }

    fn relabel_bucket(&mut self, b: u32) {
        let items = self.bucket_items(b);
        let step = (1u64 << 32) / (items.len() as u64 + 1);
        for (j, h) in items.into_iter().enumerate() {
            self.local[h as usize] = (j as u64 * step) as u32;
        }
    }

    fn split_bucket(&mut self, b: u32) {
        let items = self.bucket_items(b);
        let nb = self.top.insert_after(b);
        let half = items.len() / 2;
        self.first.resize(self.top.label.len(), NIL);
        self.size.resize(self.top.label.len(), 0);
        self.first[nb as usize] = items[half];
        self.size[nb as usize] = (items.len() - half) as u32;
        self.size[b as usize] = half as u32;
        for &h in &items[half..] {
            self.bucket[h as usize] = nb;
        }
        self.relabel_bucket(b);
        self.relabel_bucket(nb);
    }
}
