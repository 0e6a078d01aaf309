//! Brute-force references.
//!
//! The references call into none of the structures they check: LIS is the
//! quadratic dynamic program, cover validity is checked by enumerating
//! intervals, and [`ReferenceModel`] is a plain vector. [`differential_run`]
//! drives a structure and a reference side by side.

use std::collections::HashSet;

use crate::cover::Segment;
use crate::decremental::DecrementalLis;
use crate::dynamic::{DynOptions, DynamicLis};
use crate::lis::normalize;
use crate::point::Point;
use crate::script::{Command, UpdateScript};

/// Quadratic-time strict LIS length.
pub fn lis_dp<T: Ord>(values: &[T]) -> usize {
    let mut best = vec![0usize; values.len()];
    let mut out = 0;
    for j in 0..values.len() {
        let mut b = 1;
        for i in 0..j {
            if values[i] < values[j] && best[i] + 1 > b {
                b = best[i] + 1;
            }
        }
        best[j] = b;
        out = out.max(b);
    }
    out
}

/// Longest chain inside every interval of an x-sorted point list.
pub struct IntervalLis {
    points: Vec<Point>,
    // row i, column j - i: LIS of points[i..=j]
    table: Vec<Vec<u16>>,
}

impl IntervalLis {
    pub fn new(points: &[Point]) -> Self {
        let n = points.len();
        let mut table = Vec::with_capacity(n);
        let mut ending = vec![0u16; n];
        for i in 0..n {
            let mut row = Vec::with_capacity(n - i);
            let mut acc = 0u16;
            for j in i..n {
                let mut b = 1;
                for t in i..j {
                    if points[t].y < points[j].y && ending[t] + 1 > b {
                        b = ending[t] + 1;
                    }
                }
                ending[j] = b;
                acc = acc.max(b);
                row.push(acc);
            }
            table.push(row);
        }
        IntervalLis { points: points.to_vec(), table }
    }

    /// LIS of the points with x in `[lo, hi]`.
    pub fn query(&self, lo: u32, hi: u32) -> usize {
        let i = self.points.partition_point(|p| p.x < lo);
        let j = self.points.partition_point(|p| p.x <= hi);
        if i >= j {
            0
        } else {
            self.table[i][j - 1 - i] as usize
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Checks that `segs` is a `(k1, k2)`-cover of the points.
    ///
    /// Scores count only chain points that are still in the point list.
    pub fn validate(&self, segs: &[Segment], k1: usize, k2: f64) -> Verdict {
        let live: HashSet<Point> = self.points.iter().copied().collect();
        let mut sorted: Vec<&Segment> = segs.iter().collect();
        sorted.sort_by_key(|s| (s.begin, s.end));
        for s in &sorted {
            let c = &s.chain;
            let ok = !c.is_empty()
                && c.windows(2).all(|w| w[0].x < w[1].x && w[0].y < w[1].y)
                && c[0].x >= s.begin
                && c[c.len() - 1].x <= s.end;
            if !ok {
                return Verdict::BadChain { begin: s.begin, end: s.end };
            }
            let score = c.iter().filter(|p| live.contains(p)).count();
            if score < k1 {
                return Verdict::LowScore { begin: s.begin, end: s.end, score };
            }
        }
        for a in 0..sorted.len() {
            for b in 0..sorted.len() {
                let (x, y) = (sorted[a], sorted[b]);
                if a != b && x.begin <= y.begin && y.end <= x.end {
                    return Verdict::Nested { outer: (x.begin, x.end), inner: (y.begin, y.end) };
                }
            }
        }
        let need = k2.ceil().max(1.0) as u16;
        let n = self.points.len();
        for i in 0..n {
            // the shortest interval from i is the only one that matters
            let Some(off) = self.table[i].iter().position(|&l| l >= need) else { continue };
            let (lo, hi) = (self.points[i].x, self.points[i + off].x);
            if !sorted.iter().any(|s| s.begin >= lo && s.end <= hi) {
                return Verdict::Uncovered { i: lo, j: hi };
            }
        }
        Verdict::Valid
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// The interval holds a long enough chain but no segment fits in it.
    Uncovered {
        i: u32,
        j: u32,
    },
    Nested {
        outer: (u32, u32),
        inner: (u32, u32),
    },
    BadChain {
        begin: u32,
        end: u32,
    },
    LowScore {
        begin: u32,
        end: u32,
        score: usize,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

/// Checks that `segs` is a `(k1, k2)`-cover of an x-sorted point list.
pub fn validate_cover(points: &[Point], segs: &[Segment], k1: usize, k2: f64) -> Verdict {
    IntervalLis::new(points).validate(segs, k1, k2)
}

/// Whether `chain` is strictly increasing and uses only points of `live`.
pub fn chain_ok(chain: &[Point], live: &[Point]) -> bool {
    let set: HashSet<Point> = live.iter().copied().collect();
    chain.windows(2).all(|w| w[0].x < w[1].x && w[0].y < w[1].y) && chain.iter().all(|p| set.contains(p))
}

/// Plain copy of the live sequence, updated command by command.
#[derive(Clone, Debug, Default)]
pub struct ReferenceModel {
    // (id in order of arrival, value)
    items: Vec<(u32, i64)>,
    next: u32,
}

impl ReferenceModel {
    pub fn new(values: &[i64]) -> Self {
        let items: Vec<(u32, i64)> = values.iter().enumerate().map(|(i, &v)| (i as u32, v)).collect();
        ReferenceModel { next: items.len() as u32, items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn values(&self) -> Vec<i64> {
        self.items.iter().map(|&(_, v)| v).collect()
    }

    pub fn insert(&mut self, pos: usize, value: i64) {
        self.items.insert(pos, (self.next, value));
        self.next += 1;
    }

    pub fn delete(&mut self, pos: usize) {
        self.items.remove(pos);
    }

    /// Exact LIS of positions `i..=j`.
    pub fn opt(&self, i: usize, j: usize) -> usize {
        let vals: Vec<i64> = self.items[i..=j].iter().map(|&(_, v)| v).collect();
        lis_dp(&vals)
    }

    /// Current position of the element with the given id.
    pub fn position_of_id(&self, id: u32) -> Option<usize> {
        self.items.iter().position(|&(e, _)| e == id)
    }

    /// Whether `positions` is an increasing subsequence of `i..=j`.
    pub fn is_increasing_in(&self, positions: &[usize], i: usize, j: usize) -> bool {
        positions.iter().all(|&p| i <= p && p <= j)
            && positions.windows(2).all(|w| w[0] < w[1] && self.items[w[0]].1 < self.items[w[1]].1)
    }
}

/// Knobs for [`differential_run`].
#[derive(Clone, Copy, Debug)]
pub struct DiffConfig {
    pub epsilon: f64,
    /// Check cover depths after every update.
    pub depth_audit: bool,
    /// Replay on the fully dynamic structure even without inserts.
    pub force_dynamic: bool,
    pub cap_override: Option<usize>,
    pub sparsify: bool,
    /// Fixed `eps'` for the fully dynamic structure.
    pub eps_prime: Option<f64>,
}

impl DiffConfig {
    pub fn new(epsilon: f64) -> Self {
        DiffConfig {
            epsilon,
            depth_audit: false,
            force_dynamic: false,
            cap_override: None,
            sparsify: true,
            eps_prime: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Decremental,
    Dynamic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffReport {
    pub engine: Engine,
    pub updates: usize,
    pub queries: usize,
    /// Queries answered with exactly the optimum.
    pub exact_answers: usize,
    pub max_depth: usize,
    pub merges: u64,
    pub rebuilds: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Sandwich { index: usize, answer: usize, opt: usize },
    Chain { index: usize, answer: usize, chain: Vec<usize> },
    Depth { index: usize, depth: usize },
    Contract { index: usize, message: String },
}

impl Violation {
    pub fn index(&self) -> usize {
        match *self {
            Violation::Sandwich { index, .. }
            | Violation::Chain { index, .. }
            | Violation::Depth { index, .. }
            | Violation::Contract { index, .. } => index,
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Sandwich { index, answer, opt } => {
                write!(f, "command {index}: answer {answer} outside the sandwich around {opt}")
            }
            Violation::Chain { index, answer, chain } => {
                write!(f, "command {index}: witness {chain:?} is not an increasing chain of length {answer}")
            }
            Violation::Depth { index, depth } => write!(f, "command {index}: cover depth {depth} over its bound"),
            Violation::Contract { index, message } => write!(f, "command {index}: {message}"),
        }
    }
}

/// A violation together with a shrunk script that still shows one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub violation: Violation,
    pub repro: UpdateScript,
}

enum Subject {
    Dec(DecrementalLis),
    Dyn(Box<DynamicLis>),
}

impl Subject {
    fn depth(&self) -> (usize, bool) {
        match self {
            Subject::Dec(d) => d.depth_report(),
            Subject::Dyn(d) => d.depth_report(),
        }
    }
}

/// Replays `script` on the structure under test and on a [`ReferenceModel`],
/// checking every query against the exact answer.
///
/// Without inserts the decremental structure is used unless
/// `force_dynamic` is set. On failure the script is shrunk to a short prefix
/// and then single commands are dropped while a violation persists.
pub fn differential_run(script: &UpdateScript, cfg: &DiffConfig) -> std::result::Result<DiffReport, Failure> {
    match replay(script, cfg) {
        Ok(r) => Ok(r),
        Err(violation) => {
            let repro = shrink(script, cfg, violation.index());
            let violation = replay(&repro, cfg).expect_err("shrinking keeps a failing script");
            Err(Failure { violation, repro })
        }
    }
}

fn shrink(script: &UpdateScript, cfg: &DiffConfig, index: usize) -> UpdateScript {
    let mut cur = UpdateScript { preload: script.preload.clone(), commands: script.commands[..=index].to_vec() };
    let fails = |s: &UpdateScript| s.lengths().is_ok() && replay(s, cfg).is_err();
    loop {
        let mut changed = false;
        let mut k = cur.commands.len();
        while k > 0 {
            k -= 1;
            let mut trial = cur.clone();
            trial.commands.remove(k);
            if fails(&trial) {
                cur = trial;
                changed = true;
                k = k.min(cur.commands.len());
            }
        }
        if !changed {
            return cur;
        }
    }
}

fn replay(script: &UpdateScript, cfg: &DiffConfig) -> std::result::Result<DiffReport, Violation> {
    let contract = |index: usize, e: crate::error::Error| Violation::Contract { index, message: e.to_string() };
    let mut model = ReferenceModel::new(&script.preload);
    let dynamic = cfg.force_dynamic || cfg.eps_prime.is_some() || script.has_inserts();
    let mut subject = if dynamic {
        let opts = DynOptions { eps_prime: cfg.eps_prime, ..DynOptions::default() };
        let mut d = DynamicLis::from_values_with(&script.preload, cfg.epsilon, opts).map_err(|e| contract(0, e))?;
        d.set_cap_override(cfg.cap_override);
        d.set_sparsify(cfg.sparsify);
        d.set_depth_audit(cfg.depth_audit);
        Subject::Dyn(Box::new(d))
    } else {
        let ps = normalize(&script.preload);
        let mut d = DecrementalLis::build(&ps, cfg.epsilon).map_err(|e| contract(0, e))?;
        d.set_cap_override(cfg.cap_override);
        d.set_sparsify(cfg.sparsify);
        Subject::Dec(d)
    };
    let mut report = DiffReport {
        engine: if dynamic { Engine::Dynamic } else { Engine::Decremental },
        updates: 0,
        queries: 0,
        exact_answers: 0,
        max_depth: subject.depth().0,
        merges: 0,
        rebuilds: 0,
    };
    let eps = cfg.epsilon;
    for (index, &cmd) in script.commands.iter().enumerate() {
        match cmd {
            Command::Insert { pos, value } => {
                let Subject::Dyn(d) = &mut subject else { unreachable!() };
                d.insert(pos, value).map_err(|e| contract(index, e))?;
                model.insert(pos, value);
            }
            Command::Delete { pos } => {
                match &mut subject {
                    Subject::Dec(d) => d.delete(pos),
                    Subject::Dyn(d) => d.delete(pos),
                }
                .map_err(|e| contract(index, e))?;
                model.delete(pos);
            }
            Command::Query { i, j } | Command::QueryChain { i, j } => {
                let (answer, chain) = match &subject {
                    Subject::Dec(d) => {
                        let (a, c) = d.query_chain(i, j).map_err(|e| contract(index, e))?;
                        let pos: Option<Vec<usize>> = c.iter().map(|p| model.position_of_id(p.x)).collect();
                        (a, pos.unwrap_or_default())
                    }
                    Subject::Dyn(d) => {
                        let (a, c) = d.query_chain(i, j).map_err(|e| contract(index, e))?;
                        (a, c.iter().map(|p| p.x as usize).collect())
                    }
                };
                let opt = model.opt(i, j);
                report.queries += 1;
                if answer > opt || (answer as f64) * (1.0 + eps) < opt as f64 - 1e-9 {
                    return Err(Violation::Sandwich { index, answer, opt });
                }
                if answer == opt {
                    report.exact_answers += 1;
                }
                if matches!(cmd, Command::QueryChain { .. })
                    && (chain.len() < answer || !model.is_increasing_in(&chain, i, j))
                {
                    return Err(Violation::Chain { index, answer, chain });
                }
                continue;
            }
        }
        report.updates += 1;
        if cfg.depth_audit {
            let (depth, ok) = match &subject {
                Subject::Dyn(d) => (d.stats().max_depth, d.stats().depth_violations == 0),
                Subject::Dec(_) => subject.depth(),
            };
            report.max_depth = report.max_depth.max(depth);
            if !ok {
                return Err(Violation::Depth { index, depth });
            }
        }
    }
    let (depth, _) = subject.depth();
    report.max_depth = report.max_depth.max(depth);
    match &subject {
        Subject::Dec(d) => {
            report.merges = d.stats().merges;
        }
        Subject::Dyn(d) => {
            let s = d.stats();
            report.merges = s.merges;
            report.rebuilds = s.primary_rebuilds + s.secondary_rebuilds + s.root_rebuilds;
        }
    }
    Ok(report)
}
