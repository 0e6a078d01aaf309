use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use dynlis::cover::{cover_approx, cover_exact};
use dynlis::decremental::DecrementalLis;
use dynlis::dynamic::DynamicLis;
use dynlis::oracle::{differential_run, DiffConfig};
use dynlis::partition::{es_partition, es_partition_tight, Direction};
use dynlis::script::{Command, UpdateScript};
use dynlis::{lis_static, normalize};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::input::{integers, read};
use crate::CliError;

type Out = Result<String, CliError>;

fn emit<T: Serialize>(data: &T, json: bool, plain: impl FnOnce(&T) -> String) -> String {
    if json {
        serde_json::to_string_pretty(data).expect("plain data serializes") + "\n"
    } else {
        plain(data)
    }
}

fn joined<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct LisOutput {
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

pub fn render_lis(o: &LisOutput) -> String {
    let mut s = format!("{}\n", o.length);
    if let Some(w) = &o.witness {
        s += &joined(w);
        s.push('\n');
    }
    s
}

pub fn lis(path: &Path, witness: bool, json: bool) -> Out {
    let values = integers(&read(path)?)?;
    let (length, chain) = lis_static(normalize(&values).points());
    let o = LisOutput { length, witness: witness.then(|| chain.iter().map(|p| p.x as usize).collect()) };
    Ok(emit(&o, json, render_lis))
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SegmentOutput {
    pub begin: u32,
    pub end: u32,
    pub score: usize,
    pub chain: Vec<u32>,
}

pub fn render_cover(segs: &[SegmentOutput]) -> String {
    segs.iter().map(|s| format!("{} {} {}\n", s.begin, s.end, s.score)).collect()
}

pub fn cover(path: &Path, k1: usize, k2: Option<usize>, json: bool) -> Out {
    let values = integers(&read(path)?)?;
    let ps = normalize(&values);
    let segs = match k2 {
        None if k1 == 0 => return Err(CliError::Contract("k must be at least 1".into())),
        None => cover_exact(ps.points(), k1),
        Some(k2) => cover_approx(ps.points(), k1, k2)?,
    };
    let out: Vec<SegmentOutput> = segs
        .iter()
        .map(|s| SegmentOutput {
            begin: s.begin,
            end: s.end,
            score: s.score(),
            chain: s.chain.iter().map(|p| p.x).collect(),
        })
        .collect();
    Ok(emit(&out, json, |v| render_cover(v)))
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct QueryOutput {
    pub command: String,
    pub answer: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<usize>>,
}

pub fn render_queries(qs: &[QueryOutput]) -> String {
    let mut s = String::new();
    for q in qs {
        match &q.chain {
            Some(c) if !c.is_empty() => writeln!(s, "{} {}", q.answer, joined(c)),
            _ => writeln!(s, "{}", q.answer),
        }
        .unwrap();
    }
    s
}

enum Sim {
    Dec(DecrementalLis),
    Dyn(Box<DynamicLis>),
}

pub fn simulate(path: &Path, eps: f64, decremental: bool, json: bool) -> Out {
    let script = UpdateScript::parse(&read(path)?).map_err(|e| CliError::Parse { line: e.line, message: e.message })?;
    let mut sim = if decremental {
        if script.has_inserts() {
            return Err(CliError::Contract("--decremental scripts cannot insert".into()));
        }
        Sim::Dec(DecrementalLis::build(&normalize(&script.preload), eps)?)
    } else {
        Sim::Dyn(Box::new(DynamicLis::from_values(&script.preload, eps)?))
    };
    let mut out = Vec::new();
    for (k, &cmd) in script.commands.iter().enumerate() {
        let at = |e: dynlis::Error| CliError::Contract(format!("command {} (`{cmd}`): {e}", k + 1));
        match (&mut sim, cmd) {
            (Sim::Dyn(d), Command::Insert { pos, value }) => d.insert(pos, value).map_err(at)?,
            (Sim::Dec(_), Command::Insert { .. }) => unreachable!(),
            (Sim::Dyn(d), Command::Delete { pos }) => d.delete(pos).map_err(at)?,
            (Sim::Dec(d), Command::Delete { pos }) => d.delete(pos).map_err(at)?,
            (sim, Command::Query { i, j } | Command::QueryChain { i, j }) => {
                let (answer, chain) = match sim {
                    Sim::Dyn(d) => {
                        let (a, c) = d.query_chain(i, j).map_err(at)?;
                        (a, c.iter().map(|p| p.x as usize).collect())
                    }
                    Sim::Dec(d) => {
                        let (a, c) = d.query_chain(i, j).map_err(at)?;
                        (a, c.iter().filter_map(|p| d.position_of(p.x)).collect())
                    }
                };
                let with_chain = matches!(cmd, Command::QueryChain { .. });
                out.push(QueryOutput { command: cmd.to_string(), answer, chain: with_chain.then_some(chain) });
            }
        }
    }
    Ok(emit(&out, json, |v| render_queries(v)))
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct PartOutput {
    pub direction: char,
    pub values: Vec<i64>,
}

pub fn render_parts(parts: &[PartOutput]) -> String {
    parts.iter().map(|p| format!("{} {}\n", p.direction, joined(&p.values))).collect()
}

pub fn espartition(path: &Path, tight: Option<f64>, json: bool) -> Out {
    let values = integers(&read(path)?)?;
    let ps = normalize(&values);
    let parts = match tight {
        Some(eps) => es_partition_tight(&ps, eps)?,
        None => es_partition(&ps)?,
    };
    let out: Vec<PartOutput> = parts
        .parts
        .iter()
        .map(|(dir, chain)| PartOutput {
            direction: if *dir == Direction::Increasing { '+' } else { '-' },
            values: chain.iter().map(|p| values[p.x as usize]).collect(),
        })
        .collect();
    Ok(emit(&out, json, |v| render_parts(v)))
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct FuzzOutput {
    pub seed: u64,
    pub updates: usize,
    pub queries: usize,
    pub exact_answers: usize,
    pub max_depth: usize,
    pub merges: u64,
    pub rebuilds: u64,
}

pub fn render_fuzz(f: &FuzzOutput) -> String {
    format!(
        "clean seed={} updates={} queries={} exact={} max_depth={} merges={} rebuilds={}\n",
        f.seed, f.updates, f.queries, f.exact_answers, f.max_depth, f.merges, f.rebuilds
    )
}

pub fn fuzz(seed: u64, ops: usize, eps: f64, preload: usize, max_len: usize, json: bool) -> Out {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(dynlis::Error::Epsilon(eps).into());
    }
    let script = UpdateScript::random(seed, preload.min(max_len), ops, max_len.max(1), 2 * max_len.max(1) as i64);
    let mut cfg = DiffConfig::new(eps);
    cfg.depth_audit = true;
    cfg.force_dynamic = true;
    match differential_run(&script, &cfg) {
        Ok(r) => {
            let o = FuzzOutput {
                seed,
                updates: r.updates,
                queries: r.queries,
                exact_answers: r.exact_answers,
                max_depth: r.max_depth,
                merges: r.merges,
                rebuilds: r.rebuilds,
            };
            Ok(emit(&o, json, render_fuzz))
        }
        Err(f) => Err(CliError::Violation { message: f.violation.to_string(), repro: f.repro.to_string() }),
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub eps: f64,
    pub avg_update_us: f64,
    pub avg_query_us: f64,
    pub max_cover_depth: usize,
}

pub const CSV_HEADER: &str = "n,eps,avg_update_us,avg_query_us,max_cover_depth";

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{:.3},{:.3},{}", r.n, r.eps, r.avg_update_us, r.avg_query_us, r.max_cover_depth).unwrap();
    }
    s
}

pub fn render_table(rows: &[BenchRow]) -> String {
    let mut s = format!("{:>8} {:>6} {:>14} {:>13} {:>10}\n", "n", "eps", "update (us)", "query (us)", "depth");
    for r in rows {
        writeln!(
            s,
            "{:>8} {:>6} {:>14.3} {:>13.3} {:>10}",
            r.n, r.eps, r.avg_update_us, r.avg_query_us, r.max_cover_depth
        )
        .unwrap();
    }
    s
}

pub fn bench(ns: &[usize], epss: &[f64], seed: u64, ops: usize, queries: usize, csv: bool, json: bool) -> Out {
    let mut rows = Vec::new();
    for &n in ns {
        for &eps in epss {
            rows.push(bench_one(n, eps, seed, ops, queries)?);
        }
    }
    let render = if csv { render_csv } else { render_table };
    Ok(emit(&rows, json, |v| render(v)))
}

/// Random permutation of `0..n`, then `ops` updates alternating a random
/// delete with a random insert so that the length stays near `n`.
fn bench_one(n: usize, eps: f64, seed: u64, ops: usize, queries: usize) -> Result<BenchRow, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(32));
    let mut values: Vec<i64> = (0..n as i64).collect();
    values.shuffle(&mut rng);
    let mut d = DynamicLis::from_values(&values, eps)?;
    let mut spent = 0.0;
    for k in 0..ops {
        let len = d.len();
        let t = Instant::now();
        if k % 2 == 0 && len > 0 {
            d.delete(rng.gen_range(0..len))?;
        } else {
            d.insert(rng.gen_range(0..=len), rng.gen_range(0..n.max(1) as i64))?;
        }
        spent += t.elapsed().as_secs_f64();
    }
    let mut qspent = 0.0;
    let mut asked = 0;
    for _ in 0..queries {
        let len = d.len();
        if len == 0 {
            break;
        }
        let i = rng.gen_range(0..len);
        let j = rng.gen_range(i..len);
        let t = Instant::now();
        std::hint::black_box(d.query(i, j)?);
        qspent += t.elapsed().as_secs_f64();
        asked += 1;
    }
    let avg = |s: f64, k: usize| if k == 0 { 0.0 } else { s * 1e6 / k as f64 };
    Ok(BenchRow {
        n,
        eps,
        avg_update_us: avg(spent, ops),
        avg_query_us: avg(qspent, asked),
        max_cover_depth: d.depth_report().0,
    })
}
