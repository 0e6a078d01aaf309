//! Replayable update scripts.
//!
//! One command per line:
//!
//! ```text
//! P 3 1 2      preload (first line only)
//! I 0 7        insert value 7 at position 0
//! D 2          delete position 2
//! Q 0 2        approximate LIS of positions 0..=2
//! QC 0 2       same, with a witness
//! ```
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Insert { pos: usize, value: i64 },
    Delete { pos: usize },
    Query { i: usize, j: usize },
    QueryChain { i: usize, j: usize },
}

impl Command {
    pub fn is_query(&self) -> bool {
        matches!(self, Command::Query { .. } | Command::QueryChain { .. })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Command::Insert { pos, value } => write!(f, "I {pos} {value}"),
            Command::Delete { pos } => write!(f, "D {pos}"),
            Command::Query { i, j } => write!(f, "Q {i} {j}"),
            Command::QueryChain { i, j } => write!(f, "QC {i} {j}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateScript {
    pub preload: Vec<i64>,
    pub commands: Vec<Command>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Why a script cannot be executed as written.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("command {index} (`{command}`) is out of range for length {len}")]
pub struct ReplayError {
    pub index: usize,
    pub command: Command,
    pub len: usize,
}

impl UpdateScript {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut out = UpdateScript::default();
        let mut first = true;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let err = |message: String| ParseError { line, message };
            let mut words = body.split_whitespace();
            let op = words.next().unwrap();
            let args: Vec<&str> = words.collect();
            let arity = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(err(format!("`{op}` takes {k} arguments, got {}", args.len())))
                }
            };
            let pos = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad position `{s}`")));
            let val = |s: &str| s.parse::<i64>().map_err(|_| err(format!("bad value `{s}`")));
            let cmd = match op {
                "P" if first => {
                    out.preload = args.iter().map(|s| val(s)).collect::<Result<_, _>>()?;
                    first = false;
                    continue;
                }
                "P" => return Err(err("preload must be the first command".into())),
                "I" => {
                    arity(2)?;
                    Command::Insert { pos: pos(args[0])?, value: val(args[1])? }
                }
                "D" => {
                    arity(1)?;
                    Command::Delete { pos: pos(args[0])? }
                }
                "Q" | "QC" => {
                    arity(2)?;
                    let (i, j) = (pos(args[0])?, pos(args[1])?);
                    if i > j {
                        return Err(err(format!("query bounds {i} > {j}")));
                    }
                    if op == "Q" {
                        Command::Query { i, j }
                    } else {
                        Command::QueryChain { i, j }
                    }
                }
                _ => return Err(err(format!("unknown command `{op}`"))),
            };
            first = false;
            out.commands.push(cmd);
        }
        Ok(out)
    }

    pub fn has_inserts(&self) -> bool {
        self.commands.iter().any(|c| matches!(c, Command::Insert { .. }))
    }

    /// Array length before each command, or the first command that does not
    /// fit the array it would run against.
    pub fn lengths(&self) -> Result<Vec<usize>, ReplayError> {
        let mut len = self.preload.len();
        let mut out = Vec::with_capacity(self.commands.len());
        for (index, &command) in self.commands.iter().enumerate() {
            out.push(len);
            let fits = match command {
                Command::Insert { pos, .. } => pos <= len,
                Command::Delete { pos } => pos < len,
                Command::Query { j, .. } | Command::QueryChain { j, .. } => j < len,
            };
            if !fits {
                return Err(ReplayError { index, command, len });
            }
            match command {
                Command::Insert { .. } => len += 1,
                Command::Delete { .. } => len -= 1,
                _ => {}
            }
        }
        Ok(out)
    }

    /// Seeded random script: a preload of `preload` values, then `updates`
    /// inserts and deletes with equal probability, each followed by a query.
    /// Values are drawn from `0..values`, so ties occur when `values` is small.
    pub fn random(seed: u64, preload: usize, updates: usize, max_len: usize, values: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = UpdateScript {
            preload: (0..preload).map(|_| rng.gen_range(0..values)).collect(),
            commands: Vec::with_capacity(2 * updates),
        };
        let mut len = preload;
        for step in 0..updates {
            let insert = len == 0 || (len < max_len && rng.gen_bool(0.5));
            if insert {
                let pos = rng.gen_range(0..=len);
                out.commands.push(Command::Insert { pos, value: rng.gen_range(0..values) });
                len += 1;
            } else {
                out.commands.push(Command::Delete { pos: rng.gen_range(0..len) });
                len -= 1;
            }
            if len > 0 {
                let i = rng.gen_range(0..len);
                let j = rng.gen_range(i..len);
                out.commands.push(if step % 2 == 0 { Command::Query { i, j } } else { Command::QueryChain { i, j } });
            }
        }
        out
    }

    /// Seeded deletion-only script over a random permutation of `0..n`, with
    /// `queries` random queries after each deletion.
    pub fn random_deletions(seed: u64, n: usize, queries: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<i64> = (0..n as i64).collect();
        for i in (1..n).rev() {
            values.swap(i, rng.gen_range(0..=i));
        }
        let mut out = UpdateScript { preload: values, commands: Vec::new() };
        for len in (1..=n).rev() {
            out.commands.push(Command::Delete { pos: rng.gen_range(0..len) });
            for q in 0..queries.min(len - 1) {
                let i = rng.gen_range(0..len - 1);
                let j = rng.gen_range(i..len - 1);
                out.commands.push(if q % 2 == 0 { Command::Query { i, j } } else { Command::QueryChain { i, j } });
            }
        }
        out
    }
}

impl fmt::Display for UpdateScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.preload.is_empty() {
            write!(f, "P")?;
            for v in &self.preload {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        for c in &self.commands {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let text = "P 3 1 2\nI 0 7\n# note\n\nD 2\nQ 0 2\nQC 1 2\n";
        let s = UpdateScript::parse(text).unwrap();
        assert_eq!(s.preload, vec![3, 1, 2]);
        assert_eq!(s.commands.len(), 4);
        assert_eq!(s.to_string(), "P 3 1 2\nI 0 7\nD 2\nQ 0 2\nQC 1 2\n");
        assert_eq!(UpdateScript::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = UpdateScript::parse("Q 0 1\n\nI x 3").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(UpdateScript::parse("D 1\nP 1 2").unwrap_err().line, 2);
        assert_eq!(UpdateScript::parse("Q 2 1").unwrap_err().line, 1);
        assert_eq!(UpdateScript::parse("X").unwrap_err().line, 1);
        assert_eq!(UpdateScript::parse("D").unwrap_err().line, 1);
        assert_eq!(UpdateScript::parse("D -1").unwrap_err().line, 1);
    }

    #[test]
    fn lengths_flag_out_of_range_commands() {
        let s = UpdateScript::parse("P 1 2\nI 2 5\nD 0\nQ 0 1\nD 2").unwrap();
        let e = s.lengths().unwrap_err();
        assert_eq!((e.index, e.len), (3, 2));
    }

    #[test]
    fn random_scripts_are_replayable_and_seeded() {
        for seed in 0..20 {
            let s = UpdateScript::random(seed, 10, 300, 40, 16);
            assert!(s.lengths().unwrap().iter().all(|&l| l <= 40));
            assert_eq!(s, UpdateScript::random(seed, 10, 300, 40, 16));
            let d = UpdateScript::random_deletions(seed, 30, 3);
            assert!(!d.has_inserts());
            d.lengths().unwrap();
        }
    }
}
