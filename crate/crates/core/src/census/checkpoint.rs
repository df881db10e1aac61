//! Plain-text census checkpoints.
//!
//! ```text
//! q1-census-checkpoint v1
//! n 3 total 6561 shards 2
//! shard <id> <start> <end> <next> <scanned> <trivial> <rejected> <unsound> <pass_infeasible> <feasible> <depending> <theorem2>
//! ```
//!
//! `feasible` and `depending` are comma-separated counts indexed by `k`;
//! `theorem2` is a comma-separated list of enumeration indices or `-`.

use std::fs;
use std::path::{Path, PathBuf};

use super::Tally;
use crate::{Error, Result};

const HEADER: &str = "q1-census-checkpoint v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardState {
    pub id: usize,
    pub start: u64,
    pub end: u64,
    /// First index not yet processed.
    pub next: u64,
    pub tally: Tally,
}

impl ShardState {
    pub fn fresh(id: usize, start: u64, end: u64, n: usize) -> Self {
        Self { id, start, end, next: start, tally: Tally::new(n) }
    }

    pub fn is_done(&self) -> bool {
        self.next >= self.end
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: usize,
    pub total: u64,
    pub shards: Vec<ShardState>,
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let mut out = format!("{HEADER}\nn {} total {} shards {}\n", self.n, self.total, self.shards.len());
        for s in &self.shards {
            let t = &s.tally;
            let theorem2 = if t.theorem2.is_empty() { "-".to_owned() } else { join(&t.theorem2) };
            out.push_str(&format!(
                "shard {} {} {} {} {} {} {} {} {} {} {} {}\n",
                s.id,
                s.start,
                s.end,
                s.next,
                t.scanned,
                t.trivial,
                t.filter_rejected,
                t.filter_unsound,
                t.filter_passed_infeasible,
                join(&t.feasible),
                join(&t.depending),
                theorem2
            ));
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Checkpoint { path: path.to_path_buf(), reason };
        let mut lines = text.lines();
        if lines.next() != Some(HEADER) {
            return Err(bad("missing or unsupported header".into()));
        }
        let meta: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
        let (n, total, count) = match meta.as_slice() {
            ["n", n, "total", total, "shards", count] => (
                n.parse::<usize>().map_err(|e| bad(e.to_string()))?,
                total.parse::<u64>().map_err(|e| bad(e.to_string()))?,
                count.parse::<usize>().map_err(|e| bad(e.to_string()))?,
            ),
            _ => return Err(bad("malformed parameter line".into())),
        };
        let num = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let list = |s: &str| -> Result<Vec<u64>> {
            if s == "-" {
                Ok(Vec::new())
            } else {
                s.split(',').map(num).collect()
            }
        };
        let mut shards = Vec::with_capacity(count);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 13 || f[0] != "shard" {
                return Err(bad(format!("malformed shard line {line:?}")));
            }
            let tally = Tally {
                scanned: num(f[5])?,
                trivial: num(f[6])?,
                filter_rejected: num(f[7])?,
                filter_unsound: num(f[8])?,
                filter_passed_infeasible: num(f[9])?,
                feasible: list(f[10])?,
                depending: list(f[11])?,
                theorem2: list(f[12])?,
            };
            if tally.feasible.len() != n + 1 || tally.depending.len() != n + 1 {
                return Err(bad(format!("per-k counts in {line:?} do not match n = {n}")));
            }
            shards.push(ShardState {
                id: num(f[1])? as usize,
                start: num(f[2])?,
                end: num(f[3])?,
                next: num(f[4])?,
                tally,
            });
        }
        if shards.len() != count {
            return Err(bad(format!("expected {count} shard lines, found {}", shards.len())));
        }
        Ok(Self { n, total, shards })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, path)
    }

    /// Writes via a temporary sibling file and a rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp: PathBuf = path.to_path_buf();
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        tmp.set_file_name(format!(".{name}.tmp"));
        fs::write(&tmp, self.render())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let mut a = ShardState::fresh(0, 0, 40, 2);
        a.next = 17;
        a.tally.scanned = 17;
        a.tally.trivial = 5;
        a.tally.feasible = vec![0, 9, 2];
        a.tally.depending = vec![0, 9, 3];
        a.tally.theorem2 = vec![3, 11];
        let b = ShardState::fresh(1, 40, 81, 2);
        Checkpoint { n: 2, total: 81, shards: vec![a, b] }
    }

    #[test]
    fn render_parse_round_trip() {
        let c = sample();
        let text = c.render();
        assert!(text.starts_with("q1-census-checkpoint v1\nn 2 total 81 shards 2\nshard 0 0 40 17 17 5 "));
        assert_eq!(Checkpoint::parse(&text, Path::new("x")).unwrap(), c);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ckpt");
        sample().save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), sample());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn rejects_corruption() {
        let text = sample().render();
        let p = Path::new("x");
        assert!(Checkpoint::parse(&text.replace("v1", "v9"), p).is_err());
        assert!(Checkpoint::parse(&text.replace("shards 2", "shards 3"), p).is_err());
        assert!(Checkpoint::parse(&text.replace("0,9,2", "0,9"), p).is_err());
        assert!(Checkpoint::parse(&text.replace(" 17 17 ", " x 17 "), p).is_err());
    }
}
