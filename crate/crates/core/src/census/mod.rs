//! Exhaustive enumeration of partial functions and theorem verification.
//!
//! The census walks every trit table in lexicographic order (`0 < 1 < *`,
//! last entry least significant), split into contiguous index ranges that
//! are processed in parallel. For each non-constant function it evaluates
//! the rank filter, the exact decision and the dependence `k`, and tallies
//! `N₁(n, k)`.
//!
//! In memoized mode the decision and `k` are cached per difference set (both
//! are functions of `Δ` alone) and the ranks per class mask; the direct mode
//! calls [`decide_q1`] and [`depends_on`] on every table.

mod checkpoint;
mod theorems;

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

pub use checkpoint::{Checkpoint, ShardState};
pub use theorems::{
    affine_span_count, count_depending, fact2_closure, lemma1_bound, lemma4_sweep, theorem2_catalogue,
    verify_theorem2, verify_theorem5, AffineSpanReport, DependingReport, Fact2Report, Lemma4Report, Lemma4Row,
    Theorem2Report, Theorem5Report,
};

use crate::decider::{decide_differences, decide_q1, rank_filter, verify_witness, RankReport};
use crate::linalg::FeasibilityResult;
use crate::pbf::{function_count, PartialBooleanFunction, Trit};
use crate::representation::{depends_on, polynomial_columns};
use crate::{Error, Result};

/// Largest `n` the census accepts; `n = 4` scans about 43 million tables.
pub const CENSUS_MAX_BITS: usize = 4;

pub const DEFAULT_CHECKPOINT_EVERY: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub shards: usize,
    pub checkpoint: Option<PathBuf>,
    /// Continue from `checkpoint` if it exists.
    pub resume: bool,
    pub checkpoint_every: u64,
    /// Stop each shard after this many tables in the current run.
    pub halt_after: Option<u64>,
    pub memoize: bool,
    /// Also decide filter-rejected functions to confirm the filter never
    /// rejects a feasible one.
    pub audit_filter: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            shards: rayon::current_num_threads(),
            checkpoint: None,
            resume: false,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            halt_after: None,
            memoize: true,
            audit_filter: true,
        }
    }
}

/// Per-shard partial counts; merging is addition plus list concatenation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub scanned: u64,
    /// Constant or empty-domain tables.
    pub trivial: u64,
    pub filter_rejected: u64,
    /// Rejected by the filter yet feasible; must stay zero.
    pub filter_unsound: u64,
    pub filter_passed_infeasible: u64,
    /// Feasible non-constant functions by `k`.
    pub feasible: Vec<u64>,
    /// Non-constant functions by `k`.
    pub depending: Vec<u64>,
    /// Enumeration indices of feasible functions with `k = n`.
    pub theorem2: Vec<u64>,
}

impl Tally {
    pub fn new(n: usize) -> Self {
        Self { feasible: vec![0; n + 1], depending: vec![0; n + 1], ..Self::default() }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.scanned += other.scanned;
        self.trivial += other.trivial;
        self.filter_rejected += other.filter_rejected;
        self.filter_unsound += other.filter_unsound;
        self.filter_passed_infeasible += other.filter_passed_infeasible;
        for (a, b) in self.feasible.iter_mut().zip(&other.feasible) {
            *a += b;
        }
        for (a, b) in self.depending.iter_mut().zip(&other.depending) {
            *a += b;
        }
        self.theorem2.extend_from_slice(&other.theorem2);
    }

    fn record(&mut self, n: usize, index: u64, report: &RankReport, feasible: bool) {
        let k = report.k;
        self.depending[k] += 1;
        if !report.passes {
            self.filter_rejected += 1;
            if feasible {
                self.filter_unsound += 1;
            }
        } else if !feasible {
            self.filter_passed_infeasible += 1;
        }
        if feasible {
            self.feasible[k] += 1;
            if k == n {
                self.theorem2.push(index);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRecord {
    pub n: usize,
    pub k: usize,
    /// `N₁(n, k)`.
    pub n1: u64,
    /// `E = 2^{n−1}(1 + 2^{2−k}) + 2n²`; the bound is `n² · 2^E`.
    pub bound_exponent: u64,
    pub bound_log2: f64,
    /// The bound is only claimed for `n ≥ 3`, `k ≥ 2`.
    pub bound_applies: bool,
    pub bound_holds: bool,
    pub scanned: u64,
    /// Feasible functions depending on all `n` bits (only filled for `k = n`).
    pub theorem2: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub total: u64,
    pub shards: usize,
    pub complete: bool,
    pub totals: Tally,
    pub records: Vec<CensusRecord>,
    pub theorem2: Vec<String>,
    pub elapsed_ms: u128,
}

/// `2^{n−1}(1 + 2^{2−k}) + 2n²`, an integer for `1 ≤ k ≤ n + 1`.
pub fn bound_exponent(n: usize, k: usize) -> u64 {
    assert!(n >= 1 && (1..=n + 1).contains(&k), "bound exponent needs 1 ≤ k ≤ n + 1");
    (1u64 << (n - 1)) + (1u64 << (n + 1 - k)) + 2 * (n * n) as u64
}

/// `n² · 2^E` as an exact integer.
pub fn theorem5_bound(n: usize, k: usize) -> BigUint {
    BigUint::from((n * n) as u64) << bound_exponent(n, k)
}

pub fn bound_log2(n: usize, k: usize) -> f64 {
    bound_exponent(n, k) as f64 + 2.0 * (n as f64).log2()
}

fn table_string(n: usize, index: u64) -> String {
    PartialBooleanFunction::from_enumeration_index(n, index)
        .map(|f| f.to_string())
        .unwrap_or_default()
}

fn check_size(n: usize) -> Result<u64> {
    if !(1..=CENSUS_MAX_BITS).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 1, max: CENSUS_MAX_BITS });
    }
    function_count(n).ok_or(Error::UnsupportedSize { n, min: 1, max: CENSUS_MAX_BITS })
}

/// Contiguous index ranges `[start, end)` covering `0..total`.
pub fn shard_ranges(total: u64, shards: usize) -> Vec<(u64, u64)> {
    let s = (shards.max(1) as u64).min(total.max(1));
    (0..s).map(|i| (total * i / s, total * (i + 1) / s)).collect()
}

/// Swaps mask positions `p ↔ p ⊕ x` for a mask over `2ⁿ` positions.
fn xor_permute(mut mask: u32, x: usize, n: usize) -> u32 {
    const LOW: [u32; 5] = [0x5555_5555, 0x3333_3333, 0x0F0F_0F0F, 0x00FF_00FF, 0x0000_FFFF];
    for (b, low) in LOW.iter().enumerate().take(n) {
        if x >> b & 1 == 1 {
            let w = 1u32 << b;
            mask = ((mask & low) << w) | ((mask >> w) & low);
        }
    }
    mask
}

/// Bit `z` set for every `z = x ⊕ y` with `x ∈ zeros`, `y ∈ ones`.
fn difference_mask(zeros: u32, ones: u32, n: usize) -> u32 {
    let mut delta = 0;
    let mut z = zeros;
    while z != 0 {
        let x = z.trailing_zeros() as usize;
        delta |= xor_permute(ones, x, n);
        z &= z - 1;
    }
    delta
}

const UNKNOWN: u8 = u8::MAX;

/// Per-shard caches keyed by class masks and difference masks.
struct Caches {
    rank: Vec<u8>,
    k: Vec<u8>,
    feasible: Vec<u8>,
}

impl Caches {
    fn new(n: usize) -> Self {
        let size = 1usize << (1usize << n);
        Self { rank: vec![UNKNOWN; size], k: vec![UNKNOWN; size], feasible: vec![UNKNOWN; size] }
    }

    fn rank(&mut self, n: usize, class: u32) -> Result<usize> {
        let slot = &mut self.rank[class as usize];
        if *slot == UNKNOWN {
            let points: Vec<usize> = (0..1usize << n).filter(|x| class >> x & 1 == 1).collect();
            *slot = polynomial_columns(n, &points, 1)?.rank() as u8;
        }
        Ok(*slot as usize)
    }

    fn k(&mut self, delta: u32, n: usize, digits: &[u8]) -> Result<usize> {
        let slot = &mut self.k[delta as usize];
        if *slot == UNKNOWN {
            *slot = depends_on(&digits_to_function(n, digits)?)?.k as u8;
        }
        Ok(*slot as usize)
    }

    fn feasible(&mut self, delta: u32, n: usize, digits: &[u8]) -> Result<bool> {
        let slot = &mut self.feasible[delta as usize];
        if *slot == UNKNOWN {
            let f = &digits_to_function(n, digits)?;
            let feasible = match decide_differences(&f.difference_set()?)? {
                FeasibilityResult::Feasible(beta) => {
                    if !verify_witness(f, &beta)? {
                        return Err(Error::Internal(format!("witness for {f} does not verify")));
                    }
                    true
                }
                FeasibilityResult::Infeasible(_) => false,
            };
            *slot = feasible as u8;
        }
        Ok(*slot == 1)
    }
}

fn digits_to_function(n: usize, digits: &[u8]) -> Result<PartialBooleanFunction> {
    let table = digits
        .iter()
        .map(|d| match d {
            0 => Trit::Zero,
            1 => Trit::One,
            _ => Trit::Undef,
        })
        .collect();
    PartialBooleanFunction::new(n, table)
}

fn seed_digits(n: usize, mut index: u64) -> Vec<u8> {
    let mut digits = vec![0u8; 1 << n];
    for d in digits.iter_mut().rev() {
        *d = (index % 3) as u8;
        index /= 3;
    }
    digits
}

fn increment(digits: &mut [u8]) {
    for d in digits.iter_mut().rev() {
        if *d < 2 {
            *d += 1;
            return;
        }
        *d = 0;
    }
}

struct Scanner<'a> {
    n: usize,
    opts: &'a CensusOptions,
    caches: Option<Caches>,
}

impl Scanner<'_> {
    fn visit(&mut self, index: u64, digits: &[u8], tally: &mut Tally) -> Result<()> {
        tally.scanned += 1;
        let n = self.n;
        let (mut zeros, mut ones) = (0u32, 0u32);
        for (x, d) in digits.iter().enumerate() {
            match d {
                0 => zeros |= 1 << x,
                1 => ones |= 1 << x,
                _ => {}
            }
        }
        if zeros == 0 || ones == 0 {
            tally.trivial += 1;
            return Ok(());
        }
        let audit = self.opts.audit_filter;
        let (report, feasible) = match self.caches.as_mut() {
            Some(c) => {
                let delta = difference_mask(zeros, ones, n);
                let k = c.k(delta, n, digits)?;
                let report = RankReport::from_parts(n, c.rank(n, zeros)?, c.rank(n, ones)?, k);
                let feasible = if report.passes || audit { c.feasible(delta, n, digits)? } else { false };
                (report, feasible)
            }
            None => {
                let f = digits_to_function(n, digits)?;
                let report = rank_filter(&f)?;
                let feasible = if report.passes || audit {
                    let decision = decide_q1(&f, false)?;
                    if let Some(beta) = &decision.witness {
                        if !verify_witness(&f, beta)? {
                            return Err(Error::Internal(format!("witness for {f} does not verify")));
                        }
                    }
                    decision.is_feasible()
                } else {
                    false
                };
                (report, feasible)
            }
        };
        tally.record(n, index, &report, feasible);
        Ok(())
    }
}

struct Progress<'a> {
    path: &'a Path,
    state: Mutex<Checkpoint>,
}

impl Progress<'_> {
    fn update(&self, shard: &ShardState) -> Result<()> {
        let mut guard = self.state.lock().map_err(|_| Error::Internal("checkpoint lock poisoned".into()))?;
        guard.shards[shard.id] = shard.clone();
        guard.save(self.path)
    }
}

fn run_shard(n: usize, mut shard: ShardState, opts: &CensusOptions, progress: Option<&Progress>) -> Result<ShardState> {
    let mut scanner = Scanner { n, opts, caches: opts.memoize.then(|| Caches::new(n)) };
    let stop = match opts.halt_after {
        Some(limit) => shard.end.min(shard.next.saturating_add(limit)),
        None => shard.end,
    };
    let every = opts.checkpoint_every.max(1);
    let mut digits = seed_digits(n, shard.next);
    let mut since_save = 0u64;
    while shard.next < stop {
        scanner.visit(shard.next, &digits, &mut shard.tally)?;
        shard.next += 1;
        increment(&mut digits);
        since_save += 1;
        if since_save == every {
            since_save = 0;
            if let Some(p) = progress {
                p.update(&shard)?;
            }
        }
    }
    if let Some(p) = progress {
        p.update(&shard)?;
    }
    Ok(shard)
}

fn initial_state(n: usize, total: u64, opts: &CensusOptions) -> Result<Checkpoint> {
    let ranges = shard_ranges(total, opts.shards);
    let fresh = Checkpoint {
        n,
        total,
        shards: ranges.iter().enumerate().map(|(i, &(s, e))| ShardState::fresh(i, s, e, n)).collect(),
    };
    let Some(path) = opts.checkpoint.as_ref().filter(|p| opts.resume && p.exists()) else {
        return Ok(fresh);
    };
    let saved = Checkpoint::load(path)?;
    let mismatch = |reason: &str| Error::Checkpoint { path: path.clone(), reason: reason.into() };
    if saved.n != n || saved.total != total {
        return Err(mismatch("checkpoint was written for a different n"));
    }
    let same_layout = saved.shards.len() == fresh.shards.len()
        && saved
            .shards
            .iter()
            .zip(&fresh.shards)
            .all(|(a, b)| a.id == b.id && a.start == b.start && a.end == b.end && (a.start..=a.end).contains(&a.next));
    if !same_layout {
        return Err(mismatch("checkpoint shard layout differs; resume with the same --shards"));
    }
    Ok(saved)
}

/// Runs (or resumes) the census for `n`.
///
/// The report is `complete` when every shard reached the end of its range;
/// only then are the per-`k` records final.
pub fn census_q1(n: usize, opts: &CensusOptions) -> Result<CensusReport> {
    let total = check_size(n)?;
    let started = Instant::now();
    let state = initial_state(n, total, opts)?;
    let progress = opts.checkpoint.as_deref().map(|path| Progress { path, state: Mutex::new(state.clone()) });
    let shards: Vec<ShardState> = state
        .shards
        .into_par_iter()
        .map(|s| if s.is_done() { Ok(s) } else { run_shard(n, s, opts, progress.as_ref()) })
        .collect::<Result<_>>()?;

    let complete = shards.iter().all(ShardState::is_done);
    let mut totals = Tally::new(n);
    for s in &shards {
        totals.merge(&s.tally);
    }
    totals.theorem2.sort_unstable();
    let theorem2: Vec<String> = totals.theorem2.iter().map(|&i| table_string(n, i)).collect();
    let records = (1..=n)
        .map(|k| {
            let n1 = totals.feasible[k];
            CensusRecord {
                n,
                k,
                n1,
                bound_exponent: bound_exponent(n, k),
                bound_log2: bound_log2(n, k),
                bound_applies: n >= 3 && k >= 2,
                bound_holds: BigUint::from(n1) <= theorem5_bound(n, k),
                scanned: totals.scanned,
                theorem2: if k == n { theorem2.clone() } else { Vec::new() },
            }
        })
        .collect();
    Ok(CensusReport {
        n,
        total,
        shards: shards.len(),
        complete,
        totals,
        records,
        theorem2,
        elapsed_ms: started.elapsed().as_millis(),
    })
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    k: usize,
    #[serde(rename = "N1")]
    n1: u64,
    bound_log2: String,
    scanned: u64,
    elapsed_ms: u128,
}

impl CensusReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(CsvRow {
                n: r.n,
                k: r.k,
                n1: r.n1,
                bound_log2: format!("{:.6}", r.bound_log2),
                scanned: r.scanned,
                elapsed_ms: self.elapsed_ms,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: std::io::Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// Writes `census_n{n}.csv` and `census_n{n}.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("census_n{}.csv", self.n));
        let json_path = dir.join(format!("census_n{}.json", self.n));
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        self.write_json(std::fs::File::create(&json_path)?)?;
        Ok((csv_path, json_path))
    }

    pub fn n1(&self, k: usize) -> Option<u64> {
        self.records.iter().find(|r| r.k == k).map(|r| r.n1)
    }
}
