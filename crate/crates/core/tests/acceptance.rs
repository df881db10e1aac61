//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test -p q1-core --release --test acceptance` runs criteria 1 to 10
//! plus an n = 3 rehearsal of criterion 11. Pass `-- --include-ignored` (or
//! set `Q1_ACCEPTANCE_LONG=1`) for the full n = 4 census of criterion 11.
//!
//! Expected values are computed here by independent means (hitting sets,
//! direct overlap sums, vertex enumeration, grids) or frozen from an external
//! brute-force enumeration.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use q1_core::algorithm::{build_algorithm, max_simulation_error, sos_matrix, TOLERANCE};
use q1_core::census::{
    affine_span_count, census_q1, count_depending, lemma4_sweep, verify_theorem2, CensusOptions,
};
use q1_core::decider::{decide_q1, rank_filter, verify_certificate, Outcome};
use q1_core::linalg::rational;
use q1_core::pbf::{enumerate_functions, parse_input};
use q1_core::{PartialBooleanFunction, Rational};

struct Suite {
    failures: Vec<String>,
}

impl Suite {
    fn run<F>(&mut self, id: &str, limit: Option<Duration>, body: F)
    where
        F: FnOnce() -> Result<String, String>,
    {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:.0?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS  {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                println!("criterion {id}: FAIL  {detail} [{elapsed:.2?}]");
                self.failures.push(id.to_owned());
            }
        }
    }
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pbf(s: &str) -> PartialBooleanFunction {
    s.parse().unwrap()
}

fn q(p: i64, d: i64) -> Rational {
    rational(p, d)
}

/// `xᵢ` with `x₁` the most significant of `n` bits.
fn x_bit(x: usize, i: usize, n: usize) -> usize {
    (x >> (n - i)) & 1
}

/// `Σᵢ βᵢ ⟨i|O_x†O_y|i⟩`, summed directly from the oracle phases.
fn overlap(beta: &[Rational], x: usize, y: usize, n: usize) -> Rational {
    let mut s = beta[0].clone();
    for i in 1..=n {
        if x_bit(x, i, n) == x_bit(y, i, n) {
            s += &beta[i];
        } else {
            s -= &beta[i];
        }
    }
    s
}

fn cross_pairs(f: &PartialBooleanFunction) -> Vec<(usize, usize)> {
    let ones = f.ones();
    f.zeros().into_iter().flat_map(|x| ones.iter().map(move |&y| (x, y))).collect()
}

/// Smallest variable set meeting every cross pair's disagreement set.
fn hitting_set_k(f: &PartialBooleanFunction) -> usize {
    let n = f.n();
    let diffs: Vec<usize> = cross_pairs(f).iter().map(|(x, y)| x ^ y).collect();
    (0u32..1 << n)
        .filter(|s| diffs.iter().all(|z| (1..=n).any(|i| s >> (i - 1) & 1 == 1 && x_bit(*z, i, n) == 1)))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

fn witness_ok(f: &PartialBooleanFunction, beta: &[Rational]) -> bool {
    beta.iter().all(|b| !b.is_negative())
        && beta.iter().sum::<Rational>() == Rational::one()
        && cross_pairs(f).iter().all(|&(x, y)| overlap(beta, x, y, f.n()).is_zero())
}

/// Checks `yᵀA ≥ 0`, `yᵀb < 0` on the raw system, rebuilt here: row 0 is
/// `Σβ = 1`, then one row per distinct difference in ascending order.
fn certificate_ok(f: &PartialBooleanFunction, y: &[Rational]) -> bool {
    let n = f.n();
    let diffs: BTreeSet<usize> = cross_pairs(f).iter().map(|(a, b)| a ^ b).collect();
    if y.len() != diffs.len() + 1 {
        return false;
    }
    let columns_ok = (0..=n).all(|j| {
        let mut s = y[0].clone();
        for (r, z) in diffs.iter().enumerate() {
            let coeff = if j == 0 || x_bit(*z, j, n) == 0 { 1 } else { -1 };
            s += &y[r + 1] * Rational::from_integer(coeff.into());
        }
        !s.is_negative()
    });
    columns_ok && y[0].is_negative()
}

fn criterion_1() -> Result<String, String> {
    let d = decide_q1(&pbf("1001"), true).map_err(|e| e.to_string())?;
    check(d.outcome == Outcome::Feasible, "1001 not feasible")?;
    check(d.witness == Some(vec![q(0, 1), q(1, 2), q(1, 2)]), format!("1001 witness {:?}", d.witness))?;
    let d = decide_q1(&pbf("01"), true).map_err(|e| e.to_string())?;
    check(d.witness == Some(vec![q(1, 2), q(1, 2)]), format!("01 witness {:?}", d.witness))?;
    Ok("1001 -> (0, 1/2, 1/2), 01 -> (1/2, 1/2), exact".into())
}

fn remark2(f: &PartialBooleanFunction) -> Result<String, String> {
    let r = rank_filter(f).map_err(|e| e.to_string())?;
    check((r.r0, r.r1, r.passes) == (1, 3, true), format!("{f}: rank report {r:?}"))?;
    let d = decide_q1(f, true).map_err(|e| e.to_string())?;
    check(d.outcome == Outcome::Infeasible, format!("{f}: {:?}", d.outcome))?;
    let y = d.certificate.ok_or("no certificate")?;
    check(certificate_ok(f, &y), "certificate fails the independent check")?;
    check(matches!(verify_certificate(f, &y), Ok(true)), "certificate fails the library check")?;
    Ok(format!("{f}: r0=1 r1=3 k={} F={} filter passes, Infeasible, certificate verified exactly", r.k, r.f_value))
}

fn criterion_2() -> Result<String, String> {
    let f = PartialBooleanFunction::from_sets(3, &[0b000], &[0b001, 0b010, 0b100]).map_err(|e| e.to_string())?;
    check(f.to_string() == "011*1***", "weight promise table")?;
    remark2(&f)
}

fn criterion_2_literal() -> Result<String, String> {
    remark2(&pbf("0111****"))
}

fn catalogue(n: usize) -> Vec<&'static str> {
    match n {
        1 => vec!["01", "10"],
        2 => vec!["0110", "011*", "01*0", "0*10", "1001", "100*", "10*1", "1*01", "*001", "*110"],
        _ => vec![],
    }
}

fn criterion_3() -> Result<String, String> {
    let direct = CensusOptions { memoize: false, ..CensusOptions::default() };
    let mut sizes = Vec::new();
    for n in 1..=3 {
        let report = verify_theorem2(n, &direct).map_err(|e| e.to_string())?;
        let found: BTreeSet<&str> = report.found.iter().map(String::as_str).collect();
        let expected: BTreeSet<&str> = catalogue(n).into_iter().collect();
        check(found == expected, format!("n={n}: found {found:?}"))?;
        let scanned = census_q1(n, &CensusOptions::default()).map_err(|e| e.to_string())?.totals.scanned;
        check(scanned == [9, 81, 6561][n - 1], format!("n={n}: scanned {scanned}"))?;
        sizes.push(found.len());
    }
    Ok(format!("|{{k = n and Feasible}}| = {sizes:?} over 9/81/6561 tables, sets match"))
}

fn criteria_4_and_5() -> (Result<String, String>, Result<String, String>) {
    let mut functions = 0;
    let mut worst_sim = 0.0f64;
    let mut worst_gram = 0.0f64;
    let mut worst_diag = 0.0f64;
    let mut lemma3_margin = usize::MAX;
    let mut c4 = Ok(());
    let mut c5 = Ok(());
    for n in 1..=3 {
        for f in enumerate_functions(n).unwrap().filter(|f| f.is_non_constant()) {
            let d = decide_q1(&f, true).unwrap();
            let Some(beta) = d.witness else { continue };
            functions += 1;
            if !cross_pairs(&f).iter().all(|&(x, y)| overlap(&beta, x, y, n).is_zero()) {
                c4 = Err(format!("{f}: nonzero exact cross-class overlap"));
            }
            let alg = build_algorithm(&f, &beta).unwrap();
            let sos = sos_matrix(&alg, &f).unwrap();
            worst_sim = worst_sim.max(max_simulation_error(&alg, &f));
            worst_gram = worst_gram.max(sos.gram_off_diagonal_max());
            worst_diag = worst_diag.max(sos.diagonal_deviation(&beta));
            let k = hitting_set_k(&f);
            let nonzero = sos.nonzero_query_columns().len();
            if nonzero < k {
                c5 = Err(format!("{f}: {nonzero} nonzero columns, k = {k}"));
            }
            lemma3_margin = lemma3_margin.min(nonzero - k.min(nonzero));
        }
    }
    let c4 = c4.and_then(|_| {
        check(worst_sim <= TOLERANCE, format!("simulation error {worst_sim:e}"))?;
        check(worst_gram <= TOLERANCE, format!("Gram off-diagonal {worst_gram:e}"))?;
        check(worst_diag <= TOLERANCE, format!("|u - beta| {worst_diag:e}"))?;
        Ok(format!(
            "{functions} feasible functions (n <= 3): max |P - f| = {worst_sim:.1e}, max off-diag = {worst_gram:.1e}, \
             max |u - beta| = {worst_diag:.1e}, exact overlaps all 0"
        ))
    });
    let c5 = c5.map(|_| format!("{functions} feasible functions: nonzero query columns >= k (min slack {lemma3_margin})"));
    (c4, c5)
}

fn criterion_6() -> Result<String, String> {
    let direct = CensusOptions { memoize: false, ..CensusOptions::default() };
    let counts: Vec<u64> = (1..=3)
        .map(|n| count_depending(n, &direct).map(|r| r.count))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    // independent recount through the hitting-set characterisation
    let recount: Vec<u64> = (1..=3)
        .map(|n| {
            enumerate_functions(n).unwrap().filter(|f| f.is_non_constant() && hitting_set_k(f) == n).count() as u64
        })
        .collect();
    check(counts == recount, format!("library {counts:?} vs recount {recount:?}"))?;
    check(counts == [2, 18, 2290], format!("counts {counts:?}"))?;
    check(counts[0] == 2 && counts[1] >= 6 && counts[2] >= 162, "bounds")?;
    Ok(format!("N(1) = {} = 2, N(2) = {} >= 6, N(3) = {} >= 162", counts[0], counts[1], counts[2]))
}

fn criterion_7() -> Result<String, String> {
    let report = lemma4_sweep(3, 1..=4).map_err(|e| e.to_string())?;
    check(report.holds, "bound violated")?;
    for row in &report.rows {
        check(row.max_t as i64 <= (1 << (row.j - 1)) - row.j as i64, format!("j={}", row.j))?;
    }
    let t3 = &report.rows[2];
    check(t3.max_t == 1, format!("max T_3 = {}", t3.max_t))?;
    let eq = affine_span_count(3, &[0b000, 0b100, 0b010]).map_err(|e| e.to_string())?;
    check(eq.t == 1 && eq.members == ["110"], "equality witness")?;
    let maxima: Vec<usize> = report.rows.iter().map(|r| r.max_t).collect();
    Ok(format!("T_j <= 2^(j-1) - j for every independent set, j = 1..4 (max T = {maxima:?}); T_3 = 1 at {{000, 100, 010}} -> 110"))
}

fn criterion_7_stated_witness() -> Result<String, String> {
    let pts: Vec<usize> = ["000", "011", "101"].iter().map(|s| parse_input(s).unwrap()).collect();
    let r = affine_span_count(3, &pts).map_err(|e| e.to_string())?;
    // 011 + 101 - 000 = (1, 1, 2): the relation to 110 only holds mod 2
    check(r.t == 1, format!("T_3 = {} for {{000, 011, 101}} over the reals (expected 1 as stated)", r.t))?;
    Ok("T_3 = 1".into())
}

fn criterion_8() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_fac7);
    let mut parents = 0;
    let mut restrictions = 0;
    while parents < 1000 {
        let n = rng.random_range(1..=3usize);
        let table: String = (0..1 << n).map(|_| ['0', '1', '*'][rng.random_range(0..3)]).collect();
        let f = pbf(&table);
        if !f.is_non_constant() {
            continue;
        }
        let Some(beta) = decide_q1(&f, true).unwrap().witness else { continue };
        parents += 1;
        let domain: Vec<usize> = f.domain().collect();
        let mut done = 0;
        while done < 10 {
            let keep: Vec<usize> = domain.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
            let g = f.restrict(&keep).unwrap();
            if !g.is_non_constant() {
                continue;
            }
            done += 1;
            restrictions += 1;
            check(g.is_subfunction_of(&f), format!("{g} not a subfunction of {f}"))?;
            check(decide_q1(&g, true).unwrap().is_feasible(), format!("{f} -> {g} infeasible"))?;
            check(witness_ok(&g, &beta), format!("parent witness of {f} fails on {g}"))?;
        }
    }
    Ok(format!("{parents} feasible parents, {restrictions} restrictions: all feasible, parent witness verifies"))
}

fn criterion_9() -> Result<String, String> {
    let report = census_q1(3, &CensusOptions::default()).map_err(|e| e.to_string())?;
    let n1: Vec<u64> = report.records.iter().map(|r| r.n1).collect();
    check(n1 == [1250, 1030, 0], format!("N1(3, k) = {n1:?}"))?;
    let mut parts = Vec::new();
    for (k, &count) in (1..=3).zip(&n1) {
        // 2^{n-1} (1 + 2^{2-k}) + 2n² at n = 3
        let exponent_int = 4 + (1u64 << (4 - k)) + 18;
        let log_ok = (count as f64).log2() <= 9f64.log2() + exponent_int as f64;
        let exact_ok = BigUint::from(count) <= BigUint::from(9u32) << exponent_int;
        check(log_ok && exact_ok, format!("k={k}: {count} exceeds 9*2^{exponent_int}"))?;
        parts.push(format!("N1(3,{k}) = {count} <= 9*2^{exponent_int}"));
    }
    Ok(parts.join(", "))
}

/// Exact vertex enumeration of `{β ≥ 0, Σβ = 1, overlaps = 0}` for `n = 2`.
fn vertex_oracle(f: &PartialBooleanFunction) -> bool {
    let n = f.n();
    let diffs: BTreeSet<usize> = cross_pairs(f).iter().map(|(a, b)| a ^ b).collect();
    let mut rows: Vec<(Vec<Rational>, Rational)> = vec![(vec![Rational::one(); n + 1], Rational::one())];
    for z in &diffs {
        let row = (0..=n).map(|j| if j > 0 && x_bit(*z, j, n) == 1 { -Rational::one() } else { Rational::one() });
        rows.push((row.collect(), Rational::zero()));
    }
    for i in 0..=n {
        rows.push(((0..=n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect(), Rational::zero()));
    }
    let eq = diffs.len() + 1;
    let feasible = |b: &[Rational]| {
        b.iter().all(|v| !v.is_negative())
            && rows[..eq].iter().all(|(r, rhs)| r.iter().zip(b).map(|(a, v)| a * v).sum::<Rational>() == *rhs)
    };
    // a nonempty polytope in the simplex has a vertex cut out by 3 of the rows
    let idx: Vec<usize> = (0..rows.len()).collect();
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            for c in b + 1..idx.len() {
                let m: Vec<&(Vec<Rational>, Rational)> = vec![&rows[a], &rows[b], &rows[c]];
                if let Some(sol) = solve3(&m) {
                    if feasible(&sol) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn det3(m: [[Rational; 3]; 3]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Cramer's rule on a 3×3 system.
fn solve3(rows: &[&(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let a = |i: usize, j: usize| rows[i].0[j].clone();
    let base = [[a(0, 0), a(0, 1), a(0, 2)], [a(1, 0), a(1, 1), a(1, 2)], [a(2, 0), a(2, 1), a(2, 2)]];
    let d = det3(base.clone());
    if d.is_zero() {
        return None;
    }
    Some(
        (0..3)
            .map(|c| {
                let mut m = base.clone();
                for (r, row) in m.iter_mut().enumerate() {
                    row[c] = rows[r].1.clone();
                }
                det3(m) / &d
            })
            .collect(),
    )
}

/// Every `β` on the simplex grid with denominator 24.
fn grid_oracle(f: &PartialBooleanFunction) -> bool {
    const D: i64 = 24;
    (0..=D).any(|a| {
        (0..=D - a).any(|b| {
            let beta = [q(a, D), q(b, D), q(D - a - b, D)];
            cross_pairs(f).iter().all(|&(x, y)| overlap(&beta, x, y, 2).is_zero())
        })
    })
}

fn criterion_10() -> Result<String, String> {
    let mut feasible = 0;
    let mut checked = 0;
    for f in enumerate_functions(2).unwrap() {
        checked += 1;
        if f.is_empty_domain() {
            check(decide_q1(&f, true).is_err(), "empty domain accepted")?;
            continue;
        }
        let vertex = vertex_oracle(&f);
        let grid = grid_oracle(&f);
        check(vertex == grid, format!("{f}: oracles disagree"))?;
        let d = decide_q1(&f, true).map_err(|e| e.to_string())?;
        if f.is_constant() {
            check(d.outcome == Outcome::ZeroQuery && vertex, format!("{f}: constant"))?;
            continue;
        }
        check(d.is_feasible() == vertex, format!("{f}: decide {:?}, oracle {vertex}", d.outcome))?;
        feasible += vertex as usize;
    }
    Ok(format!("{checked} tables: decide_q1 matches vertex enumeration and the 1/24 grid ({feasible} feasible non-constant)"))
}

fn criterion_11_rehearsal() -> Result<String, String> {
    resume_and_shards(3, &[1250, 1030, 0], 2290, 500)
}

fn criterion_11() -> Result<String, String> {
    resume_and_shards(4, &[515_072, 755_784, 464, 0], 27_037_546, 3_000_000)
}

fn resume_and_shards(n: usize, n1: &[u64], depending: u64, halt: u64) -> Result<String, String> {
    let err = |e: q1_core::Error| e.to_string();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("census.ckpt");
    let base = census_q1(n, &CensusOptions { shards: 1, ..CensusOptions::default() }).map_err(err)?;
    let got: Vec<u64> = base.records.iter().map(|r| r.n1).collect();
    check(got == n1, format!("N1({n}, k) = {got:?}"))?;
    check(base.totals.depending[n] == depending, format!("N({n}) = {}", base.totals.depending[n]))?;
    check(base.totals.filter_unsound == 0, "filter rejected a feasible function")?;
    for shards in [2, 8] {
        let other = census_q1(n, &CensusOptions { shards, ..CensusOptions::default() }).map_err(err)?;
        check(other.totals == base.totals, format!("{shards} shards changed the totals"))?;
    }
    let opts = CensusOptions {
        shards: 8,
        checkpoint: Some(path.clone()),
        resume: true,
        checkpoint_every: (halt / 4).max(1),
        halt_after: Some(halt),
        ..CensusOptions::default()
    };
    let partial = census_q1(n, &opts).map_err(err)?;
    check(!partial.complete, "interrupted run completed")?;
    let resumed = census_q1(n, &CensusOptions { halt_after: None, ..opts }).map_err(err)?;
    check(resumed.complete && resumed.totals == base.totals, "resumed totals differ")?;
    Ok(format!(
        "n={n}: N1 = {got:?}, N({n}) = {depending}; 1/2/8 shards identical; interrupted after {} tables and resumed to identical totals",
        partial.totals.scanned
    ))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // the libtest protocol probes with --list; there is nothing to list
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let long = args.iter().any(|a| a == "--ignored" || a == "--include-ignored")
        || std::env::var("Q1_ACCEPTANCE_LONG").is_ok_and(|v| v == "1");
    let secs = Duration::from_secs;
    let mut suite = Suite { failures: Vec::new() };

    suite.run("1", Some(secs(1)), criterion_1);
    suite.run("2", Some(secs(1)), criterion_2);
    suite.run("2 (literal table 0111****)", Some(secs(1)), criterion_2_literal);
    suite.run("3", Some(secs(30)), criterion_3);
    let mut c5 = Err("not run".to_owned());
    suite.run("4", Some(secs(120)), || {
        let (c4, lemma3) = criteria_4_and_5();
        c5 = lemma3;
        c4
    });
    suite.run("5", None, || c5);
    suite.run("6", Some(secs(30)), criterion_6);
    suite.run("7", Some(secs(60)), criterion_7);
    suite.run("8", Some(secs(60)), criterion_8);
    suite.run("9", None, criterion_9);
    suite.run("10", Some(secs(60)), criterion_10);
    suite.run("11 (n=3 rehearsal)", None, criterion_11_rehearsal);
    if long {
        suite.run("11", None, criterion_11);
    } else {
        println!("criterion 11: SKIPPED  n=4 census is long; rerun with -- --include-ignored");
    }

    // the stated equality example for criterion 7 is false over the reals; reported, not counted
    let mut known = Suite { failures: Vec::new() };
    known.run("7 (stated witness {000,011,101})", None, criterion_7_stated_witness);
    if !known.failures.is_empty() {
        println!("  note: 011 + 101 - 000 = (1,1,2); equality at j=3 is witnessed by {{000,100,010}} instead");
    }

    if suite.failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {:?}", suite.failures.len(), suite.failures);
        std::process::exit(1);
    }
}
