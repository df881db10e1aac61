//! Exhaustive checks of the classification, counting and span statements.

use std::ops::RangeInclusive;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::{census_q1, CensusOptions, CensusRecord, CensusReport};
use crate::decider::{decide_q1, verify_witness};
use crate::linalg::{format_rationals, Consistency, Rational};
use crate::pbf::{enumerate_functions_with_limit, format_input, PartialBooleanFunction};
use crate::representation::polynomial_columns;
use crate::{Error, Result};

fn complete_census(n: usize, opts: &CensusOptions) -> Result<CensusReport> {
    let opts = CensusOptions { checkpoint: None, resume: false, halt_after: None, ..opts.clone() };
    let report = census_q1(n, &opts)?;
    if !report.complete {
        return Err(Error::Internal("census stopped before covering every table".into()));
    }
    Ok(report)
}

/// Feasible functions depending on all `n` bits: `x₁` and its negation on
/// the full cube for `n = 1`, `x₁ ⊕ x₂` and its negation with at most one
/// input removed from the promise for `n = 2`, none beyond.
pub fn theorem2_catalogue(n: usize) -> Vec<String> {
    let bases: &[&str] = match n {
        1 => &["01", "10"],
        2 => &["0110", "1001"],
        _ => &[],
    };
    let mut out: Vec<PartialBooleanFunction> = Vec::new();
    for base in bases {
        out.push(base.parse().expect("catalogue entries parse"));
        if n == 2 {
            for drop in 0..4 {
                let mut chars: Vec<char> = base.chars().collect();
                chars[drop] = '*';
                out.push(chars.iter().collect::<String>().parse().expect("catalogue entries parse"));
            }
        }
    }
    out.sort_by_key(|f| f.enumeration_index());
    out.iter().map(|f| f.to_string()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Report {
    pub n: usize,
    pub found: Vec<String>,
    pub expected: Vec<String>,
    pub holds: bool,
}

/// Brute-force set of feasible functions with `k = n`, compared with the catalogue.
pub fn verify_theorem2(n: usize, opts: &CensusOptions) -> Result<Theorem2Report> {
    let report = complete_census(n, opts)?;
    let expected = theorem2_catalogue(n);
    let found = report.theorem2;
    if found != expected {
        return Err(Error::TheoremViolation(format!(
            "n = {n}: found {found:?}, expected {expected:?}"
        )));
    }
    Ok(Theorem2Report { n, found, expected, holds: true })
}

/// `2 · 3^{2ⁿ − n − 1}`.
pub fn lemma1_bound(n: usize) -> BigUint {
    BigUint::from(2u32) * BigUint::from(3u32).pow(((1u32 << n) - n as u32) - 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct DependingReport {
    pub n: usize,
    /// `N(n)`, partial functions depending on all `n` bits.
    pub count: u64,
    pub lower_bound: String,
    pub holds: bool,
}

pub fn count_depending(n: usize, opts: &CensusOptions) -> Result<DependingReport> {
    let report = complete_census(n, opts)?;
    let count = report.totals.depending[n];
    let bound = lemma1_bound(n);
    Ok(DependingReport { n, count, holds: BigUint::from(count) >= bound, lower_bound: bound.to_string() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem5Report {
    pub n: usize,
    pub records: Vec<CensusRecord>,
    /// Every record with `n ≥ 3`, `k ≥ 2` satisfies the bound.
    pub holds: bool,
}

pub fn verify_theorem5(n: usize, opts: &CensusOptions) -> Result<Theorem5Report> {
    let records = complete_census(n, opts)?.records;
    let holds = records.iter().filter(|r| r.bound_applies).all(|r| r.bound_holds);
    Ok(Theorem5Report { n, records, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineSpanReport {
    pub n: usize,
    pub j: usize,
    pub points: Vec<String>,
    /// Boolean points outside the base set reachable with coefficients summing to 1.
    pub members: Vec<String>,
    /// Coefficients `s_r` for each member, in base-point order.
    pub coefficients: Vec<Vec<String>>,
    /// `T_j`.
    pub t: usize,
    /// `2^{j−1} − j`.
    pub bound: i64,
    pub holds: bool,
}

fn span_bound(j: usize) -> i64 {
    (1i64 << (j - 1)) - j as i64
}

/// Counts the Boolean points in the coefficient-sum-1 span of `points`.
///
/// Fails with [`Error::DependentPoints`] unless the vectors `(1, x)` of the
/// base points are linearly independent.
pub fn affine_span_count(n: usize, points: &[usize]) -> Result<AffineSpanReport> {
    let j = points.len();
    if j == 0 {
        return Err(Error::DependentPoints);
    }
    if let Some(&x) = points.iter().find(|&&x| x >> n != 0) {
        return Err(Error::Malformed(format!("point {x} has more than {n} bits")));
    }
    let base = polynomial_columns(n, points, 1)?;
    if base.rank() != j {
        return Err(Error::DependentPoints);
    }
    let mut members = Vec::new();
    let mut coefficients = Vec::new();
    for x in (0..1usize << n).filter(|x| !points.contains(x)) {
        let target = polynomial_columns(n, &[x], 1)?.column(0);
        if let Consistency::Consistent(s) = base.solve_consistent(&target)? {
            if s.iter().sum::<Rational>() != Rational::one() {
                return Err(Error::Internal("span coefficients do not sum to one".into()));
            }
            members.push(format_input(x, n));
            coefficients.push(format_rationals(&s));
        }
    }
    let t = members.len();
    let bound = span_bound(j);
    Ok(AffineSpanReport {
        n,
        j,
        points: points.iter().map(|&x| format_input(x, n)).collect(),
        members,
        coefficients,
        t,
        bound,
        holds: t as i64 <= bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma4Row {
    pub j: usize,
    pub point_sets: u64,
    pub independent_sets: u64,
    pub max_t: usize,
    pub bound: i64,
    /// First independent set (in combination order) reaching `max_t`.
    pub extremal: Vec<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma4Report {
    pub n: usize,
    pub rows: Vec<Lemma4Row>,
    pub holds: bool,
}

/// `T_j` over every set of `j` distinct points of `{0,1}ⁿ`, for each `j` in `sizes`.
pub fn lemma4_sweep(n: usize, sizes: RangeInclusive<usize>) -> Result<Lemma4Report> {
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 1, max: 4 });
    }
    let mut rows = Vec::new();
    for j in sizes.filter(|&j| j >= 1 && j <= 1 << n) {
        let sets: Vec<Vec<usize>> = (0..1usize << n).combinations(j).collect();
        let reports: Vec<Option<AffineSpanReport>> = sets
            .par_iter()
            .map(|p| match affine_span_count(n, p) {
                Ok(r) => Ok(Some(r)),
                Err(Error::DependentPoints) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let independent: Vec<&AffineSpanReport> = reports.iter().flatten().collect();
        let max_t = independent.iter().map(|r| r.t).max().unwrap_or(0);
        let extremal = independent.iter().find(|r| r.t == max_t).map(|r| r.points.clone()).unwrap_or_default();
        let bound = span_bound(j);
        rows.push(Lemma4Row {
            j,
            point_sets: sets.len() as u64,
            independent_sets: independent.len() as u64,
            max_t,
            bound,
            extremal,
            holds: independent.iter().all(|r| r.holds),
        });
    }
    let holds = rows.iter().all(|r| r.holds);
    Ok(Lemma4Report { n, rows, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct Fact2Report {
    pub n: usize,
    pub feasible_functions: u64,
    pub restrictions_checked: u64,
    /// `"parent -> restriction"` pairs that failed.
    pub violations: Vec<String>,
    pub holds: bool,
}

/// Every non-constant restriction of every feasible function is feasible
/// and accepts the parent's witness.
pub fn fact2_closure(n: usize) -> Result<Fact2Report> {
    let functions: Vec<PartialBooleanFunction> =
        enumerate_functions_with_limit(n, 3)?.filter(|f| f.is_non_constant()).collect();
    let per_function: Vec<(u64, u64, Vec<String>)> = functions
        .par_iter()
        .map(|f| -> Result<(u64, u64, Vec<String>)> {
            let decision = decide_q1(f, false)?;
            let Some(beta) = decision.witness else {
                return Ok((0, 0, Vec::new()));
            };
            let domain: Vec<usize> = f.domain().collect();
            let mut checked = 0;
            let mut bad = Vec::new();
            for mask in 1u32..(1 << domain.len()) {
                let keep: Vec<usize> =
                    domain.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
                let g = f.restrict(&keep)?;
                if !g.is_non_constant() {
                    continue;
                }
                checked += 1;
                if !verify_witness(&g, &beta)? || !decide_q1(&g, false)?.is_feasible() {
                    bad.push(format!("{f} -> {g}"));
                }
            }
            Ok((1, checked, bad))
        })
        .collect::<Result<_>>()?;
    let (feasible_functions, restrictions_checked, violations) = per_function.into_iter().fold(
        (0, 0, Vec::new()),
        |(a, b, mut v), (x, y, w)| {
            v.extend(w);
            (a + x, b + y, v)
        },
    );
    Ok(Fact2Report { n, feasible_functions, restrictions_checked, holds: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::parse_input;

    fn pts(v: &[&str]) -> Vec<usize> {
        v.iter().map(|s| parse_input(s).unwrap()).collect()
    }

    #[test]
    fn catalogue_contents() {
        assert_eq!(theorem2_catalogue(1), vec!["01", "10"]);
        let two = theorem2_catalogue(2);
        assert_eq!(two.len(), 10);
        for s in ["0110", "011*", "01*0", "0*10", "*110", "1001", "100*", "10*1", "1*01", "*001"] {
            assert!(two.contains(&s.to_owned()), "{s}");
        }
        assert!(theorem2_catalogue(3).is_empty());
    }

    #[test]
    fn theorem2_small() {
        for n in 1..=2 {
            let r = verify_theorem2(n, &CensusOptions::default()).unwrap();
            assert!(r.holds);
            assert_eq!(r.found, theorem2_catalogue(n));
        }
    }

    #[test]
    fn lemma1_values() {
        assert_eq!(lemma1_bound(1), BigUint::from(2u32));
        assert_eq!(lemma1_bound(2), BigUint::from(6u32));
        assert_eq!(lemma1_bound(3), BigUint::from(162u32));
        let one = count_depending(1, &CensusOptions::default()).unwrap();
        assert_eq!((one.count, one.holds), (2, true));
        let two = count_depending(2, &CensusOptions::default()).unwrap();
        assert_eq!((two.count, two.holds), (18, true));
    }

    #[test]
    fn span_examples() {
        let r = affine_span_count(3, &pts(&["000", "111"])).unwrap();
        assert_eq!((r.t, r.bound), (0, 0));

        let r = affine_span_count(3, &pts(&["000", "100", "010"])).unwrap();
        assert_eq!((r.t, r.bound, r.holds), (1, 1, true));
        assert_eq!(r.members, vec!["110"]);
        assert_eq!(r.coefficients, vec![vec!["-1", "1", "1"]]);

        // 011 + 101 − 000 = (1, 1, 2) is not a cube point; the relation only holds mod 2
        let r = affine_span_count(3, &pts(&["000", "011", "101"])).unwrap();
        assert_eq!(r.t, 0);

        assert!(matches!(affine_span_count(3, &pts(&["000", "011", "011"])), Err(Error::DependentPoints)));
        assert!(matches!(affine_span_count(2, &pts(&["00", "01", "10", "11"])), Err(Error::DependentPoints)));
        assert!(matches!(affine_span_count(2, &[]), Err(Error::DependentPoints)));
    }

    #[test]
    fn lemma4_sweep_at_three_bits() {
        let r = lemma4_sweep(3, 1..=4).unwrap();
        assert!(r.holds);
        let max: Vec<usize> = r.rows.iter().map(|row| row.max_t).collect();
        // T₁ = T₂ = 0, T₃ = 1, and four independent points span the whole cube
        assert_eq!(max, vec![0, 0, 1, 4]);
        assert_eq!(r.rows[2].bound, 1);
        assert_eq!(r.rows[3].bound, 4);
        assert_eq!(r.rows[1].independent_sets, 28);
    }

    #[test]
    fn fact2_at_two_bits() {
        let r = fact2_closure(2).unwrap();
        assert!(r.holds, "{:?}", r.violations);
        assert_eq!(r.feasible_functions, 42);
        assert!(r.restrictions_checked > r.feasible_functions);
    }
}
