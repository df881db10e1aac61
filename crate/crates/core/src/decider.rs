//! Exact 1-query decision.
//!
//! A non-constant `f` is computable with one query iff some `β ≥ 0` with
//! `Σβᵢ = 1` satisfies `β₀ + Σᵢ (−1)^{zᵢ} βᵢ = 0` for every difference
//! `z = x ⊕ y`, `f(x) = 0`, `f(y) = 1`. Using the normalisation row the same
//! system reads `Σ_{i : zᵢ = 1} βᵢ = ½`; both forms are built and solved, and
//! their verdicts must agree.
//!
//! The rank filter is a cheap necessary condition: `r₀ = rank G_f(1,0)` and
//! `r₁ = rank G_f(1,1)` must lie in `1..=n` and `r₀ + r₁ − (2n + 2 − k) ≤ 0`.
//! Failing it proves the function needs more than one query; passing proves
//! nothing.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::{self, integer, lp_feasible, rational, verify_farkas, FeasibilityResult, Rational, RationalMatrix};
use crate::pbf::{bit, DifferenceSet, PartialBooleanFunction};
use crate::representation::{build_g, depends_on};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub r0: usize,
    pub r1: usize,
    pub k: usize,
    /// `r0 + r1 − (2n + 2 − k)`.
    pub f_value: i64,
    pub passes: bool,
}

impl RankReport {
    pub fn from_parts(n: usize, r0: usize, r1: usize, k: usize) -> Self {
        let f_value = (r0 + r1) as i64 - (2 * n as i64 + 2 - k as i64);
        let in_range = |r: usize| (1..=n).contains(&r);
        Self { r0, r1, k, f_value, passes: in_range(r0) && in_range(r1) && f_value <= 0 }
    }
}

/// Ranks of `G_f(1,0)`, `G_f(1,1)`, the dependence `k`, and the filter verdict.
pub fn rank_filter(f: &PartialBooleanFunction) -> Result<RankReport> {
    if f.is_empty_domain() {
        return Err(Error::EmptyDomain);
    }
    if !f.is_non_constant() {
        return Err(Error::ConstantFunction);
    }
    let r0 = build_g(f, 1, Some(false))?.rank();
    let r1 = build_g(f, 1, Some(true))?.rank();
    let k = depends_on(f)?.k;
    Ok(RankReport::from_parts(f.n(), r0, r1, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// `f` is constant on `D`: no query is needed.
    ZeroQuery,
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q1Decision {
    pub outcome: Outcome,
    /// `(β₀, …, βₙ)` when feasible.
    pub witness: Option<Vec<Rational>>,
    /// Farkas vector over the raw-form rows (see [`constraint_system`]) when the
    /// simplex proved infeasibility.
    pub certificate: Option<Vec<Rational>>,
    pub rank_report: Option<RankReport>,
}

impl Q1Decision {
    pub fn is_feasible(&self) -> bool {
        self.outcome == Outcome::Feasible
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintForm {
    /// `β₀ + Σ (−1)^{zᵢ} βᵢ = 0` per difference.
    Raw,
    /// `Σ_{i ∈ supp z} βᵢ = ½` per difference.
    Reduced,
}

/// The equality system over `(β₀, …, βₙ)`: row 0 is `Σβᵢ = 1`, then one row
/// per difference in ascending order.
pub fn system_for_differences(delta: &DifferenceSet, form: ConstraintForm) -> (RationalMatrix, Vec<Rational>) {
    let n = delta.n();
    let rows = 1 + delta.len();
    let mut a = RationalMatrix::zeros(rows, n + 1);
    let mut b = vec![Rational::zero(); rows];
    for j in 0..=n {
        a[(0, j)] = Rational::one();
    }
    b[0] = Rational::one();
    for (r, &z) in delta.elements().iter().enumerate() {
        let row = r + 1;
        match form {
            ConstraintForm::Raw => {
                a[(row, 0)] = Rational::one();
                for i in 1..=n {
                    a[(row, i)] = integer(if bit(z, i, n) { -1 } else { 1 });
                }
            }
            ConstraintForm::Reduced => {
                for i in (1..=n).filter(|&i| bit(z, i, n)) {
                    a[(row, i)] = Rational::one();
                }
                b[row] = rational(1, 2);
            }
        }
    }
    (a, b)
}

pub fn constraint_system(f: &PartialBooleanFunction, form: ConstraintForm) -> Result<(RationalMatrix, Vec<Rational>)> {
    Ok(system_for_differences(&f.difference_set()?, form))
}

/// Solves both constraint forms for a difference set and cross-checks them.
pub fn decide_differences(delta: &DifferenceSet) -> Result<FeasibilityResult> {
    let (a, b) = system_for_differences(delta, ConstraintForm::Raw);
    let raw = lp_feasible(&a, &b)?;
    let (a2, b2) = system_for_differences(delta, ConstraintForm::Reduced);
    let reduced = lp_feasible(&a2, &b2)?;
    if raw.is_feasible() != reduced.is_feasible() {
        return Err(Error::Internal("raw and reduced constraint forms disagree".into()));
    }
    Ok(raw)
}

/// Decides whether `f` has exact quantum query complexity one.
///
/// With `use_filter`, a failing rank filter short-circuits to `Infeasible`
/// with the rank report as the proof and no Farkas vector.
pub fn decide_q1(f: &PartialBooleanFunction, use_filter: bool) -> Result<Q1Decision> {
    if f.is_empty_domain() {
        return Err(Error::EmptyDomain);
    }
    if f.is_constant() {
        return Ok(Q1Decision { outcome: Outcome::ZeroQuery, witness: None, certificate: None, rank_report: None });
    }
    let rank_report = if use_filter { Some(rank_filter(f)?) } else { None };
    if let Some(report) = rank_report.filter(|r| !r.passes) {
        return Ok(Q1Decision {
            outcome: Outcome::Infeasible,
            witness: None,
            certificate: None,
            rank_report: Some(report),
        });
    }

    let delta = f.difference_set()?;
    let decision = match decide_differences(&delta)? {
        FeasibilityResult::Feasible(beta) => {
            if !witness_satisfies(&delta, &beta) {
                return Err(Error::Internal("witness failed the difference constraints".into()));
            }
            Q1Decision { outcome: Outcome::Feasible, witness: Some(beta), certificate: None, rank_report }
        }
        FeasibilityResult::Infeasible(y) => {
            Q1Decision { outcome: Outcome::Infeasible, witness: None, certificate: Some(y), rank_report }
        }
    };
    Ok(decision)
}

/// `β₀ + Σᵢ (−1)^{zᵢ} βᵢ`, the overlap of the two post-query states that differ by `z`.
pub fn signed_overlap(beta: &[Rational], z: usize, n: usize) -> Rational {
    beta.iter()
        .enumerate()
        .map(|(i, b)| if i > 0 && bit(z, i, n) { -b.clone() } else { b.clone() })
        .sum()
}

fn witness_satisfies(delta: &DifferenceSet, beta: &[Rational]) -> bool {
    let n = delta.n();
    beta.len() == n + 1
        && beta.iter().all(|b| !b.is_negative())
        && beta.iter().sum::<Rational>().is_one()
        && delta.elements().iter().all(|&z| signed_overlap(beta, z, n).is_zero())
}

/// Exact re-check of a claimed witness `(β₀, …, βₙ)` for `f`.
pub fn verify_witness(f: &PartialBooleanFunction, beta: &[Rational]) -> Result<bool> {
    if beta.len() != f.n() + 1 {
        return Err(Error::DimensionMismatch { expected: f.n() + 1, actual: beta.len() });
    }
    Ok(witness_satisfies(&f.difference_set()?, beta))
}

/// Exact re-check of a Farkas vector against the raw-form system of `f`.
pub fn verify_certificate(f: &PartialBooleanFunction, y: &[Rational]) -> Result<bool> {
    let (a, b) = constraint_system(f, ConstraintForm::Raw)?;
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), actual: y.len() });
    }
    Ok(verify_farkas(&a, &b, y))
}

pub fn format_vector(v: &[Rational]) -> String {
    format!("[{}]", linalg::format_rationals(v).join(", "))
}
