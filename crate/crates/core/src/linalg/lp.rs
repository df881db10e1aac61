//! Feasibility of `{v ≥ 0, A·v = b}` by phase-one simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable on ratio ties), so the method terminates and its
//! output is a deterministic function of the input. Every answer is re-checked
//! before it is returned: a witness by substitution, an infeasibility verdict
//! by the Farkas inequalities `yᵀA ≥ 0`, `yᵀb < 0`.

use num_traits::{Signed, Zero};

use super::{Rational, RationalMatrix};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    /// A nonnegative `v` with `A·v = b`.
    Feasible(Vec<Rational>),
    /// A vector `y` with `yᵀA ≥ 0` entrywise and `yᵀb < 0`.
    Infeasible(Vec<Rational>),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible(v) => Some(v),
            FeasibilityResult::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible(_) => None,
            FeasibilityResult::Infeasible(y) => Some(y),
        }
    }
}

/// Exact check that `v ≥ 0` and `A·v = b`.
pub fn verify_solution(a: &RationalMatrix, b: &[Rational], v: &[Rational]) -> bool {
    v.len() == a.cols()
        && b.len() == a.rows()
        && v.iter().all(|x| !x.is_negative())
        && a.mul_vec(v).is_ok_and(|av| av == b)
}

/// Exact check that `y` proves `{v ≥ 0, A·v = b}` empty.
pub fn verify_farkas(a: &RationalMatrix, b: &[Rational], y: &[Rational]) -> bool {
    if y.len() != a.rows() || b.len() != a.rows() {
        return false;
    }
    let Ok(ya) = a.left_mul_vec(y) else {
        return false;
    };
    let yb: Rational = y.iter().zip(b).map(|(p, q)| p * q).sum();
    ya.iter().all(|x| !x.is_negative()) && yb.is_negative()
}

struct Tableau {
    /// `m` rows of `vars + m` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of the phase-one objective, one per column.
    costs: Vec<Rational>,
    basis: Vec<usize>,
    vars: usize,
}

impl Tableau {
    fn new(a: &RationalMatrix, b: &[Rational], signs: &[bool]) -> Self {
        let (m, vars) = (a.rows(), a.cols());
        let width = vars + m + 1;
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = vec![Rational::zero(); width];
            for j in 0..vars {
                row[j] = if signs[i] { -a[(i, j)].clone() } else { a[(i, j)].clone() };
            }
            row[vars + i] = Rational::from_integer(1.into());
            row[width - 1] = if signs[i] { -b[i].clone() } else { b[i].clone() };
            rows.push(row);
        }
        // artificials start basic with unit cost: reduced cost = -(column sum)
        let mut costs = vec![Rational::zero(); width - 1];
        for (j, c) in costs.iter_mut().enumerate().take(vars) {
            *c = -rows.iter().map(|r| &r[j]).sum::<Rational>();
        }
        Self { rows, costs, basis: (vars..vars + m).collect(), vars }
    }

    fn rhs(&self, i: usize) -> &Rational {
        self.rows[i].last().expect("non-empty row")
    }

    fn entering(&self) -> Option<usize> {
        self.costs.iter().position(|c| c.is_negative())
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = self.rhs(i) / &row[col];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        let factor = self.costs[c].clone();
        if !factor.is_zero() {
            for (v, p) in self.costs.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.vars
    }

    fn objective(&self) -> Rational {
        (0..self.rows.len())
            .filter(|&i| self.is_artificial(self.basis[i]))
            .map(|i| self.rhs(i).clone())
            .sum()
    }

    fn primal(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.vars];
        for (i, &col) in self.basis.iter().enumerate() {
            if col < self.vars {
                v[col] = self.rhs(i).clone();
            }
        }
        v
    }

    /// Phase-one duals `y = c_Bᵀ B⁻¹`; `B⁻¹` sits in the artificial columns.
    fn duals(&self) -> Vec<Rational> {
        let m = self.rows.len();
        (0..m)
            .map(|k| {
                (0..m)
                    .filter(|&i| self.is_artificial(self.basis[i]))
                    .map(|i| self.rows[i][self.vars + k].clone())
                    .sum()
            })
            .collect()
    }
}

/// Decides `{v ≥ 0, A·v = b}` and returns a verified witness or Farkas certificate.
pub fn lp_feasible(a: &RationalMatrix, b: &[Rational]) -> Result<FeasibilityResult> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), actual: b.len() });
    }
    let signs: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut tab = Tableau::new(a, b, &signs);

    while let Some(col) = tab.entering() {
        let row = tab
            .leaving(col)
            .ok_or_else(|| Error::Internal("phase-one objective unbounded below".into()))?;
        tab.pivot(row, col);
    }

    let result = if tab.objective().is_zero() {
        FeasibilityResult::Feasible(tab.primal())
    } else {
        // y' certifies infeasibility of the sign-normalised rows; undo the flips
        let y = tab
            .duals()
            .into_iter()
            .zip(&signs)
            .map(|(y, &flip)| if flip { y } else { -y })
            .collect();
        FeasibilityResult::Infeasible(y)
    };

    let verified = match &result {
        FeasibilityResult::Feasible(v) => verify_solution(a, b, v),
        FeasibilityResult::Infeasible(y) => verify_farkas(a, b, y),
    };
    if !verified {
        return Err(Error::Internal("simplex result failed exact re-verification".into()));
    }
    Ok(result)
}
