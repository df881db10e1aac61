//! Polynomial and Fourier basis vectors, the `G` matrices built from them,
//! and the two structural measures derived from multilinear representations:
//! degree and the number of bits a function depends on.
//!
//! Subsets `S ⊆ {1,…,n}` are ordered by size, then lexicographically on their
//! sorted elements. Every vector and matrix in this module uses that order.

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::linalg::{integer, Consistency, Rational, RationalMatrix};
use crate::pbf::{bit, PartialBooleanFunction};
use crate::{Error, Result};

/// Largest `n` accepted by [`depends_on`], whose search is exponential in `n`.
pub const DEPENDS_ON_MAX_BITS: usize = 12;

/// A subset of `{1,…,n}` stored as a bit mask, element `i` at bit `i − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u32);

impl Subset {
    pub fn from_elements(elements: &[usize]) -> Self {
        Subset(elements.iter().fold(0, |m, &i| m | (1 << (i - 1))))
    }

    pub fn elements(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.0 & (1 << (i - 1)) != 0).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// The input index `x` with `xᵢ = 1` exactly for `i ∈ S`.
    pub fn to_input(self, n: usize) -> usize {
        self.elements().iter().fold(0, |x, &i| x | (1 << (n - i)))
    }

    /// Input-side mask: the bits of an `n`-bit index selected by this subset.
    pub fn input_mask(self, n: usize) -> usize {
        self.to_input(n)
    }

    /// `X_S(x) = Πᵢ∈S xᵢ`.
    pub fn monomial(self, x: usize, n: usize) -> bool {
        let mask = self.input_mask(n);
        x & mask == mask
    }

    /// `(−1)^{S·x}` as a sign: true for −1.
    pub fn parity(self, x: usize, n: usize) -> bool {
        (x & self.input_mask(n)).count_ones() % 2 == 1
    }
}

/// The fixed order of subsets with `|S| ≤ m`: size blocks ascending,
/// lexicographic within a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetOrder {
    n: usize,
    m: usize,
    subsets: Vec<Subset>,
}

impl SubsetOrder {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m > n {
            return Err(Error::DegreeTooLarge { m, n });
        }
        Ok(Self::over(&(1..=n).collect::<Vec<_>>(), m, n))
    }

    /// Subsets of `variables` (ascending) with at most `m` elements, in the same order.
    fn over(variables: &[usize], m: usize, n: usize) -> Self {
        let subsets = (0..=m.min(variables.len()))
            .flat_map(|size| variables.iter().copied().combinations(size))
            .map(|els| Subset::from_elements(&els))
            .collect();
        Self { n, m, subsets }
    }

    pub fn full(n: usize) -> Self {
        Self::over(&(1..=n).collect::<Vec<_>>(), n, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.subsets.iter().position(|t| *t == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Polynomial,
    Fourier,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisVector {
    pub kind: BasisKind,
    pub n: usize,
    pub m: usize,
    pub entries: Vec<Rational>,
}

fn basis(kind: BasisKind, n: usize, x: usize, m: usize) -> Result<BasisVector> {
    let order = SubsetOrder::new(n, m)?;
    if x >> n != 0 {
        return Err(Error::DimensionMismatch { expected: 1 << n, actual: x + 1 });
    }
    let entries = order
        .subsets()
        .iter()
        .map(|s| match kind {
            BasisKind::Polynomial => integer(s.monomial(x, n) as i64),
            BasisKind::Fourier => integer(if s.parity(x, n) { -1 } else { 1 }),
        })
        .collect();
    Ok(BasisVector { kind, n, m, entries })
}

/// `|P(x)⟩_m`: the monomials `X_S(x)` for `|S| ≤ m`.
pub fn polynomial_basis(n: usize, x: usize, m: usize) -> Result<BasisVector> {
    basis(BasisKind::Polynomial, n, x, m)
}

/// `|F(x)⟩_m`: the characters `(−1)^{S·x}` for `|S| ≤ m`.
pub fn fourier_basis(n: usize, x: usize, m: usize) -> Result<BasisVector> {
    basis(BasisKind::Fourier, n, x, m)
}

/// Columns `|P(x)⟩_m` over a set of inputs, ascending by input index.
#[derive(Clone, Debug)]
pub struct GMatrix {
    pub matrix: RationalMatrix,
    pub columns: Vec<usize>,
    pub m: usize,
    pub value: Option<bool>,
}

impl GMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

/// Stacks `|P(x)⟩_m` for each input in `inputs` as columns.
pub fn polynomial_columns(n: usize, inputs: &[usize], m: usize) -> Result<RationalMatrix> {
    let order = SubsetOrder::new(n, m)?;
    let mut g = RationalMatrix::zeros(order.len(), inputs.len());
    for (j, &x) in inputs.iter().enumerate() {
        for (i, s) in order.subsets().iter().enumerate() {
            if s.monomial(x, n) {
                g[(i, j)] = Rational::one();
            }
        }
    }
    Ok(g)
}

/// `G_f(m)` over all of `D` when `value` is `None`, `G_f(m, b)` over `{x : f(x) = b}` otherwise.
pub fn build_g(f: &PartialBooleanFunction, m: usize, value: Option<bool>) -> Result<GMatrix> {
    let columns = match value {
        Some(b) => f.class(b),
        None => f.domain().collect(),
    };
    if columns.is_empty() {
        return Err(match value {
            Some(b) => Error::EmptyColumnSet(b as u8),
            None => Error::EmptyDomain,
        });
    }
    let matrix = polynomial_columns(f.n(), &columns, m)?;
    Ok(GMatrix { matrix, columns, m, value })
}

/// The full `2ⁿ × 2ⁿ` matrix `G_n`; column `j` is `|P(x)⟩` for the input
/// corresponding to the `j`-th subset.
pub fn full_g(n: usize) -> Result<RationalMatrix> {
    let order = SubsetOrder::full(n);
    let inputs: Vec<usize> = order.subsets().iter().map(|s| s.to_input(n)).collect();
    polynomial_columns(n, &inputs, n)
}

/// The matrix `A` with `A·|F(x)⟩_m = |P(x)⟩_m` for every `x`, from
/// `xᵢ = ½ − ½(−1)^{xᵢ}`; row `S` holds `(−1)^{|T|}/2^{|S|}` at every `T ⊆ S`.
pub fn basis_change(n: usize, m: usize) -> Result<RationalMatrix> {
    let order = SubsetOrder::new(n, m)?;
    let mut a = RationalMatrix::zeros(order.len(), order.len());
    for (i, s) in order.subsets().iter().enumerate() {
        let scale = Rational::new(1.into(), num_bigint::BigInt::from(1u64) << s.len());
        for (j, t) in order.subsets().iter().enumerate() {
            if t.is_subset_of(*s) {
                a[(i, j)] = if t.len() % 2 == 1 { -scale.clone() } else { scale.clone() };
            }
        }
    }
    Ok(a)
}

fn values_on(f: &PartialBooleanFunction, inputs: &[usize]) -> Vec<Rational> {
    inputs
        .iter()
        .map(|&x| if f.value(x) == Some(true) { Rational::one() } else { Rational::zero() })
        .collect()
}

/// Smallest `d` such that some multilinear polynomial of degree `≤ d` agrees with `f` on `D`.
pub fn degree(f: &PartialBooleanFunction) -> Result<usize> {
    let domain: Vec<usize> = f.domain().collect();
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let rhs = values_on(f, &domain);
    for d in 0..=f.n() {
        let g = polynomial_columns(f.n(), &domain, d)?;
        if g.transpose().solve_consistent(&rhs)?.is_consistent() {
            return Ok(d);
        }
    }
    Err(Error::Internal("no representing polynomial up to degree n".into()))
}

/// Fewest variables used by a multilinear polynomial agreeing with `f` on `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dependence {
    pub k: usize,
    /// First witnessing variable set in subset order, 1-based.
    pub variables: Vec<usize>,
    /// Coefficients over the monomials `X_T`, `T ⊆ variables`, in subset order.
    pub coefficients: Vec<Rational>,
}

/// Whether `f` on `D` is matched by some polynomial over the monomials `X_T`, `T ⊆ variables`.
pub fn representable_on(f: &PartialBooleanFunction, variables: &[usize]) -> Result<Consistency> {
    let domain: Vec<usize> = f.domain().collect();
    let n = f.n();
    let monomials = SubsetOrder::over(variables, variables.len(), n);
    let mut system = RationalMatrix::zeros(domain.len(), monomials.len());
    for (r, &x) in domain.iter().enumerate() {
        for (c, t) in monomials.subsets().iter().enumerate() {
            if t.monomial(x, n) {
                system[(r, c)] = Rational::one();
            }
        }
    }
    system.solve_consistent(&values_on(f, &domain))
}

/// Number of bits `f` depends on, with the first witnessing variable set.
pub fn depends_on(f: &PartialBooleanFunction) -> Result<Dependence> {
    let n = f.n();
    if n > DEPENDS_ON_MAX_BITS {
        return Err(Error::UnsupportedSize { n, min: 1, max: DEPENDS_ON_MAX_BITS });
    }
    if f.is_empty_domain() {
        return Err(Error::EmptyDomain);
    }
    for k in 0..=n {
        for variables in (1..=n).combinations(k) {
            if let Consistency::Consistent(coefficients) = representable_on(f, &variables)? {
                return Ok(Dependence { k, variables, coefficients });
            }
        }
    }
    Err(Error::Internal("no representing polynomial over all n variables".into()))
}

/// Bits `i` admitting a flip pair `x, x^{i}` in `D` with different values.
pub fn flip_sensitive_bits(f: &PartialBooleanFunction) -> Vec<usize> {
    let n = f.n();
    (1..=n)
        .filter(|&i| {
            let flip = 1 << (n - i);
            f.domain().any(|x| match (f.value(x), f.value(x ^ flip)) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            })
        })
        .collect()
}

/// `x ↦ (−1)^{xᵢ}` evaluated for query index `i ∈ {0,…,n}` (index 0 is the constant 1).
pub fn query_sign(x: usize, i: usize, n: usize) -> i64 {
    if i > 0 && bit(x, i, n) {
        -1
    } else {
        1
    }
}
