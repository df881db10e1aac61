//! Partial Boolean functions `f: D -> {0,1}` with `D ⊆ {0,1}^n`.
//!
//! An input string `x = x₁x₂⋯xₙ` is stored at table index `Σ xᵢ·2^{n−i}`, so
//! `x₁` is the most significant bit and the trit string `f(0)f(1)⋯f(2ⁿ−1)`
//! reads left to right in the usual binary order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Largest supported number of input bits.
pub const MAX_BITS: usize = 16;

/// Default guard rail for exhaustive enumeration (`3^(2^n)` tables).
pub const DEFAULT_MAX_ENUMERATION_BITS: usize = 4;

/// Hard limit for exhaustive enumeration: `3^(2^5)` still fits in a `u64`.
const HARD_MAX_ENUMERATION_BITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trit {
    Zero,
    One,
    Undef,
}

impl Trit {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            '0' => Some(Trit::Zero),
            '1' => Some(Trit::One),
            '*' => Some(Trit::Undef),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::Undef => '*',
        }
    }

    pub fn value(self) -> Option<bool> {
        match self {
            Trit::Zero => Some(false),
            Trit::One => Some(true),
            Trit::Undef => None,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    fn digit(self) -> u64 {
        self as u64
    }

    fn from_digit(d: u64) -> Self {
        match d {
            0 => Trit::Zero,
            1 => Trit::One,
            _ => Trit::Undef,
        }
    }
}

/// The bit `xᵢ` (1-based, MSB first) of input index `x` on `n` bits.
#[inline]
pub fn bit(x: usize, i: usize, n: usize) -> bool {
    debug_assert!(i >= 1 && i <= n);
    (x >> (n - i)) & 1 == 1
}

/// Hamming weight `|x|`.
#[inline]
pub fn weight(x: usize) -> u32 {
    x.count_ones()
}

/// Renders input index `x` as the bit string `x₁⋯xₙ`.
pub fn format_input(x: usize, n: usize) -> String {
    (1..=n).map(|i| if bit(x, i, n) { '1' } else { '0' }).collect()
}

/// Parses a bit string `x₁⋯xₙ` into an input index.
pub fn parse_input(s: &str) -> Result<usize> {
    let s = s.trim();
    if s.is_empty() || s.len() > MAX_BITS {
        return Err(Error::Malformed(format!("bad input string {s:?}")));
    }
    s.chars().enumerate().try_fold(0usize, |acc, (pos, ch)| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidCharacter { ch, pos }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialBooleanFunction {
    n: usize,
    table: Vec<Trit>,
}

impl PartialBooleanFunction {
    pub fn new(n: usize, table: Vec<Trit>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::UnsupportedSize { n, min: 1, max: MAX_BITS });
        }
        if table.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, actual: table.len() });
        }
        Ok(Self { n, table })
    }

    /// Builds a function from explicit zero and one sets; everything else is undefined.
    pub fn from_sets(n: usize, zeros: &[usize], ones: &[usize]) -> Result<Self> {
        let mut f = Self::new(n, vec![Trit::Undef; 1 << n])?;
        for (set, trit) in [(zeros, Trit::Zero), (ones, Trit::One)] {
            for &x in set {
                let slot = f
                    .table
                    .get_mut(x)
                    .ok_or(Error::DimensionMismatch { expected: 1 << n, actual: x + 1 })?;
                if *slot != Trit::Undef && *slot != trit {
                    return Err(Error::ConflictingAssignment(format_input(x, n)));
                }
                *slot = trit;
            }
        }
        Ok(f)
    }

    /// Parses either a trit string such as `"011*1***"` or the set form
    /// `zeros=[000];ones=[001,010,100]`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('=') {
            Self::parse_sets(text)
        } else {
            Self::parse_table(text)
        }
    }

    fn parse_table(text: &str) -> Result<Self> {
        let table = text
            .chars()
            .enumerate()
            .map(|(pos, ch)| Trit::from_char(ch).ok_or(Error::InvalidCharacter { ch, pos }))
            .collect::<Result<Vec<_>>>()?;
        let len = table.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::NotPowerOfTwo(len));
        }
        Self::new(len.trailing_zeros() as usize, table)
    }

    fn parse_sets(text: &str) -> Result<Self> {
        let mut zeros = None;
        let mut ones = None;
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("expected key=[...], got {part:?}")))?;
            let value = value.trim();
            let inner = value
                .strip_prefix('[')
                .and_then(|v| v.strip_suffix(']'))
                .ok_or_else(|| Error::Malformed(format!("expected a bracketed list, got {value:?}")))?;
            let items: Vec<String> = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
            let slot = match key.trim() {
                "zeros" => &mut zeros,
                "ones" => &mut ones,
                other => return Err(Error::Malformed(format!("unknown key {other:?}"))),
            };
            if slot.replace(items).is_some() {
                return Err(Error::Malformed(format!("duplicate key {:?}", key.trim())));
            }
        }
        let zeros = zeros.unwrap_or_default();
        let ones = ones.unwrap_or_default();

        let mut n = None;
        for s in zeros.iter().chain(&ones) {
            match n {
                None => n = Some(s.len()),
                Some(len) if len != s.len() => return Err(Error::UnequalLengths(len, s.len())),
                Some(_) => {}
            }
        }
        let n = n.ok_or_else(|| Error::Malformed("no input strings listed".into()))?;
        let parse_all = |items: &[String]| items.iter().map(|s| parse_input(s)).collect::<Result<Vec<_>>>();
        let zero_idx = parse_all(&zeros)?;
        let one_idx = parse_all(&ones)?;
        let zero_set: BTreeSet<_> = zero_idx.iter().copied().collect();
        if let Some(&x) = one_idx.iter().find(|x| zero_set.contains(x)) {
            return Err(Error::ConflictingAssignment(format_input(x, n)));
        }
        Self::from_sets(n, &zero_idx, &one_idx)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[Trit] {
        &self.table
    }

    pub fn get(&self, x: usize) -> Trit {
        self.table[x]
    }

    /// `f(x)` when `x ∈ D`.
    pub fn value(&self, x: usize) -> Option<bool> {
        self.table[x].value()
    }

    /// Inputs in `D`, ascending.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.table.iter().enumerate().filter(|(_, t)| **t != Trit::Undef).map(|(x, _)| x)
    }

    /// `{x : f(x) = b}`, ascending.
    pub fn class(&self, b: bool) -> Vec<usize> {
        let want = Trit::from_bool(b);
        self.table.iter().enumerate().filter(|(_, t)| **t == want).map(|(x, _)| x).collect()
    }

    pub fn zeros(&self) -> Vec<usize> {
        self.class(false)
    }

    pub fn ones(&self) -> Vec<usize> {
        self.class(true)
    }

    pub fn domain_size(&self) -> usize {
        self.table.iter().filter(|t| **t != Trit::Undef).count()
    }

    pub fn is_empty_domain(&self) -> bool {
        self.table.iter().all(|t| *t == Trit::Undef)
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(|t| *t != Trit::Undef)
    }

    /// True when `D` is non-empty and `f` takes a single value on it.
    pub fn is_constant(&self) -> bool {
        let has = |t| self.table.contains(&t);
        !self.is_empty_domain() && !(has(Trit::Zero) && has(Trit::One))
    }

    pub fn is_non_constant(&self) -> bool {
        self.table.contains(&Trit::Zero) && self.table.contains(&Trit::One)
    }

    /// `f̄(x) = 1 ⊕ f(x)` on the same domain.
    pub fn negate(&self) -> Self {
        let table = self
            .table
            .iter()
            .map(|t| match t {
                Trit::Zero => Trit::One,
                Trit::One => Trit::Zero,
                Trit::Undef => Trit::Undef,
            })
            .collect();
        Self { n: self.n, table }
    }

    /// The subfunction agreeing with `f` on `keep` and undefined elsewhere.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let mut table = vec![Trit::Undef; self.table.len()];
        for &x in keep {
            match self.table.get(x) {
                Some(t) if *t != Trit::Undef => table[x] = *t,
                _ => return Err(Error::OutsideDomain(x)),
            }
        }
        Ok(Self { n: self.n, table })
    }

    /// True when `self` is a subfunction of `other`: both classes are contained.
    pub fn is_subfunction_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .table
                .iter()
                .zip(&other.table)
                .all(|(a, b)| *a == Trit::Undef || a == b)
    }

    /// `{x ⊕ y : f(x) = 0, f(y) = 1}`, deduplicated.
    pub fn difference_set(&self) -> Result<DifferenceSet> {
        if self.is_empty_domain() {
            return Err(Error::EmptyDomain);
        }
        if !self.is_non_constant() {
            return Err(Error::ConstantFunction);
        }
        let zeros = self.zeros();
        let ones = self.ones();
        let mut seen = vec![false; self.table.len()];
        for &x in &zeros {
            for &y in &ones {
                seen[x ^ y] = true;
            }
        }
        let elements = seen.iter().enumerate().filter(|(_, s)| **s).map(|(z, _)| z).collect();
        Ok(DifferenceSet { n: self.n, elements })
    }

    /// Rank of this table in the lexicographic enumeration order (`0 < 1 < *`).
    pub fn enumeration_index(&self) -> Option<u64> {
        self.table
            .iter()
            .try_fold(0u64, |acc, t| acc.checked_mul(3)?.checked_add(t.digit()))
    }

    /// Inverse of [`Self::enumeration_index`].
    pub fn from_enumeration_index(n: usize, mut index: u64) -> Result<Self> {
        let len = 1usize << n;
        let mut table = vec![Trit::Zero; len];
        for slot in table.iter_mut().rev() {
            *slot = Trit::from_digit(index % 3);
            index /= 3;
        }
        if index != 0 {
            return Err(Error::Malformed("enumeration index out of range".into()));
        }
        Self::new(n, table)
    }
}

impl fmt::Display for PartialBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.table.iter().map(|t| t.to_char()).collect();
        f.write_str(&s)
    }
}

impl FromStr for PartialBooleanFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Deduplicated nonzero differences `x ⊕ y` across the two output classes, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DifferenceSet {
    n: usize,
    elements: Vec<usize>,
}

impl DifferenceSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, z: usize) -> bool {
        self.elements.binary_search(&z).is_ok()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.elements.iter().all(|z| other.contains(*z))
    }

    /// Bit mask with bit `z` set for each element; only for `n ≤ 6`.
    pub fn mask(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.elements.iter().fold(0u64, |m, z| m | (1 << z)))
    }
}

/// `3^(2^n)`, the number of partial functions on `n` bits, when it fits in a `u64`.
pub fn function_count(n: usize) -> Option<u64> {
    3u64.checked_pow(1u32.checked_shl(n as u32)?)
}

/// Every trit table of length `2ⁿ` in lexicographic order `0 < 1 < *`.
///
/// Supports sub-ranges of the index space so that callers can shard.
#[derive(Clone, Debug)]
pub struct Functions {
    n: usize,
    current: Vec<Trit>,
    next: u64,
    end: u64,
}

impl Functions {
    pub fn range(n: usize, start: u64, end: u64) -> Result<Self> {
        let total = function_count(n).ok_or(Error::UnsupportedSize {
            n,
            min: 1,
            max: HARD_MAX_ENUMERATION_BITS,
        })?;
        let end = end.min(total);
        let start = start.min(end);
        let current = if start < total {
            PartialBooleanFunction::from_enumeration_index(n, start)?.table
        } else {
            Vec::new()
        };
        Ok(Self { n, current, next: start, end })
    }

    /// Index of the next function to be yielded.
    pub fn position(&self) -> u64 {
        self.next
    }
}

impl Iterator for Functions {
    type Item = PartialBooleanFunction;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let out = PartialBooleanFunction { n: self.n, table: self.current.clone() };
        self.next += 1;
        // odometer increment, last position least significant
        for slot in self.current.iter_mut().rev() {
            match slot {
                Trit::Zero => {
                    *slot = Trit::One;
                    break;
                }
                Trit::One => {
                    *slot = Trit::Undef;
                    break;
                }
                Trit::Undef => *slot = Trit::Zero,
            }
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = usize::try_from(self.end - self.next).ok();
        (rem.unwrap_or(usize::MAX), rem)
    }
}

/// All `3^(2^n)` partial functions on `n` bits, guarded at
/// [`DEFAULT_MAX_ENUMERATION_BITS`].
pub fn enumerate_functions(n: usize) -> Result<Functions> {
    enumerate_functions_with_limit(n, DEFAULT_MAX_ENUMERATION_BITS)
}

/// Like [`enumerate_functions`] with an explicit guard rail (capped at 5).
pub fn enumerate_functions_with_limit(n: usize, max_n: usize) -> Result<Functions> {
    let max = max_n.min(HARD_MAX_ENUMERATION_BITS);
    if n == 0 || n > max {
        return Err(Error::UnsupportedSize { n, min: 1, max });
    }
    Functions::range(n, 0, u64::MAX)
}

/// Enumeration restricted to the tables accepted by `filter`.
pub fn enumerate_matching<F>(n: usize, filter: F) -> Result<impl Iterator<Item = PartialBooleanFunction>>
where
    F: FnMut(&PartialBooleanFunction) -> bool,
{
    Ok(enumerate_functions(n)?.filter(filter))
}
