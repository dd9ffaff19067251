//! Subsets of the variable indices `{1, ..., n}` as bitmasks.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of quaternionic variables.
pub const MAX_VARS: usize = 6;

/// A subset of `{1, ..., n}`; variable `h` is bit `h - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(h: usize) -> Self {
        debug_assert!(h >= 1);
        IndexSet(1 << (h - 1))
    }

    /// Builds a set from 1-based variable indices. Panics on index 0.
    pub fn from_vars(vars: &[usize]) -> Self {
        vars.iter().fold(IndexSet::EMPTY, |s, &h| s.with(h))
    }

    /// Same as [`from_vars`](Self::from_vars) but validated against `n`.
    pub fn try_from_vars(vars: &[usize], n: usize) -> Result<Self> {
        for &h in vars {
            if h == 0 || h > n {
                return Err(Error::domain(format!(
                    "variable index {h} out of range 1..={n}"
                )));
            }
        }
        Ok(Self::from_vars(vars))
    }

    /// `{1, ..., m}`.
    pub fn interval(m: usize) -> Self {
        IndexSet(((1u64 << m) - 1) as u32)
    }

    pub fn full(n: usize) -> Self {
        Self::interval(n)
    }

    pub fn with(self, h: usize) -> Self {
        assert!(h >= 1, "variables are 1-based");
        IndexSet(self.0 | (1 << (h - 1)))
    }

    pub fn without(self, h: usize) -> Self {
        IndexSet(self.0 & !(1 << (h - 1)))
    }

    pub fn contains(self, h: usize) -> bool {
        h >= 1 && self.0 & (1 << (h - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        IndexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        IndexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        IndexSet(self.0 & !o.0)
    }

    pub fn sym_diff(self, o: Self) -> Self {
        IndexSet(self.0 ^ o.0)
    }

    pub fn complement(self, n: usize) -> Self {
        Self::full(n).difference(self)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros() as usize)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Whether the set is `{1, ..., m}` for some `m >= 0`.
    pub fn is_initial_interval(self) -> bool {
        self.0 & (self.0.wrapping_add(1)) == 0
    }

    /// `(-1)^{|self|}`.
    pub fn sign(self) -> f64 {
        if self.len().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32)
            .filter(move |b| self.0 & (1 << b) != 0)
            .map(|b| b + 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(IndexSet(cur))
        })
    }

    /// All subsets of `{1, ..., n}`.
    pub fn all(n: usize) -> impl Iterator<Item = IndexSet> {
        (0..(1u32 << n)).map(IndexSet)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, h) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::domain(format!(
            "variable count {n} outside the supported range 1..={MAX_VARS}"
        )));
    }
    Ok(())
}

pub(crate) fn check_var(h: usize, n: usize) -> Result<()> {
    if h == 0 || h > n {
        return Err(Error::domain(format!(
            "variable index {h} out of range 1..={n}"
        )));
    }
    Ok(())
}

pub(crate) fn check_set(s: IndexSet, n: usize) -> Result<()> {
    if !s.is_subset(IndexSet::full(n)) {
        return Err(Error::domain(format!(
            "index set {s} has a variable index out of range 1..={n}"
        )));
    }
    Ok(())
}
