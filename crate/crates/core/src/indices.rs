//! Index-set combinatorics over the sphere indices `1..=m`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A set of sphere indices stored as a bitmask; bit `j` holds index `j`.
///
/// The empty set stands for the standard form slot `F_∅`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

pub const MAX_INDEX: usize = 31;

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_slice(items: &[usize]) -> Self {
        items.iter().fold(Self::EMPTY, |s, &j| s.with(j))
    }

    pub fn singleton(j: usize) -> Self {
        Self::EMPTY.with(j)
    }

    /// `{1, .., k}`.
    pub fn range(k: usize) -> Self {
        IndexSet(((1u64 << (k + 1)) - 2) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, j: usize) -> bool {
        j <= MAX_INDEX && self.0 & (1 << j) != 0
    }

    pub fn with(self, j: usize) -> Self {
        assert!((1..=MAX_INDEX).contains(&j), "sphere index {j} out of range");
        IndexSet(self.0 | (1 << j))
    }

    /// `∂_j J`.
    pub fn without(self, j: usize) -> Self {
        if j > MAX_INDEX {
            return self;
        }
        IndexSet(self.0 & !(1 << j))
    }

    pub fn union(self, o: Self) -> Self {
        IndexSet(self.0 | o.0)
    }

    pub fn intersect(self, o: Self) -> Self {
        IndexSet(self.0 & o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        IndexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    /// `J^c` inside `1..=m`.
    pub fn complement(self, m: usize) -> Self {
        Self::range(m).minus(self)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let b = self.0;
        (1..=MAX_INDEX).filter(move |&j| b & (1 << j) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// The `k` smallest elements.
    pub fn lowest(self, k: usize) -> Self {
        Self::from_slice(&self.to_vec()[..k.min(self.len())])
    }

    /// All subsets, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let full = self.0;
        let mut cur = Some(0u32);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some(((c | !full).wrapping_add(1)) & full) };
            Some(IndexSet(c))
        })
    }

    /// Subsets of a given size, in `(len, lex)` order.
    pub fn subsets_of_size(self, k: usize) -> Vec<IndexSet> {
        let mut v: Vec<_> = self.subsets().filter(|s| s.len() == k).collect();
        v.sort();
        v
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Self::EMPTY, |s, j| s.with(j))
    }
}

/// All `J ⊆ {1..m}` with `1 ≤ |J| ≤ n+1`, ordered by size then lexicographically.
pub fn admissible_sets(m: usize, n: usize) -> Vec<IndexSet> {
    let mut v: Vec<_> = IndexSet::range(m)
        .subsets()
        .filter(|s| !s.is_empty() && s.len() <= n + 1)
        .collect();
    v.sort();
    v
}

pub fn is_nbc(j: IndexSet, n: usize) -> bool {
    let p = j.len();
    p >= 1 && (p <= n || (p == n + 1 && j.contains(n + 1)))
}

/// The non-broken-circuit basis for the order `n+1 ≺ 1 ≺ ⋯ ≺ n ≺ n+2 ≺ ⋯ ≺ m`.
pub fn nbc_basis(m: usize, n: usize) -> Result<Vec<IndexSet>> {
    if m < n + 1 {
        return Err(Error::Invalid(format!("NBC basis needs m >= n+1, got m={m}, n={n}")));
    }
    let v: Vec<_> = admissible_sets(m, n).into_iter().filter(|&j| is_nbc(j, n)).collect();
    let expected = dimension(m, n);
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: v.len() });
    }
    Ok(v)
}

/// The basis used for cohomology computations: NBC when `m ≥ n+1`, otherwise every
/// nonempty subset (all of them are independent then).
pub fn basis(m: usize, n: usize) -> Vec<IndexSet> {
    if m >= n + 1 {
        nbc_basis(m, n).expect("NBC count matches the dimension formula")
    } else {
        admissible_sets(m, n)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn dimension(m: usize, n: usize) -> usize {
    (1..=n).map(|nu| binomial(m, nu)).sum::<usize>() + binomial(m.saturating_sub(1), n)
}

/// Every ordering of every `k`-subset of `set`.
pub fn ordered_subsets(set: IndexSet, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in set.subsets_of_size(k) {
        out.extend(permutations(&s.to_vec()));
    }
    out
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
