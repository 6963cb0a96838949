//! Multi-indices and their partitions.
//!
//! A general partial derivative `∂^α f(A(x))` decomposes into a sum of
//! higher-order Fréchet derivatives indexed by the partitions of `α` into
//! `k` nonzero multi-indices ([`s_partitions`]); the ordered variant
//! ([`t_permutations`]) drives the spectral divided-difference formula.
//!
//! Outputs are canonical: members within a partition sorted
//! lexicographically, partitions sorted by their member lists, duplicates
//! kept by explicit repetition.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Derivative orders per variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self(components)
    }

    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut c = vec![0; nvars];
        c[var] = 1;
        Self(c)
    }

    /// Converts a sequence of variable indices `d₁, …, d_k` into `α` with
    /// `α_v = #{i : dᵢ = v}`.
    pub fn from_dirs(dirs: &[usize], nvars: usize) -> Result<Self> {
        let mut c = vec![0; nvars];
        for &d in dirs {
            *c.get_mut(d).ok_or_else(|| {
                Error::InvalidArgument(format!("direction {d} out of range for {nvars} variables"))
            })? += 1;
        }
        Ok(Self(c))
    }

    /// Variable indices in ascending order, each repeated `α_v` times.
    pub fn to_dirs(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(v, &a)| std::iter::repeat_n(v, a as usize)).collect()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        Some(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// All `β` with `0 ≤ β ≤ self`, lexicographic.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::with_capacity(self.0.len()))];
        for &a in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=a).map(move |v| {
                        let mut p = prefix.0.clone();
                        p.push(v);
                        MultiIndex(p)
                    })
                })
                .collect();
        }
        out
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.0.len(), rhs.0.len(), "multi-index length mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;

    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        self.checked_sub(rhs).expect("multi-index subtraction underflow")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Accepts `2,1`, `(2,1)` or `2 1`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let comps = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("bad multi-index '{s}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if comps.is_empty() {
            return Err(Error::Parse(format!("empty multi-index '{s}'")));
        }
        Ok(MultiIndex(comps))
    }
}

/// Splits `α = β + γ` with `γ` the unit index at the last nonzero
/// coordinate.
pub fn split_last(alpha: &MultiIndex) -> Result<(MultiIndex, MultiIndex)> {
    let v = alpha.0.iter().rposition(|&a| a > 0).ok_or(Error::EmptyIndex)?;
    let gamma = MultiIndex::unit(alpha.nvars(), v);
    let beta = alpha - &gamma;
    Ok((beta, gamma))
}

/// A multiset of partitions, each a multiset of `k` nonzero multi-indices
/// summing to `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMultiset {
    pub alpha: MultiIndex,
    pub k: usize,
    pub partitions: Vec<Vec<MultiIndex>>,
}

impl PartitionMultiset {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<MultiIndex>> {
        self.partitions.iter()
    }
}

/// `S_α^k` built by the split-last recursion, in canonical order.
pub fn s_partitions(alpha: &MultiIndex, k: usize) -> PartitionMultiset {
    let mut partitions = raw_partitions(alpha, k);
    for p in &mut partitions {
        p.sort();
    }
    partitions.sort();
    PartitionMultiset { alpha: alpha.clone(), k, partitions }
}

fn raw_partitions(alpha: &MultiIndex, k: usize) -> Vec<Vec<MultiIndex>> {
    if k == 0 || k > alpha.order() {
        return Vec::new();
    }
    if k == 1 {
        return vec![vec![alpha.clone()]];
    }
    let (beta, gamma) = split_last(alpha).expect("order ≥ k ≥ 2");
    let mut out = Vec::new();
    for mut u in raw_partitions(&beta, k - 1) {
        u.push(gamma.clone());
        out.push(u);
    }
    for u in raw_partitions(&beta, k) {
        for j in 0..k {
            let mut v = u.clone();
            v[j] = &v[j] + &gamma;
            out.push(v);
        }
    }
    out
}

/// `T_α^k`: every ordering of every partition in `S_α^k`, duplicates kept,
/// so `|T_α^k| = k!·|S_α^k|`.
pub fn t_permutations(alpha: &MultiIndex, k: usize) -> Vec<Vec<MultiIndex>> {
    let s = s_partitions(alpha, k);
    let perms = index_permutations(k);
    s.partitions
        .iter()
        .flat_map(|p| perms.iter().map(move |perm| perm.iter().map(|&i| p[i].clone()).collect()))
        .collect()
}

/// All permutations of `0..k` in lexicographic order.
fn index_permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..k {
        for rest in index_permutations(k - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|r| if r >= first { r + 1 } else { r }));
            out.push(p);
        }
    }
    out
}
