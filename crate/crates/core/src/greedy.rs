//! Greedy sets.
//!
//! A set `A` is greedy for `f` when `|a_n| ≥ |a_k|` for every `n ∈ A` and
//! `k ∉ A`. Grouping the support by modulus gives levels; a greedy subset of
//! the support is always some leading run of whole levels plus an arbitrary
//! part of the next level.

use itertools::Itertools;

use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet};

/// Default limit on how many sets [`GreedySubsets::materialize`] will collect.
pub const DEFAULT_MATERIALIZE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GreedyError {
    #[error("size exceeds support ({size} > {support})")]
    SizeExceedsSupport { size: usize, support: usize },
    #[error("not a greedy set")]
    NotGreedy,
    #[error("{count} greedy sets exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub modulus: Scalar,
    pub members: IndexSet,
}

/// Support of `f` split into levels of equal modulus, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GreedyFamily {
    pub levels: Vec<Level>,
}

impl GreedyFamily {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Union of the first `count` levels.
    pub fn prefix(&self, count: usize) -> IndexSet {
        self.levels[..count].iter().fold(IndexSet::new(), |acc, l| acc.union(&l.members))
    }

    /// Number of greedy subsets of the support.
    pub fn count(&self) -> u128 {
        self.levels.iter().map(|l| (1u128 << l.members.len().min(127)) - 1).fold(1u128, u128::saturating_add)
    }
}

pub fn greedy_family(f: &FinSeq) -> GreedyFamily {
    let mut order: Vec<(Scalar, usize)> = f.iter().map(|(n, v)| (v.abs(), n)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut levels = Vec::new();
    for (modulus, group) in &order.into_iter().chunk_by(|(m, _)| m.clone()) {
        levels.push(Level { modulus, members: group.map(|(_, n)| n).collect() });
    }
    GreedyFamily { levels }
}

/// The unrestricted definition: indices outside the support count as zero.
pub fn is_greedy_set(f: &FinSeq, set: &IndexSet) -> bool {
    if set.is_empty() {
        return true;
    }
    let inside_min = set.iter().map(|n| f.coeff(n).abs()).min().unwrap_or_else(Scalar::zero);
    let outside_max =
        f.iter().filter(|(n, _)| !set.contains(*n)).map(|(_, v)| v.abs()).max().unwrap_or_else(Scalar::zero);
    inside_min >= outside_max
}

/// Streaming enumeration of the greedy subsets of the support of a fixed size.
pub struct GreedySubsets {
    prefix: IndexSet,
    boundary: Vec<usize>,
    take: usize,
    combos: Option<itertools::Combinations<std::vec::IntoIter<usize>>>,
}

impl GreedySubsets {
    /// Number of sets this enumerator yields in total.
    pub fn count_all(&self) -> u128 {
        binomial(self.boundary.len() as u128, self.take as u128)
    }

    pub fn materialize(self, cap: usize) -> Result<Vec<IndexSet>, GreedyError> {
        let count = self.count_all();
        if count > cap as u128 {
            return Err(GreedyError::CapExceeded { count, cap });
        }
        Ok(self.collect())
    }
}

impl Iterator for GreedySubsets {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        if self.combos.is_none() {
            self.combos = Some(self.boundary.clone().into_iter().combinations(self.take));
        }
        let chosen = self.combos.as_mut()?.next()?;
        Some(self.prefix.union(&chosen.into_iter().collect()))
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All greedy `A ⊆ supp(f)` with `|A| = m`.
pub fn greedy_sets_of_size(f: &FinSeq, m: usize) -> Result<GreedySubsets, GreedyError> {
    let support = f.support_len();
    if m > support {
        return Err(GreedyError::SizeExceedsSupport { size: m, support });
    }
    let family = greedy_family(f);
    let mut before = 0;
    let mut prefix = IndexSet::new();
    for level in &family.levels {
        let size = level.members.len();
        if m <= before + size && m > before {
            return Ok(GreedySubsets {
                prefix,
                boundary: level.members.iter().collect(),
                take: m - before,
                combos: None,
            });
        }
        before += size;
        prefix = prefix.union(&level.members);
    }
    // m = 0, or the zero sequence.
    Ok(GreedySubsets { prefix: IndexSet::new(), boundary: Vec::new(), take: 0, combos: None })
}

/// Every greedy subset of the support, each exactly once.
pub fn all_greedy_sets(f: &FinSeq) -> impl Iterator<Item = IndexSet> {
    let family = greedy_family(f);
    let support = f.support();
    let mut per_level = Vec::new();
    let mut prefix = IndexSet::new();
    for level in family.levels {
        per_level.push((prefix.clone(), level.members.iter().collect::<Vec<_>>()));
        prefix = prefix.union(&level.members);
    }
    per_level
        .into_iter()
        .flat_map(|(prefix, members)| {
            let full = members.len();
            members
                .into_iter()
                .powerset()
                .filter(move |s| s.len() < full)
                .map(move |s| prefix.union(&s.into_iter().collect()))
        })
        .chain(std::iter::once(support))
}

/// Support indices by decreasing modulus, ties by index; every prefix is a greedy set.
pub fn greedy_order(f: &FinSeq) -> Vec<usize> {
    greedy_family(f).levels.into_iter().flat_map(|l| l.members.iter().collect::<Vec<_>>()).collect()
}

/// The nested greedy sets `A_0 = ∅ ⊂ A_1 ⊂ … ⊂ supp(f)` with `|A_m| = m`.
pub fn greedy_chain(f: &FinSeq) -> impl Iterator<Item = IndexSet> {
    let order = greedy_order(f);
    (0..=order.len()).map(move |m| order[..m].iter().copied().collect())
}

/// Largest greedy set of `f` inside `⟦1, k⟧`, intersected with the support.
pub fn max_greedy_within(f: &FinSeq, k: usize) -> IndexSet {
    let window = IndexSet::range(1, k);
    let mut acc = IndexSet::new();
    for level in greedy_family(f).levels {
        if level.members.last().is_some_and(|m| m <= k) {
            acc = acc.union(&level.members);
        } else {
            return acc.union(&level.members.intersection(&window));
        }
    }
    acc
}

/// `f − S_A(f)` for a greedy `A`.
pub fn tga_residual(f: &FinSeq, set: &IndexSet) -> Result<FinSeq, GreedyError> {
    if !is_greedy_set(f, set) {
        return Err(GreedyError::NotGreedy);
    }
    Ok(f.remove(set))
}
