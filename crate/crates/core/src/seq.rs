//! Finitely supported sequences and the index objects that act on them.
//!
//! Indices are 1-based. A [`FinSeq`] stores only its nonzero entries in
//! increasing index order, so the stored indices are exactly the support.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("indices are 1-based; got 0")]
    ZeroIndex,
    #[error("indices must be strictly increasing ({prev} then {next})")]
    NotIncreasing { prev: usize, next: usize },
    #[error("index map is not injective: {a} and {b} both map to {image}")]
    NonInjective { a: usize, b: usize, image: usize },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: usize, hi: usize },
}

/// Finite set of positive integers, kept sorted and deduplicated.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new() -> IndexSet {
        IndexSet(Vec::new())
    }

    /// From an already sorted, duplicate-free vector.
    pub(crate) fn from_sorted(v: Vec<usize>) -> IndexSet {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        IndexSet(v)
    }

    /// `⟦lo, hi⟧`, empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> IndexSet {
        IndexSet((lo.max(1)..=hi).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            if a < b {
                out.push(a);
                i += 1;
            } else if b < a {
                out.push(b);
                j += 1;
            } else {
                out.push(a);
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        IndexSet(out)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|&n| other.contains(n)).collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|&n| !other.contains(n)).collect())
    }

    pub fn symmetric_difference(&self, other: &IndexSet) -> IndexSet {
        self.difference(other).union(&other.difference(self))
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.iter().all(|n| other.contains(n))
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().filter(|&n| n > 0).collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

impl From<&[usize]> for IndexSet {
    fn from(v: &[usize]) -> Self {
        v.iter().copied().collect()
    }
}

impl<const N: usize> From<[usize; N]> for IndexSet {
    fn from(v: [usize; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// The integer interval `⟦lo, hi⟧` with `1 ≤ lo ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntInterval {
    lo: usize,
    hi: usize,
}

impl IntInterval {
    pub fn new(lo: usize, hi: usize) -> Result<IntInterval, SeqError> {
        if lo == 0 || lo > hi {
            return Err(SeqError::InvalidInterval { lo, hi });
        }
        Ok(IntInterval { lo, hi })
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: usize) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn to_set(&self) -> IndexSet {
        IndexSet::range(self.lo, self.hi)
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `sgn` with the convention `sgn(0) = +1`.
    pub fn of(x: &Scalar) -> Sign {
        if x.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn apply(self, x: &Scalar) -> Scalar {
        match self {
            Sign::Plus => x.clone(),
            Sign::Minus => -x,
        }
    }

    pub fn to_scalar(self) -> Scalar {
        self.apply(&Scalar::one())
    }
}

/// Partial map from indices to ±1, reading `+1` off its domain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignVector(BTreeMap<usize, Sign>);

impl SignVector {
    /// All `+1`.
    pub fn plus() -> SignVector {
        SignVector(BTreeMap::new())
    }

    /// Signs for indices `1, 2, ...` in order.
    pub fn from_signs<I: IntoIterator<Item = Sign>>(signs: I) -> SignVector {
        SignVector(signs.into_iter().enumerate().filter(|(_, s)| *s == Sign::Minus).map(|(i, s)| (i + 1, s)).collect())
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Sign)>>(pairs: I) -> SignVector {
        SignVector(pairs.into_iter().filter(|(_, s)| *s == Sign::Minus).collect())
    }

    /// `(−1)^{n−1}` on `⟦1, len⟧`.
    pub fn alternating(len: usize) -> SignVector {
        SignVector((2..=len).step_by(2).map(|n| (n, Sign::Minus)).collect())
    }

    /// The sign pattern `ε(f)` of a sequence.
    pub fn of_seq(f: &FinSeq) -> SignVector {
        SignVector::from_pairs(f.iter().map(|(n, v)| (n, Sign::of(v))))
    }

    pub fn get(&self, n: usize) -> Sign {
        self.0.get(&n).copied().unwrap_or(Sign::Plus)
    }
}

/// A finite injective index map, extended by the identity off its domain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection(BTreeMap<usize, usize>);

impl Injection {
    pub fn identity() -> Injection {
        Injection(BTreeMap::new())
    }

    /// Rejects zero indices, repeated sources and repeated images.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Injection, SeqError> {
        let mut map = BTreeMap::new();
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (a, b) in pairs {
            if a == 0 || b == 0 {
                return Err(SeqError::ZeroIndex);
            }
            if let Some(prev) = map.insert(a, b) {
                if prev != b {
                    return Err(SeqError::NonInjective { a, b: a, image: b });
                }
            }
            if let Some(&other) = seen.get(&b) {
                if other != a {
                    return Err(SeqError::NonInjective { a: other, b: a, image: b });
                }
            }
            seen.insert(b, a);
        }
        Ok(Injection(map))
    }

    /// `start + i ↦ images[i]`.
    pub fn from_images(start: usize, images: &[usize]) -> Result<Injection, SeqError> {
        Injection::from_pairs(images.iter().enumerate().map(|(i, &b)| (start + i, b)))
    }

    pub fn apply(&self, n: usize) -> usize {
        self.0.get(&n).copied().unwrap_or(n)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&a, &b)| (a, b))
    }
}

/// A finitely supported rational sequence.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FinSeq {
    entries: Vec<(usize, Scalar)>,
}

impl FinSeq {
    pub fn zero() -> FinSeq {
        FinSeq::default()
    }

    /// Entries in strictly increasing index order; zero values are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Scalar)>>(pairs: I) -> Result<FinSeq, SeqError> {
        let mut entries = Vec::new();
        let mut prev = 0usize;
        for (n, v) in pairs {
            if n == 0 {
                return Err(SeqError::ZeroIndex);
            }
            if n <= prev {
                return Err(SeqError::NotIncreasing { prev, next: n });
            }
            prev = n;
            if !v.is_zero() {
                entries.push((n, v));
            }
        }
        Ok(FinSeq { entries })
    }

    /// Entries keyed by index.
    pub fn from_map(map: BTreeMap<usize, Scalar>) -> Result<FinSeq, SeqError> {
        FinSeq::from_pairs(map)
    }

    /// `values[i]` placed at index `i + 1`.
    pub fn from_dense<I: IntoIterator<Item = Scalar>>(values: I) -> FinSeq {
        FinSeq {
            entries: values.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i + 1, v)).collect(),
        }
    }

    pub fn from_ints(values: &[i64]) -> FinSeq {
        FinSeq::from_dense(values.iter().map(|&v| Scalar::from_int(v)))
    }

    /// The unit vector `e_n`.
    pub fn unit(n: usize) -> FinSeq {
        assert!(n > 0, "indices are 1-based");
        FinSeq { entries: vec![(n, Scalar::one())] }
    }

    /// `𝟙_{ε,A}`.
    pub fn signed_indicator(signs: &SignVector, set: &IndexSet) -> FinSeq {
        FinSeq { entries: set.iter().map(|n| (n, signs.get(n).to_scalar())).collect() }
    }

    /// `𝟙_A`.
    pub fn indicator(set: &IndexSet) -> FinSeq {
        FinSeq::signed_indicator(&SignVector::plus(), set)
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, &Scalar)> + ExactSizeIterator + '_ {
        self.entries.iter().map(|(n, v)| (*n, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> IndexSet {
        IndexSet::from_sorted(self.entries.iter().map(|(n, _)| *n).collect())
    }

    /// Largest index in the support, or 0 for the zero sequence.
    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |(n, _)| *n)
    }

    /// `a_n`, zero off the support.
    pub fn coeff(&self, n: usize) -> Scalar {
        match self.entries.binary_search_by_key(&n, |(i, _)| *i) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    /// `𝟙*_A(f)`.
    pub fn sum_over(&self, set: &IndexSet) -> Scalar {
        self.iter().filter(|(n, _)| set.contains(*n)).map(|(_, v)| v).sum()
    }

    pub fn sum_interval(&self, interval: &IntInterval) -> Scalar {
        self.iter().filter(|(n, _)| interval.contains(*n)).map(|(_, v)| v).sum()
    }

    /// Sum of all entries.
    pub fn total(&self) -> Scalar {
        self.entries.iter().map(|(_, v)| v).sum()
    }

    /// `S_A(f)`.
    pub fn project(&self, set: &IndexSet) -> FinSeq {
        FinSeq { entries: self.entries.iter().filter(|(n, _)| set.contains(*n)).cloned().collect() }
    }

    pub fn project_interval(&self, interval: &IntInterval) -> FinSeq {
        FinSeq { entries: self.entries.iter().filter(|(n, _)| interval.contains(*n)).cloned().collect() }
    }

    /// `f − S_A(f)`.
    pub fn remove(&self, set: &IndexSet) -> FinSeq {
        FinSeq { entries: self.entries.iter().filter(|(n, _)| !set.contains(*n)).cloned().collect() }
    }

    /// `M_τ(f)`.
    pub fn multiply(&self, signs: &SignVector) -> FinSeq {
        FinSeq { entries: self.entries.iter().map(|(n, v)| (*n, signs.get(*n).apply(v))).collect() }
    }

    /// `P_π(f)`; fails if two support indices land on the same image.
    pub fn permute(&self, map: &Injection) -> Result<FinSeq, SeqError> {
        let mut out: BTreeMap<usize, (usize, Scalar)> = BTreeMap::new();
        for (n, v) in self.iter() {
            let image = map.apply(n);
            if let Some((other, _)) = out.insert(image, (n, v.clone())) {
                return Err(SeqError::NonInjective { a: other, b: n, image });
            }
        }
        Ok(FinSeq { entries: out.into_iter().map(|(i, (_, v))| (i, v)).collect() })
    }

    /// Moduli of the support in nonincreasing order; `D(f)(m)` is entry `m − 1`.
    pub fn dec_rearrangement(&self) -> Vec<Scalar> {
        let mut d: Vec<Scalar> = self.entries.iter().map(|(_, v)| v.abs()).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn scale(&self, c: &Scalar) -> FinSeq {
        if c.is_zero() {
            return FinSeq::zero();
        }
        FinSeq { entries: self.entries.iter().map(|(n, v)| (*n, v * c)).collect() }
    }

    /// Shifts every index by `offset` to the right.
    pub fn shift(&self, offset: usize) -> FinSeq {
        FinSeq { entries: self.entries.iter().map(|(n, v)| (n + offset, v.clone())).collect() }
    }

    pub fn l1(&self) -> Scalar {
        self.entries.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn linf(&self) -> Scalar {
        self.entries.iter().map(|(_, v)| v.abs()).max().unwrap_or_else(Scalar::zero)
    }

    /// Dense values on `⟦1, len⟧`.
    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (n, v) in self.iter() {
            if n <= len {
                out[n - 1] = v.clone();
            }
        }
        out
    }

    fn merge(&self, other: &FinSeq, negate_other: bool) -> FinSeq {
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let rhs = |v: &Scalar| if negate_other { -v } else { v.clone() };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                entries.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                entries.push((b[j].0, rhs(&b[j].1)));
                j += 1;
            } else {
                let v = if negate_other { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !v.is_zero() {
                    entries.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        FinSeq { entries }
    }
}

impl Add for &FinSeq {
    type Output = FinSeq;
    fn add(self, rhs: &FinSeq) -> FinSeq {
        self.merge(rhs, false)
    }
}

impl Add for FinSeq {
    type Output = FinSeq;
    fn add(self, rhs: FinSeq) -> FinSeq {
        self.merge(&rhs, false)
    }
}

impl Sub for &FinSeq {
    type Output = FinSeq;
    fn sub(self, rhs: &FinSeq) -> FinSeq {
        self.merge(rhs, true)
    }
}

impl Sub for FinSeq {
    type Output = FinSeq;
    fn sub(self, rhs: FinSeq) -> FinSeq {
        self.merge(&rhs, true)
    }
}

impl Neg for &FinSeq {
    type Output = FinSeq;
    fn neg(self) -> FinSeq {
        FinSeq { entries: self.entries.iter().map(|(n, v)| (*n, -v)).collect() }
    }
}

impl Neg for FinSeq {
    type Output = FinSeq;
    fn neg(self) -> FinSeq {
        -&self
    }
}

impl fmt::Debug for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(n, v)| (n, v))).finish()
    }
}

impl fmt::Display for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (n, v)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for FinSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            entries: &'a [(usize, Scalar)],
        }
        Wire { entries: &self.entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinSeq {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            entries: Vec<(usize, Scalar)>,
        }
        let wire = Wire::deserialize(deserializer)?;
        FinSeq::from_pairs(wire.entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn coeff_and_sums() {
        let f = FinSeq::from_ints(&[3, 1, 2]);
        assert_eq!(f.coeff(3), Scalar::from_int(2));
        assert_eq!(f.coeff(7), Scalar::zero());
        assert_eq!(FinSeq::zero().coeff(1), Scalar::zero());
        assert_eq!(f.sum_over(&IndexSet::from([1, 3])), Scalar::from_int(5));
        let g = FinSeq::from_ints(&[4, -3, 2, -1]);
        assert_eq!(g.sum_over(&IndexSet::from([2, 4])), Scalar::from_int(-4));
        assert_eq!(g.sum_over(&IndexSet::new()), Scalar::zero());
    }

    #[test]
    fn projections() {
        let f = FinSeq::from_ints(&[3, 1, 2]);
        assert_eq!(f.project(&IndexSet::from([2])), FinSeq::from_ints(&[0, 1, 0]));
        assert_eq!(f.project(&IndexSet::range(1, 9)), f);
        assert!(f.project(&IndexSet::new()).is_zero());
    }

    #[test]
    fn multiply_and_permute() {
        let f = FinSeq::from_ints(&[4, 3, 2, 1]);
        let tau = SignVector::alternating(4);
        assert_eq!(f.multiply(&tau), FinSeq::from_ints(&[4, -3, 2, -1]));
        assert_eq!(f.permute(&Injection::identity()).unwrap(), f);
        let g = FinSeq::from_ints(&[1, 2]);
        let pi = Injection::from_pairs([(1, 2), (2, 5)]).unwrap();
        let moved = g.permute(&pi).unwrap();
        assert_eq!(moved.coeff(2), Scalar::from_int(1));
        assert_eq!(moved.coeff(5), Scalar::from_int(2));
        assert_eq!(moved.support_len(), 2);
        assert!(Injection::from_pairs([(1, 3), (2, 3)]).is_err());
        // Image collides with an unmoved support index.
        let h = FinSeq::from_ints(&[1, 0, 1]);
        let onto_three = Injection::from_pairs([(1, 3)]).unwrap();
        assert!(h.permute(&onto_three).is_err());
    }

    #[test]
    fn rearrangement() {
        assert_eq!(FinSeq::from_ints(&[3, 1, 2]).dec_rearrangement(), vec![3.into(), 2.into(), 1.into()]);
        assert!(FinSeq::zero().dec_rearrangement().is_empty());
        assert_eq!(FinSeq::from_ints(&[1, -1, 1, -1]).dec_rearrangement(), vec![Scalar::one(); 4]);
    }

    #[test]
    fn indicators() {
        assert_eq!(FinSeq::indicator(&IndexSet::range(1, 3)), FinSeq::from_ints(&[1, 1, 1]));
        let eps = SignVector::from_signs([Sign::Plus, Sign::Minus]);
        assert_eq!(FinSeq::signed_indicator(&eps, &IndexSet::range(1, 2)), FinSeq::from_ints(&[1, -1]));
        assert!(FinSeq::indicator(&IndexSet::new()).is_zero());
    }

    #[test]
    fn arithmetic_cancels() {
        let f = FinSeq::from_dense([q(1, 2), q(-1, 3)]);
        assert!((&f - &f).is_zero());
        assert_eq!(&f + &f, f.scale(&Scalar::from_int(2)));
    }

    #[test]
    fn validation() {
        assert_eq!(FinSeq::from_pairs([(0, Scalar::one())]), Err(SeqError::ZeroIndex));
        assert!(FinSeq::from_pairs([(2, Scalar::one()), (2, Scalar::one())]).is_err());
        assert!(IntInterval::new(3, 2).is_err());
        assert!(IntInterval::new(0, 2).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = FinSeq::from_pairs([(2, q(-3, 4)), (9, q(5, 1))]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"entries":[[2,"-3/4"],[9,"5"]]}"#);
        assert_eq!(serde_json::from_str::<FinSeq>(&text).unwrap(), f);
    }
}
