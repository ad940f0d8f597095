//! Leibnizian data: nonnegative sequences grouped into right-dominant blocks
//! with nonincreasing block sums and strict separation between blocks.

use serde::Serialize;

use super::ConstructionError;
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, IntInterval, Sign, SignVector};

/// The first failed clause of the Leibniz conditions. Blocks are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LeibnizViolation {
    #[error("entry at index {index} is negative")]
    Negative { index: usize },
    #[error("block {block} does not end before block {next} starts")]
    NotRightDominant { block: usize, next: usize },
    #[error("index {index} of the support lies in no block")]
    Uncovered { index: usize },
    #[error("block sum of block {next} exceeds that of block {block}")]
    SumsIncreasing { block: usize, next: usize },
    #[error("entry at {left} in block {block} is not above entry at {right} in the next block")]
    Separation { block: usize, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeibnizData {
    pub g: FinSeq,
    pub blocks: Vec<IntInterval>,
    /// First block sum.
    pub alpha: Scalar,
    /// Last block sum.
    pub omega_trunc: Scalar,
}

impl LeibnizData {
    pub fn block_sums(&self) -> Vec<Scalar> {
        self.blocks.iter().map(|b| self.g.sum_interval(b)).collect()
    }

    /// Indices kept from the input of [`build_admissible`].
    pub fn selected(&self) -> IndexSet {
        self.g.support()
    }

    /// `(−1)^{k−1}` on the `k`-th block.
    pub fn block_signs(&self) -> SignVector {
        SignVector::from_pairs(
            self.blocks
                .iter()
                .enumerate()
                .filter(|(k, _)| k % 2 == 1)
                .flat_map(|(_, b)| (b.lo()..=b.hi()).map(|n| (n, Sign::Minus))),
        )
    }
}

pub fn leibniz_check(g: &FinSeq, blocks: &[IntInterval]) -> Result<LeibnizData, ConstructionError> {
    if let Some((index, _)) = g.iter().find(|(_, v)| v.is_negative()) {
        return Err(LeibnizViolation::Negative { index }.into());
    }
    for (k, pair) in blocks.windows(2).enumerate() {
        if pair[0].hi() >= pair[1].lo() {
            return Err(LeibnizViolation::NotRightDominant { block: k + 1, next: k + 2 }.into());
        }
    }
    if let Some((index, _)) = g.iter().find(|&(n, _)| !blocks.iter().any(|b| b.contains(n))) {
        return Err(LeibnizViolation::Uncovered { index }.into());
    }
    let sums: Vec<Scalar> = blocks.iter().map(|b| g.sum_interval(b)).collect();
    for (k, pair) in sums.windows(2).enumerate() {
        if pair[1] > pair[0] {
            return Err(LeibnizViolation::SumsIncreasing { block: k + 1, next: k + 2 }.into());
        }
    }
    for (k, pair) in blocks.windows(2).enumerate() {
        let low = g.project_interval(&pair[0]).iter().min_by(|a, b| a.1.cmp(b.1)).map(|(n, v)| (n, v.clone()));
        let Some((left, low)) = low else { continue };
        // An empty intersection leaves only zeros in the next block.
        let next = &pair[1];
        let (right, high) = g
            .project_interval(next)
            .iter()
            .max_by(|a, b| a.1.cmp(b.1))
            .map(|(n, v)| (n, v.clone()))
            .unwrap_or((next.lo(), Scalar::zero()));
        if low <= high {
            return Err(LeibnizViolation::Separation { block: k + 1, left, right }.into());
        }
    }
    Ok(LeibnizData {
        g: g.clone(),
        blocks: blocks.to_vec(),
        alpha: sums.first().cloned().unwrap_or_else(Scalar::zero),
        omega_trunc: sums.last().cloned().unwrap_or_else(Scalar::zero),
    })
}

/// Flips the sign of every other block; the `𝔹` norm of the result is `α`.
pub fn alternating_from_leibniz(data: &LeibnizData) -> FinSeq {
    data.g.multiply(&data.block_signs())
}

/// Keeps the blocks listed in `selection` (numbered from 1), alternating signs
/// over them in ascending order.
pub fn leibniz_subfamily(data: &LeibnizData, selection: &IndexSet) -> Result<FinSeq, ConstructionError> {
    let count = data.blocks.len();
    if let Some(block) = selection.iter().find(|&k| k == 0 || k > count) {
        return Err(ConstructionError::BlockOutOfRange { block, count });
    }
    let mut pairs = Vec::new();
    for (j, k) in selection.iter().enumerate() {
        let sign = if j % 2 == 0 { Sign::Plus } else { Sign::Minus };
        for (n, v) in data.g.project_interval(&data.blocks[k - 1]).iter() {
            pairs.push((n, sign.apply(v)));
        }
    }
    Ok(FinSeq::from_pairs(pairs).expect("blocks are disjoint and ordered"))
}

/// Chooses runs of consecutive support entries of a nonincreasing `g` whose
/// sums fall in `[t(1+2^{−k}), t(1+2^{−k}+2^{−k−2})]` for `k = 1..=depth`.
pub fn build_admissible(g: &FinSeq, t: &Scalar, depth: usize) -> Result<LeibnizData, ConstructionError> {
    if !t.is_positive() {
        return Err(ConstructionError::NonPositiveTarget);
    }
    if let Some((index, _)) = g.iter().find(|(_, v)| !v.is_positive()) {
        return Err(LeibnizViolation::Negative { index }.into());
    }
    if let Some(w) = g.entries().windows(2).find(|w| w[1].1 > w[0].1) {
        return Err(ConstructionError::NotNonincreasing { index: w[1].0 });
    }
    let entries = g.entries();
    let mut pos = 0;
    let mut floor: Option<&Scalar> = None;
    let mut blocks = Vec::with_capacity(depth);
    let mut kept = Vec::new();
    for k in 1..=depth {
        let step = t * &Scalar::from_int(2).pow(k as u32).recip().expect("nonzero");
        let lo = t + &step;
        let hi = &lo + &(&step / &Scalar::from_int(4));
        while let (Some(bound), Some((_, v))) = (floor, entries.get(pos)) {
            if v < bound {
                break;
            }
            pos += 1;
        }
        let (mut start, mut end) = (pos, pos);
        let mut sum = Scalar::zero();
        loop {
            if end > start && sum >= lo && sum <= hi {
                break;
            }
            if sum < lo {
                let Some((_, v)) = entries.get(end) else {
                    return Err(ConstructionError::InsufficientTailMass { found: k - 1, wanted: depth });
                };
                sum += v;
                end += 1;
            } else {
                sum -= &entries[start].1;
                start += 1;
            }
        }
        blocks.push(IntInterval::new(entries[start].0, entries[end - 1].0).expect("ordered support"));
        kept.extend_from_slice(&entries[start..end]);
        floor = Some(&entries[end - 1].1);
        pos = end;
    }
    let selected = FinSeq::from_pairs(kept).expect("ordered support");
    leibniz_check(&selected, &blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::norm_b;

    fn singletons(len: usize) -> Vec<IntInterval> {
        (1..=len).map(|n| IntInterval::new(n, n).unwrap()).collect()
    }

    #[test]
    fn decreasing_sequence_with_singletons() {
        let data = leibniz_check(&FinSeq::from_ints(&[4, 3, 2, 1]), &singletons(4)).unwrap();
        assert_eq!(data.alpha, Scalar::from_int(4));
        assert_eq!(data.omega_trunc, Scalar::from_int(1));
        let f = alternating_from_leibniz(&data);
        assert_eq!(f, FinSeq::from_ints(&[4, -3, 2, -1]));
        assert_eq!(norm_b(&f), Scalar::from_int(4));
    }

    #[test]
    fn rejections_name_the_clause() {
        let err = leibniz_check(&FinSeq::from_ints(&[1, 3]), &singletons(2)).unwrap_err();
        assert!(matches!(err, ConstructionError::Leibniz(LeibnizViolation::SumsIncreasing { block: 1, next: 2 })));
        let err = leibniz_check(&FinSeq::from_ints(&[2, 2]), &singletons(2)).unwrap_err();
        assert!(matches!(err, ConstructionError::Leibniz(LeibnizViolation::Separation { .. })));
        let err = leibniz_check(&FinSeq::from_ints(&[1, -1]), &singletons(2)).unwrap_err();
        assert!(matches!(err, ConstructionError::Leibniz(LeibnizViolation::Negative { index: 2 })));
        let err = leibniz_check(&FinSeq::from_ints(&[1, 0, 1]), &singletons(2)).unwrap_err();
        assert!(matches!(err, ConstructionError::Leibniz(LeibnizViolation::Uncovered { index: 3 })));
        let overlapping = vec![IntInterval::new(1, 2).unwrap(), IntInterval::new(2, 3).unwrap()];
        let err = leibniz_check(&FinSeq::from_ints(&[1]), &overlapping).unwrap_err();
        assert!(matches!(err, ConstructionError::Leibniz(LeibnizViolation::NotRightDominant { .. })));
    }

    #[test]
    fn zero_sequence_is_valid() {
        let data = leibniz_check(&FinSeq::zero(), &singletons(3)).unwrap();
        assert!(data.alpha.is_zero());
        assert!(alternating_from_leibniz(&data).is_zero());
    }

    #[test]
    fn zero_after_positive_block_needs_positive_minimum() {
        let blocks = vec![IntInterval::new(1, 1).unwrap(), IntInterval::new(2, 3).unwrap()];
        assert!(leibniz_check(&FinSeq::from_ints(&[2, 0, 1]), &blocks).is_ok());
    }

    #[test]
    fn two_blocks() {
        let blocks = vec![IntInterval::new(1, 2).unwrap(), IntInterval::new(3, 4).unwrap()];
        let data = leibniz_check(&FinSeq::from_ints(&[2, 2, 1, 1]), &blocks).unwrap();
        let f = alternating_from_leibniz(&data);
        assert_eq!(f, FinSeq::from_ints(&[2, 2, -1, -1]));
        assert_eq!(norm_b(&f), Scalar::from_int(4));
    }

    #[test]
    fn subfamily_selection() {
        let data = leibniz_check(&FinSeq::from_ints(&[4, 3, 2, 1]), &singletons(4)).unwrap();
        let f13 = leibniz_subfamily(&data, &IndexSet::from([1, 3])).unwrap();
        assert_eq!(f13, FinSeq::from_ints(&[4, 0, -2, 0]));
        let f1 = leibniz_subfamily(&data, &IndexSet::from([1])).unwrap();
        assert_eq!(norm_b(&(&f13 - &f1)), Scalar::from_int(2));
        let all = leibniz_subfamily(&data, &IndexSet::range(1, 4)).unwrap();
        assert_eq!(all, alternating_from_leibniz(&data));
        assert!(matches!(
            leibniz_subfamily(&data, &IndexSet::from([5])),
            Err(ConstructionError::BlockOutOfRange { block: 5, count: 4 })
        ));
    }

    #[test]
    fn admissible_blocks_from_harmonic_tail() {
        let g = FinSeq::from_dense((1..=5000).map(|n| Scalar::ratio(1, n)));
        let data = build_admissible(&g, &Scalar::one(), 3).unwrap();
        assert_eq!(data.blocks.len(), 3);
        for (k, sum) in data.block_sums().iter().enumerate() {
            let step = Scalar::ratio(1, 1 << (k + 1));
            let lo = Scalar::one() + step.clone();
            let hi = &lo + &(step / Scalar::from_int(4));
            assert!(*sum >= lo && *sum <= hi, "block {} sum {sum}", k + 1);
        }
        assert_eq!(data.blocks[0], IntInterval::new(1, 2).unwrap());
    }

    #[test]
    fn admissible_failures() {
        let g = FinSeq::from_dense((1..=4).map(|n| Scalar::ratio(1, 8 * n)));
        assert!(matches!(
            build_admissible(&g, &Scalar::one(), 1),
            Err(ConstructionError::InsufficientTailMass { found: 0, wanted: 1 })
        ));
        assert!(matches!(
            build_admissible(&FinSeq::from_ints(&[1, 2]), &Scalar::one(), 1),
            Err(ConstructionError::NotNonincreasing { index: 2 })
        ));
        let empty = build_admissible(&g, &Scalar::one(), 0).unwrap();
        assert!(empty.blocks.is_empty() && empty.g.is_zero());
    }
}
