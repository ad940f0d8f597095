//! The greedy-sum gauge `‖f‖_𝔸 = max_A |σ_g(f, A)|` over greedy `A`.

use serde::Serialize;

use super::bnorm::entry_levels;
use super::{OracleError, DEFAULT_ORACLE_CAP};
use crate::greedy::all_greedy_sets;
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet};

/// `σ_g(f)`: on a finite support the greedy net settles at the full sum.
pub fn sigma_g(f: &FinSeq) -> Scalar {
    f.total()
}

/// `σ_g(f, A) = σ_g(f) − 𝟙*_A(f)`.
pub fn sigma_g_defect(f: &FinSeq, set: &IndexSet) -> Scalar {
    sigma_g(f) - f.sum_over(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AWitness {
    pub value: Scalar,
    pub greedy_set: IndexSet,
}

pub fn norm_a_witness(f: &FinSeq) -> AWitness {
    let (levels, count) = entry_levels(f);
    let mut pos = vec![Scalar::zero(); count];
    let mut neg = vec![Scalar::zero(); count];
    for ((_, v), &lev) in f.iter().zip(&levels) {
        if v.is_positive() {
            pos[lev] += v;
        } else {
            neg[lev] += v;
        }
    }
    let mut best = Scalar::zero();
    let mut arg: Option<(usize, bool)> = None;
    // base = sum over the levels from `level` on.
    let mut base = Scalar::zero();
    for level in (0..count).rev() {
        base += &pos[level];
        base += &neg[level];
        let drop_negatives = (&base - &neg[level]).abs();
        let drop_positives = (&base - &pos[level]).abs();
        if drop_negatives > best {
            best = drop_negatives;
            arg = Some((level, false));
        }
        if drop_positives > best {
            best = drop_positives;
            arg = Some((level, true));
        }
    }
    let greedy_set = match arg {
        None => f.support(),
        Some((level, positive)) => f
            .iter()
            .zip(&levels)
            .filter(|((_, v), &lev)| lev < level || (lev == level && v.is_positive() == positive))
            .map(|((n, _), _)| n)
            .collect(),
    };
    AWitness { value: best, greedy_set }
}

/// `‖f‖_𝔸` level by level.
pub fn norm_a(f: &FinSeq) -> Scalar {
    norm_a_witness(f).value
}

/// `‖f‖_𝔸` by enumerating every greedy set.
pub fn norm_a_oracle(f: &FinSeq) -> Result<Scalar, OracleError> {
    norm_a_oracle_with_cap(f, DEFAULT_ORACLE_CAP)
}

pub fn norm_a_oracle_with_cap(f: &FinSeq, cap: usize) -> Result<Scalar, OracleError> {
    let support = f.support_len();
    if support > cap {
        return Err(OracleError::SupportTooLarge { support, cap });
    }
    let total = sigma_g(f);
    Ok(all_greedy_sets(f).map(|a| (&total - f.sum_over(&a)).abs()).max().unwrap_or_else(Scalar::zero))
}
