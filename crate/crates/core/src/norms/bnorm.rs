//! The interval gauge `‖f‖_𝔹 = sup |𝟙*_{I∖A}(f)|` over greedy `A` and intervals `I`.

use serde::Serialize;

use super::{OracleError, DEFAULT_ORACLE_CAP};
use crate::greedy::{all_greedy_sets, greedy_family};
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, IntInterval};

/// `β(f, A) = sup_I |𝟙*_{I∖A}(f)|`: spread of the prefix sums once `A` is zeroed.
pub fn beta(f: &FinSeq, set: &IndexSet) -> Scalar {
    let mut prefix = Scalar::zero();
    let mut hi = Scalar::zero();
    let mut lo = Scalar::zero();
    for (n, v) in f.iter() {
        if set.contains(n) {
            continue;
        }
        prefix += v;
        if prefix > hi {
            hi = prefix.clone();
        } else if prefix < lo {
            lo = prefix.clone();
        }
    }
    hi - lo
}

/// An attaining pair for `‖f‖_𝔹`: `|𝟙*_{interval ∖ greedy_set}(f)| = value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BWitness {
    pub value: Scalar,
    pub greedy_set: IndexSet,
    /// `None` when the value is zero.
    pub interval: Option<IntInterval>,
}

/// Level index of each support entry, in support order.
pub(crate) fn entry_levels(f: &FinSeq) -> (Vec<usize>, usize) {
    let family = greedy_family(f);
    let moduli: Vec<Scalar> = family.levels.iter().map(|l| l.modulus.clone()).collect();
    let levels = f
        .iter()
        .map(|(_, v)| {
            let m = v.abs();
            moduli.binary_search_by(|probe| m.cmp(probe)).expect("modulus present in family")
        })
        .collect();
    (levels, moduli.len())
}

/// Largest interval sum of `sign · a_n` over entries with level above `level`
/// plus the `sign`-signed entries of `level` itself.
fn directed_scan(f: &FinSeq, levels: &[usize], level: usize, positive: bool) -> (Scalar, usize, usize) {
    let mut prefix = Scalar::zero();
    let mut min_prefix = Scalar::zero();
    let mut min_at = 0usize;
    let mut best = Scalar::zero();
    let mut span = (0, 0);
    for ((n, v), &lev) in f.iter().zip(levels) {
        let keep = lev > level || (lev == level && v.is_positive() == positive);
        if !keep {
            continue;
        }
        if positive {
            prefix += v;
        } else {
            prefix -= v;
        }
        let gain = &prefix - &min_prefix;
        if gain > best {
            best = gain;
            span = (min_at + 1, n);
        }
        if prefix < min_prefix {
            min_prefix = prefix.clone();
            min_at = n;
        }
    }
    (best, span.0, span.1)
}

/// Largest and smallest subarray sums of the active entries.
#[derive(Debug, Clone, Default)]
struct Span {
    sum: Scalar,
    pre_max: Scalar,
    suf_max: Scalar,
    best_max: Scalar,
    pre_min: Scalar,
    suf_min: Scalar,
    best_min: Scalar,
}

impl Span {
    fn leaf(v: &Scalar) -> Span {
        let hi = v.clone().max(Scalar::zero());
        let lo = v.clone().min(Scalar::zero());
        Span {
            sum: v.clone(),
            pre_max: hi.clone(),
            suf_max: hi.clone(),
            best_max: hi,
            pre_min: lo.clone(),
            suf_min: lo.clone(),
            best_min: lo,
        }
    }

    fn join(l: &Span, r: &Span) -> Span {
        Span {
            sum: &l.sum + &r.sum,
            pre_max: l.pre_max.clone().max(&l.sum + &r.pre_max),
            suf_max: r.suf_max.clone().max(&r.sum + &l.suf_max),
            best_max: l.best_max.clone().max(r.best_max.clone()).max(&l.suf_max + &r.pre_max),
            pre_min: l.pre_min.clone().min(&l.sum + &r.pre_min),
            suf_min: r.suf_min.clone().min(&r.sum + &l.suf_min),
            best_min: l.best_min.clone().min(r.best_min.clone()).min(&l.suf_min + &r.pre_min),
        }
    }
}

/// Segment tree over support positions; inactive positions hold zero.
struct SpanTree {
    width: usize,
    nodes: Vec<Span>,
}

impl SpanTree {
    fn new(len: usize) -> SpanTree {
        let width = len.next_power_of_two().max(1);
        SpanTree { width, nodes: vec![Span::default(); 2 * width] }
    }

    fn set(&mut self, pos: usize, v: &Scalar) {
        let mut i = pos + self.width;
        self.nodes[i] = Span::leaf(v);
        while i > 1 {
            i /= 2;
            self.nodes[i] = Span::join(&self.nodes[2 * i], &self.nodes[2 * i + 1]);
        }
    }

    fn root(&self) -> &Span {
        &self.nodes[1]
    }
}

/// For each level: the best interval sums with that level's negative entries
/// removed (first) and with its positive entries removed (second), all
/// larger levels removed.
fn level_values(f: &FinSeq, levels: &[usize], count: usize) -> Vec<(Scalar, Scalar)> {
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (pos, &lev) in levels.iter().enumerate() {
        by_level[lev].push(pos);
    }
    let entries = f.entries();
    let zero = Scalar::zero();
    let mut tree = SpanTree::new(entries.len());
    let mut out = vec![(Scalar::zero(), Scalar::zero()); count];
    for level in (0..count).rev() {
        let members = &by_level[level];
        let (pos, neg): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&p| entries[p].1.is_positive());
        for &p in &pos {
            tree.set(p, &entries[p].1);
        }
        let up = tree.root().best_max.clone();
        for &p in &pos {
            tree.set(p, &zero);
        }
        for &p in &neg {
            tree.set(p, &entries[p].1);
        }
        let down = -&tree.root().best_min;
        for &p in &pos {
            tree.set(p, &entries[p].1);
        }
        out[level] = (up, down);
    }
    out
}

/// `‖f‖_𝔹` with an attaining greedy set and interval.
pub fn norm_b_witness(f: &FinSeq) -> BWitness {
    let (levels, count) = entry_levels(f);
    let mut best = Scalar::zero();
    let mut arg: Option<(usize, bool)> = None;
    for (level, (up, down)) in level_values(f, &levels, count).into_iter().enumerate() {
        for (value, positive) in [(up, true), (down, false)] {
            if value > best {
                best = value;
                arg = Some((level, positive));
            }
        }
    }
    match arg {
        None => BWitness { value: best, greedy_set: f.support(), interval: None },
        Some((level, positive)) => {
            let (value, lo, hi) = directed_scan(f, &levels, level, positive);
            debug_assert_eq!(value, best);
            let greedy_set = f
                .iter()
                .zip(&levels)
                .filter(|((_, v), &lev)| lev < level || (lev == level && v.is_positive() != positive))
                .map(|((n, _), _)| n)
                .collect();
            BWitness {
                value: best,
                greedy_set,
                interval: Some(IntInterval::new(lo, hi).expect("scan yields ordered endpoints")),
            }
        }
    }
}

/// `‖f‖_𝔹` from the level decomposition, one segment-tree sweep over levels.
pub fn norm_b(f: &FinSeq) -> Scalar {
    let (levels, count) = entry_levels(f);
    level_values(f, &levels, count).into_iter().flat_map(|(up, down)| [up, down]).max().unwrap_or_else(Scalar::zero)
}

/// `‖f‖_𝔹` by enumerating every greedy set and every interval.
pub fn norm_b_oracle(f: &FinSeq) -> Result<Scalar, OracleError> {
    norm_b_oracle_with_cap(f, DEFAULT_ORACLE_CAP)
}

pub fn norm_b_oracle_with_cap(f: &FinSeq, cap: usize) -> Result<Scalar, OracleError> {
    let support = f.support_len();
    if support > cap {
        return Err(OracleError::SupportTooLarge { support, cap });
    }
    let entries = f.entries();
    let mut best = Scalar::zero();
    for set in all_greedy_sets(f) {
        let kept: Vec<Scalar> =
            entries.iter().map(|(n, v)| if set.contains(*n) { Scalar::zero() } else { v.clone() }).collect();
        // Intervals only matter through the support entries they cover.
        for lo in 0..kept.len() {
            let mut sum = Scalar::zero();
            for v in &kept[lo..] {
                sum += v;
                let a = sum.abs();
                if a > best {
                    best = a;
                }
            }
        }
    }
    Ok(best)
}
