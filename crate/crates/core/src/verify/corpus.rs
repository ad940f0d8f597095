use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::greedy::greedy_family;
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, Injection, SignVector};

/// Nonzero values a corpus draws from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueGrid {
    Finite(Vec<Scalar>),
    /// `p/q` with `1 ≤ q ≤ max_den` and `0 < |p/q| ≤ bound`.
    Uniform {
        bound: i64,
        max_den: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub trials: usize,
    /// Inclusive range of support sizes.
    pub support: (usize, usize),
    /// Indices are drawn from `⟦1, window⟧`.
    pub window: usize,
    pub values: ValueGrid,
    /// When set, single-sequence suites first enumerate every sequence with at
    /// most this many nonzero entries (finite grids only), then draw randomly.
    pub exhaustive_support: Option<usize>,
}

impl Default for CorpusSpec {
    fn default() -> CorpusSpec {
        CorpusSpec {
            seed: 0,
            trials: 500,
            support: (0, 6),
            window: 10,
            values: ValueGrid::Uniform { bound: 2, max_den: 4 },
            exhaustive_support: None,
        }
    }
}

impl CorpusSpec {
    /// `{±½, ±1, ±2}` on `⟦1, 10⟧`, exhaustive up to three nonzero entries,
    /// then random supports of size 4 to 8.
    pub fn oracle(trials: usize, seed: u64) -> CorpusSpec {
        let values = [1, 2, 4].iter().flat_map(|&n| [Scalar::ratio(n, 2), Scalar::ratio(-n, 2)]).collect();
        CorpusSpec {
            seed,
            trials,
            support: (4, 8),
            window: 10,
            values: ValueGrid::Finite(values),
            exhaustive_support: Some(3),
        }
    }
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The stream for one trial of one suite.
pub fn trial_rng(seed: u64, suite: &str, trial: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(suite).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial as u64);
    rng
}

pub(crate) fn value(rng: &mut impl Rng, grid: &ValueGrid) -> Scalar {
    match grid {
        ValueGrid::Finite(values) => values[rng.random_range(0..values.len())].clone(),
        ValueGrid::Uniform { bound, max_den } => {
            let den = rng.random_range(1..=*max_den);
            let mut num = rng.random_range(1..=bound * den);
            if rng.random_bool(0.5) {
                num = -num;
            }
            Scalar::ratio(num, den)
        }
    }
}

pub(crate) fn seq(rng: &mut impl Rng, corpus: &CorpusSpec) -> FinSeq {
    let hi = corpus.support.1.min(corpus.window);
    let lo = corpus.support.0.min(hi);
    let size = rng.random_range(lo..=hi);
    seq_of_size(rng, corpus.window, size, &corpus.values)
}

pub(crate) fn seq_of_size(rng: &mut impl Rng, window: usize, size: usize, grid: &ValueGrid) -> FinSeq {
    let mut indices: Vec<usize> = sample(rng, window, size).into_iter().map(|i| i + 1).collect();
    indices.sort_unstable();
    FinSeq::from_pairs(indices.into_iter().map(|n| (n, value(rng, grid)))).expect("distinct indices")
}

pub(crate) fn subset(rng: &mut impl Rng, window: usize) -> IndexSet {
    (1..=window).filter(|_| rng.random_bool(0.5)).collect()
}

/// A uniformly chosen level cut plus a random part of the boundary level.
pub(crate) fn greedy_set(rng: &mut impl Rng, f: &FinSeq) -> IndexSet {
    let family = greedy_family(f);
    let cut = rng.random_range(0..=family.len());
    let mut set = family.prefix(cut);
    if let Some(level) = family.levels.get(cut) {
        let part: IndexSet = level.members.iter().filter(|_| rng.random_bool(0.5)).collect();
        set = set.union(&part);
    }
    set
}

pub(crate) fn permutation(rng: &mut impl Rng, window: usize) -> Injection {
    let images: Vec<usize> = sample(rng, window, window).into_iter().map(|i| i + 1).collect();
    Injection::from_images(1, &images).expect("a permutation is injective")
}

pub(crate) fn signs(rng: &mut impl Rng, window: usize) -> SignVector {
    SignVector::from_signs((0..window).map(|_| {
        if rng.random_bool(0.5) {
            crate::seq::Sign::Plus
        } else {
            crate::seq::Sign::Minus
        }
    }))
}

/// Number of sequences in the exhaustive part of the corpus.
pub fn exhaustive_count(corpus: &CorpusSpec) -> usize {
    let (Some(max), ValueGrid::Finite(values)) = (corpus.exhaustive_support, &corpus.values) else {
        return 0;
    };
    (0..=max.min(corpus.window)).map(|k| binomial(corpus.window, k) * values.len().pow(k as u32)).sum()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The `rank`-th sequence of the exhaustive part: by support size, then
/// support in lexicographic order, then values in grid order.
pub fn exhaustive_seq(corpus: &CorpusSpec, mut rank: usize) -> Option<FinSeq> {
    let (Some(max), ValueGrid::Finite(values)) = (corpus.exhaustive_support, &corpus.values) else {
        return None;
    };
    for k in 0..=max.min(corpus.window) {
        let per_support = values.len().pow(k as u32);
        let count = binomial(corpus.window, k) * per_support;
        if rank >= count {
            rank -= count;
            continue;
        }
        let support = (1..=corpus.window).combinations(k).nth(rank / per_support)?;
        let mut code = rank % per_support;
        let mut pairs = Vec::with_capacity(k);
        for n in support.into_iter().rev() {
            pairs.push((n, values[code % values.len()].clone()));
            code /= values.len();
        }
        pairs.reverse();
        return FinSeq::from_pairs(pairs).ok();
    }
    None
}

/// The exhaustive prefix first, random sequences after it.
pub(crate) fn corpus_seq(trial: usize, corpus: &CorpusSpec, rng: &mut impl Rng) -> FinSeq {
    exhaustive_seq(corpus, trial).unwrap_or_else(|| seq(rng, corpus))
}
