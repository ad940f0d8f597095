//! The block sequences `h₀ = f₀ + g₀` and their doubled version `h`.
//!
//! Block `k` is `J_k = ⟦1+2n_{k−1}, 2n_k⟧` with `n_k = m_1 + … + m_k`. The
//! alternating part `f₀` follows a decreasing profile `c` pinned to `b_k` at
//! the block ends; `g₀` adds `ε_k` on the odd positions of `J_k`.

use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, Injection, IntInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    A,
    B,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H0Params {
    pub preset: Preset,
    /// `b_0, …, b_K`.
    pub levels: Vec<Scalar>,
    /// `m_1, …, m_K`.
    pub sizes: Vec<usize>,
    /// `ε_1, …, ε_K`.
    pub gaps: Vec<Scalar>,
}

fn dyadic(base: i64, k: usize) -> Scalar {
    Scalar::from_int(base).pow(k as u32).recip().expect("nonzero base")
}

impl H0Params {
    /// `b_k = 2^{−k}`, `m_k = 3^k`, `ε_k = 4^{−k}`.
    pub fn preset_a(depth: usize) -> H0Params {
        H0Params::standard(Preset::A, 3, depth)
    }

    /// `b_k = 2^{−k}`, `m_k = 2^k`, `ε_k = 4^{−k}`.
    pub fn preset_b(depth: usize) -> H0Params {
        H0Params::standard(Preset::B, 2, depth)
    }

    fn standard(preset: Preset, growth: usize, depth: usize) -> H0Params {
        H0Params {
            preset,
            levels: (0..=depth).map(|k| dyadic(2, k)).collect(),
            sizes: (1..=depth).map(|k| growth.pow(k as u32)).collect(),
            gaps: (1..=depth).map(|k| dyadic(4, k)).collect(),
        }
    }

    pub fn custom(levels: Vec<Scalar>, sizes: Vec<usize>, gaps: Vec<Scalar>) -> Result<H0Params, ConstructionError> {
        let params = H0Params { preset: Preset::Custom, levels, sizes, gaps };
        params.validate()?;
        Ok(params)
    }

    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |msg: String| Err(ConstructionError::InvalidParams(msg));
        let depth = self.depth();
        if depth == 0 {
            return bad("depth must be at least 1".into());
        }
        if self.levels.len() != depth + 1 || self.gaps.len() != depth {
            return bad(format!("{} levels and {} gaps for depth {depth}", self.levels.len(), self.gaps.len()));
        }
        if self.levels.last().is_some_and(|b| !b.is_positive()) {
            return bad("levels must be positive".into());
        }
        for k in 1..=depth {
            if self.sizes[k - 1] == 0 {
                return bad(format!("m_{k} is zero"));
            }
            let drop = &self.levels[k - 1] - &self.levels[k];
            if !drop.is_positive() {
                return bad(format!("b_{k} is not below b_{}", k - 1));
            }
            let gap = &self.gaps[k - 1];
            if !gap.is_positive() || *gap >= drop {
                return bad(format!("ε_{k} = {gap} is outside (0, b_{} − b_{k})", k - 1));
            }
        }
        Ok(())
    }

    /// `n_0 = 0, n_1, …, n_K`.
    pub fn partial_sums(&self) -> Vec<usize> {
        std::iter::once(0)
            .chain(self.sizes.iter().scan(0, |acc, m| {
                *acc += m;
                Some(*acc)
            }))
            .collect()
    }

    /// `Σ m_k ε_k`.
    pub fn gap_mass(&self) -> Scalar {
        self.sizes.iter().zip(&self.gaps).map(|(&m, e)| e * &Scalar::from(m)).sum()
    }
}

/// `c_0, …, c_{2n_K}`: pinned to `b_k` at `2n_k`; inside block `k` it starts at
/// `(b_{k−1} − ε_k + b_k)/2` and falls linearly by `min(ε_k, c − b_k)/2` in total.
pub fn build_c(params: &H0Params) -> Result<Vec<Scalar>, ConstructionError> {
    params.validate()?;
    let n = params.partial_sums();
    let mut c = vec![params.levels[0].clone()];
    for k in 1..=params.depth() {
        let (prev, next, gap) = (&params.levels[k - 1], &params.levels[k], &params.gaps[k - 1]);
        let start = (prev - gap + next) / Scalar::from_int(2);
        let drop = gap.clone().min(&start - next) / Scalar::from_int(2);
        let interior = 2 * params.sizes[k - 1] - 1;
        let step = if interior > 1 { drop / Scalar::from(interior - 1) } else { Scalar::zero() };
        for i in 0..interior {
            c.push(&start - &(&step * &Scalar::from(i)));
        }
        c.push(next.clone());
        debug_assert_eq!(c.len(), 2 * n[k] + 1);
    }
    check_profile(params, &c)?;
    Ok(c)
}

fn check_profile(params: &H0Params, c: &[Scalar]) -> Result<(), ConstructionError> {
    let n = params.partial_sums();
    let fail = |clause: &'static str, k: usize| Err(ConstructionError::Constraint { clause, block: k });
    if let Some(i) = (1..c.len()).find(|&i| c[i] >= c[i - 1]) {
        return fail("strictly decreasing", i);
    }
    for k in 0..=params.depth() {
        if c[2 * n[k]] != params.levels[k] {
            return fail("pinned to the level at the block end", k);
        }
    }
    for k in 1..=params.depth() {
        let gap = &params.gaps[k - 1];
        if &params.levels[k - 1] - &c[1 + 2 * n[k - 1]] <= *gap {
            return fail("first entry of the block sits more than ε below the previous level", k);
        }
        let second = 2 + 2 * n[k - 1];
        let last = 2 * n[k] - 1;
        if second <= last && &c[second] - &c[last] >= *gap {
            return fail("spread of the even entries stays below ε", k);
        }
    }
    Ok(())
}

/// Per-block index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    /// `J_k`.
    pub span: IntInterval,
    /// Odd positions of `J_k`.
    pub plus: IndexSet,
    /// Even positions of `J_k`.
    pub minus: IndexSet,
    /// `I_k`: all earlier blocks.
    pub before: IndexSet,
    /// `I_k ∪ J_k^+`.
    pub greedy: IndexSet,
}

/// Layout of `h`: `H_k` has twice the length of `J_k`; `J_k` is copied onto
/// its left half and its negative onto its right half.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubledBlocks {
    pub spans: Vec<IntInterval>,
    pub left: Vec<IntInterval>,
    pub right: Vec<IntInterval>,
    #[serde(skip)]
    pub to_left: Injection,
    #[serde(skip)]
    pub to_right: Injection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H0Blocks {
    /// `n_0, …, n_K`.
    pub n: Vec<usize>,
    pub blocks: Vec<Block>,
    pub doubled: Option<DoubledBlocks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H0Output {
    pub params: H0Params,
    pub c: Vec<Scalar>,
    pub f0: FinSeq,
    pub g0: FinSeq,
    pub h0: FinSeq,
    pub layout: H0Blocks,
}

impl H0Output {
    /// `|𝟙*_{J_k^−}(h₀)|`, the jump between the greedy sets `G_k` and `I_{k+1}`.
    pub fn oscillation(&self, k: usize) -> Scalar {
        self.h0.sum_over(&self.layout.blocks[k - 1].minus).abs()
    }

    /// `max_{D ⊆ J_k} |𝟙*_D(h₀)|`.
    pub fn block_extremal_sum(&self, k: usize) -> Scalar {
        extremal_subset_sum(&self.h0.project_interval(&self.layout.blocks[k - 1].span))
    }
}

/// `max_D |𝟙*_D(f)|`: the larger of the positive mass and the negative mass.
pub fn extremal_subset_sum(f: &FinSeq) -> Scalar {
    let (pos, neg): (Vec<_>, Vec<_>) = f.iter().map(|(_, v)| v.clone()).partition(|v| v.is_positive());
    let pos: Scalar = pos.into_iter().sum();
    let neg: Scalar = neg.into_iter().sum();
    pos.max(-neg)
}

pub fn build_h0(params: &H0Params) -> Result<H0Output, ConstructionError> {
    let c = build_c(params)?;
    let n = params.partial_sums();
    let len = 2 * n[params.depth()];
    let f0 =
        FinSeq::from_pairs((1..=len).map(|i| (i, if i % 2 == 1 { c[i].clone() } else { -&c[i] }))).expect("ordered");
    let mut gap_pairs = Vec::with_capacity(len / 2);
    let mut blocks = Vec::with_capacity(params.depth());
    for k in 1..=params.depth() {
        let span = IntInterval::new(1 + 2 * n[k - 1], 2 * n[k]).expect("nonempty block");
        let plus: IndexSet = (span.lo()..=span.hi()).step_by(2).collect();
        let minus: IndexSet = (span.lo() + 1..=span.hi()).step_by(2).collect();
        gap_pairs.extend(plus.iter().map(|i| (i, params.gaps[k - 1].clone())));
        let before = if k == 1 { IndexSet::new() } else { IndexSet::range(1, 2 * n[k - 1]) };
        let greedy = before.union(&plus);
        blocks.push(Block { span, plus, minus, before, greedy });
    }
    let g0 = FinSeq::from_pairs(gap_pairs).expect("ordered");
    let h0 = &f0 + &g0;
    Ok(H0Output { params: params.clone(), c, f0, g0, h0, layout: H0Blocks { n, blocks, doubled: None } })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HOutput {
    pub base: H0Output,
    pub h: FinSeq,
}

pub fn build_h(params: &H0Params) -> Result<HOutput, ConstructionError> {
    let mut base = build_h0(params)?;
    let n = &base.layout.n;
    let (mut spans, mut left, mut right) = (Vec::new(), Vec::new(), Vec::new());
    let (mut to_left, mut to_right) = (Vec::new(), Vec::new());
    for (k, block) in base.layout.blocks.iter().enumerate() {
        let width = block.span.len();
        let start = 4 * n[k];
        spans.push(IntInterval::new(start + 1, start + 2 * width).expect("nonempty"));
        left.push(IntInterval::new(start + 1, start + width).expect("nonempty"));
        right.push(IntInterval::new(start + width + 1, start + 2 * width).expect("nonempty"));
        for (i, src) in (block.span.lo()..=block.span.hi()).enumerate() {
            to_left.push((src, start + 1 + i));
            to_right.push((src, start + width + 1 + i));
        }
    }
    let to_left = Injection::from_pairs(to_left).expect("increasing");
    let to_right = Injection::from_pairs(to_right).expect("increasing");
    let h = base.h0.permute(&to_left).expect("injective") - base.h0.permute(&to_right).expect("injective");
    base.layout.doubled = Some(DoubledBlocks { spans, left, right, to_left, to_right });
    Ok(HOutput { base, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{greedy_chain, greedy_family};
    use crate::norms::sigma_g;

    #[test]
    fn first_block_of_preset_a() {
        let c = build_c(&H0Params::preset_a(1)).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c[0], Scalar::one());
        assert_eq!(c[1], Scalar::ratio(5, 8));
        assert_eq!(&c[1] - &c[5], Scalar::ratio(1, 16));
        assert_eq!(c[6], Scalar::ratio(1, 2));
    }

    #[test]
    fn profile_is_pinned_and_strictly_decreasing() {
        for params in [H0Params::preset_a(4), H0Params::preset_b(6)] {
            let c = build_c(&params).unwrap();
            let n = params.partial_sums();
            for k in 0..=params.depth() {
                assert_eq!(c[2 * n[k]], params.levels[k]);
            }
            assert!(c.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn custom_params_are_validated() {
        let levels = vec![Scalar::one(), Scalar::ratio(1, 2)];
        assert!(H0Params::custom(levels.clone(), vec![2], vec![Scalar::ratio(1, 2)]).is_err());
        assert!(H0Params::custom(levels.clone(), vec![0], vec![Scalar::ratio(1, 4)]).is_err());
        assert!(H0Params::custom(levels, vec![1], vec![Scalar::ratio(1, 4)]).is_ok());
    }

    #[test]
    fn sizes_and_masses() {
        let out = build_h0(&H0Params::preset_a(3)).unwrap();
        assert_eq!(out.layout.n, vec![0, 3, 12, 39]);
        assert_eq!(out.h0.support_len(), 78);
        assert_eq!(out.g0.total(), out.params.gap_mass());
        assert_eq!(out.f0.support_len(), 78);
        for k in 1..=3 {
            let bound = Scalar::ratio(3, 2).pow(k as u32);
            assert!(out.oscillation(k) >= bound);
        }
    }

    #[test]
    fn block_sums_stay_below_twice_the_mass() {
        for params in [H0Params::preset_a(4), H0Params::preset_b(5)] {
            let out = build_h0(&params).unwrap();
            for k in 1..=params.depth() {
                let bound = &params.levels[k - 1] * &Scalar::from(2 * params.sizes[k - 1]);
                assert!(out.block_extremal_sum(k) <= bound);
            }
        }
    }

    #[test]
    fn block_sets_are_greedy() {
        let out = build_h0(&H0Params::preset_b(3)).unwrap();
        for block in &out.layout.blocks {
            assert!(crate::greedy::is_greedy_set(&out.h0, &block.before));
            assert!(crate::greedy::is_greedy_set(&out.h0, &block.greedy));
        }
    }

    #[test]
    fn doubled_sequence() {
        let out = build_h(&H0Params::preset_b(3)).unwrap();
        let doubled = out.base.layout.doubled.as_ref().unwrap();
        assert_eq!(out.h.support_len(), 2 * out.base.h0.support_len());
        for (k, block) in out.base.layout.blocks.iter().enumerate() {
            assert_eq!(doubled.spans[k].len(), 2 * block.span.len());
        }
        assert!(sigma_g(&out.h).is_zero());
        let family = greedy_family(&out.h);
        let moduli = out.base.h0.dec_rearrangement();
        assert!(family.levels.iter().all(|l| l.members.len() == 2));
        for set in greedy_chain(&out.h) {
            let size = set.len();
            let sum = out.h.sum_over(&set);
            if size % 2 == 0 {
                assert!(sum.is_zero());
            } else {
                assert_eq!(sum.abs(), moduli[size.div_ceil(2) - 1]);
            }
        }
    }
}
