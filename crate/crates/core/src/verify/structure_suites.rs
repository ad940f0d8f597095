use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{trial_rng, CorpusSpec};
use super::{require, Check, Context, Evaluators, Suite};
use crate::constructions::{
    build_h, build_h0, discontinuity_witness, extremal_subset_sum, leibniz_check, leibniz_subfamily, three_block_value,
    H0Params, Preset, DEFAULT_TAIL_END,
};
use crate::greedy::greedy_chain;
use crate::norms::{lorentz, sigma_g, SpaceSpec};
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, IntInterval};

/// Exact gauge values of the preset-B block sequence at depths 2 to 7.
pub const PRESET_B_NORMS: [(usize, i64, i64); 6] =
    [(2, 79, 64), (3, 347, 256), (4, 1459, 1024), (5, 5987, 4096), (6, 24259, 16384), (7, 97667, 65536)];

const PRESET_A_DEPTHS: usize = 6;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub(crate) struct PresetInput {
    preset: Preset,
    depth: usize,
}

fn params(x: &PresetInput) -> H0Params {
    match x.preset {
        Preset::B => H0Params::preset_b(x.depth),
        _ => H0Params::preset_a(x.depth),
    }
}

pub(crate) struct H0Dichotomy;

impl Suite for H0Dichotomy {
    const ID: &'static str = "H0-DICHOTOMY";
    const OWNS: &'static [&'static str] = &[
        "constructions.preset-a-divergence",
        "constructions.preset-b-boundedness",
        "constructions.preset-a-oscillation",
        "constructions.gap-mass",
    ];
    type Input = PresetInput;

    fn fixed_cases(&self) -> Option<usize> {
        Some(PRESET_A_DEPTHS + PRESET_B_NORMS.len())
    }

    fn generate(&self, trial: usize, _: &CorpusSpec) -> PresetInput {
        if trial < PRESET_A_DEPTHS {
            PresetInput { preset: Preset::A, depth: trial + 1 }
        } else {
            PresetInput { preset: Preset::B, depth: PRESET_B_NORMS[trial - PRESET_A_DEPTHS].0 }
        }
    }

    fn check(&self, x: &PresetInput, ev: &Evaluators, _: &Context) -> Check {
        let params = params(x);
        let out = match build_h0(&params) {
            Ok(o) => o,
            Err(e) => return Check::fail("preset builds", &[("error", e.to_string())]),
        };
        if out.g0.total() != params.gap_mass() {
            return Check::fail(
                "gap mass",
                &[("found", out.g0.total().to_string()), ("expected", params.gap_mass().to_string())],
            );
        }
        for k in 1..=params.depth() {
            let bound = &params.levels[k - 1] * Scalar::from(2 * params.sizes[k - 1]);
            if out.block_extremal_sum(k) > bound {
                return Check::fail("block extremal sum ≤ 2 m_k b_(k−1)", &[("k", k.to_string())]);
            }
        }
        let value = (ev.norm_b)(&out.h0);
        match x.preset {
            Preset::B => {
                let &(_, num, den) = PRESET_B_NORMS.iter().find(|e| e.0 == x.depth).expect("fixed depth");
                let expected = Scalar::ratio(num, den);
                require(
                    value == expected,
                    "preset B gauge value",
                    &[("found", value.to_string()), ("expected", expected.to_string())],
                )
                .measure("norm_b", value)
            }
            _ => {
                let growth = Scalar::ratio(3, 2).pow(x.depth as u32);
                if value < growth {
                    return Check::fail(
                        "preset A gauge ≥ (3/2)^K",
                        &[("found", value.to_string()), ("bound", growth.to_string())],
                    );
                }
                for k in 1..=x.depth {
                    let osc = out.oscillation(k);
                    if osc < Scalar::ratio(3, 2).pow(k as u32) {
                        return Check::fail(
                            "oscillation ≥ (3/2)^k",
                            &[("k", k.to_string()), ("found", osc.to_string())],
                        );
                    }
                }
                Check::pass()
            }
        }
    }
}

pub(crate) struct Leibniz;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct LeibnizInput {
    g: FinSeq,
    blocks: Vec<IntInterval>,
    first: IndexSet,
    second: IndexSet,
}

impl Suite for Leibniz {
    const ID: &'static str = "LEIBNIZ";
    const OWNS: &'static [&'static str] = &["constructions.leibniz-laws"];
    type Input = LeibnizInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> LeibnizInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let count = rng.random_range(1..=4);
        let mut lengths: Vec<usize> = (0..count).map(|_| rng.random_range(1..=3)).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let total: usize = lengths.iter().sum();
        // Distinct values, handed out in decreasing order, keep every block
        // strictly above the next one and the sums decreasing.
        let mut values: Vec<i64> =
            rand::seq::index::sample(&mut rng, 48, total).into_iter().map(|v| v as i64 + 1).collect();
        values.sort_unstable_by(|a, b| b.cmp(a));
        let mut values = values.into_iter();
        let (mut pairs, mut blocks) = (Vec::new(), Vec::new());
        let mut next = rng.random_range(1..=2);
        for &len in &lengths {
            let slots = len + usize::from(rng.random_bool(1.0 / 3.0));
            let mut positions: Vec<usize> = (next..next + slots).collect();
            positions.shuffle(&mut rng);
            let mut used: Vec<usize> = positions[..len].to_vec();
            used.sort_unstable();
            for n in used {
                pairs.push((n, Scalar::ratio(values.next().expect("enough values"), 8)));
            }
            blocks.push(IntInterval::new(next, next + slots - 1).expect("nonempty"));
            next += slots + rng.random_range(0..=1);
        }
        pairs.sort_by_key(|p| p.0);
        let g = FinSeq::from_pairs(pairs).expect("distinct positions");
        let first: IndexSet = (1..=count).filter(|_| rng.random_bool(0.5)).collect();
        let mut second: IndexSet = (1..=count).filter(|_| rng.random_bool(0.5)).collect();
        if first == second {
            second = second.symmetric_difference(&IndexSet::from([1]));
        }
        LeibnizInput { g, blocks, first, second }
    }

    fn check(&self, x: &LeibnizInput, ev: &Evaluators, _: &Context) -> Check {
        let data = match leibniz_check(&x.g, &x.blocks) {
            Ok(d) => d,
            Err(e) => return Check::fail("generated data is Leibnizian", &[("error", e.to_string())]),
        };
        let sums = data.block_sums();
        let all: IndexSet = (1..=x.blocks.len()).collect();
        for selection in [&all, &x.first, &x.second] {
            let f = leibniz_subfamily(&data, selection).expect("blocks in range");
            let value = (ev.norm_b)(&f);
            let expected = selection.first().map_or_else(Scalar::zero, |k| sums[k - 1].clone());
            if value != expected {
                return Check::fail(
                    "alternating family has the gauge of its first block",
                    &[
                        ("selection", format!("{selection:?}")),
                        ("found", value.to_string()),
                        ("expected", expected.to_string()),
                    ],
                );
            }
        }
        let diff = leibniz_subfamily(&data, &x.first).expect("in range")
            - leibniz_subfamily(&data, &x.second).expect("in range");
        let value = (ev.norm_b)(&diff);
        let floor = x
            .first
            .symmetric_difference(&x.second)
            .iter()
            .map(|k| sums[k - 1].clone())
            .max()
            .expect("selections differ");
        require(
            value >= floor && floor >= data.omega_trunc,
            "distinct selections stay separated",
            &[("found", value.to_string()), ("floor", floor.to_string()), ("omega", data.omega_trunc.to_string())],
        )
    }
}

pub(crate) struct Discontinuity;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct DiscontinuityInput {
    t: Scalar,
}

const DISCONTINUITY_STEPS: i64 = 20;

impl Suite for Discontinuity {
    const ID: &'static str = "DISCONT";
    const OWNS: &'static [&'static str] = &["constructions.discontinuity"];
    type Input = DiscontinuityInput;

    fn fixed_cases(&self) -> Option<usize> {
        Some(DISCONTINUITY_STEPS as usize + 3)
    }

    fn generate(&self, trial: usize, _: &CorpusSpec) -> DiscontinuityInput {
        let t = match trial as i64 {
            k if k <= DISCONTINUITY_STEPS => Scalar::ratio(k, DISCONTINUITY_STEPS),
            k if k == DISCONTINUITY_STEPS + 1 => Scalar::ratio(99, 100),
            _ => Scalar::ratio(999, 1000),
        };
        DiscontinuityInput { t }
    }

    fn check(&self, x: &DiscontinuityInput, ev: &Evaluators, _: &Context) -> Check {
        let w = match discontinuity_witness(DEFAULT_TAIL_END, &x.t) {
            Ok(w) => w,
            Err(e) => return Check::fail("witness builds", &[("error", e.to_string())]),
        };
        let gauge = (ev.norm_b)(&w.seq);
        let weak = lorentz(&w.seq, SpaceSpec::LorentzInf).exact().expect("rational");
        let expected = three_block_value(&w.tail_mass, &x.t);
        require(
            gauge == expected && gauge >= weak && w.predicted == expected,
            "combined norm equals the gauge value 1 + a − t, jumping to 1 + a at t = 1",
            &[("gauge", gauge.to_string()), ("weak", weak.to_string()), ("expected", expected.to_string())],
        )
    }
}

pub(crate) struct Doubled;

const DOUBLED_CASES: [(Preset, usize); 8] = [
    (Preset::B, 1),
    (Preset::B, 2),
    (Preset::B, 3),
    (Preset::B, 4),
    (Preset::B, 5),
    (Preset::A, 1),
    (Preset::A, 2),
    (Preset::A, 3),
];

impl Suite for Doubled {
    const ID: &'static str = "DOUBLED";
    const OWNS: &'static [&'static str] = &["constructions.doubled"];
    type Input = PresetInput;

    fn fixed_cases(&self) -> Option<usize> {
        Some(DOUBLED_CASES.len())
    }

    fn generate(&self, trial: usize, _: &CorpusSpec) -> PresetInput {
        let (preset, depth) = DOUBLED_CASES[trial];
        PresetInput { preset, depth }
    }

    fn check(&self, x: &PresetInput, _: &Evaluators, _: &Context) -> Check {
        let out = match build_h(&params(x)) {
            Ok(o) => o,
            Err(e) => return Check::fail("preset builds", &[("error", e.to_string())]),
        };
        let layout = out.base.layout.doubled.as_ref().expect("doubled layout");
        for (k, block) in out.base.layout.blocks.iter().enumerate() {
            if layout.spans[k].len() != 2 * block.span.len() {
                return Check::fail("|H_k| = 2|J_k|", &[("k", (k + 1).to_string())]);
            }
            let here = extremal_subset_sum(&out.h.project_interval(&layout.spans[k]));
            let source = out.base.h0.project_interval(&block.span).l1();
            if here != source {
                return Check::fail("doubled block carries the full mass of J_k", &[("k", (k + 1).to_string())]);
            }
        }
        if !sigma_g(&out.h).is_zero() {
            return Check::fail("greedy sum of h vanishes", &[("sigma", sigma_g(&out.h).to_string())]);
        }
        for set in greedy_chain(&out.h) {
            if set.len() % 2 == 0 && !out.h.sum_over(&set).is_zero() {
                return Check::fail("even greedy sets sum to zero", &[("size", set.len().to_string())]);
            }
        }
        Check::pass()
    }
}
