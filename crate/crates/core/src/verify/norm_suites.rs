use rand::Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{self, trial_rng, CorpusSpec};
use super::{require, Check, Context, Evaluators, Suite};
use crate::greedy::{all_greedy_sets, greedy_sets_of_size, is_greedy_set, max_greedy_within};
use crate::norms::{
    democracy_profile, democracy_profile_brute, lorentz, norm_a_oracle, norm_b_oracle, rho_1q, sigma_g, sigma_g_defect,
    DemocracySpace, Gauge, NormValue, SpaceSpec,
};
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, Injection, IntInterval, SignVector};

fn weak(f: &FinSeq) -> Scalar {
    lorentz(f, SpaceSpec::LorentzInf).exact().expect("weak ℓ₁ is rational")
}

fn rho(f: &FinSeq, k: usize) -> Scalar {
    rho_1q(f, k, SpaceSpec::LorentzInf).exact().expect("weak ℓ₁ is rational")
}

fn show(x: &Scalar) -> String {
    x.to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SeqInput {
    f: FinSeq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct PairInput {
    f: FinSeq,
    g: FinSeq,
}

fn single(id: &str, trial: usize, corpus: &CorpusSpec) -> SeqInput {
    let mut rng = trial_rng(corpus.seed, id, trial);
    SeqInput { f: corpus::corpus_seq(trial, corpus, &mut rng) }
}

fn pair(id: &str, trial: usize, corpus: &CorpusSpec) -> PairInput {
    let mut rng = trial_rng(corpus.seed, id, trial);
    let f = corpus::seq(&mut rng, corpus);
    let g = corpus::seq(&mut rng, corpus);
    PairInput { f, g }
}

pub(crate) struct TwistedIdentity;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct TwistedInput {
    f: FinSeq,
    g: FinSeq,
    a: IndexSet,
    b: IndexSet,
    d: IndexSet,
}

impl Suite for TwistedIdentity {
    const ID: &'static str = "TWISTED-ID";
    const OWNS: &'static [&'static str] = &["seq.twisted-identity"];
    type Input = TwistedInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> TwistedInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        TwistedInput {
            f: corpus::seq(&mut rng, corpus),
            g: corpus::seq(&mut rng, corpus),
            a: corpus::subset(&mut rng, corpus.window),
            b: corpus::subset(&mut rng, corpus.window),
            d: corpus::subset(&mut rng, corpus.window),
        }
    }

    fn check(&self, x: &TwistedInput, _: &Evaluators, _: &Context) -> Check {
        let sum = &x.f + &x.g;
        let lhs = sum.sum_over(&x.a) - x.f.sum_over(&x.b) - x.g.sum_over(&x.d);
        let rhs = x.f.sum_over(&x.a.union(&x.d).difference(&x.b)) + x.g.sum_over(&x.a.union(&x.b).difference(&x.d))
            - sum.sum_over(&x.b.union(&x.d).difference(&x.a));
        require(lhs == rhs, "twisted identity", &[("lhs", show(&lhs)), ("rhs", show(&rhs))])
    }
}

pub(crate) struct Rearrangement;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RearrInput {
    f: FinSeq,
    g: FinSeq,
    perm: Injection,
    signs: SignVector,
    a: IndexSet,
    b: IndexSet,
}

impl Suite for Rearrangement {
    const ID: &'static str = "REARR";
    const OWNS: &'static [&'static str] = &["seq.rearrangement"];
    type Input = RearrInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> RearrInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        RearrInput {
            f: corpus::seq(&mut rng, corpus),
            g: corpus::seq(&mut rng, corpus),
            perm: corpus::permutation(&mut rng, corpus.window),
            signs: corpus::signs(&mut rng, corpus.window),
            a: corpus::subset(&mut rng, corpus.window),
            b: corpus::subset(&mut rng, corpus.window),
        }
    }

    fn check(&self, x: &RearrInput, _: &Evaluators, _: &Context) -> Check {
        let at = |d: &[Scalar], k: usize| d.get(k - 1).cloned().unwrap_or_else(Scalar::zero);
        let (df, dg, ds) = (x.f.dec_rearrangement(), x.g.dec_rearrangement(), (&x.f + &x.g).dec_rearrangement());
        for m in 1..=df.len().max(1) {
            for n in 1..=dg.len().max(1) {
                let lhs = at(&ds, m + n - 1);
                let rhs = at(&df, m) + at(&dg, n);
                if lhs > rhs {
                    return Check::fail(
                        "(f+g)*(m+n−1) ≤ f*(m) + g*(n)",
                        &[("m", m.to_string()), ("n", n.to_string()), ("lhs", show(&lhs)), ("rhs", show(&rhs))],
                    );
                }
            }
        }
        let moved = match x.f.permute(&x.perm) {
            Ok(p) => p.multiply(&x.signs),
            Err(e) => return Check::fail("permutation applies", &[("error", e.to_string())]),
        };
        if moved.dec_rearrangement() != df {
            return Check::fail("rearrangement invariant under signs and permutation", &[("moved", moved.to_string())]);
        }
        let lhs = x.f.project(&x.a).sum_over(&x.b);
        let rhs = x.f.sum_over(&x.a.intersection(&x.b));
        require(lhs == rhs, "S_A then 1*_B equals 1*_(A∩B)", &[("lhs", show(&lhs)), ("rhs", show(&rhs))])
    }
}

pub(crate) struct GreedyClosure;

impl Suite for GreedyClosure {
    const ID: &'static str = "GREEDY-CLOSURE";
    const OWNS: &'static [&'static str] = &["greedy.closure"];
    type Input = SeqInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SeqInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        SeqInput { f: corpus::seq(&mut rng, corpus) }
    }

    fn check(&self, x: &SeqInput, _: &Evaluators, _: &Context) -> Check {
        let f = &x.f;
        let sets: Vec<IndexSet> = all_greedy_sets(f).take(64).collect();
        for (i, a) in sets.iter().enumerate() {
            if !is_greedy_set(f, a) {
                return Check::fail("enumerated set is greedy", &[("set", format!("{a:?}"))]);
            }
            for b in &sets[i..] {
                if !is_greedy_set(f, &a.union(b)) {
                    return Check::fail(
                        "union of greedy sets is greedy",
                        &[("a", format!("{a:?}")), ("b", format!("{b:?}"))],
                    );
                }
            }
        }
        for a in sets.iter().take(16) {
            let rest = f.remove(a);
            for b in all_greedy_sets(&rest).take(16) {
                if !is_greedy_set(f, &a.union(&b)) {
                    return Check::fail(
                        "A ∪ B greedy when B is greedy for f − S_A f",
                        &[("a", format!("{a:?}")), ("b", format!("{b:?}"))],
                    );
                }
            }
        }
        let mut total = 0usize;
        for m in 0..=f.support_len() {
            let by_size = match greedy_sets_of_size(f, m).and_then(|s| s.materialize(4096)) {
                Ok(v) => v,
                Err(e) => return Check::fail("greedy sets of size m enumerate", &[("error", e.to_string())]),
            };
            if by_size.iter().any(|s| s.len() != m || !is_greedy_set(f, s)) {
                return Check::fail("greedy sets of size m are greedy of size m", &[("m", m.to_string())]);
            }
            total += by_size.len();
        }
        let all = all_greedy_sets(f).count();
        if total != all {
            return Check::fail(
                "sizes partition the greedy family",
                &[("by_size", total.to_string()), ("all", all.to_string())],
            );
        }
        for k in 0..=f.support_len() {
            let (small, big) = (max_greedy_within(f, k), max_greedy_within(f, k + 1));
            if !small.is_subset(&big) || !is_greedy_set(f, &small) || small.len() > k {
                return Check::fail("largest greedy set within k grows with k", &[("k", k.to_string())]);
            }
        }
        Check::pass()
    }
}

pub(crate) struct OracleEquivalence;

impl Suite for OracleEquivalence {
    const ID: &'static str = "ORACLE-EQ";
    const OWNS: &'static [&'static str] = &["norms.oracle-equivalence"];
    type Input = SeqInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SeqInput {
        single(Self::ID, trial, corpus)
    }

    fn check(&self, x: &SeqInput, ev: &Evaluators, _: &Context) -> Check {
        let (fast_b, fast_a) = ((ev.norm_b)(&x.f), (ev.norm_a)(&x.f));
        match (norm_b_oracle(&x.f), norm_a_oracle(&x.f)) {
            (Ok(slow_b), Ok(slow_a)) => require(
                fast_b == slow_b && fast_a == slow_a,
                "fast gauges match the enumeration oracles",
                &[
                    ("norm_b", show(&fast_b)),
                    ("oracle_b", show(&slow_b)),
                    ("norm_a", show(&fast_a)),
                    ("oracle_a", show(&slow_a)),
                ],
            ),
            (Err(e), _) | (_, Err(e)) => Check::fail("oracle within its cap", &[("error", e.to_string())]),
        }
    }
}

pub(crate) struct GaugeBelowL1;

impl Suite for GaugeBelowL1 {
    const ID: &'static str = "B0-LE-L1";
    const OWNS: &'static [&'static str] = &["norms.b-le-l1"];
    type Input = SeqInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SeqInput {
        single(Self::ID, trial, corpus)
    }

    fn check(&self, x: &SeqInput, ev: &Evaluators, _: &Context) -> Check {
        let (b, l1) = ((ev.norm_b)(&x.f), x.f.l1());
        let modulus = x.f.multiply(&SignVector::of_seq(&x.f));
        let b_mod = (ev.norm_b)(&modulus);
        require(b <= l1, "‖f‖_B ≤ ‖f‖₁", &[("norm_b", show(&b)), ("l1", show(&l1))])
            .and(|| require(b_mod == l1, "‖|f|‖_B = ‖f‖₁", &[("norm_b", show(&b_mod)), ("l1", show(&l1))]))
    }
}

pub(crate) struct IntervalProjection;

impl Suite for IntervalProjection {
    const ID: &'static str = "SCHAUDER";
    const OWNS: &'static [&'static str] = &["norms.interval-projection"];
    type Input = SeqInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SeqInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        SeqInput { f: corpus::seq(&mut rng, corpus) }
    }

    fn check(&self, x: &SeqInput, ev: &Evaluators, _: &Context) -> Check {
        let whole = (ev.norm_b)(&x.f);
        for hi in 1..=x.f.max_index() {
            for lo in 1..=hi {
                let interval = IntInterval::new(lo, hi).expect("lo ≤ hi");
                let part = (ev.norm_b)(&x.f.project_interval(&interval));
                if part > whole {
                    return Check::fail(
                        "‖S_I f‖_B ≤ ‖f‖_B",
                        &[("interval", interval.to_string()), ("part", show(&part)), ("whole", show(&whole))],
                    );
                }
            }
        }
        Check::pass()
    }
}

pub(crate) struct QuasiGreedy;

impl Suite for QuasiGreedy {
    const ID: &'static str = "QG-B";
    const OWNS: &'static [&'static str] = &["norms.quasi-greedy"];
    type Input = SeqInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SeqInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        SeqInput { f: corpus::seq(&mut rng, corpus) }
    }

    fn check(&self, x: &SeqInput, ev: &Evaluators, _: &Context) -> Check {
        let whole = (ev.norm_b)(&x.f);
        for set in all_greedy_sets(&x.f) {
            let rest = (ev.norm_b)(&x.f.remove(&set));
            if rest > whole {
                return Check::fail(
                    "‖f − S_A f‖_B ≤ ‖f‖_B for greedy A",
                    &[("set", format!("{set:?}")), ("rest", show(&rest)), ("whole", show(&whole))],
                );
            }
        }
        Check::pass()
    }
}

pub(crate) struct Subadditivity;

impl Suite for Subadditivity {
    const ID: &'static str = "B1-SUBADD";
    const OWNS: &'static [&'static str] = &["norms.subadditivity"];
    type Input = PairInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> PairInput {
        pair(Self::ID, trial, corpus)
    }

    fn check(&self, x: &PairInput, ev: &Evaluators, _: &Context) -> Check {
        let sum = &x.f + &x.g;
        let slack = Scalar::from(2) * (weak(&sum) + weak(&x.f) + weak(&x.g));
        let (b_sum, b_bound) = ((ev.norm_b)(&sum), (ev.norm_b)(&x.f) + (ev.norm_b)(&x.g) + &slack);
        let (a_sum, a_bound) = ((ev.norm_a)(&sum), (ev.norm_a)(&x.f) + (ev.norm_a)(&x.g) + &slack);
        let (s_sum, s_parts) = (sigma_g(&sum), sigma_g(&x.f) + sigma_g(&x.g));
        require(
            b_sum <= b_bound,
            "B gauge subadditive up to weak-ℓ₁ terms",
            &[("lhs", show(&b_sum)), ("rhs", show(&b_bound))],
        )
        .and(|| {
            require(
                a_sum <= a_bound,
                "A gauge subadditive up to weak-ℓ₁ terms",
                &[("lhs", show(&a_sum)), ("rhs", show(&a_bound))],
            )
        })
        .and(|| require(s_sum == s_parts, "greedy sum is additive", &[("lhs", show(&s_sum)), ("rhs", show(&s_parts))]))
    }
}

pub(crate) struct RhoSubadditivity;

impl Suite for RhoSubadditivity {
    const ID: &'static str = "BS-LEM";
    const OWNS: &'static [&'static str] = &["norms.rho-subadditivity"];
    type Input = PairInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> PairInput {
        pair(Self::ID, trial, corpus)
    }

    fn check(&self, x: &PairInput, _: &Evaluators, _: &Context) -> Check {
        let sum = &x.f + &x.g;
        for k1 in 0..=x.f.support_len() {
            for k2 in 0..=x.g.support_len() {
                let lhs = rho(&sum, 1 + k1 + k2);
                let rhs = Scalar::from(2) * (rho(&x.f, k1) + rho(&x.g, k2));
                if lhs > rhs {
                    return Check::fail(
                        "ρ(f+g, 1+k₁+k₂) ≤ 2(ρ(f,k₁) + ρ(g,k₂))",
                        &[("k1", k1.to_string()), ("k2", k2.to_string()), ("lhs", show(&lhs)), ("rhs", show(&rhs))],
                    );
                }
            }
        }
        Check::pass()
    }
}

pub(crate) struct TailBound;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct TailInput {
    f: FinSeq,
    greedy: IndexSet,
    rest: IndexSet,
}

impl Suite for TailBound {
    const ID: &'static str = "B99";
    const OWNS: &'static [&'static str] = &["norms.tail-bound"];
    type Input = TailInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> TailInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let f = corpus::seq(&mut rng, corpus);
        let greedy = corpus::greedy_set(&mut rng, &f);
        let rest = corpus::subset(&mut rng, corpus.window).difference(&greedy);
        TailInput { f, greedy, rest }
    }

    fn check(&self, x: &TailInput, _: &Evaluators, _: &Context) -> Check {
        if !is_greedy_set(&x.f, &x.greedy) || !x.greedy.intersection(&x.rest).is_empty() {
            return Check::fail("input is a greedy set and a disjoint set", &[]);
        }
        let tail = x.f.sum_over(&x.rest).abs();
        let size = Scalar::from(x.rest.len());
        for k in 0..=x.greedy.len() {
            let lhs = &tail * Scalar::from(1 + x.greedy.len() - k);
            let rhs = &size * rho(&x.f, k);
            if lhs > rhs {
                return Check::fail(
                    "|1*_B f|(1+|A|−k) ≤ |B| ρ(f,k)",
                    &[("k", k.to_string()), ("lhs", show(&lhs)), ("rhs", show(&rhs))],
                );
            }
        }
        Check::pass()
    }
}

pub(crate) struct GreedySumDefect;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct DefectInput {
    f: FinSeq,
    greedy: IndexSet,
}

/// `max |σ_g(f, D)|` over greedy `D ⊇ A`, where `σ_g(f, D) = σ_g(f) − 1*_D f`.
fn defect_envelope(f: &FinSeq, set: &IndexSet) -> Scalar {
    all_greedy_sets(f)
        .filter(|d| set.is_subset(d))
        .map(|d| sigma_g_defect(f, &d).abs())
        .max()
        .unwrap_or_else(Scalar::zero)
}

impl Suite for GreedySumDefect {
    const ID: &'static str = "ACONV";
    const OWNS: &'static [&'static str] = &["norms.greedy-sum-defect"];
    type Input = DefectInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> DefectInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let f = corpus::seq(&mut rng, corpus);
        let greedy = corpus::greedy_set(&mut rng, &f);
        DefectInput { f, greedy }
    }

    fn check(&self, x: &DefectInput, ev: &Evaluators, _: &Context) -> Check {
        let rest = x.f.remove(&x.greedy);
        let (lhs, rhs) = (sigma_g(&rest), sigma_g_defect(&x.f, &x.greedy));
        if lhs != rhs {
            return Check::fail("σ_g(f − S_A f) = σ_g(f) − 1*_A f", &[("lhs", show(&lhs)), ("rhs", show(&rhs))]);
        }
        let mut previous: Option<Scalar> = None;
        for k in 0..=x.f.support_len() {
            let m = defect_envelope(&x.f, &max_greedy_within(&x.f, k));
            if previous.as_ref().is_some_and(|p| m > *p) {
                return Check::fail("defect envelope nonincreasing along the greedy chain", &[("k", k.to_string())]);
            }
            previous = Some(m);
        }
        let (a_rest, bound) = ((ev.norm_a)(&rest), defect_envelope(&x.f, &x.greedy));
        require(a_rest <= bound, "‖f − S_A f‖_A ≤ defect envelope", &[("lhs", show(&a_rest)), ("rhs", show(&bound))])
    }
}

/// A sequence whose `B` gauge changes under a permutation: the interval
/// `[1, 3]` of the permuted sequence collects `4 − 1 + 2`.
pub fn b_asymmetry_witness() -> (FinSeq, Injection) {
    let f = FinSeq::from_ints(&[4, -3, 2, -1]);
    let swap = Injection::from_pairs([(2, 4), (4, 2)]).expect("a transposition");
    (f, swap)
}

pub(crate) struct Symmetry;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SymmetryInput {
    f: FinSeq,
    perm: Injection,
}

impl Suite for Symmetry {
    const ID: &'static str = "SYMM";
    const OWNS: &'static [&'static str] = &["norms.symmetry"];
    type Input = SymmetryInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SymmetryInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        SymmetryInput { f: corpus::seq(&mut rng, corpus), perm: corpus::permutation(&mut rng, corpus.window) }
    }

    fn check(&self, x: &SymmetryInput, ev: &Evaluators, _: &Context) -> Check {
        let moved = match x.f.permute(&x.perm) {
            Ok(p) => p,
            Err(e) => return Check::fail("permutation applies", &[("error", e.to_string())]),
        };
        let (a, a_moved) = ((ev.norm_a)(&x.f), (ev.norm_a)(&moved));
        if a != a_moved {
            return Check::fail("A gauge is symmetric", &[("before", show(&a)), ("after", show(&a_moved))]);
        }
        for space in [SpaceSpec::Lorentz(1), SpaceSpec::Lorentz(2), SpaceSpec::Lorentz(3), SpaceSpec::LorentzInf] {
            if lorentz(&x.f, space) != lorentz(&moved, space) {
                return Check::fail("Lorentz norms are symmetric", &[("space", space.to_string())]);
            }
        }
        let (w, swap) = b_asymmetry_witness();
        let w_moved = w.permute(&swap).expect("support is moved within itself");
        let (b, b_moved) = ((ev.norm_b)(&w), (ev.norm_b)(&w_moved));
        require(
            b != b_moved,
            "B gauge is not symmetric on the stored witness",
            &[("before", show(&b)), ("after", show(&b_moved))],
        )
    }
}

pub(crate) struct LorentzEmbedding;

impl Suite for LorentzEmbedding {
    const ID: &'static str = "LORENTZ-EMB";
    const OWNS: &'static [&'static str] = &["norms.lorentz-embedding"];
    type Input = SeqInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> SeqInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        SeqInput { f: corpus::seq(&mut rng, corpus) }
    }

    fn check(&self, x: &SeqInput, _: &Evaluators, _: &Context) -> Check {
        let top = weak(&x.f);
        let mut check = Check::pass();
        for (q, name) in [(1u32, "C_1"), (2, "C_2^2"), (3, "C_3^3")] {
            let power = match lorentz(&x.f, SpaceSpec::Lorentz(q)) {
                NormValue::Exact(v) => v.pow(q),
                NormValue::QthPower { power, .. } => power,
                other => return Check::fail("Lorentz norm is a root", &[("value", format!("{other:?}"))]),
            };
            let lhs = top.pow(q);
            if lhs > Scalar::from(q as i64) * &power {
                return Check::fail(
                    "‖f‖_{1,∞}^q ≤ q‖f‖_{1,q}^q",
                    &[("q", q.to_string()), ("lhs", show(&lhs)), ("power", show(&power))],
                );
            }
            if power.is_positive() {
                check = check.measure(name, lhs / power);
            }
        }
        check
    }
}

pub(crate) struct PConvexity;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ConvexityInput {
    pair: (FinSeq, FinSeq),
    family: Vec<FinSeq>,
}

fn combined(f: &FinSeq, ev: &Evaluators) -> Scalar {
    (ev.norm_b)(f).max(weak(f))
}

/// `‖f+g‖ / (‖f‖ + ‖g‖)`, the quasi-triangle ratio of the pair.
fn pair_ratio(pair: &(FinSeq, FinSeq), ev: &Evaluators) -> Option<Scalar> {
    let den = combined(&pair.0, ev) + combined(&pair.1, ev);
    den.is_positive().then(|| combined(&(&pair.0 + &pair.1), ev) / den)
}

impl Suite for PConvexity {
    const ID: &'static str = "AR-PCONV";
    const OWNS: &'static [&'static str] = &["norms.p-convexity"];
    type Input = ConvexityInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> ConvexityInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let pair = (corpus::seq(&mut rng, corpus), corpus::seq(&mut rng, corpus));
        let len = rng.random_range(2..=5);
        let family = (0..len).map(|_| corpus::seq(&mut rng, corpus)).collect();
        ConvexityInput { pair, family }
    }

    fn prepare(&self, corpus: &CorpusSpec, ev: &Evaluators) -> Context {
        let kappa = (0..corpus.trials)
            .filter_map(|t| pair_ratio(&self.generate(t, corpus).pair, ev))
            .fold(Scalar::one(), Scalar::max);
        Context { kappa: Some(kappa) }
    }

    fn check(&self, x: &ConvexityInput, ev: &Evaluators, ctx: &Context) -> Check {
        let kappa = ctx.kappa.clone().unwrap_or_else(Scalar::one);
        let mut check = Check::pass();
        if let Some(r) = pair_ratio(&x.pair, ev) {
            if r > kappa {
                return Check::fail("pair ratio within corpus κ", &[("ratio", show(&r)), ("kappa", show(&kappa))]);
            }
            check = check.measure("kappa", r);
        }
        let total: FinSeq = x.family.iter().fold(FinSeq::zero(), |acc, f| &acc + f);
        let lhs = combined(&total, ev);
        let parts: Vec<Scalar> = x.family.iter().map(|f| combined(f, ev)).collect();
        let crude = Scalar::from(4) * kappa.pow(2) * parts.iter().sum::<Scalar>();
        if lhs <= crude {
            return check;
        }
        // Aoki–Rolewicz: ‖Σ f_j‖ ≤ 4^{1/p} (Σ ‖f_j‖^p)^{1/p} with κ = 2^{1/p − 1}.
        let p = 1.0 / (1.0 + kappa.to_f64().log2());
        let sum_p: f64 = parts.iter().map(|v| v.to_f64().powf(p)).sum();
        let rhs = 4f64.powf(1.0 / p) * sum_p.powf(1.0 / p);
        if lhs.to_f64() > rhs * (1.0 + 1e-12) {
            return Check::fail(
                "p-convexity bound",
                &[("lhs", show(&lhs)), ("rhs", rhs.to_string()), ("p", p.to_string())],
            );
        }
        check
    }
}

pub(crate) struct ThreeBlock;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ThreeBlockInput {
    t: Scalar,
    tail: FinSeq,
}

impl Suite for ThreeBlock {
    const ID: &'static str = "BNORM3";
    const OWNS: &'static [&'static str] = &["norms.three-block"];
    type Input = ThreeBlockInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> ThreeBlockInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let len = rng.random_range(1..=corpus.window.max(2));
        let mut entries: Vec<Scalar> = (0..len).map(|_| Scalar::ratio(rng.random_range(0..=4), 4)).collect();
        let mass: Scalar = entries.iter().sum();
        if mass < Scalar::one() {
            entries[0] = Scalar::one();
        }
        let tail = FinSeq::from_pairs(entries.into_iter().enumerate().map(|(i, v)| (i + 3, v))).expect("ordered");
        let t = if rng.random_bool(0.25) {
            Scalar::one()
        } else {
            let den = rng.random_range(1..=8);
            Scalar::ratio(rng.random_range(0..den), den)
        };
        ThreeBlockInput { t, tail }
    }

    fn check(&self, x: &ThreeBlockInput, ev: &Evaluators, _: &Context) -> Check {
        let expected = crate::constructions::three_block_value(&x.tail.total(), &x.t);
        let g = crate::constructions::three_block_seq(&x.t, &x.tail);
        let (b, a) = ((ev.norm_b)(&g), (ev.norm_a)(&g));
        require(
            b == expected && a == expected,
            "both gauges equal 1 + a − t below t = 1 and 1 + a at t = 1",
            &[("norm_b", show(&b)), ("norm_a", show(&a)), ("expected", show(&expected))],
        )
    }
}

pub(crate) struct Democracy;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct DemocracyInput {
    space: DemocracySpace,
    m_max: usize,
    window: usize,
}

impl Suite for Democracy {
    const ID: &'static str = "DEMOCRACY";
    const OWNS: &'static [&'static str] = &["norms.democracy"];
    type Input = DemocracyInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> DemocracyInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let spaces = [
            DemocracySpace::Gauge(Gauge::B),
            DemocracySpace::Gauge(Gauge::A),
            DemocracySpace::Space(SpaceSpec::LorentzInf),
            DemocracySpace::Space(SpaceSpec::Lorentz(2)),
            DemocracySpace::Combined(Gauge::B, SpaceSpec::LorentzInf),
            DemocracySpace::Combined(Gauge::A, SpaceSpec::Lorentz(2)),
        ];
        let m_max = rng.random_range(1..=3);
        DemocracyInput { space: spaces[rng.random_range(0..spaces.len())], m_max, window: rng.random_range(m_max..=6) }
    }

    fn check(&self, x: &DemocracyInput, _: &Evaluators, _: &Context) -> Check {
        match (democracy_profile(x.space, x.m_max, x.window), democracy_profile_brute(x.space, x.m_max, x.window)) {
            (Ok(fast), Ok(slow)) => require(
                fast.lower == slow.lower && fast.upper == slow.upper,
                "closed-form profile equals enumeration",
                &[
                    ("fast", format!("{:?} {:?}", fast.lower, fast.upper)),
                    ("brute", format!("{:?} {:?}", slow.lower, slow.upper)),
                ],
            ),
            (Err(e), _) | (_, Err(e)) => Check::fail("profile computes", &[("error", e.to_string())]),
        }
    }
}
