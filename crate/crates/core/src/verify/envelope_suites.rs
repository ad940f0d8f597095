use rand::Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{self, trial_rng, CorpusSpec, ValueGrid};
use super::{require, Check, Context, Evaluators, Suite};
use crate::envelope::lp::{minimize, minimize_by_vertices, LpError, DEFAULT_ITERATION_CAP};
use crate::envelope::{
    build_dictionary, cyclic_dictionary, default_dual_family, envelope_interval, harmonic_seed, harmonic_sum,
    lower_bound, upper_bound, CombinedSpace, DualFunctional, EnvelopeConfig, Generator,
};
use crate::norms::{Gauge, NormValue, SpaceSpec};
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, SignVector};

const SMALL_WINDOW: usize = 6;

fn small_seq(rng: &mut impl Rng, grid: &ValueGrid, max_support: usize) -> FinSeq {
    let size = rng.random_range(1..=max_support);
    corpus::seq_of_size(rng, SMALL_WINDOW, size, grid)
}

fn gauge(rng: &mut impl Rng) -> Gauge {
    if rng.random_bool(0.5) {
        Gauge::B
    } else {
        Gauge::A
    }
}

pub(crate) struct EnvelopeCertificates;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct CertInput {
    f: FinSeq,
    gauge: Gauge,
    space: SpaceSpec,
    cyclic: bool,
}

impl Suite for EnvelopeCertificates {
    const ID: &'static str = "ENV-CERT";
    const OWNS: &'static [&'static str] = &["envelope.certificate-soundness", "envelope.lower-le-upper"];
    type Input = CertInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> CertInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        CertInput {
            f: small_seq(&mut rng, &corpus.values, 4),
            gauge: gauge(&mut rng),
            space: if rng.random_bool(0.5) { SpaceSpec::LorentzInf } else { SpaceSpec::Lorentz(2) },
            cyclic: rng.random_bool(0.5),
        }
    }

    fn check(&self, x: &CertInput, _: &Evaluators, _: &Context) -> Check {
        let space = CombinedSpace::new(x.gauge, x.space);
        let mut generators = vec![Generator::Coordinates, Generator::IntervalPieces];
        if x.cyclic {
            generators.push(Generator::Cyclic { m: None, seed: None });
        }
        match envelope_interval(&x.f, space, &EnvelopeConfig::with_generators(generators)) {
            Ok(bound) => match bound.check(&x.f, space) {
                Ok(()) => Check::pass(),
                Err(reason) => Check::fail("certificates replay", &[("reason", reason)]),
            },
            Err(e) => Check::fail("envelope computes", &[("error", e.to_string())]),
        }
    }
}

pub(crate) struct EnvelopeMonotonicity;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct MonoInput {
    f: FinSeq,
    gauge: Gauge,
    extra: Vec<FinSeq>,
}

impl Suite for EnvelopeMonotonicity {
    const ID: &'static str = "ENV-MONO";
    const OWNS: &'static [&'static str] = &["envelope.monotonicity"];
    type Input = MonoInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> MonoInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let f = small_seq(&mut rng, &corpus.values, 4);
        let gauge = gauge(&mut rng);
        let count = rng.random_range(1..=3);
        let extra = (0..count).map(|_| small_seq(&mut rng, &corpus.values, 3)).collect();
        MonoInput { f, gauge, extra }
    }

    fn check(&self, x: &MonoInput, _: &Evaluators, _: &Context) -> Check {
        let space = CombinedSpace::new(x.gauge, SpaceSpec::LorentzInf);
        let small = [Generator::Coordinates];
        let large = [Generator::Coordinates, Generator::IntervalPieces, Generator::User(x.extra.clone())];
        let upper = |gens: &[Generator]| {
            build_dictionary(&x.f, space, gens).and_then(|d| upper_bound(&x.f, &d)).map(|(v, _)| v)
        };
        let (u_small, u_large) = match (upper(&small), upper(&large)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Check::fail("upper bounds compute", &[("error", e.to_string())]),
        };
        if u_large > u_small {
            return Check::fail(
                "larger dictionary gives a smaller upper bound",
                &[("small", format!("{u_small:?}")), ("large", format!("{u_large:?}"))],
            );
        }
        let coords: Vec<DualFunctional> = x.f.support().iter().map(DualFunctional::Coordinate).collect();
        let full = default_dual_family(&x.f, x.gauge);
        match (lower_bound(&x.f, space, &coords), lower_bound(&x.f, space, &full)) {
            (Ok((l_small, _)), Ok((l_large, _))) => require(
                l_large >= l_small,
                "larger dual family gives a larger lower bound",
                &[("small", l_small.to_string()), ("large", l_large.to_string())],
            ),
            (Err(e), _) | (_, Err(e)) => Check::fail("lower bounds compute", &[("error", e.to_string())]),
        }
    }
}

pub(crate) struct EnvelopeUcc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct UccInput {
    sizes: Vec<usize>,
}

/// The alternating indicator on `⟦1, m⟧`.
pub fn alternating_indicator(m: usize) -> FinSeq {
    FinSeq::signed_indicator(&SignVector::alternating(m), &IndexSet::range(1, m))
}

impl Suite for EnvelopeUcc {
    const ID: &'static str = "ENV-UCC";
    const OWNS: &'static [&'static str] = &["envelope.ucc-failure"];
    type Input = UccInput;

    fn fixed_cases(&self) -> Option<usize> {
        Some(1)
    }

    fn generate(&self, _: usize, _: &CorpusSpec) -> UccInput {
        UccInput { sizes: vec![4, 8, 16, 32, 64] }
    }

    fn check(&self, x: &UccInput, _: &Evaluators, _: &Context) -> Check {
        let space = CombinedSpace::new(Gauge::B, SpaceSpec::LorentzInf);
        let mut check = Check::pass();
        let mut previous: Option<Scalar> = None;
        for &m in &x.sizes {
            let dict = match cyclic_dictionary(m, &harmonic_seed(m), space) {
                Ok(d) => d,
                Err(e) => return Check::fail("cyclic dictionary builds", &[("error", e.to_string())]),
            };
            let target = alternating_indicator(m);
            let upper = match upper_bound(&target, &dict) {
                Ok((NormValue::Exact(v), _)) => v,
                Ok((other, _)) => return Check::fail("upper bound is rational", &[("value", format!("{other:?}"))]),
                Err(e) => {
                    return Check::fail("upper bound computes", &[("m", m.to_string()), ("error", e.to_string())])
                }
            };
            let atom_bound = match dict.max_norm() {
                Some(NormValue::Exact(v)) => v,
                other => return Check::fail("atom norms are rational", &[("value", format!("{other:?}"))]),
            };
            let ceiling = &atom_bound * Scalar::from(m) / harmonic_sum(m);
            if upper > ceiling {
                return Check::fail(
                    "upper ≤ D·m/s_m",
                    &[("m", m.to_string()), ("upper", upper.to_string()), ("ceiling", ceiling.to_string())],
                );
            }
            let evens = FinSeq::indicator(&(2..=m).step_by(2).collect());
            let lower = match lower_bound(&evens, space, &default_dual_family(&evens, Gauge::B)) {
                Ok((v, _)) => v,
                Err(e) => return Check::fail("lower bound computes", &[("error", e.to_string())]),
            };
            if lower != Scalar::from(m / 2) {
                return Check::fail(
                    "lower bound on the even indicator is ⌊m/2⌋",
                    &[("m", m.to_string()), ("lower", lower.to_string())],
                );
            }
            let ratio = lower / &upper;
            if previous.as_ref().is_some_and(|p| ratio <= *p) {
                return Check::fail(
                    "ratio strictly increasing in m",
                    &[("m", m.to_string()), ("ratio", ratio.to_string())],
                );
            }
            check = check.measure("ratio", ratio.clone());
            previous = Some(ratio);
        }
        check
    }
}

pub(crate) struct LpVertex;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct LpInput {
    columns: Vec<FinSeq>,
    costs: Vec<Scalar>,
    target: FinSeq,
}

const LP_ROWS: usize = 4;

impl Suite for LpVertex {
    const ID: &'static str = "LP-VERTEX";
    const OWNS: &'static [&'static str] = &["envelope.lp-optimality"];
    type Input = LpInput;

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> LpInput {
        let mut rng = trial_rng(corpus.seed, Self::ID, trial);
        let grid = ValueGrid::Uniform { bound: 2, max_den: 2 };
        let count = rng.random_range(1..=6);
        let columns: Vec<FinSeq> = (0..count)
            .map(|_| {
                let size = rng.random_range(1..=3);
                corpus::seq_of_size(&mut rng, LP_ROWS, size, &grid)
            })
            .collect();
        let costs = (0..count).map(|_| Scalar::ratio(rng.random_range(1..=8), 4)).collect();
        let target = if rng.random_bool(0.7) {
            columns.iter().fold(FinSeq::zero(), |acc, c| &acc + &c.scale(&Scalar::ratio(rng.random_range(0..=4), 2)))
        } else {
            let size = rng.random_range(0..=LP_ROWS);
            corpus::seq_of_size(&mut rng, LP_ROWS, size, &grid)
        };
        LpInput { columns, costs, target }
    }

    fn check(&self, x: &LpInput, _: &Evaluators, _: &Context) -> Check {
        let a: Vec<Vec<Scalar>> = (1..=LP_ROWS).map(|n| x.columns.iter().map(|c| c.coeff(n)).collect()).collect();
        let b: Vec<Scalar> = (1..=LP_ROWS).map(|n| x.target.coeff(n)).collect();
        let brute = minimize_by_vertices(&a, &b, &x.costs);
        match (minimize(&a, &b, &x.costs, DEFAULT_ITERATION_CAP), brute) {
            (Ok(s), Some(v)) => require(
                s.value == v,
                "simplex optimum equals the best vertex",
                &[("simplex", s.value.to_string()), ("vertices", v.to_string())],
            ),
            (Err(LpError::Infeasible), None) => Check::pass(),
            (got, brute) => Check::fail(
                "simplex and vertex enumeration agree on feasibility",
                &[("simplex", format!("{:?}", got.map(|s| s.value))), ("vertices", format!("{brute:?}"))],
            ),
        }
    }
}
