//! Property suites over seeded random corpora.
//!
//! Every trial draws its input from its own ChaCha stream keyed by the corpus
//! seed, the suite id and the trial index, so the corpus does not depend on
//! how trials are scheduled across threads. Failures keep the serialized
//! input and can be replayed with [`replay`].

mod corpus;
mod envelope_suites;
mod norm_suites;
mod structure_suites;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use corpus::{exhaustive_count, exhaustive_seq, trial_rng, CorpusSpec, ValueGrid};
pub use envelope_suites::alternating_indicator;
pub use norm_suites::b_asymmetry_witness;
pub use structure_suites::PRESET_B_NORMS;

use crate::norms::{norm_a, norm_b};
use crate::scalar::Scalar;
use crate::seq::FinSeq;

/// At most this many failures are kept per report.
pub const MAX_STORED_FAILURES: usize = 32;

/// The gauge implementations under test; swapped out by mutation tests.
#[derive(Clone, Copy)]
pub struct Evaluators {
    pub norm_b: fn(&FinSeq) -> Scalar,
    pub norm_a: fn(&FinSeq) -> Scalar,
}

impl Default for Evaluators {
    fn default() -> Evaluators {
        Evaluators { norm_b, norm_a }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub input: serde_json::Value,
    pub relation: String,
    pub observed: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
    /// Corpus maxima; empirical lower bounds on the true constants.
    pub constants: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite {0}")]
    UnknownSuite(String),
    #[error("witness does not match the suite input: {0}")]
    BadWitness(String),
}

/// Outcome of one trial.
#[derive(Debug, Default)]
pub(crate) struct Check {
    failure: Option<(String, Vec<(String, String)>)>,
    measures: Vec<(&'static str, Scalar)>,
}

impl Check {
    pub(crate) fn pass() -> Check {
        Check::default()
    }

    pub(crate) fn fail(relation: impl Into<String>, observed: &[(&str, String)]) -> Check {
        Check {
            failure: Some((relation.into(), observed.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())),
            measures: Vec::new(),
        }
    }

    pub(crate) fn measure(mut self, name: &'static str, value: Scalar) -> Check {
        self.measures.push((name, value));
        self
    }

    pub(crate) fn and(self, next: impl FnOnce() -> Check) -> Check {
        if self.failure.is_some() {
            self
        } else {
            let mut out = next();
            out.measures.extend(self.measures);
            out
        }
    }
}

/// Helper: fail with `relation` unless `ok`.
pub(crate) fn require(ok: bool, relation: &str, observed: &[(&str, String)]) -> Check {
    if ok {
        Check::pass()
    } else {
        Check::fail(relation, observed)
    }
}

/// Corpus-wide data computed before the trials run.
#[derive(Debug, Clone, Default)]
pub(crate) struct Context {
    pub kappa: Option<Scalar>,
}

pub(crate) trait Suite: Sync {
    const ID: &'static str;
    /// Invariant keys this suite is responsible for.
    const OWNS: &'static [&'static str];
    type Input: Serialize + DeserializeOwned + Send + Sync;

    /// Suites over a fixed list of cases report `Some(len)`.
    fn fixed_cases(&self) -> Option<usize> {
        None
    }

    fn generate(&self, trial: usize, corpus: &CorpusSpec) -> Self::Input;

    fn prepare(&self, _corpus: &CorpusSpec, _ev: &Evaluators) -> Context {
        Context::default()
    }

    fn check(&self, input: &Self::Input, ev: &Evaluators, ctx: &Context) -> Check;
}

fn run<S: Suite>(suite: &S, corpus: &CorpusSpec, ev: &Evaluators) -> SuiteReport {
    let trials = suite.fixed_cases().map_or(corpus.trials, |n| n.min(corpus.trials));
    let ctx = suite.prepare(corpus, ev);
    let outcomes: Vec<(usize, Check, Option<serde_json::Value>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let input = suite.generate(trial, corpus);
            let check = suite.check(&input, ev, &ctx);
            let json = check.failure.is_some().then(|| serde_json::to_value(&input).expect("inputs serialize"));
            (trial, check, json)
        })
        .collect();
    let mut constants: BTreeMap<&'static str, Scalar> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for (trial, check, json) in outcomes {
        for (name, value) in check.measures {
            let slot = constants.entry(name).or_insert_with(|| value.clone());
            if value > *slot {
                *slot = value;
            }
        }
        if let Some((relation, observed)) = check.failure {
            failure_count += 1;
            if failures.len() < MAX_STORED_FAILURES {
                failures.push(Failure {
                    trial,
                    input: json.expect("serialized on failure"),
                    relation,
                    observed: observed.into_iter().collect(),
                });
            }
        }
    }
    SuiteReport {
        suite: S::ID.to_string(),
        seed: corpus.seed,
        trials,
        passed: failure_count == 0,
        failure_count,
        failures,
        constants: constants.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    }
}

fn replay_one<S: Suite>(
    suite: &S,
    failure: &Failure,
    corpus: &CorpusSpec,
    ev: &Evaluators,
) -> Result<bool, VerifyError> {
    let input: S::Input =
        serde_json::from_value(failure.input.clone()).map_err(|e| VerifyError::BadWitness(e.to_string()))?;
    let ctx = suite.prepare(corpus, ev);
    Ok(suite.check(&input, ev, &ctx).failure.is_some())
}

macro_rules! registry {
    ($($suite:expr),* $(,)?) => {
        /// Every registered suite id, in run order.
        pub const SUITE_IDS: &[&str] = &[$(suite_id(&$suite)),*];

        /// `(suite id, owned invariant keys)` for every registered suite.
        pub fn ownership() -> Vec<(&'static str, &'static [&'static str])> {
            vec![$(owned(&$suite)),*]
        }

        pub fn run_suite_with(id: &str, corpus: &CorpusSpec, ev: &Evaluators) -> Result<SuiteReport, VerifyError> {
            $(if id == suite_id(&$suite) {
                return Ok(run(&$suite, corpus, ev));
            })*
            Err(VerifyError::UnknownSuite(id.to_string()))
        }

        /// Re-runs a stored failure; `Ok(true)` when it still fails.
        pub fn replay_with(
            report: &SuiteReport,
            failure: &Failure,
            corpus: &CorpusSpec,
            ev: &Evaluators,
        ) -> Result<bool, VerifyError> {
            $(if report.suite == suite_id(&$suite) {
                return replay_one(&$suite, failure, corpus, ev);
            })*
            Err(VerifyError::UnknownSuite(report.suite.clone()))
        }
    };
}

const fn suite_id<S: Suite>(_: &S) -> &'static str {
    S::ID
}

fn owned<S: Suite>(_: &S) -> (&'static str, &'static [&'static str]) {
    (S::ID, S::OWNS)
}

use envelope_suites::*;
use norm_suites::*;
use structure_suites::*;

registry!(
    TwistedIdentity,
    Rearrangement,
    GreedyClosure,
    OracleEquivalence,
    GaugeBelowL1,
    IntervalProjection,
    QuasiGreedy,
    Subadditivity,
    RhoSubadditivity,
    TailBound,
    GreedySumDefect,
    Symmetry,
    LorentzEmbedding,
    PConvexity,
    ThreeBlock,
    Democracy,
    EnvelopeCertificates,
    EnvelopeMonotonicity,
    EnvelopeUcc,
    LpVertex,
    H0Dichotomy,
    Leibniz,
    Discontinuity,
    Doubled,
);

/// Invariant keys that must each be owned by exactly one suite.
pub const INVARIANTS: &[&str] = &[
    "seq.twisted-identity",
    "seq.rearrangement",
    "greedy.closure",
    "norms.oracle-equivalence",
    "norms.b-le-l1",
    "norms.interval-projection",
    "norms.quasi-greedy",
    "norms.subadditivity",
    "norms.rho-subadditivity",
    "norms.tail-bound",
    "norms.greedy-sum-defect",
    "norms.symmetry",
    "norms.lorentz-embedding",
    "norms.p-convexity",
    "norms.three-block",
    "norms.democracy",
    "envelope.certificate-soundness",
    "envelope.lower-le-upper",
    "envelope.monotonicity",
    "envelope.ucc-failure",
    "envelope.lp-optimality",
    "constructions.preset-a-divergence",
    "constructions.preset-b-boundedness",
    "constructions.preset-a-oscillation",
    "constructions.gap-mass",
    "constructions.leibniz-laws",
    "constructions.discontinuity",
    "constructions.doubled",
];

pub fn run_suite(id: &str, corpus: &CorpusSpec) -> Result<SuiteReport, VerifyError> {
    run_suite_with(id, corpus, &Evaluators::default())
}

pub fn replay(report: &SuiteReport, failure: &Failure, corpus: &CorpusSpec) -> Result<bool, VerifyError> {
    replay_with(report, failure, corpus, &Evaluators::default())
}

pub fn run_all(corpus: &CorpusSpec) -> Vec<SuiteReport> {
    run_all_with(corpus, &Evaluators::default())
}

pub fn run_all_with(corpus: &CorpusSpec, ev: &Evaluators) -> Vec<SuiteReport> {
    SUITE_IDS.iter().map(|id| run_suite_with(id, corpus, ev).expect("registered")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn every_invariant_has_one_owner() {
        let mut owners: HashMap<&str, Vec<&str>> = HashMap::new();
        for (id, keys) in ownership() {
            for key in keys {
                owners.entry(key).or_default().push(id);
            }
        }
        for key in INVARIANTS {
            assert_eq!(owners.get(key).map(Vec::len), Some(1), "{key}: {:?}", owners.get(key));
        }
        for key in owners.keys() {
            assert!(INVARIANTS.contains(key), "unlisted key {key}");
        }
        let mut ids = SUITE_IDS.to_vec();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), SUITE_IDS.len());
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(run_suite("BOGUS", &CorpusSpec::default()), Err(VerifyError::UnknownSuite("BOGUS".into())));
    }

    #[test]
    fn zero_trials_pass_vacuously() {
        let corpus = CorpusSpec { trials: 0, ..CorpusSpec::default() };
        for report in run_all(&corpus) {
            assert!(report.passed && report.trials == 0, "{}", report.suite);
        }
    }

    #[test]
    fn cheap_suites_pass_and_repeat() {
        let corpus = CorpusSpec { trials: 40, ..CorpusSpec::default() };
        for id in SUITE_IDS {
            if ["ENV-UCC", "H0-DICHOTOMY", "DOUBLED"].contains(id) {
                continue;
            }
            let report = run_suite(id, &corpus).unwrap();
            assert!(report.passed, "{id}: {:?}", report.failures.first());
            assert_eq!(run_suite(id, &corpus).unwrap(), report);
        }
    }

    fn linf(f: &FinSeq) -> Scalar {
        f.linf()
    }

    #[test]
    fn mutant_gauge_is_caught_and_replays() {
        let ev = Evaluators { norm_b: linf, ..Evaluators::default() };
        let corpus = CorpusSpec { trials: 60, ..CorpusSpec::default() };
        for id in ["B0-LE-L1", "BNORM3"] {
            let report = run_suite_with(id, &corpus, &ev).unwrap();
            assert!(!report.passed, "{id}");
            let failure = &report.failures[0];
            assert!(replay_with(&report, failure, &corpus, &ev).unwrap());
            assert!(!replay(&report, failure, &corpus).unwrap());
        }
    }
}
