//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Every numeric check is exact (zero tolerance). Wall-clock budgets are
//! pinned below. Criteria listed in `KNOWN_RED` are expected to fail for the
//! documented reason; the run exits nonzero if the failing set differs from
//! that list in either direction.

use std::collections::BTreeSet;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use greedylab_cli::seqfile::{self, Encoding};
use greedylab_core::constructions::{
    alternating_from_leibniz, build_h, build_h0, discontinuity_witness, leibniz_check, three_block_seq, H0Params,
};
use greedylab_core::envelope::{
    cyclic_dictionary, envelope_interval, harmonic_seed, harmonic_sum, upper_bound, CombinedSpace, EnvelopeConfig,
    Generator,
};
use greedylab_core::norms::{norm_b, sigma_g};
use greedylab_core::verify::{
    alternating_indicator, b_asymmetry_witness, exhaustive_count, run_suite, CorpusSpec, SuiteReport,
};
use greedylab_core::{greedy_chain, FinSeq, Gauge, IndexSet, IntInterval, NormValue, Scalar, SpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

const BUDGET_THREE_BLOCK: Duration = Duration::from_secs(1);
const BUDGET_ORACLE: Duration = Duration::from_secs(30);
const BUDGET_ENVELOPE: Duration = Duration::from_secs(10);
const BUDGET_H0: Duration = Duration::from_secs(20);

const ORACLE_CASES: usize = 100_000;
const ENVELOPE_SIZES: [usize; 5] = [4, 8, 16, 32, 64];

const KNOWN_RED: [(usize, &str); 2] = [
    (
        6,
        "the m = 4 clause expects [1, 48/25]; two cyclic atoms have combined norm 13/12, \
         and the exact optimum over the eight atoms is 2 (simplex and vertex enumeration agree)",
    ),
    (
        7,
        "preset B truncation norms strictly increase with K (…, 5987/4096, 24259/16384, 97667/65536), \
         so they are not constant from K = 5",
    ),
];

type Outcome = Result<(), String>;
type Criterion = (usize, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, start: Instant) -> Outcome {
    let spent = start.elapsed();
    ensure(spent <= budget, || format!("took {spent:.2?}, budget {budget:?}"))
}

/// Reports every collected problem plus any budget overrun.
fn settle(mut problems: Vec<String>, budget: Duration, start: Instant) -> Outcome {
    problems.extend(within(budget, start).err());
    ensure(problems.is_empty(), || problems.join("; "))
}

fn suite_passes(id: &str, trials: usize) -> Outcome {
    let corpus = CorpusSpec { seed: SEED, trials, ..CorpusSpec::default() };
    let report = run_suite(id, &corpus).map_err(|e| e.to_string())?;
    report_passes(&report)
}

fn report_passes(report: &SuiteReport) -> Outcome {
    ensure(report.passed, || {
        let first = report.failures.first().map(|f| f.relation.as_str()).unwrap_or("?");
        format!("{}: {} of {} trials failed, first: {first}", report.suite, report.failure_count, report.trials)
    })
}

fn three_block() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for case in 0..200 {
        // Tail on ⟦3, 3+len⟧ with entries in (0, 1] and mass at least 1.
        let len = rng.random_range(1..=12);
        let mut pairs = Vec::new();
        let mut mass = Scalar::zero();
        for n in 3..3 + len {
            let v = Scalar::ratio(rng.random_range(1..=8), rng.random_range(1..=8)).min(Scalar::one());
            mass = &mass + &v;
            pairs.push((n, v));
        }
        let mut n = 3 + len;
        while mass < Scalar::one() {
            mass = &mass + Scalar::one();
            pairs.push((n, Scalar::one()));
            n += 1;
        }
        let tail = FinSeq::from_pairs(pairs).expect("increasing");
        let t = if case % 4 == 0 { Scalar::one() } else { Scalar::ratio(rng.random_range(0..64), 64) };
        let expected = if t == Scalar::one() { Scalar::one() + &mass } else { Scalar::one() + &mass - &t };
        let found = norm_b(&three_block_seq(&t, &tail));
        ensure(found == expected, || format!("case {case}: t = {t}, found {found}, expected {expected}"))?;
    }
    within(BUDGET_THREE_BLOCK, start)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let corpus = CorpusSpec::oracle(ORACLE_CASES, SEED);
    ensure(exhaustive_count(&corpus) < ORACLE_CASES, || "exhaustive prefix exceeds the sample".into())?;
    report_passes(&run_suite("ORACLE-EQ", &corpus).map_err(|e| e.to_string())?)?;
    within(BUDGET_ORACLE, start)
}

fn quasi_greedy() -> Outcome {
    suite_passes("QG-B", 1000)?;
    suite_passes("SCHAUDER", 1000)
}

fn leibniz() -> Outcome {
    suite_passes("LEIBNIZ", 500)?;
    // g = (4, 3, 2, 1) in singleton blocks alternates to the stored fixture.
    let (fixture, _) = b_asymmetry_witness();
    let singletons: Vec<IntInterval> = (1..=4).map(|n| IntInterval::new(n, n).expect("nonempty")).collect();
    let data = leibniz_check(&FinSeq::from_ints(&[4, 3, 2, 1]), &singletons).map_err(|e| e.to_string())?;
    let alt = alternating_from_leibniz(&data);
    ensure(alt == fixture, || format!("alternating form {alt} differs from the fixture"))?;
    ensure(norm_b(&alt) == data.alpha, || format!("fixture gauge {} vs α {}", norm_b(&alt), data.alpha))
}

fn discontinuity() -> Outcome {
    let tail_mass: Scalar = (3..=32).map(|n| Scalar::ratio(1, n)).sum();
    let phi = |t: &Scalar| -> Result<NormValue, String> {
        Ok(discontinuity_witness(32, t).map_err(|e| e.to_string())?.combined_norm())
    };
    for t in [Scalar::zero(), Scalar::ratio(1, 2), Scalar::ratio(9, 10), Scalar::ratio(99, 100)] {
        let expected = NormValue::Exact(Scalar::one() + &tail_mass - &t);
        let found = phi(&t)?;
        ensure(found == expected, || format!("Φ({t}) = {found:?}, expected {expected:?}"))?;
    }
    let at_one = phi(&Scalar::one())?;
    ensure(at_one == NormValue::Exact(Scalar::one() + &tail_mass), || format!("Φ(1) = {at_one:?}"))?;
    // Φ(t) → 1 + a − 1 = a as t → 1⁻, so the jump is Φ(1) − a.
    let jump = at_one.exact().expect("rational") - &tail_mass;
    ensure(jump == Scalar::one(), || format!("jump {jump}"))
}

fn envelope() -> Outcome {
    let start = Instant::now();
    let space = CombinedSpace::new(Gauge::B, SpaceSpec::LorentzInf);
    let full = EnvelopeConfig::with_generators(vec![
        Generator::Coordinates,
        Generator::IntervalPieces,
        Generator::Cyclic { m: None, seed: None },
    ]);
    let cyclic = EnvelopeConfig::with_generators(vec![Generator::Cyclic { m: None, seed: None }]);
    let mut problems = Vec::new();
    let mut previous: Option<Scalar> = None;
    for m in ENVELOPE_SIZES {
        let ones = FinSeq::indicator(&IndexSet::range(1, m));
        let bound = envelope_interval(&ones, space, &full).map_err(|e| e.to_string())?;
        bound.check(&ones, space)?;
        let mm = Scalar::from(m);
        if bound.lower != mm || bound.upper != NormValue::Exact(mm.clone()) {
            problems.push(format!("m = {m}: indicator interval [{}, {:?}]", bound.lower, bound.upper));
        }

        let alt = alternating_indicator(m);
        let dict = cyclic_dictionary(m, &harmonic_seed(m), space).map_err(|e| e.to_string())?;
        let atom_bound = dict.max_norm().and_then(|v| v.exact()).ok_or("atom norms are not rational")?;
        let (upper, _) = upper_bound(&alt, &dict).map_err(|e| e.to_string())?;
        let upper = upper.exact().ok_or("upper bound is not rational")?;
        let ceiling = &atom_bound * &mm / harmonic_sum(m);
        if upper > ceiling {
            problems.push(format!("m = {m}: upper {upper} above D·m/s_m = {ceiling}"));
        }
        if m == 4 {
            let bound = envelope_interval(&alt, space, &cyclic).map_err(|e| e.to_string())?;
            bound.check(&alt, space)?;
            let wanted = (Scalar::one(), NormValue::Exact(Scalar::ratio(48, 25)));
            if (bound.lower.clone(), bound.upper.clone()) != wanted {
                problems.push(format!("m = 4: interval [{}, {:?}], expected [1, 48/25]", bound.lower, bound.upper));
            }
        }
        let ratio = Scalar::from(m / 2) / &upper;
        if previous.as_ref().is_some_and(|p| ratio <= *p) {
            problems.push(format!("m = {m}: ratio {ratio} not above the previous one"));
        }
        previous = Some(ratio);
    }
    settle(problems, BUDGET_ENVELOPE, start)
}

fn h0_dichotomy() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let three_halves = Scalar::ratio(3, 2);
    let depth = 6;
    let a = build_h0(&H0Params::preset_a(depth)).map_err(|e| e.to_string())?;
    let value = norm_b(&a.h0);
    if value < three_halves.pow(depth as u32) {
        problems.push(format!("preset A K = {depth}: gauge {value} below (3/2)^K"));
    }
    for k in 1..=depth {
        if a.oscillation(k) < three_halves.pow(k as u32) {
            problems.push(format!("preset A k = {k}: oscillation {} below (3/2)^k", a.oscillation(k)));
        }
    }
    for k in 1..depth {
        let truncated = build_h0(&H0Params::preset_a(k)).map_err(|e| e.to_string())?;
        if norm_b(&truncated.h0) < three_halves.pow(k as u32) {
            problems.push(format!("preset A K = {k}: gauge below (3/2)^K"));
        }
    }
    let b: Vec<Scalar> = (2..=7)
        .map(|k| build_h0(&H0Params::preset_b(k)).map(|o| norm_b(&o.h0)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let from_five = &b[3..];
    if from_five.windows(2).any(|w| w[0] != w[1]) {
        let shown: Vec<String> = b.iter().map(Scalar::to_string).collect();
        problems.push(format!("preset B norms for K = 2..7 are {}, not constant from K = 5", shown.join(", ")));
    }
    settle(problems, BUDGET_H0, start)
}

fn doubled() -> Outcome {
    let out = build_h(&H0Params::preset_b(5)).map_err(|e| e.to_string())?;
    let mut moduli: Vec<Scalar> = out.base.h0.iter().map(|(_, v)| v.abs()).collect();
    moduli.sort_unstable_by(|x, y| y.cmp(x));
    for set in greedy_chain(&out.h) {
        let sum = out.h.sum_over(&set);
        if set.len() % 2 == 0 {
            ensure(sum.is_zero(), || format!("even set of size {} sums to {sum}", set.len()))?;
        } else {
            let expected = &moduli[set.len().div_ceil(2) - 1];
            ensure(sum.abs() == *expected, || {
                format!("odd set of size {}: |sum| {} vs {expected}", set.len(), sum.abs())
            })?;
        }
    }
    let sigma = sigma_g(&out.h);
    ensure(sigma.is_zero(), || format!("σ_g(h) = {sigma}"))
}

fn background() -> Outcome {
    for id in ["TWISTED-ID", "BS-LEM", "B99", "B1-SUBADD", "ACONV"] {
        suite_passes(id, 1000)?;
    }
    Ok(())
}

fn symmetry() -> Outcome {
    suite_passes("SYMM", 500)?;
    let (f, pi) = b_asymmetry_witness();
    let moved = f.permute(&pi).map_err(|e| e.to_string())?;
    let (before, after) = (norm_b(&f), norm_b(&moved));
    ensure(before != after, || format!("witness does not separate: {before} = {after}"))
}

fn greedylab(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_greedylab"))
        .args(args)
        .env_remove("GREEDYLAB_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited {:?}", out.status.code()))?;
    Ok(out.stdout)
}

fn determinism_and_round_trip() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 4] = [
        &["verify", "--suite", "all", "--trials", "40", "--seed", "7"],
        &["construct", "--which", "h", "--preset", "B", "--depth", "4", "--format", "json"],
        &["envelope", "--target", "alt-indicator:8", "--dict", "cyclic:harmonic"],
        &["democracy", "--which", "A", "--m-max", "5"],
    ];
    for args in runs {
        let mut payloads = Vec::new();
        for threads in ["1", "4"] {
            let meta = dir.path().join(format!("meta-{threads}.json"));
            let mut full = vec!["--threads", threads];
            full.extend_from_slice(args);
            if args[0] == "construct" {
                full.extend_from_slice(&["--meta", meta.to_str().unwrap()]);
            }
            let stdout = greedylab(&full)?;
            let side = if args[0] == "construct" { fs::read(&meta).map_err(|e| e.to_string())? } else { Vec::new() };
            payloads.push((stdout, side));
        }
        ensure(payloads[0] == payloads[1], || format!("{args:?} differs between 1 and 4 threads"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for case in 0..1000 {
        let mut pairs = Vec::new();
        let mut n = 0;
        for _ in 0..rng.random_range(0..=12) {
            n += rng.random_range(1..=5);
            let num = rng.random_range(-1_000_000_i64..=1_000_000);
            pairs.push((n, Scalar::ratio(num, rng.random_range(1..=1000))));
        }
        let f = FinSeq::from_pairs(pairs.into_iter().filter(|(_, v)| !v.is_zero())).expect("increasing");
        for encoding in [Encoding::Lines, Encoding::Json] {
            let text = seqfile::write(&f, encoding);
            let back = seqfile::parse(&text).map_err(|e| format!("case {case}: {e}"))?;
            ensure(back == f, || format!("case {case}: {encoding:?} round trip changed the sequence"))?;
            ensure(seqfile::write(&back, encoding) == text, || format!("case {case}: {encoding:?} text not stable"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "three-block exact formula", three_block),
        (2, "oracle equivalence", oracle_equivalence),
        (3, "quasi-greedy constant 1", quasi_greedy),
        (4, "Leibniz norm law and separation", leibniz),
        (5, "discontinuity jump", discontinuity),
        (6, "envelope democracy and UCC failure", envelope),
        (7, "h0 dichotomy surrogates", h0_dichotomy),
        (8, "doubled construction", doubled),
        (9, "background inequalities", background),
        (10, "symmetry split", symmetry),
        (11, "determinism and round trip", determinism_and_round_trip),
    ];
    let mut failing = BTreeSet::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(()) => println!("PASS {id:>2} {name} ({:.2?})", start.elapsed()),
            Err(why) => {
                println!("FAIL {id:>2} {name} ({:.2?}): {why}", start.elapsed());
                failing.insert(id);
            }
        }
    }
    let expected: BTreeSet<usize> = KNOWN_RED.iter().map(|&(id, _)| id).collect();
    for (id, why) in KNOWN_RED {
        println!("known red {id}: {why}");
    }
    if failing != expected {
        eprintln!("failing criteria {failing:?} differ from the known red set {expected:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} of 11 pass; failures match the known red set", 11 - failing.len());
}
