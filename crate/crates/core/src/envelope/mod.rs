//! Two-sided certified bounds on the convexification norm.
//!
//! The lower bound is `|φ(f)|` for a functional `φ` of norm at most one on the
//! combined space; the upper bound is the cost of an explicit decomposition
//! `f = Σ tⱼ gⱼ` into dictionary atoms, minimized by an exact simplex.

pub mod lp;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::norms::{norm_combined, sigma_g, Gauge, NormValue, SpaceSpec};
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, Injection, IntInterval, SignVector};

/// Bits of precision used when an irrational atom norm must be rounded up.
pub const COST_BITS: u32 = 64;

/// A combined gauge `max(‖·‖_gauge, ‖·‖_space)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CombinedSpace {
    pub gauge: Gauge,
    pub space: SpaceSpec,
}

impl CombinedSpace {
    pub fn new(gauge: Gauge, space: SpaceSpec) -> CombinedSpace {
        CombinedSpace { gauge, space }
    }

    pub fn norm(&self, f: &FinSeq) -> NormValue {
        norm_combined(f, self.space, self.gauge)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnvelopeError {
    #[error("functional {functional:?} is not certified for the {gauge} gauge")]
    InvalidFunctional { functional: DualFunctional, gauge: Gauge },
    #[error("empty functional family")]
    EmptyFamily,
    #[error("dictionary does not span target")]
    Infeasible,
    #[error("iteration cap exceeded (best feasible bound: {best:?})")]
    IterationCap { best: Option<Scalar> },
    #[error("seed must be positive and nonincreasing on [1, {m}]")]
    InvalidSeed { m: usize },
    #[error("dictionary atoms must be nonzero")]
    ZeroAtom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub vector: FinSeq,
    pub norm: NormValue,
}

/// Finite atom collection closed under negation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dictionary {
    pub atoms: Vec<Atom>,
    /// `𝟙*_{⟦1,m⟧}(seed)` for cyclic dictionaries.
    pub seed_mass: Option<Scalar>,
}

impl Dictionary {
    /// Atoms `±g` for every given `g`, duplicates removed, norms evaluated in parallel.
    pub fn from_vectors(vectors: Vec<FinSeq>, space: CombinedSpace) -> Result<Dictionary, EnvelopeError> {
        if vectors.iter().any(FinSeq::is_zero) {
            return Err(EnvelopeError::ZeroAtom);
        }
        let mut seen = BTreeSet::new();
        let mut unique = Vec::new();
        for g in vectors.into_iter().flat_map(|g| [-&g, g]) {
            let key = format!("{g}");
            if seen.insert(key) {
                unique.push(g);
            }
        }
        let atoms = unique
            .into_par_iter()
            .map(|vector| {
                let norm = space.norm(&vector);
                Atom { vector, norm }
            })
            .collect();
        Ok(Dictionary { atoms, seed_mass: None })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Union with another dictionary (duplicates removed).
    pub fn merge(&self, other: &Dictionary) -> Dictionary {
        let mut seen = BTreeSet::new();
        let atoms =
            self.atoms.iter().chain(&other.atoms).filter(|a| seen.insert(format!("{}", a.vector))).cloned().collect();
        Dictionary { atoms, seed_mass: self.seed_mass.clone().or_else(|| other.seed_mass.clone()) }
    }

    /// Largest atom norm.
    pub fn max_norm(&self) -> Option<NormValue> {
        self.atoms.iter().map(|a| a.norm.clone()).reduce(NormValue::max)
    }
}

/// The harmonic seed `(1/n)` on `⟦1, m⟧`.
pub fn harmonic_seed(m: usize) -> FinSeq {
    FinSeq::from_dense((1..=m).map(|n| Scalar::ratio(1, n as i64)))
}

/// `s_m = Σ_{n ≤ m} 1/n`.
pub fn harmonic_sum(m: usize) -> Scalar {
    (1..=m).map(|n| Scalar::ratio(1, n as i64)).sum()
}

/// `f_{k,m}`: the seed on `⟦1,m⟧` rotated cyclically `k` places to the right.
pub fn cyclic_shift(seed: &FinSeq, m: usize, k: usize) -> FinSeq {
    let images: Vec<usize> = (1..=m).map(|n| (n - 1 + k) % m + 1).collect();
    let rotation = Injection::from_images(1, &images).expect("rotation is a bijection");
    seed.project(&IndexSet::range(1, m)).permute(&rotation).expect("rotation is a bijection")
}

/// The `2m` atoms `±M_τ(f_{k,m})`, `τ_n = (−1)^{n−1}`, `k ∈ ⟦0, m−1⟧`.
pub fn cyclic_dictionary(m: usize, seed: &FinSeq, space: CombinedSpace) -> Result<Dictionary, EnvelopeError> {
    let values: Vec<Scalar> = (1..=m).map(|n| seed.coeff(n)).collect();
    let valid = m > 0 && values.iter().all(Scalar::is_positive) && values.windows(2).all(|w| w[0] >= w[1]);
    if !valid {
        return Err(EnvelopeError::InvalidSeed { m });
    }
    let tau = SignVector::alternating(m);
    let vectors = (0..m).map(|k| cyclic_shift(seed, m, k).multiply(&tau)).collect();
    let mut dict = Dictionary::from_vectors(vectors, space)?;
    dict.seed_mass = Some(values.iter().sum());
    Ok(dict)
}

/// Functionals of norm at most one on a combined space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DualFunctional {
    /// `𝟙*_I`; certified for the `𝔹` gauge.
    IntervalSum(IntInterval),
    /// `e_n*`; certified for both gauges through the weak-`ℓ_1` part.
    Coordinate(usize),
    /// `σ_g`; certified for the `𝔸` gauge.
    GreedySum,
}

impl DualFunctional {
    pub fn eval(&self, f: &FinSeq) -> Scalar {
        match self {
            DualFunctional::IntervalSum(i) => f.sum_interval(i),
            DualFunctional::Coordinate(n) => f.coeff(*n),
            DualFunctional::GreedySum => sigma_g(f),
        }
    }

    pub fn valid_for(&self, gauge: Gauge) -> bool {
        matches!(
            (self, gauge),
            (DualFunctional::Coordinate(_), _)
                | (DualFunctional::IntervalSum(_), Gauge::B)
                | (DualFunctional::GreedySum, Gauge::A)
        )
    }
}

/// Intervals with both endpoints in the support (`𝔹`), every support
/// coordinate, and `σ_g` (`𝔸`).
pub fn default_dual_family(f: &FinSeq, gauge: Gauge) -> Vec<DualFunctional> {
    let support: Vec<usize> = f.support().iter().collect();
    let mut family: Vec<DualFunctional> = support.iter().map(|&n| DualFunctional::Coordinate(n)).collect();
    if family.is_empty() {
        family.push(DualFunctional::Coordinate(1));
    }
    match gauge {
        Gauge::B => {
            for (i, &lo) in support.iter().enumerate() {
                for &hi in &support[i..] {
                    family.push(DualFunctional::IntervalSum(IntInterval::new(lo, hi).expect("lo ≤ hi")));
                }
            }
        }
        Gauge::A => family.push(DualFunctional::GreedySum),
    }
    family
}

/// `max |φ(f)|` over the family, with the first attaining functional.
pub fn lower_bound(
    f: &FinSeq,
    space: CombinedSpace,
    family: &[DualFunctional],
) -> Result<(Scalar, DualFunctional), EnvelopeError> {
    if let Some(bad) = family.iter().find(|func| !func.valid_for(space.gauge)) {
        return Err(EnvelopeError::InvalidFunctional { functional: bad.clone(), gauge: space.gauge });
    }
    let mut best: Option<(Scalar, DualFunctional)> = None;
    for func in family {
        let v = func.eval(f).abs();
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, func.clone()));
        }
    }
    best.ok_or(EnvelopeError::EmptyFamily)
}

/// Explicit decomposition `target = Σ weightsᵢ · atomsᵢ.vector`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub weights: Vec<Scalar>,
    pub atoms: Vec<Atom>,
    /// Rational cost charged per atom: its norm, rounded up when irrational.
    pub costs: Vec<Scalar>,
}

impl Decomposition {
    pub fn combination(&self) -> FinSeq {
        self.weights.iter().zip(&self.atoms).fold(FinSeq::zero(), |acc, (w, a)| &acc + &a.vector.scale(w))
    }

    pub fn cost(&self) -> Scalar {
        self.weights.iter().zip(&self.costs).map(|(w, c)| w * c).sum()
    }
}

/// Cheapest decomposition of `f` over the dictionary.
pub fn upper_bound(f: &FinSeq, dict: &Dictionary) -> Result<(NormValue, Decomposition), EnvelopeError> {
    upper_bound_with_cap(f, dict, lp::DEFAULT_ITERATION_CAP)
}

pub fn upper_bound_with_cap(
    f: &FinSeq,
    dict: &Dictionary,
    cap: usize,
) -> Result<(NormValue, Decomposition), EnvelopeError> {
    let rows: Vec<usize> =
        dict.atoms.iter().fold(f.support(), |acc, a| acc.union(&a.vector.support())).iter().collect();
    let a: Vec<Vec<Scalar>> =
        rows.iter().map(|&n| dict.atoms.iter().map(|atom| atom.vector.coeff(n)).collect()).collect();
    let b: Vec<Scalar> = rows.iter().map(|&n| f.coeff(n)).collect();
    let costs: Vec<Scalar> = dict.atoms.iter().map(|atom| atom.norm.upper_rational(COST_BITS)).collect();
    let solution = match lp::minimize(&a, &b, &costs, cap) {
        Ok(s) => s,
        Err(lp::LpError::Infeasible) => return Err(EnvelopeError::Infeasible),
        Err(lp::LpError::IterationCap { best, .. }) => {
            return Err(EnvelopeError::IterationCap { best: best.map(|s| s.value) })
        }
        Err(e) => unreachable!("nonnegative costs keep the program bounded: {e}"),
    };
    let mut decomposition = Decomposition { weights: Vec::new(), atoms: Vec::new(), costs: Vec::new() };
    for (j, w) in solution.x.into_iter().enumerate() {
        if w.is_positive() {
            decomposition.weights.push(w);
            decomposition.atoms.push(dict.atoms[j].clone());
            decomposition.costs.push(costs[j].clone());
        }
    }
    Ok((NormValue::Exact(solution.value), decomposition))
}

/// Dictionary generators for [`envelope_interval`].
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `±e_n` for `n` in the target's support.
    Coordinates,
    /// `±S_I(f)` for intervals `I` with endpoints in the target's support.
    IntervalPieces,
    /// The cyclic family on `⟦1, m⟧`; harmonic seed when `seed` is `None`,
    /// `m` = largest target index when `m` is `None`.
    Cyclic {
        m: Option<usize>,
        seed: Option<FinSeq>,
    },
    User(Vec<FinSeq>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvelopeConfig {
    /// `None` selects [`default_dual_family`].
    pub dual: Option<Vec<DualFunctional>>,
    pub generators: Vec<Generator>,
}

impl EnvelopeConfig {
    pub fn with_generators(generators: Vec<Generator>) -> EnvelopeConfig {
        EnvelopeConfig { dual: None, generators }
    }
}

pub fn build_dictionary(
    f: &FinSeq,
    space: CombinedSpace,
    generators: &[Generator],
) -> Result<Dictionary, EnvelopeError> {
    let mut dict = Dictionary { atoms: Vec::new(), seed_mass: None };
    for generator in generators {
        let part = match generator {
            Generator::Coordinates => Dictionary::from_vectors(f.support().iter().map(FinSeq::unit).collect(), space)?,
            Generator::IntervalPieces => {
                let support: Vec<usize> = f.support().iter().collect();
                let mut pieces = Vec::new();
                for (i, &lo) in support.iter().enumerate() {
                    for &hi in &support[i..] {
                        pieces.push(f.project_interval(&IntInterval::new(lo, hi).expect("lo ≤ hi")));
                    }
                }
                Dictionary::from_vectors(pieces, space)?
            }
            Generator::Cyclic { m, seed } => {
                let m = m.unwrap_or(f.max_index()).max(1);
                let seed = seed.clone().unwrap_or_else(|| harmonic_seed(m));
                cyclic_dictionary(m, &seed, space)?
            }
            Generator::User(vectors) => Dictionary::from_vectors(vectors.clone(), space)?,
        };
        dict = dict.merge(&part);
    }
    Ok(dict)
}

/// Certified `[lower, upper]` for the convexification norm of `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeBound {
    pub lower: Scalar,
    pub lower_cert: DualFunctional,
    pub upper: NormValue,
    pub upper_cert: Decomposition,
}

impl EnvelopeBound {
    /// Replays both certificates against `f`.
    pub fn check(&self, f: &FinSeq, space: CombinedSpace) -> Result<(), String> {
        if !self.lower_cert.valid_for(space.gauge) {
            return Err("lower certificate not valid for this gauge".into());
        }
        if self.lower_cert.eval(f).abs() != self.lower {
            return Err("lower certificate does not reproduce the bound".into());
        }
        if self.upper_cert.combination() != *f {
            return Err("decomposition does not sum to the target".into());
        }
        if self.upper_cert.weights.iter().any(|w| !w.is_positive()) {
            return Err("nonpositive weight".into());
        }
        for (atom, cost) in self.upper_cert.atoms.iter().zip(&self.upper_cert.costs) {
            if space.norm(&atom.vector) != atom.norm {
                return Err(format!("atom norm mismatch for {}", atom.vector));
            }
            if atom.norm.compare(&NormValue::Exact(cost.clone())) == Some(std::cmp::Ordering::Greater) {
                return Err("atom cost below its norm".into());
            }
        }
        if NormValue::Exact(self.upper_cert.cost()) != self.upper {
            return Err("decomposition cost does not reproduce the bound".into());
        }
        if NormValue::Exact(self.lower.clone()) > self.upper {
            return Err("lower bound exceeds upper bound".into());
        }
        Ok(())
    }
}

pub fn envelope_interval(
    f: &FinSeq,
    space: CombinedSpace,
    config: &EnvelopeConfig,
) -> Result<EnvelopeBound, EnvelopeError> {
    let family = config.dual.clone().unwrap_or_else(|| default_dual_family(f, space.gauge));
    let (lower, lower_cert) = lower_bound(f, space, &family)?;
    let dict = build_dictionary(f, space, &config.generators)?;
    let (upper, upper_cert) = upper_bound(f, &dict)?;
    Ok(EnvelopeBound { lower, lower_cert, upper, upper_cert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weak(gauge: Gauge) -> CombinedSpace {
        CombinedSpace::new(gauge, SpaceSpec::LorentzInf)
    }

    fn alt(m: usize) -> FinSeq {
        FinSeq::signed_indicator(&SignVector::alternating(m), &IndexSet::range(1, m))
    }

    #[test]
    fn cyclic_atoms() {
        let space = weak(Gauge::B);
        let dict = cyclic_dictionary(4, &harmonic_seed(4), space).unwrap();
        assert_eq!(dict.len(), 8);
        assert_eq!(dict.seed_mass, Some(Scalar::ratio(25, 12)));
        let first = cyclic_shift(&harmonic_seed(4), 4, 0).multiply(&SignVector::alternating(4));
        assert_eq!(first, FinSeq::from_dense([1, -2, 3, -4].map(|d: i64| Scalar::ratio(d.signum(), d.abs()))));
        // Rotations by 0 and 1 stay alternating-decreasing; rotations by 2 and 3
        // pick up 1/3 − 1/4 + 1 on a three-term interval.
        let mut norms: Vec<String> = dict.atoms.iter().map(|a| a.norm.to_string()).collect();
        norms.sort();
        assert_eq!(norms, ["1", "1", "1", "1", "13/12", "13/12", "13/12", "13/12"]);
        let total = (0..4).fold(FinSeq::zero(), |acc, k| &acc + &cyclic_shift(&harmonic_seed(4), 4, k));
        assert_eq!(total, FinSeq::indicator(&IndexSet::range(1, 4)).scale(&Scalar::ratio(25, 12)));
        let one = cyclic_dictionary(1, &harmonic_seed(1), space).unwrap();
        assert_eq!(one.len(), 2);
        assert!(cyclic_dictionary(2, &FinSeq::from_ints(&[1, 2]), space).is_err());
        assert!(cyclic_dictionary(2, &FinSeq::from_ints(&[1, 0]), space).is_err());
    }

    #[test]
    fn lower_bounds() {
        let space = weak(Gauge::B);
        let e1 = FinSeq::unit(1);
        let (v, w) = lower_bound(&e1, space, &default_dual_family(&e1, Gauge::B)).unwrap();
        assert_eq!(v, Scalar::one());
        assert!(matches!(w, DualFunctional::Coordinate(1)));
        let ones = FinSeq::indicator(&IndexSet::range(1, 6));
        let (v, _) = lower_bound(&ones, space, &default_dual_family(&ones, Gauge::B)).unwrap();
        assert_eq!(v, 6.into());
        let (v, _) = lower_bound(&alt(4), space, &default_dual_family(&alt(4), Gauge::B)).unwrap();
        assert_eq!(v, Scalar::one());
        let err = lower_bound(&e1, space, &[DualFunctional::GreedySum]).unwrap_err();
        assert!(matches!(err, EnvelopeError::InvalidFunctional { .. }));
        assert_eq!(lower_bound(&e1, space, &[]), Err(EnvelopeError::EmptyFamily));
    }

    #[test]
    fn intervals() {
        let space = weak(Gauge::B);
        let coords = EnvelopeConfig::with_generators(vec![Generator::Coordinates]);
        let e1 = envelope_interval(&FinSeq::unit(1), space, &coords).unwrap();
        assert_eq!((e1.lower.clone(), e1.upper.clone()), (Scalar::one(), NormValue::Exact(Scalar::one())));
        let ones = FinSeq::indicator(&IndexSet::range(1, 8));
        let b = envelope_interval(&ones, space, &coords).unwrap();
        assert_eq!(b.lower, 8.into());
        assert_eq!(b.upper, NormValue::Exact(8.into()));
        b.check(&ones, space).unwrap();
        let cyclic = EnvelopeConfig::with_generators(vec![Generator::Cyclic { m: None, seed: None }]);
        let a = envelope_interval(&alt(4), space, &cyclic).unwrap();
        assert_eq!(a.lower, Scalar::one());
        assert_eq!(a.upper, NormValue::Exact(2.into()));
        a.check(&alt(4), space).unwrap();
    }

    #[test]
    fn simplex_matches_vertex_search_on_cyclic_family() {
        let space = weak(Gauge::B);
        let dict = cyclic_dictionary(4, &harmonic_seed(4), space).unwrap();
        let target = alt(4);
        let a: Vec<Vec<Scalar>> =
            (1..=4).map(|n| dict.atoms.iter().map(|atom| atom.vector.coeff(n)).collect()).collect();
        let b: Vec<Scalar> = (1..=4).map(|n| target.coeff(n)).collect();
        let c: Vec<Scalar> = dict.atoms.iter().map(|atom| atom.norm.exact().unwrap()).collect();
        let (upper, _) = upper_bound(&target, &dict).unwrap();
        assert_eq!(upper, NormValue::Exact(lp::minimize_by_vertices(&a, &b, &c).unwrap()));
    }

    #[test]
    fn infeasible_dictionary() {
        let space = weak(Gauge::A);
        let config = EnvelopeConfig::with_generators(vec![Generator::User(vec![FinSeq::unit(2)])]);
        assert_eq!(envelope_interval(&FinSeq::unit(1), space, &config), Err(EnvelopeError::Infeasible));
    }
}
