//! Upper and lower democracy functions over signed indicators in a window.
//!
//! `φ_u(m)` is the largest norm of `𝟙_{ε,A}` with `|A| ≤ m`, and `φ_l(m)` the
//! smallest with `m ≤ |A|`; here `A` ranges over subsets of `⟦1, window⟧`.

use serde::{Deserialize, Serialize};

use super::{norm_gauge, Gauge, NormValue, OracleError, SpaceSpec};
use crate::scalar::Scalar;
use crate::seq::{FinSeq, IndexSet, Sign, SignVector};

/// Which norm the signed indicators are measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DemocracySpace {
    Gauge(Gauge),
    Space(SpaceSpec),
    Combined(Gauge, SpaceSpec),
}

impl DemocracySpace {
    pub fn norm(&self, f: &FinSeq) -> NormValue {
        match self {
            DemocracySpace::Gauge(g) => NormValue::Exact(norm_gauge(f, *g)),
            DemocracySpace::Space(s) => s.norm(f),
            DemocracySpace::Combined(g, s) => super::norm_combined(f, *s, *g),
        }
    }

    /// Norm of any `𝟙_{ε,A}` with `plus` positive and `minus` negative signs.
    pub fn indicator_norm(&self, plus: usize, minus: usize) -> NormValue {
        let gauge = || NormValue::Exact(Scalar::from(plus.max(minus)));
        match self {
            DemocracySpace::Gauge(_) => gauge(),
            DemocracySpace::Space(s) => lorentz_of_size(*s, plus + minus),
            DemocracySpace::Combined(_, s) => gauge().max(lorentz_of_size(*s, plus + minus)),
        }
    }
}

/// Lorentz norm of a unimodular vector with `n` nonzero entries.
fn lorentz_of_size(space: SpaceSpec, n: usize) -> NormValue {
    match space {
        SpaceSpec::LorentzInf | SpaceSpec::Lorentz(1) => NormValue::Exact(Scalar::from(n)),
        SpaceSpec::Lorentz(q) => NormValue::QthPower { power: (1..=n).map(|j| Scalar::from(j).pow(q - 1)).sum(), q },
    }
}

/// A signed indicator `𝟙_{ε,A}`, recorded by its set and its negative part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedIndicator {
    pub set: IndexSet,
    pub minus: IndexSet,
}

impl SignedIndicator {
    pub fn to_seq(&self) -> FinSeq {
        let signs = SignVector::from_pairs(self.minus.iter().map(|n| (n, Sign::Minus)));
        FinSeq::signed_indicator(&signs, &self.set)
    }

    fn leading(plus: usize, minus: usize) -> SignedIndicator {
        SignedIndicator { set: IndexSet::range(1, plus + minus), minus: IndexSet::range(plus + 1, plus + minus) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemocracyProfile {
    pub m_max: usize,
    pub window: usize,
    /// `lower[m − 1] = φ_l(m)`.
    pub lower: Vec<NormValue>,
    /// `upper[m − 1] = φ_u(m)`.
    pub upper: Vec<NormValue>,
    /// Attaining `(lower, upper)` indicators per `m`.
    pub witnesses: Vec<(SignedIndicator, SignedIndicator)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DemocracyError {
    #[error("window {window} is smaller than m_max {m_max}")]
    WindowTooSmall { m_max: usize, window: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Per-size extremes `(min, max)` with witnesses, for sizes `1..=window`.
type Valued = (NormValue, SignedIndicator);
type SizeExtremes = Vec<(Valued, Valued)>;

fn assemble(m_max: usize, window: usize, by_size: SizeExtremes) -> DemocracyProfile {
    let mut lower = Vec::with_capacity(m_max);
    let mut upper = Vec::with_capacity(m_max);
    let mut witnesses = Vec::with_capacity(m_max);
    let mut running_max: Option<Valued> = None;
    for m in 1..=m_max {
        let candidate = by_size[m - 1].1.clone();
        running_max = Some(match running_max {
            Some(cur) if cur.0 >= candidate.0 => cur,
            _ => candidate,
        });
        let low = by_size[m - 1..]
            .iter()
            .map(|e| e.0.clone())
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .expect("window ≥ m");
        let up = running_max.clone().expect("set above");
        lower.push(low.0);
        upper.push(up.0);
        witnesses.push((low.1, up.1));
    }
    DemocracyProfile { m_max, window, lower, upper, witnesses }
}

/// `φ_l` and `φ_u` for `m = 1..=m_max` from the sign-count closed forms.
pub fn democracy_profile(
    space: DemocracySpace,
    m_max: usize,
    window: usize,
) -> Result<DemocracyProfile, DemocracyError> {
    if window < m_max {
        return Err(DemocracyError::WindowTooSmall { m_max, window });
    }
    let by_size = (1..=window)
        .map(|n| {
            let mut lo: Option<Valued> = None;
            let mut hi: Option<Valued> = None;
            for plus in (0..=n).rev() {
                let v = space.indicator_norm(plus, n - plus);
                let w = SignedIndicator::leading(plus, n - plus);
                if lo.as_ref().is_none_or(|c| v < c.0) {
                    lo = Some((v.clone(), w.clone()));
                }
                if hi.as_ref().is_none_or(|c| v > c.0) {
                    hi = Some((v, w));
                }
            }
            (lo.expect("n ≥ 1"), hi.expect("n ≥ 1"))
        })
        .collect();
    Ok(assemble(m_max, window, by_size))
}

/// Same profile by evaluating every signed indicator in the window.
pub fn democracy_profile_brute(
    space: DemocracySpace,
    m_max: usize,
    window: usize,
) -> Result<DemocracyProfile, DemocracyError> {
    if window < m_max {
        return Err(DemocracyError::WindowTooSmall { m_max, window });
    }
    if window > 10 {
        return Err(OracleError::SupportTooLarge { support: window, cap: 10 }.into());
    }
    let mut by_size: Vec<Option<(Valued, Valued)>> = vec![None; window];
    for mask in 1u32..(1 << window) {
        let set: IndexSet = (1..=window).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let members: Vec<usize> = set.iter().collect();
        for signs in 0u32..(1 << members.len()) {
            let minus: IndexSet =
                members.iter().enumerate().filter(|(j, _)| signs >> j & 1 == 1).map(|(_, &n)| n).collect();
            let w = SignedIndicator { set: set.clone(), minus };
            let v = space.norm(&w.to_seq());
            let slot = &mut by_size[members.len() - 1];
            match slot {
                None => *slot = Some(((v.clone(), w.clone()), (v, w))),
                Some((lo, hi)) => {
                    if v < lo.0 {
                        *lo = (v.clone(), w.clone());
                    }
                    if v > hi.0 {
                        *hi = (v, w);
                    }
                }
            }
        }
    }
    Ok(assemble(m_max, window, by_size.into_iter().map(|s| s.expect("nonempty size")).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[NormValue]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn weak_l1_profile() {
        let p = democracy_profile(DemocracySpace::Space(SpaceSpec::LorentzInf), 5, 5).unwrap();
        assert_eq!(ints(&p.upper), ["1", "2", "3", "4", "5"]);
        assert_eq!(ints(&p.lower), ["1", "2", "3", "4", "5"]);
    }

    #[test]
    fn combined_profile_is_linear() {
        let space = DemocracySpace::Combined(Gauge::B, SpaceSpec::LorentzInf);
        let p = democracy_profile(space, 5, 5).unwrap();
        assert_eq!(ints(&p.upper), ["1", "2", "3", "4", "5"]);
        assert_eq!(ints(&p.lower), ["1", "2", "3", "4", "5"]);
    }

    #[test]
    fn gauge_alone_is_balanced() {
        let p = democracy_profile(DemocracySpace::Gauge(Gauge::A), 4, 4).unwrap();
        assert_eq!(ints(&p.lower), ["1", "1", "2", "2"]);
        assert_eq!(ints(&p.upper), ["1", "2", "3", "4"]);
        assert_eq!(p.witnesses[3].0.minus.len(), 2);
    }

    #[test]
    fn alternating_indicator() {
        let alt = FinSeq::signed_indicator(&SignVector::alternating(4), &IndexSet::range(1, 4));
        assert_eq!(norm_gauge(&alt, Gauge::B), 2.into());
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for space in [
            DemocracySpace::Gauge(Gauge::B),
            DemocracySpace::Gauge(Gauge::A),
            DemocracySpace::Space(SpaceSpec::Lorentz(2)),
            DemocracySpace::Combined(Gauge::B, SpaceSpec::Lorentz(2)),
            DemocracySpace::Combined(Gauge::A, SpaceSpec::LorentzInf),
        ] {
            let fast = democracy_profile(space, 4, 6).unwrap();
            let slow = democracy_profile_brute(space, 4, 6).unwrap();
            assert_eq!(fast.lower, slow.lower, "{space:?}");
            assert_eq!(fast.upper, slow.upper, "{space:?}");
        }
    }
}
