//! Norm functionals on finitely supported sequences.

mod anorm;
mod bnorm;
mod democracy;
mod lorentz;
mod value;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use anorm::{norm_a, norm_a_oracle, norm_a_oracle_with_cap, norm_a_witness, sigma_g, sigma_g_defect, AWitness};
pub use bnorm::{beta, norm_b, norm_b_oracle, norm_b_oracle_with_cap, norm_b_witness, BWitness};
pub use democracy::{
    democracy_profile, democracy_profile_brute, DemocracyError, DemocracyProfile, DemocracySpace, SignedIndicator,
};
pub use lorentz::{lorentz, lorentz_f64, rho_1q, SpaceParseError, SpaceSpec};
pub use value::{rational_root, root_bounds, NormValue};

use crate::scalar::Scalar;
use crate::seq::FinSeq;

/// Largest support the brute-force oracles accept by default.
pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("support of size {support} exceeds the oracle cap of {cap}")]
    SupportTooLarge { support: usize, cap: usize },
}

/// The two greedy gauges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gauge {
    B,
    A,
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gauge::B => "B",
            Gauge::A => "A",
        })
    }
}

pub fn norm_gauge(f: &FinSeq, gauge: Gauge) -> Scalar {
    match gauge {
        Gauge::B => norm_b(f),
        Gauge::A => norm_a(f),
    }
}

pub fn norm_gauge_oracle(f: &FinSeq, gauge: Gauge) -> Result<Scalar, OracleError> {
    match gauge {
        Gauge::B => norm_b_oracle(f),
        Gauge::A => norm_a_oracle(f),
    }
}

/// `max(‖f‖_gauge, ‖f‖_space)`.
pub fn norm_combined(f: &FinSeq, space: SpaceSpec, which: Gauge) -> NormValue {
    NormValue::Exact(norm_gauge(f, which)).max(lorentz(f, space))
}

/// `‖f‖_space + ε‖f‖_𝔹`.
pub fn gauge_eps(f: &FinSeq, space: SpaceSpec, eps: &Scalar) -> NormValue {
    lorentz(f, space).add_rational(&(eps * norm_b(f)))
}

/// Any norm the workbench can evaluate, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormSpec {
    L1,
    Linf,
    Space(SpaceSpec),
    Gauge(Gauge),
    Combined(Gauge, SpaceSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormSpecError {
    #[error("unknown norm {0:?}")]
    Unknown(String),
    #[error("{0} needs an ambient space")]
    MissingSpace(String),
    #[error(transparent)]
    Space(#[from] SpaceParseError),
}

impl NormSpec {
    /// Parses `l1`, `linf`, `lorentz:Q`, `B`, `A`, `B-comb`, `A-comb`; the
    /// combined forms take their space from `space`.
    pub fn parse(which: &str, space: Option<SpaceSpec>) -> Result<NormSpec, NormSpecError> {
        let combined =
            |g| space.map(|s| NormSpec::Combined(g, s)).ok_or_else(|| NormSpecError::MissingSpace(which.to_string()));
        match which.trim() {
            "l1" => Ok(NormSpec::L1),
            "linf" => Ok(NormSpec::Linf),
            "B" => Ok(NormSpec::Gauge(Gauge::B)),
            "A" => Ok(NormSpec::Gauge(Gauge::A)),
            "B-comb" => combined(Gauge::B),
            "A-comb" => combined(Gauge::A),
            other if other.starts_with("lorentz:") => Ok(NormSpec::Space(SpaceSpec::from_str(other)?)),
            other => Err(NormSpecError::Unknown(other.to_string())),
        }
    }

    pub fn eval(&self, f: &FinSeq) -> NormValue {
        match self {
            NormSpec::L1 => NormValue::Exact(f.l1()),
            NormSpec::Linf => NormValue::Exact(f.linf()),
            NormSpec::Space(s) => lorentz(f, *s),
            NormSpec::Gauge(g) => NormValue::Exact(norm_gauge(f, *g)),
            NormSpec::Combined(g, s) => norm_combined(f, *s, *g),
        }
    }

    /// Brute-force value where an oracle exists (the gauge parts).
    pub fn eval_oracle(&self, f: &FinSeq) -> Result<Option<NormValue>, OracleError> {
        Ok(match self {
            NormSpec::Gauge(g) => Some(NormValue::Exact(norm_gauge_oracle(f, *g)?)),
            NormSpec::Combined(g, s) => Some(NormValue::Exact(norm_gauge_oracle(f, *g)?).max(lorentz(f, *s))),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::IndexSet;

    #[test]
    fn combined_values() {
        let f = FinSeq::from_ints(&[1, -1, 1, -1]);
        assert_eq!(norm_combined(&f, SpaceSpec::LorentzInf, Gauge::B), NormValue::Exact(4.into()));
        for m in 1..=9 {
            let ones = FinSeq::indicator(&IndexSet::range(1, m));
            assert_eq!(norm_combined(&ones, SpaceSpec::LorentzInf, Gauge::B), NormValue::Exact(Scalar::from(m)));
        }
        assert_eq!(gauge_eps(&FinSeq::unit(1), SpaceSpec::LorentzInf, &Scalar::one()), NormValue::Exact(2.into()));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(NormSpec::parse("B", None).unwrap(), NormSpec::Gauge(Gauge::B));
        assert!(matches!(NormSpec::parse("B-comb", None), Err(NormSpecError::MissingSpace(_))));
        assert_eq!(
            NormSpec::parse("A-comb", Some(SpaceSpec::Lorentz(2))).unwrap(),
            NormSpec::Combined(Gauge::A, SpaceSpec::Lorentz(2))
        );
        assert_eq!(NormSpec::parse("lorentz:2", None).unwrap(), NormSpec::Space(SpaceSpec::Lorentz(2)));
        assert!(NormSpec::parse("C", None).is_err());
    }
}
