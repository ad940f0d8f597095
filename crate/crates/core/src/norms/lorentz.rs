//! Lorentz norms `ℓ_{1,q}` and their tail functionals `ρ_{1,q}(f, k)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::NormValue;
use crate::scalar::Scalar;
use crate::seq::FinSeq;

/// Ambient sequence space: `ℓ_{1,q}` for integer `q ≥ 1`, or weak `ℓ_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceSpec {
    Lorentz(u32),
    LorentzInf,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown space {0:?} (expected lorentz:Q with Q ≥ 1, lorentz:inf, or l1)")]
pub struct SpaceParseError(pub String);

impl SpaceSpec {
    /// `Lorentz(q)`, panicking on `q = 0`.
    pub fn lorentz(q: u32) -> SpaceSpec {
        assert!(q >= 1, "Lorentz index must be at least 1");
        SpaceSpec::Lorentz(q)
    }

    pub fn norm(&self, f: &FinSeq) -> NormValue {
        lorentz(f, *self)
    }
}

impl FromStr for SpaceSpec {
    type Err = SpaceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if t == "l1" {
            return Ok(SpaceSpec::Lorentz(1));
        }
        let rest = t.strip_prefix("lorentz:").ok_or_else(|| SpaceParseError(s.to_string()))?;
        if rest == "inf" || rest == "∞" {
            return Ok(SpaceSpec::LorentzInf);
        }
        match rest.parse::<u32>() {
            Ok(q) if q >= 1 => Ok(SpaceSpec::Lorentz(q)),
            _ => Err(SpaceParseError(s.to_string())),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lorentz(q) => write!(f, "lorentz:{q}"),
            SpaceSpec::LorentzInf => write!(f, "lorentz:inf"),
        }
    }
}

/// `ρ_{1,q}(f, k)`, built from the rearrangement shifted by `k`.
pub fn rho_1q(f: &FinSeq, k: usize, space: SpaceSpec) -> NormValue {
    let d = f.dec_rearrangement();
    let tail = d.get(k..).unwrap_or(&[]);
    match space {
        SpaceSpec::LorentzInf => NormValue::Exact(
            tail.iter().enumerate().map(|(i, v)| v * Scalar::from(i + 1)).max().unwrap_or_else(Scalar::zero),
        ),
        SpaceSpec::Lorentz(1) => NormValue::Exact(tail.iter().sum()),
        SpaceSpec::Lorentz(q) => NormValue::QthPower {
            power: tail.iter().enumerate().map(|(i, v)| Scalar::from(i + 1).pow(q - 1) * v.pow(q)).sum(),
            q,
        },
    }
}

/// `‖f‖_{1,q} = ρ_{1,q}(f, 0)`.
pub fn lorentz(f: &FinSeq, space: SpaceSpec) -> NormValue {
    rho_1q(f, 0, space)
}

/// `‖f‖_{1,q}` for real `q ≥ 1` in floating point; not exact.
pub fn lorentz_f64(f: &FinSeq, q: f64) -> f64 {
    let d = f.dec_rearrangement();
    if q.is_infinite() {
        return d.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v.to_f64()).fold(0.0, f64::max);
    }
    d.iter().enumerate().map(|(i, v)| ((i + 1) as f64).powf(q - 1.0) * v.to_f64().powf(q)).sum::<f64>().powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::IndexSet;

    #[test]
    fn weak_l1() {
        let ones = FinSeq::indicator(&IndexSet::range(1, 5));
        assert_eq!(lorentz(&ones, SpaceSpec::LorentzInf), NormValue::Exact(5.into()));
        let f = FinSeq::from_ints(&[3, 1, 2]);
        assert_eq!(lorentz(&f, SpaceSpec::LorentzInf), NormValue::Exact(4.into()));
        assert_eq!(rho_1q(&f, 1, SpaceSpec::LorentzInf), NormValue::Exact(2.into()));
        assert_eq!(rho_1q(&f, 5, SpaceSpec::LorentzInf), NormValue::zero());
    }

    #[test]
    fn finite_q() {
        let f = FinSeq::from_ints(&[2, 1]);
        let v = lorentz(&f, SpaceSpec::Lorentz(2));
        assert!(matches!(&v, NormValue::QthPower { power, q: 2 } if *power == Scalar::from_int(6)));
        assert_eq!(lorentz(&f, SpaceSpec::Lorentz(1)), NormValue::Exact(3.into()));
        assert!((lorentz_f64(&f, 2.0) - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parse() {
        assert_eq!("lorentz:inf".parse::<SpaceSpec>().unwrap(), SpaceSpec::LorentzInf);
        assert_eq!("lorentz:3".parse::<SpaceSpec>().unwrap(), SpaceSpec::Lorentz(3));
        assert_eq!("l1".parse::<SpaceSpec>().unwrap(), SpaceSpec::Lorentz(1));
        assert!("lorentz:0".parse::<SpaceSpec>().is_err());
        assert!("weird".parse::<SpaceSpec>().is_err());
    }
}
