//! Norm values that stay exact when a q-th root would leave the rationals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A nonnegative real known exactly.
///
/// `QthPower { power, q }` is the number whose q-th power is `power`;
/// `Shifted` adds a rational offset to such a root.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum NormValue {
    Exact(Scalar),
    QthPower { power: Scalar, q: u32 },
    Shifted { power: Scalar, q: u32, offset: Scalar },
}

/// Bracket `x^{1/q}` between consecutive multiples of `2^{-bits}`.
pub fn root_bounds(x: &Scalar, q: u32, bits: u32) -> (Scalar, Scalar) {
    assert!(!x.is_negative(), "root of a negative value");
    if q == 1 {
        return (x.clone(), x.clone());
    }
    let shifted: BigInt = x.numer() << (bits as usize * q as usize);
    let k = (&shifted / x.denom()).nth_root(q);
    let den = Scalar::from(BigInt::one() << bits as usize);
    let lo = Scalar::from(k.clone()) / &den;
    let exact = k.pow(q) * x.denom() == shifted;
    if exact {
        (lo.clone(), lo)
    } else {
        (lo, Scalar::from(k + 1) / den)
    }
}

/// `x^{1/q}` when it is rational.
pub fn rational_root(x: &Scalar, q: u32) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.nth_root(q);
    let rd = d.nth_root(q);
    if rn.pow(q) == n && rd.pow(q) == d {
        Scalar::from_bigints(rn, rd).ok()
    } else {
        None
    }
}

impl NormValue {
    pub fn zero() -> NormValue {
        NormValue::Exact(Scalar::zero())
    }

    /// The rational value, when there is one.
    pub fn exact(&self) -> Option<Scalar> {
        match self {
            NormValue::Exact(v) => Some(v.clone()),
            NormValue::QthPower { power, q } => rational_root(power, *q),
            NormValue::Shifted { power, q, offset } => rational_root(power, *q).map(|r| r + offset),
        }
    }

    /// Rational bounds `lo ≤ value ≤ hi` with gap at most `2^{-bits}`.
    pub fn bounds(&self, bits: u32) -> (Scalar, Scalar) {
        match self {
            NormValue::Exact(v) => (v.clone(), v.clone()),
            NormValue::QthPower { power, q } => root_bounds(power, *q, bits),
            NormValue::Shifted { power, q, offset } => {
                let (lo, hi) = root_bounds(power, *q, bits);
                (lo + offset, hi + offset)
            }
        }
    }

    /// A certified rational upper bound (the value itself when rational).
    pub fn upper_rational(&self, bits: u32) -> Scalar {
        self.exact().unwrap_or_else(|| self.bounds(bits).1)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(v) => v.to_f64(),
            NormValue::QthPower { power, q } => power.to_f64().powf(1.0 / *q as f64),
            NormValue::Shifted { power, q, offset } => power.to_f64().powf(1.0 / *q as f64) + offset.to_f64(),
        }
    }

    /// Exact comparison; `None` only if a shifted root cannot be separated
    /// from the other value within 4096 bits.
    pub fn compare(&self, other: &NormValue) -> Option<Ordering> {
        use NormValue::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Some(a.cmp(b)),
            (Exact(c), QthPower { power, q }) => Some(cmp_rational_root(c, power, *q)),
            (QthPower { power, q }, Exact(c)) => Some(cmp_rational_root(c, power, *q).reverse()),
            (QthPower { power: p1, q: q1 }, QthPower { power: p2, q: q2 }) => Some(p1.pow(*q2).cmp(&p2.pow(*q1))),
            _ => {
                if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
                    return Some(a.cmp(&b));
                }
                let mut bits = 64;
                while bits <= 4096 {
                    let (alo, ahi) = self.bounds(bits);
                    let (blo, bhi) = other.bounds(bits);
                    if ahi < blo {
                        return Some(Ordering::Less);
                    }
                    if bhi < alo {
                        return Some(Ordering::Greater);
                    }
                    bits *= 2;
                }
                None
            }
        }
    }

    /// The larger of two values (the first on an undecidable tie).
    pub fn max(self, other: NormValue) -> NormValue {
        match self.compare(&other) {
            Some(Ordering::Less) => other,
            _ => self,
        }
    }

    /// `self + c` for a rational `c`.
    pub fn add_rational(&self, c: &Scalar) -> NormValue {
        if c.is_zero() {
            return self.clone();
        }
        match self {
            NormValue::Exact(v) => NormValue::Exact(v + c),
            NormValue::QthPower { power, q } => match rational_root(power, *q) {
                Some(r) => NormValue::Exact(r + c),
                None => NormValue::Shifted { power: power.clone(), q: *q, offset: c.clone() },
            },
            NormValue::Shifted { power, q, offset } => {
                NormValue::Shifted { power: power.clone(), q: *q, offset: offset + c }
            }
        }
    }
}

/// Compare the rational `c` with `power^{1/q}`.
fn cmp_rational_root(c: &Scalar, power: &Scalar, q: u32) -> Ordering {
    if c.is_negative() {
        return if power.is_zero() && c.is_zero() { Ordering::Equal } else { Ordering::Less };
    }
    c.pow(q).cmp(power)
}

impl PartialEq for NormValue {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other)
    }
}

impl From<Scalar> for NormValue {
    fn from(v: Scalar) -> Self {
        NormValue::Exact(v)
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Exact(v) => write!(f, "{v}"),
            NormValue::QthPower { power, q } => write!(f, "{power} ^(1/{q})"),
            NormValue::Shifted { power, q, offset } => write!(f, "{power} ^(1/{q}) + {offset}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: i64, q: u32) -> NormValue {
        NormValue::QthPower { power: p.into(), q }
    }

    #[test]
    fn root_brackets() {
        let (lo, hi) = root_bounds(&Scalar::from_int(2), 2, 20);
        assert!(lo.pow(2) <= Scalar::from_int(2) && hi.pow(2) >= Scalar::from_int(2));
        assert!(&hi - &lo <= Scalar::ratio(1, 1 << 20));
        let (lo, hi) = root_bounds(&Scalar::ratio(9, 4), 2, 8);
        assert_eq!(lo, Scalar::ratio(3, 2));
        assert_eq!(hi, Scalar::ratio(3, 2));
        assert_eq!(rational_root(&Scalar::ratio(8, 27), 3), Some(Scalar::ratio(2, 3)));
        assert_eq!(rational_root(&Scalar::from_int(6), 2), None);
    }

    #[test]
    fn comparisons() {
        let e = |v: i64| NormValue::Exact(v.into());
        assert!(qp(6, 2) > e(2));
        assert!(qp(6, 2) < e(3));
        assert_eq!(qp(4, 2), e(2));
        assert!(qp(6, 2) < qp(20, 3));
        assert_eq!(qp(4, 2), qp(8, 3));
        let shifted = qp(2, 2).add_rational(&Scalar::one());
        assert!(shifted > e(2) && shifted < qp(6, 2));
        assert_eq!(qp(9, 2).add_rational(&Scalar::one()), e(4));
        assert_eq!(e(3).max(qp(6, 2)), e(3));
    }

    #[test]
    fn display() {
        assert_eq!(qp(6, 2).to_string(), "6 ^(1/2)");
        assert_eq!(NormValue::Exact(Scalar::ratio(5, 2)).to_string(), "5/2");
    }
}
