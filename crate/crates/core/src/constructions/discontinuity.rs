//! The family `G(t) = e₁ − t·e₂ + Σ_{n=3}^{N} e_n / n`, whose `𝔹` norm jumps
//! by one as `t → 1`.

use serde::Serialize;

use super::ConstructionError;
use crate::norms::{norm_b, norm_combined, Gauge, NormValue, SpaceSpec};
use crate::scalar::Scalar;
use crate::seq::FinSeq;

pub const DEFAULT_TAIL_END: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscontinuityWitness {
    pub tail_end: usize,
    pub t: Scalar,
    pub seq: FinSeq,
    /// Tail mass `Σ_{n=3}^{N} 1/n`.
    pub tail_mass: Scalar,
    pub predicted: Scalar,
}

impl DiscontinuityWitness {
    /// `max(‖G(t)‖_𝔹, ‖G(t)‖_{1,∞})`.
    pub fn combined_norm(&self) -> NormValue {
        norm_combined(&self.seq, SpaceSpec::LorentzInf, Gauge::B)
    }

    /// Whether the gauge part alone reaches the combined norm.
    pub fn gauge_dominates(&self) -> bool {
        let lorentz = SpaceSpec::LorentzInf.norm(&self.seq);
        NormValue::Exact(norm_b(&self.seq)) >= lorentz
    }
}

/// `1 + a` at `t = 1` and `1 + a − t` below, for a tail `g ≥ 0` of mass `a ≥ 1`
/// supported from index 3 with entries at most 1.
pub fn three_block_value(tail_mass: &Scalar, t: &Scalar) -> Scalar {
    if *t == Scalar::one() {
        Scalar::one() + tail_mass
    } else {
        Scalar::one() + tail_mass - t
    }
}

pub fn three_block_seq(t: &Scalar, tail: &FinSeq) -> FinSeq {
    let head = FinSeq::from_pairs([(1, Scalar::one()), (2, -t)]).expect("ordered");
    &head + tail
}

pub fn discontinuity_witness(tail_end: usize, t: &Scalar) -> Result<DiscontinuityWitness, ConstructionError> {
    if t.is_negative() || *t > Scalar::one() {
        return Err(ConstructionError::ParameterOutOfRange(format!("t = {t} is outside [0, 1]")));
    }
    let tail = FinSeq::from_pairs((3..=tail_end).map(|n| (n, Scalar::ratio(1, n as i64)))).expect("ordered");
    let tail_mass = tail.total();
    if tail_mass < Scalar::one() {
        return Err(ConstructionError::ParameterOutOfRange(format!(
            "tail mass {tail_mass} below 1 for N = {tail_end}"
        )));
    }
    Ok(DiscontinuityWitness {
        tail_end,
        t: t.clone(),
        seq: three_block_seq(t, &tail),
        predicted: three_block_value(&tail_mass, t),
        tail_mass,
    })
}
