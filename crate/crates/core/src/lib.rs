//! Exact evaluation of greedy-algorithm norm functionals on finitely
//! supported rational sequences, with certified envelope bounds, the
//! standard counterexample constructions, and executable property suites.

pub mod constructions;
pub mod envelope;
pub mod greedy;
pub mod norms;
pub mod scalar;
pub mod seq;
pub mod verify;

pub use greedy::{greedy_chain, greedy_family, is_greedy_set, GreedyFamily};
pub use norms::{Gauge, NormValue, SpaceSpec};
pub use scalar::Scalar;
pub use seq::{FinSeq, IndexSet, Injection, IntInterval, Sign, SignVector};
