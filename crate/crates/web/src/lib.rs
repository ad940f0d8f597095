//! Three browser-facing operations, each returning a JSON string.
//!
//! The plain functions are what the native tests exercise; on `wasm32` they
//! are re-exported through `wasm-bindgen` with errors mapped to `JsError`.

use greedylab_core::constructions::discontinuity_witness;
use greedylab_core::envelope::{envelope_interval, CombinedSpace, EnvelopeConfig, Generator};
use greedylab_core::norms::{sigma_g, NormSpec};
use greedylab_core::verify::alternating_indicator;
use greedylab_core::{FinSeq, Gauge, IndexSet, NormValue, Scalar, SpaceSpec};
use serde_json::{json, Value};

/// Longest sequence the norm table accepts; the exact gauges stay instant below it.
pub const MAX_ENTRIES: usize = 64;
/// Largest `m` for the envelope panel.
pub const MAX_ENVELOPE_SIZE: usize = 32;
pub const MAX_CURVE_STEPS: usize = 200;

const TABLE: [(&str, Option<SpaceSpec>); 8] = [
    ("l1", None),
    ("linf", None),
    ("lorentz:inf", None),
    ("lorentz:2", None),
    ("B", None),
    ("A", None),
    ("B-comb", Some(SpaceSpec::LorentzInf)),
    ("A-comb", Some(SpaceSpec::LorentzInf)),
];

fn value_json(v: &NormValue) -> Value {
    json!({ "exact": v.to_string(), "approx": v.to_f64() })
}

/// Reads `3, -1, 1/2` (commas or whitespace) as the entries at indices 1, 2, ….
pub fn parse_dense(input: &str) -> Result<FinSeq, String> {
    let values: Vec<Scalar> = input
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Scalar>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if values.len() > MAX_ENTRIES {
        return Err(format!("at most {MAX_ENTRIES} entries"));
    }
    Ok(FinSeq::from_dense(values))
}

pub fn norm_table(input: &str) -> Result<String, String> {
    let f = parse_dense(input)?;
    let mut rows: Vec<Value> = TABLE
        .iter()
        .map(|&(name, space)| {
            let spec = NormSpec::parse(name, space).expect("fixed table");
            let mut row = value_json(&spec.eval(&f));
            row["name"] = json!(name);
            row
        })
        .collect();
    let sigma = NormValue::Exact(sigma_g(&f));
    let mut row = value_json(&sigma);
    row["name"] = json!("sigma_g");
    rows.push(row);
    Ok(json!({ "sequence": f.to_string(), "rows": rows }).to_string())
}

/// `Φ(t)` at `t = k/steps` for `k = 0..=steps`, from the witness with tail `⟦3, tail_end⟧`.
pub fn phi_curve(tail_end: usize, steps: usize) -> Result<String, String> {
    if !(1..=MAX_CURVE_STEPS).contains(&steps) {
        return Err(format!("steps must be in 1..={MAX_CURVE_STEPS}"));
    }
    let mut points = Vec::with_capacity(steps + 1);
    let mut tail_mass = Scalar::zero();
    for k in 0..=steps {
        let t = Scalar::ratio(k as i64, steps as i64);
        let w = discontinuity_witness(tail_end, &t).map_err(|e| e.to_string())?;
        tail_mass = w.tail_mass.clone();
        let mut point = value_json(&w.combined_norm());
        point["t"] = json!(t.to_f64());
        points.push(point);
    }
    Ok(json!({
        "tail_end": tail_end,
        "tail_mass": { "exact": tail_mass.to_string(), "approx": tail_mass.to_f64() },
        "points": points,
    })
    .to_string())
}

/// Certified interval for the envelope norm of `𝟙_{[1,m]}` (coordinates,
/// interval pieces and cyclic atoms) or of its alternating version (cyclic atoms only).
pub fn envelope(m: usize, alternating: bool) -> Result<String, String> {
    if !(1..=MAX_ENVELOPE_SIZE).contains(&m) {
        return Err(format!("m must be in 1..={MAX_ENVELOPE_SIZE}"));
    }
    let space = CombinedSpace::new(Gauge::B, SpaceSpec::LorentzInf);
    let cyclic = Generator::Cyclic { m: None, seed: None };
    let (target, generators) = if alternating {
        (alternating_indicator(m), vec![cyclic])
    } else {
        (FinSeq::indicator(&IndexSet::range(1, m)), vec![Generator::Coordinates, Generator::IntervalPieces, cyclic])
    };
    let bound =
        envelope_interval(&target, space, &EnvelopeConfig::with_generators(generators)).map_err(|e| e.to_string())?;
    Ok(json!({
        "m": m,
        "alternating": alternating,
        "lower": { "exact": bound.lower.to_string(), "approx": bound.lower.to_f64() },
        "upper": value_json(&bound.upper),
        "atoms_used": bound.upper_cert.atoms.len(),
    })
    .to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn js(r: Result<String, String>) -> Result<String, JsError> {
        r.map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = normTable)]
    pub fn norm_table(input: &str) -> Result<String, JsError> {
        js(super::norm_table(input))
    }

    #[wasm_bindgen(js_name = phiCurve)]
    pub fn phi_curve(tail_end: usize, steps: usize) -> Result<String, JsError> {
        js(super::phi_curve(tail_end, steps))
    }

    #[wasm_bindgen(js_name = envelope)]
    pub fn envelope(m: usize, alternating: bool) -> Result<String, JsError> {
        js(super::envelope(m, alternating))
    }
}
