//! Report serialization: JSON documents and plot-ready CSV.
//!
//! Every number is rounded to 15 significant digits before it is written, and
//! JSON objects have sorted keys, so repeated runs produce identical bytes.
//! Infinities are written as the strings `"+inf"` and `"-inf"`.

use std::collections::BTreeMap;
use std::io::Write;

use blaschke_core::conditions::{SumTrace, Verdict};
use blaschke_core::expr::GridField;
use blaschke_core::potential::MeasureEstimate;
use blaschke_core::zeros::{ZeroEntry, ZeroSequence};
use blaschke_core::{Complex, DomainSpec, ExtReal};
use serde_json::{json, Map, Value};

use crate::LabError;

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// A JSON number, or a string for the non-finite cases.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::Null
    } else if x == f64::INFINITY {
        Value::from("+inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        Value::from(round15(x))
    }
}

pub fn ext(x: ExtReal) -> Value {
    num(x.to_f64())
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn complex(z: Complex) -> Value {
    json!([num(z.re), num(z.im)])
}

/// CSV cell text for a number.
pub fn cell(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // serde_json prints the shortest representation that round-trips
        Value::from(round15(x)).to_string()
    }
}

pub fn verdict(v: Verdict) -> Value {
    Value::from(v.to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn domain_json(d: &DomainSpec) -> Value {
    use blaschke_core::domain::BoundaryCurve;
    let outer = match d.boundary() {
        Some(BoundaryCurve::Circle { center, radius, interior }) => {
            json!({"kind": "disk", "center": complex(center), "radius": num(radius), "interior": interior})
        }
        Some(BoundaryCurve::Line { point, normal }) => {
            json!({"kind": "halfplane", "point": complex(point), "normal": complex(normal)})
        }
        None => json!({"kind": "plane"}),
    };
    match d.inner() {
        Some(inner) => json!({"outer": outer, "inner": domain_json(inner)}),
        None => json!({"outer": outer}),
    }
}

/// `[{re, im, mult, err}]` in canonical order.
pub fn zeros_json(z: &ZeroSequence) -> Value {
    Value::Array(
        z.entries
            .iter()
            .map(|e| {
                json!({
                    "re": num(e.location.re),
                    "im": num(e.location.im),
                    "mult": e.multiplicity,
                    "err": num(e.refinement_error),
                })
            })
            .collect(),
    )
}

/// Reads a zero list written by [`zeros_json`].
pub fn zeros_from_json(text: &str, region: DomainSpec) -> Result<ZeroSequence, LabError> {
    #[derive(serde::Deserialize)]
    struct Entry {
        re: f64,
        im: f64,
        #[serde(default = "one")]
        mult: u32,
        #[serde(default)]
        err: f64,
    }
    fn one() -> u32 {
        1
    }
    let raw: Vec<Entry> = serde_json::from_str(text).map_err(|e| LabError::Input(format!("zero list: {e}")))?;
    let entries = raw
        .into_iter()
        .map(|e| ZeroEntry { location: Complex::new(e.re, e.im), multiplicity: e.mult, refinement_error: e.err })
        .collect();
    Ok(ZeroSequence::new(entries, region)?)
}

/// `{atoms: [{re, im, mass}], cells: {origin, h, nx, ny, nonzero: [{rect, mass}]}, signed}`.
/// Only cells with nonzero mass are listed.
pub fn measure_json(m: &MeasureEstimate) -> Value {
    let atoms: Vec<Value> =
        m.atoms.iter().map(|a| json!({"re": num(a.at.re), "im": num(a.at.im), "mass": num(a.mass)})).collect();
    let cells = match &m.cells {
        Some(g) => {
            let mut nonzero = Vec::new();
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let mass = g.mass[j * g.nx + i];
                    if mass != 0.0 {
                        let (ll, ur) = g.rect(i, j);
                        nonzero.push(json!({"rect": [num(ll.re), num(ll.im), num(ur.re), num(ur.im)], "mass": num(mass)}));
                    }
                }
            }
            json!({"origin": complex(g.origin), "h": num(g.h), "nx": g.nx, "ny": g.ny, "nonzero": nonzero})
        }
        None => Value::Null,
    };
    json!({"atoms": atoms, "cells": cells, "signed": m.signed, "total_mass": num(m.total_mass())})
}

/// Sidecar metadata for a field CSV; `mask_count` nodes of the `nx × ny`
/// grid are left out of the CSV.
pub fn field_meta(f: &GridField) -> Value {
    let r = f.rect;
    let ur = r.node(f.nx - 1, f.ny - 1);
    json!({
        "rect": [num(r.lower_left.re), num(r.lower_left.im), num(ur.re), num(ur.im)],
        "h": num(f.h()),
        "nx": f.nx,
        "ny": f.ny,
        "mask_count": f.mask_count(),
    })
}

/// `re,im,value` for the masked nodes, row by row from the bottom.
pub fn write_field_csv<W: Write>(f: &GridField, out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "value"])?;
    for j in 0..f.ny {
        for i in 0..f.nx {
            if let Some(v) = f.get(i, j) {
                let z = f.node(i, j);
                w.write_record([cell(z.re), cell(z.im), cell(v.to_f64())])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Every carrier of a measure as `re,im,value`: atoms at their points, cells
/// at their centres.
pub fn write_measure_csv<W: Write>(m: &MeasureEstimate, out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "value"])?;
    for (z, mass) in m.carriers() {
        w.write_record([cell(z.re), cell(z.im), cell(mass)])?;
    }
    w.flush()?;
    Ok(())
}

/// `k,abs_zk,partial_sum`; an empty trace gives the header alone.
pub fn write_trace_csv<W: Write>(t: &SumTrace, out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "abs_zk", "partial_sum"])?;
    for e in &t.entries {
        w.write_record([e.k.to_string(), cell(e.abs_z), cell(e.partial_sum)])?;
    }
    w.flush()?;
    Ok(())
}

/// `re,im,mult,err`.
pub fn write_zeros_csv<W: Write>(z: &ZeroSequence, out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "mult", "err"])?;
    for e in &z.entries {
        w.write_record([cell(e.location.re), cell(e.location.im), e.multiplicity.to_string(), cell(e.refinement_error)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_json(t: &SumTrace) -> Value {
    Value::Array(
        t.entries
            .iter()
            .map(|e| json!({"k": e.k, "abs_zk": num(e.abs_z), "partial_sum": num(e.partial_sum)}))
            .collect(),
    )
}

/// The outcome of one condition command.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    pub lhs: Value,
    pub rhs: Value,
    pub constants: Map<String, Value>,
    pub trace: Value,
    /// `(h, nodes)` of the grid used, if any.
    pub grid: Option<(f64, usize)>,
    pub tolerances: Map<String, Value>,
    /// Command-specific evidence.
    pub details: Map<String, Value>,
    /// The flags as given, after applying `--config`.
    pub input: BTreeMap<String, String>,
}

impl ConditionReport {
    pub fn new(condition: &str, verdict: Verdict) -> ConditionReport {
        ConditionReport {
            condition: condition.into(),
            verdict,
            lhs: Value::Null,
            rhs: Value::Null,
            constants: Map::new(),
            trace: Value::Array(Vec::new()),
            grid: None,
            tolerances: Map::new(),
            details: Map::new(),
            input: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "condition": self.condition,
            "verdict": verdict(self.verdict),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constants": self.constants,
            "trace": self.trace,
            "grid": self.grid.map_or(Value::Null, |(h, nodes)| json!({"h": num(h), "nodes": nodes})),
            "tolerances": self.tolerances,
            "details": self.details,
            "input": self.input,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use blaschke_core::conditions::{blaschke_functional, make_test_function, TestKind};

    #[test]
    fn fifteen_digits() {
        assert_eq!(cell(0.1 + 0.2), "0.3");
        assert_eq!(cell(1.0 / 3.0), "0.333333333333333");
        assert_eq!(cell(2.0), "2.0");
        assert_eq!(cell(1e-20), "1e-20");
        assert_eq!(cell(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(f64::INFINITY), Value::from("+inf"));
        assert_eq!(round15(-123456.78901234567), -123456.789012346);
    }

    #[test]
    fn empty_trace_is_header_only() {
        let d = DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.5).unwrap()).unwrap();
        let v = make_test_function(TestKind::LogInverse, d).unwrap();
        let t = blaschke_functional(&v, &ZeroSequence::empty(DomainSpec::unit_disk())).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,abs_zk,partial_sum\n");
    }

    #[test]
    fn zero_list_round_trip() {
        let entries = vec![
            ZeroEntry { location: Complex::new(0.5, 0.0), multiplicity: 2, refinement_error: 1e-12 },
            ZeroEntry { location: Complex::new(-0.25, 0.5), multiplicity: 1, refinement_error: 0.0 },
        ];
        let z = ZeroSequence::new(entries, DomainSpec::unit_disk()).unwrap();
        let back = zeros_from_json(&to_text(&zeros_json(&z)), DomainSpec::unit_disk()).unwrap();
        assert_eq!(back, z);
    }
}
