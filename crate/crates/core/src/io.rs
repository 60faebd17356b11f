//! JSON interchange for networks and edge weights.
//!
//! Network layout:
//!
//! ```text
//! {"n": 3, "root": 0, "edges": [[0, 1, 1.0000000000000000e0], ...], "boundary": [2],
//!  "provenance": {...}}
//! ```
//!
//! Conductances and weights are written with 17 significant digits, which
//! round-trips every `f64` bit-exactly.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::network::{Edge, EdgeWeight, Network};

/// Formats a finite float with 17 significant digits as a JSON number.
pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn push_float_array(out: &mut String, values: &[f64]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format_f64(*v));
    }
    out.push(']');
}

pub fn network_to_json(net: &Network, provenance: Option<&Value>) -> String {
    let mut out = String::with_capacity(64 + 40 * net.edge_count());
    out.push_str(&format!("{{\n  \"n\": {},\n  \"root\": {},\n  \"edges\": [", net.vertex_count(), net.root()));
    for (i, e) in net.edges().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\n    [{}, {}, {}]", e.u, e.v, format_f64(e.conductance)));
    }
    if net.edge_count() > 0 {
        out.push_str("\n  ");
    }
    out.push_str("],\n  \"boundary\": ");
    out.push_str(&serde_json::to_string(&net.boundary_vertices()).expect("ids serialize"));
    if let Some(p) = provenance {
        out.push_str(",\n  \"provenance\": ");
        out.push_str(&serde_json::to_string(p).expect("value serializes"));
    }
    out.push_str("\n}\n");
    out
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::input(format!("network JSON is missing \"{key}\"")))
}

fn as_index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::input(format!("{what} must be a nonnegative integer, got {v}")))
}

/// Parses a network file; returns the network and its provenance block.
pub fn network_from_json(text: &str) -> Result<(Network, Option<Value>)> {
    let doc: Value = serde_json::from_str(text)?;
    let n = as_index(field(&doc, "n")?, "\"n\"")?;
    let root = as_index(field(&doc, "root")?, "\"root\"")?;
    let raw_edges = field(&doc, "edges")?
        .as_array()
        .ok_or_else(|| Error::input("\"edges\" must be an array"))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (i, item) in raw_edges.iter().enumerate() {
        let triple = item
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::input(format!("edge {i} must be [u, v, c]")))?;
        let c = triple[2]
            .as_f64()
            .ok_or_else(|| Error::input(format!("edge {i} conductance must be a number")))?;
        edges.push(Edge::new(
            as_index(&triple[0], "edge endpoint")?,
            as_index(&triple[1], "edge endpoint")?,
            c,
        ));
    }
    let boundary = match doc.get("boundary") {
        None | Some(Value::Null) => Vec::new(),
        Some(b) => b
            .as_array()
            .ok_or_else(|| Error::input("\"boundary\" must be an array"))?
            .iter()
            .map(|v| as_index(v, "boundary id"))
            .collect::<Result<Vec<_>>>()?,
    };
    let net = Network::new(n, edges, root, &boundary)?;
    Ok((net, doc.get("provenance").cloned()))
}

pub fn weight_to_json(w: &EdgeWeight, provenance: Option<&Value>) -> String {
    let mut out = String::from("{\n  \"values\": ");
    push_float_array(&mut out, &w.values);
    if let Some(p) = provenance {
        out.push_str(",\n  \"provenance\": ");
        out.push_str(&serde_json::to_string(p).expect("value serializes"));
    }
    out.push_str("\n}\n");
    out
}

pub fn weight_from_json(text: &str) -> Result<EdgeWeight> {
    let doc: Value = serde_json::from_str(text)?;
    let values = field(&doc, "values")?
        .as_array()
        .ok_or_else(|| Error::input("\"values\" must be an array"))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| Error::input("weights must be numbers")))
        .collect::<Result<Vec<_>>>()?;
    EdgeWeight::new(values)
}

/// Serde helper writing non-finite floats as the strings `"inf"`, `"-inf"`,
/// `"nan"` since JSON has no literal for them.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a float: {other}"))),
            },
        }
    }
}
