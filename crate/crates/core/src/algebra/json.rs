//! JSON encoding of field elements.
//!
//! A rational is a string `"p/q"`; an element of a tower of depth `k` is an
//! object `{"radicand": r, "lo": a, "hi": b}` meaning `a + b*sqrt(r)` with
//! `r`, `a`, `b` encoded one level down. On input, any string accepted by
//! the scalar grammar (for example `"-sqrt(2)/2"`) is also allowed.

use serde_json::{json, Value};

use super::field::FieldElement;
use super::parse::PolyParser;
use crate::error::{Error, Result};

pub fn field_to_json(x: &FieldElement) -> Value {
    match (x.tower(), x.split()) {
        (Some(t), Some((lo, hi))) => json!({
            "radicand": field_to_json(t.radicand()),
            "lo": field_to_json(&lo),
            "hi": field_to_json(&hi),
        }),
        _ => Value::String(x.coords()[0].to_string()),
    }
}

/// Decode with a shared parser so that every radical of one document lands in
/// one tower.
pub fn field_from_json(v: &Value, ctx: &mut PolyParser) -> Result<FieldElement> {
    match v {
        Value::String(s) => ctx.parse_scalar(s),
        Value::Number(n) => ctx.parse_scalar(&n.to_string()).map_err(|_| Error::Invalid(format!("number {n}"))),
        Value::Object(m) => {
            let get = |k: &str| m.get(k).ok_or_else(|| Error::Invalid(format!("field element lacks `{k}`")));
            let r = field_from_json(get("radicand")?, ctx)?;
            let lo = field_from_json(get("lo")?, ctx)?;
            let hi = field_from_json(get("hi")?, ctx)?;
            let g = ctx.sqrt(&r);
            Ok(&lo + &(&hi * &g))
        }
        other => Err(Error::Invalid(format!("cannot read a field element from {other}"))),
    }
}
