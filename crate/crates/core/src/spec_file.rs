//! JSON comb descriptions.
//!
//! ```json
//! {"family": "oscillating", "params": {"c": 2, "b": {"kind": "linear", "r": 1, "b1": 1}}, "truncate_n": 40}
//! ```
//!
//! | family        | params |
//! |---------------|--------|
//! | `explicit`    | `x`: tooth positions `x_1 < x_2 < ...` (also accepted at top level) |
//! | `constant`    | `alpha` |
//! | `polynomial`  | `p` |
//! | `exponential` | `c` |
//! | `subexp_exp`  | `p` |
//! | `double_exp`  | none |
//! | `oscillating` | `c`, `b`: a list `b_1, b_2, ...` or `{"kind": "linear", "r", "b1"}`, `{"kind": "power", "p"}`, `{"kind": "exp_power", "k"}`, `{"kind": "exp_n_over_log_n"}` |
//! | `custom`      | `id`: `alternating_power` (`p`), `exp_exp_power` (`k`), `exp_exp_n_over_log_n` |
//!
//! `truncate_n` is optional: it defaults to the length of `x` for explicit combs
//! and to [`DEFAULT_TRUNCATE_N`] otherwise.

use crate::comb::{CombSpec, CustomFamily, GapFamily, LogEnvelope, OscillatingParams};
use crate::error::{Error, Result};
use serde_json::{json, Map, Value};

pub const DEFAULT_TRUNCATE_N: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub family: GapFamily,
    pub truncate_n: Option<usize>,
}

impl SpecFile {
    /// `truncate_n` from the override, then the file, then the family default.
    pub fn resolved_n(&self, override_n: Option<usize>) -> usize {
        override_n
            .or(self.truncate_n)
            .unwrap_or(match &self.family {
                GapFamily::Explicit(x) => x.len(),
                _ => DEFAULT_TRUNCATE_N,
            })
    }

    pub fn materialize(&self, override_n: Option<usize>) -> Result<CombSpec> {
        CombSpec::materialize(self.family.clone(), self.resolved_n(override_n))
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::SpecParse(msg.into())
}

fn number(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    obj.get(key)
        .ok_or_else(|| bad(format!("missing parameter \"{key}\"")))?
        .as_f64()
        .ok_or_else(|| bad(format!("parameter \"{key}\" must be a number")))
}

fn numbers(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| bad(format!("\"{what}\" must be an array of numbers")))?
        .iter()
        .map(|e| {
            e.as_f64()
                .ok_or_else(|| bad(format!("\"{what}\" must contain only numbers")))
        })
        .collect()
}

fn envelope(v: &Value) -> Result<LogEnvelope> {
    if v.is_array() {
        return Ok(LogEnvelope::Custom(numbers(v, "b")?));
    }
    let obj = v
        .as_object()
        .ok_or_else(|| bad("\"b\" must be an array or an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("\"b\" needs a string \"kind\""))?;
    Ok(match kind {
        "linear" => LogEnvelope::Linear {
            r: number(obj, "r")?,
            b1: number(obj, "b1")?,
        },
        "power" => LogEnvelope::Power {
            p: number(obj, "p")?,
        },
        "exp_power" => LogEnvelope::ExpPower {
            k: number(obj, "k")?,
        },
        "exp_n_over_log_n" => LogEnvelope::ExpNOverLogN,
        other => return Err(bad(format!("unknown envelope kind \"{other}\""))),
    })
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    let root = root
        .as_object()
        .ok_or_else(|| bad("spec must be a JSON object"))?;
    let name = root
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing string field \"family\""))?;
    let empty = Map::new();
    let params = match root.get("params") {
        None | Some(Value::Null) => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => return Err(bad("\"params\" must be an object")),
    };
    let truncate_n = match root.get("truncate_n") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| bad("\"truncate_n\" must be a positive integer"))?
                as usize,
        ),
    };
    let family = match name {
        "explicit" => {
            let x = params
                .get("x")
                .or_else(|| root.get("x"))
                .ok_or_else(|| bad("explicit family needs \"x\""))?;
            GapFamily::Explicit(numbers(x, "x")?)
        }
        "constant" => GapFamily::Constant {
            alpha: number(params, "alpha")?,
        },
        "polynomial" => GapFamily::Polynomial {
            p: number(params, "p")?,
        },
        "exponential" => GapFamily::Exponential {
            c: number(params, "c")?,
        },
        "subexp_exp" => GapFamily::SubexpExp {
            p: number(params, "p")?,
        },
        "double_exp" => GapFamily::DoubleExp,
        "oscillating" => {
            let b = params
                .get("b")
                .ok_or_else(|| bad("oscillating family needs \"b\""))?;
            GapFamily::Oscillating(OscillatingParams::new(number(params, "c")?, envelope(b)?))
        }
        "custom" => {
            let id = params
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("custom family needs a string \"id\""))?;
            GapFamily::Custom(match id {
                "alternating_power" => CustomFamily::AlternatingPower {
                    p: number(params, "p")?,
                },
                "exp_exp_power" => CustomFamily::ExpExpPower {
                    k: number(params, "k")?,
                },
                "exp_exp_n_over_log_n" => CustomFamily::ExpExpNOverLogN,
                other => return Err(bad(format!("unknown custom family \"{other}\""))),
            })
        }
        other => return Err(bad(format!("unknown family \"{other}\""))),
    };
    Ok(SpecFile { family, truncate_n })
}

fn envelope_json(env: &LogEnvelope) -> Value {
    match env {
        LogEnvelope::Linear { r, b1 } => json!({"kind": "linear", "r": r, "b1": b1}),
        LogEnvelope::Power { p } => json!({"kind": "power", "p": p}),
        LogEnvelope::ExpPower { k } => json!({"kind": "exp_power", "k": k}),
        LogEnvelope::ExpNOverLogN => json!({"kind": "exp_n_over_log_n"}),
        LogEnvelope::Custom(v) => json!(v),
    }
}

/// Inverse of [`parse_spec`].
pub fn spec_to_json(family: &GapFamily, truncate_n: Option<usize>) -> Value {
    let params = match family {
        GapFamily::Explicit(x) => json!({"x": x}),
        GapFamily::Constant { alpha } => json!({"alpha": alpha}),
        GapFamily::Polynomial { p } | GapFamily::SubexpExp { p } => json!({"p": p}),
        GapFamily::Exponential { c } => json!({"c": c}),
        GapFamily::DoubleExp => json!({}),
        GapFamily::Oscillating(o) => json!({"c": o.c, "b": envelope_json(&o.envelope)}),
        GapFamily::Custom(cf) => match cf {
            CustomFamily::AlternatingPower { p } => json!({"id": cf.id(), "p": p}),
            CustomFamily::ExpExpPower { k } => json!({"id": cf.id(), "k": k}),
            CustomFamily::ExpExpNOverLogN => json!({"id": cf.id()}),
        },
    };
    let name = if matches!(family, GapFamily::Custom(_)) {
        "custom"
    } else {
        family.name()
    };
    let mut out = json!({"family": name, "params": params});
    if let Some(n) = truncate_n {
        out["truncate_n"] = json!(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_family() {
        let cases = [
            r#"{"family":"explicit","params":{"x":[2,5,9]}}"#,
            r#"{"family":"explicit","x":[2,5]}"#,
            r#"{"family":"constant","params":{"alpha":2},"truncate_n":10}"#,
            r#"{"family":"polynomial","params":{"p":3}}"#,
            r#"{"family":"exponential","params":{"c":1}}"#,
            r#"{"family":"subexp_exp","params":{"p":0.5}}"#,
            r#"{"family":"double_exp"}"#,
            r#"{"family":"oscillating","params":{"c":2,"b":{"kind":"linear","r":1,"b1":1}}}"#,
            r#"{"family":"oscillating","params":{"c":2,"b":[1,2,3,4,5]},"truncate_n":5}"#,
            r#"{"family":"custom","params":{"id":"exp_exp_power","k":0.5}}"#,
        ];
        for text in cases {
            let s = parse_spec(text).unwrap_or_else(|e| panic!("{text}: {e}"));
            s.materialize(None)
                .unwrap_or_else(|e| panic!("{text}: {e}"));
            let back = parse_spec(&spec_to_json(&s.family, s.truncate_n).to_string()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn defaults_and_overrides() {
        let s = parse_spec(r#"{"family":"explicit","params":{"x":[2,5,9]}}"#).unwrap();
        assert_eq!(s.resolved_n(None), 3);
        let s = parse_spec(r#"{"family":"double_exp"}"#).unwrap();
        assert_eq!(s.resolved_n(None), DEFAULT_TRUNCATE_N);
        assert_eq!(s.resolved_n(Some(7)), 7);
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            "not json",
            "[]",
            r#"{"params":{}}"#,
            r#"{"family":"nope"}"#,
            r#"{"family":"constant","params":{"alpha":"two"}}"#,
            r#"{"family":"constant","params":{"alpha":2},"truncate_n":0}"#,
            r#"{"family":"oscillating","params":{"c":2,"b":{"kind":"cubic"}}}"#,
        ] {
            assert!(
                matches!(parse_spec(text), Err(Error::SpecParse(_))),
                "{text}"
            );
        }
    }
}
