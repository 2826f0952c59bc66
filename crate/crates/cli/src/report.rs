//! Output rendering.

use attriscore::rational::{to_decimal, RationalJson};
use attriscore::Rational;
use serde_json::{json, Map, Value};

use crate::input::Format;

pub fn rational(r: &Rational) -> Value {
    serde_json::to_value(RationalJson::from(r)).expect("rationals serialize")
}

/// Adds a `decimal` rendering next to every `{"num", "den"}` object.
pub fn annotate(v: &mut Value) {
    match v {
        Value::Object(map) => {
            if map.len() == 2 && map.contains_key("num") && map.contains_key("den") {
                if let Some(r) = as_rational(map) {
                    map.insert("decimal".into(), Value::String(to_decimal(&r)));
                }
                return;
            }
            map.values_mut().for_each(annotate);
        }
        Value::Array(items) => items.iter_mut().for_each(annotate),
        _ => {}
    }
}

fn as_rational(map: &Map<String, Value>) -> Option<Rational> {
    let j: RationalJson = serde_json::from_value(Value::Object(map.clone())).ok()?;
    Rational::try_from(j).ok()
}

pub fn render(mut v: Value, format: Format) -> String {
    annotate(&mut v);
    match format {
        Format::Json => serde_json::to_string_pretty(&v).expect("json values serialize"),
        Format::Table => {
            let mut out = Vec::new();
            table_lines(&v, "", &mut out);
            out.join("\n")
        }
    }
}

/// One `path: value` line per leaf; rationals print as `num/den (decimal)`.
fn table_lines(v: &Value, path: &str, out: &mut Vec<String>) {
    let line = |text: String| if path.is_empty() { text } else { format!("{path}: {text}") };
    let join = |key: &str| if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    match v {
        Value::Object(map) if map.contains_key("decimal") && map.contains_key("num") => {
            let r = as_rational(&Map::from_iter(
                map.iter().filter(|(k, _)| *k != "decimal").map(|(k, v)| (k.clone(), v.clone())),
            ))
            .expect("annotated rationals are valid");
            out.push(line(format!("{r} ({})", map["decimal"].as_str().unwrap_or_default())));
        }
        Value::Object(map) => map.iter().for_each(|(k, v)| table_lines(v, &join(k), out)),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let cells: Vec<String> = items.iter().map(scalar).collect();
            out.push(line(format!("[{}]", cells.join(", "))));
        }
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| table_lines(v, &join(&i.to_string()), out)),
        other => out.push(line(scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn error_json(code: &str, message: &str) -> String {
    json!({"error": {"code": code, "message": message}}).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use attriscore::rational::ratio;

    #[test]
    fn decimals_added_everywhere() {
        let mut v = json!({"a": rational(&ratio(1, 4)), "b": [rational(&ratio(2, 3))], "c": {"num": 1}});
        annotate(&mut v);
        assert_eq!(v["a"], json!({"num": 1, "den": 4, "decimal": "0.25"}));
        assert_eq!(v["b"][0]["decimal"], "0.666667");
        assert_eq!(v["c"], json!({"num": 1}));
    }

    #[test]
    fn table_rendering() {
        let v = json!({"score": rational(&ratio(1, 2)), "ids": ["a", "b"], "rows": [{"x": 1}]});
        assert_eq!(render(v, Format::Table), "score: 1/2 (0.5)\nids: [a, b]\nrows.0.x: 1");
    }
}
