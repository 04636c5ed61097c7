//! Experiment parameter schemas and value parsing.
//!
//! Every value, whether it comes from a flag, a config file or a default,
//! goes through the same parser and is stored as canonical JSON so the
//! echoed configuration does not depend on how it was spelled.

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    Int,
    Float,
    /// A float or `auto` (stored as `null`).
    OptFloat,
    /// Comma list, inclusive range `a..b` or JSON array of integers.
    Ints,
    /// Comma list or JSON array of floats.
    Floats,
    Choice(&'static [&'static str]),
}

#[derive(Clone, Copy, Debug)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

impl Param {
    pub const fn new(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Self {
        Self {
            name,
            kind,
            default,
            help,
        }
    }
}

fn parse_float(s: &str) -> Result<f64, String> {
    let s = s.trim();
    // fractions such as 1/3 are accepted
    let x = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
            if b == 0.0 {
                return Err(format!("'{s}' divides by zero"));
            }
            a / b
        }
        None => s.parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_int(s: &str) -> Result<i64, String> {
    s.trim().parse().map_err(|_| format!("'{}' is not an integer", s.trim()))
}

fn json_int(v: &Value) -> Result<i64, String> {
    if let Some(i) = v.as_i64() {
        return Ok(i);
    }
    match v.as_f64() {
        Some(x) if x.fract() == 0.0 && x.abs() < 9e15 => Ok(x as i64),
        _ => Err(format!("{v} is not an integer")),
    }
}

fn json_float(v: &Value) -> Result<f64, String> {
    match v {
        Value::String(s) => parse_float(s),
        _ => v.as_f64().ok_or_else(|| format!("{v} is not a number")),
    }
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn non_empty<T>(v: Vec<T>) -> Result<Vec<T>, String> {
    if v.is_empty() {
        Err("empty list".into())
    } else {
        Ok(v)
    }
}

impl Kind {
    pub fn value_name(self) -> &'static str {
        match self {
            Kind::Int => "INT",
            Kind::Float => "FLOAT",
            Kind::OptFloat => "FLOAT|auto",
            Kind::Ints => "INTS",
            Kind::Floats => "FLOATS",
            Kind::Choice(_) => "NAME",
        }
    }

    /// Parses a flag value.
    pub fn parse_str(self, s: &str) -> Result<Value, String> {
        let t = s.trim();
        match self {
            Kind::Int => parse_int(t).map(Value::from),
            Kind::Float => parse_float(t).map(float_value),
            Kind::OptFloat if t == "auto" => Ok(Value::Null),
            Kind::OptFloat => parse_float(t).map(float_value),
            Kind::Ints | Kind::Floats if t.starts_with('[') => {
                let v: Value = serde_json::from_str(t).map_err(|e| format!("bad JSON list '{t}': {e}"))?;
                self.from_json(&v)
            }
            Kind::Ints => {
                if let Some((a, b)) = t.split_once("..") {
                    let (a, b) = (parse_int(a)?, parse_int(b)?);
                    if a > b {
                        return Err(format!("empty range {t}"));
                    }
                    return Ok(Value::from((a..=b).collect::<Vec<_>>()));
                }
                let v = t.split(',').map(parse_int).collect::<Result<Vec<_>, _>>()?;
                Ok(Value::from(non_empty(v)?))
            }
            Kind::Floats => {
                let v = t.split(',').map(parse_float).collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Array(non_empty(v)?.into_iter().map(float_value).collect()))
            }
            Kind::Choice(options) => {
                if options.contains(&t) {
                    Ok(Value::from(t))
                } else {
                    Err(format!("'{t}' is not one of {}", options.join(", ")))
                }
            }
        }
    }

    /// Parses a config-file value. Strings go through the flag parser, so
    /// `"0..3"` works in files too.
    pub fn from_json(self, v: &Value) -> Result<Value, String> {
        if let Value::String(s) = v {
            return self.parse_str(s);
        }
        match self {
            Kind::Int => json_int(v).map(Value::from),
            Kind::Float => json_float(v).map(float_value),
            Kind::OptFloat if v.is_null() => Ok(Value::Null),
            Kind::OptFloat => json_float(v).map(float_value),
            Kind::Ints => match v {
                Value::Array(a) => Ok(Value::from(non_empty(a.iter().map(json_int).collect::<Result<Vec<_>, _>>()?)?)),
                _ => json_int(v).map(|i| Value::from(vec![i])),
            },
            Kind::Floats => match v {
                Value::Array(a) => {
                    let xs = a.iter().map(json_float).collect::<Result<Vec<_>, _>>()?;
                    Ok(Value::Array(non_empty(xs)?.into_iter().map(float_value).collect()))
                }
                _ => json_float(v).map(|x| Value::Array(vec![float_value(x)])),
            },
            Kind::Choice(_) => Err(format!("{v} is not a name")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn ranges_lists_and_arrays_agree() {
        let want = json!([0, 1, 2, 3]);
        assert_eq!(Kind::Ints.parse_str("0..3").unwrap(), want);
        assert_eq!(Kind::Ints.parse_str("0,1,2,3").unwrap(), want);
        assert_eq!(Kind::Ints.parse_str("[0,1,2,3]").unwrap(), want);
        assert_eq!(Kind::Ints.from_json(&json!("0..3")).unwrap(), want);
        assert_eq!(Kind::Ints.from_json(&json!(2)).unwrap(), json!([2]));
        assert!(Kind::Ints.parse_str("3..0").is_err());
        assert!(Kind::Ints.parse_str("1,,2").is_err());
    }

    #[test]
    fn floats_and_fractions() {
        assert_eq!(Kind::Float.parse_str("1/4").unwrap(), json!(0.25));
        assert_eq!(Kind::Floats.parse_str("0, 0.5").unwrap(), json!([0.0, 0.5]));
        assert_eq!(Kind::OptFloat.parse_str("auto").unwrap(), Value::Null);
        assert!(Kind::Float.parse_str("nan").is_err());
        assert!(Kind::Float.parse_str("1/0").is_err());
        assert!(Kind::Int.from_json(&json!(2.5)).is_err());
        assert_eq!(Kind::Int.from_json(&json!(4.0)).unwrap(), json!(4));
    }

    #[test]
    fn choices() {
        let k = Kind::Choice(&["rate", "lindblad"]);
        assert_eq!(k.parse_str("rate").unwrap(), json!("rate"));
        assert!(k.parse_str("Rate").is_err());
        assert!(k.from_json(&json!(1)).is_err());
    }
}
