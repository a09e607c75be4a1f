//! Cell values, error kinds, coercions and the comparison order.

use crate::formula::format_number;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorKind {
    Div0,
    Value,
    Na,
    Ref,
    Name,
    Num,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 6] = [
        ErrorKind::Div0,
        ErrorKind::Value,
        ErrorKind::Na,
        ErrorKind::Ref,
        ErrorKind::Name,
        ErrorKind::Num,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Div0 => "#DIV/0!",
            ErrorKind::Value => "#VALUE!",
            ErrorKind::Na => "#N/A",
            ErrorKind::Ref => "#REF!",
            ErrorKind::Name => "#NAME?",
            ErrorKind::Num => "#NUM!",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single spreadsheet datum. Numbers are always finite.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Logical(bool),
    Error(ErrorKind),
    Blank,
}

/// Type tag of a [`Value`], in the order used for cross-type comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    Number,
    Text,
    Logical,
    Error,
    Blank,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::Number => "number",
            ValueType::Text => "text",
            ValueType::Logical => "logical",
            ValueType::Error => "error",
            ValueType::Blank => "blank",
        }
    }
}

impl Value {
    /// Wraps a float, turning NaN and infinities into `#NUM!`.
    pub fn number(n: f64) -> Value {
        if n.is_finite() {
            Value::Number(if n == 0.0 { 0.0 } else { n })
        } else {
            Value::Error(ErrorKind::Num)
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn value_type(&self) -> ValueType {
        match self {
            Value::Number(_) => ValueType::Number,
            Value::Text(_) => ValueType::Text,
            Value::Logical(_) => ValueType::Logical,
            Value::Error(_) => ValueType::Error,
            Value::Blank => ValueType::Blank,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Value::Error(_))
    }

    pub fn error(&self) -> Option<ErrorKind> {
        match self {
            Value::Error(e) => Some(*e),
            _ => None,
        }
    }

    /// Arithmetic coercion: numeral text parses, logicals are 1/0, blank is 0.
    pub fn to_number(&self) -> Result<f64, ErrorKind> {
        match self {
            Value::Number(n) => Ok(*n),
            Value::Text(s) => parse_numeral(s).ok_or(ErrorKind::Value),
            Value::Logical(b) => Ok(if *b { 1.0 } else { 0.0 }),
            Value::Blank => Ok(0.0),
            Value::Error(e) => Err(*e),
        }
    }

    pub fn to_text(&self) -> Result<String, ErrorKind> {
        match self {
            Value::Number(n) => Ok(format_number(*n)),
            Value::Text(s) => Ok(s.clone()),
            Value::Logical(b) => Ok(if *b { "TRUE" } else { "FALSE" }.into()),
            Value::Blank => Ok(String::new()),
            Value::Error(e) => Err(*e),
        }
    }

    /// Condition coercion: numbers are true unless zero, blank is false,
    /// text is `#VALUE!`.
    pub fn to_bool(&self) -> Result<bool, ErrorKind> {
        match self {
            Value::Number(n) => Ok(*n != 0.0),
            Value::Logical(b) => Ok(*b),
            Value::Blank => Ok(false),
            Value::Text(_) => Err(ErrorKind::Value),
            Value::Error(e) => Err(*e),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => f.write_str(&format_number(*n)),
            Value::Text(s) => f.write_str(s),
            Value::Logical(b) => f.write_str(if *b { "TRUE" } else { "FALSE" }),
            Value::Error(e) => f.write_str(e.as_str()),
            Value::Blank => Ok(()),
        }
    }
}

/// JSON form: numbers, strings, booleans, `null` for blank and
/// `{"error": "#N/A"}` for errors.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Value::Number(n) => s.serialize_f64(*n),
            Value::Text(t) => s.serialize_str(t),
            Value::Logical(b) => s.serialize_bool(*b),
            Value::Blank => s.serialize_none(),
            Value::Error(e) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("error", e.as_str())?;
                m.end()
            }
        }
    }
}

/// Decimal numeral: optional sign, digits with optional point, optional
/// exponent. No grouping separators, no surrounding whitespace.
pub fn parse_numeral(s: &str) -> Option<f64> {
    let b = s.as_bytes();
    let mut i = 0;
    if matches!(b.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while b.get(i).is_some_and(u8::is_ascii_digit) {
        i += 1;
    }
    let mut digits = i - int_start;
    if b.get(i) == Some(&b'.') {
        i += 1;
        let frac_start = i;
        while b.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if matches!(b.get(i), Some(b'e' | b'E')) {
        i += 1;
        if matches!(b.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let exp_start = i;
        while b.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn fold(s: &str) -> impl Iterator<Item = char> + '_ {
    s.chars().flat_map(char::to_lowercase)
}

/// Case-insensitive text ordering by code point after case folding.
pub fn cmp_text(a: &str, b: &str) -> Ordering {
    fold(a).cmp(fold(b))
}

/// Total order used by comparison operators and approximate MATCH:
/// every Number < every Text < every Logical. Blank takes the neutral
/// value of the other side's type (0, "", FALSE). Errors must be
/// handled by the caller.
pub fn compare(a: &Value, b: &Value) -> Ordering {
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Number(_) => 0,
            Value::Text(_) => 1,
            Value::Logical(_) => 2,
            Value::Blank | Value::Error(_) => 3,
        }
    }
    match (a, b) {
        (Value::Blank, Value::Blank) => Ordering::Equal,
        (Value::Blank, other) => compare(&neutral(other), other),
        (other, Value::Blank) => compare(other, &neutral(other)),
        (Value::Number(x), Value::Number(y)) => x.partial_cmp(y).unwrap_or(Ordering::Equal),
        (Value::Text(x), Value::Text(y)) => cmp_text(x, y),
        (Value::Logical(x), Value::Logical(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

fn neutral(like: &Value) -> Value {
    match like {
        Value::Text(_) => Value::Text(String::new()),
        Value::Logical(_) => Value::Logical(false),
        _ => Value::Number(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals() {
        for (s, v) in [("007", 7.0), ("-1.5", -1.5), ("+2", 2.0), (".5", 0.5), ("1e3", 1000.0), ("3.", 3.0)] {
            assert_eq!(parse_numeral(s), Some(v), "{s}");
        }
        for s in ["", "1,000", " 1", "1 ", "e5", "1e", ".", "-", "abc", "1e999", "NaN", "inf"] {
            assert_eq!(parse_numeral(s), None, "{s}");
        }
    }

    #[test]
    fn coercions() {
        assert_eq!(Value::text("5").to_number(), Ok(5.0));
        assert_eq!(Value::text("five").to_number(), Err(ErrorKind::Value));
        assert_eq!(Value::Logical(true).to_number(), Ok(1.0));
        assert_eq!(Value::Blank.to_number(), Ok(0.0));
        assert_eq!(Value::Number(2.5).to_text().unwrap(), "2.5");
        assert_eq!(Value::Number(7.0).to_text().unwrap(), "7");
        assert_eq!(Value::text("x").to_bool(), Err(ErrorKind::Value));
        assert_eq!(Value::number(f64::NAN), Value::Error(ErrorKind::Num));
    }

    #[test]
    fn total_order() {
        use Ordering::*;
        let n = |x| Value::Number(x);
        assert_eq!(compare(&n(1.0), &Value::text("a")), Less);
        assert_eq!(compare(&Value::text("zzz"), &Value::Logical(false)), Less);
        assert_eq!(compare(&Value::text("ABC"), &Value::text("abc")), Equal);
        assert_eq!(compare(&Value::text("b"), &Value::text("A")), Greater);
        assert_eq!(compare(&Value::Blank, &n(0.0)), Equal);
        assert_eq!(compare(&Value::Blank, &Value::text("")), Equal);
        assert_eq!(compare(&Value::Blank, &n(-1.0)), Greater);
        assert_eq!(compare(&n(3.0), &Value::Blank), Greater);
    }

    #[test]
    fn json_shape() {
        let v = vec![
            Value::Number(1.5),
            Value::text("a"),
            Value::Logical(true),
            Value::Blank,
            Value::Error(ErrorKind::Na),
        ];
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r##"[1.5,"a",true,null,{"error":"#N/A"}]"##
        );
    }
}
