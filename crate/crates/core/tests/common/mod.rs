//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sprego::eval::catalog::CATALOG;
use sprego::value::{compare, Value};
use std::cmp::Ordering;

const NAMES: [&str; 5] = ["age", "price", "data", "x_1", "Total"];
const SIGNS: [&str; 12] = ["+", "-", "*", "/", "^", "&", "=", "<>", "<", "<=", ">", ">="];

fn ws<R: Rng>(rng: &mut R) -> &'static str {
    ["", "", "", " ", "  "].choose(rng).unwrap()
}

fn mixed_case<R: Rng>(rng: &mut R, s: &str) -> String {
    match rng.gen_range(0..3) {
        0 => s.to_ascii_uppercase(),
        1 => s.to_ascii_lowercase(),
        _ => s
            .chars()
            .map(|c| if rng.gen_bool(0.5) { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() })
            .collect(),
    }
}

fn number<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..6) {
        0 => rng.gen_range(0..100).to_string(),
        1 => format!("{}.{}", rng.gen_range(0..50), rng.gen_range(0..1000)),
        2 => format!(".{}", rng.gen_range(1..99)),
        3 => format!("{}e{}", rng.gen_range(1..9), rng.gen_range(-5..8)),
        4 => format!("{}E+{}", rng.gen_range(1..9), rng.gen_range(0..20)),
        _ => "0".into(),
    }
}

fn text<R: Rng>(rng: &mut R) -> String {
    let pieces = ["", "a", "b c", "\"\"", "x\"\"y", "é", ">5", "1"];
    let body: String = (0..rng.gen_range(0..3)).map(|_| *pieces.choose(rng).unwrap()).collect();
    format!("\"{body}\"")
}

fn cell<R: Rng>(rng: &mut R) -> String {
    let col = ["A", "B", "c", "Z", "AA", "ab"].choose(rng).unwrap();
    let dollar = |rng: &mut R| if rng.gen_bool(0.2) { "$" } else { "" };
    format!("{}{col}{}{}", dollar(rng), dollar(rng), rng.gen_range(1..40))
}

fn leaf<R: Rng>(rng: &mut R, with_text: bool) -> String {
    match rng.gen_range(0..if with_text { 7 } else { 6 }) {
        0 => number(rng),
        1 => {
            let b = if rng.gen_bool(0.5) { "TRUE" } else { "FALSE" };
            mixed_case(rng, b)
        }
        2 | 3 => cell(rng),
        4 => format!("{}:{}", cell(rng), cell(rng)),
        5 => NAMES.choose(rng).unwrap().to_string(),
        _ => text(rng),
    }
}

/// Random syntactically valid expression text with irregular spacing,
/// letter case and parenthesization.
pub fn expr<R: Rng>(rng: &mut R, depth: u32, with_text: bool) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, with_text);
    }
    match rng.gen_range(0..10) {
        0..=2 => {
            let op = SIGNS.choose(rng).unwrap();
            let (w1, w2) = (ws(rng), ws(rng));
            format!("{}{w1}{op}{w2}{}", expr(rng, depth - 1, with_text), expr(rng, depth - 1, with_text))
        }
        3 => format!("-{}", expr(rng, depth - 1, with_text)),
        4 => format!("+{}", expr(rng, depth - 1, with_text)),
        5 => format!("{}%", leaf(rng, with_text)),
        6 => format!("({}{})", ws(rng), expr(rng, depth - 1, with_text)),
        _ => {
            let (name, n) = if rng.gen_bool(0.1) {
                ("Foo_bar", rng.gen_range(0..3))
            } else {
                let spec = CATALOG.choose(rng).unwrap();
                let max = spec.max_args.unwrap_or(spec.min_args + 3);
                (spec.name, rng.gen_range(spec.min_args..=max))
            };
            let args: Vec<String> = (0..n).map(|_| expr(rng, depth - 1, with_text)).collect();
            let sep = format!(",{}", ws(rng));
            format!("{}({})", mixed_case(rng, name), args.join(&sep))
        }
    }
}

/// A complete formula in one of the three accepted forms.
pub fn formula<R: Rng>(rng: &mut R) -> String {
    let body = expr(rng, 4, true);
    match rng.gen_range(0..4) {
        0 => format!("{{={body}}}"),
        1 => body,
        _ => format!("={body}"),
    }
}

/// Text that must not parse. Built from a valid text-free formula so that
/// inserted characters cannot land inside a string literal.
pub fn malformed<R: Rng>(rng: &mut R) -> String {
    let body = expr(rng, 3, false);
    match rng.gen_range(0..8) {
        0 => format!("={body}+"),
        1 => format!("=({body}"),
        2 => format!("={body})"),
        3 => format!("={body}&\"open"),
        4 => format!("{{={body}"),
        5 => format!("={body} 1"),
        6 => {
            let chars: Vec<char> = body.chars().collect();
            let at = rng.gen_range(0..=chars.len());
            let bad = ['@', '#', '!', '?', ';', '[', '~'].choose(rng).unwrap();
            let s: String = chars[..at].iter().chain([bad]).chain(&chars[at..]).collect();
            format!("={s}")
        }
        _ => format!("=SUM({body},)"),
    }
}

/// Largest value `<=` lookup by a full scan; the last occurrence wins.
pub fn oracle_ascending(lookup: &Value, v: &[Value]) -> Option<usize> {
    let mut best: Option<(usize, &Value)> = None;
    for (i, x) in v.iter().enumerate() {
        if compare(x, lookup) != Ordering::Greater
            && best.is_none_or(|(_, b)| compare(x, b) != Ordering::Less)
        {
            best = Some((i + 1, x));
        }
    }
    best.map(|(i, _)| i)
}

/// Smallest value `>=` lookup by a full scan; the last occurrence wins.
pub fn oracle_descending(lookup: &Value, v: &[Value]) -> Option<usize> {
    let mut best: Option<(usize, &Value)> = None;
    for (i, x) in v.iter().enumerate() {
        if compare(x, lookup) != Ordering::Less
            && best.is_none_or(|(_, b)| compare(x, b) != Ordering::Greater)
        {
            best = Some((i + 1, x));
        }
    }
    best.map(|(i, _)| i)
}

pub fn oracle_exact(lookup: &Value, v: &[Value]) -> Option<usize> {
    v.iter().position(|x| x == lookup).map(|i| i + 1)
}

/// Every vector of each length in `lengths` over `alphabet`.
pub fn all_vectors(alphabet: &[f64], lengths: std::ops::RangeInclusive<usize>) -> Vec<Vec<f64>> {
    let k = alphabet.len();
    let mut out = Vec::new();
    for len in lengths {
        for mut n in 0..k.pow(len as u32) {
            out.push(
                (0..len)
                    .map(|_| {
                        let d = n % k;
                        n /= k;
                        alphabet[d]
                    })
                    .collect(),
            );
        }
    }
    out
}

/// Elementwise formula body over columns `a` (numeric), `b` (text) and
/// `c` (mixed).
pub fn elementwise<R: Rng>(rng: &mut R, depth: u32) -> String {
    fn num<R: Rng>(rng: &mut R, d: u32) -> String {
        if d == 0 || rng.gen_bool(0.2) {
            return ["a", "c", "a", "2", "0.5", "-1", "0"].choose(rng).unwrap().to_string();
        }
        match rng.gen_range(0..11) {
            0 | 1 => {
                let op = ["+", "-", "*", "/", "^"].choose(rng).unwrap();
                format!("({}{op}{})", num(rng, d - 1), num(rng, d - 1))
            }
            2 => format!("LEN({})", txt(rng, d - 1)),
            3 => format!("INT({})", num(rng, d - 1)),
            4 => format!("ROUND({},{})", num(rng, d - 1), rng.gen_range(0..3)),
            5 => format!("SEARCH(\"{}\",{})", ["a", "b", "ab"].choose(rng).unwrap(), txt(rng, d - 1)),
            6 => format!("IF({},{},{})", boolean(rng, d - 1), num(rng, d - 1), num(rng, d - 1)),
            7 => format!("IFERROR({},-1)", num(rng, d - 1)),
            8 => format!("-{}", num(rng, d - 1)),
            9 => format!("{}%", num(rng, d - 1)),
            _ => format!("IF({},{})", boolean(rng, d - 1), num(rng, d - 1)),
        }
    }
    fn txt<R: Rng>(rng: &mut R, d: u32) -> String {
        if d == 0 || rng.gen_bool(0.2) {
            return ["b", "c", "\"ab\"", "b"].choose(rng).unwrap().to_string();
        }
        match rng.gen_range(0..5) {
            0 => format!("({}&{})", txt(rng, d - 1), txt(rng, d - 1)),
            1 => format!("LEFT({},{})", txt(rng, d - 1), rng.gen_range(0..3)),
            2 => format!("RIGHT({},{})", txt(rng, d - 1), num(rng, d - 1)),
            3 => format!("SUBSTITUTE({},\"a\",\"z\")", txt(rng, d - 1)),
            _ => format!("({}&{})", num(rng, d - 1), txt(rng, d - 1)),
        }
    }
    fn boolean<R: Rng>(rng: &mut R, d: u32) -> String {
        match rng.gen_range(0..5) {
            0 => format!("NOT({})", boolean(rng, d.saturating_sub(1))),
            1 => format!("ISERROR({})", num(rng, d)),
            2 => format!("{}>{}", txt(rng, d), txt(rng, d)),
            _ => {
                let op = ["=", "<>", "<", "<=", ">", ">="].choose(rng).unwrap();
                format!("{}{op}{}", num(rng, d), num(rng, d))
            }
        }
    }
    match rng.gen_range(0..3) {
        0 => txt(rng, depth),
        1 => boolean(rng, depth),
        _ => num(rng, depth),
    }
}
