//! Position-finding primitives behind MATCH, INDEX and SEARCH.

use crate::table::RangeView;
use crate::value::{cmp_text, compare, ErrorKind, Value};
use std::cmp::Ordering;

/// Third argument of MATCH.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchType {
    /// `1`: vector sorted ascending, find the largest value `<=` lookup.
    Ascending,
    /// `0`: any order, find the first equal value.
    Exact,
    /// `-1`: vector sorted descending, find the smallest value `>=` lookup.
    Descending,
}

impl MatchType {
    /// Sign of the numeric argument selects the type.
    pub fn from_number(n: f64) -> MatchType {
        if n > 0.0 {
            MatchType::Ascending
        } else if n < 0.0 {
            MatchType::Descending
        } else {
            MatchType::Exact
        }
    }
}

/// Type-sensitive equality used by exact matching; text ignores case,
/// blanks and errors never match.
fn exact_eq(cell: &Value, lookup: &Value) -> bool {
    match (cell, lookup) {
        (Value::Number(a), Value::Number(b)) => a == b,
        (Value::Text(a), Value::Text(b)) => cmp_text(a, b) == Ordering::Equal,
        (Value::Logical(a), Value::Logical(b)) => a == b,
        _ => false,
    }
}

/// 1-based position of `lookup` in a one-dimensional vector.
///
/// The approximate types assume the vector is sorted and find the
/// boundary with a binary search, so on sorted input the result is the
/// last position whose value is `<=` (ascending) or `>=` (descending) the
/// lookup. Unsorted input gives whatever the search lands on.
pub fn match_position(lookup: &Value, vector: &RangeView, match_type: MatchType) -> Value {
    if let Value::Error(e) = lookup {
        return Value::Error(*e);
    }
    if !vector.is_vector() {
        return Value::Error(ErrorKind::Value);
    }
    let cells = &vector.cells;
    let found = match match_type {
        MatchType::Exact => cells.iter().position(|c| exact_eq(c, lookup)).map(|i| i + 1),
        MatchType::Ascending => {
            let p = cells.partition_point(|c| !c.is_error() && compare(c, lookup) != Ordering::Greater);
            (p > 0).then_some(p)
        }
        MatchType::Descending => {
            let p = cells.partition_point(|c| !c.is_error() && compare(c, lookup) != Ordering::Less);
            (p > 0).then_some(p)
        }
    };
    match found {
        Some(p) => Value::Number(p as f64),
        None => Value::Error(ErrorKind::Na),
    }
}

/// INDEX: the `row`-th element of a vector, or cell (`row`, `col`) of a
/// block. Positions are 1-based; anything out of bounds is `#REF!`.
pub fn index_select(source: &RangeView, row: i64, col: Option<i64>) -> Value {
    if source.is_empty() {
        return Value::Error(ErrorKind::Ref);
    }
    let (r, c) = match col {
        None => {
            if !source.is_vector() {
                return Value::Error(ErrorKind::Value);
            }
            if source.rows == 1 {
                (1, row)
            } else {
                (row, 1)
            }
        }
        Some(c) => (row, c),
    };
    if r < 1 || c < 1 {
        return Value::Error(ErrorKind::Ref);
    }
    source
        .get(r as usize, c as usize)
        .cloned()
        .unwrap_or(Value::Error(ErrorKind::Ref))
}

/// SEARCH: 1-based character position of the first case-insensitive
/// occurrence of `needle` at or after `start`.
pub fn search_position(needle: &str, haystack: &str, start: Option<i64>) -> Value {
    let hay: Vec<char> = haystack.chars().collect();
    let pat: Vec<char> = needle.chars().collect();
    let start = start.unwrap_or(1);
    if start < 1 || start as usize > hay.len() + 1 {
        return Value::Error(ErrorKind::Value);
    }
    let same = |a: char, b: char| a == b || a.to_lowercase().eq(b.to_lowercase());
    let from = start as usize - 1;
    if pat.is_empty() {
        return Value::Number(start as f64);
    }
    (from..hay.len())
        .find(|&i| i + pat.len() <= hay.len() && pat.iter().zip(&hay[i..]).all(|(p, h)| same(*p, *h)))
        .map(|i| Value::Number(i as f64 + 1.0))
        .unwrap_or(Value::Error(ErrorKind::Value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nums(v: &[f64]) -> RangeView {
        RangeView::column(v.iter().map(|&x| Value::Number(x)).collect())
    }

    fn pos(v: Value) -> f64 {
        match v {
            Value::Number(n) => n,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn match_examples() {
        assert_eq!(pos(match_position(&Value::Number(3.0), &nums(&[1.0, 2.0, 3.0, 5.0]), MatchType::Ascending)), 3.0);
        let letters = RangeView::row(vec![Value::text("a"), Value::text("b"), Value::text("c")]);
        assert_eq!(pos(match_position(&Value::text("b"), &letters, MatchType::Exact)), 2.0);
        assert_eq!(pos(match_position(&Value::text("B"), &letters, MatchType::Exact)), 2.0);
        assert_eq!(pos(match_position(&Value::Number(4.0), &nums(&[9.0, 7.0, 4.0, 1.0]), MatchType::Descending)), 3.0);
        assert_eq!(
            match_position(&Value::Number(0.0), &nums(&[1.0, 2.0, 3.0]), MatchType::Ascending),
            Value::Error(ErrorKind::Na)
        );
    }

    #[test]
    fn match_edges() {
        let m = RangeView::filled(2, 2, Value::Number(1.0));
        assert_eq!(match_position(&Value::Number(1.0), &m, MatchType::Exact), Value::Error(ErrorKind::Value));
        assert_eq!(
            match_position(&Value::Number(1.0), &nums(&[]), MatchType::Ascending),
            Value::Error(ErrorKind::Na)
        );
        assert_eq!(
            match_position(&Value::Error(ErrorKind::Ref), &nums(&[1.0]), MatchType::Exact),
            Value::Error(ErrorKind::Ref)
        );
        // exact is type-sensitive
        let mixed = RangeView::column(vec![Value::text("1"), Value::Number(1.0)]);
        assert_eq!(pos(match_position(&Value::Number(1.0), &mixed, MatchType::Exact)), 2.0);
        // ties resolve to the last equal value
        assert_eq!(pos(match_position(&Value::Number(2.0), &nums(&[1.0, 2.0, 2.0, 3.0]), MatchType::Ascending)), 3.0);
        // unsorted input does not crash
        let _ = match_position(&Value::Number(2.0), &nums(&[5.0, 1.0, 4.0, 2.0]), MatchType::Descending);
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_select(&nums(&[10.0, 20.0, 30.0]), 2, None), Value::Number(20.0));
        let m = RangeView::new(2, 2, (1..=4).map(|x| Value::Number(x as f64)).collect());
        assert_eq!(index_select(&m, 2, Some(1)), Value::Number(3.0));
        assert_eq!(index_select(&nums(&[10.0]), 0, None), Value::Error(ErrorKind::Ref));
        assert_eq!(index_select(&nums(&[10.0]), 2, None), Value::Error(ErrorKind::Ref));
        assert_eq!(index_select(&m, 1, None), Value::Error(ErrorKind::Value));
        assert_eq!(index_select(&m, 1, Some(3)), Value::Error(ErrorKind::Ref));
        let row = RangeView::row(vec![Value::Number(1.0), Value::Number(2.0)]);
        assert_eq!(index_select(&row, 2, None), Value::Number(2.0));
    }

    #[test]
    fn search_examples() {
        assert_eq!(search_position("b", "abc", None), Value::Number(2.0));
        assert_eq!(search_position("B", "abc", None), Value::Number(2.0));
        assert_eq!(search_position("z", "abc", None), Value::Error(ErrorKind::Value));
        assert_eq!(search_position("a", "abca", Some(2)), Value::Number(4.0));
        assert_eq!(search_position("a", "abc", Some(0)), Value::Error(ErrorKind::Value));
        assert_eq!(search_position("a", "abc", Some(5)), Value::Error(ErrorKind::Value));
        assert_eq!(search_position("", "abc", Some(4)), Value::Number(4.0));
        assert_eq!(search_position("é", "CAFÉ", None), Value::Number(4.0));
    }
}
