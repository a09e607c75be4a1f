//! Function catalog: which functions exist, their arity, and how their
//! arguments lift over arrays.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Text,
    Math,
    ConditionArrayError,
    Extended,
    ProblemSpecificBaseline,
}

/// How a function treats array arguments in array mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lifting {
    /// Maps over array arguments cell by cell.
    Elementwise,
    /// Collapses ranges to a single value.
    Aggregating,
    /// Mixes range parameters with lifted scalar parameters, or controls
    /// evaluation itself.
    Special,
}

/// How one parameter receives its argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    /// A single value: intersected in scalar mode, lifted in array mode.
    Value,
    /// The whole operand, range or scalar, untouched.
    Range,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionSpec {
    pub name: &'static str,
    pub min_args: usize,
    /// `None` for variadic functions.
    pub max_args: Option<usize>,
    pub category: Category,
    pub lifting: Lifting,
}

impl FunctionSpec {
    pub fn accepts(&self, n: usize) -> bool {
        n >= self.min_args && self.max_args.is_none_or(|m| n <= m)
    }

    pub fn param(&self, index: usize) -> Param {
        use Param::*;
        match (self.name, index) {
            ("SMALL" | "LARGE", 1) | ("COUNTIF" | "SUMIF" | "AVERAGEIF", 1) => Value,
            ("COUNTIFS", i) if i % 2 == 1 => Value,
            ("SUMIFS", i) if i > 0 && i % 2 == 0 => Value,
            ("MATCH", 1)
            | ("INDEX", 0)
            | ("VLOOKUP" | "HLOOKUP", 1)
            | ("OFFSET" | "ROW" | "COLUMN", 0) => Range,
            _ if self.lifting == Lifting::Aggregating => Range,
            _ => Value,
        }
    }

    /// Whether an error among the lifted arguments short-circuits the call.
    pub fn propagates_errors(&self) -> bool {
        !matches!(self.name, "IF" | "ISERROR" | "IFERROR" | "COUNT")
    }
}

const fn spec(
    name: &'static str,
    min_args: usize,
    max_args: Option<usize>,
    category: Category,
    lifting: Lifting,
) -> FunctionSpec {
    FunctionSpec {
        name,
        min_args,
        max_args,
        category,
        lifting,
    }
}

use Category::*;
use Lifting::*;

pub static CATALOG: &[FunctionSpec] = &[
    spec("LEN", 1, Some(1), Text, Elementwise),
    spec("LEFT", 1, Some(2), Text, Elementwise),
    spec("RIGHT", 1, Some(2), Text, Elementwise),
    spec("SEARCH", 2, Some(3), Text, Elementwise),
    spec("SUM", 1, None, Math, Aggregating),
    spec("AVERAGE", 1, None, Math, Aggregating),
    spec("MIN", 1, None, Math, Aggregating),
    spec("MAX", 1, None, Math, Aggregating),
    spec("IF", 2, Some(3), ConditionArrayError, Special),
    spec("MATCH", 2, Some(3), ConditionArrayError, Special),
    spec("INDEX", 2, Some(3), ConditionArrayError, Special),
    spec("ISERROR", 1, Some(1), ConditionArrayError, Elementwise),
    spec("SUBSTITUTE", 3, Some(4), Extended, Elementwise),
    spec("SMALL", 2, Some(2), Extended, Aggregating),
    spec("LARGE", 2, Some(2), Extended, Aggregating),
    spec("AND", 1, None, Extended, Aggregating),
    spec("OR", 1, None, Extended, Aggregating),
    spec("NOT", 1, Some(1), Extended, Elementwise),
    spec("INT", 1, Some(1), Extended, Elementwise),
    spec("ROUND", 2, Some(2), Extended, Elementwise),
    spec("RAND", 0, Some(0), Extended, Special),
    spec("OFFSET", 3, Some(5), Extended, Special),
    spec("ROW", 0, Some(1), Extended, Special),
    spec("COLUMN", 0, Some(1), Extended, Special),
    spec("COUNT", 1, None, ProblemSpecificBaseline, Aggregating),
    spec("COUNTA", 1, None, ProblemSpecificBaseline, Aggregating),
    spec("COUNTIF", 2, Some(2), ProblemSpecificBaseline, Aggregating),
    spec("COUNTIFS", 2, None, ProblemSpecificBaseline, Aggregating),
    spec("SUMIF", 2, Some(3), ProblemSpecificBaseline, Aggregating),
    spec("SUMIFS", 3, None, ProblemSpecificBaseline, Aggregating),
    spec("AVERAGEIF", 2, Some(3), ProblemSpecificBaseline, Aggregating),
    spec("VLOOKUP", 3, Some(4), ProblemSpecificBaseline, Special),
    spec("HLOOKUP", 3, Some(4), ProblemSpecificBaseline, Special),
    spec("IFERROR", 2, Some(2), ProblemSpecificBaseline, Elementwise),
];

/// The twelve core functions.
pub const CORE: [&str; 12] = [
    "LEN", "LEFT", "RIGHT", "SEARCH", "SUM", "AVERAGE", "MIN", "MAX", "IF", "MATCH", "INDEX",
    "ISERROR",
];

/// The twelve functions of the extended set.
pub const EXTENDED: [&str; 12] = [
    "SUBSTITUTE", "SMALL", "LARGE", "AND", "OR", "NOT", "INT", "ROUND", "RAND", "OFFSET", "ROW",
    "COLUMN",
];

/// Problem-specific functions the evaluator understands so that rewrites
/// can be checked against them. Rewrites never emit these.
pub const BASELINE: [&str; 10] = [
    "COUNT", "COUNTA", "COUNTIF", "COUNTIFS", "SUMIF", "SUMIFS", "AVERAGEIF", "VLOOKUP", "HLOOKUP",
    "IFERROR",
];

pub fn lookup(name: &str) -> Option<&'static FunctionSpec> {
    CATALOG.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Core or extended.
pub fn is_general_purpose(name: &str) -> bool {
    CORE.contains(&name) || EXTENDED.contains(&name)
}

pub fn is_baseline(name: &str) -> bool {
    BASELINE.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_partition_the_catalog() {
        assert_eq!(CATALOG.len(), 34);
        for s in CATALOG {
            let n = [CORE.contains(&s.name), EXTENDED.contains(&s.name), BASELINE.contains(&s.name)]
                .iter()
                .filter(|b| **b)
                .count();
            assert_eq!(n, 1, "{}", s.name);
            assert_eq!(s.category == ProblemSpecificBaseline, is_baseline(s.name));
        }
        for n in CORE.iter().chain(&EXTENDED).chain(&BASELINE) {
            assert!(lookup(n).is_some(), "{n}");
        }
    }

    #[test]
    fn params() {
        let p = |n: &str, i| lookup(n).unwrap().param(i);
        assert_eq!(p("SUM", 0), Param::Range);
        assert_eq!(p("SMALL", 1), Param::Value);
        assert_eq!(p("COUNTIF", 0), Param::Range);
        assert_eq!(p("COUNTIF", 1), Param::Value);
        assert_eq!(p("SUMIFS", 0), Param::Range);
        assert_eq!(p("SUMIFS", 1), Param::Range);
        assert_eq!(p("SUMIFS", 2), Param::Value);
        assert_eq!(p("COUNTIFS", 2), Param::Range);
        assert_eq!(p("COUNTIFS", 3), Param::Value);
        assert_eq!(p("MATCH", 0), Param::Value);
        assert_eq!(p("MATCH", 1), Param::Range);
        assert_eq!(p("LEN", 0), Param::Value);
    }
}
