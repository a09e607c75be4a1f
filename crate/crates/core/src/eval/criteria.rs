//! Criteria strings of the `*IF`/`*IFS` family, turned into an operator
//! and an operand.

use crate::formula::BinaryOp;
use crate::value::{compare, parse_numeral, ErrorKind, Value};
use std::cmp::Ordering;

/// A comparison against a fixed operand.
#[derive(Debug, Clone, PartialEq)]
pub struct Criteria {
    /// One of the six comparison operators.
    pub op: BinaryOp,
    pub operand: Value,
}

const OPERATORS: [(&str, BinaryOp); 6] = [
    (">=", BinaryOp::Ge),
    ("<=", BinaryOp::Le),
    ("<>", BinaryOp::Ne),
    (">", BinaryOp::Gt),
    ("<", BinaryOp::Lt),
    ("=", BinaryOp::Eq),
];

/// Maps an operator prefix such as `">="` to its comparison.
pub fn comparison_op(s: &str) -> Option<BinaryOp> {
    OPERATORS.iter().find(|(p, _)| *p == s).map(|(_, op)| *op)
}

impl Criteria {
    /// Parses a criteria string: optional operator prefix, then an operand.
    /// Numeral operands become numbers, anything else (including an empty
    /// operand) stays text.
    pub fn parse(s: &str) -> Criteria {
        let (op, rest) = OPERATORS
            .iter()
            .find_map(|(p, op)| s.strip_prefix(p).map(|rest| (*op, rest)))
            .unwrap_or((BinaryOp::Eq, s));
        let operand = match parse_numeral(rest) {
            Some(n) => Value::Number(n),
            None => Value::Text(rest.to_string()),
        };
        Criteria { op, operand }
    }

    /// Criteria from an evaluated argument. Text is parsed; any other value
    /// means equality with that value.
    pub fn from_value(v: &Value) -> Result<Criteria, ErrorKind> {
        match v {
            Value::Error(e) => Err(*e),
            Value::Text(s) => Ok(Criteria::parse(s)),
            other => Ok(Criteria {
                op: BinaryOp::Eq,
                operand: other.clone(),
            }),
        }
    }

    /// Tests one cell with the evaluator's comparison order. Error cells
    /// yield their error.
    pub fn matches(&self, cell: &Value) -> Result<bool, ErrorKind> {
        if let Value::Error(e) = cell {
            return Err(*e);
        }
        Ok(compare_op(self.op, compare(cell, &self.operand)))
    }
}

/// Applies a comparison operator to an ordering.
pub fn compare_op(op: BinaryOp, ord: Ordering) -> bool {
    match op {
        BinaryOp::Eq => ord == Ordering::Equal,
        BinaryOp::Ne => ord != Ordering::Equal,
        BinaryOp::Lt => ord == Ordering::Less,
        BinaryOp::Le => ord != Ordering::Greater,
        BinaryOp::Gt => ord == Ordering::Greater,
        BinaryOp::Ge => ord != Ordering::Less,
        _ => unreachable!("not a comparison operator"),
    }
}

/// Whether a criteria string uses wildcard characters.
pub fn has_wildcard(s: &str) -> bool {
    s.contains('*') || s.contains('?')
}
