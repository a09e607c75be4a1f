//! The eight rewrite rules. Each takes a problem-specific call whose
//! arguments are already rewritten and builds its replacement.

use super::{Diagnostic, DiagnosticCode, RewriteContext, RewriteError, RuleId};
use crate::eval::catalog;
use crate::eval::criteria::{comparison_op, has_wildcard, Criteria};
use crate::formula::{parse_expr, BinaryOp, Expr, ExprKind, RangeRef, Span, UnaryOp};
use crate::value::Value;

pub(super) struct Applied {
    pub expr: Expr,
    pub notes: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Applied {
    fn new(expr: Expr) -> Self {
        Applied {
            expr,
            notes: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
        self
    }
}

fn fail(span: Span, reason: impl Into<String>) -> RewriteError {
    let reason = reason.into();
    RewriteError {
        span,
        reason: reason.clone(),
        diagnostic: Diagnostic {
            code: DiagnosticCode::UnsupportedCriteria,
            span,
            message: reason,
            rewrite_available: false,
        },
    }
}

/// How a criteria argument was understood.
#[derive(Debug, Clone, PartialEq)]
pub enum CriteriaForm {
    /// Operator and operand fixed in the formula text.
    Literal(BinaryOp, Expr),
    /// Operand read from a reference at evaluation time.
    Reference(BinaryOp, Expr),
}

const REFERENCE_NOTE: &str = "criteria taken from a reference compare by value: \
operator text or numeric text in that cell is not parsed as criteria";

fn criteria_form(c: &Expr) -> Result<CriteriaForm, String> {
    match &c.kind {
        ExprKind::Text(s) => {
            if has_wildcard(s) {
                return Err(format!("wildcard criteria {s:?} are not supported"));
            }
            let parsed = Criteria::parse(s);
            let operand = match parsed.operand {
                Value::Number(n) => Expr::number(n),
                Value::Text(t) => Expr::text(t),
                other => unreachable!("criteria operand {other:?}"),
            };
            Ok(CriteriaForm::Literal(parsed.op, operand))
        }
        ExprKind::Number(_) | ExprKind::Bool(_) => Ok(CriteriaForm::Literal(BinaryOp::Eq, c.clone())),
        ExprKind::Unary(UnaryOp::Neg, x) if matches!(x.kind, ExprKind::Number(_)) => {
            Ok(CriteriaForm::Literal(BinaryOp::Eq, c.clone()))
        }
        ExprKind::Cell(_) => Ok(CriteriaForm::Reference(BinaryOp::Eq, c.clone())),
        ExprKind::Binary(BinaryOp::Concat, l, r) => match (&l.kind, &r.kind) {
            (ExprKind::Text(op), ExprKind::Cell(_)) => match comparison_op(op) {
                Some(op) => Ok(CriteriaForm::Reference(op, (**r).clone())),
                None => Err(format!("{op:?} is not a comparison operator")),
            },
            _ => Err(UNSUPPORTED_SHAPE.into()),
        },
        _ => Err(UNSUPPORTED_SHAPE.into()),
    }
}

const UNSUPPORTED_SHAPE: &str =
    "criteria must be a literal, a cell, or an operator string joined to a cell";

/// The elementwise predicate `range <op> operand` for a criteria argument,
/// plus a note when the operand is read from a cell.
pub fn criteria_predicate(range: &Expr, criteria: &Expr) -> Result<(Expr, Option<&'static str>), String> {
    Ok(match criteria_form(criteria)? {
        CriteriaForm::Literal(op, operand) => (Expr::binary(op, range.clone(), operand), None),
        CriteriaForm::Reference(op, operand) => {
            (Expr::binary(op, range.clone(), operand), Some(REFERENCE_NOTE))
        }
    })
}

fn predicate(range: &Expr, criteria: &Expr, notes: &mut Vec<&'static str>) -> Result<Expr, RewriteError> {
    let (p, note) = criteria_predicate(range, criteria).map_err(|r| fail(criteria.span, r))?;
    notes.extend(note);
    Ok(p)
}

fn static_shape(e: &Expr) -> Option<(u32, u32)> {
    match &e.kind {
        ExprKind::Cell(_) => Some((1, 1)),
        ExprKind::Range(r, _) => Some((r.rows(), r.cols())),
        _ => None,
    }
}

fn same_shapes(span: Span, ranges: &[&Expr]) -> Result<(), RewriteError> {
    let shapes: Vec<_> = ranges.iter().filter_map(|e| static_shape(e)).collect();
    if shapes.windows(2).any(|w| w[0] != w[1]) {
        return Err(fail(span, "ranges must have the same shape"));
    }
    Ok(())
}

fn call(name: &str, args: Vec<Expr>) -> Expr {
    Expr::call(name, args)
}

fn iff(cond: Expr, then: Expr, otherwise: Expr) -> Expr {
    call("IF", vec![cond, then, otherwise])
}

fn zero() -> Expr {
    Expr::number(0.0)
}

fn one() -> Expr {
    Expr::number(1.0)
}

fn finish(expr: Expr, notes: Vec<&'static str>) -> Applied {
    notes.into_iter().fold(Applied::new(expr), Applied::note)
}

pub(super) fn apply(rule: RuleId, e: &Expr, ctx: &RewriteContext) -> Result<Applied, RewriteError> {
    let (name, args) = e.as_call().expect("rules apply to calls");
    let name_span = super::name_span(e, name);
    let spec = catalog::lookup(name).expect("rule functions are in the catalog");
    if !spec.accepts(args.len()) {
        return Err(fail(name_span, format!("{name} called with {} arguments", args.len())));
    }
    let mut notes = Vec::new();
    match rule {
        RuleId::R1 => {
            let p = predicate(&args[0], &args[1], &mut notes)?;
            Ok(finish(call("SUM", vec![iff(p, one(), zero())]), notes))
        }
        RuleId::R2 | RuleId::R3 => {
            let sum = args.get(2).unwrap_or(&args[0]);
            same_shapes(name_span, &[&args[0], sum])?;
            let p = predicate(&args[0], &args[1], &mut notes)?;
            let expr = if rule == RuleId::R2 {
                call("SUM", vec![iff(p, sum.clone(), zero())])
            } else {
                call("AVERAGE", vec![call("IF", vec![p, sum.clone()])])
            };
            Ok(finish(expr, notes))
        }
        RuleId::R4 => {
            let counta = name == "COUNTA";
            let terms = args
                .iter()
                .map(|a| {
                    let empty = Expr::binary(
                        BinaryOp::Eq,
                        call("LEN", vec![Expr::binary(BinaryOp::Concat, a.clone(), Expr::text(""))]),
                        zero(),
                    );
                    let nonempty = iff(empty, zero(), one());
                    if counta {
                        nonempty
                    } else {
                        let numeric = call("ISERROR", vec![Expr::binary(BinaryOp::Add, a.clone(), zero())]);
                        iff(numeric, zero(), nonempty)
                    }
                })
                .collect();
            let note = if counta {
                "empty text counts under COUNTA but not under the rewrite"
            } else {
                "numeric text and logical values inside ranges count under the rewrite but not under COUNT"
            };
            Ok(Applied::new(call("SUM", terms)).note(note))
        }
        RuleId::R5 | RuleId::R6 => lookup(rule == RuleId::R5, args, ctx),
        RuleId::R7 => {
            let x = &args[0];
            let expr = iff(call("ISERROR", vec![x.clone()]), args[1].clone(), x.clone());
            let mut out = Applied::new(expr);
            if x.calls("RAND") {
                let msg = "the checked expression calls RAND and is evaluated twice by the rewrite";
                out.diagnostics.push(Diagnostic {
                    code: DiagnosticCode::VolatileInRewrite,
                    span: x.span,
                    message: msg.into(),
                    rewrite_available: true,
                });
                out = out.note(msg);
            }
            Ok(out)
        }
        RuleId::R8 => {
            let (inner, pairs) = if name == "SUMIFS" {
                (args[0].clone(), &args[1..])
            } else {
                (one(), args)
            };
            if pairs.len() % 2 != 0 {
                return Err(fail(name_span, "criteria ranges and criteria must come in pairs"));
            }
            let mut ranges: Vec<&Expr> = pairs.iter().step_by(2).collect();
            if name == "SUMIFS" {
                ranges.push(&args[0]);
            }
            same_shapes(name_span, &ranges)?;
            let mut body = inner;
            for pair in pairs.chunks(2).rev() {
                let p = predicate(&pair[0], &pair[1], &mut notes)?;
                body = iff(p, body, zero());
            }
            Ok(finish(call("SUM", vec![body]), notes))
        }
    }
}

/// Literal positive integer argument.
fn literal_index(e: &Expr) -> Option<u32> {
    match e.kind {
        ExprKind::Number(n) if n >= 1.0 && n < u32::MAX as f64 => Some(n.trunc() as u32),
        _ => None,
    }
}

/// MATCH type for the range_lookup argument: exact for FALSE or 0.
fn literal_match_type(e: Option<&Expr>) -> Option<f64> {
    match e.map(|e| &e.kind) {
        None => Some(1.0),
        Some(ExprKind::Bool(b)) => Some(if *b { 1.0 } else { 0.0 }),
        Some(ExprKind::Number(n)) => Some(if *n != 0.0 { 1.0 } else { 0.0 }),
        _ => None,
    }
}

fn has_range(e: &Expr) -> bool {
    e.any(&|x| matches!(x.kind, ExprKind::Range(..) | ExprKind::Name(_)))
}

/// Column `k` (1-based) of a range, or row `k` when `vertical` is false.
fn slice(r: &RangeRef, k: u32, vertical: bool) -> RangeRef {
    let mut start = r.start;
    let mut end = r.end;
    if vertical {
        start.col = r.start.col + k - 1;
        end.col = start.col;
    } else {
        start.row = r.start.row + k - 1;
        end.row = start.row;
    }
    RangeRef { start, end }
}

fn lookup(vertical: bool, args: &[Expr], ctx: &RewriteContext) -> Result<Applied, RewriteError> {
    let key = &args[0];
    if has_range(key) {
        return Err(fail(key.span, "the lookup value must be a single value, not a range"));
    }
    let k = literal_index(&args[2])
        .ok_or_else(|| fail(args[2].span, "the column or row index must be a positive number literal"))?;
    let match_type = literal_match_type(args.get(3))
        .ok_or_else(|| fail(args[3].span, "the range_lookup argument must be a literal"))?;
    let table = &args[1];
    let (first, target) = match &table.kind {
        ExprKind::Range(r, _) => {
            let span = if vertical { r.cols() } else { r.rows() };
            if k > span {
                return Err(fail(args[2].span, format!("index {k} is outside the {span}-wide table")));
            }
            (Expr::range(slice(r, 1, vertical)), Expr::range(slice(r, k, vertical)))
        }
        ExprKind::Cell(c) if k == 1 => {
            let r = RangeRef {
                start: *c,
                end: *c,
            };
            (Expr::range(r), Expr::range(r))
        }
        ExprKind::Name(n) if vertical => {
            let headers = ctx
                .headers(n)
                .ok_or_else(|| fail(table.span, format!("the layout of table {n} is unknown")))?;
            let header = |i: usize| -> Result<Expr, RewriteError> {
                let h = headers
                    .get(i)
                    .ok_or_else(|| fail(args[2].span, format!("table {n} has {} columns", headers.len())))?;
                match parse_expr(h) {
                    Ok(x) if matches!(&x.kind, ExprKind::Name(m) if m == h) => Ok(Expr::name(h.clone())),
                    _ => Err(fail(table.span, format!("column header {h:?} cannot be written as a name"))),
                }
            };
            (header(0)?, header(k as usize - 1)?)
        }
        _ => {
            return Err(fail(
                table.span,
                "the table must be a cell range or a named table with known columns",
            ))
        }
    };
    let pos = call("MATCH", vec![key.clone(), first, Expr::number(match_type)]);
    Ok(Applied::new(call("INDEX", vec![target, pos])))
}
