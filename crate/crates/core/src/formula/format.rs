use super::ast::{Expr, ExprKind, Formula, UnaryOp};
use std::fmt::Write;

/// Canonical text of a formula: uppercase function names, no redundant
/// whitespace or parentheses, `{=...}` iff array-entered.
pub fn format(formula: &Formula) -> String {
    let body = format_expr(&formula.expr);
    if formula.array {
        format!("{{={body}}}")
    } else {
        format!("={body}")
    }
}

/// Canonical text of an expression without the leading `=`.
pub fn format_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

/// Display form of a number, shortest text that reparses to the same value.
pub fn format_number(n: f64) -> String {
    if n == 0.0 {
        return "0".into();
    }
    let a = n.abs();
    if !(1e-6..1e16).contains(&a) {
        format!("{n:e}")
    } else {
        format!("{n}")
    }
}

pub fn quote_text(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn write_expr(out: &mut String, expr: &Expr) {
    match &expr.kind {
        ExprKind::Number(n) if *n < 0.0 => {
            let _ = write!(out, "(-{})", format_number(-n));
        }
        ExprKind::Number(n) => out.push_str(&format_number(*n)),
        ExprKind::Text(s) => out.push_str(&quote_text(s)),
        ExprKind::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        ExprKind::Cell(c) => {
            let _ = write!(out, "{c}");
        }
        ExprKind::Range(r, _) => {
            let _ = write!(out, "{r}");
        }
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::Unary(UnaryOp::Percent, operand) => {
            write_wrapped(out, operand, matches!(operand.kind, ExprKind::Binary(..)));
            out.push('%');
        }
        ExprKind::Unary(op, operand) => {
            out.push(if *op == UnaryOp::Neg { '-' } else { '+' });
            let wrap = matches!(
                operand.kind,
                ExprKind::Binary(..) | ExprKind::Unary(UnaryOp::Percent, _)
            );
            write_wrapped(out, operand, wrap);
        }
        ExprKind::Binary(op, left, right) => {
            let prec = op.precedence();
            let wrap_left = matches!(&left.kind, ExprKind::Binary(l, ..) if l.precedence() < prec);
            let wrap_right =
                matches!(&right.kind, ExprKind::Binary(r, ..) if r.precedence() <= prec);
            write_wrapped(out, left, wrap_left);
            out.push_str(op.symbol());
            write_wrapped(out, right, wrap_right);
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_expr(out, a);
            }
            out.push(')');
        }
    }
}

fn write_wrapped(out: &mut String, expr: &Expr, wrap: bool) {
    if wrap {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}
