//! Lint for constructs outside the general-purpose function set, and
//! rewrites of the problem-specific functions into SUM/IF, INDEX/MATCH
//! and IF/ISERROR composites.

mod rules;

use crate::eval::catalog;
use crate::formula::{format_expr, CellRef, Expr, ExprKind, Formula, Span};
use serde::{Serialize, Serializer};
use std::fmt;
use thiserror::Error;

pub use rules::{criteria_predicate, CriteriaForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    NonSpregoFunction,
    AbsoluteReference,
    MixedReference,
    UnsupportedCriteria,
    VolatileInRewrite,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::NonSpregoFunction => "NON_SPREGO_FUNCTION",
            DiagnosticCode::AbsoluteReference => "ABSOLUTE_REFERENCE",
            DiagnosticCode::MixedReference => "MIXED_REFERENCE",
            DiagnosticCode::UnsupportedCriteria => "UNSUPPORTED_CRITERIA",
            DiagnosticCode::VolatileInRewrite => "VOLATILE_IN_REWRITE",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    /// Character offsets into the formula source.
    pub span: Span,
    pub message: String,
    pub rewrite_available: bool,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}..{} {}: {}",
            self.span.start, self.span.end, self.code, self.message
        )?;
        if self.rewrite_available {
            f.write_str(" (rewrite available)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl RuleId {
    pub const ALL: [RuleId; 8] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
    ];

    /// The rule covering a problem-specific function.
    pub fn for_function(name: &str) -> Option<RuleId> {
        Some(match name {
            "COUNTIF" => RuleId::R1,
            "SUMIF" => RuleId::R2,
            "AVERAGEIF" => RuleId::R3,
            "COUNT" | "COUNTA" => RuleId::R4,
            "VLOOKUP" => RuleId::R5,
            "HLOOKUP" => RuleId::R6,
            "IFERROR" => RuleId::R7,
            "COUNTIFS" | "SUMIFS" => RuleId::R8,
            _ => return None,
        })
    }

    /// Whether the replacement has to be array-entered.
    pub fn needs_array(self) -> bool {
        self != RuleId::R7
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn expr_json<S: Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_expr(e))
}

/// One applied rule: the call it replaced and what replaced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewritePlan {
    pub rule_id: RuleId,
    #[serde(serialize_with = "expr_json")]
    pub original: Expr,
    #[serde(serialize_with = "expr_json")]
    pub replacement: Expr,
    /// Known cases where the replacement and the original disagree.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot rewrite at {}..{}: {reason}", span.start, span.end)]
pub struct RewriteError {
    pub span: Span,
    pub reason: String,
    pub diagnostic: Diagnostic,
}

/// Layout of tables that name references may denote, so that a lookup over
/// a whole named table can be split into its columns.
#[derive(Debug, Clone, Default)]
pub struct RewriteContext {
    pub tables: Vec<(String, Vec<String>)>,
}

impl RewriteContext {
    pub fn with_table(mut self, name: &str, headers: impl IntoIterator<Item = String>) -> Self {
        self.tables.push((name.to_string(), headers.into_iter().collect()));
        self
    }

    pub(crate) fn headers(&self, name: &str) -> Option<&[String]> {
        self.tables
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, h)| h.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rewritten {
    pub formula: Formula,
    pub plans: Vec<RewritePlan>,
    /// Warnings about the rewrite itself, such as volatile arguments that
    /// the replacement evaluates twice.
    pub diagnostics: Vec<Diagnostic>,
}

/// Rewrites every problem-specific call, innermost first. Untouched
/// subtrees are kept as they are. If any call cannot be rewritten the whole
/// formula is left alone and the error says why.
pub fn rewrite(formula: &Formula) -> Result<Rewritten, RewriteError> {
    rewrite_with(formula, &RewriteContext::default())
}

pub fn rewrite_with(formula: &Formula, ctx: &RewriteContext) -> Result<Rewritten, RewriteError> {
    let mut plans = Vec::new();
    let mut diagnostics = Vec::new();
    let expr = rewrite_expr(&formula.expr, ctx, &mut plans, &mut diagnostics)?;
    let array = formula.array || plans.iter().any(|p| p.rule_id.needs_array());
    Ok(Rewritten {
        formula: Formula::new(expr, array),
        plans,
        diagnostics,
    })
}

fn rewrite_expr(
    e: &Expr,
    ctx: &RewriteContext,
    plans: &mut Vec<RewritePlan>,
    diags: &mut Vec<Diagnostic>,
) -> Result<Expr, RewriteError> {
    let kind = match &e.kind {
        ExprKind::Unary(op, x) => {
            ExprKind::Unary(*op, Box::new(rewrite_expr(x, ctx, plans, diags)?))
        }
        ExprKind::Binary(op, l, r) => ExprKind::Binary(
            *op,
            Box::new(rewrite_expr(l, ctx, plans, diags)?),
            Box::new(rewrite_expr(r, ctx, plans, diags)?),
        ),
        ExprKind::Call(name, args) => {
            let args = args
                .iter()
                .map(|a| rewrite_expr(a, ctx, plans, diags))
                .collect::<Result<Vec<_>, _>>()?;
            let call = Expr::new(ExprKind::Call(name.clone(), args), e.span);
            if let Some(rule) = RuleId::for_function(name) {
                let out = rules::apply(rule, &call, ctx)?;
                diags.extend(out.diagnostics);
                plans.push(RewritePlan {
                    rule_id: rule,
                    original: call,
                    replacement: out.expr.clone(),
                    notes: out.notes,
                });
                return Ok(out.expr);
            }
            return Ok(call);
        }
        other => other.clone(),
    };
    Ok(Expr::new(kind, e.span))
}

/// Span of a call's function name.
fn name_span(e: &Expr, name: &str) -> Span {
    Span::new(e.span.start, e.span.start + name.chars().count())
}

/// Diagnostics for a parsed formula, ordered by span.
pub fn lint(formula: &Formula) -> Vec<Diagnostic> {
    lint_with(formula, &RewriteContext::default())
}

pub fn lint_with(formula: &Formula, ctx: &RewriteContext) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    formula.expr.walk(&mut |e| match &e.kind {
        ExprKind::Call(name, _) if catalog::is_baseline(name) => {
            let applied = RuleId::for_function(name).map(|r| rules::apply(r, e, ctx));
            let ok = matches!(applied, Some(Ok(_)));
            out.push(Diagnostic {
                code: DiagnosticCode::NonSpregoFunction,
                span: name_span(e, name),
                message: match RuleId::for_function(name) {
                    Some(rule) => format!("{name} is problem-specific; rule {rule} replaces it"),
                    None => format!("{name} is problem-specific"),
                },
                rewrite_available: ok,
            });
            match applied {
                Some(Err(err)) => out.push(err.diagnostic),
                Some(Ok(r)) => out.extend(r.diagnostics),
                None => {}
            }
        }
        ExprKind::Call(name, _) if catalog::lookup(name).is_none() => {
            out.push(Diagnostic {
                code: DiagnosticCode::NonSpregoFunction,
                span: name_span(e, name),
                message: format!("{name} is not a known function"),
                rewrite_available: false,
            });
        }
        ExprKind::Cell(c) => reference_diagnostic(c, e.span, &mut out),
        ExprKind::Range(r, corners) => {
            reference_diagnostic(&r.start, corners.0, &mut out);
            reference_diagnostic(&r.end, corners.1, &mut out);
        }
        _ => {}
    });
    out.sort_by_key(|d| (d.span, d.code));
    out.dedup();
    out
}

fn reference_diagnostic(c: &CellRef, span: Span, out: &mut Vec<Diagnostic>) {
    let code = if c.is_absolute() {
        DiagnosticCode::AbsoluteReference
    } else if c.is_mixed() {
        DiagnosticCode::MixedReference
    } else {
        return;
    };
    out.push(Diagnostic {
        code,
        span,
        message: format!("{c} can be written as the relative reference {}", c.relative()),
        rewrite_available: false,
    });
}

/// Whether every function call in the expression is core or extended.
pub fn is_closed(expr: &Expr) -> bool {
    !expr.any(&|e| matches!(e.as_call(), Some((n, _)) if !catalog::is_general_purpose(n)))
}
