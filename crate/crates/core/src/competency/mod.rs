//! Competency classification: which framework items a formula shows, and
//! whether those make it a basic-user or general-user formula.

mod items;

pub use items::*;

use crate::eval::catalog::{self, Param};
use crate::formula::{format, Expr, ExprKind, Formula, Span, UnaryOp};
use crate::table::Table;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Level {
    BU,
    GU,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::BU => "BU",
            Level::GU => "GU",
        })
    }
}

const NON_ARRAY: [&str; 13] = [
    "LEN", "LEFT", "RIGHT", "SEARCH", "SUBSTITUTE", "INT", "ROUND", "SUM", "AVERAGE", "MIN", "MAX",
    "SMALL", "LARGE",
];

const CONDITION: [&str; 8] = ["IF", "MATCH", "INDEX", "ISERROR", "AND", "OR", "NOT", "OFFSET"];

const ERROR_HANDLING: [&str; 2] = ["ISERROR", "IFERROR"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triggered {
    pub id: &'static str,
    pub spans: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompetencyProfile {
    /// In competency-table order.
    pub triggered: Vec<Triggered>,
    pub level: Level,
    pub nesting_depth: usize,
}

impl CompetencyProfile {
    pub fn item_ids(&self) -> Vec<&'static str> {
        self.triggered.iter().map(|t| t.id).collect()
    }

    pub fn has(&self, id: &str) -> bool {
        self.triggered.iter().any(|t| t.id == id)
    }
}

pub fn classify(formula: &Formula) -> CompetencyProfile {
    let mut hits: BTreeMap<&'static str, Vec<Span>> = BTreeMap::new();
    let mut hit = |id: &'static str, span: Span| hits.entry(id).or_default().push(span);
    let expr = &formula.expr;
    expr.walk(&mut |e| match &e.kind {
        ExprKind::Binary(op, _, _) if op.is_arithmetic() => hit(BASIC_ARITHMETIC, e.span),
        ExprKind::Unary(UnaryOp::Percent, _) => hit(BASIC_ARITHMETIC, e.span),
        ExprKind::Unary(UnaryOp::Neg, inner) if !matches!(inner.kind, ExprKind::Number(_)) => {
            hit(BASIC_ARITHMETIC, e.span)
        }
        ExprKind::Call(name, _) => {
            let span = Span::new(e.span.start, e.span.start + name.chars().count());
            hit(CONCEPT_OF_FUNCTIONS, span);
            if NON_ARRAY.contains(&name.as_str()) {
                hit(NON_ARRAY_FUNCTIONS, span);
            }
            if CONDITION.contains(&name.as_str()) {
                hit(CONDITION_FUNCTIONS, span);
            }
            if ERROR_HANDLING.contains(&name.as_str()) {
                hit(ERROR_RESISTANT, span);
            }
        }
        _ => {}
    });
    if formula.array {
        let id = if multi_cell(expr) { VECTOR_OUTPUT } else { ONE_VALUE_OUTPUT };
        hit(id, expr.span);
    }
    let depth = expr.call_depth();
    if depth >= 2 {
        let id = if depth >= 4 { COMPOSITE_MULTI } else { COMPOSITE_2_3 };
        let mut roots = Vec::new();
        outermost_calls(expr, &mut roots);
        for root in roots.into_iter().filter(|r| r.call_depth() == depth) {
            hit(id, root.span);
        }
    }
    let triggered: Vec<Triggered> = ITEMS
        .iter()
        .filter_map(|item| {
            hits.remove(item.id).map(|mut spans| {
                spans.sort();
                spans.dedup();
                Triggered { id: item.id, spans }
            })
        })
        .collect();
    let level = if triggered.iter().any(|t| item_by_id(t.id).is_some_and(|i| i.gu_only())) {
        Level::GU
    } else {
        Level::BU
    };
    CompetencyProfile {
        triggered,
        level,
        nesting_depth: depth,
    }
}

fn outermost_calls<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match &e.kind {
        ExprKind::Call(..) => out.push(e),
        ExprKind::Unary(_, x) => outermost_calls(x, out),
        ExprKind::Binary(_, l, r) => {
            outermost_calls(l, out);
            outermost_calls(r, out);
        }
        _ => {}
    }
}

/// Whether `e`, evaluated in array mode, yields more than one cell. Named
/// columns count as multi-cell.
pub fn multi_cell(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Number(_) | ExprKind::Text(_) | ExprKind::Bool(_) | ExprKind::Cell(_) => false,
        ExprKind::Range(r, _) => r.rows() * r.cols() > 1,
        ExprKind::Name(_) => true,
        ExprKind::Unary(_, x) => multi_cell(x),
        ExprKind::Binary(_, l, r) => multi_cell(l) || multi_cell(r),
        ExprKind::Call(name, args) => {
            let lifted = || match catalog::lookup(name) {
                Some(spec) => args
                    .iter()
                    .enumerate()
                    .any(|(i, a)| spec.param(i) == Param::Value && multi_cell(a)),
                None => args.iter().any(multi_cell),
            };
            match name.as_str() {
                "ROW" | "COLUMN" => args.first().is_some_and(multi_cell),
                "OFFSET" => {
                    let dim = |i: usize| match args.get(i).map(|a| &a.kind) {
                        None => None,
                        Some(ExprKind::Number(n)) => Some(*n <= 1.0),
                        Some(_) => Some(false),
                    };
                    let single = match (dim(3), dim(4)) {
                        (Some(h), Some(w)) => h && w,
                        _ => !args.first().is_some_and(multi_cell),
                    };
                    !single || lifted()
                }
                _ => lifted(),
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormulaEntry {
    pub source: String,
    pub level: Level,
    pub nesting_depth: usize,
    pub items: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkbookSummary {
    /// `None` when there are no formulas.
    pub level: Option<Level>,
    pub histogram: BTreeMap<&'static str, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSummary {
    pub name: String,
    pub rows: usize,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NotAssessed {
    pub id: &'static str,
    pub name: &'static str,
    pub note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tables: Vec<TableSummary>,
    pub formulas: Vec<FormulaEntry>,
    pub workbook: WorkbookSummary,
    pub not_assessed: Vec<NotAssessed>,
}

pub fn report(tables: &[&Table], formulas: &[Formula]) -> Report {
    let entries: Vec<FormulaEntry> = formulas
        .iter()
        .map(|f| {
            let p = classify(f);
            FormulaEntry {
                source: format(f),
                level: p.level,
                nesting_depth: p.nesting_depth,
                items: p.item_ids(),
            }
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for id in entries.iter().flat_map(|e| &e.items) {
        *histogram.entry(*id).or_insert(0) += 1;
    }
    Report {
        schema_version: 1,
        tables: tables
            .iter()
            .map(|t| TableSummary {
                name: t.name().to_string(),
                rows: t.row_count(),
                columns: t.headers().map(String::from).collect(),
            })
            .collect(),
        workbook: WorkbookSummary {
            level: entries.iter().map(|e| e.level).max(),
            histogram,
        },
        formulas: entries,
        not_assessed: ITEMS
            .iter()
            .filter(|i| !i.evaluable)
            .map(|i| NotAssessed {
                id: i.id,
                name: i.name,
                note: "not assessed by this tool",
            })
            .collect(),
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tables {
            writeln!(f, "table {} ({} rows): {}", t.name, t.rows, t.columns.join(", "))?;
        }
        for e in &self.formulas {
            writeln!(f, "{}  {}  depth {}", e.level, e.source, e.nesting_depth)?;
            for id in &e.items {
                let name = item_by_id(id).map_or(*id, |i| i.name);
                writeln!(f, "    {name}")?;
            }
        }
        match self.workbook.level {
            Some(level) => writeln!(f, "workbook level: {level}")?,
            None => writeln!(f, "workbook level: none (no formulas)")?,
        }
        for (id, n) in &self.workbook.histogram {
            writeln!(f, "    {n:>4}  {id}")?;
        }
        writeln!(f, "not assessed by this tool:")?;
        for i in &self.not_assessed {
            writeln!(f, "    {}", i.name)?;
        }
        Ok(())
    }
}
