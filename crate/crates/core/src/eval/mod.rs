//! Formula evaluation against a table, in scalar (per-row) or array mode.
//!
//! In scalar mode every value-taking position sees one value: a column
//! reference is intersected with `current_row`, the way a formula copied
//! down a column sees its own row. In array mode operators and elementwise
//! functions map over whole ranges, scalars broadcast, and aggregating
//! functions collapse ranges to one value. Both modes give aggregating
//! functions the full range.

pub mod catalog;
pub mod criteria;
mod functions;
pub mod lookup;

use crate::formula::{BinaryOp, CellRef, Expr, ExprKind, Formula, UnaryOp};
use crate::table::{resolve, RangeView, Reference, Resolved, Table};
use crate::value::{compare, ErrorKind, Value};
use catalog::{FunctionSpec, Param};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

pub use lookup::{index_select, match_position, search_position, MatchType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Scalar,
    Array,
}

/// Everything an evaluation depends on. Evaluations are pure functions of
/// (expression, context); the random generator is seeded from `rng_seed`
/// afresh for every evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'t> {
    pub table: &'t Table,
    /// 1-based row for scalar-mode intersection.
    pub current_row: Option<u32>,
    pub rng_seed: u64,
    pub mode: Mode,
}

impl<'t> EvalContext<'t> {
    pub fn new(table: &'t Table) -> Self {
        EvalContext {
            table,
            current_row: None,
            rng_seed: 0,
            mode: Mode::Scalar,
        }
    }

    pub fn with_row(mut self, row: u32) -> Self {
        self.current_row = Some(row);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalResult {
    Value(Value),
    Range(RangeView),
}

impl EvalResult {
    pub fn as_value(&self) -> Option<&Value> {
        match self {
            EvalResult::Value(v) => Some(v),
            EvalResult::Range(_) => None,
        }
    }

    /// Cells in row-major order; a single value is a one-element slice.
    pub fn cells(&self) -> &[Value] {
        match self {
            EvalResult::Value(v) => std::slice::from_ref(v),
            EvalResult::Range(r) => &r.cells,
        }
    }
}

/// Evaluates a formula. Array-entered formulas always run in array mode;
/// others use the context's mode.
pub fn evaluate(formula: &Formula, ctx: &EvalContext) -> EvalResult {
    let mode = if formula.array { Mode::Array } else { ctx.mode };
    run(&formula.expr, ctx, mode)
}

pub fn evaluate_expr(expr: &Expr, ctx: &EvalContext) -> EvalResult {
    run(expr, ctx, ctx.mode)
}

fn run(expr: &Expr, ctx: &EvalContext, mode: Mode) -> EvalResult {
    let mut ev = Evaluator {
        table: ctx.table,
        current_row: ctx.current_row,
        mode,
        rng: ChaCha8Rng::seed_from_u64(ctx.rng_seed),
    };
    let out = ev.eval(expr);
    match mode {
        Mode::Scalar => EvalResult::Value(ev.intersect(out)),
        Mode::Array => match out {
            Operand::Scalar(v) => EvalResult::Value(v),
            Operand::Array(a) if a.is_single() => {
                EvalResult::Value(a.cells.into_iter().next().expect("one cell"))
            }
            Operand::Array(a) => EvalResult::Range(a),
        },
    }
}

/// References syntactically present in an expression, deduplicated in
/// order of first appearance. Cells and ranges compare by position
/// (ignoring `$`), names case-insensitively.
pub fn precedents(expr: &Expr) -> Vec<Reference> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    expr.walk(&mut |e| {
        let (key, r) = match &e.kind {
            ExprKind::Cell(c) => (Reference::Cell(c.relative()), Reference::Cell(*c)),
            ExprKind::Range(r, _) => {
                let key = crate::formula::RangeRef {
                    start: r.start.relative(),
                    end: r.end.relative(),
                };
                (Reference::Range(key), Reference::Range(*r))
            }
            ExprKind::Name(n) => (Reference::Name(n.to_lowercase()), Reference::Name(n.clone())),
            _ => return,
        };
        if seen.insert(key) {
            out.push(r);
        }
    });
    out
}

/// Intermediate result: a single value or a block of values.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Operand {
    Scalar(Value),
    Array(RangeView),
}

/// Argument handed to a function body after lifting.
pub(crate) enum Arg<'o> {
    Val(Value),
    Op(&'o Operand),
}

struct Evaluator<'t> {
    table: &'t Table,
    current_row: Option<u32>,
    mode: Mode,
    rng: ChaCha8Rng,
}

enum Shape {
    Scalar,
    Block(usize, usize),
    Mismatch(usize, usize),
}

fn broadcast_shape<'a>(ops: impl Iterator<Item = &'a Operand>) -> Shape {
    let mut any_array = false;
    let mut shapes: Vec<(usize, usize)> = Vec::new();
    for op in ops {
        if let Operand::Array(a) = op {
            any_array = true;
            if !a.is_single() {
                shapes.push((a.rows, a.cols));
            }
        }
    }
    let Some(&first) = shapes.first() else {
        return if any_array { Shape::Block(1, 1) } else { Shape::Scalar };
    };
    let same = shapes.iter().all(|s| *s == first);
    let vectors_same_len = shapes
        .iter()
        .all(|&(r, c)| (r == 1 || c == 1) && r * c == first.0 * first.1);
    if same || vectors_same_len {
        Shape::Block(first.0, first.1)
    } else {
        let rows = shapes.iter().map(|s| s.0).max().unwrap_or(1);
        let cols = shapes.iter().map(|s| s.1).max().unwrap_or(1);
        Shape::Mismatch(rows, cols)
    }
}

fn cell_at(op: &Operand, k: usize) -> Value {
    match op {
        Operand::Scalar(v) => v.clone(),
        Operand::Array(a) if a.is_single() => a.cells[0].clone(),
        Operand::Array(a) => a.cells[k].clone(),
    }
}

impl<'t> Evaluator<'t> {
    fn eval(&mut self, e: &Expr) -> Operand {
        match &e.kind {
            ExprKind::Number(n) => Operand::Scalar(Value::number(*n)),
            ExprKind::Text(s) => Operand::Scalar(Value::Text(s.clone())),
            ExprKind::Bool(b) => Operand::Scalar(Value::Logical(*b)),
            ExprKind::Cell(c) => self.reference(Reference::Cell(*c)),
            ExprKind::Range(r, _) => self.reference(Reference::Range(*r)),
            ExprKind::Name(n) => self.reference(Reference::Name(n.clone())),
            ExprKind::Unary(op, x) => {
                let x = self.eval(x);
                let op = *op;
                self.lift(vec![x], move |_, v| unary(op, &v[0]))
            }
            ExprKind::Binary(op, l, r) => {
                let l = self.eval(l);
                let r = self.eval(r);
                let op = *op;
                self.lift(vec![l, r], move |_, v| binary(op, &v[0], &v[1]))
            }
            ExprKind::Call(name, args) => self.call(name, args),
        }
    }

    fn reference(&self, r: Reference) -> Operand {
        match (resolve(self.table, &r), r) {
            (Resolved::Range(view), _) => Operand::Array(view),
            (Resolved::Value(v @ Value::Error(_)), _) => Operand::Scalar(v),
            (Resolved::Value(v), Reference::Cell(c)) => Operand::Array(RangeView {
                rows: 1,
                cols: 1,
                cells: vec![v],
                origin: Some(CellRef::new(c.col, c.row)),
            }),
            (Resolved::Value(v), _) => Operand::Scalar(v),
        }
    }

    /// Scalar-mode view of an operand: single cells pass through, a column
    /// is read at `current_row` (by absolute row when the block has an
    /// origin), anything else is `#VALUE!`.
    fn intersect(&self, op: Operand) -> Value {
        match op {
            Operand::Scalar(v) => v,
            Operand::Array(a) if a.is_single() => a.cells.into_iter().next().expect("one cell"),
            Operand::Array(a) if a.cols == 1 && a.rows > 1 => {
                let Some(row) = self.current_row else {
                    return Value::Error(ErrorKind::Value);
                };
                let top = a.origin.map_or(1, |o| o.row) as i64;
                let idx = row as i64 - top;
                if idx >= 0 && (idx as usize) < a.rows {
                    a.cells[idx as usize].clone()
                } else {
                    Value::Error(ErrorKind::Value)
                }
            }
            Operand::Array(_) => Value::Error(ErrorKind::Value),
        }
    }

    /// Applies `f` to single values: once in scalar mode (after
    /// intersection), cell by cell over the broadcast shape in array mode.
    fn lift(
        &mut self,
        args: Vec<Operand>,
        mut f: impl FnMut(&mut Self, &[Value]) -> Value,
    ) -> Operand {
        if self.mode == Mode::Scalar {
            let vals: Vec<Value> = args.into_iter().map(|a| self.intersect(a)).collect();
            return Operand::Scalar(f(self, &vals));
        }
        match broadcast_shape(args.iter()) {
            Shape::Scalar => {
                let vals: Vec<Value> = args.iter().map(|a| cell_at(a, 0)).collect();
                Operand::Scalar(f(self, &vals))
            }
            Shape::Mismatch(r, c) => {
                Operand::Array(RangeView::filled(r, c, Value::Error(ErrorKind::Value)))
            }
            Shape::Block(r, c) => {
                let mut cells = Vec::with_capacity(r * c);
                for k in 0..r * c {
                    let vals: Vec<Value> = args.iter().map(|a| cell_at(a, k)).collect();
                    cells.push(f(self, &vals));
                }
                Operand::Array(RangeView::new(r, c, cells))
            }
        }
    }

    fn call(&mut self, name: &str, args: &[Expr]) -> Operand {
        let Some(spec) = catalog::lookup(name) else {
            return Operand::Scalar(Value::Error(ErrorKind::Name));
        };
        if !spec.accepts(args.len()) {
            return Operand::Scalar(Value::Error(ErrorKind::Value));
        }
        match spec.name {
            "IF" => return self.call_if(args),
            "RAND" => return Operand::Scalar(Value::Number(self.rng.gen::<f64>())),
            "OFFSET" => return self.call_offset(args),
            "ROW" | "COLUMN" => return self.call_row_column(spec.name == "ROW", args),
            _ => {}
        }
        let operands: Vec<Operand> = args.iter().map(|a| self.eval(a)).collect();
        self.apply_lifted(spec, operands)
    }

    /// Splits arguments into lifted values and whole-range parameters, then
    /// runs the function body once per broadcast cell.
    fn apply_lifted(&mut self, spec: &'static FunctionSpec, operands: Vec<Operand>) -> Operand {
        let params: Vec<Param> = (0..operands.len()).map(|i| spec.param(i)).collect();
        let mut lifted = Vec::new();
        let mut ranges = Vec::new();
        for (op, p) in operands.into_iter().zip(&params) {
            match p {
                Param::Value => lifted.push(op),
                Param::Range => ranges.push(op),
            }
        }
        let ranges = ranges;
        self.lift(lifted, |_, vals| {
            let mut vi = vals.iter();
            let mut ri = ranges.iter();
            let args: Vec<Arg> = params
                .iter()
                .map(|p| match p {
                    Param::Value => Arg::Val(vi.next().expect("value arg").clone()),
                    Param::Range => Arg::Op(ri.next().expect("range arg")),
                })
                .collect();
            if spec.propagates_errors() {
                for a in &args {
                    match a {
                        Arg::Val(Value::Error(e)) | Arg::Op(Operand::Scalar(Value::Error(e))) => {
                            return Value::Error(*e)
                        }
                        _ => {}
                    }
                }
            }
            functions::apply(spec.name, &args)
        })
    }

    fn call_if(&mut self, args: &[Expr]) -> Operand {
        let cond = self.eval(&args[0]);
        let is_vector = matches!(&cond, Operand::Array(a) if !a.is_single());
        if self.mode == Mode::Scalar || !is_vector {
            let c = self.intersect(cond);
            return match c.to_bool() {
                Err(e) => Operand::Scalar(Value::Error(e)),
                Ok(true) => self.eval(&args[1]),
                Ok(false) => match args.get(2) {
                    Some(e) => self.eval(e),
                    None => Operand::Scalar(Value::Logical(false)),
                },
            };
        }
        let then = self.eval(&args[1]);
        let otherwise = match args.get(2) {
            Some(e) => self.eval(e),
            None => Operand::Scalar(Value::Logical(false)),
        };
        self.lift(vec![cond, then, otherwise], |_, v| match v[0].to_bool() {
            Err(e) => Value::Error(e),
            Ok(true) => v[1].clone(),
            Ok(false) => v[2].clone(),
        })
    }

    /// A single value for a non-lifted parameter; arrays of more than one
    /// cell are `#VALUE!` in array mode.
    fn single(&self, op: Operand) -> Value {
        match (self.mode, op) {
            (Mode::Array, Operand::Array(a)) if !a.is_single() => Value::Error(ErrorKind::Value),
            (_, op) => self.intersect(op),
        }
    }

    fn call_offset(&mut self, args: &[Expr]) -> Operand {
        let base = self.eval(&args[0]);
        let mut nums = Vec::new();
        for a in &args[1..] {
            let op = self.eval(a);
            match self.single(op).to_number() {
                Ok(n) => nums.push(n.trunc() as i64),
                Err(e) => return Operand::Scalar(Value::Error(e)),
            }
        }
        let view = match base {
            Operand::Scalar(Value::Error(e)) => return Operand::Scalar(Value::Error(e)),
            Operand::Array(v) => v,
            Operand::Scalar(_) => return Operand::Scalar(Value::Error(ErrorKind::Value)),
        };
        let Some(origin) = view.origin else {
            return Operand::Scalar(Value::Error(ErrorKind::Value));
        };
        let row = origin.row as i64 + nums[0];
        let col = origin.col as i64 + nums[1];
        let height = nums.get(2).copied().unwrap_or(view.rows as i64);
        let width = nums.get(3).copied().unwrap_or(view.cols as i64);
        let ok = |x: i64| x >= 1 && x <= u32::MAX as i64;
        if !(ok(row) && ok(col) && ok(height) && ok(width)) {
            return Operand::Scalar(Value::Error(ErrorKind::Ref));
        }
        match self
            .table
            .block(row as u32, col as u32, height as u32, width as u32)
        {
            Some(v) => Operand::Array(v),
            None => Operand::Scalar(Value::Error(ErrorKind::Ref)),
        }
    }

    fn call_row_column(&mut self, row: bool, args: &[Expr]) -> Operand {
        let Some(arg) = args.first() else {
            return Operand::Scalar(match (row, self.current_row) {
                (true, Some(r)) => Value::Number(r as f64),
                _ => Value::Error(ErrorKind::Value),
            });
        };
        let view = match self.eval(arg) {
            Operand::Scalar(Value::Error(e)) => return Operand::Scalar(Value::Error(e)),
            Operand::Scalar(_) => return Operand::Scalar(Value::Error(ErrorKind::Value)),
            Operand::Array(v) => v,
        };
        let Some(origin) = view.origin else {
            return Operand::Scalar(Value::Error(ErrorKind::Value));
        };
        let (first, count) = if row {
            (origin.row, view.rows)
        } else {
            (origin.col, view.cols)
        };
        if self.mode == Mode::Scalar || count <= 1 {
            return Operand::Scalar(Value::Number(first as f64));
        }
        let cells: Vec<Value> = (0..count)
            .map(|i| Value::Number(first as f64 + i as f64))
            .collect();
        Operand::Array(if row {
            RangeView::column(cells)
        } else {
            RangeView::row(cells)
        })
    }
}

fn unary(op: UnaryOp, v: &Value) -> Value {
    match op {
        UnaryOp::Plus => v.clone(),
        UnaryOp::Neg => match v.to_number() {
            Ok(n) => Value::number(-n),
            Err(e) => Value::Error(e),
        },
        UnaryOp::Percent => match v.to_number() {
            Ok(n) => Value::number(n / 100.0),
            Err(e) => Value::Error(e),
        },
    }
}

/// One operator application on single values. Errors propagate, left
/// operand first.
pub fn binary(op: BinaryOp, a: &Value, b: &Value) -> Value {
    if let Value::Error(e) = a {
        return Value::Error(*e);
    }
    if let Value::Error(e) = b {
        return Value::Error(*e);
    }
    if op.is_comparison() {
        return Value::Logical(criteria::compare_op(op, compare(a, b)));
    }
    if op == BinaryOp::Concat {
        return match (a.to_text(), b.to_text()) {
            (Ok(x), Ok(y)) => Value::Text(x + &y),
            (Err(e), _) | (_, Err(e)) => Value::Error(e),
        };
    }
    let (x, y) = match (a.to_number(), b.to_number()) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Value::Error(e),
    };
    match op {
        BinaryOp::Add => Value::number(x + y),
        BinaryOp::Sub => Value::number(x - y),
        BinaryOp::Mul => Value::number(x * y),
        BinaryOp::Div if y == 0.0 => Value::Error(ErrorKind::Div0),
        BinaryOp::Div => Value::number(x / y),
        BinaryOp::Pow if x == 0.0 && y == 0.0 => Value::Error(ErrorKind::Num),
        BinaryOp::Pow if x == 0.0 && y < 0.0 => Value::Error(ErrorKind::Div0),
        BinaryOp::Pow => Value::number(x.powf(y)),
        _ => unreachable!("handled above"),
    }
}
