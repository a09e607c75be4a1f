use serde::Serialize;
use std::fmt;

/// Half-open range of character offsets into the formula source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn cover(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

/// A single-cell reference in A1 notation. `col` and `row` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellRef {
    pub col: u32,
    pub row: u32,
    pub col_abs: bool,
    pub row_abs: bool,
}

impl CellRef {
    pub fn new(col: u32, row: u32) -> Self {
        CellRef {
            col,
            row,
            col_abs: false,
            row_abs: false,
        }
    }

    pub fn is_absolute(&self) -> bool {
        self.col_abs && self.row_abs
    }

    pub fn is_mixed(&self) -> bool {
        self.col_abs != self.row_abs
    }

    /// Same cell, ignoring `$` markers.
    pub fn same_cell(&self, other: &CellRef) -> bool {
        self.col == other.col && self.row == other.row
    }

    pub fn relative(&self) -> CellRef {
        CellRef::new(self.col, self.row)
    }
}

/// Column letters for a 1-based column index (`1 -> A`, `27 -> AA`).
pub fn column_letters(mut col: u32) -> String {
    let mut out = Vec::new();
    while col > 0 {
        let rem = (col - 1) % 26;
        out.push(b'A' + rem as u8);
        col = (col - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// 1-based column index for column letters, `None` on overflow or bad input.
pub fn column_index(letters: &str) -> Option<u32> {
    if letters.is_empty() {
        return None;
    }
    let mut acc: u32 = 0;
    for c in letters.chars() {
        let c = c.to_ascii_uppercase();
        if !c.is_ascii_uppercase() {
            return None;
        }
        acc = acc.checked_mul(26)?.checked_add(c as u32 - 'A' as u32 + 1)?;
    }
    Some(acc)
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.col_abs {
            f.write_str("$")?;
        }
        f.write_str(&column_letters(self.col))?;
        if self.row_abs {
            f.write_str("$")?;
        }
        write!(f, "{}", self.row)
    }
}

/// A rectangular block of cells; `start` is always the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RangeRef {
    pub start: CellRef,
    pub end: CellRef,
}

impl RangeRef {
    /// Builds a range with its corners normalized so that `start <= end`
    /// both row- and column-wise. `$` flags travel with their coordinate.
    pub fn normalized(a: CellRef, b: CellRef) -> Self {
        let (c0, c0abs, c1, c1abs) = if a.col <= b.col {
            (a.col, a.col_abs, b.col, b.col_abs)
        } else {
            (b.col, b.col_abs, a.col, a.col_abs)
        };
        let (r0, r0abs, r1, r1abs) = if a.row <= b.row {
            (a.row, a.row_abs, b.row, b.row_abs)
        } else {
            (b.row, b.row_abs, a.row, a.row_abs)
        };
        RangeRef {
            start: CellRef {
                col: c0,
                row: r0,
                col_abs: c0abs,
                row_abs: r0abs,
            },
            end: CellRef {
                col: c1,
                row: r1,
                col_abs: c1abs,
                row_abs: r1abs,
            },
        }
    }

    pub fn rows(&self) -> u32 {
        self.end.row - self.start.row + 1
    }

    pub fn cols(&self) -> u32 {
        self.end.col - self.start.col + 1
    }

    /// Whether this range covers every cell of `other`.
    pub fn contains(&self, other: &RangeRef) -> bool {
        self.start.col <= other.start.col
            && self.start.row <= other.start.row
            && self.end.col >= other.end.col
            && self.end.row >= other.end.row
    }

    pub fn contains_cell(&self, cell: &CellRef) -> bool {
        self.contains(&RangeRef {
            start: *cell,
            end: *cell,
        })
    }
}

impl fmt::Display for RangeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
    /// Postfix `%`, divides by 100.
    Percent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
            BinaryOp::Concat => "&",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinaryOp> {
        Some(match s {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "^" => BinaryOp::Pow,
            "&" => BinaryOp::Concat,
            "=" => BinaryOp::Eq,
            "<>" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            _ => return None,
        })
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 1,
            BinaryOp::Concat => 2,
            BinaryOp::Add | BinaryOp::Sub => 3,
            BinaryOp::Mul | BinaryOp::Div => 4,
            BinaryOp::Pow => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 1
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Pow
        )
    }
}

/// Source positions of the two corners of a range as written.
///
/// Positional metadata only: it always compares equal so that structural
/// equality of expressions ignores where things were written.
#[derive(Debug, Clone, Copy, Default)]
pub struct CornerSpans(pub Span, pub Span);

impl PartialEq for CornerSpans {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Text(String),
    Bool(bool),
    Cell(CellRef),
    Range(RangeRef, CornerSpans),
    Name(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Function name is stored uppercase.
    Call(String, Vec<Expr>),
}

/// An expression node. Equality is structural and ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// A node with no source position, as built by rewrites.
    pub fn synth(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn number(n: f64) -> Self {
        if n < 0.0 {
            Expr::unary(UnaryOp::Neg, Expr::synth(ExprKind::Number(-n)))
        } else {
            Expr::synth(ExprKind::Number(n))
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Expr::synth(ExprKind::Text(s.into()))
    }

    pub fn boolean(b: bool) -> Self {
        Expr::synth(ExprKind::Bool(b))
    }

    pub fn cell(c: CellRef) -> Self {
        Expr::synth(ExprKind::Cell(c))
    }

    pub fn range(r: RangeRef) -> Self {
        Expr::synth(ExprKind::Range(r, CornerSpans::default()))
    }

    pub fn name(n: impl Into<String>) -> Self {
        Expr::synth(ExprKind::Name(n.into()))
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Self {
        Expr::synth(ExprKind::Unary(op, Box::new(operand)))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::synth(ExprKind::Binary(op, Box::new(left), Box::new(right)))
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Self {
        Expr::synth(ExprKind::Call(name.to_ascii_uppercase(), args))
    }

    pub fn as_call(&self) -> Option<(&str, &[Expr])> {
        match &self.kind {
            ExprKind::Call(name, args) => Some((name.as_str(), args.as_slice())),
            _ => None,
        }
    }

    pub fn is_reference(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Cell(_) | ExprKind::Range(..) | ExprKind::Name(_)
        )
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Unary(_, e) => e.walk(f),
            ExprKind::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }

    /// True if any node satisfies `pred`.
    pub fn any(&self, pred: &impl Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= pred(e));
        found
    }

    pub fn calls(&self, function: &str) -> bool {
        self.any(&|e| matches!(&e.kind, ExprKind::Call(n, _) if n == function))
    }

    /// Longest chain of function calls nested inside one another. A bare
    /// call has depth 1; operators do not add depth.
    pub fn call_depth(&self) -> usize {
        match &self.kind {
            ExprKind::Unary(_, e) => e.call_depth(),
            ExprKind::Binary(_, l, r) => l.call_depth().max(r.call_depth()),
            ExprKind::Call(_, args) => 1 + args.iter().map(Expr::call_depth).max().unwrap_or(0),
            _ => 0,
        }
    }
}

/// A complete formula: root expression plus the array-entered flag
/// (source wrapped in `{= ... }`).
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub expr: Expr,
    pub array: bool,
}

impl Formula {
    pub fn new(expr: Expr, array: bool) -> Self {
        Formula { expr, array }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_letters_round_trip() {
        for (n, s) in [(1, "A"), (26, "Z"), (27, "AA"), (52, "AZ"), (703, "AAA")] {
            assert_eq!(column_letters(n), s);
            assert_eq!(column_index(s), Some(n));
        }
        assert_eq!(column_index("zz"), Some(702));
        assert_eq!(column_index(""), None);
        assert_eq!(column_index("AAAAAAAAAAAAAAAA"), None);
    }

    #[test]
    fn normalization_keeps_flags_with_coordinates() {
        let a = CellRef {
            col: 3,
            row: 1,
            col_abs: true,
            row_abs: false,
        };
        let b = CellRef {
            col: 1,
            row: 9,
            col_abs: false,
            row_abs: true,
        };
        let r = RangeRef::normalized(a, b);
        assert_eq!(r.to_string(), "A1:$C$9");
        assert_eq!((r.rows(), r.cols()), (9, 3));
    }

    #[test]
    fn depth_ignores_operators() {
        let inner = Expr::call("LEN", vec![Expr::cell(CellRef::new(1, 1))]);
        let e = Expr::binary(
            BinaryOp::Add,
            Expr::number(1.0),
            Expr::call("SUM", vec![Expr::binary(BinaryOp::Mul, inner, Expr::number(2.0))]),
        );
        assert_eq!(e.call_depth(), 2);
        assert_eq!(Expr::number(3.0).call_depth(), 0);
    }
}
