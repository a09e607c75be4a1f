use super::ast::{BinaryOp, CellRef, CornerSpans, Expr, ExprKind, Formula, RangeRef, Span, UnaryOp};
use super::token::{parse_cell_lexeme, tokenize, LexError, Token, TokenKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    /// Character offset, always within `0..=source.chars().count()`.
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            offset: e.offset,
            expected: "a valid token".into(),
            found: e.message,
        }
    }
}

/// Parses a formula. Accepts `{=expr}` (array-entered), `=expr`, or a bare
/// expression.
pub fn parse(source: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        eof: source.chars().count(),
    };
    let array = if p.peek_is(TokenKind::Punctuation, "{") {
        p.pos += 1;
        p.expect(TokenKind::Operator, "=")?;
        true
    } else {
        if p.peek_is(TokenKind::Operator, "=") {
            p.pos += 1;
        }
        false
    };
    let expr = p.expr()?;
    if array {
        p.expect(TokenKind::Punctuation, "}")?;
    }
    if let Some(t) = p.peek() {
        return Err(p.error_at(t.span.start, "end of formula", &t.lexeme.clone()));
    }
    Ok(Formula { expr, array })
}

/// Parses and returns only the root expression, dropping the array flag.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let f = parse(source)?;
    Ok(f.expr)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek()
            .is_some_and(|t| t.kind == kind && t.lexeme == lexeme)
    }

    fn error_at(&self, offset: usize, expected: &str, found: &str) -> ParseError {
        ParseError {
            offset,
            expected: expected.into(),
            found: found.into(),
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error_at(t.span.start, expected, &format!("'{}'", t.lexeme)),
            None => self.error_at(self.eof, expected, "end of input"),
        }
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<Span, ParseError> {
        if self.peek_is(kind, lexeme) {
            let span = self.tokens[self.pos].span;
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.unexpected(&format!("'{lexeme}'")))
        }
    }

    fn binary_op(&self, level: u8) -> Option<BinaryOp> {
        let t = self.peek()?;
        if t.kind != TokenKind::Operator {
            return None;
        }
        BinaryOp::from_symbol(&t.lexeme).filter(|op| op.precedence() == level)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary(&mut self, level: u8) -> Result<Expr, ParseError> {
        if level > 5 {
            return self.postfix();
        }
        let mut left = self.binary(level + 1)?;
        while let Some(op) = self.binary_op(level) {
            self.pos += 1;
            let right = self.binary(level + 1)?;
            let span = left.span.cover(right.span);
            left = Expr::new(ExprKind::Binary(op, Box::new(left), Box::new(right)), span);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        while self.peek_is(TokenKind::Operator, "%") {
            let span = e.span.cover(self.tokens[self.pos].span);
            self.pos += 1;
            e = Expr::new(ExprKind::Unary(UnaryOp::Percent, Box::new(e)), span);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator && t.lexeme == "-" => UnaryOp::Neg,
            Some(t) if t.kind == TokenKind::Operator && t.lexeme == "+" => UnaryOp::Plus,
            _ => return self.range(),
        };
        let start = self.tokens[self.pos].span;
        self.pos += 1;
        let operand = self.unary()?;
        let span = start.cover(operand.span);
        Ok(Expr::new(ExprKind::Unary(op, Box::new(operand)), span))
    }

    fn range(&mut self) -> Result<Expr, ParseError> {
        let first = self.primary()?;
        if !self.peek_is(TokenKind::Operator, ":") {
            return Ok(first);
        }
        let colon = self.tokens[self.pos].span.start;
        let ExprKind::Cell(a) = first.kind else {
            return Err(self.error_at(first.span.start, "cell reference before ':'", "expression"));
        };
        self.pos += 1;
        let second = self.primary()?;
        let ExprKind::Cell(b) = second.kind else {
            return Err(self.error_at(
                second.span.start.max(colon),
                "cell reference after ':'",
                "expression",
            ));
        };
        let range = RangeRef::normalized(a, b);
        let (s0, s1) = if range.start == a {
            (first.span, second.span)
        } else {
            (second.span, first.span)
        };
        Ok(Expr::new(
            ExprKind::Range(range, CornerSpans(s0, s1)),
            first.span.cover(second.span),
        ))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("an expression"));
        };
        self.pos += 1;
        let span = tok.span;
        let kind = match tok.kind {
            TokenKind::Number => {
                ExprKind::Number(tok.lexeme.parse().expect("lexer validated number"))
            }
            TokenKind::String => {
                let inner = &tok.lexeme[1..tok.lexeme.len() - 1];
                ExprKind::Text(inner.replace("\"\"", "\""))
            }
            TokenKind::Boolean => ExprKind::Bool(tok.lexeme.eq_ignore_ascii_case("TRUE")),
            TokenKind::CellRef => {
                let (col, row, col_abs, row_abs) =
                    parse_cell_lexeme(&tok.lexeme).expect("lexer validated reference");
                ExprKind::Cell(CellRef {
                    col,
                    row,
                    col_abs,
                    row_abs,
                })
            }
            TokenKind::Identifier => {
                if self.peek_is(TokenKind::Punctuation, "(") {
                    return self.call(tok);
                }
                ExprKind::Name(tok.lexeme.clone())
            }
            TokenKind::Punctuation if tok.lexeme == "(" => {
                let inner = self.expr()?;
                let close = self.expect(TokenKind::Punctuation, ")")?;
                return Ok(Expr::new(inner.kind, span.cover(close)));
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("an expression"));
            }
        };
        Ok(Expr::new(kind, span))
    }

    fn call(&mut self, name: Token) -> Result<Expr, ParseError> {
        self.expect(TokenKind::Punctuation, "(")?;
        let mut args = Vec::new();
        if !self.peek_is(TokenKind::Punctuation, ")") {
            loop {
                args.push(self.expr()?);
                if self.peek_is(TokenKind::Punctuation, ",") {
                    self.pos += 1;
                    continue;
                }
                break;
            }
        }
        let close = self.expect(TokenKind::Punctuation, ")")?;
        Ok(Expr::new(
            ExprKind::Call(name.lexeme.to_ascii_uppercase(), args),
            name.span.cover(close),
        ))
    }
}
