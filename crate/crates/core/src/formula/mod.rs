//! Formula text: tokens, syntax tree, parser and canonical printer.

mod ast;
mod format;
mod parser;
mod token;

pub use ast::{
    column_index, column_letters, BinaryOp, CellRef, CornerSpans, Expr, ExprKind, Formula,
    RangeRef, Span, UnaryOp,
};
pub use format::{format, format_expr, format_number, quote_text};
pub use parser::{parse, parse_expr, ParseError};
pub use token::{tokenize, LexError, Token, TokenKind};
