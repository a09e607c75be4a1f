use super::ast::Span;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    String,
    Identifier,
    CellRef,
    Operator,
    Punctuation,
    Boolean,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text of the token (string tokens include their quotes).
    pub lexeme: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at offset {offset}: {message}")]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

fn lex_err(offset: usize, message: impl Into<String>) -> LexError {
    LexError {
        offset,
        message: message.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits formula text into tokens. Offsets are in characters.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let push = |tokens: &mut Vec<Token>, kind, start: usize, end: usize| {
        tokens.push(Token {
            kind,
            lexeme: chars[start..end].iter().collect(),
            span: Span::new(start, end),
        });
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            i = lex_number(&chars, i)?;
            push(&mut tokens, TokenKind::Number, start, i);
        } else if c == '"' {
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(lex_err(start, "unterminated string literal")),
                    Some('"') if chars.get(i + 1) == Some(&'"') => i += 2,
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            push(&mut tokens, TokenKind::String, start, i);
        } else if is_ident_start(c) || c == '$' {
            let (kind, end) = lex_word(&chars, i)?;
            i = end;
            push(&mut tokens, kind, start, i);
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if matches!(two.as_str(), "<>" | "<=" | ">=") {
                i += 2;
                push(&mut tokens, TokenKind::Operator, start, i);
            } else if "+-*/^&%:=<>".contains(c) {
                i += 1;
                push(&mut tokens, TokenKind::Operator, start, i);
            } else if "(),{}".contains(c) {
                i += 1;
                push(&mut tokens, TokenKind::Punctuation, start, i);
            } else {
                return Err(lex_err(i, format!("unexpected character '{c}'")));
            }
        }
    }
    Ok(tokens)
}

fn lex_number(chars: &[char], start: usize) -> Result<usize, LexError> {
    let mut i = start;
    let digits = |i: &mut usize| {
        let s = *i;
        while chars.get(*i).is_some_and(char::is_ascii_digit) {
            *i += 1;
        }
        *i - s
    };
    digits(&mut i);
    if chars.get(i) == Some(&'.') {
        i += 1;
        digits(&mut i);
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        let exp_at = i;
        i += 1;
        if matches!(chars.get(i), Some('+' | '-')) {
            i += 1;
        }
        if digits(&mut i) == 0 {
            return Err(lex_err(exp_at, "malformed number: missing exponent digits"));
        }
    }
    match chars.get(i) {
        Some(&c) if c == '.' || c == '$' || is_ident_char(c) => {
            return Err(lex_err(i, "malformed number"));
        }
        _ => {}
    }
    let text: String = chars[start..i].iter().collect();
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(i),
        _ => Err(lex_err(start, "number out of range")),
    }
}

/// Identifier, boolean or cell reference starting at `start`.
fn lex_word(chars: &[char], start: usize) -> Result<(TokenKind, usize), LexError> {
    let mut i = start;
    let mut end = start;
    while chars.get(end).is_some_and(|&c| is_ident_char(c) || c == '$') {
        end += 1;
    }
    let word: String = chars[start..end].iter().collect();
    let followed_by_paren = {
        let mut j = end;
        while chars.get(j).is_some_and(|c| c.is_whitespace()) {
            j += 1;
        }
        chars.get(j) == Some(&'(')
    };

    if !followed_by_paren && parse_cell_lexeme(&word).is_some() {
        return Ok((TokenKind::CellRef, end));
    }
    if word.contains('$') {
        if parse_cell_shape(&word) {
            return Err(lex_err(start, format!("reference out of range: {word}")));
        }
        return Err(lex_err(start, format!("malformed reference '{word}'")));
    }
    // plain identifier
    while chars.get(i).is_some_and(|&c| is_ident_char(c)) {
        i += 1;
    }
    let upper = word.to_ascii_uppercase();
    if !followed_by_paren && (upper == "TRUE" || upper == "FALSE") {
        return Ok((TokenKind::Boolean, i));
    }
    if !followed_by_paren && parse_cell_shape(&word) {
        return Err(lex_err(start, format!("reference out of range: {word}")));
    }
    Ok((TokenKind::Identifier, i))
}

/// Whether `word` has the textual shape of a cell reference.
fn parse_cell_shape(word: &str) -> bool {
    let b = word.as_bytes();
    let mut i = 0;
    if b.get(i) == Some(&b'$') {
        i += 1;
    }
    let ls = i;
    while b.get(i).is_some_and(u8::is_ascii_alphabetic) {
        i += 1;
    }
    if i == ls {
        return false;
    }
    if b.get(i) == Some(&b'$') {
        i += 1;
    }
    let ds = i;
    while b.get(i).is_some_and(u8::is_ascii_digit) {
        i += 1;
    }
    i == b.len() && i > ds && b[ds] != b'0'
}

/// Parses `[$]letters[$]digits` into (col, row, col_abs, row_abs).
pub(crate) fn parse_cell_lexeme(word: &str) -> Option<(u32, u32, bool, bool)> {
    if !parse_cell_shape(word) {
        return None;
    }
    let col_abs = word.starts_with('$');
    let rest = word.trim_start_matches('$');
    let split = rest.find(|c: char| !c.is_ascii_alphabetic())?;
    let (letters, tail) = rest.split_at(split);
    let row_abs = tail.starts_with('$');
    let digits = tail.trim_start_matches('$');
    let col = super::ast::column_index(letters)?;
    let row: u32 = digits.parse().ok()?;
    Some((col, row, col_abs, row_abs))
}
