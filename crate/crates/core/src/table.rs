//! Named-column tables loaded from CSV, rectangular views over them, and
//! reference resolution.

use crate::formula::{CellRef, RangeRef};
use crate::value::{parse_numeral, ErrorKind, Value, ValueType};
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("input is not valid UTF-8 (byte {offset})")]
    Encoding { offset: usize },
    #[error("duplicate column header '{0}'")]
    DuplicateHeader(String),
}

impl CsvError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CsvError::Syntax { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub header: String,
    pub cells: Vec<Value>,
}

/// Immutable table of equally long named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    row_count: usize,
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub has_header: bool,
    pub table_name: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_header: true,
            table_name: "data".into(),
        }
    }
}

impl Table {
    /// Builds a table, padding short columns with blanks. Headers must be
    /// unique ignoring case.
    pub fn new(name: impl Into<String>, mut columns: Vec<Column>) -> Result<Table, CsvError> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.header.to_lowercase()) {
                return Err(CsvError::DuplicateHeader(c.header.clone()));
            }
        }
        let row_count = columns.iter().map(|c| c.cells.len()).max().unwrap_or(0);
        for c in &mut columns {
            c.cells.resize(row_count, Value::Blank);
        }
        Ok(Table {
            name: name.into(),
            columns,
            row_count,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn col_count(&self) -> usize {
        self.columns.len()
    }

    pub fn headers(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.header.as_str())
    }

    /// Case-insensitive column lookup, returning the 0-based index.
    pub fn column_index(&self, header: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.header.to_lowercase() == header.to_lowercase())
    }

    pub fn column(&self, header: &str) -> Option<&Column> {
        self.column_index(header).map(|i| &self.columns[i])
    }

    /// Cell at 1-based (row, col), `None` when outside the table.
    pub fn cell(&self, row: u32, col: u32) -> Option<&Value> {
        if row == 0 || col == 0 {
            return None;
        }
        self.columns
            .get(col as usize - 1)
            .and_then(|c| c.cells.get(row as usize - 1))
    }

    /// Block of cells at 1-based top-left (row, col); `None` if any part
    /// falls outside the table.
    pub fn block(&self, row: u32, col: u32, rows: u32, cols: u32) -> Option<RangeView> {
        if row == 0 || col == 0 {
            return None;
        }
        let last_row = row as u64 + rows as u64 - 1;
        let last_col = col as u64 + cols as u64 - 1;
        if rows == 0 || cols == 0 || last_row > self.row_count as u64 || last_col > self.columns.len() as u64 {
            return None;
        }
        let mut cells = Vec::with_capacity(rows as usize * cols as usize);
        for r in row..row + rows {
            for c in col..col + cols {
                cells.push(self.cell(r, c).cloned().unwrap_or(Value::Blank));
            }
        }
        Some(RangeView {
            rows: rows as usize,
            cols: cols as usize,
            cells,
            origin: Some(CellRef::new(col, row)),
        })
    }

    pub fn to_json(&self) -> TableJson<'_> {
        TableJson {
            name: &self.name,
            headers: self.headers().collect(),
            rows: (0..self.row_count)
                .map(|r| self.columns.iter().map(|c| &c.cells[r]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TableJson<'a> {
    pub name: &'a str,
    pub headers: Vec<&'a str>,
    pub rows: Vec<Vec<&'a Value>>,
}

/// Row-major rectangular block of values. A vector has one row or one
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeView {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Value>,
    /// Top-left cell when the view is a block of a table.
    pub origin: Option<CellRef>,
}

impl RangeView {
    pub fn new(rows: usize, cols: usize, cells: Vec<Value>) -> RangeView {
        assert_eq!(rows * cols, cells.len(), "shape does not match cell count");
        RangeView {
            rows,
            cols,
            cells,
            origin: None,
        }
    }

    pub fn column(cells: Vec<Value>) -> RangeView {
        RangeView::new(cells.len(), 1, cells)
    }

    pub fn row(cells: Vec<Value>) -> RangeView {
        RangeView::new(1, cells.len(), cells)
    }

    pub fn filled(rows: usize, cols: usize, v: Value) -> RangeView {
        RangeView::new(rows, cols, vec![v; rows * cols])
    }

    pub fn is_vector(&self) -> bool {
        self.rows == 1 || self.cols == 1
    }

    pub fn is_single(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 1-based (row, col) access.
    pub fn get(&self, row: usize, col: usize) -> Option<&Value> {
        if row == 0 || col == 0 || row > self.rows || col > self.cols {
            return None;
        }
        self.cells.get((row - 1) * self.cols + col - 1)
    }
}

/// Result of resolving a reference against a table.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolved {
    Value(Value),
    Range(RangeView),
}

/// A reference expression that can be resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Reference {
    Cell(CellRef),
    Range(RangeRef),
    Name(String),
}

impl std::fmt::Display for Reference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reference::Cell(c) => write!(f, "{c}"),
            Reference::Range(r) => write!(f, "{r}"),
            Reference::Name(n) => f.write_str(n),
        }
    }
}

/// Resolves a reference. Column letters address columns in table order,
/// row 1 is the first data row. A name resolves to the column with that
/// header, or to the whole table when it matches the table's own name.
/// Failures come back as error values: `#REF!` out of bounds, `#NAME?`
/// for unknown names.
pub fn resolve(table: &Table, reference: &Reference) -> Resolved {
    match reference {
        Reference::Cell(c) => match table.cell(c.row, c.col) {
            Some(v) => Resolved::Value(v.clone()),
            None => Resolved::Value(Value::Error(ErrorKind::Ref)),
        },
        Reference::Range(r) => {
            match table.block(r.start.row, r.start.col, r.rows(), r.cols()) {
                Some(view) => Resolved::Range(view),
                None => Resolved::Value(Value::Error(ErrorKind::Ref)),
            }
        }
        Reference::Name(n) => {
            if let Some(i) = table.column_index(n) {
                let mut view = RangeView::column(table.columns[i].cells.clone());
                view.origin = Some(CellRef::new(i as u32 + 1, 1));
                Resolved::Range(view)
            } else if n.eq_ignore_ascii_case(&table.name) && table.col_count() > 0 {
                let rows = table.row_count as u32;
                let cols = table.col_count() as u32;
                match table.block(1, 1, rows, cols) {
                    Some(v) => Resolved::Range(v),
                    None => Resolved::Range(RangeView {
                        rows: 0,
                        cols: cols as usize,
                        cells: Vec::new(),
                        origin: Some(CellRef::new(1, 1)),
                    }),
                }
            } else {
                Resolved::Value(Value::Error(ErrorKind::Name))
            }
        }
    }
}

fn type_cell(field: &str, quoted: bool) -> Value {
    if quoted {
        return Value::Text(field.to_string());
    }
    if field.is_empty() {
        return Value::Blank;
    }
    if let Some(n) = parse_numeral(field) {
        return Value::Number(n);
    }
    if field.eq_ignore_ascii_case("TRUE") {
        return Value::Logical(true);
    }
    if field.eq_ignore_ascii_case("FALSE") {
        return Value::Logical(false);
    }
    Value::Text(field.to_string())
}

struct Field {
    text: String,
    quoted: bool,
}

/// RFC-4180 record splitter that remembers which fields were quoted.
fn read_records(src: &str) -> Result<Vec<(usize, Vec<Field>)>, CsvError> {
    let mut records = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1;
    loop {
        if chars.peek().is_none() {
            break;
        }
        let record_line = line;
        let mut fields = Vec::new();
        loop {
            let mut text = String::new();
            let mut quoted = false;
            if chars.peek() == Some(&'"') {
                quoted = true;
                chars.next();
                loop {
                    match chars.next() {
                        None => {
                            return Err(CsvError::Syntax {
                                line: record_line,
                                message: "unterminated quoted field".into(),
                            })
                        }
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            text.push('"');
                        }
                        Some('"') => break,
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            text.push(c);
                        }
                    }
                }
                match chars.peek() {
                    None | Some(',') | Some('\n') | Some('\r') => {}
                    Some(_) => {
                        return Err(CsvError::Syntax {
                            line,
                            message: "unexpected character after closing quote".into(),
                        })
                    }
                }
            } else {
                while let Some(&c) = chars.peek() {
                    if c == ',' || c == '\n' || c == '\r' {
                        break;
                    }
                    if c == '"' {
                        return Err(CsvError::Syntax {
                            line,
                            message: "quote inside unquoted field".into(),
                        });
                    }
                    text.push(c);
                    chars.next();
                }
            }
            fields.push(Field { text, quoted });
            match chars.next() {
                Some(',') => continue,
                Some('\r') => {
                    if chars.peek() == Some(&'\n') {
                        chars.next();
                    }
                    line += 1;
                    break;
                }
                Some('\n') => {
                    line += 1;
                    break;
                }
                None => break,
                Some(_) => unreachable!("field loop stops only at separators"),
            }
        }
        records.push((record_line, fields));
    }
    Ok(records)
}

/// Loads a table from CSV bytes.
///
/// Unquoted fields are typed: decimal numerals become numbers, `TRUE`/`FALSE`
/// (any case) logicals, empty fields blanks, anything else text. Quoted
/// fields are always text, so `""` is empty text rather than blank. Short
/// rows are padded with blanks.
pub fn load_csv(bytes: &[u8], options: &CsvOptions) -> Result<Table, CsvError> {
    let src = std::str::from_utf8(bytes).map_err(|e| CsvError::Encoding {
        offset: e.valid_up_to(),
    })?;
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let mut records = read_records(src)?.into_iter();

    let mut headers: Vec<String> = Vec::new();
    if options.has_header {
        if let Some((_, fields)) = records.next() {
            headers = fields
                .into_iter()
                .enumerate()
                .map(|(i, f)| {
                    if f.text.is_empty() {
                        format!("C{}", i + 1)
                    } else {
                        f.text
                    }
                })
                .collect();
        }
    }
    let mut rows: Vec<Vec<Value>> = Vec::new();
    for (line, fields) in records {
        if options.has_header && fields.len() > headers.len() {
            return Err(CsvError::Syntax {
                line,
                message: format!(
                    "row has {} fields but the header has {}",
                    fields.len(),
                    headers.len()
                ),
            });
        }
        rows.push(fields.iter().map(|f| type_cell(&f.text, f.quoted)).collect());
    }
    if !options.has_header {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        headers = (1..=width).map(|i| format!("C{i}")).collect();
    }
    let mut columns: Vec<Column> = headers
        .into_iter()
        .map(|header| Column {
            header,
            cells: Vec::with_capacity(rows.len()),
        })
        .collect();
    for row in rows {
        let mut row = row.into_iter();
        for col in columns.iter_mut() {
            col.cells.push(row.next().unwrap_or(Value::Blank));
        }
    }
    Table::new(options.table_name.clone(), columns)
}

/// Per-column summary from [`profile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnProfile {
    pub header: String,
    /// Most frequent non-blank type; ties go Number, Text, Logical, Error.
    /// `"blank"` when the column has no other values.
    pub dominant: ValueType,
    pub counts: BTreeMap<ValueType, usize>,
    pub blank: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

pub fn profile(table: &Table) -> Vec<ColumnProfile> {
    table
        .columns()
        .iter()
        .map(|col| {
            let mut counts: BTreeMap<ValueType, usize> = BTreeMap::new();
            let mut min: Option<f64> = None;
            let mut max: Option<f64> = None;
            for v in &col.cells {
                *counts.entry(v.value_type()).or_default() += 1;
                if let Value::Number(n) = v {
                    min = Some(min.map_or(*n, |m| m.min(*n)));
                    max = Some(max.map_or(*n, |m| m.max(*n)));
                }
            }
            let blank = counts.get(&ValueType::Blank).copied().unwrap_or(0);
            let dominant = [
                ValueType::Number,
                ValueType::Text,
                ValueType::Logical,
                ValueType::Error,
            ]
            .into_iter()
            .filter(|t| counts.get(t).copied().unwrap_or(0) > 0)
            // max_by_key keeps the last maximum, so walk in reverse priority
            .rev()
            .max_by_key(|t| counts[t])
            .unwrap_or(ValueType::Blank);
            ColumnProfile {
                header: col.header.clone(),
                dominant,
                counts,
                blank,
                min,
                max,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Table {
        load_csv(s.as_bytes(), &CsvOptions::default()).unwrap()
    }

    #[test]
    fn typing_rules() {
        let t = load("name,age\nBob,7");
        assert_eq!(t.row_count(), 1);
        assert_eq!(t.column("name").unwrap().cells, vec![Value::text("Bob")]);
        assert_eq!(t.column("AGE").unwrap().cells, vec![Value::Number(7.0)]);

        let t = load("x\n\n");
        assert_eq!(t.column("x").unwrap().cells, vec![Value::Blank]);

        let t = load("v\n007\ntrue\n\"\"\n\"12\"\n");
        assert_eq!(
            t.column("v").unwrap().cells,
            vec![
                Value::Number(7.0),
                Value::Logical(true),
                Value::text(""),
                Value::text("12")
            ]
        );
    }

    #[test]
    fn grouped_numbers_need_quotes_to_be_text() {
        let t = load("v\n\"1,000\"");
        assert_eq!(t.column("v").unwrap().cells, vec![Value::text("1,000")]);
    }

    #[test]
    fn ragged_rows_are_padded() {
        let t = load("a,b,c\n1\n1,2,3\r\n,,\n");
        assert_eq!(t.row_count(), 3);
        assert_eq!(t.cell(1, 3), Some(&Value::Blank));
        assert_eq!(t.cell(2, 3), Some(&Value::Number(3.0)));
        assert_eq!(t.cell(3, 1), Some(&Value::Blank));
    }

    #[test]
    fn csv_errors() {
        let e = load_csv(b"a\n\"open\n", &CsvOptions::default()).unwrap_err();
        assert_eq!(e.line(), Some(2));
        assert!(load_csv(b"a\nx\"y\n", &CsvOptions::default()).is_err());
        assert!(load_csv(b"a\n\"x\"y\n", &CsvOptions::default()).is_err());
        assert!(matches!(
            load_csv(b"a,A\n1,2", &CsvOptions::default()),
            Err(CsvError::DuplicateHeader(_))
        ));
        assert!(matches!(
            load_csv(&[b'a', b'\n', 0xff], &CsvOptions::default()),
            Err(CsvError::Encoding { offset: 2 })
        ));
        assert!(load_csv(b"a\n1,2\n", &CsvOptions::default()).is_err());
    }

    #[test]
    fn headerless_and_multiline_fields() {
        let opts = CsvOptions {
            has_header: false,
            table_name: "t".into(),
        };
        let t = load_csv(b"1,\"a\nb\"\n2", &opts).unwrap();
        assert_eq!(t.headers().collect::<Vec<_>>(), vec!["C1", "C2"]);
        assert_eq!(t.cell(1, 2), Some(&Value::text("a\nb")));
        assert_eq!(t.cell(2, 2), Some(&Value::Blank));
    }

    #[test]
    fn resolution() {
        let t = load("a,age\n1,5\n2,6\n3,7");
        match resolve(&t, &Reference::Name("AGE".into())) {
            Resolved::Range(v) => {
                assert_eq!((v.rows, v.cols), (3, 1));
                assert_eq!(v.cells[2], Value::Number(7.0));
                assert_eq!(v.origin, Some(CellRef::new(2, 1)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            resolve(&t, &Reference::Cell(CellRef::new(1, 5))),
            Resolved::Value(Value::Error(ErrorKind::Ref))
        );
        let r = RangeRef::normalized(CellRef::new(1, 1), CellRef::new(1, 3));
        match resolve(&t, &Reference::Range(r)) {
            Resolved::Range(v) => assert_eq!(v.cells, vec![Value::Number(1.0), Value::Number(2.0), Value::Number(3.0)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            resolve(&t, &Reference::Name("nope".into())),
            Resolved::Value(Value::Error(ErrorKind::Name))
        );
        match resolve(&t, &Reference::Name("data".into())) {
            Resolved::Range(v) => assert_eq!((v.rows, v.cols), (3, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn profiles() {
        let t = Table::new(
            "t",
            vec![
                Column { header: "n".into(), cells: vec![Value::Number(1.0), Value::Number(2.0), Value::Blank] },
                Column { header: "b".into(), cells: vec![Value::Blank, Value::Blank, Value::Blank] },
                Column { header: "m".into(), cells: vec![Value::Number(1.0), Value::text("a"), Value::Blank] },
            ],
        )
        .unwrap();
        let p = profile(&t);
        assert_eq!(p[0].dominant, ValueType::Number);
        assert_eq!(p[0].counts[&ValueType::Number], 2);
        assert_eq!(p[0].blank, 1);
        assert_eq!((p[0].min, p[0].max), (Some(1.0), Some(2.0)));
        assert_eq!(p[1].dominant, ValueType::Blank);
        assert_eq!(p[2].dominant, ValueType::Number);
        assert_eq!(p[2].counts[&ValueType::Text], 1);
        for col in &p {
            assert_eq!(col.counts.values().sum::<usize>(), t.row_count());
        }
    }

    #[test]
    fn json_form() {
        let t = load("a,b\n1,x\n,TRUE");
        let j = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(j, r#"{"name":"data","headers":["a","b"],"rows":[[1.0,"x"],[null,true]]}"#);
    }
}
