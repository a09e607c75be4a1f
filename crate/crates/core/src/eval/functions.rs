//! Bodies of the lifted functions. Each receives its arguments after
//! intersection or broadcasting: `Arg::Val` for value parameters,
//! `Arg::Op` for whole-range parameters.

use super::criteria::Criteria;
use super::lookup::{index_select, match_position, search_position, MatchType};
use super::{Arg, Operand};
use crate::table::RangeView;
use crate::value::{parse_numeral, ErrorKind, Value};
use std::borrow::Cow;

type R<T> = Result<T, ErrorKind>;

fn err(e: ErrorKind) -> Value {
    Value::Error(e)
}

fn done(r: R<Value>) -> Value {
    r.unwrap_or_else(Value::Error)
}

impl Arg<'_> {
    fn value(&self) -> Value {
        match self {
            Arg::Val(v) => v.clone(),
            Arg::Op(Operand::Scalar(v)) => v.clone(),
            Arg::Op(Operand::Array(a)) if a.is_single() => a.cells[0].clone(),
            Arg::Op(Operand::Array(_)) => err(ErrorKind::Value),
        }
    }

    fn num(&self) -> R<f64> {
        self.value().to_number()
    }

    /// Truncated integer, saturating at the i64 bounds.
    fn int(&self) -> R<i64> {
        Ok(self.num()?.trunc() as i64)
    }

    fn text(&self) -> R<String> {
        self.value().to_text()
    }

    fn view(&self) -> Cow<'_, RangeView> {
        match self {
            Arg::Op(Operand::Array(a)) => Cow::Borrowed(a),
            other => Cow::Owned(RangeView::new(1, 1, vec![other.value()])),
        }
    }
}

pub(super) fn apply(name: &str, args: &[Arg]) -> Value {
    match name {
        "LEN" => done(args[0].text().map(|s| Value::Number(s.chars().count() as f64))),
        "LEFT" => done(left_right(args, true)),
        "RIGHT" => done(left_right(args, false)),
        "SEARCH" => done(search(args)),
        "SUM" => done(numbers(args).map(|v| Value::number(v.iter().sum()))),
        "AVERAGE" => done(average(args)),
        "MIN" => done(numbers(args).map(|v| Value::number(v.into_iter().reduce(f64::min).unwrap_or(0.0)))),
        "MAX" => done(numbers(args).map(|v| Value::number(v.into_iter().reduce(f64::max).unwrap_or(0.0)))),
        "MATCH" => done(match_fn(args)),
        "INDEX" => done(index(args)),
        "ISERROR" => Value::Logical(args[0].value().is_error()),
        "SUBSTITUTE" => done(substitute(args)),
        "SMALL" => done(kth(args, true)),
        "LARGE" => done(kth(args, false)),
        "AND" => done(logicals(args).map(|v| Value::Logical(v.iter().all(|b| *b)))),
        "OR" => done(logicals(args).map(|v| Value::Logical(v.iter().any(|b| *b)))),
        "NOT" => done(args[0].value().to_bool().map(|b| Value::Logical(!b))),
        "INT" => done(args[0].num().map(|n| Value::number(n.floor()))),
        "ROUND" => done(round_fn(args)),
        "COUNT" => Value::Number(count(args) as f64),
        "COUNTA" => done(counta(args)),
        "COUNTIF" => done(countifs(args)),
        "COUNTIFS" => done(countifs(args)),
        "SUMIF" => done(sumif(args, false)),
        "SUMIFS" => done(sumifs(args)),
        "AVERAGEIF" => done(sumif(args, true)),
        "VLOOKUP" => done(lookup_fn(args, true)),
        "HLOOKUP" => done(lookup_fn(args, false)),
        "IFERROR" => {
            let v = args[0].value();
            if v.is_error() {
                args[1].value()
            } else {
                v
            }
        }
        _ => err(ErrorKind::Name),
    }
}

fn left_right(args: &[Arg], left: bool) -> R<Value> {
    let s = args[0].text()?;
    let n = match args.get(1) {
        Some(a) => a.num()?.trunc(),
        None => 1.0,
    };
    if n < 0.0 {
        return Err(ErrorKind::Value);
    }
    let len = s.chars().count();
    let n = (n as usize).min(len);
    let out: String = if left {
        s.chars().take(n).collect()
    } else {
        s.chars().skip(len - n).collect()
    };
    Ok(Value::Text(out))
}

fn search(args: &[Arg]) -> R<Value> {
    let needle = args[0].text()?;
    let hay = args[1].text()?;
    let start = match args.get(2) {
        Some(a) => Some(a.int()?),
        None => None,
    };
    Ok(search_position(&needle, &hay, start))
}

fn substitute(args: &[Arg]) -> R<Value> {
    let text = args[0].text()?;
    let old = args[1].text()?;
    let new = args[2].text()?;
    let instance = match args.get(3) {
        Some(a) => {
            let n = a.int()?;
            if n < 1 {
                return Err(ErrorKind::Value);
            }
            Some(n as usize)
        }
        None => None,
    };
    if old.is_empty() {
        return Ok(Value::Text(text));
    }
    Ok(Value::Text(match instance {
        None => text.replace(&old, &new),
        Some(k) => match text.match_indices(&old).nth(k - 1) {
            Some((i, _)) => format!("{}{}{}", &text[..i], new, &text[i + old.len()..]),
            None => text,
        },
    }))
}

/// Numbers for SUM-like aggregation. Inside ranges only numbers count and
/// errors propagate; direct scalar arguments are coerced.
fn numbers(args: &[Arg]) -> R<Vec<f64>> {
    let mut out = Vec::new();
    for a in args {
        match a {
            Arg::Op(Operand::Array(v)) => {
                for c in &v.cells {
                    match c {
                        Value::Number(n) => out.push(*n),
                        Value::Error(e) => return Err(*e),
                        _ => {}
                    }
                }
            }
            other => match other.value() {
                Value::Blank => {}
                v => out.push(v.to_number()?),
            },
        }
    }
    Ok(out)
}

fn average(args: &[Arg]) -> R<Value> {
    let v = numbers(args)?;
    if v.is_empty() {
        return Err(ErrorKind::Div0);
    }
    Ok(Value::number(v.iter().sum::<f64>() / v.len() as f64))
}

fn kth(args: &[Arg], smallest: bool) -> R<Value> {
    let mut v = numbers(&args[..1])?;
    let k = args[1].num()?.trunc();
    if k < 1.0 || k > v.len() as f64 {
        return Err(ErrorKind::Num);
    }
    v.sort_by(f64::total_cmp);
    let k = k as usize;
    Ok(Value::Number(if smallest { v[k - 1] } else { v[v.len() - k] }))
}

fn logicals(args: &[Arg]) -> R<Vec<bool>> {
    let mut out = Vec::new();
    let mut push = |v: &Value| -> R<()> {
        match v {
            Value::Logical(b) => out.push(*b),
            Value::Number(n) => out.push(*n != 0.0),
            Value::Blank => {}
            Value::Text(_) => return Err(ErrorKind::Value),
            Value::Error(e) => return Err(*e),
        }
        Ok(())
    };
    for a in args {
        match a {
            Arg::Op(Operand::Array(v)) => v.cells.iter().try_for_each(&mut push)?,
            other => push(&other.value())?,
        }
    }
    if out.is_empty() {
        return Err(ErrorKind::Value);
    }
    Ok(out)
}

/// Half away from zero, after snapping the scaled value to 15 significant
/// digits so that binary representation error does not decide the tie.
pub(crate) fn round_half_away(x: f64, digits: i64) -> f64 {
    let d = digits.clamp(-308, 308) as i32;
    let p = 10f64.powi(d.abs());
    let scaled = if d >= 0 { x * p } else { x / p };
    if !scaled.is_finite() {
        return scaled;
    }
    let snapped: f64 = format!("{scaled:.14e}").parse().unwrap_or(scaled);
    let r = snapped.round();
    if d >= 0 {
        r / p
    } else {
        r * p
    }
}

fn round_fn(args: &[Arg]) -> R<Value> {
    let x = args[0].num()?;
    let d = args[1].int()?;
    Ok(Value::number(round_half_away(x, d)))
}

fn count(args: &[Arg]) -> usize {
    args.iter()
        .map(|a| match a {
            Arg::Op(Operand::Array(v)) => {
                v.cells.iter().filter(|c| matches!(c, Value::Number(_))).count()
            }
            other => match other.value() {
                Value::Number(_) | Value::Logical(_) => 1,
                Value::Text(s) => usize::from(parse_numeral(&s).is_some()),
                _ => 0,
            },
        })
        .sum()
}

fn counta(args: &[Arg]) -> R<Value> {
    let mut n = 0usize;
    for a in args {
        let view = a.view();
        for c in &view.cells {
            match c {
                Value::Blank => {}
                Value::Error(e) => return Err(*e),
                _ => n += 1,
            }
        }
    }
    Ok(Value::Number(n as f64))
}

/// Numbers at the cells satisfying every (range, criteria) pair, taken from
/// `sum` (or a count of ones without it). Ranges must share one shape.
/// Cells are visited in index order and the first error met wins: a cell
/// stops being tested at its first failed pair, and a sum cell is read only
/// when every pair matched.
fn matching(pairs: &[(Cow<RangeView>, Criteria)], sum: Option<&RangeView>) -> R<Vec<f64>> {
    let first = &pairs[0].0;
    let same = |v: &RangeView| v.rows == first.rows && v.cols == first.cols;
    if !pairs.iter().all(|(v, _)| same(v)) || sum.is_some_and(|s| !same(s)) {
        return Err(ErrorKind::Value);
    }
    let mut out = Vec::new();
    'cells: for i in 0..first.len() {
        for (v, c) in pairs {
            if !c.matches(&v.cells[i])? {
                continue 'cells;
            }
        }
        match sum.map(|s| &s.cells[i]) {
            None => out.push(1.0),
            Some(Value::Number(n)) => out.push(*n),
            Some(Value::Error(e)) => return Err(*e),
            Some(_) => {}
        }
    }
    Ok(out)
}

fn pairs<'a>(args: &'a [Arg]) -> R<Vec<(Cow<'a, RangeView>, Criteria)>> {
    args.chunks(2)
        .map(|p| {
            let crit = match p.get(1) {
                Some(c) => Criteria::from_value(&c.value())?,
                None => return Err(ErrorKind::Value),
            };
            Ok((p[0].view(), crit))
        })
        .collect()
}

fn countifs(args: &[Arg]) -> R<Value> {
    Ok(Value::Number(matching(&pairs(args)?, None)?.len() as f64))
}

fn sumif(args: &[Arg], average: bool) -> R<Value> {
    let p = pairs(&args[..2])?;
    let sum = match args.get(2) {
        Some(s) => s.view(),
        None => p[0].0.clone(),
    };
    let vals = matching(&p, Some(&sum))?;
    if average {
        if vals.is_empty() {
            return Err(ErrorKind::Div0);
        }
        return Ok(Value::number(vals.iter().sum::<f64>() / vals.len() as f64));
    }
    Ok(Value::number(vals.iter().sum()))
}

fn sumifs(args: &[Arg]) -> R<Value> {
    if args.len().is_multiple_of(2) {
        return Err(ErrorKind::Value);
    }
    let sum = args[0].view();
    let p = pairs(&args[1..])?;
    Ok(Value::number(matching(&p, Some(&sum))?.iter().sum()))
}

fn match_fn(args: &[Arg]) -> R<Value> {
    let lookup = args[0].value();
    let kind = match args.get(2) {
        Some(a) => MatchType::from_number(a.num()?),
        None => MatchType::Ascending,
    };
    if matches!(lookup, Value::Blank) {
        return Err(ErrorKind::Na);
    }
    Ok(match_position(&lookup, &args[1].view(), kind))
}

fn index(args: &[Arg]) -> R<Value> {
    let row = args[1].int()?;
    let col = match args.get(2) {
        Some(a) => Some(a.int()?),
        None => None,
    };
    Ok(index_select(&args[0].view(), row, col))
}

fn lookup_fn(args: &[Arg], vertical: bool) -> R<Value> {
    let key = args[0].value();
    let table = args[1].view();
    let k = args[2].int()?;
    let approximate = match args.get(3) {
        Some(a) => a.value().to_bool()?,
        None => true,
    };
    if k < 1 {
        return Err(ErrorKind::Value);
    }
    let span = if vertical { table.cols } else { table.rows };
    if k as usize > span {
        return Err(ErrorKind::Ref);
    }
    if matches!(key, Value::Blank) {
        return Err(ErrorKind::Na);
    }
    let keys = if vertical {
        RangeView::column((1..=table.rows).map(|r| table.get(r, 1).cloned().unwrap_or(Value::Blank)).collect())
    } else {
        RangeView::row((1..=table.cols).map(|c| table.get(1, c).cloned().unwrap_or(Value::Blank)).collect())
    };
    let kind = if approximate {
        MatchType::Ascending
    } else {
        MatchType::Exact
    };
    let pos = match match_position(&key, &keys, kind) {
        Value::Number(p) => p as usize,
        other => return Ok(other),
    };
    let k = k as usize;
    let hit = if vertical {
        table.get(pos, k)
    } else {
        table.get(k, pos)
    };
    Ok(hit.cloned().unwrap_or(err(ErrorKind::Ref)))
}
