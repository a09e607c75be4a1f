//! Differential checking of rewrites: seeded random tables, both formulas
//! evaluated under identical contexts, results compared with a small
//! numeric tolerance.

mod suite;

use crate::eval::{catalog, evaluate, EvalContext, EvalResult};
use crate::formula::{Expr, ExprKind, Formula};
use crate::rewrite::RuleId;
use crate::table::{Column, Table};
use crate::value::{ErrorKind, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

pub use suite::{pair_schemas, run_suite, suite, CaseVerdict, RuleCase, SuiteReport};

pub const DEFAULT_TRIALS: usize = 200;
pub const MAX_FAILURES_PER_SCHEMA: usize = 10;
pub const RELATIVE_TOLERANCE: f64 = 1e-9;
pub const ABSOLUTE_TOLERANCE: f64 = 1e-12;

/// How one column's values are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    /// Multiples of 0.5 from `lo` up to `hi`.
    Numeric { lo: f64, hi: f64 },
    /// Strings of `minlen..=maxlen` characters from `alphabet`.
    Text {
        alphabet: String,
        maxlen: usize,
        #[serde(default)]
        minlen: usize,
    },
    Logical,
    /// Numbers, non-numeric text, blanks, and (unless disabled) logicals.
    Mixed {
        #[serde(default = "yes")]
        logicals: bool,
    },
    SortedAscending {
        #[serde(default)]
        lo: f64,
        #[serde(default = "ten")]
        hi: f64,
    },
    SortedDescending {
        #[serde(default)]
        lo: f64,
        #[serde(default = "ten")]
        hi: f64,
    },
    /// `base`, with each cell replaced by a blank with `probability`.
    WithBlanks {
        base: Box<Generator>,
        #[serde(default = "quarter")]
        probability: f64,
    },
    /// `base`, with each cell replaced by a uniformly chosen error kind
    /// with `probability`.
    WithErrors {
        base: Box<Generator>,
        #[serde(default = "tenth")]
        probability: f64,
    },
}

fn yes() -> bool {
    true
}
fn ten() -> f64 {
    10.0
}
fn quarter() -> f64 {
    0.25
}
fn tenth() -> f64 {
    0.1
}

impl Generator {
    pub fn numeric(lo: f64, hi: f64) -> Self {
        Generator::Numeric { lo, hi }
    }

    pub fn text(alphabet: &str, minlen: usize, maxlen: usize) -> Self {
        Generator::Text {
            alphabet: alphabet.into(),
            maxlen,
            minlen,
        }
    }

    pub fn with_blanks(self, probability: f64) -> Self {
        Generator::WithBlanks {
            base: Box::new(self),
            probability,
        }
    }

    pub fn with_errors(self, probability: f64) -> Self {
        Generator::WithErrors {
            base: Box::new(self),
            probability,
        }
    }

    fn validate(&self, column: &str) -> Result<(), SchemaError> {
        let bad = |reason: &str| {
            Err(SchemaError::Column {
                column: column.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            Generator::Numeric { lo, hi }
            | Generator::SortedAscending { lo, hi }
            | Generator::SortedDescending { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return bad("numeric bounds must be finite with lo <= hi");
                }
            }
            Generator::Text {
                alphabet,
                maxlen,
                minlen,
            } => {
                if alphabet.is_empty() {
                    return Err(SchemaError::EmptyAlphabet(column.to_string()));
                }
                if minlen > maxlen {
                    return bad("minlen exceeds maxlen");
                }
            }
            Generator::WithBlanks { base, probability } | Generator::WithErrors { base, probability } => {
                if !(0.0..=1.0).contains(probability) {
                    return bad("probability must lie in [0, 1]");
                }
                base.validate(column)?;
            }
            Generator::Logical | Generator::Mixed { .. } => {}
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        match self {
            Generator::Numeric { lo, hi }
            | Generator::SortedAscending { lo, hi }
            | Generator::SortedDescending { lo, hi } => {
                let steps = ((hi - lo) / 0.5).floor() as u64;
                Value::number(lo + 0.5 * rng.gen_range(0..=steps) as f64)
            }
            Generator::Text {
                alphabet,
                maxlen,
                minlen,
            } => {
                let chars: Vec<char> = alphabet.chars().collect();
                let len = rng.gen_range(*minlen..=*maxlen);
                Value::Text((0..len).map(|_| *chars.choose(rng).expect("non-empty")).collect())
            }
            Generator::Logical => Value::Logical(rng.gen()),
            Generator::Mixed { logicals } => {
                let kinds = if *logicals { 4 } else { 3 };
                match rng.gen_range(0..kinds) {
                    0 => Generator::numeric(-5.0, 5.0).sample(rng),
                    1 => Generator::text("abc", 1, 3).sample(rng),
                    2 => Value::Blank,
                    _ => Value::Logical(rng.gen()),
                }
            }
            Generator::WithBlanks { base, probability } => {
                let v = base.sample(rng);
                if rng.gen_bool(*probability) {
                    Value::Blank
                } else {
                    v
                }
            }
            Generator::WithErrors { base, probability } => {
                let v = base.sample(rng);
                if rng.gen_bool(*probability) {
                    Value::Error(*ErrorKind::ALL.choose(rng).expect("non-empty"))
                } else {
                    v
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub generator: Generator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
    pub rows: usize,
}

impl DatasetSchema {
    pub fn new(name: &str, rows: usize) -> Self {
        DatasetSchema {
            name: name.to_string(),
            columns: Vec::new(),
            rows,
        }
    }

    pub fn column(mut self, name: &str, generator: Generator) -> Self {
        self.columns.push(ColumnSpec {
            name: name.to_string(),
            generator,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemaError {
    #[error("schema has zero rows")]
    ZeroRows,
    #[error("schema has no columns")]
    NoColumns,
    #[error("column {0}: empty alphabet")]
    EmptyAlphabet(String),
    #[error("column {column}: {reason}")]
    Column { column: String, reason: String },
    #[error("duplicate column name")]
    DuplicateColumn,
}

/// Name of generated tables.
pub const TABLE_NAME: &str = "data";

/// A table drawn from `schema`; the same (schema, seed) always gives the
/// same table. Columns are drawn in order, each cell top to bottom.
pub fn gen_dataset(schema: &DatasetSchema, seed: u64) -> Result<Table, SchemaError> {
    if schema.rows == 0 {
        return Err(SchemaError::ZeroRows);
    }
    if schema.columns.is_empty() {
        return Err(SchemaError::NoColumns);
    }
    for c in &schema.columns {
        c.generator.validate(&c.name)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = schema
        .columns
        .iter()
        .map(|spec| {
            let mut cells: Vec<Value> = (0..schema.rows).map(|_| spec.generator.sample(&mut rng)).collect();
            match spec.generator {
                Generator::SortedAscending { .. } => cells.sort_by(|a, b| num(a).total_cmp(&num(b))),
                Generator::SortedDescending { .. } => cells.sort_by(|a, b| num(b).total_cmp(&num(a))),
                _ => {}
            }
            Column {
                header: spec.name.clone(),
                cells,
            }
        })
        .collect();
    Table::new(TABLE_NAME, columns).map_err(|_| SchemaError::DuplicateColumn)
}

fn num(v: &Value) -> f64 {
    match v {
        Value::Number(n) => *n,
        _ => 0.0,
    }
}

/// Seed of one trial, derived from the run seed and the trial's position.
pub fn trial_seed(seed: u64, schema: usize, trial: usize) -> u64 {
    let mut z = seed
        ^ (schema as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9).rotate_left(17);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Value equality: numbers within the tolerances, everything else exact.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let d = (x - y).abs();
            d <= ABSOLUTE_TOLERANCE || d <= RELATIVE_TOLERANCE * x.abs().max(y.abs())
        }
        _ => a == b,
    }
}

pub fn results_equal(a: &EvalResult, b: &EvalResult) -> bool {
    match (a, b) {
        (EvalResult::Value(x), EvalResult::Value(y)) => values_equal(x, y),
        (EvalResult::Range(x), EvalResult::Range(y)) => {
            x.rows == y.rows
                && x.cols == y.cols
                && x.cells.iter().zip(&y.cells).all(|(p, q)| values_equal(p, q))
        }
        _ => false,
    }
}

/// JSON form of a result: a value, or rows of values.
pub fn result_json(r: &EvalResult) -> serde_json::Value {
    match r {
        EvalResult::Value(v) => serde_json::to_value(v).expect("values serialize"),
        EvalResult::Range(view) => serde_json::Value::Array(
            view.cells
                .chunks(view.cols.max(1))
                .map(|row| serde_json::to_value(row).expect("values serialize"))
                .collect(),
        ),
    }
}

fn ser_result<S: Serializer>(r: &EvalResult, s: S) -> Result<S::Ok, S::Error> {
    result_json(r).serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub schema: String,
    /// Replays the dataset through [`gen_dataset`].
    pub seed: u64,
    /// Row used for scalar-mode intersection, if any.
    pub row: Option<u32>,
    #[serde(serialize_with = "ser_result")]
    pub original: EvalResult,
    #[serde(serialize_with = "ser_result")]
    pub rewritten: EvalResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotRun,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub rule_id: Option<RuleId>,
    pub status: Status,
    /// Datasets evaluated.
    pub trials: usize,
    /// First failures per schema, ordered by schema then seed.
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Whether scalar evaluation of the formula can depend on the current row:
/// a range in a single-value position is intersected with it, and `ROW()`
/// reads it directly.
pub fn row_sensitive(f: &Formula) -> bool {
    fn walk(e: &Expr, intersected: bool, array: bool) -> bool {
        match &e.kind {
            ExprKind::Range(..) | ExprKind::Name(_) => intersected && !array,
            ExprKind::Unary(_, x) => walk(x, true, array),
            ExprKind::Binary(_, l, r) => walk(l, true, array) || walk(r, true, array),
            ExprKind::Call(name, args) => {
                if name == "ROW" && args.is_empty() {
                    return true;
                }
                let spec = catalog::lookup(name);
                args.iter().enumerate().any(|(i, a)| {
                    let value = spec.is_none_or(|s| s.param(i) == catalog::Param::Value);
                    walk(a, value, array)
                })
            }
            _ => false,
        }
    }
    walk(&f.expr, true, f.array)
}

/// Evaluates both formulas on `trials` datasets per schema and compares
/// the results. Formulas calling RAND are not run: the two sides consume
/// random numbers differently.
pub fn check_equivalence(
    original: &Formula,
    rewritten: &Formula,
    schemas: &[DatasetSchema],
    trials: usize,
    seed: u64,
) -> Verdict {
    if original.expr.calls("RAND") || rewritten.expr.calls("RAND") {
        return Verdict {
            rule_id: None,
            status: Status::NotRun,
            trials: 0,
            failures: Vec::new(),
            notes: vec!["volatile: RAND is evaluated a different number of times on each side".into()],
        };
    }
    let per_row = row_sensitive(original) || row_sensitive(rewritten);
    let jobs: Vec<(usize, usize)> = (0..schemas.len())
        .flat_map(|s| (0..trials).map(move |t| (s, t)))
        .collect();
    let mut notes = Vec::new();
    let results: Vec<Result<Vec<Failure>, String>> = jobs
        .par_iter()
        .map(|&(s, t)| {
            let schema = &schemas[s];
            let dseed = trial_seed(seed, s, t);
            let table = gen_dataset(schema, dseed).map_err(|e| format!("schema {}: {e}", schema.name))?;
            let rows: Vec<Option<u32>> = if per_row {
                (1..=table.row_count() as u32).map(Some).collect()
            } else {
                vec![None]
            };
            let mut out = Vec::new();
            for row in rows {
                let ctx = EvalContext {
                    table: &table,
                    current_row: row,
                    rng_seed: dseed,
                    mode: Default::default(),
                };
                let a = evaluate(original, &ctx);
                let b = evaluate(rewritten, &ctx);
                if !results_equal(&a, &b) {
                    out.push(Failure {
                        schema: schema.name.clone(),
                        seed: dseed,
                        row,
                        original: a,
                        rewritten: b,
                    });
                    break;
                }
            }
            Ok(out)
        })
        .collect();
    let mut failures = Vec::new();
    for s in 0..schemas.len() {
        let mut mine: Vec<Failure> = Vec::new();
        for (job, r) in jobs.iter().zip(&results) {
            if job.0 != s {
                continue;
            }
            match r {
                Ok(f) => mine.extend(f.iter().cloned()),
                Err(e) => {
                    if !notes.contains(e) {
                        notes.push(e.clone());
                    }
                }
            }
        }
        mine.sort_by_key(|f| (f.seed, f.row));
        mine.truncate(MAX_FAILURES_PER_SCHEMA);
        failures.extend(mine);
    }
    let bad_schema = !notes.is_empty();
    Verdict {
        rule_id: None,
        status: if failures.is_empty() && !bad_schema {
            Status::Pass
        } else {
            Status::Fail
        },
        trials: schemas.len() * trials,
        failures,
        notes,
    }
}

#[cfg(test)]
mod tests;
