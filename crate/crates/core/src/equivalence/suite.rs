//! The shipped rule cases: one or more formulas per rule, each with
//! schemas covering empty and full match sets, blanks, errors, and sorted
//! and unsorted lookup columns.

use super::{check_equivalence, DatasetSchema, Generator, Status, Verdict, TABLE_NAME};
use crate::formula::{format, parse};
use crate::rewrite::{rewrite_with, RewriteContext, RuleId};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct RuleCase {
    pub rule: RuleId,
    pub name: &'static str,
    pub formula: &'static str,
    pub schemas: Vec<DatasetSchema>,
}

const ROWS: usize = 24;

fn numeric(lo: f64, hi: f64) -> Generator {
    Generator::numeric(lo, hi)
}

fn letters() -> Generator {
    Generator::text("ab", 0, 2)
}

/// Schemas with columns `a`..`d`, all drawn from the given generators.
fn schema(name: &str, gens: &[Generator]) -> DatasetSchema {
    gens.iter()
        .zip(["a", "b", "c", "d"])
        .fold(DatasetSchema::new(name, ROWS), |s, (g, n)| s.column(n, g.clone()))
}

/// Two-column numeric schemas: ordinary, nothing matching `>5`, everything
/// matching `>5`, with blanks, and with errors.
fn numeric_pairs() -> Vec<DatasetSchema> {
    vec![
        schema("numeric", &[numeric(0.0, 10.0), numeric(-5.0, 5.0), numeric(0.0, 10.0)]),
        schema("none-match", &[numeric(0.0, 5.0), numeric(-5.0, 5.0), numeric(0.0, 10.0)]),
        schema("all-match", &[numeric(6.0, 9.0), numeric(-5.0, 5.0), numeric(0.0, 10.0)]),
        schema(
            "blanks",
            &[numeric(0.0, 10.0).with_blanks(0.3), numeric(-5.0, 5.0).with_blanks(0.3), numeric(0.0, 10.0)],
        ),
        schema(
            "errors",
            &[numeric(0.0, 10.0).with_errors(0.05), numeric(-5.0, 5.0).with_errors(0.05), numeric(0.0, 10.0)],
        ),
        schema(
            "mixed",
            &[Generator::Mixed { logicals: true }, Generator::Mixed { logicals: true }, numeric(0.0, 10.0)],
        ),
    ]
}

/// Text criteria column `a`, numeric `b`, numeric criteria cells in `c`.
fn text_keyed() -> Vec<DatasetSchema> {
    vec![
        schema("letters", &[letters(), numeric(0.0, 10.0), numeric(0.0, 10.0)]),
        schema("letters-blanks", &[letters().with_blanks(0.3), numeric(0.0, 10.0).with_blanks(0.2), numeric(0.0, 10.0)]),
        schema("letters-errors", &[letters().with_errors(0.05), numeric(0.0, 10.0).with_errors(0.05), numeric(0.0, 10.0)]),
        schema("letters-mixed", &[Generator::Mixed { logicals: true }, Generator::Mixed { logicals: true }, numeric(0.0, 10.0)]),
    ]
}

fn lookup_tables(sorted: bool) -> Vec<DatasetSchema> {
    let key = |lo, hi| {
        if sorted {
            Generator::SortedAscending { lo, hi }
        } else {
            numeric(lo, hi)
        }
    };
    vec![
        schema("keys", &[key(0.0, 10.0), letters(), numeric(-1.0, 11.0)]),
        schema("keys-blanks", &[key(0.0, 10.0), letters().with_blanks(0.3), numeric(-1.0, 11.0).with_blanks(0.1)]),
        schema("keys-errors", &[key(0.0, 10.0), letters().with_errors(0.1), numeric(-1.0, 11.0).with_errors(0.1)]),
        schema("keys-missing", &[key(0.0, 3.0), letters(), numeric(5.0, 9.0)]),
    ]
}

/// Horizontal tables in rows 1..3 of columns `a`..`d`; the lookup value is
/// `A5`. With `sorted`, column ranges are disjoint and increasing so the
/// first row is ascending.
fn horizontal(sorted: bool) -> Vec<DatasetSchema> {
    let cols = if sorted {
        [numeric(0.0, 2.0), numeric(3.0, 5.0), numeric(6.0, 8.0), numeric(9.0, 11.0)]
    } else {
        [numeric(0.0, 11.0), numeric(0.0, 11.0), numeric(0.0, 11.0), numeric(0.0, 11.0)]
    };
    vec![
        schema("rows", &cols),
        schema("rows-blanks", &cols.clone().map(|g| g.with_blanks(0.2))),
        schema("rows-errors", &cols.map(|g| g.with_errors(0.1))),
    ]
}

fn count_columns(logicals: bool) -> Vec<DatasetSchema> {
    let mixed = Generator::Mixed { logicals };
    vec![
        schema("mixed", &[mixed.clone(), numeric(0.0, 10.0)]),
        schema("mixed-errors", &[mixed.clone().with_errors(0.1), numeric(0.0, 10.0).with_blanks(0.5)]),
        schema("all-blank", &[numeric(0.0, 1.0).with_blanks(1.0), mixed]),
    ]
}

fn division() -> Vec<DatasetSchema> {
    vec![
        schema("zeros", &[numeric(-2.0, 2.0), numeric(0.0, 1.0)]),
        schema("errors", &[numeric(-2.0, 2.0).with_errors(0.2), numeric(0.0, 2.0).with_blanks(0.2)]),
        schema("text", &[Generator::Mixed { logicals: true }, numeric(0.0, 2.0)]),
    ]
}

/// Schemas used when checking an arbitrary pair: numeric and text-keyed
/// columns `a`..`c`, with and without blanks, errors and mixed types.
pub fn pair_schemas() -> Vec<DatasetSchema> {
    numeric_pairs().into_iter().chain(text_keyed()).collect()
}

pub fn suite() -> Vec<RuleCase> {
    let case = |rule, name, formula, schemas| RuleCase {
        rule,
        name,
        formula,
        schemas,
    };
    use RuleId::*;
    vec![
        case(R1, "countif-threshold", "=COUNTIF(A1:A24,\">5\")", numeric_pairs()),
        case(R1, "countif-named", "=COUNTIF(b,\"<=0\")", numeric_pairs()),
        case(R1, "countif-text", "=COUNTIF(A1:A24,\"b\")", text_keyed()),
        case(R1, "countif-cell", "=COUNTIF(A1:A24,\"<\"&C1)", numeric_pairs()),
        case(R1, "countif-empty", "=COUNTIF(A1:A24,\"\")", text_keyed()),
        case(R2, "sumif-range", "=SUMIF(A1:A24,\">=3\",B1:B24)", numeric_pairs()),
        case(R2, "sumif-self", "=SUMIF(a,\">5\")", numeric_pairs()),
        case(R2, "sumif-text", "=SUMIF(a,\"<>b\",b)", text_keyed()),
        case(R3, "averageif-range", "=AVERAGEIF(A1:A24,\">5\",B1:B24)", numeric_pairs()),
        case(R3, "averageif-text", "=AVERAGEIF(A1:A24,\"a\",B1:B24)", text_keyed()),
        case(R4, "count", "=COUNT(A1:A24)", count_columns(false)),
        case(R4, "count-two", "=COUNT(a,B1:B24)", count_columns(false)),
        case(R4, "counta", "=COUNTA(A1:A24)", count_columns(true)),
        case(R5, "vlookup-exact", "=VLOOKUP(C1,A1:B24,2,FALSE)", lookup_tables(false)),
        case(R5, "vlookup-sorted", "=VLOOKUP(C1,A1:C24,2)", lookup_tables(true)),
        case(R5, "vlookup-unsorted", "=VLOOKUP(C2,A1:C24,3,TRUE)", lookup_tables(false)),
        case(R5, "vlookup-named", "=VLOOKUP(C1,data,2,0)", lookup_tables(false)),
        case(R6, "hlookup-exact", "=HLOOKUP(A5,A1:D3,3,FALSE)", horizontal(false)),
        case(R6, "hlookup-sorted", "=HLOOKUP(A5,A1:D3,2)", horizontal(true)),
        case(R6, "hlookup-unsorted", "=HLOOKUP(B5,A1:D2,2,TRUE)", horizontal(false)),
        case(R7, "iferror-cell", "=IFERROR(A1/B1,0)", division()),
        case(R7, "iferror-rows", "=IFERROR(a/b,\"none\")", division()),
        case(R7, "iferror-array", "{=IFERROR(A1:A24/B1:B24,-1)}", division()),
        case(R7, "iferror-volatile", "=IFERROR(1/(RAND()-0.5),0)", division()),
        case(R8, "countifs", "=COUNTIFS(A1:A24,\">2\",B1:B24,\"<=0\")", numeric_pairs()),
        case(R8, "countifs-text", "=COUNTIFS(a,\"<>a\",b,\">\"&C1)", text_keyed()),
        case(R8, "sumifs", "=SUMIFS(C1:C24,A1:A24,\">=\"&C2,B1:B24,\"<3\")", numeric_pairs()),
        case(R8, "sumifs-text", "=SUMIFS(b,a,\"b\",b,\">=2\")", text_keyed()),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseVerdict {
    pub case: &'static str,
    pub original: String,
    pub rewritten: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials_per_schema: usize,
    pub passed: bool,
    pub verdicts: Vec<CaseVerdict>,
}

/// Rewrites and checks every shipped case. A case whose formula fails to
/// parse or rewrite counts as a failure with the reason in its notes.
pub fn run_suite(seed: u64, trials: usize) -> SuiteReport {
    let verdicts: Vec<CaseVerdict> = suite()
        .into_iter()
        .map(|case| {
            let headers = case.schemas.first().map(|s| s.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>());
            let ctx = RewriteContext::default().with_table(TABLE_NAME, headers.unwrap_or_default());
            let failed = |reason: String| Verdict {
                rule_id: Some(case.rule),
                status: Status::Fail,
                trials: 0,
                failures: Vec::new(),
                notes: vec![reason],
            };
            let original = match parse(case.formula) {
                Ok(f) => f,
                Err(e) => {
                    return CaseVerdict {
                        case: case.name,
                        original: case.formula.to_string(),
                        rewritten: String::new(),
                        verdict: failed(e.to_string()),
                    }
                }
            };
            match rewrite_with(&original, &ctx) {
                Err(e) => CaseVerdict {
                    case: case.name,
                    original: format(&original),
                    rewritten: String::new(),
                    verdict: failed(e.to_string()),
                },
                Ok(out) => {
                    let mut verdict = check_equivalence(&original, &out.formula, &case.schemas, trials, seed);
                    verdict.rule_id = Some(case.rule);
                    let mut notes: Vec<String> = out.plans.iter().flat_map(|p| p.notes.clone()).collect();
                    notes.append(&mut verdict.notes);
                    notes.dedup();
                    verdict.notes = notes;
                    CaseVerdict {
                        case: case.name,
                        original: format(&original),
                        rewritten: format(&out.formula),
                        verdict,
                    }
                }
            }
        })
        .collect();
    SuiteReport {
        schema_version: 1,
        seed,
        trials_per_schema: trials,
        passed: verdicts.iter().all(|v| v.verdict.passed()),
        verdicts,
    }
}
