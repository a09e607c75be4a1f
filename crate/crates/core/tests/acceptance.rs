//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sprego::cli;
use sprego::competency::{classify, Group, Level, ITEMS};
use sprego::equivalence::{gen_dataset, DatasetSchema, Generator};
use sprego::eval::catalog::{self, CORE, EXTENDED};
use sprego::eval::{evaluate, match_position, EvalContext, EvalResult, MatchType, Mode};
use sprego::formula::{format, parse};
use sprego::rewrite::{lint, DiagnosticCode};
use sprego::table::RangeView;
use sprego::value::Value;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check_all_rules(seed: &str) -> (i32, Vec<u8>, Vec<u8>, Duration) {
    let args = ["sprego", "check", "--all-rules", "--seed", seed, "--format", "json"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let start = Instant::now();
    let code = cli::run(args, &mut std::io::empty(), &mut out, &mut err);
    (code, out, err, start.elapsed())
}

/// Every rule R1..R8 passes on 200 datasets per schema within the
/// tolerances, in under a minute.
fn rewrite_equivalence() -> Outcome {
    let (code, out, err, elapsed) = check_all_rules("7");
    let report: serde_json::Value =
        serde_json::from_slice(&out).map_err(|e| format!("bad JSON ({e}); stderr: {}", String::from_utf8_lossy(&err)))?;
    let verdicts = report["verdicts"].as_array().ok_or("no verdicts")?;
    ensure(report["trials_per_schema"] == 200, || "trial count is not 200".into())?;
    let mut failed = Vec::new();
    for v in verdicts {
        let status = v["status"].as_str().unwrap_or("?");
        if status == "fail" {
            failed.push(format!("{} ({})", v["case"], v["rule_id"]));
        }
    }
    for rule in 1..=8 {
        let id = format!("R{rule}");
        let passing = verdicts
            .iter()
            .filter(|v| v["rule_id"] == id.as_str() && v["status"] == "pass")
            .count();
        ensure(passing > 0, || format!("{id} has no passing case"))?;
    }
    ensure(failed.is_empty(), || format!("failing cases: {}", failed.join(", ")))?;
    ensure(code == 0, || format!("exit status {code}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    let skipped = verdicts.iter().filter(|v| v["status"] == "not-run").count();
    Ok(format!(
        "{} cases, 200 trials per schema, {skipped} volatile case(s) not run, {elapsed:.1?}",
        verdicts.len()
    ))
}

/// MATCH agrees with the linear-scan definitions on every vector of
/// length 1..8 over a four-value alphabet.
fn match_oracle() -> Outcome {
    let start = Instant::now();
    let alphabet = [1.0, 2.0, 3.0, 4.0];
    let lookups: Vec<Value> = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5]
        .into_iter()
        .map(Value::Number)
        .collect();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for v in common::all_vectors(&alphabet, 1..=8) {
        let ascending = v.windows(2).all(|w| w[0] <= w[1]);
        let descending = v.windows(2).all(|w| w[0] >= w[1]);
        let cells: Vec<Value> = v.iter().copied().map(Value::Number).collect();
        let view = RangeView::column(cells.clone());
        let mut cases = vec![(MatchType::Exact, common::oracle_exact as fn(&Value, &[Value]) -> Option<usize>)];
        if ascending {
            cases.push((MatchType::Ascending, common::oracle_ascending));
        }
        if descending {
            cases.push((MatchType::Descending, common::oracle_descending));
        }
        for (mt, oracle) in cases {
            for x in &lookups {
                let want = oracle(x, &cells).map_or(Value::Error(sprego::value::ErrorKind::Na), |p| Value::Number(p as f64));
                let got = match_position(x, &view, mt);
                checked += 1;
                if got != want && mismatches.len() < 5 {
                    mismatches.push(format!("{mt:?} {x} in {v:?}: got {got:?}, want {want:?}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches.is_empty(), || mismatches.join("; "))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{checked} lookups, 0 discrepancies, {elapsed:.1?}"))
}

/// Array-mode results equal the per-row scalar results of the same
/// formula, cell for cell.
fn array_vs_copy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 100 {
        attempts += 1;
        if attempts > 1000 {
            return Err(format!("only {tested} formulas produced a column result"));
        }
        let rows = 1 + (attempts * 7) % 32;
        let schema = DatasetSchema::new("t", rows)
            .column("a", Generator::numeric(-3.0, 3.0).with_blanks(0.1).with_errors(0.05))
            .column("b", Generator::text("ab", 0, 3).with_blanks(0.1))
            .column("c", Generator::Mixed { logicals: true });
        let table = gen_dataset(&schema, attempts as u64).map_err(|e| e.to_string())?;
        let body = common::elementwise(&mut rng, 3);
        let scalar = parse(&format!("={body}")).map_err(|e| format!("{body}: {e}"))?;
        let array = parse(&format!("{{={body}}}")).map_err(|e| format!("{body}: {e}"))?;
        let ctx = EvalContext::new(&table).with_seed(1);
        let EvalResult::Range(vector) = evaluate(&array, &ctx.with_mode(Mode::Array)) else {
            continue;
        };
        ensure(vector.rows == rows && vector.cols == 1, || {
            format!("{body}: array result is {}x{}", vector.rows, vector.cols)
        })?;
        for r in 1..=rows {
            let copy = evaluate(&scalar, &ctx.with_row(r as u32));
            let cell = &vector.cells[r - 1];
            ensure(copy.as_value() == Some(cell), || {
                format!("{body}: row {r}: array {cell:?}, copy {copy:?}")
            })?;
        }
        tested += 1;
    }
    Ok(format!(
        "{tested} formulas ({} scalar-valued skipped), tables of 1..32 rows, exact agreement",
        attempts - tested
    ))
}

fn call_with_min_args(name: &str) -> String {
    let spec = catalog::lookup(name).expect("catalogued");
    let args = vec!["A1"; spec.min_args.max(if spec.max_args == Some(0) { 0 } else { 1 })];
    format!("={name}({})", args.join(","))
}

/// Core and extended functions lint clean, baselines are flagged, and
/// absolute and mixed references are reported.
fn closure_lint() -> Outcome {
    let non_sprego = |src: &str| -> usize {
        let f = parse(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        lint(&f)
            .iter()
            .filter(|d| d.code == DiagnosticCode::NonSpregoFunction)
            .count()
    };
    for name in CORE.iter().chain(&EXTENDED) {
        let src = call_with_min_args(name);
        ensure(non_sprego(&src) == 0, || format!("{src} flagged"))?;
    }
    for name in catalog::BASELINE {
        let src = call_with_min_args(name);
        ensure(non_sprego(&src) == 1, || format!("{src} not flagged"))?;
    }
    for (src, code) in [
        ("=$A$1", DiagnosticCode::AbsoluteReference),
        ("=A$1", DiagnosticCode::MixedReference),
        ("=$A1", DiagnosticCode::MixedReference),
    ] {
        let d = lint(&parse(src).unwrap());
        ensure(d.len() == 1 && d[0].code == code, || format!("{src}: {d:?}"))?;
    }
    Ok(format!(
        "{} general-purpose functions clean, {} baselines flagged, 3 reference forms reported",
        CORE.len() + EXTENDED.len(),
        catalog::BASELINE.len()
    ))
}

/// Transcription of the competency table: item, then BU and GU marks.
const TABLE: &str = "\
Breaking down and researching problems|x|x
Tracing errors in spreadsheets they build|x|x
Building error-resistant formulas|x|x
Understanding manual vs automatic calculation|x|x
Recognizing error messages|x|x
Handling data-entering error messages|x|x
Handling formula-entering error messages|x|x
Handling data-driven error messages||x
Recognizing data types|x|x
Analysing data manually|x|x
Accessing and saving files|x|x
Reading and entering data|x|x
Manipulating set up and printing|x|x
Naming files|x|x
Converting files with Save As|x|x
Managing find and replace processes|x|x
Understanding and applying navigation shortcuts|x|x
Understanding and applying copy and move shortcuts|x|x
Understanding and applying file management shortcuts|x|x
Designing layout|x|x
Explaining calculations they build|x|x
Understanding and applying basic arithmetic|x|x
Understanding the concept of functions|x|x
Calling non-array-based general purpose functions|x|x
Understanding and handling vectors|x|x
Building vector output array formulas|x|x
Building one value output array formulas|x|x
Calling array-, error-, and condition-based general purpose functions||x
Building 2 and 3-level composite functions|x|x
Building multi-level composite functions||x
Understanding precedent and dependent cells|x|x
Understanding and applying hiding, unhiding, deleting, inserting rows, columns, cells|x|x
Understanding and applying grouping, merging||x
Understanding and applying regular cell formatting|x|x";

/// Fixture levels and the shipped competency data.
fn competency() -> Outcome {
    let level = |src: &str| classify(&parse(src).unwrap()).level;
    ensure(level("=A1+B1") == Level::BU, || "=A1+B1 is not BU".into())?;
    ensure(level("{=SUM(IF(A1:A9>5,1,0))}") == Level::GU, || "SUM(IF) is not GU".into())?;
    for src in [
        "=LEFT(RIGHT(SUBSTITUTE(LEN(A1)&\"\",\"1\",\"2\"),2),1)",
        "=SUM(MAX(MIN(INT(A1))))",
        "=ROUND(AVERAGE(SMALL(A1:A9,LEN(B1))),1)+1",
    ] {
        let p = classify(&parse(src).unwrap());
        ensure(p.nesting_depth == 4 && p.level == Level::GU, || format!("{src}: {p:?}"))?;
    }
    let rows: Vec<(&str, bool, bool)> = TABLE
        .lines()
        .map(|l| {
            let mut parts = l.split('|');
            let name = parts.next().unwrap();
            (name, parts.next() == Some("x"), parts.next() == Some("x"))
        })
        .collect();
    ensure(rows.len() == ITEMS.len(), || format!("{} items shipped, {} in table", ITEMS.len(), rows.len()))?;
    for (name, bu, gu) in &rows {
        let matching: Vec<_> = ITEMS.iter().filter(|i| i.name == *name).collect();
        ensure(matching.len() == 1, || format!("{name}: {} entries", matching.len()))?;
        let item = matching[0];
        ensure(item.bu_required == *bu && item.gu_required == *gu, || format!("{name}: marks differ"))?;
    }
    let off_groups = ITEMS
        .iter()
        .filter(|i| matches!(i.group, Group::BasicIct | Group::Design | Group::Formatting))
        .all(|i| !i.evaluable);
    ensure(off_groups, || "a non-formula group item is marked evaluable".into())?;
    Ok(format!("fixtures BU/GU/GU, {} table rows match", rows.len()))
}

/// Generated formulas survive parse, format, parse; malformed text gives
/// a positioned error.
fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let src = common::formula(&mut rng);
        let first = parse(&src).map_err(|e| format!("#{i} {src}: {e}"))?;
        let printed = format(&first);
        let second = parse(&printed).map_err(|e| format!("#{i} {printed}: {e}"))?;
        ensure(first == second, || format!("#{i} {src} -> {printed} changed structure"))?;
        ensure(format(&second) == printed, || format!("#{i} {printed} is not a fixed point"))?;
    }
    for i in 0..100 {
        let src = common::malformed(&mut rng);
        let len = src.chars().count();
        let outcome = catch_unwind(|| parse(&src)).map_err(|_| format!("#{i} {src}: panicked"))?;
        match outcome {
            Ok(f) => return Err(format!("#{i} {src} parsed as {}", format(&f))),
            Err(e) => ensure(e.offset <= len, || format!("#{i} {src}: offset {} past end", e.offset))?,
        }
    }
    Ok("1000 round trips structurally equal, 100 malformed inputs rejected with positions".into())
}

/// Two identical all-rules checks print identical bytes.
fn determinism() -> Outcome {
    let (c1, a, _, _) = check_all_rules("7");
    let (c2, b, _, _) = check_all_rules("7");
    ensure(!a.is_empty(), || "no output".into())?;
    ensure(a == b, || "outputs differ".into())?;
    ensure(c1 == c2, || "exit statuses differ".into())?;
    serde_json::from_slice::<serde_json::Value>(&a).map_err(|e| e.to_string())?;
    Ok(format!("{} bytes, identical across runs", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("rewrite equivalence", rewrite_equivalence),
        ("MATCH oracle", match_oracle),
        ("array vs copy", array_vs_copy),
        ("closure lint", closure_lint),
        ("competency fixtures", competency),
        ("parser round trip", round_trip),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
