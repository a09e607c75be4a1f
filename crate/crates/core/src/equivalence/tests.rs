use super::*;
use crate::formula::parse;
use crate::rewrite::rewrite;

fn numeric_schema(rows: usize) -> DatasetSchema {
    DatasetSchema::new("n", rows).column("a", Generator::numeric(0.0, 10.0))
}

#[test]
fn datasets_are_deterministic() {
    let s = numeric_schema(3);
    let a = gen_dataset(&s, 1).unwrap();
    let b = gen_dataset(&s, 1).unwrap();
    assert_eq!(a.columns(), b.columns());
    assert_eq!(a.row_count(), 3);
    let c = gen_dataset(&s, 2).unwrap();
    assert_ne!(a.columns(), c.columns());
    for v in &a.columns()[0].cells {
        let Value::Number(n) = v else { panic!("{v:?}") };
        assert!((0.0..=10.0).contains(n));
        assert_eq!((n * 2.0).fract(), 0.0);
    }
}

#[test]
fn sorted_columns_are_monotone() {
    for seed in 0..20 {
        let s = DatasetSchema::new("s", 30)
            .column("up", Generator::SortedAscending { lo: -3.0, hi: 3.0 })
            .column("down", Generator::SortedDescending { lo: 0.0, hi: 9.0 });
        let t = gen_dataset(&s, seed).unwrap();
        let nums = |i: usize| -> Vec<f64> { t.columns()[i].cells.iter().map(num).collect() };
        assert!(nums(0).windows(2).all(|w| w[0] <= w[1]));
        assert!(nums(1).windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn blanks_and_errors_appear() {
    let s = DatasetSchema::new("b", 64)
        .column("a", Generator::numeric(0.0, 1.0).with_blanks(0.5))
        .column("e", Generator::numeric(0.0, 1.0).with_errors(0.5));
    let mut blanks = 0;
    let mut kinds = std::collections::HashSet::new();
    for seed in 0..20 {
        let t = gen_dataset(&s, seed).unwrap();
        assert_eq!(t.row_count(), 64);
        blanks += t.columns()[0].cells.iter().filter(|v| **v == Value::Blank).count();
        kinds.extend(t.columns()[1].cells.iter().filter_map(Value::error));
    }
    let rate = blanks as f64 / (64.0 * 20.0);
    assert!((0.4..0.6).contains(&rate), "{rate}");
    assert_eq!(kinds.len(), ErrorKind::ALL.len());
}

#[test]
fn schema_errors() {
    assert_eq!(gen_dataset(&numeric_schema(0), 0).unwrap_err(), SchemaError::ZeroRows);
    let s = DatasetSchema::new("t", 2).column("a", Generator::text("", 0, 2));
    assert_eq!(gen_dataset(&s, 0).unwrap_err(), SchemaError::EmptyAlphabet("a".into()));
    let s = DatasetSchema::new("t", 2).column("a", Generator::numeric(2.0, 1.0));
    assert!(matches!(gen_dataset(&s, 0), Err(SchemaError::Column { .. })));
}

#[test]
fn schema_json_round_trip() {
    let s = DatasetSchema::new("t", 5)
        .column("a", Generator::numeric(0.0, 1.0).with_errors(0.2))
        .column("b", Generator::Mixed { logicals: false });
    let json = serde_json::to_string(&s).unwrap();
    let back: DatasetSchema = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
    let parsed: DatasetSchema = serde_json::from_str(
        r#"{"name":"x","rows":4,"columns":[{"name":"a","generator":{"kind":"with-blanks","base":{"kind":"logical"}}}]}"#,
    )
    .unwrap();
    assert_eq!(
        parsed.columns[0].generator,
        Generator::Logical.with_blanks(0.25)
    );
}

#[test]
fn tolerance() {
    assert!(values_equal(&Value::Number(1.0), &Value::Number(1.0 + 1e-12)));
    assert!(!values_equal(&Value::Number(1.0), &Value::Number(1.0 + 1e-6)));
    assert!(values_equal(&Value::Number(0.0), &Value::Number(1e-13)));
    assert!(!values_equal(&Value::Number(0.0), &Value::Blank));
    assert!(!values_equal(&Value::Error(ErrorKind::Na), &Value::Error(ErrorKind::Ref)));
}

#[test]
fn countif_pair_passes_and_matches_a_filter_count() {
    let f = parse("=COUNTIF(A1:A20,\">5\")").unwrap();
    let r = rewrite(&f).unwrap().formula;
    let schemas = [numeric_schema(20)];
    let v = check_equivalence(&f, &r, &schemas, 50, 3);
    assert_eq!(v.status, Status::Pass);
    assert_eq!(v.trials, 50);
    // both sides against a direct count
    for t in 0..10 {
        let seed = trial_seed(3, 0, t);
        let table = gen_dataset(&schemas[0], seed).unwrap();
        let expected = table.columns()[0].cells.iter().filter(|c| num(c) > 5.0).count() as f64;
        let ctx = EvalContext::new(&table);
        assert_eq!(evaluate(&f, &ctx), EvalResult::Value(Value::Number(expected)));
        assert_eq!(evaluate(&r, &ctx), EvalResult::Value(Value::Number(expected)));
    }
}

#[test]
fn broken_rewrite_is_caught_and_replays() {
    let f = parse("=COUNTIF(A1:A20,\">5\")").unwrap();
    let broken = parse("{=SUM(IF(A1:A20>5,1,1))}").unwrap();
    let schemas = [numeric_schema(20)];
    let v = check_equivalence(&f, &broken, &schemas, 30, 0);
    assert_eq!(v.status, Status::Fail);
    assert!(!v.failures.is_empty() && v.failures.len() <= MAX_FAILURES_PER_SCHEMA);
    assert!(v.failures.windows(2).all(|w| w[0].seed <= w[1].seed));
    let first = &v.failures[0];
    let table = gen_dataset(&schemas[0], first.seed).unwrap();
    let ctx = EvalContext::new(&table);
    assert_eq!(evaluate(&f, &ctx), first.original);
    assert_eq!(evaluate(&broken, &ctx), first.rewritten);
}

#[test]
fn volatile_pairs_are_not_run() {
    let f = parse("=IFERROR(1/RAND(),0)").unwrap();
    let r = rewrite(&f).unwrap().formula;
    let v = check_equivalence(&f, &r, &[numeric_schema(3)], 10, 0);
    assert_eq!(v.status, Status::NotRun);
    assert!(v.passed());
    assert!(v.notes[0].contains("RAND"));
}

#[test]
fn row_sensitivity() {
    let s = |src: &str| row_sensitive(&parse(src).unwrap());
    assert!(s("=a*2"));
    assert!(s("=IFERROR(a/b,0)"));
    assert!(s("=ROW()"));
    assert!(s("=SUM(A1:A3*2)"));
    assert!(!s("=SUM(A1:A3)"));
    assert!(!s("=COUNTIF(A1:A9,\">5\")"));
    assert!(!s("{=SUM(IF(A1:A9>5,1,0))}"));
    assert!(!s("=A1/B1"));
}

#[test]
fn verdicts_are_independent_of_thread_scheduling() {
    let f = parse("=SUMIF(A1:A10,\">5\")").unwrap();
    let broken = parse("{=SUM(IF(A1:A10>=5,A1:A10,0))}").unwrap();
    let schemas = [numeric_schema(10)];
    let a = check_equivalence(&f, &broken, &schemas, 60, 9);
    let b = check_equivalence(&f, &broken, &schemas, 60, 9);
    assert_eq!(a, b);
}

#[test]
fn shipped_suite_passes_at_low_trial_count() {
    let report = run_suite(1, 20);
    for v in &report.verdicts {
        if !v.verdict.passed() {
            eprintln!("{}", serde_json::to_string_pretty(v).unwrap());
        }
    }
    assert!(report.passed);
    assert_eq!(report.verdicts.len(), suite().len());
    for rule in RuleId::ALL {
        assert!(report.verdicts.iter().any(|v| v.verdict.rule_id == Some(rule)), "{rule}");
    }
}

// The divergence classes excluded from the suite really do diverge.
#[test]
fn documented_divergences_are_real() {
    let cases = [
        ("=COUNT(A1:A8)", Generator::text("12", 1, 2)),
        ("=COUNT(A1:A8)", Generator::Logical),
        ("=COUNTA(A1:A8)", Generator::text("x", 0, 1)),
    ];
    for (src, generator) in cases {
        let f = parse(src).unwrap();
        let r = rewrite(&f).unwrap().formula;
        let schemas = [DatasetSchema::new("d", 8).column("a", generator)];
        assert_eq!(check_equivalence(&f, &r, &schemas, 20, 0).status, Status::Fail, "{src}");
    }
}
