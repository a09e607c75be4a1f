//! Command-line front end. [`run`] takes its streams as arguments so that
//! the binary and the tests drive the same code.

use crate::competency::{classify, report};
use crate::equivalence::{
    check_equivalence, pair_schemas, result_json, run_suite, CaseVerdict, DatasetSchema,
    SuiteReport, DEFAULT_TRIALS, TABLE_NAME,
};
use crate::eval::{evaluate, EvalContext, EvalResult, Mode};
use crate::formula::{format, parse, Formula, ParseError};
use crate::rewrite::{lint_with, rewrite_with, Diagnostic, RewriteContext};
use crate::table::{load_csv, profile, CsvOptions, Table};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::ffi::OsString;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{source_text}: {error}")]
    Parse {
        source_text: String,
        error: ParseError,
    },
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Parser)]
#[command(name = "sprego", version, about = "Spreadsheet formula engine, linter and rewriter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// CSV file; the file stem names the table.
    #[arg(long = "table", value_name = "CSV")]
    tables: Vec<PathBuf>,
    /// Formula source; may be repeated.
    #[arg(long = "formula", value_name = "SRC", allow_hyphen_values = true)]
    formulas: Vec<String>,
    /// File with one formula per line; blank lines and `#` comments are skipped.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    #[arg(long, env = "SPREGO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print formulas in canonical form.
    Parse(Common),
    /// Evaluate formulas against a table.
    Eval {
        #[command(flatten)]
        common: Common,
        /// 1-based data row for scalar evaluation; without it formulas run
        /// in array mode.
        #[arg(long)]
        row: Option<u32>,
    },
    /// Report non-general-purpose functions and absolute or mixed references.
    Lint(Common),
    /// Replace problem-specific functions with general-purpose composites.
    Rewrite(Common),
    /// Check a formula pair, or every shipped rule case, on generated data.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        all_rules: bool,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// JSON dataset schema, or an array of them, for pair checks.
        #[arg(long, value_name = "PATH")]
        schema: Option<PathBuf>,
    },
    /// Competency report for formulas.
    Report(Common),
    /// Column profile of tables.
    Profile(Common),
    /// Read formulas from standard input and evaluate them.
    Repl {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        row: Option<u32>,
    },
}

/// Runs one invocation and returns the exit status.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Parse(c) => cmd_parse(&c, out),
        Command::Eval { common, row } => cmd_eval(&common, row, out),
        Command::Lint(c) => cmd_lint(&c, out),
        Command::Rewrite(c) => cmd_rewrite(&c, out, err),
        Command::Check {
            common,
            all_rules,
            trials,
            schema,
        } => cmd_check(&common, all_rules, trials, schema.as_deref(), out),
        Command::Report(c) => cmd_report(&c, out),
        Command::Profile(c) => cmd_profile(&c, out),
        Command::Repl { common, row } => cmd_repl(&common, row, input, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Parse { source_text, error } = &e {
                let _ = writeln!(err, "  {source_text}");
                let _ = writeln!(err, "  {}^", " ".repeat(error.offset));
            }
            EXIT_USAGE
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_table(path: &Path) -> Result<Table> {
    let bytes = std::fs::read(path).map_err(|e| CliError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| TABLE_NAME.to_string());
    let options = CsvOptions {
        table_name: name,
        ..CsvOptions::default()
    };
    load_csv(&bytes, &options).map_err(|e| CliError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

impl Common {
    fn sources(&self) -> Result<Vec<String>> {
        let mut out = self.formulas.clone();
        if let Some(path) = &self.file {
            out.extend(
                read_file(path)?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(String::from),
            );
        }
        if out.is_empty() {
            return Err(CliError::Usage("no formulas given; use --formula or --file".into()));
        }
        Ok(out)
    }

    fn parsed(&self) -> Result<Vec<(String, Formula)>> {
        self.sources()?
            .into_iter()
            .map(|s| match parse(&s) {
                Ok(f) => Ok((s, f)),
                Err(error) => Err(CliError::Parse {
                    source_text: s,
                    error,
                }),
            })
            .collect()
    }

    fn load_tables(&self) -> Result<Vec<Table>> {
        self.tables.iter().map(|p| load_table(p)).collect()
    }

    fn one_table(&self) -> Result<Table> {
        match self.tables.as_slice() {
            [path] => load_table(path),
            [] => Err(CliError::Usage("--table is required".into())),
            _ => Err(CliError::Usage("give exactly one --table".into())),
        }
    }
}

fn rewrite_context<'t>(tables: impl IntoIterator<Item = &'t Table>) -> RewriteContext {
    tables.into_iter().fold(RewriteContext::default(), |ctx, t| {
        ctx.with_table(t.name(), t.headers().map(String::from))
    })
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_parse(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let formulas = c.parsed()?;
    match c.format {
        Format::Text => {
            for (_, f) in &formulas {
                writeln!(out, "{}", format(f))?;
            }
        }
        Format::Json => {
            let items: Vec<_> = formulas
                .iter()
                .map(|(s, f)| {
                    json!({
                        "source": s,
                        "canonical": format(f),
                        "array": f.array,
                        "nesting_depth": f.expr.call_depth(),
                    })
                })
                .collect();
            write_json(out, &json!({"schema_version": 1, "formulas": items}))?;
        }
    }
    Ok(EXIT_OK)
}

fn check_row(table: &Table, row: Option<u32>) -> Result<()> {
    match row {
        Some(r) if r == 0 || r as usize > table.row_count() => Err(CliError::Usage(format!(
            "--row {r} is outside the table's {} data rows",
            table.row_count()
        ))),
        _ => Ok(()),
    }
}

fn context(table: &Table, row: Option<u32>, seed: u64) -> EvalContext<'_> {
    let ctx = EvalContext::new(table).with_seed(seed);
    match row {
        Some(r) => ctx.with_row(r).with_mode(Mode::Scalar),
        None => ctx.with_mode(Mode::Array),
    }
}

fn write_result(out: &mut dyn Write, r: &EvalResult) -> io::Result<()> {
    match r {
        EvalResult::Value(v) => writeln!(out, "{v}"),
        EvalResult::Range(view) => {
            for row in view.cells.chunks(view.cols.max(1)) {
                let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
                writeln!(out, "{}", cells.join("\t"))?;
            }
            Ok(())
        }
    }
}

fn cmd_eval(c: &Common, row: Option<u32>, out: &mut dyn Write) -> Result<i32> {
    let table = c.one_table()?;
    check_row(&table, row)?;
    let formulas = c.parsed()?;
    let ctx = context(&table, row, c.seed);
    let results: Vec<EvalResult> = formulas.iter().map(|(_, f)| evaluate(f, &ctx)).collect();
    match c.format {
        Format::Text => {
            for r in &results {
                write_result(out, r)?;
            }
        }
        Format::Json => {
            let items: Vec<_> = formulas
                .iter()
                .zip(&results)
                .map(|((s, _), r)| json!({"source": s, "result": result_json(r)}))
                .collect();
            write_json(
                out,
                &json!({
                    "schema_version": 1,
                    "table": table.name(),
                    "row": row,
                    "seed": c.seed,
                    "results": items,
                }),
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn write_diagnostics(out: &mut dyn Write, diagnostics: &[Diagnostic]) -> io::Result<()> {
    for d in diagnostics {
        let hint = if d.rewrite_available { " (rewrite available)" } else { "" };
        writeln!(out, "  {}..{} {}: {}{hint}", d.span.start, d.span.end, d.code, d.message)?;
    }
    Ok(())
}

fn cmd_lint(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let tables = c.load_tables()?;
    let ctx = rewrite_context(&tables);
    let formulas = c.parsed()?;
    let found: Vec<Vec<Diagnostic>> = formulas.iter().map(|(_, f)| lint_with(f, &ctx)).collect();
    match c.format {
        Format::Text => {
            for ((s, _), d) in formulas.iter().zip(&found) {
                if d.is_empty() {
                    writeln!(out, "{s}: ok")?;
                } else {
                    writeln!(out, "{s}:")?;
                    write_diagnostics(out, d)?;
                }
            }
        }
        Format::Json => {
            let items: Vec<_> = formulas
                .iter()
                .zip(&found)
                .map(|((s, _), d)| json!({"source": s, "diagnostics": d}))
                .collect();
            write_json(out, &json!({"schema_version": 1, "formulas": items}))?;
        }
    }
    Ok(if found.iter().all(Vec::is_empty) { EXIT_OK } else { EXIT_FINDINGS })
}

fn cmd_rewrite(c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let tables = c.load_tables()?;
    let ctx = rewrite_context(&tables);
    let formulas = c.parsed()?;
    let mut code = EXIT_OK;
    let mut items = Vec::new();
    for (s, f) in &formulas {
        match rewrite_with(f, &ctx) {
            Ok(r) => {
                if c.format == Format::Text {
                    writeln!(out, "{}", format(&r.formula))?;
                    for note in r.plans.iter().flat_map(|p| &p.notes) {
                        writeln!(err, "note: {note}")?;
                    }
                    for d in &r.diagnostics {
                        writeln!(err, "warning: {}", d)?;
                    }
                }
                items.push(json!({
                    "source": s,
                    "rewritten": format(&r.formula),
                    "plans": r.plans,
                    "diagnostics": r.diagnostics,
                }));
            }
            Err(e) => {
                code = EXIT_FINDINGS;
                if c.format == Format::Text {
                    writeln!(err, "{s}: {e}")?;
                }
                items.push(json!({
                    "source": s,
                    "rewritten": null,
                    "error": {"reason": e.reason, "diagnostic": e.diagnostic},
                }));
            }
        }
    }
    if c.format == Format::Json {
        write_json(out, &json!({"schema_version": 1, "formulas": items}))?;
    }
    Ok(code)
}

fn load_schemas(path: &Path) -> Result<Vec<DatasetSchema>> {
    let text = read_file(path)?;
    let bad = |e: serde_json::Error| CliError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(bad)
    } else {
        serde_json::from_str(&text).map(|s| vec![s]).map_err(bad)
    }
}

fn cmd_check(
    c: &Common,
    all_rules: bool,
    trials: usize,
    schema: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let report = if all_rules {
        if !c.formulas.is_empty() || c.file.is_some() {
            return Err(CliError::Usage("--all-rules takes no formulas".into()));
        }
        run_suite(c.seed, trials)
    } else {
        let schemas = match schema {
            Some(p) => load_schemas(p)?,
            None => pair_schemas(),
        };
        let formulas = c.parsed()?;
        let (original, rewritten, notes) = match formulas.as_slice() {
            [(_, f)] => {
                let headers = schemas
                    .first()
                    .map(|s| s.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>())
                    .unwrap_or_default();
                let ctx = RewriteContext::default().with_table(TABLE_NAME, headers);
                match rewrite_with(f, &ctx) {
                    Ok(r) => {
                        let notes: Vec<String> = r.plans.iter().flat_map(|p| p.notes.clone()).collect();
                        (f.clone(), r.formula, notes)
                    }
                    Err(e) => return Err(CliError::Usage(format!("{}: {e}", format(f)))),
                }
            }
            [(_, a), (_, b)] => (a.clone(), b.clone(), Vec::new()),
            _ => {
                return Err(CliError::Usage(
                    "check takes one formula (checked against its rewrite) or two".into(),
                ))
            }
        };
        let mut verdict = check_equivalence(&original, &rewritten, &schemas, trials, c.seed);
        let mut all_notes = notes;
        all_notes.append(&mut verdict.notes);
        verdict.notes = all_notes;
        SuiteReport {
            schema_version: 1,
            seed: c.seed,
            trials_per_schema: trials,
            passed: verdict.passed(),
            verdicts: vec![CaseVerdict {
                case: "pair",
                original: format(&original),
                rewritten: format(&rewritten),
                verdict,
            }],
        }
    };
    match c.format {
        Format::Json => write_json(out, &report)?,
        Format::Text => write_suite_text(out, &report)?,
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FINDINGS })
}

fn write_suite_text(out: &mut dyn Write, report: &SuiteReport) -> io::Result<()> {
    for v in &report.verdicts {
        let status = match v.verdict.status {
            crate::equivalence::Status::Pass => "PASS",
            crate::equivalence::Status::Fail => "FAIL",
            crate::equivalence::Status::NotRun => "SKIP",
        };
        let rule = v.verdict.rule_id.map(|r| r.to_string()).unwrap_or_else(|| "--".into());
        writeln!(
            out,
            "{status} {rule:<3} {:<18} {} -> {}",
            v.case, v.original, v.rewritten
        )?;
        for f in &v.verdict.failures {
            let row = f.row.map(|r| format!(" row {r}")).unwrap_or_default();
            writeln!(
                out,
                "     schema {} seed {}{row}: {} vs {}",
                f.schema,
                f.seed,
                result_json(&f.original),
                result_json(&f.rewritten)
            )?;
        }
        for n in &v.verdict.notes {
            writeln!(out, "     note: {n}")?;
        }
    }
    let passed = report.verdicts.iter().filter(|v| v.verdict.passed()).count();
    writeln!(
        out,
        "{passed}/{} cases passed ({} trials per schema, seed {})",
        report.verdicts.len(),
        report.trials_per_schema,
        report.seed
    )
}

fn cmd_report(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let tables = c.load_tables()?;
    let formulas: Vec<Formula> = if c.formulas.is_empty() && c.file.is_none() {
        Vec::new()
    } else {
        c.parsed()?.into_iter().map(|(_, f)| f).collect()
    };
    let refs: Vec<&Table> = tables.iter().collect();
    let r = report(&refs, &formulas);
    match c.format {
        Format::Json => write_json(out, &r)?,
        Format::Text => write!(out, "{r}")?,
    }
    Ok(EXIT_OK)
}

fn cmd_profile(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let tables = c.load_tables()?;
    if tables.is_empty() {
        return Err(CliError::Usage("--table is required".into()));
    }
    match c.format {
        Format::Json => {
            let items: Vec<_> = tables
                .iter()
                .map(|t| json!({"name": t.name(), "rows": t.row_count(), "columns": profile(t)}))
                .collect();
            write_json(out, &json!({"schema_version": 1, "tables": items}))?;
        }
        Format::Text => {
            for t in &tables {
                writeln!(out, "table {} ({} rows)", t.name(), t.row_count())?;
                for p in profile(t) {
                    let counts: Vec<String> =
                        p.counts.iter().map(|(k, n)| format!("{}={n}", k.as_str())).collect();
                    let range = match (p.min, p.max) {
                        (Some(lo), Some(hi)) => format!(" min {lo} max {hi}"),
                        _ => String::new(),
                    };
                    writeln!(
                        out,
                        "  {:<12} {:<8} {}{range}",
                        p.header,
                        p.dominant.as_str(),
                        counts.join(" ")
                    )?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

const REPL_HELP: &str = "\
:load FILE.csv   load a table
:row N           evaluate in scalar mode at data row N
:row             evaluate in array mode
:quit            leave
anything else is a formula";

fn cmd_repl(
    c: &Common,
    row: Option<u32>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let mut table = match c.tables.as_slice() {
        [] => Table::new(TABLE_NAME, Vec::new()).expect("empty table"),
        _ => c.one_table()?,
    };
    check_row(&table, row)?;
    let mut row = row;
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        let entry = line.trim();
        if entry.is_empty() {
            continue;
        }
        if let Some(cmd) = entry.strip_prefix(':') {
            let (name, arg) = cmd.split_once(' ').map_or((cmd, ""), |(n, a)| (n, a.trim()));
            match name {
                "quit" | "q" => break,
                "help" => writeln!(out, "{REPL_HELP}")?,
                "load" => match load_table(Path::new(arg)) {
                    Ok(t) => {
                        writeln!(out, "loaded {} ({} rows)", t.name(), t.row_count())?;
                        table = t;
                        row = None;
                    }
                    Err(e) => writeln!(err, "error: {e}")?,
                },
                "row" if arg.is_empty() => row = None,
                "row" => match arg.parse::<u32>() {
                    Ok(r) if check_row(&table, Some(r)).is_ok() => row = Some(r),
                    _ => writeln!(err, "error: no data row {arg}")?,
                },
                _ => writeln!(err, "error: unknown command :{name}")?,
            }
            continue;
        }
        let formula = match parse(entry) {
            Ok(f) => f,
            Err(e) => {
                writeln!(err, "error: {e}")?;
                continue;
            }
        };
        let ctx = context(&table, row, c.seed);
        write_result(out, &evaluate(&formula, &ctx))?;
        write_diagnostics(out, &lint_with(&formula, &rewrite_context([&table])))?;
        writeln!(out, "  level: {}", classify(&formula).level)?;
    }
    Ok(EXIT_OK)
}
