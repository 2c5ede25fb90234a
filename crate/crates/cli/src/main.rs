use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use logexp::{evaluate, evaluate_series, Coeff, Context, Error, Value};

mod json;

#[derive(Parser, Debug)]
#[command(name = "logexp", version, about = "Calculator for truncated log-exp transseries")]
struct Cli {
    /// Terms kept by every infinite expansion.
    #[arg(long, default_value_t = 30, global = true)]
    max_terms: usize,
    /// Deepest iterated logarithm allowed in a monomial.
    #[arg(long, default_value_t = 4, global = true)]
    log_depth: usize,
    /// Deepest nesting of exponentials allowed in a monomial.
    #[arg(long, default_value_t = 4, global = true)]
    exp_height: usize,
    #[arg(long, value_enum, default_value_t = CoeffMode::Rational, global = true)]
    coeff: CoeffMode,
    /// Float precision in bits.
    #[arg(long, default_value_t = 128, global = true)]
    prec: usize,
    /// Relative tolerance for float cancellation and corpus comparison.
    #[arg(long, default_value = "1e-30", global = true)]
    tol: String,
    /// Print machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CoeffMode {
    Rational,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one expression.
    Eval { expr: String },
    /// Read expressions from stdin, one per line.
    Repl,
    /// Check a file of `expr => expected` lines.
    TestCorpus { path: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_budget() {
        3
    } else {
        2
    }
}

fn context(cli: &Cli) -> Result<(Context, f64), Error> {
    let tol = evaluate_series(&cli.tol, &Context::default())
        .ok()
        .and_then(|s| match s.terms() {
            [] => Some(Coeff::zero()),
            [t] if t.mono.is_one() => Some(t.coeff.clone()),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidContext(format!("bad tolerance `{}`", cli.tol)))?;
    let mut ctx = Context::default()
        .with_max_terms(cli.max_terms)
        .with_log_depth(cli.log_depth)
        .with_exp_height(cli.exp_height)
        .with_zero_tol(tol.clone());
    if cli.coeff == CoeffMode::Float {
        ctx = ctx.with_precision(cli.prec);
    }
    ctx.validate()?;
    Ok((ctx, tol.to_f64()))
}

fn report(e: &Error, as_json: bool) {
    if as_json {
        println!("{}", json::error(e));
    }
    eprintln!("error[{}]: {e}", e.code());
}

fn print_value(v: &Value, as_json: bool) {
    if as_json {
        println!("{}", json::value(v));
    } else {
        println!("{v}");
    }
}

fn eval_cmd(expr: &str, ctx: &Context, as_json: bool) -> ExitCode {
    match evaluate(expr, ctx) {
        Ok(v) => {
            print_value(&v, as_json);
            ExitCode::SUCCESS
        }
        Err(e) => {
            report(&e, as_json);
            ExitCode::from(exit_code(&e))
        }
    }
}

fn repl(ctx: &Context, as_json: bool) -> ExitCode {
    let stdin = io::stdin();
    let prompt = !as_json && stdin.is_terminal();
    let mut out = io::stdout();
    loop {
        if prompt {
            print!("> ");
            let _ = out.flush();
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => return ExitCode::SUCCESS,
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if matches!(line, ":q" | ":quit" | "quit" | "exit") {
            return ExitCode::SUCCESS;
        }
        match evaluate(line, ctx) {
            Ok(v) => print_value(&v, as_json),
            Err(e) => report(&e, as_json),
        }
    }
}

enum Expected {
    Value(String),
    Error(String),
}

fn parse_case(line: &str) -> Option<(&str, Expected)> {
    let (lhs, rhs) = line.split_once("=>")?;
    let rhs = rhs.trim();
    let expected = match rhs.strip_prefix("error:").or_else(|| rhs.strip_prefix('!')) {
        Some(code) => Expected::Error(code.trim().to_string()),
        None => Expected::Value(rhs.to_string()),
    };
    Some((lhs.trim(), expected))
}

fn check(expr: &str, expected: &Expected, ctx: &Context, tol: f64) -> Result<(), String> {
    let got = evaluate(expr, ctx);
    match (got, expected) {
        (Err(e), Expected::Error(code)) if e.code() == code => Ok(()),
        (Err(e), _) => Err(format!("error[{}]: {e}", e.code())),
        (Ok(v), Expected::Error(code)) => Err(format!("expected {code}, got {v}")),
        (Ok(v), Expected::Value(want)) => {
            if v.to_string() == *want {
                return Ok(());
            }
            let (Value::Series(got) | Value::Abel(logexp::AbelResult { v: got, .. })) = &v else {
                return Err(format!("got {v}"));
            };
            let want_s = evaluate_series(want, ctx).map_err(|e| format!("bad expectation: {e}"))?;
            let ok = if ctx.is_float() {
                got.agrees_within(&want_s, tol.max(1e-300), ctx)
            } else {
                got.agrees_with(&want_s, ctx)
            };
            if ok {
                Ok(())
            } else {
                Err(format!("got {v}"))
            }
        }
    }
}

fn corpus(path: &PathBuf, ctx: &Context, tol: f64, as_json: bool) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let (mut pass, mut fail) = (0usize, 0usize);
    let mut rows = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split_once(" #").map_or(raw, |(l, _)| l).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((expr, expected)) = parse_case(line) else {
            eprintln!("{}:{}: missing `=>`", path.display(), no + 1);
            return ExitCode::from(2);
        };
        let outcome = check(expr, &expected, ctx, tol);
        match &outcome {
            Ok(()) => pass += 1,
            Err(_) => fail += 1,
        }
        if as_json {
            rows.push(json::case(no + 1, expr, &outcome));
        } else {
            match outcome {
                Ok(()) => println!("PASS {}: {expr}", no + 1),
                Err(why) => println!("FAIL {}: {expr}: {why}", no + 1),
            }
        }
    }
    if as_json {
        println!("{}", json::summary(rows, pass, fail));
    } else {
        println!("{pass} passed, {fail} failed");
    }
    if fail == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (ctx, tol) = match context(&cli) {
        Ok(c) => c,
        Err(e) => {
            report(&e, cli.json);
            return ExitCode::from(2);
        }
    };
    match &cli.cmd {
        Command::Eval { expr } => eval_cmd(expr, &ctx, cli.json),
        Command::Repl => repl(&ctx, cli.json),
        Command::TestCorpus { path } => corpus(path, &ctx, tol, cli.json),
    }
}
