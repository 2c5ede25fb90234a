//! `--json` rendering. Terms are `[coefficient, monomial]` pairs and
//! monomials are `{log_powers, exp_part}` records.

use logexp::{Error, Monomial, Series, Value};
use serde_json::{json, Value as Json};

fn monomial(m: &Monomial) -> Json {
    json!({
        "log_powers": m.log_powers().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "exp_part": m.exp_part().map(series),
    })
}

pub fn series(s: &Series) -> Json {
    json!({
        "text": s.to_string(),
        "terms": s.terms().iter().map(|t| json!([t.coeff.to_string(), monomial(&t.mono)])).collect::<Vec<_>>(),
        "cutoff": s.cutoff().map(monomial),
    })
}

pub fn value(v: &Value) -> Json {
    match v {
        Value::Series(s) => json!({
            "result": series(s),
            "cutoff": s.cutoff().map(|m| m.to_string()),
            "diagnostics": {},
        }),
        Value::Abel(a) => json!({
            "result": series(&a.v),
            "cutoff": a.v.cutoff().map(|m| m.to_string()),
            "diagnostics": {
                "depth": a.depth,
                "residual": series(&a.residual),
                "norm_constant": a.norm_constant.to_string(),
            },
        }),
        Value::Order(_) => json!({
            "result": v.to_string(),
            "cutoff": null,
            "diagnostics": {},
        }),
    }
}

pub fn error(e: &Error) -> Json {
    json!({
        "result": null,
        "cutoff": null,
        "diagnostics": { "error": e.code(), "message": e.to_string() },
    })
}

pub fn case(line: usize, expr: &str, outcome: &Result<(), String>) -> Json {
    json!({
        "line": line,
        "expr": expr,
        "pass": outcome.is_ok(),
        "detail": outcome.as_ref().err(),
    })
}

pub fn summary(cases: Vec<Json>, pass: usize, fail: usize) -> Json {
    json!({ "cases": cases, "passed": pass, "failed": fail })
}
