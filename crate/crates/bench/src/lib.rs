//! Inputs shared by the benchmarks.

use logexp::{evaluate_series, Context, Series};

/// Near-identity maps used for inversion timings.
pub const INVERSION_CASES: &[&str] = &[
    "x + 1/x",
    "x + log(x)",
    "x + exp(-x)",
    "x + log(x) + exp(-x)",
    "x + x^(1/2)",
];

pub fn series(text: &str, ctx: &Context) -> Series {
    evaluate_series(text, ctx).unwrap_or_else(|e| panic!("{text}: {e}"))
}
