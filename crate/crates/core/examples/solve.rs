//! Compose reduced solutions with catalog ansätze and verify them by finite
//! differences.

use std::collections::BTreeMap;

use wavereduce::cli::{cmd_solve, RunOptions};

type Run<'a> = (&'a str, &'a str, &'a [(&'a str, &'a str)]);

fn main() -> wavereduce::Result<()> {
    let runs: [Run; 6] = [
        ("s3_ex1", "kink", &[("velocity", "0")]),
        ("s3_ex1", "kink", &[("velocity", "0.5")]),
        ("s3_ex1", "liouville", &[("f", "exp(t)"), ("g", "t^3 + 3*t")]),
        ("s3_ex2", "radial", &[("g", "sin(t)"), ("h", "exp(-t^2)")]),
        ("s3_ex1", "free-wave", &[("g", "cos(t)"), ("h", "t^2")]),
        ("stmt2_witness_N2", "witness", &[]),
    ];
    for (entry, solution, params) in runs {
        let params: BTreeMap<String, String> = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        println!("{}", cmd_solve(entry, solution, &params, &RunOptions::default())?.summary);
    }
    Ok(())
}
