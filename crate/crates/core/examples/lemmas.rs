//! Hessian lemmas on the catalog solution pairs.

use wavereduce::cli::{cmd_lemmas, RunOptions};

fn main() -> wavereduce::Result<()> {
    for id in ["null_cone_pair", "linear_pair", "elliptic_linear_pair", "parabolic_linear_pair"] {
        let report = cmd_lemmas(id, &RunOptions::default())?;
        println!("{}", report.summary);
        for note in report.results["notes"].as_array().into_iter().flatten() {
            println!("  {}", note.as_str().unwrap_or_default());
        }
    }
    Ok(())
}
