//! Substitute an ansatz, verify the reduction conditions and assemble the
//! reduced equation. Reads a spec file when one is given.

use wavereduce::cli::{cmd_reduce, AnsatzSpec, RunOptions};

const DEFAULT: &str = include_str!("data/radial.toml");

fn main() -> wavereduce::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => AnsatzSpec::load(path.as_ref())?,
        None => AnsatzSpec::from_toml(DEFAULT)?,
    };
    let report = cmd_reduce(&spec, &RunOptions::default())?;
    println!("{}", report.summary);
    let conditions = &report.results["verification"]["conditions"];
    for c in conditions.as_array().into_iter().flatten() {
        println!("  {:<2} residual {:.2e}", c["condition"].as_str().unwrap_or("?"), c["max_residual"].as_f64().unwrap_or(f64::NAN));
    }
    Ok(())
}
