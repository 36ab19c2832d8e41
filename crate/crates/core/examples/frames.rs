//! Generate random pseudo-orthonormal frames and validate them.

use wavereduce::minkowski::{random_frame, validate_frame, Frame};

fn main() -> wavereduce::Result<()> {
    for seed in 0..3 {
        let f = random_frame(3, seed)?;
        let r = validate_frame(&f);
        let worst = r.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
        println!("seed {seed}: pass = {}  worst residual {worst:.2e}", r.pass);
    }
    let bad = Frame::from_text("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 1 1")?;
    println!("skewed frame passes: {}", validate_frame(&bad).pass);
    Ok(())
}
