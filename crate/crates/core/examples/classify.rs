//! Classify the canonical constant profiles.

use wavereduce::expr::Assignment;
use wavereduce::reduction::{assemble_reduced_equation, classify_profile, ReductionProfile};

fn main() {
    let points: Vec<Assignment> = (0..5)
        .map(|i| Assignment::real(&[0.3 + i as f64, 1.1 - 0.4 * i as f64]))
        .collect();
    let profiles = [
        [1, 0, -1, 0, 0],
        [1, 0, 1, 0, 0],
        [-1, 0, -1, 0, 0],
        [0, 1, 0, 0, 0],
        [1, 0, 0, 0, 1],
        [-1, 0, 0, 0, 1],
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0],
    ];
    for values in profiles {
        let p = ReductionProfile::constant(values);
        let c = classify_profile(&p, &points);
        println!("{:<22} {:<14} {}", format!("{values:?}"), c.case.to_string(), assemble_reduced_equation(&p, None));
    }
}
