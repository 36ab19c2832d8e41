//! Parse, differentiate, simplify and evaluate an expression in x0..x3.

use wavereduce::expr::{parse, Assignment};

fn main() -> wavereduce::Result<()> {
    let e = parse("sqrt(x1^2 + x2^2 + x3^2) * exp(-x0/2)", 3).map_err(|err| wavereduce::Error::InvalidInput(err.to_string()))?;
    println!("e        = {e}");
    for mu in 0..4 {
        println!("∂e/∂x{mu}   = {}", e.differentiate(mu).simplify());
    }
    let p = Assignment::real(&[0.3, 1.0, -0.5, 2.0]);
    println!("e(p)     = {}", e.evaluate_real(&p).expect("p is regular"));
    println!("e.simplify().simplify() == e.simplify(): {}", e.simplify().simplify() == e.simplify());
    Ok(())
}
