//! Compatibility checks in all four cases, plus the affine test on λ/F.

use wavereduce::compatibility::{first_order_check, statement2_check, theorem2_build, theorem3_check, HyperbolicCompatData};
use wavereduce::expr::{parse_with, Expr, Symbols};

fn vw(text: &str) -> Expr {
    parse_with(text, &Symbols::vw()).expect("valid expression")
}

fn main() -> wavereduce::Result<()> {
    let null_cone = HyperbolicCompatData::new(vw("2"), vw("(w - v)^2"), vw("(w - v)^2"), 3)?;
    let report = null_cone.check(0);
    println!("null cone: {}  V = {}", report.verdict.as_str(), report.expressions["V"]);

    let built = theorem2_build(&vw("v*w"), &[vw("1"), vw("1")], &[vw("1")], 3, 0)?;
    println!("built pair: {}  h = {}", built.check(0).verdict.as_str(), built.h.display(&Symbols::vw()));

    let parabolic = theorem3_check(&vw("2/v"), &vw("v"), &vw("v^2"), 1, 3, 0);
    println!("parabolic: {} {:?}", parabolic.verdict.as_str(), parabolic.diagnostics);

    let first = first_order_check(&vw("1"), &vw("0"), 0);
    println!("first order: {} {:?}", first.verdict.as_str(), first.diagnostics);

    for text in ["1/(2*(u + 5))", "3/u", "u^2"] {
        let f = parse_with(text, &Symbols::u()).expect("valid expression");
        println!("F = {text}, λ = 1: {:?}", statement2_check(&f, 1.0, 0));
    }
    Ok(())
}
