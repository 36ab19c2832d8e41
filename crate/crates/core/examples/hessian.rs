//! d'Alembertian, mixed Hessian, principal-minor sums and the characteristic
//! polynomial at one point.

use wavereduce::expr::{parse, Assignment};
use wavereduce::minkowski::{characteristic_residual, dalembertian, minor_sums, HessianExprs};

fn main() {
    let v = parse("x0^2 - x1^2 + x0*x2 - x3^3/3", 3).expect("valid expression");
    let p = Assignment::real(&[0.4, -1.0, 0.7, 1.3]);
    let box_v = dalembertian(&v, 3).simplify();
    println!("□v = {box_v}");
    let m = HessianExprs::new(&v, 3).at(&p).expect("regular point");
    println!("tr M = {:.6}   □v(p) = {:.6}", m.trace().re, box_v.evaluate_real(&p).unwrap());
    let sums = minor_sums(&m);
    for k in 1..=4 {
        println!("M_{k} = {:.6}", sums.get(k).re);
    }
    println!("det = {:.6}", sums.det.re);
    println!("Hamilton-Cayley residual = {:.3e}", characteristic_residual(&m, &sums));
}
