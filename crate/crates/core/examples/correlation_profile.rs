//! Overlap of a rotated set with a fixed one, as an exact piecewise-linear function.

use raimi::circle_sets::CircleSet;
use raimi::correlation::{self, build_profile};
use raimi::rational::Rational;

fn main() -> raimi::error::Result<()> {
    let r = |s: &str| s.parse::<Rational>().unwrap();
    let e = CircleSet::normalize(&[(r("0"), r("1/3")), (r("1/2"), r("2/3"))])?;
    let f = CircleSet::interval(r("1/4"), r("1/2"))?;

    let profile = build_profile(&e, &f);
    println!("theta        f(theta)");
    for (theta, value) in profile.rows() {
        println!("{:<12} {value}", theta.to_string());
    }
    println!("integral     {} = |E||F| = {}", profile.trapezoid_integral(), e.measure() * f.measure());

    let (theta, max) = correlation::argmax(&e, &f)?;
    println!("argmax       {theta} (value {max})");
    let mid = correlation::strict_intermediate(&e, &f)?;
    println!("0 < f({mid}) = {} < |F|", correlation::correlation_value(&e, &f, &mid));
    Ok(())
}
