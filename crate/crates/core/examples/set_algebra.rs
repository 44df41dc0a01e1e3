//! Arc unions on the circle: normal form, rotation, boolean operations.

use raimi::circle_sets::CircleSet;
use raimi::rational::Rational;

fn main() -> raimi::error::Result<()> {
    let r = |s: &str| s.parse::<Rational>().unwrap();

    // [3/4, 1/4) wraps through 0.
    let a = CircleSet::normalize(&[(r("3/4"), r("1/4")), (r("1/8"), r("1/2"))])?;
    let b = CircleSet::interval(r("1/3"), r("5/6"))?;
    println!("A         = {a}   |A| = {}", a.measure());
    println!("B         = {b}   |B| = {}", b.measure());
    println!("A + 1/2   = {}", a.translate(&r("1/2")));
    println!("A ∩ B     = {}", a.intersect(&b));
    println!("A ∪ B     = {}", a.union(&b));
    println!("A \\ B     = {}", a.difference(&b));
    println!("not A     = {}", a.complement());
    Ok(())
}
