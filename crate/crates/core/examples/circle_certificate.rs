//! Solve a two-set cover of the circle, then check the certificate.

use raimi::circle_sets::CircleSet;
use raimi::raimi_circle::{self, CircleCover};
use raimi::rational::Rational;

fn main() -> raimi::error::Result<()> {
    let half = Rational::new(1, 2);
    let cover = CircleCover::new(vec![
        CircleSet::interval(Rational::zero(), half.clone())?,
        CircleSet::interval(half, Rational::one())?,
    ])?;

    let cert = raimi_circle::solve(2, &cover, None)?;
    println!("m = {}, theta = {}", cert.m(), cert.theta);
    for (i, (measure, bound)) in cert.measures.iter().zip(&cert.bounds).enumerate() {
        println!("  |(F_m + theta) ∩ E_{}| = {measure} >= {bound}", i + 1);
    }
    for step in &cert.trace.steps {
        println!("  step s = {}: j = {}, c_j = {}, threshold {}", step.s, step.chosen_j, step.c_j, step.threshold);
    }
    println!("verified: {}", raimi_circle::verify(&cert, &cover)?);

    let mut forged = cert.clone();
    forged.theta = &forged.theta + &Rational::new(1, 2);
    println!("forged theta verified: {}", raimi_circle::verify(&forged, &cover)?);
    Ok(())
}
