//! Independent lattice check and exhaustive rotation search.

use raimi::circle_sets::CircleSet;
use raimi::oracle::{self, CANDIDATE_LIMIT};
use raimi::raimi_circle::{self, CircleCover};
use raimi::rational::Rational;

fn main() -> raimi::error::Result<()> {
    let r = |s: &str| s.parse::<Rational>().unwrap();
    let set = CircleSet::normalize(&[(r("0"), r("1/4")), (r("1/2"), r("5/6"))])?;
    println!("lattice measure at Q = 12: {}", oracle::grid_measure(&set, 12)?);

    let cover = CircleCover::new(vec![
        CircleSet::normalize(&[(r("0"), r("1/3")), (r("2/3"), r("5/6"))])?,
        CircleSet::interval(r("1/4"), r("3/4"))?,
        CircleSet::normalize(&[(r("5/6"), r("1/4"))])?,
    ])?;
    let cert = raimi_circle::solve(2, &cover, None)?;
    let report = oracle::exhaustive_witness(2, cert.k, &cover, &cert, CANDIDATE_LIMIT)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}
