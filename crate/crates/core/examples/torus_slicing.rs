//! A cover of the 2-torus reduced to the circle by slicing.

use raimi::rational::Rational;
use raimi::torus::{self, slice_profile, BoxSet, TorusCover};

fn main() -> raimi::error::Result<()> {
    let r = |s: &str| s.parse::<Rational>().unwrap();
    let squares = BoxSet::disjointify(
        &[
            vec![(r("0"), r("1/2")), (r("0"), r("1/2"))],
            vec![(r("1/4"), r("3/4")), (r("1/4"), r("3/4"))],
        ],
        2,
    )?;
    println!("F_1 = {squares}  measure {}", squares.measure());

    let profile = slice_profile(&squares)?;
    for (lo, hi, value) in profile.cells() {
        println!("  slices over [{lo},{hi}) have measure {value}");
    }

    let cover = TorusCover::new(vec![squares.clone(), squares.complement()])?;
    let cert = torus::solve_torus(2, &cover, None)?;
    println!("selector per cell: {:?}", cert.selector);
    println!("m* = {}, theta = ({}, {})", cert.m_star, cert.theta[0], cert.theta[1]);
    for (i, (m, b)) in cert.measures.iter().zip(&cert.transfer_bounds).enumerate() {
        println!("  measure on E_{} × T = {m} >= {b}", i + 1);
    }
    println!("verified: {}", torus::verify_torus(&cert, &cover)?);
    Ok(())
}
