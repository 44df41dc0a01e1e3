//! Read a cover file, solve it, and print the canonical certificate.
//!
//! cargo run --example cover_files -- crates/core/examples/data/torus_squares.json 2

use raimi::cli::{certificate_json, parse_cover, Certificate, Cover};
use raimi::{raimi_circle, torus};

fn main() -> raimi::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/circle_halves.json").into());
    let r: u32 = args.next().map_or(2, |s| s.parse().expect("r"));

    let parsed = parse_cover(&std::fs::read_to_string(&path)?)?;
    eprintln!("sets: {}", parsed.names.join(", "));
    let cert = match &parsed.cover {
        Cover::Circle(c) => Certificate::Circle(raimi_circle::solve(r, c, None)?.compact()),
        Cover::Torus(c) => Certificate::Torus(torus::solve_torus(r, c, None)?.compact()),
    };
    print!("{}", certificate_json(&cert)?);
    Ok(())
}
