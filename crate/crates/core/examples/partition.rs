//! The geometric partition for a few (r, t).

use raimi::geometric_partition::GeometricPartition;

fn main() -> raimi::error::Result<()> {
    for (r, t) in [(2, 2), (3, 2), (3, 3)] {
        let p = GeometricPartition::build(r, t, None)?;
        println!("r = {r}, t = {t}, k = {}", p.k());
        for (i, (delta, part)) in p.deltas().iter().zip(p.parts()).enumerate() {
            println!("  E_{} = {part}  length {delta}", i + 1);
        }
    }
    Ok(())
}
