//! Acceptance gate: one PASS/FAIL line per criterion, exact comparisons only.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use raimi::circle_sets::CircleSet;
use raimi::correlation;
use raimi::geometric_partition::{default_k, GeometricPartition};
use raimi::oracle::{self, CANDIDATE_LIMIT};
use raimi::raimi_circle::{self, CircleCover, RaimiCertificate};
use raimi::rational::Rational;
use raimi::torus::{self, slice_profile, TorusCertificate, TorusCover};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget_secs: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(budget_secs), || {
        format!("took {elapsed:.2?}, budget {budget_secs}s")
    })
}

/// Certificates produced along the way, re-checked by the oracle in criterion 8.
#[derive(Default)]
struct Produced {
    circle: Vec<(CircleCover, RaimiCertificate)>,
    torus: Vec<(TorusCover, TorusCertificate)>,
}

fn mean_value_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    for n in 0..200 {
        let e = common::circle_set(&mut rng, 6, 64);
        let f = common::circle_set(&mut rng, 6, 64);
        let got = correlation::build_profile(&e, &f).trapezoid_integral();
        let want = e.measure() * f.measure();
        ensure(got == want, || format!("pair {n}: integral {got} != {want} for E = {e}, F = {f}"))?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!("200 pairs in {:.2?}", start.elapsed()))
}

fn strict_intermediate_witness() -> Outcome {
    let mut rng = common::rng(2);
    let mut done = 0;
    while done < 200 {
        let e = common::circle_set(&mut rng, 6, 64);
        let f = common::circle_set(&mut rng, 6, 64);
        if !(e.measure().is_positive() && e.measure() < 1 && f.measure().is_positive()) {
            continue;
        }
        let theta = correlation::strict_intermediate(&e, &f).map_err(|err| err.to_string())?;
        let v = correlation::correlation_value(&e, &f, &theta);
        ensure(v.is_positive() && v < f.measure(), || {
            format!("f({theta}) = {v} not strictly inside (0, {}) for E = {e}, F = {f}", f.measure())
        })?;
        done += 1;
    }
    Ok("200 pairs".into())
}

fn partition_exactness() -> Outcome {
    let mut count = 0;
    for r in 2..=4 {
        for t in 2..=4 {
            let k0 = default_k(r, t).map_err(|e| e.to_string())?;
            for k in [k0, k0 + 7] {
                let p = GeometricPartition::build(r, t, Some(k)).map_err(|e| e.to_string())?;
                let total: Rational = p.deltas().iter().sum();
                ensure(total == 1, || format!("(r, t, k) = ({r}, {t}, {k}): sum {total}"))?;
                ensure(CircleSet::union_all(p.parts()) == CircleSet::full(), || {
                    format!("(r, t, k) = ({r}, {t}, {k}): parts miss part of the circle")
                })?;
                let measures: Rational = p.parts().iter().map(CircleSet::measure).sum();
                ensure(measures == 1, || format!("(r, t, k) = ({r}, {t}, {k}): parts overlap"))?;
                for i in 1..=r as usize {
                    let want = CircleSet::interval(p.anchor(i), p.anchor(i + 1)).unwrap();
                    ensure(p.part(i) == &want, || format!("E_{i} is not [u_i, u_(i+1))"))?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} partitions"))
}

fn circle_certificates(out: &mut Produced) -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(4);
    for n in 0..100 {
        let t = rng.random_range(2..=3);
        let cover = common::circle_cover(&mut rng, t, 32);
        for r in [2, 3] {
            let cert = raimi_circle::solve(r, &cover, None)
                .map_err(|e| format!("cover {n}, r = {r}: {e}"))?;
            ensure(cert.verified, || format!("cover {n}, r = {r}: not verified"))?;
            ensure(raimi_circle::verify(&cert, &cover).unwrap(), || {
                format!("cover {n}, r = {r}: verifier rejects")
            })?;
            let p = cert.partition().unwrap();
            let beta = p.beta();
            for s in 1..=r as usize {
                let e = if s < r as usize { s as i32 + 5 } else { r as i32 + 2 };
                let bound = (&beta * p.delta(s)).mul_pow2(-e);
                let got = &cert.measures[s - 1];
                ensure(*got >= bound && bound.is_positive(), || {
                    format!("cover {n}, r = {r}, s = {s}: {got} < {bound}")
                })?;
            }
            out.circle.push((cover.clone(), cert));
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("100 covers x r in {{2, 3}} in {:.2?}", start.elapsed()))
}

fn worked_instance(out: &mut Produced) -> Outcome {
    let cover = CircleCover::new(vec![
        CircleSet::interval(Rational::zero(), Rational::new(1, 2)).unwrap(),
        CircleSet::interval(Rational::new(1, 2), Rational::one()).unwrap(),
    ])
    .unwrap();
    let cert = raimi_circle::solve(2, &cover, None).map_err(|e| e.to_string())?;
    ensure(cert.m() == 1, || format!("m = {}", cert.m()))?;
    ensure(cert.theta == Rational::new(65, 131), || format!("theta = {}", cert.theta))?;
    let want = vec![Rational::new(65, 131), Rational::new(1, 262)];
    ensure(cert.measures == want, || format!("measures = {:?}", cert.measures))?;

    // Re-derived on the lattice, independently of the solver.
    let moved = cover.set(1).translate(&cert.theta);
    let p = cert.partition().unwrap();
    for (i, w) in want.iter().enumerate() {
        let g = oracle::grid_measure(&moved.intersect(p.part(i + 1)), 262).unwrap();
        ensure(&g == w, || format!("grid gives {g} for i = {}", i + 1))?;
    }
    let report = oracle::cross_validate_circle(&cert, &cover);
    ensure(report.agreement, || format!("oracle: {:?}", report.mismatches))?;
    out.circle.push((cover, cert));
    Ok("m = 1, theta = 65/131, measures (65/131, 1/262)".into())
}

fn torus_certificates(out: &mut Produced) -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(6);
    for n in 0..50 {
        let dim = rng.random_range(2..=3);
        let t = rng.random_range(2..=3);
        let cover = common::torus_cover(&mut rng, dim, t, 8);
        let cert = torus::solve_torus(2, &cover, None).map_err(|e| format!("cover {n}: {e}"))?;
        ensure(cert.verified, || format!("cover {n}: not verified"))?;
        ensure(torus::verify_torus(&cert, &cover).unwrap(), || format!("cover {n}: verifier rejects"))?;
        let t_q = Rational::from(t as i64);
        for (i, (got, circle)) in cert.measures.iter().zip(&cert.circle.measures).enumerate() {
            let floor = circle / &t_q;
            ensure(got >= &floor && floor.is_positive(), || {
                format!("cover {n}, i = {}: {got} < {floor}", i + 1)
            })?;
        }
        out.torus.push((cover, cert));
    }
    within(start.elapsed(), 120)?;
    Ok(format!("50 covers in {:.2?}", start.elapsed()))
}

fn fubini() -> Outcome {
    let mut rng = common::rng(7);
    for n in 0..100 {
        let dim = rng.random_range(2..=3);
        let set = common::box_set(&mut rng, dim, 5, 12);
        let profile = slice_profile(&set).unwrap();
        let sum: Rational = profile.cells().map(|(lo, hi, v)| (hi - lo) * v).sum();
        ensure(sum == set.measure(), || format!("set {n}: {sum} != {}", set.measure()))?;
        let den = set
            .boxes()
            .iter()
            .flatten()
            .flat_map(|(a, b)| [a.denom().clone(), b.denom().clone()])
            .fold(num_bigint::BigInt::from(1), |acc, d| num_integer::Integer::lcm(&acc, &d));
        let q = u64::try_from(den).unwrap();
        let grid = oracle::grid_measure(&set, q).unwrap();
        ensure(grid == sum, || format!("set {n}: lattice {grid} != {sum}"))?;
    }
    Ok("100 box sets".into())
}

fn oracle_equivalence(produced: &Produced) -> Outcome {
    let start = Instant::now();
    let mut searched = 0;
    for (n, (cover, cert)) in produced.circle.iter().enumerate() {
        let report = oracle::cross_validate_circle(cert, cover);
        ensure(report.agreement, || format!("circle cert {n}: {:?}", report.mismatches))?;
        let report = oracle::exhaustive_witness(cert.r, cert.k, cover, cert, CANDIDATE_LIMIT)
            .map_err(|e| format!("circle cert {n}: {e}"))?;
        ensure(report.agreement, || format!("circle cert {n} search: {:?}", report.mismatches))?;
        searched += 1;
    }
    for (n, (cover, cert)) in produced.torus.iter().enumerate() {
        let report = oracle::cross_validate_torus(cert, cover);
        ensure(report.agreement, || format!("torus cert {n}: {:?}", report.mismatches))?;
    }
    Ok(format!(
        "{searched} circle + {} torus certificates in {:.2?}",
        produced.torus.len(),
        start.elapsed()
    ))
}

fn rotation_invariance() -> Outcome {
    let mut rng = common::rng(9);
    for n in 0..50 {
        let t = rng.random_range(2..=3);
        let cover = common::circle_cover(&mut rng, t, 32);
        let r = rng.random_range(2..=3);
        let cert = raimi_circle::solve(r, &cover, None).map_err(|e| e.to_string())?;
        let p = cert.partition().unwrap();
        let alpha = common::point(&mut rng, 97);
        let rotated = cover.translate(&alpha);
        for m in 1..=t {
            let theta = &cert.theta;
            let lhs_set = rotated.set(m).translate(theta);
            let rhs_set = cover.set(m).translate(&(theta + &alpha));
            for (i, e) in p.parts().iter().enumerate() {
                let lhs = lhs_set.intersect(e).measure();
                let rhs = rhs_set.intersect(e).measure();
                ensure(lhs == rhs, || format!("instance {n}, m = {m}, i = {}: {lhs} != {rhs}", i + 1))?;
            }
        }
        // Solving the rotated cover still certifies.
        let moved = raimi_circle::solve(r, &rotated, None).map_err(|e| e.to_string())?;
        ensure(moved.verified, || format!("instance {n}: rotated cover not verified"))?;
    }
    Ok("50 instances".into())
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL  {name}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut produced = Produced::default();
    let results = [
        run("1 mean-value identity", mean_value_identity),
        run("2 strict intermediate witness", strict_intermediate_witness),
        run("3 partition exactness", partition_exactness),
        run("4 circle certificates", || circle_certificates(&mut produced)),
        run("5 worked instance", || worked_instance(&mut produced)),
        run("6 torus certificates", || torus_certificates(&mut produced)),
        run("7 slice integral equals measure", fubini),
        run("8 oracle equivalence", || oracle_equivalence(&produced)),
        run("9 rotation invariance", rotation_invariance),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
