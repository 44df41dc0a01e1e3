mod common;

use rand::Rng;

use raimi::oracle::{self, CANDIDATE_LIMIT};
use raimi::raimi_circle;
use raimi::torus::{self, BoxSet, TorusCover};

#[test]
fn witness_agrees_on_random_covers() {
    let mut rng = common::rng(16);
    for n in 0..100 {
        let t = rng.random_range(2..=3);
        let cover = common::circle_cover(&mut rng, t, 16);
        let cert = raimi_circle::solve(2, &cover, None).unwrap();
        let report = oracle::exhaustive_witness(2, cert.k, &cover, &cert, CANDIDATE_LIMIT).unwrap();
        assert!(report.agreement, "cover {n}: {:?}", report.mismatches);
        assert!(report.best_min_measure.unwrap() >= report.solver_min_measure);
    }
}

#[test]
fn witness_beats_dense_sweep_on_tiny_covers() {
    let mut rng = common::rng(17);
    for _ in 0..10 {
        let cover = common::circle_cover(&mut rng, 2, 6);
        let cert = raimi_circle::solve(2, &cover, None).unwrap();
        let best = oracle::exhaustive_witness(2, cert.k, &cover, &cert, CANDIDATE_LIMIT)
            .unwrap()
            .best_min_measure
            .unwrap();
        assert!(best >= oracle::dense_sweep(2, cert.k, &cover, 4 * 131 * 7));
    }
}

#[test]
fn torus_measures_match_lattice() {
    let mut rng = common::rng(18);
    for _ in 0..40 {
        let dim = rng.random_range(2..=3);
        let a = common::box_set(&mut rng, dim, 4, 8);
        let b = common::box_set(&mut rng, dim, 4, 8);
        for s in [a.union(&b).unwrap(), a.intersect(&b).unwrap(), a.difference(&b).unwrap(), a.complement()] {
            assert_eq!(oracle::grid_measure(&s, 840).unwrap(), s.measure());
        }
    }
}

#[test]
fn three_dimensional_two_set_cover() {
    let mut rng = common::rng(19);
    for _ in 0..10 {
        let a = common::box_set(&mut rng, 3, 4, 8);
        let cover = TorusCover::new(vec![a.clone(), a.complement()]).unwrap();
        let cert = torus::solve_torus(2, &cover, None).unwrap();
        assert!(cert.verified);
        let report = oracle::cross_validate_torus(&cert, &cover);
        assert!(report.agreement, "{:?}", report.mismatches);
    }
    let full = TorusCover::new(vec![BoxSet::full(3), BoxSet::empty(3)]).unwrap();
    assert!(torus::solve_torus(2, &full, None).unwrap().verified);
}
