//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raimi::circle_sets::CircleSet;
use raimi::raimi_circle::CircleCover;
use raimi::rational::Rational;
use raimi::torus::{AxisBox, BoxSet, TorusCover};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a / b` with `1 <= b <= max_den`, `0 <= a <= b`.
pub fn point(rng: &mut impl Rng, max_den: i64) -> Rational {
    let b = rng.random_range(1..=max_den);
    Rational::new(rng.random_range(0..=b), b)
}

/// A union of at most `max_intervals` arcs (wrapping allowed).
pub fn circle_set(rng: &mut impl Rng, max_intervals: usize, max_den: i64) -> CircleSet {
    let n = rng.random_range(0..=max_intervals);
    let mut pieces = Vec::new();
    while pieces.len() < n {
        let (a, b) = (point(rng, max_den), point(rng, max_den));
        if a.frac() != b.frac() {
            pieces.push((a, b));
        }
    }
    CircleSet::normalize(&pieces).expect("non-degenerate arcs")
}

/// Cyclically ordered cut points on the circle.
fn cuts(rng: &mut impl Rng, count: usize, max_den: i64) -> Vec<Rational> {
    let mut cuts: Vec<Rational> = Vec::new();
    while cuts.len() < count {
        let x = point(rng, max_den).frac();
        if !cuts.contains(&x) {
            cuts.push(x);
        }
    }
    cuts.sort();
    cuts
}

/// A cover of the circle by `t` sets of at most four arcs each: a random
/// partition into arcs, dealt out to the sets, plus optional overlapping
/// extras.
pub fn circle_cover(rng: &mut impl Rng, t: usize, max_den: i64) -> CircleCover {
    let arcs = rng.random_range(2..=(4 * t).min(8));
    let points = cuts(rng, arcs, max_den);
    let mut owners: Vec<usize> = (0..arcs).map(|i| i % t).collect();
    owners.shuffle(rng);
    let mut pieces: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); t];
    for (i, owner) in owners.iter().enumerate() {
        let lo = points[i].clone();
        let hi = points[(i + 1) % arcs].clone();
        pieces[*owner].push((lo, hi));
    }
    for set in pieces.iter_mut() {
        if set.len() < 4 && rng.random_bool(0.3) {
            let (a, b) = (point(rng, max_den), point(rng, max_den));
            if a.frac() != b.frac() {
                set.push((a, b));
            }
        }
    }
    let sets = pieces
        .iter()
        .map(|p| CircleSet::normalize(p).expect("valid arcs"))
        .collect();
    CircleCover::new(sets).expect("arcs tile the circle")
}

fn range(rng: &mut impl Rng, max_den: i64) -> (Rational, Rational) {
    loop {
        let (a, b) = (point(rng, max_den), point(rng, max_den));
        if a != b {
            return if a < b { (a, b) } else { (b, a) };
        }
    }
}

pub fn random_box(rng: &mut impl Rng, dim: usize, max_den: i64) -> AxisBox {
    (0..dim).map(|_| range(rng, max_den)).collect()
}

pub fn box_set(rng: &mut impl Rng, dim: usize, max_boxes: usize, max_den: i64) -> BoxSet {
    let n = rng.random_range(0..=max_boxes);
    let raw: Vec<AxisBox> = (0..n).map(|_| random_box(rng, dim, max_den)).collect();
    BoxSet::disjointify(&raw, dim).expect("valid boxes")
}

/// Guillotine cuts of the unit cube into `cells` boxes.
fn guillotine(rng: &mut impl Rng, dim: usize, cells: usize, max_den: i64) -> Vec<AxisBox> {
    let mut boxes: Vec<AxisBox> = vec![vec![(Rational::zero(), Rational::one()); dim]];
    let mut attempts = 0;
    while boxes.len() < cells && attempts < 100 {
        attempts += 1;
        let idx = rng.random_range(0..boxes.len());
        let axis = rng.random_range(0..dim);
        let cut = point(rng, max_den);
        let (lo, hi) = boxes[idx][axis].clone();
        if lo < cut && cut < hi {
            let mut right = boxes[idx].clone();
            boxes[idx][axis].1 = cut.clone();
            right[axis].0 = cut;
            boxes.push(right);
        }
    }
    boxes
}

/// A cover of `T^dim` by `t` sets of at most four boxes each.
pub fn torus_cover(rng: &mut impl Rng, dim: usize, t: usize, max_den: i64) -> TorusCover {
    let cells = rng.random_range(2..=(3 * t).min(8));
    let boxes = guillotine(rng, dim, cells, max_den);
    let mut owners: Vec<usize> = (0..boxes.len()).map(|i| i % t).collect();
    owners.shuffle(rng);
    let mut raw: Vec<Vec<AxisBox>> = vec![Vec::new(); t];
    for (b, owner) in boxes.into_iter().zip(owners) {
        raw[owner].push(b);
    }
    for set in raw.iter_mut() {
        if set.len() < 4 && rng.random_bool(0.3) {
            set.push(random_box(rng, dim, max_den));
        }
    }
    let sets = raw
        .iter()
        .map(|b| BoxSet::disjointify(b, dim).expect("valid boxes"))
        .collect();
    TorusCover::new(sets).expect("cells tile the torus")
}
