//! Independent checks of solver output.
//!
//! Nothing here calls into the set algebra of [`crate::circle_sets`] or
//! [`crate::torus`]: sets are read as raw lists of half-open boxes and every
//! measure is recomputed either by counting points of the lattice
//! `(Z/Q)^n ∩ [0,1)^n` or, for the witness search, from the elementary
//! overlap formula for two arcs. The geometric partition is rebuilt from its
//! defining sums as well.
//!
//! Lattice counts are run-compressed: along each axis the coordinates are cut
//! at every endpoint, membership is tested once per product cell, and the
//! lattice points of a cell `[x0, x1)` are counted as `ceil(Q x1) - ceil(Q x0)`.
//! This gives exactly the count a literal enumeration would.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circle_sets::CircleSet;
use crate::error::{Error, Result};
use crate::raimi_circle::{CircleCover, RaimiCertificate};
use crate::rational::Rational;
use crate::torus::{BoxSet, TorusCertificate, TorusCover};

/// Default cap on witness candidates.
pub const CANDIDATE_LIMIT: usize = 1_000_000;

type RawBox = Vec<(Rational, Rational)>;

/// Anything that can be read as a union of half-open boxes in `[0,1)^n`.
pub trait RawBoxes {
    fn dimension(&self) -> usize;
    fn raw_boxes(&self) -> Vec<RawBox>;
}

impl RawBoxes for CircleSet {
    fn dimension(&self) -> usize {
        1
    }

    fn raw_boxes(&self) -> Vec<RawBox> {
        self.intervals().iter().map(|iv| vec![iv.clone()]).collect()
    }
}

impl RawBoxes for BoxSet {
    fn dimension(&self) -> usize {
        self.dim()
    }

    fn raw_boxes(&self) -> Vec<RawBox> {
        self.boxes()
    }
}

fn in_boxes(boxes: &[RawBox], point: &[Rational]) -> bool {
    boxes
        .iter()
        .any(|b| b.iter().zip(point).all(|((lo, hi), x)| lo <= x && x < hi))
}

fn lattice_points_in(q: &BigInt, lo: &Rational, hi: &Rational) -> BigInt {
    let qr = Rational::from(q.clone());
    let up = |x: &Rational| (&qr * x).ceil().numer().clone();
    up(hi) - up(lo)
}

/// Number of lattice points `j / Q` (in each coordinate) satisfying `member`,
/// given per-axis cut points across which membership may change.
fn lattice_count(
    q: &BigInt,
    cuts: &[Vec<Rational>],
    member: &dyn Fn(&[Rational]) -> bool,
) -> BigInt {
    let axes: Vec<Vec<(Rational, Rational, BigInt)>> = cuts
        .iter()
        .map(|c| {
            let mut c: Vec<Rational> = c
                .iter()
                .filter(|x| !x.is_negative() && **x <= 1)
                .cloned()
                .chain([Rational::zero(), Rational::one()])
                .collect();
            c.sort();
            c.dedup();
            c.windows(2)
                .map(|w| (w[0].clone(), w[1].clone(), lattice_points_in(q, &w[0], &w[1])))
                .filter(|(_, _, n)| !n.is_zero())
                .collect()
        })
        .collect();

    fn walk(
        axes: &[Vec<(Rational, Rational, BigInt)>],
        corner: &mut Vec<Rational>,
        weight: BigInt,
        member: &dyn Fn(&[Rational]) -> bool,
    ) -> BigInt {
        match axes.split_first() {
            None => {
                if member(corner) {
                    weight
                } else {
                    BigInt::zero()
                }
            }
            Some((axis, rest)) => {
                let mut total = BigInt::zero();
                for (lo, _, n) in axis {
                    corner.push(lo.clone());
                    total += walk(rest, corner, &weight * n, member);
                    corner.pop();
                }
                total
            }
        }
    }
    walk(&axes, &mut Vec::new(), BigInt::one(), member)
}

fn grid_fraction(count: BigInt, q: &BigInt, dim: usize) -> Rational {
    Rational::from_bigs(count, num_traits::pow(q.clone(), dim))
}

fn lcm_all<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn require_multiple(q: &BigInt, values: &[&Rational]) -> Result<()> {
    if !q.is_positive() {
        return Err(Error::InvalidParameter(format!("Q = {q} must be positive")));
    }
    let need = lcm_all(values.iter().copied());
    if !(q % &need).is_zero() {
        return Err(Error::InvalidParameter(format!(
            "Q = {q} is not a multiple of the endpoint denominators (lcm {need})"
        )));
    }
    Ok(())
}

/// `|{lattice points in S}| / Q^n`, exact when `Q` is a common multiple of
/// the endpoint denominators of `S`.
pub fn grid_measure<S: RawBoxes + ?Sized>(set: &S, q: u64) -> Result<Rational> {
    let q = BigInt::from(q);
    let boxes = set.raw_boxes();
    let endpoints: Vec<&Rational> = boxes.iter().flatten().flat_map(|(a, b)| [a, b]).collect();
    require_multiple(&q, &endpoints)?;
    let dim = set.dimension();
    let cuts: Vec<Vec<Rational>> = (0..dim)
        .map(|a| {
            boxes
                .iter()
                .flat_map(|b| [b[a].0.clone(), b[a].1.clone()])
                .collect()
        })
        .collect();
    let count = lattice_count(&q, &cuts, &|p| in_boxes(&boxes, p));
    Ok(grid_fraction(count, &q, dim))
}

/// `Δ_1..Δ_r` and `u_1..u_(r+1)` rebuilt from `Δ_1 = 1 / Σ k^-i`,
/// `Δ_(i+1) = Δ_i / k`.
fn partition_from_sums(r: u32, k: u64) -> (Vec<Rational>, Vec<Rational>) {
    let kb = BigInt::from(k);
    let s: Rational = (0..r)
        .map(|i| Rational::from_bigs(BigInt::one(), num_traits::pow(kb.clone(), i as usize)))
        .sum();
    let k = Rational::from(kb);
    let mut deltas = vec![s.recip()];
    for i in 1..r as usize {
        let next = &deltas[i - 1] / &k;
        deltas.push(next);
    }
    let mut anchors = vec![Rational::zero()];
    for d in &deltas {
        let next = anchors.last().unwrap() + d;
        anchors.push(next);
    }
    (deltas, anchors)
}

/// `βΔ_s / 2^(s+5)` for `s < r` and `βΔ_r / 2^(r+2)`.
fn expected_bounds(t: u32, deltas: &[Rational]) -> Vec<Rational> {
    let r = deltas.len();
    let beta = Rational::new(1, t as i64);
    deltas
        .iter()
        .enumerate()
        .map(|(idx, d)| {
            let s = idx + 1;
            let e = if s < r { s + 5 } else { r + 2 };
            &beta * d * Rational::from_bigs(BigInt::one(), BigInt::one() << e)
        })
        .collect()
}

fn shift_back(x: &Rational, theta: &Rational) -> Rational {
    (x - theta).frac()
}

/// Report of an independent check. `best_*` are present when the exhaustive
/// witness search ran.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub digest: String,
    pub best_m: Option<usize>,
    pub best_theta: Option<Rational>,
    pub best_min_measure: Option<Rational>,
    pub candidates: usize,
    pub solver_m: usize,
    /// `θ` for circle certificates, `θ_1` for torus ones.
    pub solver_theta: Rational,
    pub solver_min_measure: Rational,
    /// Lattice modulus used, as a decimal string; absent when skipped.
    pub lattice_q: Option<String>,
    pub skipped: bool,
    pub mismatches: Vec<String>,
    pub agreement: bool,
}

impl OracleReport {
    fn finish(mut self) -> Self {
        if let Some(best) = &self.best_min_measure {
            if *best < self.solver_min_measure {
                self.mismatches.push(format!(
                    "search optimum {best} is below solver minimum {}",
                    self.solver_min_measure
                ));
            }
        }
        self.agreement = !self.skipped && self.mismatches.is_empty();
        self
    }
}

/// Lattice modulus for a check: the lcm of every denominator that enters a
/// lattice count or is compared with one. `None` when it does not fit in a
/// `u64`, which the reports treat as a skip.
fn pick_q<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<BigInt> {
    let q = lcm_all(values);
    q.to_u64().map(|_| q)
}

fn canonical_cover_value(dim: usize, sets: &[Vec<RawBox>]) -> serde_json::Value {
    let cover: Vec<serde_json::Value> = sets
        .iter()
        .map(|boxes| {
            let boxes: Vec<Vec<[String; 2]>> = boxes
                .iter()
                .map(|b| b.iter().map(|(lo, hi)| [lo.to_string(), hi.to_string()]).collect())
                .collect();
            serde_json::json!({ "boxes": boxes })
        })
        .collect();
    serde_json::json!({ "dim": dim, "cover": cover })
}

/// SHA-256 of the canonical JSON of a cover (sorted keys, normalized boxes).
pub fn instance_digest(dim: usize, sets: &[Vec<RawBox>]) -> String {
    let text = serde_json::to_string(&canonical_cover_value(dim, sets)).expect("json value");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn circle_raw(cover: &CircleCover) -> Vec<Vec<RawBox>> {
    cover.sets().iter().map(RawBoxes::raw_boxes).collect()
}

fn torus_raw(cover: &TorusCover) -> Vec<Vec<RawBox>> {
    cover.sets().iter().map(RawBoxes::raw_boxes).collect()
}

/// `|(F + θ) ∩ [c, d)|` from the overlap of shifted intervals.
fn overlap(f: &[RawBox], theta: &Rational, c: &Rational, d: &Rational) -> Rational {
    let mut total = Rational::zero();
    for b in f {
        let (a, bb) = &b[0];
        for wrap in [-1i64, 0, 1] {
            let lo = (a + theta + Rational::from(wrap)).max(c.clone());
            let hi = (bb + theta + Rational::from(wrap)).min(d.clone());
            if lo < hi {
                total += &(hi - lo);
            }
        }
    }
    total
}

fn min_over_parts(f: &[RawBox], theta: &Rational, anchors: &[Rational]) -> Rational {
    anchors
        .windows(2)
        .map(|w| overlap(f, theta, &w[0], &w[1]))
        .min()
        .expect("r >= 1")
}

/// Candidate rotations for one `F`: every breakpoint of every
/// `g_i(θ) = |(F + θ) ∩ E_i|`, the midpoint of each arc between consecutive
/// breakpoints, and every crossing of two `g_i` that are affine on that arc.
fn candidates_for(f: &[RawBox], anchors: &[Rational], limit: usize) -> Result<Vec<Rational>> {
    let mut breaks: Vec<Rational> = vec![Rational::zero()];
    for b in f {
        for e in anchors {
            breaks.push((e - &b[0].0).frac());
            breaks.push((e - &b[0].1).frac());
        }
    }
    breaks.sort();
    breaks.dedup();
    let r = anchors.len() - 1;
    let estimate = breaks.len() * (2 + r * (r - 1) / 2);
    if estimate > limit {
        return Err(Error::CandidateLimit { count: estimate, limit });
    }
    let mut out = breaks.clone();
    for (idx, x0) in breaks.iter().enumerate() {
        let x1 = breaks.get(idx + 1).cloned().unwrap_or_else(Rational::one);
        let len = &x1 - x0;
        out.push(x0 + &len * Rational::new(1, 2));
        let v0: Vec<Rational> = anchors.windows(2).map(|w| overlap(f, x0, &w[0], &w[1])).collect();
        let v1: Vec<Rational> = anchors.windows(2).map(|w| overlap(f, &x1, &w[0], &w[1])).collect();
        for i in 0..r {
            for j in i + 1..r {
                let gap0 = &v0[i] - &v0[j];
                let gap1 = &v1[i] - &v1[j];
                let denom = &gap0 - &gap1;
                if denom.is_zero() {
                    continue;
                }
                let frac = &gap0 / &denom;
                if frac.is_positive() && frac < 1 {
                    out.push(x0 + &len * frac);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn circle_measure_mismatches(
    cert: &RaimiCertificate,
    cover: &CircleCover,
    anchors: &[Rational],
    deltas: &[Rational],
    mismatches: &mut Vec<String>,
) -> Option<BigInt> {
    let m = cert.trace.m;
    if m == 0 || m > cover.sets().len() || cert.measures.len() != deltas.len() {
        mismatches.push("certificate does not match the instance shape".into());
        return None;
    }
    let f = cover.sets()[m - 1].raw_boxes();
    let mut values: Vec<&Rational> = f.iter().flatten().flat_map(|(a, b)| [a, b]).collect();
    values.extend(anchors);
    values.push(&cert.theta);
    values.extend(&cert.measures);
    let q = pick_q(values)?;

    let beta = Rational::new(1, cover.sets().len() as i64);
    let f_measure = grid_fraction(
        lattice_count(&q, &[f.iter().flat_map(|b| [b[0].0.clone(), b[0].1.clone()]).collect()], &|p| {
            in_boxes(&f, p)
        }),
        &q,
        1,
    );
    if f_measure < beta {
        mismatches.push(format!("|F_{m}| = {f_measure} is below 1/t = {beta}"));
    }

    let shifted_cuts: Vec<Rational> = f
        .iter()
        .flat_map(|b| [(&b[0].0 + &cert.theta).frac(), (&b[0].1 + &cert.theta).frac()])
        .collect();
    let expected = expected_bounds(cover.sets().len() as u32, deltas);
    for i in 0..deltas.len() {
        let (c, d) = (&anchors[i], &anchors[i + 1]);
        let mut cuts = shifted_cuts.clone();
        cuts.extend([c.clone(), d.clone()]);
        let count = lattice_count(&q, &[cuts], &|p| {
            c <= &p[0] && p[0] < *d && in_boxes(&f, &[shift_back(&p[0], &cert.theta)])
        });
        let measure = grid_fraction(count, &q, 1);
        if measure != cert.measures[i] {
            mismatches.push(format!(
                "measure at i = {}: stored {}, lattice count gives {measure}",
                i + 1,
                cert.measures[i]
            ));
        }
        if cert.bounds.get(i) != Some(&expected[i]) {
            mismatches.push(format!("bound at i = {} differs from {}", i + 1, expected[i]));
        }
        if !expected[i].is_positive() || measure < expected[i] {
            mismatches.push(format!(
                "measure at i = {} is {measure}, below bound {}",
                i + 1,
                expected[i]
            ));
        }
    }
    Some(q)
}

fn circle_report(cert: &RaimiCertificate, cover: &CircleCover) -> OracleReport {
    let (deltas, anchors) = partition_from_sums(cert.r, cert.k);
    let mut mismatches = Vec::new();
    if cert.t as usize != cover.sets().len() {
        mismatches.push(format!("certificate t = {} but cover has {} sets", cert.t, cover.sets().len()));
    }
    let q = circle_measure_mismatches(cert, cover, &anchors, &deltas, &mut mismatches);
    let skipped = q.is_none() && mismatches.is_empty();
    if skipped {
        mismatches.push("lattice modulus exceeds the oracle limit; check skipped".into());
    }
    OracleReport {
        digest: instance_digest(1, &circle_raw(cover)),
        best_m: None,
        best_theta: None,
        best_min_measure: None,
        candidates: 0,
        solver_m: cert.trace.m,
        solver_theta: cert.theta.clone(),
        solver_min_measure: cert.measures.iter().min().cloned().unwrap_or_else(Rational::zero),
        lattice_q: q.map(|q| q.to_string()),
        skipped,
        mismatches,
        agreement: false,
    }
}

/// Searches every `(m, θ)` candidate for the largest `min_i |(F_m + θ) ∩ E_i|`
/// and cross-checks `cert` against the lattice.
///
/// Ties go to the smallest `θ`, then the smallest `m`.
pub fn exhaustive_witness(
    r: u32,
    k: u64,
    cover: &CircleCover,
    cert: &RaimiCertificate,
    limit: usize,
) -> Result<OracleReport> {
    let (_, anchors) = partition_from_sums(r, k);
    let mut best: Option<(Rational, Rational, usize)> = None;
    let mut total = 0usize;
    for (idx, set) in cover.sets().iter().enumerate() {
        let f = set.raw_boxes();
        let cands = candidates_for(&f, &anchors, limit.saturating_sub(total))?;
        total += cands.len();
        for theta in cands {
            let v = min_over_parts(&f, &theta, &anchors);
            let better = match &best {
                None => true,
                Some((bv, bt, _)) => v > *bv || (v == *bv && theta < *bt),
            };
            if better {
                best = Some((v, theta, idx + 1));
            }
        }
    }
    let (best_value, best_theta, best_m) = best.expect("a cover has at least two sets");
    let mut report = circle_report(cert, cover);
    if cert.r != r || cert.k != k {
        report.mismatches.push(format!(
            "certificate (r, k) = ({}, {}) differs from search (r, k) = ({r}, {k})",
            cert.r, cert.k
        ));
    }
    report.best_m = Some(best_m);
    report.best_theta = Some(best_theta);
    report.best_min_measure = Some(best_value);
    report.candidates = total;
    Ok(report.finish())
}

/// The best `min_i |(F_m + θ) ∩ E_i|` over `θ = j / n`, `0 <= j < n`; a
/// brute-force reference for the candidate search.
pub fn dense_sweep(r: u32, k: u64, cover: &CircleCover, n: u64) -> Rational {
    let (_, anchors) = partition_from_sums(r, k);
    let mut best = Rational::zero();
    for set in cover.sets() {
        let f = set.raw_boxes();
        for j in 0..n {
            let v = min_over_parts(&f, &Rational::new(j as i64, n as i64), &anchors);
            best = best.max(v);
        }
    }
    best
}

/// Recomputes a circle certificate's measures on the lattice.
pub fn cross_validate_circle(cert: &RaimiCertificate, cover: &CircleCover) -> OracleReport {
    circle_report(cert, cover).finish()
}

fn axis_cuts(boxes: &[RawBox], dim: usize) -> Vec<Vec<Rational>> {
    (0..dim)
        .map(|a| boxes.iter().flat_map(|b| [b[a].0.clone(), b[a].1.clone()]).collect())
        .collect()
}

/// Recomputes a torus certificate: the least-index selector on every slice
/// cell, the circle measures of `C_(m*)`, the lifted measures, and the
/// transfer bounds, all by lattice counting.
pub fn cross_validate_torus(cert: &TorusCertificate, cover: &TorusCover) -> OracleReport {
    let dim = cover.dim();
    let raw = torus_raw(cover);
    let t = raw.len();
    let (deltas, anchors) = partition_from_sums(cert.circle.r, cert.circle.k);
    let mut mismatches = Vec::new();

    let mut values: Vec<&Rational> = raw.iter().flatten().flatten().flat_map(|(a, b)| [a, b]).collect();
    values.extend(&anchors);
    values.extend(&cert.theta);
    values.extend(&cert.measures);
    values.extend(&cert.circle.measures);
    values.extend(&cert.slice_breakpoints);
    let q = pick_q(values);

    let base = OracleReport {
        digest: instance_digest(dim, &raw),
        best_m: None,
        best_theta: None,
        best_min_measure: None,
        candidates: 0,
        solver_m: cert.m_star,
        solver_theta: cert.theta.first().cloned().unwrap_or_else(Rational::zero),
        solver_min_measure: cert.min_measure(),
        lattice_q: q.as_ref().map(|q| q.to_string()),
        skipped: q.is_none(),
        mismatches: Vec::new(),
        agreement: false,
    };
    let Some(q) = q else {
        return OracleReport {
            mismatches: vec!["lattice modulus exceeds the oracle limit; check skipped".into()],
            ..base
        }
        .finish();
    };
    let shape_ok = cert.m_star >= 1
        && cert.m_star <= t
        && cert.theta.len() == dim
        && cert.measures.len() == deltas.len()
        && cert.transfer_bounds.len() == deltas.len()
        && cert.circle.measures.len() == deltas.len()
        && cert.selector.len() == cert.slice_breakpoints.len()
        && cert.slice_breakpoints.first().is_some_and(|b| b.is_zero());
    if !shape_ok {
        mismatches.push("certificate does not match the instance shape".into());
        return OracleReport { mismatches, ..base }.finish();
    }

    // Selector: on each cell, fiber measures by lattice counting in n - 1 dims.
    let beta = Rational::new(1, t as i64);
    for (cell, x) in cert.slice_breakpoints.iter().enumerate() {
        let mut chosen = None;
        for (m, boxes) in raw.iter().enumerate() {
            let fiber: Vec<RawBox> = boxes
                .iter()
                .filter(|b| b[0].0 <= *x && *x < b[0].1)
                .map(|b| b[1..].to_vec())
                .collect();
            let count = lattice_count(&q, &axis_cuts(&fiber, dim - 1), &|p| in_boxes(&fiber, p));
            if grid_fraction(count, &q, dim - 1) >= beta {
                chosen = Some(m + 1);
                break;
            }
        }
        if chosen != Some(cert.selector[cell]) {
            mismatches.push(format!(
                "selector on cell {} (from {x}): stored {}, recomputed {chosen:?}",
                cell + 1,
                cert.selector[cell]
            ));
        }
    }

    // C_(m*) as the union of its selector cells.
    let c_m: Vec<RawBox> = cert
        .slice_breakpoints
        .iter()
        .enumerate()
        .filter(|(cell, _)| cert.selector[*cell] == cert.m_star)
        .map(|(cell, x)| {
            let hi = cert
                .slice_breakpoints
                .get(cell + 1)
                .cloned()
                .unwrap_or_else(Rational::one);
            vec![(x.clone(), hi)]
        })
        .collect();

    let theta = &cert.theta;
    let f = &raw[cert.m_star - 1];
    let t_q = Rational::from(t as i64);
    if theta.iter().skip(1).any(|x| !x.is_zero()) {
        mismatches.push("theta has a non-zero coordinate past the first".into());
    }
    for i in 0..deltas.len() {
        let (c, d) = (&anchors[i], &anchors[i + 1]);

        let mut cuts: Vec<Rational> = c_m
            .iter()
            .flat_map(|b| [(&b[0].0 + &theta[0]).frac(), (&b[0].1 + &theta[0]).frac()])
            .collect();
        cuts.extend([c.clone(), d.clone()]);
        let circle = grid_fraction(
            lattice_count(&q, &[cuts], &|p| {
                c <= &p[0] && p[0] < *d && in_boxes(&c_m, &[shift_back(&p[0], &theta[0])])
            }),
            &q,
            1,
        );
        if circle != cert.circle.measures[i] {
            mismatches.push(format!(
                "circle measure at i = {}: stored {}, lattice count gives {circle}",
                i + 1,
                cert.circle.measures[i]
            ));
        }

        let mut cuts = axis_cuts(f, dim);
        for (a, axis) in cuts.iter_mut().enumerate() {
            let shifted: Vec<Rational> = axis.iter().map(|x| (x + &theta[a]).frac()).collect();
            *axis = shifted;
        }
        cuts[0].extend([c.clone(), d.clone()]);
        let lifted = grid_fraction(
            lattice_count(&q, &cuts, &|p| {
                if !(c <= &p[0] && p[0] < *d) {
                    return false;
                }
                let back: Vec<Rational> = p.iter().zip(theta).map(|(x, th)| shift_back(x, th)).collect();
                in_boxes(f, &back)
            }),
            &q,
            dim,
        );
        if lifted != cert.measures[i] {
            mismatches.push(format!(
                "measure at i = {}: stored {}, lattice count gives {lifted}",
                i + 1,
                cert.measures[i]
            ));
        }
        let transfer = &circle / &t_q;
        if cert.transfer_bounds[i] != transfer {
            mismatches.push(format!("transfer bound at i = {} differs from {transfer}", i + 1));
        }
        if !transfer.is_positive() || lifted < transfer {
            mismatches.push(format!(
                "measure at i = {} is {lifted}, below transfer bound {transfer}",
                i + 1
            ));
        }
    }
    OracleReport { mismatches, ..base }.finish()
}
