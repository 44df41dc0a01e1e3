//! Rotation construction on the circle.
//!
//! Given a cover `F_1, ..., F_t` of the circle, [`solve`] picks a part `F_m`
//! with `|F_m| >= 1/t` and builds rotations `θ_1, ..., θ_r` so that the total
//! rotation `φ_r = θ_1 + ... + θ_r` moves `F_m` to meet every part `E_i` of
//! the [`GeometricPartition`] in positive measure:
//!
//! 1. `θ_1` maximises `|(F_m + θ) ∩ E_1|`, which is at least `|E_1| |F_m|`.
//! 2. For `s = 1, ..., r-1`, cut `E_s` into `k` equal pieces `J_(1,s), ...,
//!    J_(k,s)`, take the rightmost piece whose mass in `F_m + φ_s` reaches
//!    `τ_s = β Δ_(s+1) / 2^(s+3)`, and rotate it exactly onto `E_(s+1)`.
//!
//! Every inequality the construction relies on is asserted as it runs, and the
//! result is packaged as a [`RaimiCertificate`] that [`verify`] re-checks
//! from the cover alone.
//!
//! Indices `m`, `s`, `i` and `j` are 1-based throughout, as in `E_1, ..., E_r`.

use serde::{Deserialize, Serialize};

use crate::circle_sets::CircleSet;
use crate::correlation;
use crate::error::{Error, Result};
use crate::geometric_partition::GeometricPartition;
use crate::rational::Rational;

/// A finite cover `F_1, ..., F_t` of the circle. Parts may overlap or be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleCover {
    sets: Vec<CircleSet>,
}

impl CircleCover {
    /// Requires `t >= 2` and a union of full measure.
    pub fn new(sets: Vec<CircleSet>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a cover needs t >= 2 parts, got {}",
                sets.len()
            )));
        }
        let union = CircleSet::union_all(&sets);
        if !union.is_full() {
            return Err(Error::NotACover {
                measure: union.measure().to_string(),
                gap: union.complement().to_string(),
            });
        }
        Ok(CircleCover { sets })
    }

    pub fn t(&self) -> u32 {
        self.sets.len() as u32
    }

    pub fn sets(&self) -> &[CircleSet] {
        &self.sets
    }

    /// `F_m`, 1-based.
    pub fn set(&self, m: usize) -> &CircleSet {
        &self.sets[m - 1]
    }

    /// Rotates every part by `alpha`.
    pub fn translate(&self, alpha: &Rational) -> CircleCover {
        CircleCover {
            sets: self.sets.iter().map(|s| s.translate(alpha)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub s: u32,
    /// `|(F_m + φ_s) ∩ J_(i,s)|` for `i = 1..=k`; dropped from compact output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subinterval_masses: Option<Vec<Rational>>,
    pub threshold: Rational,
    pub chosen_j: u64,
    pub c_j: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationTrace {
    pub m: usize,
    pub beta: Rational,
    pub thetas: Vec<Rational>,
    pub phis: Vec<Rational>,
    pub steps: Vec<StepRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaimiCertificate {
    pub r: u32,
    pub t: u32,
    pub k: u64,
    /// Total rotation `φ_r`.
    pub theta: Rational,
    /// `|(F_m + θ) ∩ E_i|` for `i = 1..=r`.
    pub measures: Vec<Rational>,
    pub bounds: Vec<Rational>,
    #[serde(flatten)]
    pub trace: RotationTrace,
    pub verified: bool,
}

impl RaimiCertificate {
    pub fn m(&self) -> usize {
        self.trace.m
    }

    pub fn partition(&self) -> Result<GeometricPartition> {
        GeometricPartition::build(self.r, self.t, Some(self.k))
    }

    pub fn min_measure(&self) -> Rational {
        self.measures.iter().min().cloned().unwrap_or_else(Rational::zero)
    }

    /// Copy without the per-step subinterval masses.
    pub fn compact(&self) -> RaimiCertificate {
        let mut out = self.clone();
        for step in &mut out.trace.steps {
            step.subinterval_masses = None;
        }
        out
    }
}

/// Smallest index of maximal measure, with `β = 1/t`.
pub fn select_m(cover: &CircleCover) -> Result<(usize, Rational)> {
    let union = CircleSet::union_all(cover.sets());
    if !union.is_full() {
        return Err(Error::NotACover {
            measure: union.measure().to_string(),
            gap: union.complement().to_string(),
        });
    }
    let measures: Vec<Rational> = cover.sets().iter().map(CircleSet::measure).collect();
    let mut m = 0;
    for (idx, v) in measures.iter().enumerate() {
        if *v > measures[m] {
            m = idx;
        }
    }
    let beta = Rational::new(1, cover.t() as i64);
    if measures[m] < beta {
        return Err(Error::invariant(format!(
            "largest part has measure {} < 1/t",
            measures[m]
        )));
    }
    Ok((m + 1, beta))
}

/// `θ_1`: the smallest maximiser of `|(F_m + θ) ∩ E_1|`.
pub fn initial_rotation(partition: &GeometricPartition, f_m: &CircleSet) -> Result<Rational> {
    let beta = partition.beta();
    if f_m.measure() < beta {
        return Err(Error::Precondition(format!(
            "|F_m| = {} is below beta = {beta}",
            f_m.measure()
        )));
    }
    let (theta, _) = correlation::argmax(partition.part(1), f_m)?;
    Ok(theta)
}

/// Masses of `set` on the `count` cells `[start + (i-1)w, start + iw)`.
fn masses_on_grid(set: &CircleSet, start: &Rational, width: &Rational, count: u64) -> Vec<Rational> {
    let mut masses = vec![Rational::zero(); count as usize];
    let end = start + &(Rational::from(count as i64) * width);
    for (lo, hi) in set.intervals() {
        let lo = std::cmp::max(lo, start).clone();
        let hi = std::cmp::min(hi, &end).clone();
        if lo >= hi {
            continue;
        }
        let first = ((&lo - start) / width).floor();
        let mut cell = u64::try_from(first.numer()).unwrap_or(0);
        while cell < count {
            let cell_lo = start + &(Rational::from(cell as i64) * width);
            if cell_lo >= hi {
                break;
            }
            let cell_hi = &cell_lo + width;
            let a = std::cmp::max(&cell_lo, &lo);
            let b = std::cmp::min(&cell_hi, &hi);
            if a < b {
                masses[cell as usize] += &(b - a);
            }
            cell += 1;
        }
    }
    masses
}

/// `β Δ_s / 2^(s+2)`: lower bound on `|(F_m + φ_s) ∩ E_s|` before step `s`.
pub fn loop_bound(partition: &GeometricPartition, s: usize) -> Rational {
    (partition.beta() * partition.delta(s)).mul_pow2(-(s as i32 + 2))
}

/// `β Δ_s / 2^(s+4)`: mass of `E_s` retained after rotating by `θ_(s+1)`.
pub fn retention_bound(partition: &GeometricPartition, s: usize) -> Rational {
    (partition.beta() * partition.delta(s)).mul_pow2(-(s as i32 + 4))
}

/// `τ_s = β Δ_(s+1) / 2^(s+3)`.
pub fn step_threshold(partition: &GeometricPartition, s: usize) -> Rational {
    (partition.beta() * partition.delta(s + 1)).mul_pow2(-(s as i32 + 3))
}

/// Certified lower bounds on the final measures: `β Δ_s / 2^(s+5)` for
/// `s < r` and `β Δ_r / 2^(r+2)` for the last part.
pub fn final_bounds(partition: &GeometricPartition) -> Vec<Rational> {
    let r = partition.r() as usize;
    (1..=r)
        .map(|s| {
            let exp = if s < r { s + 5 } else { r + 2 };
            (partition.beta() * partition.delta(s)).mul_pow2(-(exp as i32))
        })
        .collect()
}

fn overlap(f_m: &CircleSet, phi: &Rational, part: &CircleSet) -> Rational {
    correlation::correlation_value(part, f_m, phi)
}

/// One refinement step: from `φ_s`, choose `θ_(s+1)`.
pub fn refine_step(
    partition: &GeometricPartition,
    f_m: &CircleSet,
    s: usize,
    phi_s: &Rational,
) -> Result<(Rational, StepRecord)> {
    let r = partition.r() as usize;
    if s == 0 || s >= r {
        return Err(Error::Precondition(format!("step s = {s} outside 1..{r}")));
    }
    let on_part = f_m.translate(phi_s).intersect(partition.part(s));
    let entry = on_part.measure();
    let needed = loop_bound(partition, s);
    if entry < needed {
        return Err(Error::invariant(format!(
            "entering step {s}: |(F_m + φ_s) ∩ E_s| = {entry} < {needed}"
        )));
    }

    let k = partition.k();
    let start = partition.anchor(s);
    let masses = masses_on_grid(&on_part, &start, partition.delta(s + 1), k);
    let threshold = step_threshold(partition, s);
    let j = match masses.iter().rposition(|m| *m >= threshold) {
        Some(idx) => idx as u64 + 1,
        None => {
            return Err(Error::invariant(format!(
                "step {s}: no subinterval reaches threshold {threshold}"
            )))
        }
    };
    let c_j = partition.subinterval_start(s, j);
    let theta_next = partition.anchor(s + 1) - &c_j;
    if !theta_next.is_positive() || &theta_next > partition.delta(s) {
        return Err(Error::invariant(format!(
            "step {s}: θ_(s+1) = {theta_next} outside (0, Δ_s]"
        )));
    }
    let record = StepRecord {
        s: s as u32,
        subinterval_masses: Some(masses),
        threshold,
        chosen_j: j,
        c_j,
    };
    Ok((theta_next, record))
}

fn with_trace(err: Error, trace: &RotationTrace) -> Error {
    match err {
        Error::Invariant { message, .. } => Error::Invariant {
            message,
            trace: Some(Box::new(trace.clone())),
        },
        other => other,
    }
}

/// Runs the full construction and returns its certificate.
///
/// `verified` in the result is computed, not assumed; a `false` there means
/// this implementation is wrong. Broken intermediate inequalities surface as
/// [`Error::Invariant`] carrying the partial trace.
pub fn solve(r: u32, cover: &CircleCover, k: Option<u64>) -> Result<RaimiCertificate> {
    let partition = GeometricPartition::build(r, cover.t(), k)?;
    solve_with_partition(&partition, cover)
}

pub fn solve_with_partition(
    partition: &GeometricPartition,
    cover: &CircleCover,
) -> Result<RaimiCertificate> {
    if partition.t() != cover.t() {
        return Err(Error::InvalidParameter(format!(
            "partition built for t = {} but cover has {} parts",
            partition.t(),
            cover.t()
        )));
    }
    let r = partition.r() as usize;
    let (m, beta) = select_m(cover)?;
    let f_m = cover.set(m);

    let theta_1 = initial_rotation(partition, f_m)?;
    let mut trace = RotationTrace {
        m,
        beta: beta.clone(),
        thetas: vec![theta_1.clone()],
        phis: vec![theta_1.frac()],
        steps: Vec::with_capacity(r - 1),
    };

    let base = overlap(f_m, &theta_1, partition.part(1));
    if base < &beta * partition.delta(1) {
        return Err(with_trace(
            Error::invariant(format!("|(F_m + θ_1) ∩ E_1| = {base} < β Δ_1")),
            &trace,
        ));
    }

    for s in 1..r {
        let phi_s = trace.phis[s - 1].clone();
        let (theta_next, record) =
            refine_step(partition, f_m, s, &phi_s).map_err(|e| with_trace(e, &trace))?;
        let phi_next = (&phi_s + &theta_next).frac();
        trace.thetas.push(theta_next);
        trace.phis.push(phi_next.clone());
        trace.steps.push(record);

        let kept = overlap(f_m, &phi_next, partition.part(s));
        if kept < retention_bound(partition, s) {
            return Err(with_trace(
                Error::invariant(format!("step {s}: retained mass {kept} in E_s too small")),
                &trace,
            ));
        }
        let landed = overlap(f_m, &phi_next, partition.part(s + 1));
        if landed < loop_bound(partition, s + 1) {
            return Err(with_trace(
                Error::invariant(format!("step {s}: mass {landed} moved onto E_(s+1) too small")),
                &trace,
            ));
        }
    }

    let k_minus_1 = Rational::from(partition.k() as i64 - 1);
    for s in 1..r {
        let tail: Rational = trace.thetas[(s + 1).min(r)..].iter().sum();
        let cap = partition.delta(s) / &k_minus_1;
        let bound = final_bounds(partition)[s - 1].clone();
        if tail > cap || cap > bound {
            return Err(with_trace(
                Error::invariant(format!(
                    "tail rotation after step {s} is {tail}; caps {cap} and {bound}"
                )),
                &trace,
            ));
        }
    }

    let theta = trace.phis[r - 1].clone();
    let measures: Vec<Rational> = partition
        .parts()
        .iter()
        .map(|e| overlap(f_m, &theta, e))
        .collect();
    let bounds = final_bounds(partition);
    let verified = measures_meet_bounds(&measures, &bounds);
    Ok(RaimiCertificate {
        r: partition.r(),
        t: partition.t(),
        k: partition.k(),
        theta,
        measures,
        bounds,
        trace,
        verified,
    })
}

fn measures_meet_bounds(measures: &[Rational], bounds: &[Rational]) -> bool {
    measures.len() == bounds.len()
        && measures
            .iter()
            .zip(bounds)
            .all(|(m, b)| b.is_positive() && m >= b)
}

/// Re-derives the certificate from the cover and lists every check that fails.
///
/// An empty list means the certificate is valid. Shape errors (wrong lengths,
/// parameters inconsistent with the cover) are returned as
/// [`Error::StructuralMismatch`].
pub fn check(cert: &RaimiCertificate, cover: &CircleCover) -> Result<Vec<String>> {
    let mismatch = |msg: String| Err(Error::StructuralMismatch(msg));
    if cert.t != cover.t() {
        return mismatch(format!("certificate t = {} but cover has {} parts", cert.t, cover.t()));
    }
    let partition = cert
        .partition()
        .map_err(|e| Error::StructuralMismatch(e.to_string()))?;
    let r = cert.r as usize;
    let tr = &cert.trace;
    if tr.m == 0 || tr.m > cover.t() as usize {
        return mismatch(format!("m = {} out of range", tr.m));
    }
    for (name, len, want) in [
        ("thetas", tr.thetas.len(), r),
        ("phis", tr.phis.len(), r),
        ("steps", tr.steps.len(), r - 1),
        ("measures", cert.measures.len(), r),
        ("bounds", cert.bounds.len(), r),
    ] {
        if len != want {
            return mismatch(format!("{name} has length {len}, expected {want}"));
        }
    }

    let mut failures = Vec::new();
    let f_m = cover.set(tr.m);
    let beta = partition.beta();
    if tr.beta != beta {
        failures.push(format!("beta = {} but 1/t = {beta}", tr.beta));
    }
    if f_m.measure() < beta {
        failures.push(format!("|F_m| = {} < beta", f_m.measure()));
    }

    let base = overlap(f_m, &tr.thetas[0], partition.part(1));
    if base < &beta * partition.delta(1) {
        failures.push(format!("|(F_m + θ_1) ∩ E_1| = {base} < β Δ_1"));
    }

    let mut phi = Rational::zero();
    for (s, (theta, stored)) in tr.thetas.iter().zip(&tr.phis).enumerate() {
        phi = (&phi + theta).frac();
        if *stored != phi {
            failures.push(format!("φ_{} = {stored}, recomputed {phi}", s + 1));
        }
    }
    if cert.theta != phi {
        failures.push(format!("theta = {} but φ_r = {phi}", cert.theta));
    }

    for (idx, step) in tr.steps.iter().enumerate() {
        let s = idx + 1;
        if step.s as usize != s {
            failures.push(format!("step record {s} labelled s = {}", step.s));
            continue;
        }
        // A stale φ_s would make every later comparison noise; recompute from thetas.
        let phi_s: Rational = tr.thetas[..s].iter().sum::<Rational>().frac();
        match refine_step(&partition, f_m, s, &phi_s) {
            Ok((theta_next, fresh)) => {
                if step.threshold != fresh.threshold {
                    failures.push(format!("step {s}: threshold {} != {}", step.threshold, fresh.threshold));
                }
                if step.chosen_j != fresh.chosen_j {
                    failures.push(format!(
                        "step {s}: chosen j = {} but rightmost qualifying is {}",
                        step.chosen_j, fresh.chosen_j
                    ));
                }
                if step.c_j != fresh.c_j {
                    failures.push(format!("step {s}: c_j {} != {}", step.c_j, fresh.c_j));
                }
                if let Some(masses) = &step.subinterval_masses {
                    if Some(masses) != fresh.subinterval_masses.as_ref() {
                        failures.push(format!("step {s}: stored subinterval masses differ"));
                    }
                }
                if tr.thetas[s] != theta_next {
                    failures.push(format!("θ_{} = {} but u_(s+1) - c_j = {theta_next}", s + 1, tr.thetas[s]));
                }
            }
            Err(e) => failures.push(format!("step {s}: {e}")),
        }
    }

    let expected_bounds = final_bounds(&partition);
    if cert.bounds != expected_bounds {
        failures.push("bounds differ from β Δ_s / 2^(s+5) (s < r), β Δ_r / 2^(r+2)".to_string());
    }
    let measures: Vec<Rational> = partition
        .parts()
        .iter()
        .map(|e| overlap(f_m, &cert.theta, e))
        .collect();
    for (i, (stored, fresh)) in cert.measures.iter().zip(&measures).enumerate() {
        if stored != fresh {
            failures.push(format!("measure {}: stored {stored}, recomputed {fresh}", i + 1));
        }
    }
    if !measures_meet_bounds(&measures, &cert.bounds) {
        failures.push("recomputed measures do not meet the stated positive bounds".to_string());
    }
    if !cert.verified {
        failures.push("certificate is marked unverified".to_string());
    }
    Ok(failures)
}

/// `true` iff every check in [`check`] passes.
pub fn verify(cert: &RaimiCertificate, cover: &CircleCover) -> Result<bool> {
    Ok(check(cert, cover)?.is_empty())
}
