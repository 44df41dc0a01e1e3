//! The overlap function `f(theta) = |(F + theta) ∩ E|` of two circle sets.
//!
//! For interval unions `f` is continuous and piecewise linear. Its slope can
//! only change where an endpoint of `F + theta` meets an endpoint of `E`, i.e.
//! at `theta = e - phi (mod 1)` for endpoints `e` of `E` and `phi` of `F`. A
//! [`CorrelationProfile`] stores `f` at exactly those breakpoints, which
//! determines it everywhere.

use crate::circle_sets::CircleSet;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationProfile {
    e: CircleSet,
    f: CircleSet,
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

/// `|(F + theta) ∩ E|`, exactly.
pub fn correlation_value(e: &CircleSet, f: &CircleSet, theta: &Rational) -> Rational {
    f.translate(theta).intersect(e).measure()
}

/// Sorted, deduplicated `e - phi (mod 1)` over all endpoint pairs.
///
/// Falls back to `{0}` when either set is empty, where `f` is identically 0.
pub fn breakpoints(e: &CircleSet, f: &CircleSet) -> Vec<Rational> {
    let mut out: Vec<Rational> = e
        .endpoints()
        .flat_map(|a| f.endpoints().map(move |b| (a - b).frac()))
        .collect();
    if out.is_empty() {
        out.push(Rational::zero());
    }
    out.sort();
    out.dedup();
    out
}

pub fn build_profile(e: &CircleSet, f: &CircleSet) -> CorrelationProfile {
    let breakpoints = breakpoints(e, f);
    let values = breakpoints
        .iter()
        .map(|b| correlation_value(e, f, b))
        .collect();
    CorrelationProfile {
        e: e.clone(),
        f: f.clone(),
        breakpoints,
        values,
    }
}

/// One linear piece of the profile, `[start, end)` with `end` possibly equal
/// to `1 + breakpoints[0]` for the arc that wraps.
#[derive(Clone, Debug)]
pub struct Arc<'a> {
    pub start: &'a Rational,
    pub end: Rational,
    pub start_value: &'a Rational,
    pub end_value: &'a Rational,
}

impl Arc<'_> {
    pub fn length(&self) -> Rational {
        &self.end - self.start
    }

    pub fn midpoint(&self) -> Rational {
        ((self.start + &self.end) / Rational::from_integer(2)).frac()
    }
}

impl CorrelationProfile {
    pub fn e(&self) -> &CircleSet {
        &self.e
    }

    pub fn f(&self) -> &CircleSet {
        &self.f
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `(theta, f(theta))` rows sorted by theta.
    pub fn rows(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.breakpoints.iter().zip(&self.values)
    }

    /// The cyclic sequence of linear pieces; with a single breakpoint there is
    /// one arc of length 1.
    pub fn arcs(&self) -> impl Iterator<Item = Arc<'_>> {
        let n = self.breakpoints.len();
        (0..n).map(move |k| {
            let next = (k + 1) % n;
            let end = if next == 0 {
                &self.breakpoints[0] + &Rational::one()
            } else {
                self.breakpoints[next].clone()
            };
            Arc {
                start: &self.breakpoints[k],
                end,
                start_value: &self.values[k],
                end_value: &self.values[next],
            }
        })
    }

    /// Evaluates `f` by linear interpolation between breakpoints.
    pub fn value_at(&self, theta: &Rational) -> Rational {
        let theta = theta.frac();
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| *b <= theta);
        let (k, start) = if idx == 0 {
            (n - 1, &self.breakpoints[n - 1] - &Rational::one())
        } else {
            (idx - 1, self.breakpoints[idx - 1].clone())
        };
        let arc = self.arcs().nth(k).expect("arc index in range");
        if theta == start {
            return arc.start_value.clone();
        }
        let t = (&theta - &start) / arc.length();
        arc.start_value + &(t * (arc.end_value - arc.start_value))
    }

    /// Exact integral of `f` over the circle by the cyclic trapezoid rule.
    pub fn trapezoid_integral(&self) -> Rational {
        let half = Rational::new(1, 2);
        self.arcs()
            .map(|a| a.length() * (a.start_value + a.end_value) * &half)
            .sum()
    }

    /// Smallest breakpoint attaining the global maximum, and that maximum.
    pub fn max(&self) -> (Rational, Rational) {
        let mut best = 0;
        for k in 1..self.values.len() {
            if self.values[k] > self.values[best] {
                best = k;
            }
        }
        (self.breakpoints[best].clone(), self.values[best].clone())
    }
}

/// `∫ f = |E| |F|`, checked against the trapezoid sum of the profile.
pub fn integral(e: &CircleSet, f: &CircleSet) -> Result<Rational> {
    let trapezoid = build_profile(e, f).trapezoid_integral();
    let expected = e.measure() * f.measure();
    if trapezoid != expected {
        return Err(Error::invariant(format!(
            "profile integral {trapezoid} differs from |E||F| = {expected} for E = {e}, F = {f}"
        )));
    }
    Ok(trapezoid)
}

/// Global maximiser of `f`; ties go to the smallest breakpoint.
///
/// The maximum is always at least the mean `|E| |F|`.
pub fn argmax(e: &CircleSet, f: &CircleSet) -> Result<(Rational, Rational)> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::Precondition(
            "argmax needs non-empty E and F".to_string(),
        ));
    }
    Ok(build_profile(e, f).max())
}

/// Some `theta` with `0 < f(theta) < |F|`.
///
/// Breakpoints are tried in increasing order, then arc midpoints in arc order.
/// Requires `0 < |E| < 1` and `|F| > 0`. When `|F| = 1` the function is the
/// constant `|E|` and the first breakpoint is returned.
pub fn strict_intermediate(e: &CircleSet, f: &CircleSet) -> Result<Rational> {
    let (me, mf) = (e.measure(), f.measure());
    if !me.is_positive() || me >= 1 || !mf.is_positive() {
        return Err(Error::Precondition(format!(
            "strict intermediate value needs 0 < |E| < 1 and |F| > 0, got |E| = {me}, |F| = {mf}"
        )));
    }
    let profile = build_profile(e, f);
    let strict = |v: &Rational| v.is_positive() && *v < mf;
    if let Some((b, _)) = profile.rows().find(|(_, v)| strict(v)) {
        return Ok(b.clone());
    }
    for arc in profile.arcs() {
        let mid = arc.midpoint();
        if strict(&correlation_value(e, f, &mid)) {
            return Ok(mid);
        }
    }
    Err(Error::invariant(format!(
        "no strict intermediate value found for E = {e}, F = {f}"
    )))
}
