//! Box unions on the torus `T^n = C × T^(n-1)` and the slicing reduction to
//! the circle.
//!
//! A [`BoxSet`] is stored as a recursive slab decomposition: the first axis is
//! cut into disjoint half-open slabs, each carrying the `(n-1)`-dimensional
//! set it extrudes. Adjacent slabs with equal fibers are merged and empty
//! slabs dropped, so the representation is canonical and set equality is
//! structural equality.
//!
//! [`solve_torus`] follows the slicing argument: for each `x` on the circle
//! the fibers `A_m(x)` cover `T^(n-1)`, so some part has fiber measure at
//! least `1/t`; assigning `x` to the least such index yields a partition
//! `C_1, ..., C_t` of the circle. The circle construction applied to that
//! partition gives `θ_1`, and the translation `(θ_1, 0, ..., 0)` works for
//! the original cover with every intersection at least `1/t` times the
//! corresponding circle measure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circle_sets::CircleSet;
use crate::error::{Error, Result};
use crate::raimi_circle::{self, CircleCover, RaimiCertificate};
use crate::rational::Rational;

/// One axis-aligned box: `n` half-open ranges `[lo, hi)`.
pub type AxisBox = Vec<(Rational, Rational)>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Slab {
    lo: Rational,
    hi: Rational,
    fiber: Fiber,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Fiber {
    /// The full zero-dimensional torus; terminates the recursion.
    Point,
    Slabs(Vec<Slab>),
}

#[derive(Clone, Copy)]
enum Op {
    Union,
    Intersect,
    Difference,
}

impl Op {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Op::Union => a || b,
            Op::Intersect => a && b,
            Op::Difference => a && !b,
        }
    }
}

fn slab_at<'a>(slabs: &'a [Slab], x: &Rational) -> Option<&'a Fiber> {
    let idx = slabs.partition_point(|s| s.lo <= *x);
    (idx > 0 && *x < slabs[idx - 1].hi).then(|| &slabs[idx - 1].fiber)
}

fn push_slab(out: &mut Vec<Slab>, lo: &Rational, hi: &Rational, fiber: Fiber) {
    if let Some(last) = out.last_mut() {
        if last.hi == *lo && last.fiber == fiber {
            last.hi = hi.clone();
            return;
        }
    }
    out.push(Slab {
        lo: lo.clone(),
        hi: hi.clone(),
        fiber,
    });
}

fn merge_slabs(a: &[Slab], b: &[Slab], op: Op) -> Vec<Slab> {
    let mut cuts: Vec<&Rational> = a
        .iter()
        .chain(b)
        .flat_map(|s| [&s.lo, &s.hi])
        .collect();
    cuts.sort();
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if let Some(f) = merge(slab_at(a, x0), slab_at(b, x0), op) {
            push_slab(&mut out, x0, x1, f);
        }
    }
    out
}

fn merge(a: Option<&Fiber>, b: Option<&Fiber>, op: Op) -> Option<Fiber> {
    match (a, b) {
        (None, None) => None,
        (Some(Fiber::Point), _) | (_, Some(Fiber::Point)) => {
            op.apply(a.is_some(), b.is_some()).then_some(Fiber::Point)
        }
        _ => {
            let sa = match a {
                Some(Fiber::Slabs(s)) => s.as_slice(),
                _ => &[],
            };
            let sb = match b {
                Some(Fiber::Slabs(s)) => s.as_slice(),
                _ => &[],
            };
            let out = merge_slabs(sa, sb, op);
            (!out.is_empty()).then_some(Fiber::Slabs(out))
        }
    }
}

fn fiber_measure(f: &Fiber) -> Rational {
    match f {
        Fiber::Point => Rational::one(),
        Fiber::Slabs(s) => slabs_measure(s),
    }
}

fn slabs_measure(slabs: &[Slab]) -> Rational {
    slabs
        .iter()
        .map(|s| (&s.hi - &s.lo) * fiber_measure(&s.fiber))
        .sum()
}

fn full_fiber(dim: usize) -> Fiber {
    if dim == 0 {
        Fiber::Point
    } else {
        Fiber::Slabs(vec![Slab {
            lo: Rational::zero(),
            hi: Rational::one(),
            fiber: full_fiber(dim - 1),
        }])
    }
}

fn box_fiber(ranges: &[(Rational, Rational)]) -> Fiber {
    match ranges.split_first() {
        None => Fiber::Point,
        Some(((lo, hi), rest)) => Fiber::Slabs(vec![Slab {
            lo: lo.clone(),
            hi: hi.clone(),
            fiber: box_fiber(rest),
        }]),
    }
}

fn flatten(slabs: &[Slab], prefix: &mut AxisBox, out: &mut Vec<AxisBox>) {
    for s in slabs {
        prefix.push((s.lo.clone(), s.hi.clone()));
        match &s.fiber {
            Fiber::Point => out.push(prefix.clone()),
            Fiber::Slabs(inner) => flatten(inner, prefix, out),
        }
        prefix.pop();
    }
}

/// A finite union of half-open boxes in `T^n`, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoxSet {
    dim: usize,
    slabs: Vec<Slab>,
}

fn check_range(lo: &Rational, hi: &Rational) -> Result<()> {
    if lo == hi {
        return Err(Error::DegenerateArc {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    if lo.is_negative() || lo > hi || *hi > 1 {
        return Err(Error::InvalidRange {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    Ok(())
}

impl BoxSet {
    pub fn empty(dim: usize) -> Self {
        BoxSet { dim, slabs: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        match full_fiber(dim) {
            Fiber::Slabs(slabs) => BoxSet { dim, slabs },
            Fiber::Point => BoxSet::empty(0),
        }
    }

    /// Canonical decomposition of the union of `raw` boxes in `T^dim`.
    ///
    /// Each range must satisfy `0 <= lo < hi <= 1`; wrapping ranges are split
    /// by the caller.
    pub fn disjointify(raw: &[AxisBox], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let mut acc = BoxSet::empty(dim);
        for b in raw {
            if b.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.len(),
                });
            }
            for (lo, hi) in b {
                check_range(lo, hi)?;
            }
            let single = match box_fiber(b) {
                Fiber::Slabs(slabs) => BoxSet { dim, slabs },
                Fiber::Point => unreachable!("dim >= 1"),
            };
            acc = acc.combine(&single, Op::Union);
        }
        Ok(acc)
    }

    /// `G × T^(dim-1)`.
    pub fn cylinder(base: &CircleSet, dim: usize) -> Self {
        let fiber = full_fiber(dim - 1);
        let slabs = base
            .intervals()
            .iter()
            .map(|(lo, hi)| Slab {
                lo: lo.clone(),
                hi: hi.clone(),
                fiber: fiber.clone(),
            })
            .collect();
        BoxSet { dim, slabs }
    }

    pub fn from_circle_set(set: &CircleSet) -> Self {
        Self::cylinder(set, 1)
    }

    pub fn to_circle_set(&self) -> Result<CircleSet> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim,
            });
        }
        let pieces = self.slabs.iter().map(|s| (s.lo.clone(), s.hi.clone())).collect();
        Ok(CircleSet::from_pieces(pieces))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == BoxSet::full(self.dim)
    }

    /// Disjoint boxes of the decomposition, sorted by lower corner.
    pub fn boxes(&self) -> Vec<AxisBox> {
        let mut out = Vec::new();
        flatten(&self.slabs, &mut Vec::with_capacity(self.dim), &mut out);
        out
    }

    pub fn measure(&self) -> Rational {
        slabs_measure(&self.slabs)
    }

    /// Point membership; coordinates are read modulo 1.
    pub fn contains(&self, point: &[Rational]) -> bool {
        let mut slabs = &self.slabs;
        for x in point {
            match slab_at(slabs, &x.frac()) {
                None => return false,
                Some(Fiber::Point) => return true,
                Some(Fiber::Slabs(inner)) => slabs = inner,
            }
        }
        false
    }

    fn combine(&self, other: &BoxSet, op: Op) -> BoxSet {
        BoxSet {
            dim: self.dim,
            slabs: merge_slabs(&self.slabs, &other.slabs, op),
        }
    }

    fn same_dim(&self, other: &BoxSet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn intersect(&self, other: &BoxSet) -> Result<BoxSet> {
        self.same_dim(other)?;
        Ok(self.combine(other, Op::Intersect))
    }

    pub fn union(&self, other: &BoxSet) -> Result<BoxSet> {
        self.same_dim(other)?;
        Ok(self.combine(other, Op::Union))
    }

    pub fn difference(&self, other: &BoxSet) -> Result<BoxSet> {
        self.same_dim(other)?;
        Ok(self.combine(other, Op::Difference))
    }

    pub fn complement(&self) -> BoxSet {
        BoxSet::full(self.dim).combine(self, Op::Difference)
    }

    /// Image under `x -> x + theta` (componentwise, mod 1).
    pub fn translate(&self, theta: &[Rational]) -> Result<BoxSet> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: theta.len(),
            });
        }
        let mut shifted = Vec::new();
        for b in self.boxes() {
            let per_axis: Vec<Vec<(Rational, Rational)>> = b
                .iter()
                .zip(theta)
                .map(|((lo, hi), th)| {
                    CircleSet::interval(lo.clone(), hi.clone())
                        .map(|s| s.translate(th).intervals().to_vec())
                })
                .collect::<Result<_>>()?;
            cartesian(&per_axis, &mut Vec::new(), &mut shifted);
        }
        BoxSet::disjointify(&shifted, self.dim)
    }

    /// Slabs along the first axis: `(lo, hi, fiber)` with the fiber as a
    /// `(dim-1)`-dimensional set. Requires `dim >= 2`.
    pub fn first_axis_slabs(&self) -> Vec<(Rational, Rational, BoxSet)> {
        self.slabs
            .iter()
            .map(|s| {
                let fiber = match &s.fiber {
                    Fiber::Slabs(inner) => inner.clone(),
                    Fiber::Point => Vec::new(),
                };
                (
                    s.lo.clone(),
                    s.hi.clone(),
                    BoxSet {
                        dim: self.dim - 1,
                        slabs: fiber,
                    },
                )
            })
            .collect()
    }

    /// Union of many sets of the same dimension.
    pub fn union_all<'a>(dim: usize, sets: impl IntoIterator<Item = &'a BoxSet>) -> Result<BoxSet> {
        sets.into_iter()
            .try_fold(BoxSet::empty(dim), |acc, s| acc.union(s))
    }
}

fn cartesian(axes: &[Vec<(Rational, Rational)>], prefix: &mut AxisBox, out: &mut Vec<AxisBox>) {
    match axes.split_first() {
        None => out.push(prefix.clone()),
        Some((first, rest)) => {
            for range in first {
                prefix.push(range.clone());
                cartesian(rest, prefix, out);
                prefix.pop();
            }
        }
    }
}

impl fmt::Display for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, b) in self.boxes().iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            for (a, (lo, hi)) in b.iter().enumerate() {
                if a > 0 {
                    f.write_str("×")?;
                }
                write!(f, "[{lo},{hi})")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoxSet<{}>{}", self.dim, self)
    }
}

/// `x -> |A(x)|` for the fibers `A(x) = { y : (x, y) ∈ F }`, constant on
/// each cell `[breakpoints[q], breakpoints[q+1])` (the last cell ends at 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceProfile {
    breakpoints: Vec<Rational>,
    cell_values: Vec<Rational>,
}

impl SliceProfile {
    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn cell_values(&self) -> &[Rational] {
        &self.cell_values
    }

    /// `(lo, hi, value)` per cell.
    pub fn cells(&self) -> impl Iterator<Item = (&Rational, Rational, &Rational)> {
        self.breakpoints.iter().enumerate().map(move |(q, lo)| {
            let hi = self
                .breakpoints
                .get(q + 1)
                .cloned()
                .unwrap_or_else(Rational::one);
            (lo, hi, &self.cell_values[q])
        })
    }

    pub fn value_at(&self, x: &Rational) -> Rational {
        let x = x.frac();
        let idx = self.breakpoints.partition_point(|b| *b <= x);
        self.cell_values[idx - 1].clone()
    }

    /// `Σ value × cell length`; equals the measure of the sliced set.
    pub fn integral(&self) -> Rational {
        self.cells().map(|(lo, hi, v)| (hi - lo) * v).sum()
    }
}

pub fn slice_profile(f: &BoxSet) -> Result<SliceProfile> {
    if f.dim < 2 {
        return Err(Error::InvalidParameter(
            "slice profiles need dimension >= 2; use the circle routines for n = 1".into(),
        ));
    }
    let mut breakpoints: Vec<Rational> = std::iter::once(Rational::zero())
        .chain(f.slabs.iter().flat_map(|s| [s.lo.clone(), s.hi.clone()]))
        .filter(|x| *x < 1)
        .collect();
    breakpoints.sort();
    breakpoints.dedup();
    let cell_values = breakpoints
        .iter()
        .map(|x| slab_at(&f.slabs, x).map(fiber_measure).unwrap_or_else(Rational::zero))
        .collect();
    Ok(SliceProfile {
        breakpoints,
        cell_values,
    })
}

/// A finite cover `F_1, ..., F_t` of `T^n` by box unions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusCover {
    dim: usize,
    sets: Vec<BoxSet>,
}

impl TorusCover {
    pub fn new(sets: Vec<BoxSet>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a cover needs t >= 2 parts, got {}",
                sets.len()
            )));
        }
        let dim = sets[0].dim;
        let union = BoxSet::union_all(dim, &sets)?;
        if !union.is_full() {
            return Err(Error::NotACover {
                measure: union.measure().to_string(),
                gap: union.complement().to_string(),
            });
        }
        Ok(TorusCover { dim, sets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> u32 {
        self.sets.len() as u32
    }

    pub fn sets(&self) -> &[BoxSet] {
        &self.sets
    }

    /// `F_m`, 1-based.
    pub fn set(&self, m: usize) -> &BoxSet {
        &self.sets[m - 1]
    }
}

/// The circle partition `C_1, ..., C_t` induced by the least-index rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorPartition {
    /// Left ends of the common refinement cells.
    pub breakpoints: Vec<Rational>,
    /// 1-based part index assigned to each cell.
    pub selector: Vec<usize>,
    pub parts: Vec<CircleSet>,
}

impl SelectorPartition {
    pub fn cover(&self) -> Result<CircleCover> {
        CircleCover::new(self.parts.clone())
    }
}

pub fn selector_partition(cover: &TorusCover) -> Result<SelectorPartition> {
    let profiles = cover
        .sets()
        .iter()
        .map(slice_profile)
        .collect::<Result<Vec<_>>>()?;
    let mut breakpoints: Vec<Rational> = profiles
        .iter()
        .flat_map(|p| p.breakpoints().iter().cloned())
        .collect();
    breakpoints.sort();
    breakpoints.dedup();

    let threshold = Rational::new(1, cover.t() as i64);
    let mut selector = Vec::with_capacity(breakpoints.len());
    let mut pieces: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); cover.sets().len()];
    for (q, x) in breakpoints.iter().enumerate() {
        let hi = breakpoints.get(q + 1).cloned().unwrap_or_else(Rational::one);
        let m = profiles
            .iter()
            .position(|p| p.value_at(x) >= threshold)
            .ok_or_else(|| Error::CoverViolation {
                cell: format!("[{x},{hi})"),
            })?;
        selector.push(m + 1);
        pieces[m].push((x.clone(), hi));
    }
    let parts = pieces.into_iter().map(CircleSet::from_pieces).collect();
    Ok(SelectorPartition {
        breakpoints,
        selector,
        parts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCertificate {
    pub dim: usize,
    /// Certificate for the circle cover `C_1, ..., C_t`.
    pub circle: RaimiCertificate,
    pub m_star: usize,
    /// `(θ_1, 0, ..., 0)`.
    pub theta: Vec<Rational>,
    pub slice_breakpoints: Vec<Rational>,
    pub selector: Vec<usize>,
    /// `|(F_(m*) + θ) ∩ (E_i × T^(n-1))|`.
    pub measures: Vec<Rational>,
    /// `|(C_(m*) + θ_1) ∩ E_i| / t`.
    pub transfer_bounds: Vec<Rational>,
    pub verified: bool,
}

impl TorusCertificate {
    pub fn compact(&self) -> TorusCertificate {
        TorusCertificate {
            circle: self.circle.compact(),
            ..self.clone()
        }
    }

    pub fn min_measure(&self) -> Rational {
        self.measures.iter().min().cloned().unwrap_or_else(Rational::zero)
    }
}

fn lifted_theta(theta_1: &Rational, dim: usize) -> Vec<Rational> {
    let mut theta = vec![Rational::zero(); dim];
    theta[0] = theta_1.clone();
    theta
}

fn lifted_measures(
    cover: &TorusCover,
    m: usize,
    theta: &[Rational],
    partition_parts: &[CircleSet],
) -> Result<Vec<Rational>> {
    let moved = cover.set(m).translate(theta)?;
    partition_parts
        .iter()
        .map(|e| Ok(moved.intersect(&BoxSet::cylinder(e, cover.dim()))?.measure()))
        .collect()
}

pub fn solve_torus(r: u32, cover: &TorusCover, k: Option<u64>) -> Result<TorusCertificate> {
    if cover.dim() < 2 {
        return Err(Error::InvalidParameter(
            "the torus solver needs dimension >= 2; route n = 1 covers to the circle solver".into(),
        ));
    }
    let selection = selector_partition(cover)?;
    let circle_cover = selection.cover()?;
    let circle = raimi_circle::solve(r, &circle_cover, k)?;
    let partition = circle.partition()?;

    let m_star = circle.m();
    let theta = lifted_theta(&circle.theta, cover.dim());
    let measures = lifted_measures(cover, m_star, &theta, partition.parts())?;
    let t = Rational::from(cover.t() as i64);
    let transfer_bounds: Vec<Rational> = circle.measures.iter().map(|v| v / &t).collect();

    for (i, (got, floor)) in measures.iter().zip(&transfer_bounds).enumerate() {
        if got < floor {
            return Err(Error::Invariant {
                message: format!(
                    "transfer inequality fails at i = {}: {got} < {floor}",
                    i + 1
                ),
                trace: Some(Box::new(circle.trace.clone())),
            });
        }
    }
    let verified = circle.verified
        && measures
            .iter()
            .zip(&transfer_bounds)
            .all(|(v, b)| b.is_positive() && v >= b);

    Ok(TorusCertificate {
        dim: cover.dim(),
        circle,
        m_star,
        theta,
        slice_breakpoints: selection.breakpoints,
        selector: selection.selector,
        measures,
        transfer_bounds,
        verified,
    })
}

/// Failed checks for a torus certificate; empty means valid.
pub fn check_torus(cert: &TorusCertificate, cover: &TorusCover) -> Result<Vec<String>> {
    if cert.dim != cover.dim() {
        return Err(Error::StructuralMismatch(format!(
            "certificate dim = {} but cover dim = {}",
            cert.dim,
            cover.dim()
        )));
    }
    if cert.theta.len() != cover.dim() || cert.measures.len() != cert.circle.r as usize {
        return Err(Error::StructuralMismatch("theta or measures have the wrong length".into()));
    }
    let selection = selector_partition(cover)?;
    let mut failures = Vec::new();
    if cert.slice_breakpoints != selection.breakpoints || cert.selector != selection.selector {
        failures.push("selector partition differs from the least-index rule".to_string());
    }
    let circle_cover = selection.cover()?;
    failures.extend(
        raimi_circle::check(&cert.circle, &circle_cover)?
            .into_iter()
            .map(|f| format!("circle: {f}")),
    );
    if cert.m_star != cert.circle.m() {
        failures.push(format!("m_star = {} but circle m = {}", cert.m_star, cert.circle.m()));
    }
    let theta = lifted_theta(&cert.circle.theta, cover.dim());
    if cert.theta != theta {
        failures.push("theta is not (θ_1, 0, ..., 0)".to_string());
    }
    if cert.m_star == 0 || cert.m_star > cover.t() as usize {
        return Err(Error::StructuralMismatch(format!("m_star = {} out of range", cert.m_star)));
    }
    let partition = cert
        .circle
        .partition()
        .map_err(|e| Error::StructuralMismatch(e.to_string()))?;
    let measures = lifted_measures(cover, cert.m_star, &cert.theta, partition.parts())?;
    if measures != cert.measures {
        failures.push("stored measures differ from recomputed ones".to_string());
    }
    let t = Rational::from(cover.t() as i64);
    let transfer: Vec<Rational> = cert.circle.measures.iter().map(|v| v / &t).collect();
    if transfer != cert.transfer_bounds {
        failures.push("transfer bounds are not circle measures / t".to_string());
    }
    for (i, (v, b)) in measures.iter().zip(&transfer).enumerate() {
        if !b.is_positive() || v < b {
            failures.push(format!("i = {}: measure {v} below positive bound {b}", i + 1));
        }
    }
    if !cert.verified {
        failures.push("certificate is marked unverified".to_string());
    }
    Ok(failures)
}

pub fn verify_torus(cert: &TorusCertificate, cover: &TorusCover) -> Result<bool> {
    Ok(check_torus(cert, cover)?.is_empty())
}
