//! Finite unions of half-open rational intervals on the circle `R/Z`,
//! identified with `[0, 1)`.
//!
//! Every [`CircleSet`] is kept in a unique normal form: intervals `[lo, hi)`
//! with `0 <= lo < hi <= 1`, sorted, pairwise disjoint and non-touching. Two
//! sets are equal as subsets of the circle iff they are `==`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CircleSet {
    intervals: Vec<(Rational, Rational)>,
}

impl CircleSet {
    pub fn empty() -> Self {
        CircleSet::default()
    }

    pub fn full() -> Self {
        CircleSet {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// The single interval `[lo, hi)`; requires `0 <= lo < hi <= 1`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        if !in_unit_range(&lo, &hi) {
            return Err(Error::InvalidRange {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(CircleSet {
            intervals: vec![(lo, hi)],
        })
    }

    /// Normal form of a list of arcs.
    ///
    /// A pair `(a, b)` with `0 <= a < b <= 1` is the interval `[a, b)`. Any
    /// other pair is read modulo 1 as the forward arc from `a` to `b`, split at
    /// 1 when it wraps. Pairs whose endpoints agree modulo 1 are rejected since
    /// they could mean either the empty set or the whole circle.
    pub fn normalize(raw: &[(Rational, Rational)]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(raw.len() + 1);
        for (a, b) in raw {
            if in_unit_range(a, b) {
                pieces.push((a.clone(), b.clone()));
                continue;
            }
            let (a, b) = (a.frac(), b.frac());
            match a.cmp(&b) {
                std::cmp::Ordering::Equal => {
                    return Err(Error::DegenerateArc {
                        lo: a.to_string(),
                        hi: b.to_string(),
                    })
                }
                std::cmp::Ordering::Less => pieces.push((a, b)),
                std::cmp::Ordering::Greater => {
                    if !b.is_zero() {
                        pieces.push((Rational::zero(), b));
                    }
                    pieces.push((a, Rational::one()));
                }
            }
        }
        Ok(Self::from_pieces(pieces))
    }

    /// Sorts and merges pieces that already lie inside `[0, 1]` with `lo < hi`.
    pub(crate) fn from_pieces(mut pieces: Vec<(Rational, Rational)>) -> Self {
        pieces.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        CircleSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].0.is_zero() && self.intervals[0].1 == 1
    }

    /// Every interval endpoint, in order (so `0` and `1` appear when touched).
    pub fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.intervals.iter().flat_map(|(lo, hi)| [lo, hi])
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// `x` is read modulo 1.
    pub fn contains(&self, x: &Rational) -> bool {
        let x = x.frac();
        let idx = self.intervals.partition_point(|(lo, _)| *lo <= x);
        idx > 0 && x < self.intervals[idx - 1].1
    }

    /// Image under the rotation `x -> x + theta (mod 1)`.
    pub fn translate(&self, theta: &Rational) -> CircleSet {
        let theta = theta.frac();
        if theta.is_zero() {
            return self.clone();
        }
        let one = Rational::one();
        let mut pieces = Vec::with_capacity(self.intervals.len() + 1);
        for (lo, hi) in &self.intervals {
            let (a, b) = (lo + &theta, hi + &theta);
            if b <= one {
                pieces.push((a, b));
            } else if a >= one {
                pieces.push((a - &one, b - &one));
            } else {
                pieces.push((a, one.clone()));
                pieces.push((Rational::zero(), b - &one));
            }
        }
        Self::from_pieces(pieces)
    }

    pub fn intersect(&self, other: &CircleSet) -> CircleSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = std::cmp::max(&a[i].0, &b[j].0);
            let hi = std::cmp::min(&a[i].1, &b[j].1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of a normal-form intersection never touch: each is bounded by
        // endpoints of non-touching inputs.
        CircleSet { intervals: out }
    }

    pub fn union(&self, other: &CircleSet) -> CircleSet {
        let mut pieces = self.intervals.clone();
        pieces.extend(other.intervals.iter().cloned());
        Self::from_pieces(pieces)
    }

    pub fn complement(&self) -> CircleSet {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = Rational::zero();
        for (lo, hi) in &self.intervals {
            if cursor < *lo {
                out.push((cursor, lo.clone()));
            }
            cursor = hi.clone();
        }
        if cursor < 1 {
            out.push((cursor, Rational::one()));
        }
        CircleSet { intervals: out }
    }

    pub fn difference(&self, other: &CircleSet) -> CircleSet {
        self.intersect(&other.complement())
    }

    /// Union of many sets.
    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a CircleSet>) -> CircleSet {
        let pieces = sets
            .into_iter()
            .flat_map(|s| s.intervals.iter().cloned())
            .collect();
        Self::from_pieces(pieces)
    }
}

fn in_unit_range(lo: &Rational, hi: &Rational) -> bool {
    !lo.is_negative() && lo < hi && *hi <= 1
}

impl fmt::Display for CircleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (lo, hi)) in self.intervals.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{lo},{hi})")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for CircleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for CircleSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CircleSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<(Rational, Rational)>::deserialize(deserializer)?;
        CircleSet::normalize(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn set(pairs: &[(&str, &str)]) -> CircleSet {
        let raw: Vec<_> = pairs.iter().map(|(a, b)| (q(a), q(b))).collect();
        CircleSet::normalize(&raw).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(set(&[("1/4", "1/2")]).intervals(), &[(q("1/4"), q("1/2"))]);
        assert_eq!(
            set(&[("3/4", "1/4")]).intervals(),
            &[(q("0"), q("1/4")), (q("3/4"), q("1"))]
        );
        assert_eq!(set(&[("0", "1/2"), ("1/2", "3/4")]), set(&[("0", "3/4")]));
        assert!(CircleSet::normalize(&[]).unwrap().is_empty());
        assert!(set(&[("0", "1")]).is_full());
        // endpoints outside [0, 1] are reduced modulo 1
        assert_eq!(set(&[("5/4", "3/2")]), set(&[("1/4", "1/2")]));
    }

    #[test]
    fn normalize_rejects_degenerate_arc() {
        assert!(matches!(
            CircleSet::normalize(&[(q("1/3"), q("1/3"))]),
            Err(Error::DegenerateArc { .. })
        ));
        assert!(CircleSet::normalize(&[(q("1/4"), q("5/4"))]).is_err());
    }

    #[test]
    fn measure_examples() {
        assert_eq!(CircleSet::empty().measure(), q("0"));
        assert_eq!(CircleSet::full().measure(), q("1"));
        assert_eq!(set(&[("0", "1/4"), ("1/2", "5/6")]).measure(), q("7/12"));
    }

    #[test]
    fn translate_examples() {
        assert_eq!(set(&[("3/4", "1")]).translate(&q("1/2")), set(&[("1/4", "1/2")]));
        assert_eq!(
            set(&[("0", "1/2")]).translate(&q("3/4")),
            set(&[("0", "1/4"), ("3/4", "1")])
        );
        assert_eq!(set(&[("0", "1/2")]).translate(&q("0")), set(&[("0", "1/2")]));
        // a wrapped arc that rotates back into one piece merges
        assert_eq!(
            set(&[("3/4", "1/4")]).translate(&q("1/4")),
            set(&[("0", "1/2")])
        );
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(
            set(&[("0", "1/2")]).intersect(&set(&[("1/4", "3/4")])),
            set(&[("1/4", "1/2")])
        );
        assert!(set(&[("0", "1/2")]).intersect(&set(&[("1/2", "1")])).is_empty());
        let a = set(&[("0", "1/4"), ("1/2", "1")]);
        assert_eq!(a.intersect(&CircleSet::full()), a);
    }

    #[test]
    fn union_examples() {
        assert_eq!(
            set(&[("0", "1/4")]).union(&set(&[("1/4", "1/2")])),
            set(&[("0", "1/2")])
        );
        assert_eq!(CircleSet::empty().union(&set(&[("0", "1/3")])), set(&[("0", "1/3")]));
        assert_eq!(
            set(&[("0", "1/2")]).union(&set(&[("1/4", "3/4")])),
            set(&[("0", "3/4")])
        );
    }

    #[test]
    fn complement_examples() {
        assert_eq!(set(&[("0", "1/2")]).complement(), set(&[("1/2", "1")]));
        assert_eq!(CircleSet::empty().complement(), CircleSet::full());
        assert_eq!(
            set(&[("1/4", "1/2"), ("3/4", "1")]).complement(),
            set(&[("0", "1/4"), ("1/2", "3/4")])
        );
    }

    #[test]
    fn contains_is_half_open() {
        let s = set(&[("1/4", "1/2")]);
        assert!(s.contains(&q("1/4")));
        assert!(!s.contains(&q("1/2")));
        assert!(s.contains(&q("5/4")));
        assert!(!CircleSet::empty().contains(&q("0")));
    }

    #[test]
    fn json_form() {
        let s = set(&[("3/4", "1/4")]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"[["0","1/4"],["3/4","1"]]"#);
        assert_eq!(serde_json::from_str::<CircleSet>(&text).unwrap(), s);
    }

    fn arb_rational(max_den: i64) -> impl Strategy<Value = Rational> {
        (1..=max_den).prop_flat_map(|d| (0..=d).prop_map(move |n| Rational::new(n, d)))
    }

    fn arb_raw() -> impl Strategy<Value = Vec<(Rational, Rational)>> {
        prop::collection::vec((arb_rational(12), arb_rational(12)), 0..5).prop_map(|v| {
            v.into_iter()
                .filter(|(a, b)| a.frac() != b.frac() || (a.is_zero() && *b == 1))
                .collect()
        })
    }

    fn arb_set() -> impl Strategy<Value = CircleSet> {
        arb_raw().prop_map(|r| CircleSet::normalize(&r).unwrap())
    }

    proptest! {
        #[test]
        fn normalize_idempotent_and_order_free(raw in arb_raw()) {
            let s = CircleSet::normalize(&raw).unwrap();
            prop_assert_eq!(&CircleSet::normalize(s.intervals()).unwrap(), &s);
            let mut rev = raw.clone();
            rev.reverse();
            prop_assert_eq!(&CircleSet::normalize(&rev).unwrap(), &s);
            for w in s.intervals().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
        }

        #[test]
        fn measure_additivity(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(
                a.union(&b).measure() + a.intersect(&b).measure(),
                a.measure() + b.measure()
            );
        }

        #[test]
        fn rotation_invariance(s in arb_set(), x in arb_rational(16), y in arb_rational(16)) {
            let moved = s.translate(&x);
            prop_assert_eq!(moved.measure(), s.measure());
            prop_assert_eq!(moved.translate(&y), s.translate(&(&x + &y)));
            prop_assert_eq!(moved.translate(&(Rational::one() - &x).frac()), s);
        }

        #[test]
        fn de_morgan(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            prop_assert_eq!(a.measure() + a.complement().measure(), Rational::one());
        }
    }
}
