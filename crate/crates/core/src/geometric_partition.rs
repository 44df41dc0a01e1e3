//! The geometrically decreasing partition `E_1, ..., E_r` of `[0, 1)`.
//!
//! Lengths are `Δ_1 = 1 / S_k` with `S_k = 1 + 1/k + ... + 1/k^(r-1)` and
//! `Δ_i = Δ_(i-1) / k`, laid end to end from 0: `E_i = [u_i, u_(i+1))` where
//! `u_i = Δ_1 + ... + Δ_(i-1)`.

use serde::Serialize;

use crate::circle_sets::CircleSet;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Indices `i` and `s` in this module are 1-based, matching `E_1, ..., E_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometricPartition {
    r: u32,
    t: u32,
    k: u64,
    #[serde(skip_serializing)]
    s_k: Rational,
    deltas: Vec<Rational>,
    anchors: Vec<Rational>,
    parts: Vec<CircleSet>,
}

fn check_rt(r: u32, t: u32) -> Result<()> {
    if r < 2 || t < 2 {
        return Err(Error::InvalidParameter(format!(
            "need r >= 2 and t >= 2, got r = {r}, t = {t}"
        )));
    }
    Ok(())
}

/// `2^(r+4) t + 2`: the least integer strictly above `1 + 2^(r+4) t`.
pub fn default_k(r: u32, t: u32) -> Result<u64> {
    check_rt(r, t)?;
    let overflow =
        || Error::InvalidParameter(format!("r = {r}, t = {t} overflow the subdivision count"));
    if r + 4 >= 63 {
        return Err(overflow());
    }
    (1u64 << (r + 4))
        .checked_mul(t as u64)
        .and_then(|p| p.checked_add(2))
        .filter(|k| *k <= i64::MAX as u64)
        .ok_or_else(overflow)
}

impl GeometricPartition {
    /// Builds the partition; `k` defaults to [`default_k`] and may not be smaller.
    pub fn build(r: u32, t: u32, k: Option<u64>) -> Result<Self> {
        let min = default_k(r, t)?;
        let k = k.unwrap_or(min);
        if k < min {
            return Err(Error::ThresholdTooSmall { r, t, k, min });
        }
        if k > i64::MAX as u64 {
            return Err(Error::InvalidParameter(format!("k = {k} is too large")));
        }
        let kq = Rational::from(k as i64);
        let inv_k = kq.recip();

        let mut s_k = Rational::zero();
        let mut power = Rational::one();
        for _ in 0..r {
            s_k += &power;
            power = power * &inv_k;
        }

        let mut deltas = Vec::with_capacity(r as usize);
        deltas.push(s_k.recip());
        for i in 1..r as usize {
            let next = &deltas[i - 1] / &kq;
            deltas.push(next);
        }

        let mut anchors = Vec::with_capacity(r as usize);
        let mut cursor = Rational::zero();
        for d in &deltas {
            anchors.push(cursor.clone());
            cursor += d;
        }
        if cursor != 1 {
            return Err(Error::invariant(format!("partition lengths sum to {cursor}, not 1")));
        }

        let parts = (0..r as usize)
            .map(|i| {
                let hi = anchors.get(i + 1).cloned().unwrap_or_else(Rational::one);
                CircleSet::interval(anchors[i].clone(), hi)
            })
            .collect::<Result<Vec<_>>>()?;

        let partition = GeometricPartition { r, t, k, s_k, deltas, anchors, parts };
        partition.check_step_thresholds()?;
        Ok(partition)
    }

    /// `1/k <= β / 2^(s+5)` for `1 <= s <= r-1`, with `β = 1/t`.
    fn check_step_thresholds(&self) -> Result<()> {
        let inv_k = Rational::from(self.k as i64).recip();
        for s in 1..self.r {
            let bound = self.beta().mul_pow2(-(s as i32 + 5));
            if inv_k > bound {
                return Err(Error::invariant(format!(
                    "1/k = {inv_k} exceeds beta/2^(s+5) = {bound} at s = {s}"
                )));
            }
        }
        Ok(())
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn s_k(&self) -> &Rational {
        &self.s_k
    }

    /// `1 / t`.
    pub fn beta(&self) -> Rational {
        Rational::new(1, self.t as i64)
    }

    /// `Δ_1, ..., Δ_r` (slice index `i - 1`).
    pub fn deltas(&self) -> &[Rational] {
        &self.deltas
    }

    /// `u_1, ..., u_r` (slice index `i - 1`); `u_1 = 0`.
    pub fn anchors(&self) -> &[Rational] {
        &self.anchors
    }

    pub fn parts(&self) -> &[CircleSet] {
        &self.parts
    }

    pub fn delta(&self, i: usize) -> &Rational {
        &self.deltas[i - 1]
    }

    /// `u_i` for `1 <= i <= r + 1`, with `u_(r+1) = 1`.
    pub fn anchor(&self, i: usize) -> Rational {
        self.anchors.get(i - 1).cloned().unwrap_or_else(Rational::one)
    }

    pub fn part(&self, i: usize) -> &CircleSet {
        &self.parts[i - 1]
    }

    /// Left end of the `i`-th of the `k` equal pieces of `E_s`, `1 <= i <= k`.
    pub fn subinterval_start(&self, s: usize, i: u64) -> Rational {
        self.anchor(s) + Rational::from((i - 1) as i64) * self.delta(s + 1)
    }

    /// `J_(i,s) = [u_s + (i-1)Δ_(s+1), u_s + iΔ_(s+1))` for `1 <= s < r`.
    pub fn subinterval(&self, s: usize, i: u64) -> (Rational, Rational) {
        let lo = self.subinterval_start(s, i);
        let hi = &lo + self.delta(s + 1);
        (lo, hi)
    }
}
