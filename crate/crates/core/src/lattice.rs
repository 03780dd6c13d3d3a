//! The translated root lattice `Ǎ_{K-1} = A_{K-1} + s`.
//!
//! A coordinate vector `X ∈ ℤ^K` with `Σ x_i = 0` selects one point from each
//! side quantizer; the resulting K-tuple has centroid `0` and SSD cost
//! `J(X) = K²ζ²‖X + s‖²` with `s_i = (2i − K + 1)/(2K)`.
//!
//! Norms are kept exact. Every coset we enumerate has the form
//! `A_{K-1} + c/(2K)` for an integer offset `c`, so `4K²·‖X + c/(2K)‖²` is an
//! integer and all comparisons happen in `i64`.

use std::cmp::Ordering;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::{Error, QuantizerConfig, Rational, Result};

/// A point of `A_{K-1}`: `K ≥ 2` integers summing to zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoordVector(Vec<i64>);

impl CoordVector {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "coordinate vectors need K >= 2 entries, got {}",
                coords.len()
            )));
        }
        let sum: i64 = coords.iter().sum();
        if sum != 0 {
            return Err(Error::ConstraintViolation(format!(
                "coordinates {coords:?} sum to {sum}, not 0"
            )));
        }
        Ok(Self(coords))
    }

    pub fn origin(k: usize) -> Self {
        Self(vec![0; k])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }
}

/// The translation `s = (1/2K)·(−(K−1), −K+3, …, K−1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationVector {
    components: Vec<Rational>,
}

impl TranslationVector {
    pub fn components(&self) -> &[Rational] {
        &self.components
    }

    pub fn norm_sq(&self) -> Rational {
        self.components.iter().map(|c| c * c).sum()
    }
}

pub fn translation_vector(k: usize) -> Result<TranslationVector> {
    check_k(k)?;
    let k = k as i64;
    let components = translation_offsets(k).into_iter().map(|c| Rational::new(c, 2 * k)).collect();
    Ok(TranslationVector { components })
}

/// One shell of a theta series: `count` points at squared norm `norm_sq`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaShell {
    pub norm_sq: Rational,
    pub count: u64,
}

/// An enumerated point of `Ǎ_{K-1}` together with its exact `‖X + s‖²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePoint {
    pub coords: CoordVector,
    pub norm_sq: Rational,
}

/// Tie-break between equal-norm points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("K must be at least 2, got {k}")));
    }
    Ok(())
}

/// `2K·s` as integers: `2i − K + 1`.
fn translation_offsets(k: i64) -> Vec<i64> {
    (0..k).map(|i| 2 * i - k + 1).collect()
}

/// `2K·([i] + s)` for glue vector `[i]` of the dual lattice `A*_{K-1}`.
fn glue_offsets(k: i64, glue: i64) -> Vec<i64> {
    translation_offsets(k)
        .into_iter()
        .enumerate()
        .map(|(j, c)| if (j as i64) < k - glue { c + 2 * glue } else { c + 2 * (glue - k) })
        .collect()
}

fn scaled_norm(coords: &[i64], offsets: &[i64]) -> i64 {
    let k = coords.len() as i64;
    coords
        .iter()
        .zip(offsets)
        .map(|(&x, &c)| {
            let u = 2 * k * x + c;
            u * u
        })
        .sum()
}

fn unscale(k: usize, scaled: i64) -> Rational {
    let k = k as i64;
    Rational::new(scaled, 4 * k * k)
}

/// `‖X + s‖²` for any integer vector (the zero-sum constraint is not checked).
pub fn shifted_norm_sq(coords: &[i64]) -> Rational {
    let k = coords.len();
    unscale(k, scaled_norm(coords, &translation_offsets(k as i64)))
}

/// `J(X) / ζ² = K²‖X + s‖²`, exact.
pub fn ssd_cost_exact(x: &CoordVector) -> Rational {
    let k = x.k() as i64;
    shifted_norm_sq(x.coords()) * (k * k)
}

/// The SSD cost `J(X) = K²ζ²‖X + s‖²`.
pub fn ssd_cost(x: &CoordVector, config: &QuantizerConfig) -> Result<f64> {
    if x.k() != config.k {
        return Err(Error::ConstraintViolation(format!(
            "coordinate vector has {} entries, config has K = {}",
            x.k(),
            config.k
        )));
    }
    Ok(rational_to_f64(ssd_cost_exact(x)) * config.zeta * config.zeta)
}

pub(crate) fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// All zero-sum `X` with `Σ (2K x_j + c_j)² ≤ bound`, paired with that scaled norm.
fn points_within(offsets: &[i64], bound: i64) -> Vec<(Vec<i64>, i64)> {
    fn recurse(
        offsets: &[i64],
        bound: i64,
        prefix: &mut Vec<i64>,
        partial_norm: i64,
        partial_sum: i64,
        out: &mut Vec<(Vec<i64>, i64)>,
    ) {
        let k = offsets.len() as i64;
        let j = prefix.len();
        if j + 1 == offsets.len() {
            let x = -partial_sum;
            let u = 2 * k * x + offsets[j];
            let norm = partial_norm + u * u;
            if norm <= bound {
                prefix.push(x);
                out.push((prefix.clone(), norm));
                prefix.pop();
            }
            return;
        }
        let room = bound - partial_norm;
        let r = room.sqrt();
        // |2K x + c| <= r
        let lo = num_integer::div_ceil(-r - offsets[j], 2 * k);
        let hi = num_integer::div_floor(r - offsets[j], 2 * k);
        for x in lo..=hi {
            let u = 2 * k * x + offsets[j];
            prefix.push(x);
            recurse(offsets, bound, prefix, partial_norm + u * u, partial_sum + x, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    if bound >= 0 {
        recurse(offsets, bound, &mut Vec::with_capacity(offsets.len()), 0, 0, &mut out);
    }
    out
}

fn shells_from(k: usize, mut norms: Vec<i64>) -> Vec<ThetaShell> {
    norms.sort_unstable();
    let mut shells: Vec<ThetaShell> = Vec::new();
    for n in norms {
        let norm_sq = unscale(k, n);
        match shells.last_mut() {
            Some(last) if last.norm_sq == norm_sq => last.count += 1,
            _ => shells.push(ThetaShell { norm_sq, count: 1 }),
        }
    }
    shells
}

fn scaled_bound(k: usize, max_norm_sq: Rational) -> Result<i64> {
    if max_norm_sq <= Rational::from(0) {
        return Err(Error::InvalidConfig(format!("max norm must be positive, got {max_norm_sq}")));
    }
    let k = k as i64;
    Ok((max_norm_sq * (4 * k * k)).floor().to_integer())
}

/// The `count` points of `Ǎ_{K-1}` closest to the origin, in non-decreasing
/// norm order with lexicographic tie-break.
pub fn enumerate_points(k: usize, count: usize) -> Result<Vec<LatticePoint>> {
    enumerate_points_with(k, count, TieBreak::Lexicographic)
}

pub fn enumerate_points_with(k: usize, count: usize, tie: TieBreak) -> Result<Vec<LatticePoint>> {
    check_k(k)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let offsets = translation_offsets(k as i64);
    // The origin attains ‖s‖², so start there and deepen.
    let mut bound = scaled_norm(&vec![0; k], &offsets).max(1);
    let mut found = loop {
        let found = points_within(&offsets, bound);
        if found.len() >= count {
            break found;
        }
        bound *= 2;
    };
    found.sort_unstable_by(|(a, na), (b, nb)| {
        na.cmp(nb).then_with(|| match tie {
            TieBreak::Lexicographic => a.cmp(b),
            TieBreak::ReverseLexicographic => b.cmp(a),
        })
    });
    found.truncate(count);
    Ok(found
        .into_iter()
        .map(|(coords, n)| LatticePoint { coords: CoordVector(coords), norm_sq: unscale(k, n) })
        .collect())
}

/// Shells of `Ǎ_{K-1}` with `norm_sq ≤ max_norm_sq`.
pub fn theta_series(k: usize, max_norm_sq: Rational) -> Result<Vec<ThetaShell>> {
    check_k(k)?;
    let bound = scaled_bound(k, max_norm_sq)?;
    let norms = points_within(&translation_offsets(k as i64), bound).into_iter().map(|(_, n)| n);
    Ok(shells_from(k, norms.collect()))
}

/// Shells of `A*_{K-1} + s`, enumerated coset by coset through the glue
/// vectors: `A*_{K-1} = ∪_i ([i] + A_{K-1})`.
pub fn dual_hole_theta(k: usize, max_norm_sq: Rational) -> Result<Vec<ThetaShell>> {
    check_k(k)?;
    let bound = scaled_bound(k, max_norm_sq)?;
    let ki = k as i64;
    let norms = (0..ki)
        .flat_map(|glue| points_within(&glue_offsets(ki, glue), bound))
        .map(|(_, n)| n)
        .collect();
    Ok(shells_from(k, norms))
}

impl PartialOrd for ThetaShell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ThetaShell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm_sq.cmp(&other.norm_sq).then(self.count.cmp(&other.count))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Brute-force oracle: every zero-sum vector in `[-b, b]^K`, with its norm
    /// computed from the rational translation directly.
    fn box_points(k: usize, b: i64) -> Vec<(Vec<i64>, Rational)> {
        let s: Vec<Rational> = (0..k as i64).map(|i| r(2 * i - k as i64 + 1, 2 * k as i64)).collect();
        let mut out = Vec::new();
        let mut x = vec![-b; k];
        loop {
            if x.iter().sum::<i64>() == 0 {
                let n = x.iter().zip(&s).map(|(&xi, si)| (Rational::from(xi) + si) * (Rational::from(xi) + si)).sum();
                out.push((x.clone(), n));
            }
            let mut i = 0;
            while i < k && x[i] == b {
                x[i] = -b;
                i += 1;
            }
            if i == k {
                return out;
            }
            x[i] += 1;
        }
    }

    fn box_theta(k: usize, b: i64, max: Rational) -> Vec<ThetaShell> {
        let mut counts: BTreeMap<Rational, u64> = BTreeMap::new();
        for (_, n) in box_points(k, b) {
            if n <= max {
                *counts.entry(n).or_default() += 1;
            }
        }
        counts.into_iter().map(|(norm_sq, count)| ThetaShell { norm_sq, count }).collect()
    }

    #[test]
    fn translation_examples() {
        assert_eq!(translation_vector(2).unwrap().components(), &[r(-1, 4), r(1, 4)]);
        assert_eq!(translation_vector(3).unwrap().components(), &[r(-1, 3), r(0, 1), r(1, 3)]);
        assert_eq!(
            translation_vector(4).unwrap().components(),
            &[r(-3, 8), r(-1, 8), r(1, 8), r(3, 8)]
        );
        assert!(translation_vector(1).is_err());
        for k in 2..=9 {
            let s = translation_vector(k).unwrap();
            assert_eq!(s.components().iter().sum::<Rational>(), r(0, 1));
            let k = k as i64;
            assert_eq!(s.norm_sq(), r(k * k - 1, 12 * k));
        }
    }

    #[test]
    fn coord_vector_constraint() {
        assert!(CoordVector::new(vec![1, 0]).is_err());
        assert!(CoordVector::new(vec![0]).is_err());
        assert!(CoordVector::new(vec![2, -1, -1]).is_ok());
    }

    #[test]
    fn ssd_examples() {
        let c2 = QuantizerConfig::new(2, 1, 1.0).unwrap();
        let c3 = QuantizerConfig::new(3, 1, 1.0).unwrap();
        assert_eq!(ssd_cost(&CoordVector::origin(2), &c2).unwrap(), 0.5);
        assert_eq!(ssd_cost(&CoordVector::new(vec![1, -1]).unwrap(), &c2).unwrap(), 4.5);
        assert_eq!(ssd_cost(&CoordVector::origin(3), &c3).unwrap(), 2.0);
        assert!(ssd_cost(&CoordVector::origin(3), &c2).is_err());
        let half = QuantizerConfig::new(2, 1, 0.5).unwrap();
        assert_eq!(ssd_cost(&CoordVector::origin(2), &half).unwrap(), 0.125);
    }

    #[test]
    fn enumeration_examples() {
        let pts = enumerate_points(2, 2).unwrap();
        assert_eq!(pts[0].coords.coords(), &[0, 0]);
        assert_eq!(pts[1].coords.coords(), &[1, -1]);
        assert_eq!(pts[0].norm_sq, r(1, 8));
        assert_eq!(pts[1].norm_sq, r(9, 8));
        let norms: Vec<Rational> = enumerate_points(2, 4).unwrap().into_iter().map(|p| p.norm_sq).collect();
        assert_eq!(norms, vec![r(1, 8), r(9, 8), r(25, 8), r(49, 8)]);
        assert_eq!(enumerate_points(3, 1).unwrap()[0].coords, CoordVector::origin(3));
        assert!(enumerate_points(3, 0).unwrap().is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for k in 2..=5usize {
            let count = if k == 2 { 8 } else { 40 };
            let pts = enumerate_points(k, count).unwrap();
            let last = pts.last().unwrap().norm_sq;
            let mut oracle: Vec<(Vec<i64>, Rational)> = box_points(k, 5);
            oracle.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
            // Outside the box some |x_i + s_i| exceeds 11/2.
            assert!(last < r(121, 4));
            let expected: Vec<_> = oracle.into_iter().take(count).collect();
            for (p, (coords, n)) in pts.iter().zip(&expected) {
                assert_eq!(p.coords.coords(), coords.as_slice(), "K = {k}");
                assert_eq!(p.norm_sq, *n);
            }
        }
    }

    #[test]
    fn theta_examples() {
        // One point per shell for K = 2: X = (m, -m) has norm (4m - 1)²/8.
        assert_eq!(
            theta_series(2, r(4, 1)).unwrap(),
            vec![
                ThetaShell { norm_sq: r(1, 8), count: 1 },
                ThetaShell { norm_sq: r(9, 8), count: 1 },
                ThetaShell { norm_sq: r(25, 8), count: 1 },
            ]
        );
        assert_eq!(theta_series(3, r(1, 1)).unwrap()[0], ThetaShell { norm_sq: r(2, 9), count: 1 });
        for k in 2..=7usize {
            let ki = k as i64;
            assert_eq!(theta_series(k, r(10, 1)).unwrap()[0].norm_sq, r(ki * ki - 1, 12 * ki));
        }
        assert!(theta_series(2, r(0, 1)).is_err());
    }

    #[test]
    fn theta_matches_brute_force() {
        for k in 2..=5usize {
            let max = r(6, 1);
            assert_eq!(theta_series(k, max).unwrap(), box_theta(k, 4, max), "K = {k}");
        }
    }

    #[test]
    fn k2_shells_are_half_odd_squares() {
        let shells = theta_series(2, r(200, 1)).unwrap();
        for (m, shell) in shells.iter().enumerate() {
            let m = m as i64;
            assert_eq!(shell.norm_sq, r(2 * m + 1, 2) * r(2 * m + 1, 2) / 2);
            assert_eq!(shell.count, 1);
        }
    }

    #[test]
    fn dual_theta_examples() {
        let dual = dual_hole_theta(2, r(4, 1)).unwrap();
        assert_eq!(dual[0], ThetaShell { norm_sq: r(1, 8), count: 2 });
        for k in 2..=4usize {
            let direct = theta_series(k, r(10, 1)).unwrap();
            let dual = dual_hole_theta(k, r(10, 1)).unwrap();
            assert_eq!(direct.len(), dual.len());
            for (a, b) in direct.iter().zip(&dual) {
                assert_eq!(a.norm_sq, b.norm_sq);
                assert_eq!(a.count * k as u64, b.count);
            }
        }
    }

    #[test]
    fn glue_vectors_are_cyclic_shifts_of_s() {
        // 2K·SH^i(s) equals 2K·(s + [i]).
        for k in 2..=7i64 {
            let s = translation_offsets(k);
            for i in 0..k {
                let shifted: Vec<i64> = (0..k).map(|j| s[((j + i) % k) as usize]).collect();
                assert_eq!(glue_offsets(k, i), shifted);
            }
        }
    }

    #[test]
    fn prefix_ssd_sums_ignore_tie_break() {
        for k in 2..=5usize {
            for m in 1..=30 {
                let lex: Rational = enumerate_points_with(k, m, TieBreak::Lexicographic)
                    .unwrap()
                    .iter()
                    .map(|p| p.norm_sq)
                    .sum();
                let rev: Rational = enumerate_points_with(k, m, TieBreak::ReverseLexicographic)
                    .unwrap()
                    .iter()
                    .map(|p| p.norm_sq)
                    .sum();
                assert_eq!(lex, rev);
            }
        }
    }

    proptest! {
        #[test]
        fn enumeration_is_sorted_complete_and_zero_sum(k in 2usize..=5, count in 1usize..60) {
            let pts = enumerate_points(k, count).unwrap();
            prop_assert_eq!(pts.len(), count);
            for w in pts.windows(2) {
                prop_assert!(w[0].norm_sq <= w[1].norm_sq);
            }
            for p in &pts {
                prop_assert_eq!(p.coords.coords().iter().sum::<i64>(), 0);
                prop_assert_eq!(shifted_norm_sq(p.coords.coords()), p.norm_sq);
            }
            // Completeness: nothing strictly closer than the last point is missing.
            let last = pts.last().unwrap().norm_sq;
            let s_norm = translation_vector(k).unwrap().norm_sq();
            let radius = rational_to_f64(last).sqrt() + rational_to_f64(s_norm).sqrt() + 1.0;
            let closer = box_points(k, radius.ceil() as i64)
                .into_iter()
                .filter(|(_, n)| *n < last)
                .count();
            prop_assert!(pts.iter().filter(|p| p.norm_sq < last).count() == closer);
        }
    }
}
