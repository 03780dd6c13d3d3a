//! Side, central and reference quantizers.
//!
//! With `K` descriptions and reference step `ζ`:
//!
//! * side quantizer `i` holds the points `Kζ·x + (2i − K + 1)·ζ/2`,
//! * the reference quantizer is `ζ·ℤ`, the set of all K-tuple centroids,
//! * the central quantizer holds `M` points per reference cell,
//!   `(ζ/M)·y + (ζ/2M)·((M + 1) mod 2)`.
//!
//! Index arithmetic is exact; real values are produced only at the API edge.

use serde::{Deserialize, Serialize};

use crate::{Error, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    /// Number of descriptions.
    pub k: usize,
    /// Central points per reference cell.
    pub m: usize,
    /// Reference cell width.
    pub zeta: f64,
}

impl QuantizerConfig {
    pub fn new(k: usize, m: usize, zeta: f64) -> Result<Self> {
        let config = Self { k, m, zeta };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig(format!("K must be at least 2, got {}", self.k)));
        }
        if self.m < 1 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        if !(self.zeta.is_finite() && self.zeta > 0.0) {
            return Err(Error::InvalidConfig(format!("zeta must be positive, got {}", self.zeta)));
        }
        Ok(())
    }

    /// The redundancy index `N = K·M`: central points per side cell.
    pub fn redundancy_index(&self) -> usize {
        self.k * self.m
    }

    pub(crate) fn ki(&self) -> i64 {
        self.k as i64
    }

    pub(crate) fn mi(&self) -> i64 {
        self.m as i64
    }

    /// `1` when `M` is even (central points sit off the reference points), else `0`.
    pub(crate) fn central_parity(&self) -> i64 {
        (self.mi() + 1) % 2
    }

    /// Smallest central coordinate inside `V_r(0)`.
    pub fn first_central_in_cell(&self) -> i64 {
        -(self.mi() / 2)
    }
}

/// A point of side quantizer `description`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SideIndex {
    pub description: usize,
    pub x: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CentralIndex(pub i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReferenceIndex(pub i64);

/// Side point in units of `ζ`, doubled so it stays integral: `2Kx + 2i − K + 1`.
pub(crate) fn side_point_twice(k: i64, description: i64, x: i64) -> i64 {
    2 * k * x + 2 * description - k + 1
}

pub fn side_point(idx: SideIndex, config: &QuantizerConfig) -> Result<f64> {
    Ok(crate::lattice::rational_to_f64(side_point_exact(idx, config)?) * config.zeta)
}

/// Side point in units of `ζ`.
pub fn side_point_exact(idx: SideIndex, config: &QuantizerConfig) -> Result<Rational> {
    if idx.description >= config.k {
        return Err(Error::InvalidIndex { index: idx.description, k: config.k });
    }
    Ok(Rational::new(side_point_twice(config.ki(), idx.description as i64, idx.x), 2))
}

pub fn central_point(y: CentralIndex, config: &QuantizerConfig) -> f64 {
    let m = config.m as f64;
    config.zeta / m * y.0 as f64 + config.zeta / (2.0 * m) * config.central_parity() as f64
}

/// Central point in units of `ζ`.
pub fn central_point_exact(y: CentralIndex, config: &QuantizerConfig) -> Rational {
    Rational::new(2 * y.0 + config.central_parity(), 2 * config.mi())
}

pub fn reference_point(z: ReferenceIndex, config: &QuantizerConfig) -> f64 {
    config.zeta * z.0 as f64
}

/// Nearest central point; a value midway between two points goes to the smaller index.
pub fn quantize_central(v: f64, config: &QuantizerConfig) -> Result<CentralIndex> {
    if !v.is_finite() {
        return Err(Error::Domain(v));
    }
    let t = v * config.m as f64 / config.zeta - 0.5 * config.central_parity() as f64;
    Ok(CentralIndex((t - 0.5).ceil() as i64))
}

/// The `M` central coordinates strictly closer to `ζz` than to any other reference point.
pub fn discrete_voronoi(z: ReferenceIndex, config: &QuantizerConfig) -> Vec<CentralIndex> {
    let start = config.first_central_in_cell() + z.0 * config.mi();
    (start..start + config.mi()).map(CentralIndex).collect()
}

/// Splits a central coordinate into its reference cell `z` and the
/// representative `y0 ∈ V_r(0)`, so that `y = y0 + M·z`.
pub fn split_central(y: CentralIndex, config: &QuantizerConfig) -> (ReferenceIndex, CentralIndex) {
    let m = config.mi();
    let z = (y.0 - config.first_central_in_cell()).div_euclid(m);
    (ReferenceIndex(z), CentralIndex(y.0 - m * z))
}

/// Which side quantizer plays role `j` around reference point `ζz`:
/// `(A_{z mod K}, …, A_{(z+K−1) mod K})`.
pub fn quantizer_tuple(z: ReferenceIndex, config: &QuantizerConfig) -> Vec<usize> {
    let k = config.ki();
    (0..k).map(|j| (z.0 + j).rem_euclid(k) as usize).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn cfg(k: usize, m: usize) -> QuantizerConfig {
        QuantizerConfig::new(k, m, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(QuantizerConfig::new(1, 1, 1.0).is_err());
        assert!(QuantizerConfig::new(2, 0, 1.0).is_err());
        assert!(QuantizerConfig::new(2, 1, 0.0).is_err());
        assert!(QuantizerConfig::new(2, 1, f64::NAN).is_err());
        assert_eq!(cfg(3, 4).redundancy_index(), 12);
    }

    #[test]
    fn side_points() {
        let c = cfg(2, 1);
        assert_eq!(side_point(SideIndex { description: 0, x: 0 }, &c).unwrap(), -0.5);
        assert_eq!(side_point(SideIndex { description: 1, x: 0 }, &c).unwrap(), 0.5);
        assert_eq!(side_point(SideIndex { description: 1, x: 0 }, &cfg(3, 1)).unwrap(), 0.0);
        assert_eq!(
            side_point(SideIndex { description: 2, x: 0 }, &c),
            Err(Error::InvalidIndex { index: 2, k: 2 })
        );
    }

    #[test]
    fn central_points() {
        assert_eq!(central_point(CentralIndex(0), &cfg(2, 1)), 0.0);
        assert_eq!(central_point(CentralIndex(0), &cfg(2, 2)), 0.25);
        assert_eq!(central_point(CentralIndex(-1), &cfg(2, 2)), -0.25);
        assert_eq!(central_point_exact(CentralIndex(3), &cfg(2, 2)), Rational::new(7, 4));
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_central(0.4, &cfg(2, 1)).unwrap(), CentralIndex(0));
        assert_eq!(quantize_central(0.3, &cfg(2, 2)).unwrap(), CentralIndex(0));
        assert_eq!(quantize_central(0.5, &cfg(2, 2)).unwrap(), CentralIndex(0));
        assert_eq!(quantize_central(0.5, &cfg(2, 1)).unwrap(), CentralIndex(0));
        assert_eq!(quantize_central(-0.5, &cfg(2, 1)).unwrap(), CentralIndex(-1));
        assert_eq!(quantize_central(f64::INFINITY, &cfg(2, 1)), Err(Error::Domain(f64::INFINITY)));
    }

    #[test]
    fn quantize_round_trip() {
        for m in 1..=6 {
            let c = QuantizerConfig::new(3, m, 0.37).unwrap();
            for y in -10_000..=10_000 {
                let v = central_point(CentralIndex(y), &c);
                assert_eq!(quantize_central(v, &c).unwrap(), CentralIndex(y));
            }
        }
    }

    #[test]
    fn voronoi_examples() {
        let ys = |m, z| -> Vec<i64> {
            discrete_voronoi(ReferenceIndex(z), &cfg(2, m)).into_iter().map(|c| c.0).collect()
        };
        assert_eq!(ys(2, 0), vec![-1, 0]);
        assert_eq!(ys(3, 0), vec![-1, 0, 1]);
        assert_eq!(ys(1, 5), vec![5]);
    }

    /// Checks the closed-form cell against the strict-nearest definition.
    #[test]
    fn voronoi_matches_definition() {
        for m in 1..=16 {
            let c = cfg(2, m);
            for z in -5i64..=5 {
                let cell = discrete_voronoi(ReferenceIndex(z), &c);
                assert_eq!(cell.len(), m);
                let lo = (z - 2) * m as i64;
                let hi = (z + 2) * m as i64;
                let by_definition: Vec<CentralIndex> = (lo..=hi)
                    .map(CentralIndex)
                    .filter(|&y| {
                        let p = central_point_exact(y, &c);
                        let d = |r: i64| {
                            let e = p - Rational::from(r);
                            e * e
                        };
                        d(z) < d(z - 1) && d(z) < d(z + 1)
                    })
                    .collect();
                assert_eq!(cell, by_definition, "M = {m}, z = {z}");
            }
        }
    }

    #[test]
    fn no_central_point_on_reference_boundary() {
        for m in 1..=16 {
            let c = cfg(2, m);
            for y in -1000..=1000 {
                let p = central_point_exact(CentralIndex(y), &c);
                // Boundaries are z + 1/2.
                assert_ne!((p - Rational::new(1, 2)).fract(), Rational::from(0));
            }
        }
    }

    #[test]
    fn split_is_consistent_with_voronoi() {
        let c = cfg(3, 4);
        for z in -4..=4 {
            for y in discrete_voronoi(ReferenceIndex(z), &c) {
                let (zz, y0) = split_central(y, &c);
                assert_eq!(zz, ReferenceIndex(z));
                assert!(discrete_voronoi(ReferenceIndex(0), &c).contains(&y0));
            }
        }
    }

    #[test]
    fn quantizer_tuple_examples() {
        let c = cfg(3, 1);
        assert_eq!(quantizer_tuple(ReferenceIndex(0), &c), vec![0, 1, 2]);
        assert_eq!(quantizer_tuple(ReferenceIndex(1), &c), vec![1, 2, 0]);
        assert_eq!(quantizer_tuple(ReferenceIndex(-1), &c), vec![2, 0, 1]);
        for z in -20..20 {
            assert_eq!(quantizer_tuple(ReferenceIndex(z), &c), quantizer_tuple(ReferenceIndex(z + 3), &c));
        }
    }

    #[test]
    fn every_tuple_centroid_is_a_reference_point() {
        for k in 2..=5usize {
            // All tuples with coordinates in a small box.
            let mut coords = vec![-2i64; k];
            loop {
                let twice: i64 = (0..k).map(|i| side_point_twice(k as i64, i as i64, coords[i])).sum();
                // Mean = twice / (2K) must be an integer.
                assert_eq!(twice % (2 * k as i64), 0);
                assert_eq!(twice / (2 * k as i64), coords.iter().sum::<i64>());
                let mut i = 0;
                while i < k && coords[i] == 2 {
                    coords[i] = -2;
                    i += 1;
                }
                if i == k {
                    break;
                }
                coords[i] += 1;
            }
        }
    }

    #[test]
    fn central_point_counts_per_cell() {
        for k in 2..=4usize {
            for m in 1..=5usize {
                let c = cfg(k, m);
                let points: Vec<Rational> =
                    (-100..100).map(|y| central_point_exact(CentralIndex(y), &c)).collect();
                // Reference cell around 0 is (-1/2, 1/2); side cell of description 0
                // around its point -(K-1)/2 has half-width K/2.
                let in_ref = points.iter().filter(|p| p.abs() < Rational::new(1, 2)).count();
                assert_eq!(in_ref, m);
                let centre = Rational::new(-(k as i64 - 1), 2);
                let half = Rational::new(k as i64, 2);
                let in_side = points.iter().filter(|&&p| (p - centre).abs() < half).count();
                assert_eq!(in_side, k * m);
            }
        }
    }
}
