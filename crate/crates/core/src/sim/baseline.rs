//! Non-staggered reference design: every description uses `Kζℤ`.
//!
//! Around reference point `ζz` with `r = z mod K`, the candidate tuples are
//! the integer vectors with `Σx = r`, ranked by `Σ(Kx_i − r)²` and then
//! lexicographically. The first `M` of each residue class label `V_r(0)`, and
//! a cell `z = r + Kt` adds `t` to every coordinate.

use std::collections::HashMap;

use num_integer::Roots;

use crate::labeling::{cell_sd_sum_exact, check_kappa, ssd_weight};
use crate::quantizer::{self, CentralIndex, QuantizerConfig};
use crate::{Error, Rational, Result};

#[derive(Debug, Clone)]
pub struct BaselineTable {
    config: QuantizerConfig,
    /// `classes[r][i]` labels `y0 = −⌊M/2⌋ + i` in cells with `z ≡ r (mod K)`.
    classes: Vec<Vec<Vec<i64>>>,
    inverse: HashMap<Vec<i64>, usize>,
}

/// `Σ(Kx_i − r)²`, the SSD about `ζr` in units of `ζ²`.
fn scaled_ssd(k: i64, r: i64, x: &[i64]) -> i64 {
    x.iter().map(|&xi| (k * xi - r) * (k * xi - r)).sum()
}

/// All `x ∈ ℤ^K` with `Σx = r` and `Σ(Kx_i − r)² ≤ bound`.
fn tuples_within(k: usize, r: i64, bound: i64) -> Vec<Vec<i64>> {
    fn walk(k: i64, r: i64, bound: i64, used: i64, prefix: &mut Vec<i64>, len: usize, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == len {
            let last = r - prefix.iter().sum::<i64>();
            if used + (k * last - r).pow(2) <= bound {
                prefix.push(last);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        let q = (bound - used).sqrt();
        let lo = (r - q).div_euclid(k) + i64::from((r - q).rem_euclid(k) != 0);
        let hi = (r + q).div_euclid(k);
        for x in lo..=hi {
            prefix.push(x);
            walk(k, r, bound, used + (k * x - r).pow(2), prefix, len, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(k as i64, r, bound, 0, &mut Vec::with_capacity(k), k, &mut out);
    out
}

/// The `count` cheapest tuples of residue `r`.
fn cheapest(k: usize, r: i64, count: usize) -> Vec<Vec<i64>> {
    let ki = k as i64;
    let mut bound = ki * ki;
    loop {
        let mut found = tuples_within(k, r, bound);
        if found.len() >= count {
            found.sort_by(|a, b| scaled_ssd(ki, r, a).cmp(&scaled_ssd(ki, r, b)).then_with(|| a.cmp(b)));
            found.truncate(count);
            return found;
        }
        bound *= 2;
    }
}

impl BaselineTable {
    pub fn build(config: QuantizerConfig) -> Result<Self> {
        config.validate()?;
        let classes: Vec<Vec<Vec<i64>>> = (0..config.k as i64).map(|r| cheapest(config.k, r, config.m)).collect();
        let mut inverse = HashMap::new();
        for class in &classes {
            for (i, x) in class.iter().enumerate() {
                inverse.insert(x.clone(), i);
            }
        }
        Ok(Self { config, classes, inverse })
    }

    pub fn config(&self) -> &QuantizerConfig {
        &self.config
    }

    /// Tuples of residue class `r`, in `V_r(0)` order.
    pub fn class(&self, r: usize) -> Option<&[Vec<i64>]> {
        self.classes.get(r).map(Vec::as_slice)
    }

    pub fn encode_into(&self, y: CentralIndex, out: &mut [i64]) {
        let k = self.config.ki();
        let (z, y0) = quantizer::split_central(y, &self.config);
        let x = &self.classes[z.0.rem_euclid(k) as usize][(y0.0 - self.config.first_central_in_cell()) as usize];
        let t = z.0.div_euclid(k);
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = xi + t;
        }
    }

    pub fn decode(&self, coords: &[i64]) -> Result<CentralIndex> {
        if coords.len() != self.config.k {
            return Err(Error::NotACodeword(coords.to_vec()));
        }
        let z: i64 = coords.iter().sum();
        let t = z.div_euclid(self.config.ki());
        let base: Vec<i64> = coords.iter().map(|c| c - t).collect();
        match self.inverse.get(&base) {
            Some(&i) => Ok(CentralIndex(self.config.first_central_in_cell() + i as i64 + z * self.config.mi())),
            None => Err(Error::NotACodeword(coords.to_vec())),
        }
    }

    /// Mean SSD per central point over one period of `K` cells, in units of `ζ²`.
    pub fn mean_ssd_exact(&self) -> Rational {
        let k = self.config.ki();
        let total: i64 = self
            .classes
            .iter()
            .enumerate()
            .flat_map(|(r, class)| class.iter().map(move |x| scaled_ssd(k, r as i64, x)))
            .sum();
        Rational::new(total, k * self.config.mi())
    }

    /// `D_(K,κ) / ζ²` under the high-rate approximation.
    pub fn side_distortion_exact_units(&self, kappa: usize) -> Result<Rational> {
        check_kappa(self.config.k, kappa, false)?;
        let m = self.config.mi();
        Ok(Rational::new(1, 12 * m * m)
            + cell_sd_sum_exact(&self.config) / m
            + ssd_weight(self.config.k, kappa) * self.mean_ssd_exact())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(k: usize, m: usize) -> BaselineTable {
        BaselineTable::build(QuantizerConfig::new(k, m, 1.0).unwrap()).unwrap()
    }

    /// Box search with no pruning.
    fn box_cheapest(k: usize, r: i64, count: usize, half: i64) -> Vec<Vec<i64>> {
        let mut all: Vec<Vec<i64>> = (0..k)
            .map(|_| -half..=half)
            .fold(vec![vec![]], |acc, range| {
                acc.into_iter()
                    .flat_map(|p| range.clone().map(move |x| [p.clone(), vec![x]].concat()))
                    .collect()
            })
            .into_iter()
            .filter(|x| x.iter().sum::<i64>() == r)
            .collect();
        all.sort_by(|a, b| scaled_ssd(k as i64, r, a).cmp(&scaled_ssd(k as i64, r, b)).then_with(|| a.cmp(b)));
        all.truncate(count);
        all
    }

    #[test]
    fn matches_box_search() {
        for k in 2..=4 {
            for r in 0..k as i64 {
                assert_eq!(cheapest(k, r, 12), box_cheapest(k, r, 12, 8), "K={k} r={r}");
            }
        }
    }

    #[test]
    fn single_point_values() {
        assert_eq!(table(2, 1).side_distortion_exact_units(1).unwrap(), Rational::new(7, 12));
        assert_eq!(table(3, 1).side_distortion_exact_units(1).unwrap(), Rational::new(17, 12));
        assert_eq!(table(4, 1).side_distortion_exact_units(1).unwrap(), Rational::new(31, 12));
    }

    #[test]
    fn round_trip() {
        for (k, m) in [(2, 1), (2, 4), (3, 3), (4, 5)] {
            let t = table(k, m);
            let mut coords = vec![0; k];
            for y in -2000..2000 {
                t.encode_into(CentralIndex(y), &mut coords);
                let (z, _) = quantizer::split_central(CentralIndex(y), t.config());
                assert_eq!(coords.iter().sum::<i64>(), z.0);
                assert_eq!(t.decode(&coords).unwrap(), CentralIndex(y));
            }
        }
    }

    #[test]
    fn never_beats_staggered() {
        use crate::analysis::side_distortion_exact_units;
        for k in 2..=4 {
            for m in 1..=8 {
                let c = QuantizerConfig::new(k, m, 1.0).unwrap();
                for kappa in 1..k {
                    let b = BaselineTable::build(c).unwrap().side_distortion_exact_units(kappa).unwrap();
                    assert!(b >= side_distortion_exact_units(&c, kappa).unwrap(), "K={k} M={m} κ={kappa}");
                }
            }
        }
    }
}
