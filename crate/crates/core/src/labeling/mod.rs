//! The labeling function `α`: central points to K-tuples of side points.
//!
//! The `M` central points of the fundamental reference cell `V_r(0)` are
//! paired with the `M` lattice points of `Ǎ_{K-1}` nearest the origin
//! (`y = −⌊M/2⌋ + i ↦ X_i`). A central point `λ_c + mζ` in cell `m` gets
//!
//! ```text
//! α_{(m+i) mod K}(λ_c + mζ) = α_i(λ_c) + ⌊(m + i)/K⌋
//! ```
//!
//! which moves every side value by exactly `mζ`, so the tuple centroid is `mζ`.

mod oracle;

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::lattice::{self, CoordVector, LatticePoint};
use crate::quantizer::{
    self, central_point_exact, side_point_twice, CentralIndex, QuantizerConfig, ReferenceIndex, SideIndex,
};
use crate::{Error, Rational, Result};

pub use oracle::{brute_force_oracle, brute_force_oracle_exact, OracleMode, OracleOutcome};

/// The `β` table on `V_r(0)` plus its inverse.
#[derive(Debug, Clone)]
pub struct LabelTable {
    config: QuantizerConfig,
    /// `entries[i]` labels central coordinate `first + i`.
    entries: Vec<CoordVector>,
    inverse: HashMap<Vec<i64>, usize>,
}

/// K side-quantizer points, one per description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KTuple {
    /// `coords[i]` is the coordinate on side quantizer `i`.
    pub coords: Vec<i64>,
    pub values: Vec<f64>,
}

impl KTuple {
    pub fn side_indices(&self) -> impl Iterator<Item = SideIndex> + '_ {
        self.coords.iter().enumerate().map(|(description, &x)| SideIndex { description, x })
    }

    /// The tuple centroid is `ζ·Σx_i`.
    pub fn centroid_index(&self) -> ReferenceIndex {
        ReferenceIndex(self.coords.iter().sum())
    }
}

/// Which descriptions arrived.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChannelPattern {
    received: Vec<usize>,
}

impl ChannelPattern {
    pub fn new(mut received: Vec<usize>, k: usize) -> Result<Self> {
        received.sort_unstable();
        received.dedup();
        if received.is_empty() {
            return Err(Error::InvalidConfig("a channel pattern needs at least one description".into()));
        }
        if let Some(&bad) = received.iter().find(|&&i| i >= k) {
            return Err(Error::InvalidIndex { index: bad, k });
        }
        Ok(Self { received })
    }

    /// All `C(K, κ)` patterns with `κ` received descriptions, in lexicographic order.
    pub fn all(k: usize, kappa: usize) -> Result<Vec<Self>> {
        check_kappa(k, kappa, true)?;
        Ok((0..k).combinations(kappa).map(|received| Self { received }).collect())
    }

    pub fn received(&self) -> &[usize] {
        &self.received
    }

    pub fn kappa(&self) -> usize {
        self.received.len()
    }

    pub fn mask(&self) -> u32 {
        self.received.iter().fold(0, |m, &i| m | (1 << i))
    }
}

impl std::fmt::Display for ChannelPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.received.iter().join(","))
    }
}

pub(crate) fn check_kappa(k: usize, kappa: usize, allow_full: bool) -> Result<()> {
    let max = if allow_full { k } else { k - 1 };
    if kappa == 0 || kappa > max {
        return Err(Error::KappaOutOfRange { kappa, k });
    }
    Ok(())
}

/// `(K − κ) / (Kκ(K − 1))`, the SSD weight in the cost decomposition.
pub fn ssd_weight(k: usize, kappa: usize) -> Rational {
    let (k, kappa) = (k as i64, kappa as i64);
    Rational::new(k - kappa, k * kappa * (k - 1))
}

impl LabelTable {
    /// Labels `V_r(0)` with the first `M` enumerated lattice points.
    pub fn build(config: QuantizerConfig) -> Result<Self> {
        config.validate()?;
        let points = lattice::enumerate_points(config.k, config.m)?;
        Self::with_assignment(config, points.into_iter().map(|p| p.coords).collect())
    }

    /// A table from an explicit `β`: `points[i]` labels `y = −⌊M/2⌋ + i`.
    /// Only bijectivity and the zero-sum shape are checked, not optimality.
    pub fn with_assignment(config: QuantizerConfig, points: Vec<CoordVector>) -> Result<Self> {
        config.validate()?;
        if points.len() != config.m {
            return Err(Error::InvalidConfig(format!(
                "need {} table entries, got {}",
                config.m,
                points.len()
            )));
        }
        let mut inverse = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.k() != config.k {
                return Err(Error::InvalidConfig(format!("entry {p:?} does not have K = {} coordinates", config.k)));
            }
            if inverse.insert(p.coords().to_vec(), i).is_some() {
                return Err(Error::InvalidConfig(format!("entry {p:?} used twice")));
            }
        }
        Ok(Self { config, entries: points, inverse })
    }

    pub fn config(&self) -> &QuantizerConfig {
        &self.config
    }

    /// `(y, X)` pairs over `V_r(0)`.
    pub fn entries(&self) -> impl Iterator<Item = (CentralIndex, &CoordVector)> {
        let first = self.config.first_central_in_cell();
        self.entries.iter().enumerate().map(move |(i, x)| (CentralIndex(first + i as i64), x))
    }

    pub fn entry(&self, y0: CentralIndex) -> Option<&CoordVector> {
        let i = y0.0 - self.config.first_central_in_cell();
        usize::try_from(i).ok().and_then(|i| self.entries.get(i))
    }

    /// `Σ_i J(X_i) / ζ²` over the table.
    pub fn ssd_sum_exact(&self) -> Rational {
        self.entries.iter().map(lattice::ssd_cost_exact).sum()
    }

    /// Writes the side coordinates of `α(y)` into `out` (length `K`).
    pub fn encode_into(&self, y: CentralIndex, out: &mut [i64]) {
        let k = self.config.ki();
        let (z, y0) = quantizer::split_central(y, &self.config);
        let x = &self.entries[(y0.0 - self.config.first_central_in_cell()) as usize];
        for (i, &xi) in x.coords().iter().enumerate() {
            let shifted = z.0 + i as i64;
            out[shifted.rem_euclid(k) as usize] = xi + shifted.div_euclid(k);
        }
    }

    /// Inverse of [`LabelTable::encode_into`].
    pub fn decode(&self, coords: &[i64]) -> Result<CentralIndex> {
        let k = self.config.ki();
        if coords.len() != self.config.k {
            return Err(Error::NotACodeword(coords.to_vec()));
        }
        let m: i64 = coords.iter().sum();
        let base: Vec<i64> = (0..k)
            .map(|i| {
                let shifted = m + i;
                coords[shifted.rem_euclid(k) as usize] - shifted.div_euclid(k)
            })
            .collect();
        match self.inverse.get(&base) {
            Some(&i) => Ok(CentralIndex(self.config.first_central_in_cell() + i as i64 + m * self.config.mi())),
            None => Err(Error::NotACodeword(coords.to_vec())),
        }
    }

    /// Side values of a coordinate tuple, in units of `ζ` and doubled.
    pub(crate) fn side_values_twice(&self, coords: &[i64]) -> Vec<i64> {
        let k = self.config.ki();
        coords.iter().enumerate().map(|(i, &x)| side_point_twice(k, i as i64, x)).collect()
    }
}

/// `α(y)`.
pub fn label(y: CentralIndex, table: &LabelTable) -> KTuple {
    let k = table.config.k;
    let mut coords = vec![0; k];
    table.encode_into(y, &mut coords);
    let values = table
        .side_values_twice(&coords)
        .into_iter()
        .map(|v| 0.5 * v as f64 * table.config.zeta)
        .collect();
    KTuple { coords, values }
}

/// `α⁻¹`: the central coordinate labeled by the given side coordinates.
pub fn unlabel(coords: &[i64], table: &LabelTable) -> Result<CentralIndex> {
    table.decode(coords)
}

/// Sum over all `κ`-subsets of `(λ_c − mean of the subset)²`, by direct enumeration.
pub fn subset_cost<T>(central: T, values: &[T], kappa: usize) -> Result<T>
where
    T: Num + Copy + FromPrimitive,
{
    check_kappa(values.len(), kappa, true)?;
    let denom = T::from_usize(kappa).expect("kappa fits");
    Ok(values.iter().combinations(kappa).fold(T::zero(), |acc, subset| {
        let mean = subset.into_iter().fold(T::zero(), |s, &v| s + v) / denom;
        let e = central - mean;
        acc + e * e
    }))
}

/// `C(K,κ)·[(λ_c − λ̄)² + (K−κ)/(Kκ(K−1))·Σ(λ_i − λ̄)²]`.
pub fn decomposed_cost<T>(central: T, values: &[T], kappa: usize) -> Result<T>
where
    T: Num + Copy + FromPrimitive,
{
    let k = values.len();
    check_kappa(k, kappa, true)?;
    let kt = T::from_usize(k).expect("K fits");
    let centroid = values.iter().fold(T::zero(), |s, &v| s + v) / kt;
    let sd = (central - centroid) * (central - centroid);
    let ssd = values.iter().fold(T::zero(), |s, &v| s + (v - centroid) * (v - centroid));
    let weight = T::from_usize(k - kappa).expect("fits")
        / T::from_usize(k * kappa * (k - 1)).expect("fits");
    let binom = T::from_u64(binomial(k as u64, kappa as u64)).expect("fits");
    Ok(binom * (sd + weight * ssd))
}

pub(crate) fn binomial(n: u64, r: u64) -> u64 {
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `B(λ_c, κ) / ζ²` for the tuple labeling `y`.
pub fn tuple_cost_exact(y: CentralIndex, kappa: usize, table: &LabelTable) -> Result<Rational> {
    check_kappa(table.config.k, kappa, true)?;
    let mut coords = vec![0; table.config.k];
    table.encode_into(y, &mut coords);
    let values: Vec<Rational> =
        table.side_values_twice(&coords).into_iter().map(|v| Rational::new(v, 2)).collect();
    subset_cost(central_point_exact(y, &table.config), &values, kappa)
}

pub fn tuple_cost(y: CentralIndex, kappa: usize, table: &LabelTable) -> Result<f64> {
    let zeta = table.config.zeta;
    Ok(lattice::rational_to_f64(tuple_cost_exact(y, kappa, table)?) * zeta * zeta)
}

/// `Σ_{λ_c ∈ V_r(0)} λ_c² / ζ²`.
pub fn cell_sd_sum_exact(config: &QuantizerConfig) -> Rational {
    quantizer::discrete_voronoi(ReferenceIndex(0), config)
        .into_iter()
        .map(|y| {
            let c = central_point_exact(y, config);
            c * c
        })
        .sum()
}

/// `(1/M)[Σ λ_c² + (K−κ)/(Kκ(K−1))·Σ J(X_i)] / ζ²` over `V_r(0)`.
pub fn average_cost_exact(kappa: usize, table: &LabelTable) -> Result<Rational> {
    let config = &table.config;
    check_kappa(config.k, kappa, false)?;
    let sum = cell_sd_sum_exact(config) + ssd_weight(config.k, kappa) * table.ssd_sum_exact();
    Ok(sum / config.mi())
}

pub fn average_cost(kappa: usize, table: &LabelTable) -> Result<f64> {
    let zeta = table.config.zeta;
    Ok(lattice::rational_to_f64(average_cost_exact(kappa, table)?) * zeta * zeta)
}

/// Cost of one receive pattern summed over a full period of `K` reference cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCost {
    pub pattern: ChannelPattern,
    pub cost: f64,
    #[serde(skip)]
    pub cost_exact: Rational,
}

pub fn balance_check(config: &QuantizerConfig, kappa: usize) -> Result<Vec<PatternCost>> {
    check_kappa(config.k, kappa, false)?;
    let table = LabelTable::build(*config)?;
    pattern_costs(&table, kappa)
}

pub(crate) fn pattern_costs(table: &LabelTable, kappa: usize) -> Result<Vec<PatternCost>> {
    let config = &table.config;
    let ys: Vec<CentralIndex> = (0..config.ki())
        .flat_map(|z| quantizer::discrete_voronoi(ReferenceIndex(z), config))
        .collect();
    let mut coords = vec![0; config.k];
    let tuples: Vec<(Rational, Vec<i64>)> = ys
        .iter()
        .map(|&y| {
            table.encode_into(y, &mut coords);
            (central_point_exact(y, config), table.side_values_twice(&coords))
        })
        .collect();
    Ok(ChannelPattern::all(config.k, kappa)?
        .into_iter()
        .map(|pattern| {
            let cost_exact: Rational = tuples
                .iter()
                .map(|(c, twice)| {
                    let sum: i64 = pattern.received().iter().map(|&i| twice[i]).sum();
                    let e = c - Rational::new(sum, 2 * kappa as i64);
                    e * e
                })
                .sum();
            let cost = lattice::rational_to_f64(cost_exact) * config.zeta * config.zeta;
            PatternCost { pattern, cost, cost_exact }
        })
        .collect())
}

/// Checks that the SSD of the tuple with coordinates `x` about its centroid
/// `ζz` equals `J(X̌)`, `X̌_i = x_{(z+i) mod K} − ⌊(z+i)/K⌋`.
pub fn shifted_ssd_check(z: i64, x: &[i64], config: &QuantizerConfig) -> Result<bool> {
    let k = config.ki();
    if x.len() != config.k {
        return Err(Error::ConstraintViolation(format!("expected {} coordinates, got {}", config.k, x.len())));
    }
    let sum: i64 = x.iter().sum();
    if sum != z {
        return Err(Error::ConstraintViolation(format!(
            "coordinates {x:?} have centroid {sum}ζ, not {z}ζ"
        )));
    }
    let direct: Rational = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let e = Rational::new(side_point_twice(k, i as i64, xi), 2) - z;
            e * e
        })
        .sum();
    let shifted: Vec<i64> = (0..k)
        .map(|i| x[(z + i).rem_euclid(k) as usize] - (z + i).div_euclid(k))
        .collect();
    let via_lattice = lattice::ssd_cost_exact(&CoordVector::new(shifted)?);
    Ok(direct == via_lattice)
}

/// Convenience: the table points with their norms.
pub fn table_points(config: &QuantizerConfig) -> Result<Vec<LatticePoint>> {
    lattice::enumerate_points(config.k, config.m)
}
