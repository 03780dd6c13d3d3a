//! Exhaustive search over index assignments for one reference cell.
//!
//! Candidates are generated directly from side-quantizer points, not from the
//! lattice enumerator, so agreement with [`average_cost`](super::average_cost)
//! is a check of the construction rather than a restatement of it.

use crate::quantizer::{self, central_point_exact, side_point_twice, QuantizerConfig, ReferenceIndex};
use crate::{lattice, Error, Rational, Result};
use pathfinding::kuhn_munkres::kuhn_munkres_min;
use pathfinding::matrix::Matrix;

use super::{check_kappa, ssd_weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// Only tuples whose centroid is the cell's own reference point `0`.
    #[default]
    CentroidZero,
    /// Tuples centred on a reference point adjacent to the central point's own.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// Minimum average cost per central point, in units of `ζ²`.
    pub average_cost: Rational,
    /// For each central point in order: the chosen canonical side coordinates.
    pub assignment: Vec<Vec<i64>>,
}

struct Candidate {
    coords: Vec<i64>,
    centroid: i64,
    ssd: Rational,
}

/// SSD of the tuple about `ζ·centroid`, in units of `ζ²`.
fn tuple_ssd(k: i64, coords: &[i64], centroid: i64) -> Rational {
    coords
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let e = Rational::new(side_point_twice(k, i as i64, x) - 2 * centroid, 2);
            e * e
        })
        .sum()
}

/// The `count` cheapest tuples (lexicographic tie-break) with centroid `ζ·centroid`.
fn cheapest_tuples(k: usize, centroid: i64, count: usize) -> Vec<Candidate> {
    let ki = k as i64;
    let mut half_width = 1i64;
    loop {
        let mut found = Vec::new();
        let mut x = vec![-half_width; k];
        'outer: loop {
            if x.iter().sum::<i64>() == centroid {
                found.push(Candidate { coords: x.clone(), centroid, ssd: tuple_ssd(ki, &x, centroid) });
            }
            let mut i = 0;
            while x[i] == half_width {
                x[i] = -half_width;
                i += 1;
                if i == k {
                    break 'outer;
                }
            }
            x[i] += 1;
        }
        found.sort_by(|a, b| a.ssd.cmp(&b.ssd).then_with(|| a.coords.cmp(&b.coords)));
        // Any tuple outside the box has one side point at least
        // K(w+1) − (K−1)/2 from the origin, hence that far minus |centroid| from the centroid.
        let reach = Rational::new(2 * ki * (half_width + 1) - (ki - 1) - 2 * centroid.abs(), 2);
        if found.len() >= count && reach > Rational::from(0) && found[count - 1].ssd < reach * reach {
            found.truncate(count);
            return found;
        }
        half_width += 1;
    }
}

/// Minimum average cost over injective assignments of central points to
/// candidate tuples, in units of `ζ²`.
///
/// In [`OracleMode::CentroidZero`] the `M` points of `V_r(0)` choose among
/// centroid-0 tuples. In [`OracleMode::Relaxed`] the `KM` points of cells
/// `0..K` may use any tuple centred on their own or an adjacent reference
/// point. Tuples that differ by a translation of `(1, …, 1)` extend to the same
/// periodic labeling, so they are identified before injectivity is imposed.
pub fn brute_force_oracle_exact(
    config: &QuantizerConfig,
    kappa: usize,
    search_shells: usize,
    mode: OracleMode,
) -> Result<OracleOutcome> {
    config.validate()?;
    check_kappa(config.k, kappa, false)?;
    if config.k > 4 || config.m > 4 {
        return Err(Error::InvalidConfig(format!(
            "brute force is limited to K <= 4 and M <= 4, got K = {}, M = {}",
            config.k, config.m
        )));
    }
    let k = config.ki();
    let per_class = config.m + search_shells;
    let (cells, classes) = match mode {
        OracleMode::CentroidZero => (1, 1),
        OracleMode::Relaxed => (k, k),
    };
    // Canonical tuples: class c holds centroid-c tuples, c in 0..classes.
    let candidates: Vec<Candidate> = (0..classes).flat_map(|c| cheapest_tuples(config.k, c, per_class)).collect();

    let weight = ssd_weight(config.k, kappa);
    let points: Vec<(i64, Rational)> = (0..cells)
        .flat_map(|z| {
            quantizer::discrete_voronoi(ReferenceIndex(z), config)
                .into_iter()
                .map(move |y| (z, central_point_exact(y, config)))
        })
        .collect();
    // cost[p][c]: point p labeled by a translate of candidate c centred on a
    // reference point within one step of the point's own cell.
    let cost: Vec<Vec<Option<Rational>>> = points
        .iter()
        .map(|&(z, lc)| {
            candidates
                .iter()
                .map(|cand| {
                    (z - 1..=z + 1)
                        .filter(|centre| match mode {
                            OracleMode::CentroidZero => *centre == cand.centroid,
                            OracleMode::Relaxed => (centre - cand.centroid).rem_euclid(k) == 0,
                        })
                        .map(|centre| {
                            let sd = lc - centre;
                            sd * sd + weight * cand.ssd
                        })
                        .min()
                })
                .collect()
        })
        .collect();

    let (total, chosen) = min_cost_assignment(&cost)?;
    Ok(OracleOutcome {
        average_cost: total / points.len() as i64,
        assignment: chosen.into_iter().map(|c| candidates[c].coords.clone()).collect(),
    })
}

/// Exact minimum-cost injective assignment of rows to columns; `None` forbids a pair.
fn min_cost_assignment(cost: &[Vec<Option<Rational>>]) -> Result<(Rational, Vec<usize>)> {
    let cols = cost.first().map_or(0, Vec::len);
    if cols < cost.len() {
        return Err(Error::InvalidConfig("fewer candidate tuples than central points".into()));
    }
    let finite = || cost.iter().flatten().flatten();
    let scale = finite().fold(1i64, |l, r| num_integer::lcm(l, *r.denom()));
    let scaled = |r: &Rational| (r * scale).to_integer();
    let forbidden = 1 + cost.len() as i64 * finite().map(scaled).max().unwrap_or(0);
    let weights = Matrix::from_rows(cost.iter().map(|row| row.iter().map(|c| c.as_ref().map_or(forbidden, scaled))))
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let (total, chosen) = kuhn_munkres_min(&weights);
    if total >= forbidden {
        return Err(Error::InvalidConfig("no admissible assignment".into()));
    }
    Ok((Rational::new(total, scale), chosen))
}

/// Minimum average cost with centroid-0 candidates, scaled by `ζ²`.
pub fn brute_force_oracle(config: &QuantizerConfig, kappa: usize, search_shells: usize) -> Result<f64> {
    let outcome = brute_force_oracle_exact(config, kappa, search_shells, OracleMode::CentroidZero)?;
    Ok(lattice::rational_to_f64(outcome.average_cost) * config.zeta * config.zeta)
}
