//! High-rate rate and distortion expressions for a unit-variance Gaussian source.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::labeling::{cell_sd_sum_exact, check_kappa, ssd_weight};
use crate::lattice::{self, rational_to_f64};
use crate::sim::baseline::BaselineTable;
use crate::{QuantizerConfig, Rational, Result};

/// `½·log₂(2πe)`, the differential entropy of `N(0, 1)` in bits.
fn gaussian_entropy_bits() -> f64 {
    0.5 * (2.0 * PI * E).log2()
}

/// Per-description rate `R ≈ ½log₂(2πe) − log₂(2ζ)`.
pub fn rate_from_zeta(zeta: f64) -> f64 {
    gaussian_entropy_bits() - (2.0 * zeta).log2()
}

pub fn zeta_from_rate(rate: f64) -> f64 {
    0.5 * (2.0 * PI * E).sqrt() * (-rate).exp2()
}

/// Rate needed to send central indices directly: `½log₂(2πe) − log₂(ζ/M)`.
pub fn central_rate(config: &QuantizerConfig) -> f64 {
    gaussian_entropy_bits() - (config.zeta / config.m as f64).log2()
}

/// `2R − R_c` for two descriptions.
pub fn rate_overhead(config: &QuantizerConfig) -> f64 {
    2.0 * rate_from_zeta(config.zeta) - central_rate(config)
}

/// High-rate entropy of one side index: side cells have width `Kζ`.
/// Coincides with [`rate_from_zeta`] for `K = 2`.
pub fn side_index_entropy(config: &QuantizerConfig) -> f64 {
    gaussian_entropy_bits() - (config.k as f64 * config.zeta).log2()
}

/// `D_(K,K) ≈ ζ²/(12M²)`.
pub fn central_distortion(config: &QuantizerConfig) -> f64 {
    let m = config.m as f64;
    config.zeta * config.zeta / (12.0 * m * m)
}

/// `Σ_{i<M} J(X_i) / ζ²` over the `M` nearest points of `Ǎ_{K-1}`.
pub fn ssd_prefix_sum(k: usize, m: usize) -> Result<Rational> {
    Ok(lattice::enumerate_points(k, m)?.iter().map(|p| lattice::ssd_cost_exact(&p.coords)).sum())
}

/// `D_(K,κ) / ζ²` from the exact lattice shells: central term, SD term and weighted SSD term.
pub fn side_distortion_exact_units(config: &QuantizerConfig, kappa: usize) -> Result<Rational> {
    config.validate()?;
    check_kappa(config.k, kappa, false)?;
    let m = config.m as i64;
    let central = Rational::new(1, 12 * m * m);
    let sd = cell_sd_sum_exact(config) / m;
    let ssd = ssd_weight(config.k, kappa) * ssd_prefix_sum(config.k, config.m)? / m;
    Ok(central + sd + ssd)
}

pub fn side_distortion_exact(config: &QuantizerConfig, kappa: usize) -> Result<f64> {
    Ok(rational_to_f64(side_distortion_exact_units(config, kappa)?) * config.zeta * config.zeta)
}

/// Normalized second moment of an `n`-dimensional ball:
/// `G(S_n) = Γ(n/2 + 1)^{2/n} / ((n + 2)π)`. `G(S_1) = 1/12`.
pub fn ball_second_moment(n: usize) -> f64 {
    let n = n as f64;
    libm::tgamma(n / 2.0 + 1.0).powf(2.0 / n) / ((n + 2.0) * PI)
}

/// Sphere approximation of the SSD spectrum:
/// `(ζ²/12)·[1 + (K(K−κ)/κ)·K^{1/(K−1)}·G(S_{K−1})/G(S_1)·M^{2/(K−1)}]`.
pub fn side_distortion_sphere(config: &QuantizerConfig, kappa: usize) -> Result<f64> {
    config.validate()?;
    check_kappa(config.k, kappa, false)?;
    let k = config.k as f64;
    let kappa = kappa as f64;
    let dim = (config.k - 1) as f64;
    let ratio = ball_second_moment(config.k - 1) / ball_second_moment(1);
    let bracket = 1.0 + k * (k - kappa) / kappa * k.powf(1.0 / dim) * ratio * (config.m as f64).powf(2.0 / dim);
    Ok(config.zeta * config.zeta / 12.0 * bracket)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionProducts {
    pub rate: f64,
    /// `D_(K,K) · D_(K,1)^{K−1}` from the exact geometry.
    pub achieved: f64,
    /// `(1/4)·((2πe)²/144)·2^{−4R}`, the two-description high-rate product.
    pub two_description_high_rate: f64,
    /// `(1/4)·2^{−4R}`, the two-description rate-distortion reference.
    pub two_description_rd: f64,
    /// `(K−1)^{K−1}·K^{−K}·2^{−2KR}`.
    pub k_description_rd: f64,
}

impl DistortionProducts {
    /// Ratio of the achieved two-description product to its R-D reference.
    pub fn two_description_gap(&self) -> f64 {
        self.two_description_high_rate / self.two_description_rd
    }
}

pub fn rd_reference_product(k: usize, rate: f64) -> f64 {
    let kf = k as f64;
    (kf - 1.0).powf(kf - 1.0) * kf.powf(-kf) * (-2.0 * kf * rate).exp2()
}

/// The `D_(K,1)` that meets the R-D reference product at the given central distortion.
pub fn rd_reference_side(k: usize, rate: f64, central: f64) -> f64 {
    (rd_reference_product(k, rate) / central).powf(1.0 / (k as f64 - 1.0))
}

pub fn distortion_products(config: &QuantizerConfig) -> Result<DistortionProducts> {
    let rate = rate_from_zeta(config.zeta);
    let side = side_distortion_exact(config, 1)?;
    let achieved = central_distortion(config) * side.powi(config.k as i32 - 1);
    let two_description_rd = 0.25 * (-4.0 * rate).exp2();
    Ok(DistortionProducts {
        rate,
        achieved,
        two_description_high_rate: two_description_rd * (2.0 * PI * E).powi(2) / 144.0,
        two_description_rd,
        k_description_rd: rd_reference_product(config.k, rate),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    pub k: usize,
    pub m: usize,
    pub zeta: f64,
    pub central: f64,
    /// `κ → D_(K,κ)` for `κ = 1..K−1`.
    pub side: BTreeMap<usize, f64>,
    pub product: f64,
}

pub fn distortion_profile(config: &QuantizerConfig) -> Result<DistortionProfile> {
    let side = (1..config.k)
        .map(|kappa| Ok((kappa, side_distortion_exact(config, kappa)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(DistortionProfile {
        k: config.k,
        m: config.m,
        zeta: config.zeta,
        central: central_distortion(config),
        product: distortion_products(config)?.achieved,
        side,
    })
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `10·log₁₀(D_baseline / D_staggered)` for `κ` received descriptions.
pub fn staggering_gain_db(config: &QuantizerConfig, kappa: usize) -> Result<f64> {
    let staggered = side_distortion_exact_units(config, kappa)?;
    let baseline = BaselineTable::build(*config)?.side_distortion_exact_units(kappa)?;
    Ok(to_db(rational_to_f64(baseline / staggered)))
}

/// `M` ranges of the published trade-off curves: `K = 2, 3, 4 → 7, 10, 14`.
pub fn trade_off_m_max(k: usize) -> Option<usize> {
    match k {
        2 => Some(7),
        3 => Some(10),
        4 => Some(14),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub m: usize,
    pub central_db: f64,
    pub side1_db: f64,
    pub side1_sphere_db: f64,
    pub baseline_side1_db: Option<f64>,
}

/// Analytic `D_(K,K)` versus `D_(K,1)` for `M = 1..=m_max` at rate `R`.
pub fn curve(k: usize, rate: f64, m_max: usize, with_baseline: bool) -> Result<Vec<CurveRow>> {
    let zeta = zeta_from_rate(rate);
    (1..=m_max)
        .map(|m| {
            let config = QuantizerConfig::new(k, m, zeta)?;
            let baseline_side1_db = if with_baseline {
                let units = BaselineTable::build(config)?.side_distortion_exact_units(1)?;
                Some(to_db(rational_to_f64(units) * zeta * zeta))
            } else {
                None
            };
            Ok(CurveRow {
                m,
                central_db: to_db(central_distortion(&config)),
                side1_db: to_db(side_distortion_exact(&config, 1)?),
                side1_sphere_db: to_db(side_distortion_sphere(&config, 1)?),
                baseline_side1_db,
            })
        })
        .collect()
}
