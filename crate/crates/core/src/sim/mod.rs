//! Monte Carlo evaluation on a unit-variance Gaussian source.
//!
//! Samples are drawn in fixed-size blocks. Block `b` uses a ChaCha8 stream
//! seeded with `seed` on stream `b`, and block statistics are merged in block
//! order, so a report depends only on the configuration and not on the number
//! of worker threads.

pub mod baseline;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, rd_reference_side, to_db};
use crate::labeling::{ChannelPattern, LabelTable};
use crate::quantizer::{self, side_point_twice, CentralIndex, QuantizerConfig};
use crate::{Error, Result};

use baseline::BaselineTable;

const BLOCK: u64 = 1 << 16;

/// An index assignment together with the reconstruction points it uses.
pub trait Codebook: Sync {
    fn config(&self) -> &QuantizerConfig;
    fn encode_into(&self, y: CentralIndex, out: &mut [i64]);
    fn decode(&self, coords: &[i64]) -> Result<CentralIndex>;
    /// Reconstruction of description `description` at side coordinate `x`.
    fn side_value(&self, description: usize, x: i64) -> f64;
}

impl Codebook for LabelTable {
    fn config(&self) -> &QuantizerConfig {
        LabelTable::config(self)
    }

    fn encode_into(&self, y: CentralIndex, out: &mut [i64]) {
        LabelTable::encode_into(self, y, out)
    }

    fn decode(&self, coords: &[i64]) -> Result<CentralIndex> {
        LabelTable::decode(self, coords)
    }

    fn side_value(&self, description: usize, x: i64) -> f64 {
        let c = LabelTable::config(self);
        0.5 * c.zeta * side_point_twice(c.ki(), description as i64, x) as f64
    }
}

impl Codebook for BaselineTable {
    fn config(&self) -> &QuantizerConfig {
        BaselineTable::config(self)
    }

    fn encode_into(&self, y: CentralIndex, out: &mut [i64]) {
        BaselineTable::encode_into(self, y, out)
    }

    fn decode(&self, coords: &[i64]) -> Result<CentralIndex> {
        BaselineTable::decode(self, coords)
    }

    fn side_value(&self, _description: usize, x: i64) -> f64 {
        let c = BaselineTable::config(self);
        c.k as f64 * c.zeta * x as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Staggered,
    Baseline,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Staggered => "staggered",
            Scheme::Baseline => "baseline",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "staggered" => Ok(Scheme::Staggered),
            "baseline" => Ok(Scheme::Baseline),
            _ => Err(Error::InvalidConfig(format!("unknown scheme {s:?}, expected staggered or baseline"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(flatten)]
    pub quantizer: QuantizerConfig,
    pub samples: u64,
    pub seed: u64,
    #[serde(default)]
    pub scheme: Scheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternStats {
    pub received: Vec<usize>,
    pub mse: f64,
    /// Standard error of `mse`.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scheme: Scheme,
    pub k: usize,
    pub m: usize,
    pub zeta: f64,
    pub samples: u64,
    pub seed: u64,
    /// MSE with all `K` descriptions, decoded through the inverse labeling.
    pub central_mse: f64,
    /// Samples whose full-reception decode did not return the encoded index.
    pub decode_mismatches: u64,
    /// `κ → ` mean MSE over the `C(K, κ)` patterns of size `κ`.
    pub side_mse: BTreeMap<usize, f64>,
    pub patterns: Vec<PatternStats>,
    /// Empirical entropy of each description's index, in bits.
    pub entropy_bits: Vec<f64>,
    /// High-rate entropy of a side index with step `Kζ`.
    pub entropy_reference_bits: f64,
}

impl SimReport {
    pub fn pattern(&self, received: &[usize]) -> Option<&PatternStats> {
        self.patterns.iter().find(|p| p.received == received)
    }
}

/// One encoded source sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSample {
    pub central: CentralIndex,
    pub coords: Vec<i64>,
    pub values: Vec<f64>,
}

pub fn encode_sample<C: Codebook + ?Sized>(codebook: &C, v: f64) -> Result<EncodedSample> {
    let config = codebook.config();
    let central = quantizer::quantize_central(v, config)?;
    let mut coords = vec![0; config.k];
    codebook.encode_into(central, &mut coords);
    let values = coords.iter().enumerate().map(|(i, &x)| codebook.side_value(i, x)).collect();
    Ok(EncodedSample { central, coords, values })
}

/// Every non-empty proper subset of the descriptions, by size then lexicographically.
fn proper_patterns(k: usize) -> Result<Vec<ChannelPattern>> {
    let mut out = Vec::new();
    for kappa in 1..k {
        out.extend(ChannelPattern::all(k, kappa)?);
    }
    Ok(out)
}

struct BlockStats {
    central_sq: f64,
    mismatches: u64,
    pattern_sum: Vec<f64>,
    pattern_sum_sq: Vec<f64>,
    histograms: Vec<HashMap<i64, u64>>,
}

fn run_block<C: Codebook + ?Sized>(
    codebook: &C,
    patterns: &[ChannelPattern],
    seed: u64,
    block: u64,
    len: u64,
) -> Result<BlockStats> {
    let config = codebook.config();
    let k = config.k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut stats = BlockStats {
        central_sq: 0.0,
        mismatches: 0,
        pattern_sum: vec![0.0; patterns.len()],
        pattern_sum_sq: vec![0.0; patterns.len()],
        histograms: vec![HashMap::new(); k],
    };
    let mut coords = vec![0i64; k];
    let mut values = vec![0.0; k];
    for _ in 0..len {
        let v: f64 = StandardNormal.sample(&mut rng);
        let y = quantizer::quantize_central(v, config)?;
        codebook.encode_into(y, &mut coords);
        for (i, (&x, value)) in coords.iter().zip(values.iter_mut()).enumerate() {
            *value = codebook.side_value(i, x);
            *stats.histograms[i].entry(x).or_insert(0) += 1;
        }
        let decoded = codebook.decode(&coords)?;
        if decoded != y {
            stats.mismatches += 1;
        }
        let e = v - quantizer::central_point(decoded, config);
        stats.central_sq += e * e;
        for (p, pattern) in patterns.iter().enumerate() {
            let received = pattern.received();
            let mean = received.iter().map(|&i| values[i]).sum::<f64>() / received.len() as f64;
            let e2 = (v - mean) * (v - mean);
            stats.pattern_sum[p] += e2;
            stats.pattern_sum_sq[p] += e2 * e2;
        }
    }
    Ok(stats)
}

fn entropy_bits(histogram: &BTreeMap<i64, u64>, total: u64) -> f64 {
    let n = total as f64;
    -histogram
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Runs the simulation against an arbitrary codebook.
pub fn run_with<C: Codebook + ?Sized>(codebook: &C, samples: u64, seed: u64) -> Result<SimReport> {
    if samples == 0 {
        return Err(Error::InvalidConfig("at least one sample is required".into()));
    }
    let config = *codebook.config();
    let k = config.k;
    let patterns = proper_patterns(k)?;
    let blocks = samples.div_ceil(BLOCK);
    let stats: Vec<BlockStats> = (0..blocks)
        .into_par_iter()
        .map(|b| run_block(codebook, &patterns, seed, b, BLOCK.min(samples - b * BLOCK)))
        .collect::<Result<_>>()?;

    let mut central_sq = 0.0;
    let mut mismatches = 0;
    let mut pattern_sum = vec![0.0; patterns.len()];
    let mut pattern_sum_sq = vec![0.0; patterns.len()];
    let mut histograms = vec![BTreeMap::new(); k];
    for block in stats {
        central_sq += block.central_sq;
        mismatches += block.mismatches;
        for p in 0..patterns.len() {
            pattern_sum[p] += block.pattern_sum[p];
            pattern_sum_sq[p] += block.pattern_sum_sq[p];
        }
        for (merged, h) in histograms.iter_mut().zip(block.histograms) {
            for (x, c) in h {
                *merged.entry(x).or_insert(0u64) += c;
            }
        }
    }

    let n = samples as f64;
    let pattern_stats: Vec<PatternStats> = patterns
        .iter()
        .enumerate()
        .map(|(p, pattern)| {
            let mse = pattern_sum[p] / n;
            let var = (pattern_sum_sq[p] / n - mse * mse).max(0.0);
            PatternStats { received: pattern.received().to_vec(), mse, std_error: (var / n).sqrt() }
        })
        .collect();
    let mut side_mse = BTreeMap::new();
    for kappa in 1..k {
        let of_size: Vec<f64> = pattern_stats.iter().filter(|s| s.received.len() == kappa).map(|s| s.mse).collect();
        side_mse.insert(kappa, of_size.iter().sum::<f64>() / of_size.len() as f64);
    }

    Ok(SimReport {
        scheme: Scheme::Staggered,
        k,
        m: config.m,
        zeta: config.zeta,
        samples,
        seed,
        central_mse: central_sq / n,
        decode_mismatches: mismatches,
        side_mse,
        patterns: pattern_stats,
        entropy_bits: histograms.iter().map(|h| entropy_bits(h, samples)).collect(),
        entropy_reference_bits: analysis::side_index_entropy(&config),
    })
}

pub fn run(sim: &SimConfig) -> Result<SimReport> {
    sim.quantizer.validate()?;
    let mut report = match sim.scheme {
        Scheme::Staggered => run_with(&LabelTable::build(sim.quantizer)?, sim.samples, sim.seed)?,
        Scheme::Baseline => run_with(&BaselineTable::build(sim.quantizer)?, sim.samples, sim.seed)?,
    };
    report.scheme = sim.scheme;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "D_KK_dB")]
    pub d_kk_db: f64,
    #[serde(rename = "D_K1_staggered_dB")]
    pub d_k1_staggered_db: f64,
    #[serde(rename = "D_K1_baseline_dB")]
    pub d_k1_baseline_db: f64,
    #[serde(rename = "D_K1_sphere_dB")]
    pub d_k1_sphere_db: f64,
    #[serde(rename = "D_K1_rdopt_dB")]
    pub d_k1_rdopt_db: f64,
}

/// Central versus one-description distortion for `M = 1..=m_max` at rate `R`.
///
/// With `samples > 0` the central and one-description columns are Monte Carlo
/// estimates; with `samples == 0` they are the high-rate expressions. The
/// sphere column is always analytic, and the R-D column is the reference
/// product evaluated at the row's central distortion.
pub fn compare(k: usize, rate: f64, m_max: usize, samples: u64, seed: u64) -> Result<Vec<CompareRow>> {
    let zeta = analysis::zeta_from_rate(rate);
    (1..=m_max)
        .map(|m| {
            let config = QuantizerConfig::new(k, m, zeta)?;
            let (central, staggered, baseline) = if samples > 0 {
                let stag = run(&SimConfig { quantizer: config, samples, seed, scheme: Scheme::Staggered })?;
                let base = run(&SimConfig { quantizer: config, samples, seed, scheme: Scheme::Baseline })?;
                (stag.central_mse, stag.side_mse[&1], base.side_mse[&1])
            } else {
                let base = BaselineTable::build(config)?.side_distortion_exact_units(1)?;
                (
                    analysis::central_distortion(&config),
                    analysis::side_distortion_exact(&config, 1)?,
                    crate::lattice::rational_to_f64(base) * zeta * zeta,
                )
            };
            Ok(CompareRow {
                m,
                d_kk_db: to_db(central),
                d_k1_staggered_db: to_db(staggered),
                d_k1_baseline_db: to_db(baseline),
                d_k1_sphere_db: to_db(analysis::side_distortion_sphere(&config, 1)?),
                d_k1_rdopt_db: to_db(rd_reference_side(k, rate, central)),
            })
        })
        .collect()
}
