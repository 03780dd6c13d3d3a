use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use mdsq::analysis;
use mdsq::ia_matrix::IaMatrix;
use mdsq::labeling::{label, LabelTable};
use mdsq::lattice;
use mdsq::quantizer::{self, CentralIndex, ReferenceIndex, SideIndex};
use mdsq::sim::{self, Scheme, SimConfig};
use mdsq::{QuantizerConfig, Rational};

#[derive(Parser)]
#[command(name = "mdsq", version, about = "Multiple-description scalar quantization with staggered side quantizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shell counts of the translated lattice (or of the dual lattice about its deep hole).
    Theta {
        #[arg(long)]
        k: usize,
        /// Largest squared norm, as an integer or fraction such as 9/8.
        #[arg(long, value_parser = parse_rational)]
        max_norm: Rational,
        #[arg(long)]
        dual: bool,
    },
    /// Side, central and reference points inside [-window, window].
    Geometry {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        zeta: f64,
        #[arg(long)]
        window: f64,
    },
    /// Index assignment for central indices -window..=window.
    Ia {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        window: Option<i64>,
    },
    /// Two-description IA matrix.
    Matrix {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        first_row: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        first_col: i64,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Text)]
        format: MatrixFormat,
    },
    /// Analytic central versus one-description distortion for M = 1..=m-max.
    Curve {
        #[arg(long)]
        k: usize,
        #[arg(long = "r")]
        rate: f64,
        #[arg(long)]
        m_max: usize,
        #[arg(long)]
        baseline: bool,
    },
    /// Monte Carlo run on a unit Gaussian source; prints a JSON report.
    Simulate(RunArgs),
    /// Staggered versus baseline trade-off table.
    Compare(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Text,
    Csv,
}

#[derive(Args, Default)]
struct RunArgs {
    /// TOML or JSON file supplying any of the options below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, conflicts_with = "zeta")]
    rate: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
}

/// Options read from `--config`; flags given on the command line take precedence.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    k: Option<usize>,
    m: Option<usize>,
    rate: Option<f64>,
    zeta: Option<f64>,
    m_max: Option<usize>,
    samples: Option<u64>,
    seed: Option<u64>,
    scheme: Option<Scheme>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| format!("{s:?} is not a fraction: {e}"))
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: mdsq::Error| e.to_string())
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

impl RunArgs {
    fn resolve(self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        // A flag for either of rate/zeta replaces both file values.
        let (rate, zeta) = if self.rate.is_some() || self.zeta.is_some() {
            (self.rate, self.zeta)
        } else {
            (file.rate, file.zeta)
        };
        Ok(Resolved {
            k: self.k.or(file.k),
            m: self.m.or(file.m),
            rate,
            zeta,
            m_max: self.m_max.or(file.m_max),
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed).unwrap_or(0),
            scheme: self.scheme.or(file.scheme).unwrap_or_default(),
        })
    }
}

struct Resolved {
    k: Option<usize>,
    m: Option<usize>,
    rate: Option<f64>,
    zeta: Option<f64>,
    m_max: Option<usize>,
    samples: Option<u64>,
    seed: u64,
    scheme: Scheme,
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing --{name} (give it as a flag or in --config)"))
}

fn csv_out() -> csv::Writer<io::StdoutLock<'static>> {
    csv::Writer::from_writer(io::stdout().lock())
}

fn theta(k: usize, max_norm: Rational, dual: bool) -> Result<()> {
    let shells = if dual { lattice::dual_hole_theta(k, max_norm)? } else { lattice::theta_series(k, max_norm)? };
    let mut w = csv_out();
    w.write_record(["norm_sq", "count"])?;
    for s in shells {
        w.write_record([s.norm_sq.to_string(), s.count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn geometry(config: &QuantizerConfig, window: f64) -> Result<()> {
    if !(window.is_finite() && window > 0.0) {
        bail!("--window must be positive");
    }
    let mut w = csv_out();
    w.write_record(["kind", "index", "value"])?;
    let z = config.zeta;
    let k = config.k as f64;
    for i in 0..config.k {
        let lo = (-window / (k * z)).floor() as i64 - 1;
        let hi = (window / (k * z)).ceil() as i64 + 1;
        for x in lo..=hi {
            let v = quantizer::side_point(SideIndex { description: i, x }, config)?;
            if v.abs() <= window {
                w.write_record([format!("side{i}"), x.to_string(), v.to_string()])?;
            }
        }
    }
    let reach = (window * config.m as f64 / z).ceil() as i64 + 1;
    for y in -reach..=reach {
        let v = quantizer::central_point(CentralIndex(y), config);
        if v.abs() <= window {
            w.write_record(["central".to_string(), y.to_string(), v.to_string()])?;
        }
    }
    let reach = (window / z).ceil() as i64;
    for r in -reach..=reach {
        let v = quantizer::reference_point(ReferenceIndex(r), config);
        if v.abs() <= window {
            w.write_record(["reference".to_string(), r.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn ia(k: usize, m: usize, window: Option<i64>) -> Result<()> {
    let table = LabelTable::build(QuantizerConfig::new(k, m, 1.0)?)?;
    let window = window.unwrap_or((k * m) as i64);
    let mut w = csv_out();
    let header = std::iter::once("y".to_string())
        .chain((0..k).map(|i| format!("x_{i}")))
        .chain(std::iter::once("centroid_z".to_string()));
    w.write_record(header)?;
    for y in -window..=window {
        let t = label(CentralIndex(y), &table);
        let row = std::iter::once(y.to_string())
            .chain(t.coords.iter().map(i64::to_string))
            .chain(std::iter::once(t.centroid_index().0.to_string()));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn matrix(m: usize, first_row: i64, rows: usize, first_col: i64, cols: usize, format: MatrixFormat) -> Result<()> {
    let matrix = IaMatrix::new(m, first_row, rows, first_col, cols)?;
    match format {
        MatrixFormat::Text => {
            print!("{matrix}");
            io::stdout().flush()?;
        }
        MatrixFormat::Csv => {
            let mut w = csv_out();
            let header = std::iter::once("x1\\x0".to_string()).chain((0..cols as i64).map(|c| (first_col + c).to_string()));
            w.write_record(header)?;
            for (r, row) in matrix.cells.iter().enumerate() {
                let cells = row.iter().map(|c| c.map_or(String::new(), |y| y.to_string()));
                w.write_record(std::iter::once((first_row + r as i64).to_string()).chain(cells))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn curve(k: usize, rate: f64, m_max: usize, baseline: bool) -> Result<()> {
    let rows = analysis::curve(k, rate, m_max, baseline)?;
    let mut w = csv_out();
    let mut header = vec!["M", "D_central_dB", "D_side1_dB", "D_side1_sphere_dB"];
    if baseline {
        header.push("D_side1_baseline_dB");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.m.to_string(), r.central_db.to_string(), r.side1_db.to_string(), r.side1_sphere_db.to_string()];
        if let Some(b) = r.baseline_side1_db {
            rec.push(b.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(args: RunArgs) -> Result<()> {
    let r = args.resolve()?;
    let k = required(r.k, "k")?;
    let m = required(r.m, "m")?;
    let zeta = match (r.rate, r.zeta) {
        (_, Some(z)) => z,
        (Some(rate), None) => analysis::zeta_from_rate(rate),
        (None, None) => bail!("missing --rate or --zeta"),
    };
    let config = SimConfig {
        quantizer: QuantizerConfig::new(k, m, zeta)?,
        samples: required(r.samples, "samples")?,
        seed: r.seed,
        scheme: r.scheme,
    };
    let report = sim::run(&config)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(())
}

fn compare(args: RunArgs) -> Result<()> {
    let r = args.resolve()?;
    let k = required(r.k, "k")?;
    let rate = match (r.rate, r.zeta) {
        (Some(rate), _) => rate,
        (None, Some(z)) => analysis::rate_from_zeta(z),
        (None, None) => bail!("missing --rate"),
    };
    let m_max = match r.m_max {
        Some(m) => m,
        None => analysis::trade_off_m_max(k).ok_or_else(|| anyhow!("missing --m-max"))?,
    };
    let rows = sim::compare(k, rate, m_max, r.samples.unwrap_or(0), r.seed)?;
    let mut w = csv_out();
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Theta { k, max_norm, dual } => theta(k, max_norm, dual),
        Command::Geometry { k, m, zeta, window } => geometry(&QuantizerConfig::new(k, m, zeta)?, window),
        Command::Ia { k, m, window } => ia(k, m, window),
        Command::Matrix { m, rows, cols, first_row, first_col, format } => {
            matrix(m, first_row, rows, first_col, cols, format)
        }
        Command::Curve { k, rate, m_max, baseline } => curve(k, rate, m_max, baseline),
        Command::Simulate(args) => simulate(args),
        Command::Compare(args) => compare(args),
    }
}
