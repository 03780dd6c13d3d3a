//! Two-description IA matrix.
//!
//! Each quantization unit (the central indices sharing one side index) is a
//! translate of the fundamental pattern
//!
//! ```text
//! P(M) = {0} ∪ {i(M−1)}_{i=1}^{M−1} ∪ {(M−1)² + M} ∪ {(M−1)² + M + i(M+1)}_{i=1}^{M−1}
//! ```
//!
//! with `C_0(x) = P(M) + 2Mx + a` and `C_1(x) = P(M) + 2Mx + M + a`. The
//! anchor `a` is fixed by [`labeling_anchor`] so that units coincide with the
//! central coordinates produced by [`crate::labeling`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub m: usize,
    pub offsets: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Zero,
    One,
}

impl TryFrom<usize> for Side {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        match value {
            0 => Ok(Side::Zero),
            1 => Ok(Side::One),
            _ => Err(Error::InvalidIndex { index: value, k: 2 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizationUnit {
    pub side: Side,
    pub x: i64,
    /// Central coordinates, ascending.
    pub members: Vec<i64>,
}

pub fn pattern(m: usize) -> Result<Pattern> {
    if m < 1 {
        return Err(Error::InvalidConfig("M must be at least 1".into()));
    }
    let mi = m as i64;
    let pivot = (mi - 1) * (mi - 1) + mi;
    let mut offsets: Vec<i64> = std::iter::once(0)
        .chain((1..mi).map(|i| i * (mi - 1)))
        .chain(std::iter::once(pivot))
        .chain((1..mi).map(|i| pivot + i * (mi + 1)))
        .collect();
    offsets.sort_unstable();
    offsets.dedup();
    Ok(Pattern { m, offsets })
}

/// Translation placing `C_0(0)` on the labeling module's coordinates:
/// `M − 1 − M² − ⌊M/2⌋`.
///
/// The smallest member of `C_0(0)` is the central point labeled by the
/// longest segment ending at side-0 coordinate 0, which sits in reference
/// cell `−M` and takes the last table slot `−⌊M/2⌋ + M − 1`.
pub fn labeling_anchor(m: usize) -> i64 {
    let m = m as i64;
    m - 1 - m * m - m / 2
}

pub fn unit(side: Side, x: i64, m: usize, anchor: i64) -> Result<QuantizationUnit> {
    let p = pattern(m)?;
    let mi = m as i64;
    let shift = 2 * mi * x + if side == Side::One { mi } else { 0 } + anchor;
    Ok(QuantizationUnit { side, x, members: p.offsets.iter().map(|o| o + shift).collect() })
}

pub fn spread(u: &QuantizationUnit) -> i64 {
    match (u.members.first(), u.members.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    }
}

/// Lower bound `b(b−1)/2` on the spread for bandwidth `b`.
pub fn spread_bound(b: i64) -> i64 {
    b * (b - 1) / 2
}

/// Side-1 coordinate of the unit holding central coordinate `y`.
fn side_one_owner(y: i64, m: usize, anchor: i64) -> Result<i64> {
    let mi = m as i64;
    let guess = (y - anchor - mi).div_euclid(2 * mi);
    for x1 in (guess - mi - 1)..=(guess + 1) {
        if unit(Side::One, x1, m, anchor)?.members.binary_search(&y).is_ok() {
            return Ok(x1);
        }
    }
    unreachable!("side-1 units partition the central coordinates")
}

/// A window of the IA matrix: rows are side-1 coordinates, columns side-0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IaMatrix {
    pub m: usize,
    pub first_row: i64,
    pub first_col: i64,
    /// `cells[r][c]` is the central coordinate at `(x_1, x_0) = (first_row + r, first_col + c)`.
    pub cells: Vec<Vec<Option<i64>>>,
}

impl IaMatrix {
    pub fn new(m: usize, first_row: i64, rows: usize, first_col: i64, cols: usize) -> Result<Self> {
        let anchor = labeling_anchor(m);
        let mut cells = vec![vec![None; cols]; rows];
        for (c, x0) in (first_col..first_col + cols as i64).enumerate() {
            for y in unit(Side::Zero, x0, m, anchor)?.members {
                let r = side_one_owner(y, m, anchor)? - first_row;
                if (0..rows as i64).contains(&r) {
                    cells[r as usize][c] = Some(y);
                }
            }
        }
        Ok(Self { m, first_row, first_col, cells })
    }
}

impl fmt::Display for IaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols = self.cells.first().map_or(0, Vec::len);
        let rows = self.cells.len();
        let labels = (0..cols as i64)
            .map(|c| self.first_col + c)
            .chain((0..rows as i64).map(|r| self.first_row + r))
            .chain(self.cells.iter().flatten().flatten().copied());
        let width = labels.map(|v| v.to_string().len()).max().unwrap_or(1);
        let corner = "x1\\x0";
        write!(f, "{corner} |")?;
        for c in 0..cols as i64 {
            write!(f, " {:>width$}", self.first_col + c)?;
        }
        writeln!(f)?;
        for (r, row) in self.cells.iter().enumerate() {
            write!(f, "{:>w$} |", self.first_row + r as i64, w = corner.len())?;
            for cell in row {
                match cell {
                    Some(y) => write!(f, " {y:>width$}")?,
                    None => write!(f, " {:>width$}", "")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
