//! Cumulative run-off triangles.
//!
//! A triangle of size `n` holds `C[i][j]` for accident years `1 <= i <= n` and
//! development years `1 <= j <= n - i + 1`. Every observed cell must be strictly
//! positive: the development-factor ratios and the Pearson residuals divide by
//! them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Smallest accepted number of accident years.
pub const MIN_YEARS: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TriangleError {
    #[error("a triangle needs at least {MIN_YEARS} accident years, got {0}")]
    TooSmall(usize),
    #[error("cell ({row},{col}) is missing inside the observed staircase")]
    MissingCell { row: usize, col: usize },
    #[error("cell ({row},{col}) lies below the latest diagonal")]
    ExtraCell { row: usize, col: usize },
    #[error("cell ({row},{col}) = {value} is not strictly positive")]
    NonPositive { row: usize, col: usize, value: f64 },
    #[error("cell ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("accident year {row} is outside 1..={n}")]
    RowOutOfRange { row: usize, n: usize },
    #[error("unknown dataset `{0}` (expected taylor_ashe or mortgage)")]
    UnknownDataset(String),
}

/// A validated cumulative claims triangle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Triangle {
    label: String,
    rows: Vec<Vec<f64>>,
}

impl Triangle {
    /// Builds a triangle from its rows; row `i` (0-based here) must hold `n - i` values.
    pub fn new(label: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self, TriangleError> {
        let n = rows.len();
        if n < MIN_YEARS {
            return Err(TriangleError::TooSmall(n));
        }
        for (idx, row) in rows.iter().enumerate() {
            let i = idx + 1;
            let expected = n - idx;
            if row.len() < expected {
                return Err(TriangleError::MissingCell { row: i, col: row.len() + 1 });
            }
            if row.len() > expected {
                return Err(TriangleError::ExtraCell { row: i, col: expected + 1 });
            }
            for (jdx, &value) in row.iter().enumerate() {
                let j = jdx + 1;
                if !value.is_finite() {
                    return Err(TriangleError::NonFinite { row: i, col: j });
                }
                if value <= 0.0 {
                    return Err(TriangleError::NonPositive { row: i, col: j, value });
                }
            }
        }
        Ok(Self { label: label.into(), rows })
    }

    /// Number of accident (and development) years.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `C_{i,j}`, or `None` outside the observed staircase.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == 0 || j == 0 {
            return None;
        }
        self.rows.get(i - 1).and_then(|r| r.get(j - 1)).copied()
    }

    /// `C_{i,j}`; panics outside the observed staircase.
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
            .unwrap_or_else(|| panic!("cell ({i},{j}) is not observed"))
    }

    /// Observed values of accident year `i`, development years `1..=n-i+1`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Column `j` restricted to the accident years that also observe `j + 1`,
    /// i.e. `C_{1,j}, ..., C_{n-j,j}`.
    pub fn transition_bases(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (1..=n - j).map(move |i| self.cell(i, j))
    }

    /// Pairs `(C_{i,j}, C_{i,j+1})` for `1 <= i <= n - j`.
    pub fn transitions(&self, j: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.n();
        (1..=n - j).map(move |i| (self.cell(i, j), self.cell(i, j + 1)))
    }

    /// `(i, C_{i,n-i+1})` in accident-year order.
    pub fn latest_diagonal(&self) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .enumerate()
            .map(|(idx, r)| (idx + 1, r[r.len() - 1]))
            .collect()
    }

    /// The same triangle with every cell multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, TriangleError> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v * factor).collect())
            .collect();
        Self::new(self.label.clone(), rows)
    }

    /// The same triangle with accident year `i` replaced by `values`.
    pub fn with_row(&self, i: usize, values: Vec<f64>) -> Result<Self, TriangleError> {
        if i == 0 || i > self.n() {
            return Err(TriangleError::RowOutOfRange { row: i, n: self.n() });
        }
        let mut rows = self.rows.clone();
        rows[i - 1] = values;
        Self::new(self.label.clone(), rows)
    }
}

/// The two datasets shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Dataset {
    /// Taylor and Ashe (1983), ten accident years.
    TaylorAshe,
    /// Mortgage guarantee business, nine accident years.
    Mortgage,
}

impl Dataset {
    pub const ALL: [Dataset; 2] = [Dataset::TaylorAshe, Dataset::Mortgage];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::TaylorAshe => "taylor_ashe",
            Dataset::Mortgage => "mortgage",
        }
    }

    pub fn triangle(self) -> Triangle {
        let data: &[&[f64]] = match self {
            Dataset::TaylorAshe => TAYLOR_ASHE,
            Dataset::Mortgage => MORTGAGE,
        };
        let rows = data.iter().map(|r| r.to_vec()).collect();
        Triangle::new(self.name(), rows).expect("built-in datasets are valid")
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = TriangleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "taylor_ashe" => Ok(Dataset::TaylorAshe),
            "mortgage" => Ok(Dataset::Mortgage),
            other => Err(TriangleError::UnknownDataset(other.to_string())),
        }
    }
}

/// Looks a built-in dataset up by name.
pub fn builtin_dataset(name: &str) -> Result<Triangle, TriangleError> {
    name.parse::<Dataset>().map(Dataset::triangle)
}

#[rustfmt::skip]
const TAYLOR_ASHE: &[&[f64]] = &[
    &[357848.0, 1124788.0, 1735330.0, 2218270.0, 2745596.0, 3319994.0, 3466336.0, 3606286.0, 3833515.0, 3901463.0],
    &[352118.0, 1236139.0, 2170033.0, 3353322.0, 3799067.0, 4120063.0, 4647867.0, 4914039.0, 5339085.0],
    &[290507.0, 1292306.0, 2218525.0, 3235179.0, 3985995.0, 4132918.0, 4628910.0, 4909315.0],
    &[310608.0, 1418858.0, 2195047.0, 3757447.0, 4029929.0, 4381982.0, 4588268.0],
    &[443160.0, 1136350.0, 2128333.0, 2897821.0, 3402672.0, 3873311.0],
    &[396132.0, 1333217.0, 2180715.0, 2985752.0, 3691712.0],
    &[440832.0, 1288463.0, 2419861.0, 3483130.0],
    &[359480.0, 1421128.0, 2864494.0],
    &[376686.0, 1363294.0],
    &[344014.0],
];

#[rustfmt::skip]
const MORTGAGE: &[&[f64]] = &[
    &[58046.0, 127970.0, 476599.0, 1027692.0, 1360489.0, 1647310.0, 1819179.0, 1906852.0, 1950105.0],
    &[24492.0, 141767.0, 984288.0, 2142656.0, 2961978.0, 3683940.0, 4048898.0, 4115760.0],
    &[32848.0, 274682.0, 1522637.0, 3203427.0, 4445927.0, 5158781.0, 5342585.0],
    &[21439.0, 529828.0, 2900301.0, 4999019.0, 6460112.0, 6853904.0],
    &[40397.0, 763394.0, 2920745.0, 4989572.0, 5648563.0],
    &[90748.0, 951994.0, 4210640.0, 5866482.0],
    &[62096.0, 868480.0, 1954797.0],
    &[24983.0, 284441.0],
    &[13121.0],
];
