//! Tabular sweep records and order-insensitive statistics.

use serde::{Deserialize, Serialize};

/// One grid point of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Value of the swept parameter, in the protocol's rate or time unit.
    pub parameter: f64,
    pub protocol: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter_pct: Option<f64>,
    pub mean: f64,
    /// Zero for deterministic points.
    pub stderr: f64,
    pub reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_name: String,
    pub rows: Vec<SweepRow>,
    /// Interpolated parameter where a reference curve crosses a bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl SweepResult {
    pub fn new(parameter_name: impl Into<String>) -> Self {
        Self {
            parameter_name: parameter_name.into(),
            rows: Vec::new(),
            threshold: None,
        }
    }

    /// Rows for which `keep` holds, in grid order.
    pub fn curve<'a>(&'a self, keep: impl Fn(&SweepRow) -> bool + 'a) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| keep(r))
    }

    pub fn extend(&mut self, other: SweepResult) {
        self.rows.extend(other.rows);
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sample mean and standard error of the mean. Input order fixes the result
/// bit for bit, so callers must pass samples in index order.
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut sum = CompensatedSum::default();
    samples.iter().for_each(|&x| sum.add(x));
    let mean = sum.value() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut sq = CompensatedSum::default();
    samples.iter().for_each(|&x| sq.add((x - mean) * (x - mean)));
    let var = sq.value() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// First upward or downward crossing of `level` by linear interpolation
/// between adjacent points.
pub fn crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        let (a, b) = (y[0] - level, y[1] - level);
        if a == 0.0 {
            Some(x[0])
        } else if a * b < 0.0 || b == 0.0 {
            Some(x[0] + (x[1] - x[0]) * a / (a - b))
        } else {
            None
        }
    })
}

/// Checks that a grid is finite, non-negative and strictly increasing.
pub fn validate_grid(grid: &[f64], what: &str) -> crate::Result<()> {
    if grid.is_empty() {
        return Err(crate::Error::InvalidParameter(format!("{what} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(crate::Error::InvalidParameter(format!("{what} grid must be finite and >= 0")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::Error::InvalidParameter(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

/// `start, start + step, ..` up to `stop` inclusive, with values computed as
/// `start + k·step` to avoid drift.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> crate::Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(crate::Error::InvalidParameter(format!(
            "bad grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}
