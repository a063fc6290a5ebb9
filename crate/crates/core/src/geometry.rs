//! Standing-wave couplings in a one-dimensional cavity and the atomic
//! positions that give two adjacent modes equal coupling magnitude.
//!
//! Positions are scaled by the cavity length, with mirrors at `r̃ = ±1/2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bracketing resolution of the root scan.
pub const GRID_STEP: f64 = 1e-4;
/// Bisection stops once the bracket is this narrow; Newton steps follow.
pub const BISECTION_TOL: f64 = 1e-13;
/// Roots with smaller coupling are node coincidences, not usable positions.
pub const MIN_COUPLING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelativeSign {
    /// `g_n = +g_{n+1}`
    Equal,
    /// `g_n = −g_{n+1}`
    Opposite,
}

impl RelativeSign {
    fn value(self) -> f64 {
        match self {
            RelativeSign::Equal => 1.0,
            RelativeSign::Opposite => -1.0,
        }
    }
}

impl fmt::Display for RelativeSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelativeSign::Equal => "equal",
            RelativeSign::Opposite => "opposite",
        })
    }
}

impl FromStr for RelativeSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(RelativeSign::Equal),
            "opposite" => Ok(RelativeSign::Opposite),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPosition {
    pub r_tilde: f64,
    pub n: u32,
}

impl ScaledPosition {
    pub fn coupling(&self, mode: u32) -> f64 {
        scaled_coupling(mode, self.r_tilde)
    }

    /// `g_n(r̃) ∓ g_{n+1}(r̃)` for the chosen sign.
    pub fn residual(&self, sign: RelativeSign) -> f64 {
        residual(self.n, sign, self.r_tilde)
    }
}

/// `√(nπ) sin(nπ(r̃ + 1/2))`, the mode-`n` coupling up to a common factor.
pub fn scaled_coupling(n: u32, r_tilde: f64) -> f64 {
    let k = n as f64 * PI;
    k.sqrt() * (k * (r_tilde + 0.5)).sin()
}

fn coupling_slope(n: u32, r_tilde: f64) -> f64 {
    let k = n as f64 * PI;
    k.powf(1.5) * (k * (r_tilde + 0.5)).cos()
}

fn residual(n: u32, sign: RelativeSign, r: f64) -> f64 {
    scaled_coupling(n, r) - sign.value() * scaled_coupling(n + 1, r)
}

/// Newton steps from a bisection estimate, kept only while they help.
fn polish(n: u32, sign: RelativeSign, mut r: f64) -> f64 {
    for _ in 0..3 {
        let slope = coupling_slope(n, r) - sign.value() * coupling_slope(n + 1, r);
        if slope == 0.0 {
            break;
        }
        let next = r - residual(n, sign, r) / slope;
        if residual(n, sign, next).abs() >= residual(n, sign, r).abs() {
            break;
        }
        r = next;
    }
    r
}

/// Positions inside the cavity where modes `n` and `n+1` couple with equal
/// magnitude and the requested relative sign, excluding shared nodes.
pub fn solve_position(n: u32, sign: RelativeSign) -> Result<Vec<ScaledPosition>> {
    if n == 0 {
        return Err(Error::InvalidParameter("mode index must be >= 1".into()));
    }
    let f = |r: f64| residual(n, sign, r);
    let steps = (1.0 / GRID_STEP).round() as usize;
    let grid = |i: usize| -0.5 + i as f64 * GRID_STEP;
    let mut roots: Vec<f64> = Vec::new();
    // Mirrors are excluded: the field vanishes there for every mode.
    for i in 1..steps - 1 {
        let (a, b) = (grid(i), grid(i + 1));
        let (fa, fb) = (f(a), f(b));
        let root = if fa == 0.0 {
            Some(a)
        } else if fa * fb < 0.0 {
            Some(polish(n, sign, bisect(&f, a, b)))
        } else {
            None
        };
        if let Some(r) = root
            && scaled_coupling(n, r).abs() > MIN_COUPLING
            && roots.last().is_none_or(|&last| r - last > GRID_STEP / 2.0)
        {
            roots.push(r);
        }
    }
    Ok(roots.into_iter().map(|r_tilde| ScaledPosition { r_tilde, n }).collect())
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    // Report whichever end has the smaller residual.
    if f(a).abs() <= f(b).abs() { a } else { b }
}

/// Two distinct positions with equal coupling magnitudes to both modes and
/// opposite relative sign on mode `n+1`, symmetric about the centre.
pub fn two_atom_positions(n: u32) -> Result<(ScaledPosition, ScaledPosition)> {
    let pairs = symmetric_pairs(n)?;
    pairs.into_iter().next().ok_or_else(|| {
        Error::InvalidParameter(format!("no symmetric pair of positions exists for modes {n} and {}", n + 1))
    })
}

/// Every mirror-symmetric pair `(r̃, −r̃)` with `r̃ > 0` where one root comes
/// from each sign branch.
pub fn symmetric_pairs(n: u32) -> Result<Vec<(ScaledPosition, ScaledPosition)>> {
    let equal = solve_position(n, RelativeSign::Equal)?;
    let opposite = solve_position(n, RelativeSign::Opposite)?;
    let mut pairs = Vec::new();
    for p in opposite.iter().filter(|p| p.r_tilde > 0.0) {
        if let Some(q) = equal.iter().find(|q| (q.r_tilde + p.r_tilde).abs() < 1e-9) {
            pairs.push((*p, *q));
        }
    }
    Ok(pairs)
}
