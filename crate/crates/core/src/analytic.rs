//! Closed-form quasi-resonant dynamics in the single-excitation sector.
//!
//! All amplitudes are in the rotating frame of the two modes. Times are in
//! units of `1/Ω` whenever `omega = 1`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::Sign;
use crate::hilbert::SpaceLayout;
use crate::numkit::{c, CVector, C64, I, ZERO};

/// Slack allowed when a requested detuning sits on a window boundary.
const WINDOW_SLACK: f64 = 1e-12;

fn rabi(omega: f64, delta: f64, n: usize) -> f64 {
    (delta * delta + 2.0 * n as f64 * omega * omega).sqrt()
}

/// Amplitudes of `|10↓⟩`, `|01↓⟩`, `|00↑⟩` after one qubit, initially up,
/// interacts with both modes in vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitAmplitudes {
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
}

impl SingleQubitAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr()
    }

    /// Embeds the amplitudes into a bimodal single-qubit layout.
    pub fn to_state(&self, nmax: usize) -> Result<CVector> {
        let layout = SpaceLayout::bimodal(nmax, 1)?;
        let mut v = CVector::zeros(layout.dim());
        v[layout.index_of(&[1, 0, 1])?] = self.c1;
        v[layout.index_of(&[0, 1, 1])?] = self.c2;
        v[layout.index_of(&[0, 0, 0])?] = self.c3;
        Ok(v)
    }
}

pub fn single_qubit_amplitudes(omega: f64, delta: f64, s1: Sign, t: f64) -> SingleQubitAmplitudes {
    let w = rabi(omega, delta, 1);
    let (sin, cos) = (w * t).sin_cos();
    let c1 = -c(omega / (w * w), 0.0) * c(delta * (1.0 - cos), w * sin);
    let c2 = -c1.conj() * s1.value();
    let c3 = c((delta * delta + 2.0 * omega * omega * cos) / (w * w), 0.0);
    SingleQubitAmplitudes { c1, c2, c3 }
}

/// Probability that the qubit is still up at time `t`.
pub fn p_up_single(omega: f64, delta: f64, t: f64) -> f64 {
    let w = rabi(omega, delta, 1);
    let x = (delta * delta + 2.0 * omega * omega * (w * t).cos()) / (w * w);
    x * x
}

/// Which root of `P↑ = c3²` to target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Branch {
    /// `c3 = +√P`
    #[default]
    Positive,
    /// `c3 = −√P`
    Negative,
}

/// Largest detuning for which `c3 = ±√P` is reachable.
pub fn p_up_window(omega: f64, p_target: f64, branch: Branch) -> f64 {
    let r = p_target.sqrt();
    let ratio = match branch {
        Branch::Positive => (1.0 + r) / (1.0 - r),
        Branch::Negative => (1.0 - r) / (1.0 + r),
    };
    SQRT_2 * ratio.sqrt() * omega
}

fn check_window(what: &str, requested: f64, lower: f64, upper: f64) -> Result<()> {
    let slack = WINDOW_SLACK * upper.abs().max(1.0);
    if requested < lower - slack || requested > upper + slack || requested.is_nan() {
        return Err(Error::Infeasible {
            what: what.to_string(),
            requested,
            lower,
            upper,
        });
    }
    Ok(())
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Shortest `t ≥ 0` at which the single qubit has up-population `P`.
pub fn time_for_p_up(omega: f64, delta: f64, p_target: f64, branch: Branch) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_target) {
        return Err(Error::InvalidParameter(format!(
            "target population must lie in [0, 1], got {p_target}"
        )));
    }
    let upper = p_up_window(omega, p_target, branch);
    check_window("detuning Delta", delta, 0.0, upper)?;
    let w = rabi(omega, delta, 1);
    let root = match branch {
        Branch::Positive => p_target.sqrt(),
        Branch::Negative => -p_target.sqrt(),
    };
    let cos = (w * w * root - delta * delta) / (2.0 * omega * omega);
    Ok(clamp_unit(cos).acos() / w)
}

/// Amplitudes of `|10↓↓⟩`, `|01↓↓⟩`, `|00↑↓⟩`, `|00↓↑⟩` after qubit 1
/// (initially up) interacts for `t1`, the modes evolve freely for `td`, and
/// qubit 2 (initially down) interacts for `t2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequentialAmplitudes {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
}

impl SequentialAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr() + self.gamma.norm_sqr() + self.delta.norm_sqr()
    }

    pub fn to_state(&self, nmax: usize) -> Result<CVector> {
        let layout = SpaceLayout::bimodal(nmax, 2)?;
        let mut v = CVector::zeros(layout.dim());
        v[layout.index_of(&[1, 0, 1, 1])?] = self.alpha;
        v[layout.index_of(&[0, 1, 1, 1])?] = self.beta;
        v[layout.index_of(&[0, 0, 0, 1])?] = self.gamma;
        v[layout.index_of(&[0, 0, 1, 0])?] = self.delta;
        Ok(v)
    }
}

/// Mode-to-mode amplitudes `(a(t), b(t))` for a qubit initially down
/// meeting one photon in mode A.
fn mode_transfer(omega: f64, delta: f64, s: Sign, t: f64) -> (C64, C64) {
    let w = rabi(omega, delta, 1);
    let w2 = w * w;
    let (sin, cos) = (w * t).sin_cos();
    let o2 = omega * omega;
    let a = c(o2 + (o2 + delta * delta) * cos, -delta * w * sin) / w2;
    let b = c(-s.value() * o2 / w2 * (1.0 - cos), 0.0);
    (a, b)
}

pub fn sequential_amplitudes(
    omega: f64,
    delta: f64,
    s1: Sign,
    s2: Sign,
    t1: f64,
    td: f64,
    t2: f64,
) -> SequentialAmplitudes {
    let first = single_qubit_amplitudes(omega, delta, s1, t1);
    let second = single_qubit_amplitudes(omega, delta, s2, t2);
    let (a, b) = mode_transfer(omega, delta, s2, t2);
    let ea = C64::from_polar(1.0, -delta * td);
    let eb = ea.conj();
    let (x, y) = (first.c1 * ea, first.c2 * eb);
    SequentialAmplitudes {
        alpha: x * a + y * b,
        beta: x * b + y * a.conj(),
        gamma: first.c3,
        delta: x * second.c1 + y * second.c2,
    }
}

/// Up-population of qubit 2 when the delay is `jπ/(2Δ)`.
pub fn p_up_second(omega: f64, delta: f64, s1: Sign, s2: Sign, t1: f64, t2: f64, j: u32) -> f64 {
    let x = single_qubit_amplitudes(omega, delta, s1, t1).c1;
    let y = single_qubit_amplitudes(omega, delta, s2, t2).c1;
    let parity = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    2.0 * (x.norm_sqr() * y.norm_sqr() + parity * s1.value() * s2.value() * (x * x * y * y).re)
}

/// Amplitudes of the simultaneous scheme: `a` on `|10↓..↓⟩`, `b` on
/// `|01↓..↓⟩`, and `c[k]` on the state with only qubit `k` up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimultaneousAmplitudes {
    pub a: C64,
    pub b: C64,
    pub c: Vec<C64>,
    /// `√(Δ² + 2NΩ²)`
    pub omega_tilde: f64,
}

impl SimultaneousAmplitudes {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn to_state(&self, nmax: usize) -> Result<CVector> {
        let n = self.n();
        let layout = SpaceLayout::bimodal(nmax, n)?;
        let mut v = CVector::zeros(layout.dim());
        let mut digits = vec![1usize; n + 2];
        digits[0] = 1;
        digits[1] = 0;
        v[layout.index_of(&digits)?] = self.a;
        digits[0] = 0;
        digits[1] = 1;
        v[layout.index_of(&digits)?] = self.b;
        digits[1] = 0;
        for (k, ck) in self.c.iter().enumerate() {
            digits[k + 2] = 0;
            v[layout.index_of(&digits)?] = *ck;
            digits[k + 2] = 1;
        }
        Ok(v)
    }
}

/// Qubit 1 up, the others down, modes in vacuum; all couplings positive.
pub fn simultaneous_vacuum_amplitudes(
    n: usize,
    omega: f64,
    delta: f64,
    t: f64,
) -> Result<SimultaneousAmplitudes> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one qubit is required".into()));
    }
    let w = rabi(omega, delta, n);
    let w2 = w * w;
    let (sin, cos) = (w * t).sin_cos();
    let scale = omega / w2;
    let a = -c(delta * (1.0 - cos), w * sin) * scale;
    let b = c(delta * (1.0 - cos), -w * sin) * scale;
    let c1 = c(1.0 - 2.0 * omega * omega / w2 * (1.0 - cos), 0.0);
    let mut cs = vec![c1 - 1.0; n];
    cs[0] = c1;
    Ok(SimultaneousAmplitudes {
        a,
        b,
        c: cs,
        omega_tilde: w,
    })
}

/// Shortest time at which each partner qubit (k ≠ 1) of the vacuum-seeded
/// scheme reaches up-population `p_k`.
pub fn time_for_vacuum_partner(n: usize, omega: f64, delta: f64, p_k: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("partner qubits need N >= 2".into()));
    }
    if !(0.0..=1.0).contains(&p_k) {
        return Err(Error::InvalidParameter(format!("population must lie in [0, 1], got {p_k}")));
    }
    let o2 = omega * omega;
    let upper2 = 4.0 * o2 / p_k.sqrt() - 2.0 * n as f64 * o2;
    if upper2 < 0.0 {
        return Err(Error::Infeasible {
            what: format!("partner population {p_k} for N = {n}"),
            requested: delta,
            lower: 0.0,
            upper: 0.0,
        });
    }
    check_window("detuning Delta", delta, 0.0, upper2.sqrt())?;
    let w = rabi(omega, delta, n);
    let cos = (2.0 * o2 - w * w * p_k.sqrt()) / (2.0 * o2);
    Ok(clamp_unit(cos).acos() / w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WKind {
    /// Excitation shared among both modes and the qubits (`N + 2` parties).
    Hybrid,
    /// Excitation shared among the qubits only.
    Prototype,
}

impl WKind {
    /// Equal population per party.
    pub fn population(self, n: usize) -> f64 {
        match self {
            WKind::Hybrid => 1.0 / (n as f64 + 2.0),
            WKind::Prototype => 1.0 / n as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WFeasibleCounts {
    pub hybrid: usize,
    pub prototype: usize,
}

/// The only qubit numbers for which the vacuum-seeded scheme yields equal
/// populations.
///
/// `c1` is real and every partner amplitude equals `c1 − 1`, so equal
/// magnitudes force `c1 = 1/2` and a common population of `1/4`.
pub fn w_feasible_counts() -> WFeasibleCounts {
    let find = |kind: WKind| {
        (1..=64usize)
            .find(|&n| match kind {
                WKind::Hybrid => n + 2 == 4,
                WKind::Prototype => n == 4,
            })
            .expect("a feasible count exists")
    };
    WFeasibleCounts {
        hybrid: find(WKind::Hybrid),
        prototype: find(WKind::Prototype),
    }
}

/// Best approach of the vacuum-seeded scheme to an equal-population W state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WScan {
    pub n: usize,
    pub kind: WKind,
    /// Largest absolute population error at the optimum.
    pub deviation: f64,
    pub delta_over_omega: f64,
    pub omega_t: f64,
}

fn w_mismatch(n: usize, kind: WKind, delta: f64, phase: f64) -> f64 {
    let w = rabi(1.0, delta, n);
    let amps = simultaneous_vacuum_amplitudes(n, 1.0, delta, phase / w).expect("n >= 1");
    let target = kind.population(n);
    let mut worst = amps
        .c
        .iter()
        .map(|z| (z.norm_sqr() - target).abs())
        .fold(0.0, f64::max);
    let modes = [amps.a.norm_sqr(), amps.b.norm_sqr()];
    for m in modes {
        let want = match kind {
            WKind::Hybrid => target,
            WKind::Prototype => 0.0,
        };
        worst = worst.max((m - want).abs());
    }
    worst
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Grid scan over `Δ/Ω ∈ [0, 6]` and one Rabi period, followed by
/// alternating golden-section refinement around the best grid point.
pub fn scan_vacuum_w(n: usize, kind: WKind) -> WScan {
    let (nd, np) = (301usize, 361usize);
    let dmax = 6.0;
    let tau = std::f64::consts::TAU;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..nd {
        let d = dmax * i as f64 / (nd - 1) as f64;
        for j in 0..np {
            let ph = tau * j as f64 / (np - 1) as f64;
            let m = w_mismatch(n, kind, d, ph);
            if m < best.0 {
                best = (m, d, ph);
            }
        }
    }
    let (_, mut d, mut ph) = best;
    let (mut hd, mut hp) = (dmax / (nd - 1) as f64, tau / (np - 1) as f64);
    for _ in 0..40 {
        d = golden_min(|x| w_mismatch(n, kind, x, ph), (d - hd).max(0.0), d + hd, 60);
        ph = golden_min(|x| w_mismatch(n, kind, d, x), ph - hp, ph + hp, 60);
        hd *= 0.5;
        hp *= 0.5;
    }
    let w = rabi(1.0, d, n);
    WScan {
        n,
        kind,
        deviation: w_mismatch(n, kind, d, ph),
        delta_over_omega: d,
        omega_t: ph.rem_euclid(tau) / w,
    }
}

/// Phase of the mode state left behind by an auxiliary qubit that fully
/// transfers its excitation at detuning `Δ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellPrimeParameter {
    pub p: C64,
    pub delta0: f64,
}

pub fn bell_prime_parameter(omega: f64, delta0: f64) -> Result<BellPrimeParameter> {
    check_window("auxiliary detuning Delta0", delta0, 0.0, SQRT_2 * omega)?;
    let r = (delta0 / omega).min(SQRT_2);
    let p = -c(r, (2.0 - r * r).max(0.0).sqrt()) * 0.5;
    Ok(BellPrimeParameter { p, delta0 })
}

/// Mode state `p|10⟩ + p*|01⟩` with all qubits down.
pub fn bell_primed_initial_state(p: C64, n: usize, nmax: usize) -> Result<CVector> {
    SimultaneousAmplitudes {
        a: p,
        b: p.conj(),
        c: vec![ZERO; n],
        omega_tilde: 0.0,
    }
    .to_state(nmax)
}

/// Amplitudes after `N` down qubits (all couplings positive) interact with
/// the primed modes for time `t`.
pub fn bell_primed_amplitudes(
    n: usize,
    omega: f64,
    delta: f64,
    p: C64,
    t: f64,
) -> Result<SimultaneousAmplitudes> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one qubit is required".into()));
    }
    if (p.norm_sqr() - 0.5).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("|p|^2 must be 1/2, got {}", p.norm_sqr())));
    }
    let w = rabi(omega, delta, n);
    let w2 = w * w;
    let (sin, cos) = (w * t).sin_cos();
    let pc = p.conj();
    let no2 = n as f64 * omega * omega;
    let d2 = delta * delta;
    let a = ((p - pc) * no2 + (p * d2 + (p + pc) * no2) * cos - I * p * delta * w * sin) / w2;
    let b = ((pc - p) * no2 + (pc * d2 + (p + pc) * no2) * cos + I * pc * delta * w * sin) / w2;
    let ck = ((pc - p) * delta * (1.0 - cos) - I * (p + pc) * w * sin) * (omega / w2);
    Ok(SimultaneousAmplitudes {
        a,
        b,
        c: vec![ck; n],
        omega_tilde: w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PKind {
    /// `p = −1/√2`, from `Δ₀ = √2Ω`.
    Real,
    /// `p = −i/√2`, from `Δ₀ = 0`.
    Imaginary,
}

impl PKind {
    pub fn parameter(self, omega: f64) -> BellPrimeParameter {
        let delta0 = match self {
            PKind::Real => SQRT_2 * omega,
            PKind::Imaginary => 0.0,
        };
        bell_prime_parameter(omega, delta0).expect("window endpoints are admissible")
    }

    /// Admissible detuning interval for a W state of `n` qubits.
    pub fn window(self, n: usize, kind: WKind, omega: f64) -> (f64, f64) {
        let p = kind.population(n);
        match self {
            PKind::Real => (0.0, SQRT_2 * (1.0 / p - n as f64).max(0.0).sqrt() * omega),
            PKind::Imaginary => {
                let r = (1.0 - n as f64 * p).max(0.0).sqrt();
                let s = SQRT_2 / p.sqrt() * omega;
                (s * (1.0 - r), s * (1.0 + r))
            }
        }
    }
}

/// Shortest time for the primed scheme to give every qubit the W population.
pub fn time_for_w(n: usize, kind: WKind, p_kind: PKind, omega: f64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one qubit is required".into()));
    }
    let (lower, upper) = p_kind.window(n, kind, omega);
    check_window("detuning Delta", delta, lower, upper)?;
    let p = kind.population(n);
    let w = rabi(omega, delta, n);
    let t = match p_kind {
        PKind::Real => clamp_unit(w * p.sqrt() / (SQRT_2 * omega)).asin() / w,
        PKind::Imaginary => {
            let k = SQRT_2 * omega * delta;
            clamp_unit((k - w * w * p.sqrt()) / k).acos() / w
        }
    };
    Ok(t)
}
