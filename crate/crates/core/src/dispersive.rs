//! Closed forms of the dispersive (large-detuning) regime, with modes in
//! vacuum. Times are in units of `1/λ` when `lambda = 1`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{effective_hamiltonian, rotating_frame_hamiltonian, BimodalParams, EffectiveParams, Sign};
use crate::hilbert::{basis_state, fidelity, partial_trace, spin_state, spins, BasisLabel, SpaceLayout};
use crate::numkit::{c, kron_vectors, projector, propagator, CVector, C64, ONE};

/// Qubit 1 amplitude and the common amplitude of qubits `2..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveWAmplitudes {
    pub n: usize,
    pub c1: C64,
    pub ck: C64,
}

impl DispersiveWAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + (self.n - 1) as f64 * self.ck.norm_sqr()
    }

    /// State vector on the `N`-qubit space.
    pub fn to_state(&self) -> Result<CVector> {
        let layout = SpaceLayout::qubits(self.n)?;
        let mut v = CVector::zeros(layout.dim());
        let all_down = layout.dim() - 1;
        for k in 0..self.n {
            let up_k = all_down & !(1usize << (self.n - 1 - k));
            v[up_k] = if k == 0 { self.c1 } else { self.ck };
        }
        Ok(v)
    }
}

/// Sign pattern `(−, +, .., +)` that couples qubit 1 to every other qubit.
pub fn star_signs(n: usize) -> Vec<Sign> {
    let mut s = vec![Sign::Plus; n];
    s[0] = Sign::Minus;
    s
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    Ok(())
}

/// Evolution from `|↑↓..↓⟩` under the star pattern.
pub fn w_dispersive_amplitudes(n: usize, lambda: f64, t: f64) -> Result<DispersiveWAmplitudes> {
    if n < 2 {
        return Err(Error::InvalidParameter("the dispersive W scheme needs N >= 2".into()));
    }
    check_lambda(lambda)?;
    let root = ((n - 1) as f64).sqrt();
    let (sin, cos) = (2.0 * root * lambda * t).sin_cos();
    Ok(DispersiveWAmplitudes {
        n,
        c1: c(cos, 0.0),
        ck: c(0.0, sin / root),
    })
}

/// Shortest time at which qubit 1 keeps up-population `p1`.
pub fn w_dispersive_time(n: usize, lambda: f64, p1: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("the dispersive W scheme needs N >= 2".into()));
    }
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParameter(format!("population must lie in [0, 1], got {p1}")));
    }
    Ok(p1.sqrt().acos() / (2.0 * ((n - 1) as f64).sqrt() * lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzAmplitudes {
    pub mu: f64,
    pub nu: f64,
    /// Amplitudes in basis order `|↑↑↑⟩ .. |↓↓↓⟩`.
    pub amplitudes: [C64; 8],
}

impl GhzAmplitudes {
    pub fn to_state(&self) -> CVector {
        CVector::from_row_slice(&self.amplitudes)
    }
}

/// Evolution of `|+++⟩` under the star pattern `(−, +, +)`.
pub fn ghz_evolution(lambda: f64, t: f64) -> Result<GhzAmplitudes> {
    check_lambda(lambda)?;
    let phase = 2.0 * SQRT_2 * lambda * t;
    let mu = phase.cos();
    let nu = phase.sin() / SQRT_2;
    let one = c(mu, nu);
    let two = c(mu, 2.0 * nu);
    let raw = [ONE, one, one, two, two, one, one, ONE];
    let scale = 1.0 / (2.0 * SQRT_2);
    Ok(GhzAmplitudes {
        mu,
        nu,
        amplitudes: raw.map(|z| z * scale),
    })
}

/// `|+⟩^⊗n`
pub fn plus_state(n: usize) -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
    kron_vectors(&vec![plus; n])
}

/// Sign pattern `(−, −, +, +)` of the one-step cluster scheme.
pub fn cluster_signs() -> Vec<Sign> {
    vec![Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus]
}

pub fn cluster_initial_state() -> CVector {
    let layout = SpaceLayout::qubits(4).expect("four qubits");
    spin_state(&spins("udud"), &layout).expect("valid pattern")
}

/// `exp(−i H_eff t)|↑↓↑↓⟩` for the cluster sign pattern.
pub fn cluster_evolution(lambda: f64, t: f64) -> Result<CVector> {
    let p = EffectiveParams::new(lambda, cluster_signs())?;
    let h = effective_hamiltonian(&p, 0, 0)?;
    Ok(propagator(&h, t)? * cluster_initial_state())
}

/// Candidate definitions of the effective coupling in terms of `Ω` and `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingConvention {
    /// `λ = Ω²/Δ`, the second-order perturbative result.
    OmegaSquaredOverDelta,
    /// `λ = Δ²/Ω`, kept only to show that it fails the full-model check.
    DeltaSquaredOverOmega,
}

impl CouplingConvention {
    pub fn lambda(self, omega: f64, delta: f64) -> f64 {
        match self {
            CouplingConvention::OmegaSquaredOverDelta => omega * omega / delta,
            CouplingConvention::DeltaSquaredOverOmega => delta * delta / omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityCheck {
    pub delta_over_omega: f64,
    pub nmax: usize,
    pub lambda: f64,
    pub time: f64,
    /// Fidelity of the reduced four-qubit state with the effective-model prediction.
    pub fidelity: f64,
}

/// Runs the one-step cluster scheme in the full two-mode model at `Ω = 1`
/// for the time the effective model prescribes, and scores the qubits
/// (modes traced out) against the effective-model cluster state.
pub fn dispersive_validity(delta_over_omega: f64, nmax: usize, convention: CouplingConvention) -> Result<ValidityCheck> {
    if !(delta_over_omega > 0.0 && delta_over_omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("detuning ratio must be > 0, got {delta_over_omega}")));
    }
    let (omega, delta) = (1.0, delta_over_omega);
    let lambda = convention.lambda(omega, delta);
    let time = std::f64::consts::PI / (4.0 * SQRT_2 * lambda);
    let p = BimodalParams::new(omega, delta, cluster_signs(), nmax)?;
    let layout = p.layout()?;
    let psi0 = basis_state(&BasisLabel::new(0, 0, spins("udud")), &layout)?;
    let psi = propagator(&rotating_frame_hamiltonian(&p, &layout)?, time)? * psi0;
    let qubits = partial_trace(&projector(&psi), &[2, 3, 4, 5], &layout)?;
    let predicted = cluster_evolution(lambda, time)?;
    Ok(ValidityCheck {
        delta_over_omega,
        nmax,
        lambda,
        time,
        fidelity: fidelity(&predicted, &qubits)?,
    })
}
