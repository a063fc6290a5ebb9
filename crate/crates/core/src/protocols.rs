//! Catalogue of generation protocols: initial state, generator, ideal
//! duration, printed target and the local unitary relating them.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    bell_primed_amplitudes, bell_primed_initial_state, single_qubit_amplitudes, time_for_p_up,
    time_for_w, Branch, PKind, WKind,
};
use crate::dispersive::{
    cluster_evolution, cluster_initial_state, cluster_signs, ghz_evolution, plus_state, star_signs,
    w_dispersive_amplitudes, w_dispersive_time,
};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    effective_hamiltonian, rotating_frame_hamiltonian, BimodalParams, EffectiveParams, Sign,
};
use crate::hilbert::{
    basis_state, hadamard, overlap_fidelity, pauli, spin_state, spins, tensor_ops, BasisLabel, Pauli,
    SpaceLayout, Spin,
};
use crate::numkit::{c, identity, kron_vectors, CMatrix, CVector, C64, I, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolName {
    BellModes,
    W3Hybrid,
    WtHybrid,
    WnHybrid,
    WnPrototype,
    WDispersive,
    Ghz3,
    Cluster4,
}

impl ProtocolName {
    pub const ALL: [ProtocolName; 8] = [
        ProtocolName::BellModes,
        ProtocolName::W3Hybrid,
        ProtocolName::WtHybrid,
        ProtocolName::WnHybrid,
        ProtocolName::WnPrototype,
        ProtocolName::WDispersive,
        ProtocolName::Ghz3,
        ProtocolName::Cluster4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolName::BellModes => "bell-modes",
            ProtocolName::W3Hybrid => "w3-hybrid",
            ProtocolName::WtHybrid => "wt-hybrid",
            ProtocolName::WnHybrid => "wN-hybrid",
            ProtocolName::WnPrototype => "wN-prototype",
            ProtocolName::WDispersive => "w-dispersive",
            ProtocolName::Ghz3 => "ghz3",
            ProtocolName::Cluster4 => "cluster4",
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            ProtocolName::BellModes | ProtocolName::W3Hybrid | ProtocolName::WtHybrid => {
                Scheme::ResonantSequential
            }
            ProtocolName::WnHybrid | ProtocolName::WnPrototype => Scheme::BellPrimed,
            ProtocolName::WDispersive | ProtocolName::Ghz3 | ProtocolName::Cluster4 => Scheme::Dispersive,
        }
    }
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolName::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One qubit at a time crosses the cavity.
    ResonantSequential,
    /// Qubits meet modes prepared by an auxiliary qubit.
    BellPrimed,
    /// Far-detuned qubits exchange excitations through virtual photons.
    Dispersive,
}

/// User-facing knobs; unset values fall back to per-protocol defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ProtocolOptions {
    pub omega: f64,
    pub delta_over_omega: Option<f64>,
    pub n: Option<usize>,
    pub nmax: usize,
    /// Target up-population of qubit 1 in the dispersive W scheme.
    pub p1: Option<f64>,
    pub p_kind: PKind,
    pub lambda: f64,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            omega: 1.0,
            delta_over_omega: None,
            n: None,
            nmax: 1,
            p1: None,
            p_kind: PKind::Real,
            lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProtocolParams {
    Bimodal(BimodalParams),
    Effective(EffectiveParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub name: ProtocolName,
    pub scheme: Scheme,
    pub params: ProtocolParams,
    pub ideal_time: f64,
    pub initial: CVector,
    /// Printed target in this library's basis convention.
    pub target: CVector,
    /// Local unitary taking the generated state onto `target`.
    pub canonicalizer: CMatrix,
    /// Per-factor unitaries whose tensor product is `canonicalizer`.
    pub canonicalizer_factors: Vec<CMatrix>,
    /// Mode amplitude `p` of the primed state, for the primed schemes.
    pub prime: Option<C64>,
}

impl ProtocolSpec {
    pub fn n_qubits(&self) -> usize {
        match &self.params {
            ProtocolParams::Bimodal(p) => p.n(),
            ProtocolParams::Effective(p) => p.n(),
        }
    }

    pub fn layout(&self) -> Result<SpaceLayout> {
        match &self.params {
            ProtocolParams::Bimodal(p) => p.layout(),
            ProtocolParams::Effective(p) => SpaceLayout::qubits(p.n()),
        }
    }

    /// Time-independent generator of the noiseless dynamics.
    pub fn hamiltonian(&self) -> Result<CMatrix> {
        match &self.params {
            ProtocolParams::Bimodal(p) => rotating_frame_hamiltonian(p, &p.layout()?),
            ProtocolParams::Effective(p) => effective_hamiltonian(p, 0, 0),
        }
    }

    pub fn effective(&self) -> Option<&EffectiveParams> {
        match &self.params {
            ProtocolParams::Effective(p) => Some(p),
            ProtocolParams::Bimodal(_) => None,
        }
    }

    /// Unit of time and rate: `Ω` for resonant schemes, `λ` for dispersive ones.
    pub fn rate_unit(&self) -> f64 {
        match &self.params {
            ProtocolParams::Bimodal(p) => p.omega,
            ProtocolParams::Effective(p) => p.lambda,
        }
    }
}

fn wn_label(n: usize, photons: (usize, usize), up: Option<usize>) -> BasisLabel {
    let mut s = vec![Spin::Down; n];
    if let Some(k) = up {
        s[k] = Spin::Up;
    }
    BasisLabel::new(photons.0, photons.1, s)
}

/// Single-excitation superposition with real weights on `|10↓..⟩`,
/// `|01↓..⟩` and each `|00..↑k..⟩`.
fn single_excitation_state(layout: &SpaceLayout, a: f64, b: f64, qubits: &[f64]) -> Result<CVector> {
    let n = layout.n_qubits();
    let mut v = CVector::zeros(layout.dim());
    v += basis_state(&wn_label(n, (1, 0), None), layout)? * c(a, 0.0);
    v += basis_state(&wn_label(n, (0, 1), None), layout)? * c(b, 0.0);
    for (k, &w) in qubits.iter().enumerate() {
        v += basis_state(&wn_label(n, (0, 0), Some(k)), layout)? * c(w, 0.0);
    }
    Ok(v)
}

fn qubit_state(pattern: &str) -> CVector {
    let layout = SpaceLayout::qubits(pattern.chars().count()).expect("non-empty");
    spin_state(&spins(pattern), &layout).expect("valid pattern")
}

/// Named printed states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetState {
    /// `(|10⟩ + |01⟩)/√2` with the qubit down.
    BellModes,
    /// `(|10↓⟩ + |01↓⟩ + |00↑⟩)/√3`
    W3Hybrid,
    /// `(|10↓⟩ + |01↓⟩ + √2|00↑⟩)/2`
    WtHybrid,
    WnHybrid(usize),
    /// Qubit W state with modes in vacuum.
    WnPrototype(usize),
    /// Qubits only: `√P1|↑↓..⟩ + √((1−P1)/(N−1)) Σ_k |..↑k..⟩`.
    WDispersive { n: usize, p1: f64 },
    /// Dispersive output at `λt = π/(2√2)` from `|+++⟩`.
    GhzGenerated,
    /// `(|↑↑↑⟩ + |↓↓↓⟩)/√2`
    Ghz,
    /// Dispersive output at `λt = π/(4√2)` from `|↑↓↑↓⟩`.
    ClusterGenerated,
    /// `(|↑↑↑↑⟩ + |↑↑↓↓⟩ + |↓↓↑↑⟩ − |↓↓↓↓⟩)/2`
    LinearCluster,
    /// Cluster state in the frame where the SASA operator is maximal.
    Phi4,
}

pub fn target_state(target: TargetState, nmax: usize) -> Result<CVector> {
    let third = 1.0 / 3f64.sqrt();
    Ok(match target {
        TargetState::BellModes => {
            let layout = SpaceLayout::bimodal(nmax, 1)?;
            single_excitation_state(&layout, FRAC_1_SQRT_2, FRAC_1_SQRT_2, &[0.0])?
        }
        TargetState::W3Hybrid => {
            let layout = SpaceLayout::bimodal(nmax, 1)?;
            single_excitation_state(&layout, third, third, &[third])?
        }
        TargetState::WtHybrid => {
            let layout = SpaceLayout::bimodal(nmax, 1)?;
            single_excitation_state(&layout, 0.5, 0.5, &[FRAC_1_SQRT_2])?
        }
        TargetState::WnHybrid(n) => {
            let w = 1.0 / (n as f64 + 2.0).sqrt();
            single_excitation_state(&SpaceLayout::bimodal(nmax, n)?, w, w, &vec![w; n])?
        }
        TargetState::WnPrototype(n) => {
            let w = 1.0 / (n as f64).sqrt();
            single_excitation_state(&SpaceLayout::bimodal(nmax, n)?, 0.0, 0.0, &vec![w; n])?
        }
        TargetState::WDispersive { n, p1 } => {
            if n < 2 || !(0.0..=1.0).contains(&p1) {
                return Err(Error::InvalidParameter("dispersive W needs N >= 2 and P1 in [0, 1]".into()));
            }
            dispersive_w_target(n, p1)
        }
        TargetState::GhzGenerated => {
            let s = 1.0 / (2.0 * SQRT_2);
            CVector::from_iterator(8, [s, -s, -s, -s, -s, -s, -s, s].map(|x| c(x, 0.0)))
        }
        TargetState::Ghz => (qubit_state("uuu") + qubit_state("ddd")) * c(FRAC_1_SQRT_2, 0.0),
        TargetState::ClusterGenerated => {
            (qubit_state("udud") - qubit_state("uddu") - qubit_state("duud") - qubit_state("dudu"))
                * c(0.5, 0.0)
        }
        TargetState::LinearCluster => {
            (qubit_state("uuuu") + qubit_state("uudd") + qubit_state("dduu") - qubit_state("dddd"))
                * c(0.5, 0.0)
        }
        TargetState::Phi4 => {
            let h = FRAC_1_SQRT_2;
            let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
            let minus = CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]);
            let (up, down) = (Spin::Up.ket(), Spin::Down.ket());
            let terms = [
                [&plus, &up, &plus, &up],
                [&plus, &up, &minus, &down],
                [&minus, &down, &minus, &up],
                [&minus, &down, &plus, &down],
            ];
            terms
                .iter()
                .map(|t| kron_vectors(&t.map(|v| v.clone())))
                .fold(CVector::zeros(16), |acc, v| acc + v)
                * c(0.5, 0.0)
        }
    })
}

fn dispersive_w_target(n: usize, p1: f64) -> CVector {
    let layout = SpaceLayout::qubits(n).expect("n >= 2");
    let rest = ((1.0 - p1) / (n - 1) as f64).sqrt();
    let mut v = CVector::zeros(layout.dim());
    for k in 0..n {
        let mut s = vec![Spin::Down; n];
        s[k] = Spin::Up;
        let w = if k == 0 { p1.sqrt() } else { rest };
        v += spin_state(&s, &layout).expect("valid") * c(w, 0.0);
    }
    v
}

/// Fixed local frames used to compare generated and textbook states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalFrame {
    /// `VU`, taking the dispersive GHZ output to `(|↑↑↑⟩ + |↓↓↓⟩)/√2`.
    Ghz,
    /// `−σx ⊗ 𝟙 ⊗ σx ⊗ 𝟙`, taking the cluster output to the linear cluster form.
    LinearCluster,
    /// `T = −(Hσx) ⊗ 𝟙 ⊗ σx ⊗ H`, taking the cluster output to `φ₄`.
    SasaFrame,
}

impl FromStr for LocalFrame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(LocalFrame::Ghz),
            "linear-cluster" => Ok(LocalFrame::LinearCluster),
            "sasa-frame" => Ok(LocalFrame::SasaFrame),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

/// Principal square root of a 2×2 matrix without eigenvalues on the
/// closed negative real axis.
pub fn principal_sqrt_2x2(m: &CMatrix) -> CMatrix {
    assert_eq!(m.shape(), (2, 2));
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let s = det.sqrt();
    let t = (m[(0, 0)] + m[(1, 1)] + s * 2.0).sqrt();
    (m + identity(2) * s) / t
}

impl LocalFrame {
    /// Single-qubit factors, qubit 1 first.
    pub fn factors(self) -> Vec<CMatrix> {
        let x = pauli(Pauli::X);
        let z = pauli(Pauli::Z);
        let h = hadamard();
        match self {
            LocalFrame::Ghz => {
                let u1 = principal_sqrt_2x2(&(&x * -I));
                let uz = principal_sqrt_2x2(&(&z * I));
                // V carries the scalar −√i on its first factor.
                let v1 = &z * -I.sqrt();
                vec![v1 * u1, &h * &uz, &h * &uz]
            }
            LocalFrame::LinearCluster => vec![&x * c(-1.0, 0.0), identity(2), x.clone(), identity(2)],
            LocalFrame::SasaFrame => vec![&h * &x * c(-1.0, 0.0), identity(2), x.clone(), h.clone()],
        }
    }

    pub fn matrix(self) -> CMatrix {
        tensor_ops(&self.factors())
    }
}

pub fn canonicalize(state: &CVector, frame: LocalFrame) -> Result<CVector> {
    let m = frame.matrix();
    if m.ncols() != state.len() {
        return Err(Error::DimensionMismatch {
            context: "canonicalize",
            expected: m.ncols(),
            found: state.len(),
        });
    }
    Ok(m * state)
}

/// `exp(−iθ a†a)` on a mode of truncation `nmax`.
fn mode_phase(theta: f64, nmax: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        nmax + 1,
        (0..=nmax).map(|n| C64::from_polar(1.0, -theta * n as f64)),
    ))
}

/// `diag(e^{−iθ}, 1)` on a qubit.
fn qubit_phase(theta: f64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![C64::from_polar(1.0, -theta), ONE]))
}

fn arg_or_zero(z: C64) -> f64 {
    if z.norm() < 1e-12 { 0.0 } else { z.arg() }
}

/// Phase gates removing the phases of single-excitation amplitudes.
fn phase_canonicalizer(nmax: usize, a: C64, b: C64, qubits: &[C64]) -> Vec<CMatrix> {
    let mut f = vec![mode_phase(arg_or_zero(a), nmax), mode_phase(arg_or_zero(b), nmax)];
    f.extend(qubits.iter().map(|&z| qubit_phase(arg_or_zero(z))));
    f
}

fn resonant_p_target(name: ProtocolName) -> f64 {
    match name {
        ProtocolName::BellModes => 0.0,
        ProtocolName::W3Hybrid => 1.0 / 3.0,
        _ => 0.5,
    }
}

/// Builds a protocol, validating its parameter windows.
pub fn build_protocol(name: ProtocolName, opts: &ProtocolOptions) -> Result<ProtocolSpec> {
    let omega = opts.omega;
    match name.scheme() {
        Scheme::ResonantSequential => {
            let delta = opts.delta_over_omega.unwrap_or(SQRT_2) * omega;
            let p = BimodalParams::new(omega, delta, vec![Sign::Minus], opts.nmax)?;
            let p_target = resonant_p_target(name);
            let t = time_for_p_up(omega, delta, p_target, Branch::Positive)?;
            let amps = single_qubit_amplitudes(omega, delta, Sign::Minus, t);
            let layout = p.layout()?;
            let initial = basis_state(&BasisLabel::new(0, 0, vec![Spin::Up]), &layout)?;
            let target = target_state(
                match name {
                    ProtocolName::BellModes => TargetState::BellModes,
                    ProtocolName::W3Hybrid => TargetState::W3Hybrid,
                    _ => TargetState::WtHybrid,
                },
                opts.nmax,
            )?;
            let factors = phase_canonicalizer(opts.nmax, amps.c1, amps.c2, &[amps.c3]);
            Ok(ProtocolSpec {
                name,
                scheme: Scheme::ResonantSequential,
                params: ProtocolParams::Bimodal(p),
                ideal_time: t,
                initial,
                target,
                canonicalizer: tensor_ops(&factors),
                canonicalizer_factors: factors,
                prime: None,
            })
        }
        Scheme::BellPrimed => {
            let n = opts.n.unwrap_or(3);
            let kind = if name == ProtocolName::WnHybrid { WKind::Hybrid } else { WKind::Prototype };
            let default_delta = match opts.p_kind {
                PKind::Real => 0.0,
                PKind::Imaginary => {
                    let (lo, hi) = opts.p_kind.window(n, kind, omega);
                    0.5 * (lo + hi) / omega
                }
            };
            let delta = opts.delta_over_omega.unwrap_or(default_delta) * omega;
            let p = BimodalParams::new(omega, delta, vec![Sign::Plus; n], opts.nmax)?;
            let t = time_for_w(n, kind, opts.p_kind, omega, delta)?;
            let prime = opts.p_kind.parameter(omega).p;
            let amps = bell_primed_amplitudes(n, omega, delta, prime, t)?;
            let target = target_state(
                match kind {
                    WKind::Hybrid => TargetState::WnHybrid(n),
                    WKind::Prototype => TargetState::WnPrototype(n),
                },
                opts.nmax,
            )?;
            let factors = phase_canonicalizer(opts.nmax, amps.a, amps.b, &amps.c);
            Ok(ProtocolSpec {
                name,
                scheme: Scheme::BellPrimed,
                params: ProtocolParams::Bimodal(p),
                ideal_time: t,
                initial: bell_primed_initial_state(prime, n, opts.nmax)?,
                target,
                canonicalizer: tensor_ops(&factors),
                canonicalizer_factors: factors,
                prime: Some(prime),
            })
        }
        Scheme::Dispersive => build_dispersive(name, opts),
    }
}

fn build_dispersive(name: ProtocolName, opts: &ProtocolOptions) -> Result<ProtocolSpec> {
    let lambda = opts.lambda;
    match name {
        ProtocolName::WDispersive => {
            let n = opts.n.unwrap_or(3);
            let p1 = opts.p1.unwrap_or(1.0 / n as f64);
            let t = w_dispersive_time(n, lambda, p1)?;
            let amps = w_dispersive_amplitudes(n, lambda, t)?;
            let layout = SpaceLayout::qubits(n)?;
            let mut pattern = vec![Spin::Down; n];
            pattern[0] = Spin::Up;
            let mut qs = vec![amps.ck; n];
            qs[0] = amps.c1;
            let factors: Vec<CMatrix> = qs.iter().map(|&z| qubit_phase(arg_or_zero(z))).collect();
            Ok(ProtocolSpec {
                name,
                scheme: Scheme::Dispersive,
                params: ProtocolParams::Effective(EffectiveParams::new(lambda, star_signs(n))?),
                ideal_time: t,
                initial: spin_state(&pattern, &layout)?,
                target: dispersive_w_target(n, p1),
                canonicalizer: tensor_ops(&factors),
                canonicalizer_factors: factors,
                prime: None,
            })
        }
        ProtocolName::Ghz3 => {
            let factors = LocalFrame::Ghz.factors();
            Ok(ProtocolSpec {
                name,
                scheme: Scheme::Dispersive,
                params: ProtocolParams::Effective(EffectiveParams::new(lambda, star_signs(3))?),
                ideal_time: std::f64::consts::PI / (2.0 * SQRT_2 * lambda),
                initial: plus_state(3),
                target: target_state(TargetState::Ghz, 1)?,
                canonicalizer: tensor_ops(&factors),
                canonicalizer_factors: factors,
                prime: None,
            })
        }
        ProtocolName::Cluster4 => {
            let factors = LocalFrame::SasaFrame.factors();
            Ok(ProtocolSpec {
                name,
                scheme: Scheme::Dispersive,
                params: ProtocolParams::Effective(EffectiveParams::new(lambda, cluster_signs())?),
                ideal_time: std::f64::consts::PI / (4.0 * SQRT_2 * lambda),
                initial: cluster_initial_state(),
                target: target_state(TargetState::Phi4, 1)?,
                canonicalizer: tensor_ops(&factors),
                canonicalizer_factors: factors,
                prime: None,
            })
        }
        other => Err(Error::InvalidParameter(format!("{other} is not a dispersive protocol"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealRun {
    /// Generated state, before any local correction.
    pub state: CVector,
    pub canonical: CVector,
    pub fidelity: f64,
}

/// Noiseless generated state at the ideal time, from the closed forms.
pub fn ideal_state(spec: &ProtocolSpec) -> Result<CVector> {
    let t = spec.ideal_time;
    match (&spec.params, spec.prime) {
        (ProtocolParams::Bimodal(p), Some(prime)) => {
            bell_primed_amplitudes(p.n(), p.omega, p.delta, prime, t)?.to_state(p.nmax)
        }
        (ProtocolParams::Bimodal(p), _) => {
            single_qubit_amplitudes(p.omega, p.delta, p.signs[0], t).to_state(p.nmax)
        }
        (ProtocolParams::Effective(p), _) => match spec.name {
            ProtocolName::WDispersive => w_dispersive_amplitudes(p.n(), p.lambda, t)?.to_state(),
            ProtocolName::Ghz3 => Ok(ghz_evolution(p.lambda, t)?.to_state()),
            _ => cluster_evolution(p.lambda, t),
        },
    }
}

pub fn run_ideal(spec: &ProtocolSpec) -> Result<IdealRun> {
    let state = ideal_state(spec)?;
    let canonical = &spec.canonicalizer * &state;
    let fidelity = overlap_fidelity(&spec.target, &canonical)?;
    Ok(IdealRun {
        state,
        canonical,
        fidelity,
    })
}
