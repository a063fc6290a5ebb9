//! Zero-temperature Lindblad dynamics and fidelity-versus-dissipation sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, fidelity, pauli, Factor, Pauli, SpaceLayout};
use crate::numkit::{
    c, evolve_density_converged, is_hermitian, min_eigenvalue_hermitian, projector, trace, CMatrix,
    SparseOp, Superoperator, I,
};
use crate::protocols::{ideal_state, ProtocolSpec, Scheme};
use crate::sweep::{validate_grid, SweepResult, SweepRow};

/// Cavity and qubit decay rates, in the protocol's rate unit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DecayRates {
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub gamma: f64,
}

impl DecayRates {
    pub fn new(kappa_a: f64, kappa_b: f64, gamma: f64) -> Result<Self> {
        let r = Self { kappa_a, kappa_b, gamma };
        r.validate()?;
        Ok(r)
    }

    pub fn qubit_only(gamma: f64) -> Result<Self> {
        Self::new(0.0, 0.0, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa_a", self.kappa_a), ("kappa_b", self.kappa_b), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kappa_a: self.kappa_a * factor,
            kappa_b: self.kappa_b * factor,
            gamma: self.gamma * factor,
        }
    }
}

/// A decay-rate configuration parametrised by one strength `χ`:
/// `(κA, κB, γ) = (mA·χ, mB·χ, mG·χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationScenario {
    pub name: &'static str,
    pub multipliers: [f64; 3],
}

impl DissipationScenario {
    pub const EQUAL: Self = Self::new("equal", [1.0, 1.0, 1.0]);
    pub const CAVITY_LOW: Self = Self::new("cavity-low", [0.1, 0.1, 1.0]);
    pub const QUBIT_LOW: Self = Self::new("qubit-low", [1.0, 1.0, 0.1]);
    pub const MIXED_1: Self = Self::new("mixed-1", [0.1, 0.5, 1.0]);
    pub const MIXED_1_SWAPPED: Self = Self::new("mixed-1-swapped", [0.5, 0.1, 1.0]);
    pub const MIXED_2: Self = Self::new("mixed-2", [1.0, 0.5, 0.1]);
    pub const MIXED_2_SWAPPED: Self = Self::new("mixed-2-swapped", [0.5, 1.0, 0.1]);

    /// The five plotted configurations; mixed cases use the first listed mode order.
    pub const FIGURE: [Self; 5] = [
        Self::EQUAL,
        Self::CAVITY_LOW,
        Self::QUBIT_LOW,
        Self::MIXED_1,
        Self::MIXED_2,
    ];

    pub const ALL: [Self; 7] = [
        Self::EQUAL,
        Self::CAVITY_LOW,
        Self::QUBIT_LOW,
        Self::MIXED_1,
        Self::MIXED_1_SWAPPED,
        Self::MIXED_2,
        Self::MIXED_2_SWAPPED,
    ];

    const fn new(name: &'static str, multipliers: [f64; 3]) -> Self {
        Self { name, multipliers }
    }

    pub fn rates(&self, chi: f64) -> DecayRates {
        let [a, b, g] = self.multipliers;
        DecayRates {
            kappa_a: a * chi,
            kappa_b: b * chi,
            gamma: g * chi,
        }
    }
}

impl fmt::Display for DissipationScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl FromStr for DissipationScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// `L(ρ) = −i(H_nh ρ − ρ H_nh†) + Σ_c c ρ c†`, with `H_nh = H − (i/2) Σ c†c`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    h_nh: SparseOp,
    h_nh_adj: SparseOp,
    channels: Vec<SparseOp>,
    bound: f64,
}

impl Lindbladian {
    /// Generator from a Hamiltonian and explicit jump operators.
    pub fn new(h: &CMatrix, jumps: &[CMatrix]) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare {
                context: "Lindbladian",
                rows: h.nrows(),
                cols: h.ncols(),
            });
        }
        let dim = h.nrows();
        let mut loss = CMatrix::zeros(dim, dim);
        for j in jumps {
            if j.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    context: "jump operator",
                    expected: dim,
                    found: j.nrows(),
                });
            }
            loss += j.adjoint() * j;
        }
        let h_nh = h - loss * (I * 0.5);
        let channels: Vec<SparseOp> = jumps.iter().map(SparseOp::from_dense).collect();
        let sparse = SparseOp::from_dense(&h_nh);
        let bound = 2.0 * sparse.norm_bound() + channels.iter().map(|c| c.norm_bound().powi(2)).sum::<f64>();
        Ok(Self {
            h_nh_adj: sparse.adjoint(),
            h_nh: sparse,
            channels,
            bound,
        })
    }
}

impl Superoperator for Lindbladian {
    fn dim(&self) -> usize {
        self.h_nh.dim()
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = (self.h_nh.left_mul(rho) - self.h_nh_adj.right_mul(rho)) * -I;
        for ch in &self.channels {
            out += ch.sandwich(rho);
        }
        out
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

/// Standard GKSL generator with channels `√κA a`, `√κB b` and `√γ σ⁻_k`.
/// Cavity rates must vanish on qubit-only layouts.
pub fn lindblad_generator(h: &CMatrix, rates: &DecayRates, layout: &SpaceLayout) -> Result<Lindbladian> {
    rates.validate()?;
    if h.nrows() != layout.dim() || h.ncols() != layout.dim() {
        return Err(Error::DimensionMismatch {
            context: "lindblad_generator",
            expected: layout.dim(),
            found: h.nrows(),
        });
    }
    if !is_hermitian(h, 1e-12 * (1.0 + h.norm())) {
        return Err(Error::InvalidParameter("Hamiltonian is not Hermitian".into()));
    }
    let mut jumps = Vec::new();
    match layout.nmax() {
        Some(nmax) => {
            let a = annihilation(nmax);
            for (factor, rate) in [(Factor::ModeA, rates.kappa_a), (Factor::ModeB, rates.kappa_b)] {
                if rate > 0.0 {
                    jumps.push(embed(&a, layout.position(factor)?, layout)? * c(rate.sqrt(), 0.0));
                }
            }
        }
        None if rates.kappa_a > 0.0 || rates.kappa_b > 0.0 => {
            return Err(Error::InvalidParameter("cavity decay needs a layout with modes".into()));
        }
        None => {}
    }
    if rates.gamma > 0.0 {
        let lower = pauli(Pauli::Minus);
        for k in 0..layout.n_qubits() {
            jumps.push(embed(&lower, layout.position(Factor::Qubit(k))?, layout)? * c(rates.gamma.sqrt(), 0.0));
        }
    }
    Lindbladian::new(h, &jumps)
}

/// Final state of a dissipative run together with its validity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeRun {
    pub rho: CMatrix,
    pub fidelity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub steps: usize,
}

/// Evolves the protocol's initial state for its ideal duration under the
/// given decay and scores it against the noiseless output.
pub fn dissipative_run(spec: &ProtocolSpec, rates: &DecayRates) -> Result<DissipativeRun> {
    let layout = spec.layout()?;
    let generator = lindblad_generator(&spec.hamiltonian()?, rates, &layout)?;
    let ideal = ideal_state(spec)?;
    let rho0 = projector(&spec.initial);
    let score = |rho: &CMatrix| fidelity(&ideal, rho).unwrap_or(f64::NAN);
    let (rho, steps) = evolve_density_converged(&generator, &rho0, spec.ideal_time, score)?;
    Ok(DissipativeRun {
        fidelity: score(&rho),
        trace: trace(&rho).re,
        min_eigenvalue: min_eigenvalue_hermitian(&rho),
        rho,
        steps,
    })
}

pub fn dissipative_fidelity(spec: &ProtocolSpec, rates: &DecayRates) -> Result<f64> {
    dissipative_run(spec, rates).map(|r| r.fidelity)
}

/// Rates seen by a protocol at strength `χ`: the full scenario for resonant
/// schemes, only the qubit channel for dispersive ones.
pub fn scenario_rates(spec: &ProtocolSpec, scenario: &DissipationScenario, chi: f64) -> DecayRates {
    let unit = spec.rate_unit();
    let rates = scenario.rates(chi * unit);
    match spec.scheme {
        Scheme::Dispersive => DecayRates {
            kappa_a: 0.0,
            kappa_b: 0.0,
            gamma: rates.gamma,
        },
        _ => rates,
    }
}

/// One dissipative run per grid point, in grid order. `chi_grid` is in the
/// protocol's rate unit.
pub fn chi_sweep_runs(
    spec: &ProtocolSpec,
    scenario: &DissipationScenario,
    chi_grid: &[f64],
) -> Result<Vec<DissipativeRun>> {
    validate_grid(chi_grid, "chi")?;
    chi_grid
        .par_iter()
        .map(|&chi| dissipative_run(spec, &scenario_rates(spec, scenario, chi)))
        .collect()
}

pub fn chi_sweep(spec: &ProtocolSpec, scenario: &DissipationScenario, chi_grid: &[f64]) -> Result<SweepResult> {
    let runs = chi_sweep_runs(spec, scenario, chi_grid)?;
    let mut out = SweepResult::new("chi_over_unit");
    out.rows = chi_grid
        .iter()
        .zip(runs)
        .map(|(&chi, run)| SweepRow {
            parameter: chi,
            protocol: spec.name.to_string(),
            scenario: Some(scenario.name.to_string()),
            jitter_pct: None,
            mean: run.fidelity,
            stderr: 0.0,
            reps: 1,
            seed: None,
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpaceLayout;
    use crate::numkit::{evolve_density, max_abs_diff, propagate_density, propagator, CVector, ONE, ZERO};
    use crate::protocols::{build_protocol, ProtocolName, ProtocolOptions};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn random_density(dim: usize, seed: &[f64]) -> CMatrix {
        let a = CMatrix::from_fn(dim, dim, |i, j| {
            let k = (i * dim + j) % seed.len();
            c(seed[k] * (1.0 + i as f64), seed[(k + 1) % seed.len()] - j as f64 * 0.1)
        });
        let m = &a * a.adjoint();
        let tr = trace(&m);
        m / tr
    }

    #[test]
    fn amplitude_damping_matches_exponential() {
        let layout = SpaceLayout::qubits(1).unwrap();
        let gamma = 0.7;
        let l = lindblad_generator(&CMatrix::zeros(2, 2), &DecayRates::qubit_only(gamma).unwrap(), &layout).unwrap();
        let rho0 = projector(&CVector::from_vec(vec![ONE, ZERO]));
        for t in [0.3, 1.0, 2.5] {
            let rk = evolve_density(&l, &rho0, t, t / 20000.0).unwrap();
            let taylor = propagate_density(&l, &rho0, t).unwrap();
            let want = (-gamma * t).exp();
            assert_abs_diff_eq!(rk[(0, 0)].re, want, epsilon = 1e-6);
            assert_abs_diff_eq!(taylor[(0, 0)].re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(trace(&rk).re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cavity_decay_matches_exponential() {
        let layout = SpaceLayout::bimodal(1, 1).unwrap();
        let dim = layout.dim();
        let rates = DecayRates::new(0.4, 0.9, 0.0).unwrap();
        let l = lindblad_generator(&CMatrix::zeros(dim, dim), &rates, &layout).unwrap();
        // |11↓⟩ decays as a product of two independent mode decays.
        let idx = layout.index_of(&[1, 1, 1]).unwrap();
        let mut psi = CVector::zeros(dim);
        psi[idx] = ONE;
        let rho = propagate_density(&l, &projector(&psi), 1.3).unwrap();
        assert_abs_diff_eq!(rho[(idx, idx)].re, (-(0.4 + 0.9) * 1.3f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn zero_rates_give_commutator_dynamics() {
        let spec = build_protocol(ProtocolName::W3Hybrid, &ProtocolOptions::default()).unwrap();
        let h = spec.hamiltonian().unwrap();
        let l = lindblad_generator(&h, &DecayRates::default(), &spec.layout().unwrap()).unwrap();
        let rho0 = projector(&spec.initial);
        let t = spec.ideal_time;
        let exact = projector(&(propagator(&h, t).unwrap() * &spec.initial));
        let rk = evolve_density(&l, &rho0, t, t / 20000.0).unwrap();
        assert!(max_abs_diff(&rk, &exact) < 1e-8);
        assert!(max_abs_diff(&propagate_density(&l, &rho0, t).unwrap(), &exact) < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = SpaceLayout::qubits(2).unwrap();
        let h = CMatrix::zeros(4, 4);
        assert!(lindblad_generator(&h, &DecayRates::new(0.1, 0.0, 0.0).unwrap(), &q).is_err());
        assert!(lindblad_generator(&CMatrix::zeros(2, 2), &DecayRates::default(), &q).is_err());
        assert!(DecayRates::new(-0.1, 0.0, 0.0).is_err());
        assert!(matches!("nope".parse::<DissipationScenario>(), Err(Error::UnknownName(_))));
        let spec = build_protocol(ProtocolName::BellModes, &ProtocolOptions::default()).unwrap();
        assert!(chi_sweep(&spec, &DissipationScenario::EQUAL, &[0.1, 0.05]).is_err());
    }

    #[test]
    fn noiseless_runs_are_ideal() {
        for name in ProtocolName::ALL {
            let spec = build_protocol(name, &ProtocolOptions::default()).unwrap();
            let run = dissipative_run(&spec, &DecayRates::default()).unwrap();
            assert_abs_diff_eq!(run.fidelity, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn resonant_ordering_at_moderate_dissipation() {
        let f = |name| {
            let spec = build_protocol(name, &ProtocolOptions::default()).unwrap();
            dissipative_fidelity(&spec, &DissipationScenario::EQUAL.rates(0.05)).unwrap()
        };
        let (bell, w3, wt) = (f(ProtocolName::BellModes), f(ProtocolName::W3Hybrid), f(ProtocolName::WtHybrid));
        assert!(wt > w3 + 1e-4 && w3 > bell + 1e-4, "{wt} {w3} {bell}");
    }

    #[test]
    fn dispersive_sweep_drops_cavity_channels() {
        let spec = build_protocol(ProtocolName::Ghz3, &ProtocolOptions::default()).unwrap();
        let r = scenario_rates(&spec, &DissipationScenario::QUBIT_LOW, 0.5);
        assert_eq!((r.kappa_a, r.kappa_b), (0.0, 0.0));
        assert_abs_diff_eq!(r.gamma, 0.05);
        let sweep = chi_sweep(&spec, &DissipationScenario::EQUAL, &[0.0, 0.05]).unwrap();
        assert_abs_diff_eq!(sweep.rows[0].mean, 1.0, epsilon = 1e-6);
        // Reference value from an independent prototype integration.
        assert_abs_diff_eq!(sweep.rows[1].mean, 0.96648, epsilon = 5e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn generator_output_is_traceless_and_hermitian(
            seed in proptest::collection::vec(-1.0f64..1.0, 5..12),
            ka in 0.0f64..1.0, kb in 0.0f64..1.0, g in 0.0f64..1.0,
        ) {
            let spec = build_protocol(ProtocolName::WtHybrid, &ProtocolOptions::default()).unwrap();
            let layout = spec.layout().unwrap();
            let l = lindblad_generator(&spec.hamiltonian().unwrap(), &DecayRates::new(ka, kb, g).unwrap(), &layout).unwrap();
            let rho = random_density(layout.dim(), &seed);
            let out = l.apply(&rho);
            prop_assert!(trace(&out).norm() < 1e-12);
            prop_assert!(max_abs_diff(&out, &out.adjoint()) < 1e-12);
        }
    }

    proptest! {
        // Each case runs two converged integrations.
        #![proptest_config(ProptestConfig::with_cases(6))]

        #[test]
        fn fidelity_does_not_increase_with_rate_scale(s1 in 0.0f64..0.15, ds in 0.001f64..0.05) {
            let spec = build_protocol(ProtocolName::BellModes, &ProtocolOptions::default()).unwrap();
            let base = DissipationScenario::MIXED_1.rates(1.0);
            let a = dissipative_run(&spec, &base.scaled(s1)).unwrap();
            let b = dissipative_run(&spec, &base.scaled(s1 + ds)).unwrap();
            prop_assert!(b.fidelity <= a.fidelity + 1e-9);
            for run in [&a, &b] {
                prop_assert!((run.trace - 1.0).abs() < 1e-9);
                prop_assert!(run.min_eigenvalue >= -1e-8);
            }
        }
    }
}
