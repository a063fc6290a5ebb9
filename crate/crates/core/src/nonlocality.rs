//! Four-qubit SASA Bell operator evaluated on imperfect cluster states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{pauli, tensor_ops, Pauli};
use crate::imperfections::{JitterConfig, JitterModel};
use crate::numkit::{c, identity, trace, CMatrix};
use crate::protocols::{LocalFrame, ProtocolSpec};
use crate::sweep::{crossing, validate_grid, SweepResult, SweepRow};

/// Largest value of `⟨B⟩` attainable with local hidden variables.
pub const LOCAL_BOUND: f64 = 2.0;

/// Quantum maximum, reached by the cluster state.
pub const QUANTUM_MAX: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SasaOperator {
    pub matrix: CMatrix,
}

/// `σx𝟙σxσz + σx𝟙σyσy + σzσyσyσz − σzσyσxσy`
pub fn sasa_operator() -> SasaOperator {
    let (x, y, z, one) = (pauli(Pauli::X), pauli(Pauli::Y), pauli(Pauli::Z), identity(2));
    let terms: [(f64, [&CMatrix; 4]); 4] = [
        (1.0, [&x, &one, &x, &z]),
        (1.0, [&x, &one, &y, &y]),
        (1.0, [&z, &y, &y, &z]),
        (-1.0, [&z, &y, &x, &y]),
    ];
    let matrix = terms.iter().fold(CMatrix::zeros(16, 16), |acc, (sign, ops)| {
        acc + tensor_ops(&ops.map(|m| m.clone())) * c(*sign, 0.0)
    });
    SasaOperator { matrix }
}

fn check_four_qubits(rho: &CMatrix) -> Result<()> {
    if rho.shape() != (16, 16) {
        return Err(Error::DimensionMismatch {
            context: "SASA expectation",
            expected: 16,
            found: rho.nrows(),
        });
    }
    Ok(())
}

/// `Tr(B · TρT†)` with `T` the frame change taking the generated cluster
/// state to the form that maximally violates the inequality.
pub fn sasa_expectation(rho: &CMatrix) -> Result<f64> {
    check_four_qubits(rho)?;
    let t = LocalFrame::SasaFrame.matrix();
    Ok(trace(&(sasa_operator().matrix * (&t * rho * t.adjoint()))).re)
}

/// Same value computed as `Tr(T†BT · ρ)`.
pub fn sasa_expectation_heisenberg(rho: &CMatrix) -> Result<f64> {
    check_four_qubits(rho)?;
    let t = LocalFrame::SasaFrame.matrix();
    Ok(trace(&(t.adjoint() * sasa_operator().matrix * t * rho)).re)
}

/// Pairs of decay rate and jitter level evaluated by [`sasa_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SasaGrid {
    /// `γ/λ` values.
    pub gammas: Vec<f64>,
    /// Jitter levels in percent of `1/λ`.
    pub jitter_pcts: Vec<f64>,
}

impl Default for SasaGrid {
    fn default() -> Self {
        Self {
            gammas: (0..=20).map(|k| k as f64 * 0.05).collect(),
            jitter_pcts: vec![0.0, 5.0, 10.0],
        }
    }
}

/// Mean `⟨B⟩` per `(γ/λ, jitter)` pair. The threshold is where the
/// zero-jitter curve first reaches [`LOCAL_BOUND`], if it does on the grid.
pub fn sasa_sweep(spec: &ProtocolSpec, grid: &SasaGrid, cfg: &JitterConfig) -> Result<SweepResult> {
    validate_grid(&grid.gammas, "gamma")?;
    validate_grid(&grid.jitter_pcts, "jitter")?;
    if spec.n_qubits() != 4 {
        return Err(Error::InvalidParameter(format!("{} is not a four-qubit protocol", spec.name)));
    }
    let lambda = spec.rate_unit();
    let mut out = SweepResult::new("gamma_over_lambda");
    let mut zero_jitter = Vec::new();
    for &jitter in &grid.jitter_pcts {
        for &gamma in &grid.gammas {
            let model = JitterModel::new(spec, gamma * lambda)?;
            let run = cfg.with_sigma(jitter / 100.0);
            let (mean, stderr, reps) =
                model.monte_carlo(&run, |rho| sasa_expectation(rho).unwrap_or(f64::NAN))?;
            if jitter == 0.0 {
                zero_jitter.push(mean);
            }
            out.rows.push(SweepRow {
                parameter: gamma,
                protocol: spec.name.to_string(),
                scenario: None,
                jitter_pct: Some(jitter),
                mean,
                stderr,
                reps,
                seed: Some(cfg.seed),
            });
        }
    }
    if !zero_jitter.is_empty() {
        out.threshold = crossing(&grid.gammas, &zero_jitter, LOCAL_BOUND);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersive::cluster_evolution;
    use crate::hilbert::{spin_state, spins, SpaceLayout};
    use crate::numkit::{is_hermitian, kron_vectors, projector, CVector};
    use crate::protocols::{build_protocol, target_state, ProtocolName, ProtocolOptions, TargetState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn operator_is_hermitian_and_traceless() {
        let b = sasa_operator().matrix;
        assert!(is_hermitian(&b, 0.0));
        assert_eq!(trace(&b).norm(), 0.0);
    }

    #[test]
    fn maximal_on_phi4_and_zero_on_all_up() {
        let b = sasa_operator().matrix;
        let phi = target_state(TargetState::Phi4, 1).unwrap();
        assert_abs_diff_eq!(phi.dotc(&(&b * &phi)).re, QUANTUM_MAX, epsilon = 1e-12);
        let up = spin_state(&spins("uuuu"), &SpaceLayout::qubits(4).unwrap()).unwrap();
        assert_eq!(up.dotc(&(&b * &up)).norm(), 0.0);
    }

    #[test]
    fn generated_cluster_violates_maximally() {
        let psi = cluster_evolution(1.0, PI / (4.0 * SQRT_2)).unwrap();
        assert_abs_diff_eq!(sasa_expectation(&projector(&psi)).unwrap(), 4.0, epsilon = 1e-10);
        let mixed = CMatrix::identity(16, 16) / c(16.0, 0.0);
        assert_abs_diff_eq!(sasa_expectation(&mixed).unwrap(), 0.0, epsilon = 1e-15);
        assert!(sasa_expectation(&CMatrix::identity(8, 8)).is_err());
    }

    #[test]
    fn sweep_endpoints() {
        let spec = build_protocol(ProtocolName::Cluster4, &ProtocolOptions::default()).unwrap();
        let grid = SasaGrid {
            gammas: vec![0.0, 0.5, 1.0],
            jitter_pcts: vec![0.0],
        };
        let r = sasa_sweep(&spec, &grid, &JitterConfig::default()).unwrap();
        assert_abs_diff_eq!(r.rows[0].mean, 4.0, epsilon = 1e-6);
        assert!(r.rows[1].mean < r.rows[0].mean && r.rows[2].mean < r.rows[1].mean);
        let t = r.threshold.expect("crosses the local bound on [0, 1]");
        assert!(t > 0.5 && t < 1.0);
        let ghz = build_protocol(ProtocolName::Ghz3, &ProtocolOptions::default()).unwrap();
        assert!(sasa_sweep(&ghz, &grid, &JitterConfig::default()).is_err());
    }

    fn bloch_state(theta: f64, phi: f64) -> CVector {
        CVector::from_vec(vec![c((theta / 2.0).cos(), 0.0), c(0.0, phi).exp() * (theta / 2.0).sin()])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn product_states_obey_local_bound(angles in proptest::array::uniform8(0.0f64..(2.0 * PI))) {
            let qubits: Vec<CVector> = (0..4).map(|k| bloch_state(angles[2 * k] / 2.0, angles[2 * k + 1])).collect();
            let rho = projector(&kron_vectors(&qubits));
            let b = sasa_expectation(&rho).unwrap();
            prop_assert!(b <= LOCAL_BOUND + 1e-9, "<B> = {}", b);
            prop_assert!((b - sasa_expectation_heisenberg(&rho).unwrap()).abs() < 1e-12);
        }
    }
}
