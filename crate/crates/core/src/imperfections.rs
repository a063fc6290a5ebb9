//! Arrival-time jitter of the qubits in the dispersive schemes, optionally
//! combined with spontaneous decay.
//!
//! Sample `i` of a run draws its offsets from a ChaCha8 stream seeded with
//! `seed` and positioned at stream `i`, so every sample is reproducible on
//! its own and results do not depend on thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{effective_hamiltonian_subset, EffectiveParams};
use crate::hilbert::{fidelity, SpaceLayout};
use crate::numkit::{projector, propagate_density, CMatrix, CVector, C64};
use crate::opensys::{lindblad_generator, DecayRates, Lindbladian};
use crate::protocols::{ideal_state, ProtocolSpec};
use crate::sweep::{mean_and_stderr, validate_grid, SweepResult, SweepRow};

/// How a late or early qubit's interaction window is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitModel {
    /// Every qubit interacts for the full ideal duration from its own entry.
    #[default]
    FixedTransit,
    /// All interactions end at the nominal stop time.
    CommonStop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct JitterConfig {
    /// Standard deviation of the entry offsets in units of `1/λ`.
    pub sigma_fraction: f64,
    pub reps: usize,
    pub seed: u64,
    pub transit: TransitModel,
}

impl Default for JitterConfig {
    fn default() -> Self {
        Self {
            sigma_fraction: 0.0,
            reps: 3000,
            seed: 1,
            transit: TransitModel::FixedTransit,
        }
    }
}

impl JitterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_fraction >= 0.0 && self.sigma_fraction.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "jitter fraction must be finite and >= 0, got {}",
                self.sigma_fraction
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_sigma(&self, sigma_fraction: f64) -> Self {
        Self { sigma_fraction, ..*self }
    }
}

/// Entry offsets and the designed interaction duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySchedule {
    pub deltas: Vec<f64>,
    pub transit: f64,
}

/// A stretch of time during which the set of interacting qubits is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    /// Bit `k` set when qubit `k` is inside the cavity.
    pub mask: usize,
}

impl EntrySchedule {
    pub fn ideal(n: usize, transit: f64) -> Self {
        Self {
            deltas: vec![0.0; n],
            transit,
        }
    }

    /// Presence windows `[enter, exit]` per qubit; empty windows have `exit <= enter`.
    pub fn windows(&self, model: TransitModel) -> Vec<(f64, f64)> {
        self.deltas
            .iter()
            .map(|&d| match model {
                TransitModel::FixedTransit => (d, d + self.transit),
                TransitModel::CommonStop => (d, self.transit),
            })
            .collect()
    }

    /// Consecutive intervals covering the simulated window, from the first
    /// entry to the last exit.
    pub fn intervals(&self, model: TransitModel) -> Vec<Interval> {
        let windows = self.windows(model);
        let start = windows.iter().map(|w| w.0.min(w.1)).fold(f64::INFINITY, f64::min);
        let end = windows.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
        let mut points: Vec<f64> = windows
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|t| (start..=end).contains(t))
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
            .windows(2)
            .map(|p| Interval {
                start: p[0],
                end: p[1],
                mask: windows
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.0 <= p[0] && p[1] <= w.1)
                    .fold(0, |m, (k, _)| m | (1 << k)),
            })
            .filter(|iv| iv.end > iv.start)
            .collect()
    }
}

/// Offsets for sample `sample_index`: `N` independent normal deviates with
/// standard deviation `sigma_fraction/λ`.
pub fn sample_entry_times(cfg: &JitterConfig, n: usize, transit: f64, lambda: f64, sample_index: u64) -> EntrySchedule {
    if cfg.sigma_fraction == 0.0 {
        return EntrySchedule::ideal(n, transit);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(sample_index);
    let scale = cfg.sigma_fraction / lambda;
    let deltas = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        })
        .collect();
    EntrySchedule { deltas, transit }
}

/// `H = V diag(E) V†`, so that `exp(−iHt) = V diag(e^{−iEt}) V†`.
#[derive(Debug, Clone)]
struct Spectral {
    vectors: CMatrix,
    values: Vec<f64>,
}

impl Spectral {
    fn new(h: &CMatrix) -> Self {
        let eig = h.clone().symmetric_eigen();
        Self {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues.iter().copied().collect(),
        }
    }

    fn evolve(&self, psi: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.adjoint() * psi;
        for (z, &e) in coeffs.iter_mut().zip(&self.values) {
            *z *= C64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }
}

#[derive(Debug, Clone)]
enum Generators {
    Closed(Vec<Spectral>),
    Open(Vec<Lindbladian>),
}

/// Piecewise dynamics of one dispersive protocol with every presence subset
/// precomputed.
#[derive(Debug, Clone)]
pub struct JitterModel {
    params: EffectiveParams,
    initial: CVector,
    ideal: CVector,
    transit: f64,
    generators: Generators,
}

impl JitterModel {
    /// `gamma` is in the protocol's rate unit and acts on every qubit for
    /// the whole simulated window.
    pub fn new(spec: &ProtocolSpec, gamma: f64) -> Result<Self> {
        let params = spec
            .effective()
            .ok_or_else(|| Error::InvalidParameter(format!("{} is not a dispersive protocol", spec.name)))?
            .clone();
        let n = params.n();
        if n > 10 {
            return Err(Error::InvalidParameter(format!("jitter model supports at most 10 qubits, got {n}")));
        }
        let rates = DecayRates::qubit_only(gamma)?;
        let layout = SpaceLayout::qubits(n)?;
        let hamiltonians = (0..1usize << n)
            .map(|mask| {
                let present: Vec<bool> = (0..n).map(|k| mask & (1 << k) != 0).collect();
                effective_hamiltonian_subset(&params, &present)
            })
            .collect::<Result<Vec<_>>>()?;
        let generators = if gamma == 0.0 {
            Generators::Closed(hamiltonians.iter().map(Spectral::new).collect())
        } else {
            Generators::Open(
                hamiltonians
                    .iter()
                    .map(|h| lindblad_generator(h, &rates, &layout))
                    .collect::<Result<_>>()?,
            )
        };
        Ok(Self {
            params,
            initial: spec.initial.clone(),
            ideal: ideal_state(spec)?,
            transit: spec.ideal_time,
            generators,
        })
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn transit(&self) -> f64 {
        self.transit
    }

    /// Noiseless output the fidelity is scored against.
    pub fn ideal(&self) -> &CVector {
        &self.ideal
    }

    pub fn evolve(&self, schedule: &EntrySchedule, model: TransitModel) -> Result<CMatrix> {
        if schedule.deltas.len() != self.n() {
            return Err(Error::DimensionMismatch {
                context: "entry schedule",
                expected: self.n(),
                found: schedule.deltas.len(),
            });
        }
        let intervals = schedule.intervals(model);
        match &self.generators {
            Generators::Closed(spectra) => {
                let psi = intervals
                    .iter()
                    .fold(self.initial.clone(), |psi, iv| spectra[iv.mask].evolve(&psi, iv.end - iv.start));
                Ok(projector(&psi))
            }
            Generators::Open(generators) => {
                let mut rho = projector(&self.initial);
                for iv in &intervals {
                    rho = propagate_density(&generators[iv.mask], &rho, iv.end - iv.start)?;
                }
                Ok(rho)
            }
        }
    }

    pub fn sample(&self, cfg: &JitterConfig, sample_index: u64) -> EntrySchedule {
        sample_entry_times(cfg, self.n(), self.transit, self.lambda(), sample_index)
    }

    /// Mean and standard error of `score` over `cfg.reps` samples. Without
    /// jitter the single deterministic value is returned with zero error.
    pub fn monte_carlo<F>(&self, cfg: &JitterConfig, score: F) -> Result<(f64, f64, usize)>
    where
        F: Fn(&CMatrix) -> f64 + Sync,
    {
        cfg.validate()?;
        if cfg.sigma_fraction == 0.0 {
            let rho = self.evolve(&EntrySchedule::ideal(self.n(), self.transit), cfg.transit)?;
            return Ok((score(&rho), 0.0, 1));
        }
        let samples = (0..cfg.reps as u64)
            .into_par_iter()
            .map(|i| self.evolve(&self.sample(cfg, i), cfg.transit).map(|rho| score(&rho)))
            .collect::<Result<Vec<f64>>>()?;
        let (mean, stderr) = mean_and_stderr(&samples);
        Ok((mean, stderr, cfg.reps))
    }

    pub fn fidelity(&self, rho: &CMatrix) -> f64 {
        fidelity(&self.ideal, rho).unwrap_or(f64::NAN)
    }
}

/// Single jittered trajectory of a dispersive protocol.
pub fn evolve_with_jitter(
    spec: &ProtocolSpec,
    schedule: &EntrySchedule,
    gamma: f64,
    model: TransitModel,
) -> Result<CMatrix> {
    JitterModel::new(spec, gamma)?.evolve(schedule, model)
}

/// Mean fidelity per jitter level; `sigma_grid` holds fractions of `1/λ`
/// and rows report them in percent.
pub fn jitter_sweep(spec: &ProtocolSpec, sigma_grid: &[f64], cfg: &JitterConfig, gamma: f64) -> Result<SweepResult> {
    validate_grid(sigma_grid, "jitter")?;
    let model = JitterModel::new(spec, gamma)?;
    let mut out = SweepResult::new("sigma_pct");
    for &sigma in sigma_grid {
        let (mean, stderr, reps) = model.monte_carlo(&cfg.with_sigma(sigma), |rho| model.fidelity(rho))?;
        out.rows.push(SweepRow {
            parameter: sigma * 100.0,
            protocol: spec.name.to_string(),
            scenario: None,
            jitter_pct: None,
            mean,
            stderr,
            reps,
            seed: Some(cfg.seed),
        });
    }
    Ok(out)
}

/// Offsets multiplied by `factor`.
#[cfg(test)]
fn scaled(schedule: &EntrySchedule, factor: f64) -> EntrySchedule {
    EntrySchedule {
        deltas: schedule.deltas.iter().map(|d| d * factor).collect(),
        transit: schedule.transit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{max_abs_diff, min_eigenvalue_hermitian, trace};
    use crate::protocols::{build_protocol, ProtocolName, ProtocolOptions};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(name: ProtocolName) -> ProtocolSpec {
        build_protocol(name, &ProtocolOptions::default()).unwrap()
    }

    fn cfg(sigma: f64, reps: usize) -> JitterConfig {
        JitterConfig {
            sigma_fraction: sigma,
            reps,
            seed: 7,
            transit: TransitModel::FixedTransit,
        }
    }

    #[test]
    fn zero_jitter_schedule_is_ideal() {
        let s = sample_entry_times(&cfg(0.0, 10), 4, 0.3, 1.0, 5);
        assert_eq!(s.deltas, vec![0.0; 4]);
        let iv = s.intervals(TransitModel::FixedTransit);
        assert_eq!(iv, vec![Interval { start: 0.0, end: 0.3, mask: 0b1111 }]);
    }

    #[test]
    fn sampling_is_deterministic_per_index() {
        let c = cfg(0.05, 10);
        let a = sample_entry_times(&c, 3, 0.3, 2.0, 11);
        let b = sample_entry_times(&c, 3, 0.3, 2.0, 11);
        let other = sample_entry_times(&c, 3, 0.3, 2.0, 12);
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn sample_mean_is_consistent_with_zero() {
        let c = cfg(0.1, 3000);
        let draws: Vec<f64> = (0..3000).flat_map(|i| sample_entry_times(&c, 1, 0.0, 1.0, i).deltas).collect();
        let (mean, se) = mean_and_stderr(&draws);
        assert!(mean.abs() < 4.0 * se, "mean {mean}, se {se}");
        let var = draws.iter().map(|d| d * d).sum::<f64>() / draws.len() as f64;
        assert!((var.sqrt() - 0.1).abs() < 0.01);
    }

    #[test]
    fn intervals_follow_entries_and_exits() {
        let s = EntrySchedule {
            deltas: vec![-0.1, 0.0, 0.2],
            transit: 1.0,
        };
        let fixed = s.intervals(TransitModel::FixedTransit);
        let bounds: Vec<(f64, f64, usize)> = fixed.iter().map(|i| (i.start, i.end, i.mask)).collect();
        assert_eq!(
            bounds,
            vec![
                (-0.1, 0.0, 0b001),
                (0.0, 0.2, 0b011),
                (0.2, 0.9, 0b111),
                (0.9, 1.0, 0b110),
                (1.0, 1.2, 0b100),
            ]
        );
        let common = s.intervals(TransitModel::CommonStop);
        assert_eq!(common.last().unwrap().end, 1.0);
        assert_eq!(common.last().unwrap().mask, 0b111);
    }

    #[test]
    fn lone_qubit_interval_is_identity() {
        let sp = spec(ProtocolName::Ghz3);
        let model = JitterModel::new(&sp, 0.0).unwrap();
        // Qubit 1 alone for a long stretch, then everyone on time.
        let early = EntrySchedule {
            deltas: vec![-5.0, 0.0, 0.0],
            transit: sp.ideal_time,
        };
        let windows = early.intervals(TransitModel::CommonStop);
        assert_eq!(windows[0].mask, 0b001);
        let rho = model.evolve(&early, TransitModel::CommonStop).unwrap();
        let reference = model.evolve(&EntrySchedule::ideal(3, sp.ideal_time), TransitModel::CommonStop).unwrap();
        assert!(max_abs_diff(&rho, &reference) < 1e-12);
    }

    #[test]
    fn no_jitter_reproduces_ideal_dynamics() {
        for name in [ProtocolName::WDispersive, ProtocolName::Ghz3, ProtocolName::Cluster4] {
            let sp = spec(name);
            let ideal = projector(&ideal_state(&sp).unwrap());
            for gamma in [0.0, 1e-300] {
                let rho = evolve_with_jitter(
                    &sp,
                    &EntrySchedule::ideal(sp.n_qubits(), sp.ideal_time),
                    gamma,
                    TransitModel::FixedTransit,
                )
                .unwrap();
                assert!(max_abs_diff(&rho, &ideal) < 1e-10, "{name} gamma {gamma}");
            }
        }
        assert!(JitterModel::new(&spec(ProtocolName::BellModes), 0.0).is_err());
    }

    #[test]
    fn tiny_jitter_converges_to_ideal() {
        let sp = spec(ProtocolName::Ghz3);
        let model = JitterModel::new(&sp, 0.0).unwrap();
        let (mean, _, _) = model.monte_carlo(&cfg(1e-6, 200), |r| model.fidelity(r)).unwrap();
        assert!((mean - 1.0).abs() < 1e-4);
    }

    #[test]
    fn fidelity_falls_with_jitter() {
        let sp = spec(ProtocolName::Ghz3);
        let result = jitter_sweep(&sp, &[0.0, 0.025, 0.05, 0.1], &cfg(0.0, 400), 0.0).unwrap();
        let means: Vec<f64> = result.rows.iter().map(|r| r.mean).collect();
        assert_abs_diff_eq!(means[0], 1.0, epsilon = 1e-6);
        assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
        assert_eq!(result.rows[0].reps, 1);
        assert_eq!(result.rows[2].reps, 400);
    }

    #[test]
    fn sweep_is_bitwise_reproducible() {
        let sp = spec(ProtocolName::Cluster4);
        let a = jitter_sweep(&sp, &[0.05], &cfg(0.0, 64), 0.2).unwrap();
        let b = jitter_sweep(&sp, &[0.05], &cfg(0.0, 64), 0.2).unwrap();
        assert_eq!(a.rows[0].mean.to_bits(), b.rows[0].mean.to_bits());
        assert_eq!(a.rows[0].stderr.to_bits(), b.rows[0].stderr.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn trajectories_stay_physical(index in 0u64..10_000, gamma in 0.0f64..1.0, common in any::<bool>()) {
            let sp = spec(ProtocolName::Cluster4);
            let model = JitterModel::new(&sp, gamma).unwrap();
            let transit = if common { TransitModel::CommonStop } else { TransitModel::FixedTransit };
            let rho = model.evolve(&model.sample(&cfg(0.1, 1), index), transit).unwrap();
            prop_assert!((trace(&rho).re - 1.0).abs() < 1e-8);
            prop_assert!(min_eigenvalue_hermitian(&rho) >= -1e-7);
        }

        #[test]
        fn shrinking_offsets_approach_ideal(index in 0u64..1000) {
            let sp = spec(ProtocolName::WDispersive);
            let model = JitterModel::new(&sp, 0.0).unwrap();
            let s = model.sample(&cfg(0.1, 1), index);
            let small = model.evolve(&scaled(&s, 1e-5), TransitModel::FixedTransit).unwrap();
            prop_assert!(1.0 - model.fidelity(&small) < 1e-6);
        }
    }
}
