//! Subcommand bodies. Each returns a table and whether its checks passed.

use bimodal_core::geometry::{solve_position, RelativeSign};
use bimodal_core::imperfections::{jitter_sweep, JitterConfig};
use bimodal_core::nonlocality::{sasa_sweep, SasaGrid};
use bimodal_core::opensys::{chi_sweep, DissipationScenario};
use bimodal_core::oracle::{run_oracle, OracleConfig, OracleFamily};
use bimodal_core::protocols::{build_protocol, run_ideal, Scheme};
use bimodal_core::sweep::linear_grid;
use bimodal_core::{Error, ProtocolName, ProtocolOptions, ProtocolSpec};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Amplitudes at or below this magnitude are not listed.
pub const AMPLITUDE_CUTOFF: f64 = 1e-12;
/// `protocol` succeeds when the canonicalized state reaches this fidelity.
pub const PROTOCOL_FIDELITY_FLOOR: f64 = 1.0 - 1e-6;

pub const DEFAULT_DISSIPATION_PROTOCOLS: [&str; 3] = ["bell-modes", "w3-hybrid", "wt-hybrid"];
pub const DEFAULT_JITTER_PROTOCOLS: [&str; 3] = ["ghz3", "w3-dispersive", "wt-dispersive"];
pub const DEFAULT_JITTER_PCTS: [f64; 5] = [0.0, 2.5, 5.0, 7.5, 10.0];
pub const DEFAULT_CHI_STEP: f64 = 0.01;

const RESONANT_UNITS: &str = "omega = 1; times in 1/omega, rates in omega";
const DISPERSIVE_UNITS: &str = "lambda = 1; times in 1/lambda, rates in lambda";
const MIXED_UNITS: &str = "omega = 1 for resonant schemes, lambda = 1 for dispersive schemes";

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, passed: true }
    }
}

fn options(cfg: &RunConfig) -> ProtocolOptions {
    ProtocolOptions {
        omega: cfg.omega,
        delta_over_omega: cfg.delta_over_omega,
        n: cfg.n,
        nmax: cfg.nmax,
        p1: cfg.p1,
        p_kind: cfg.p_kind,
        ..ProtocolOptions::default()
    }
}

/// Builds a protocol by name. `w3-dispersive` and `wt-dispersive` are the
/// three-qubit dispersive W scheme stopped at `P1 = 1/3` and `P1 = 1/2`.
pub fn resolve_protocol(label: &str, cfg: &RunConfig) -> Result<ProtocolSpec, CliError> {
    let mut opts = options(cfg);
    let name = match label {
        "w3-dispersive" | "wt-dispersive" => {
            opts.n = Some(3);
            opts.p1 = Some(if label == "w3-dispersive" { 1.0 / 3.0 } else { 0.5 });
            ProtocolName::WDispersive
        }
        other => other.parse()?,
    };
    Ok(build_protocol(name, &opts)?)
}

fn units_of(spec: &ProtocolSpec) -> &'static str {
    match spec.scheme {
        Scheme::Dispersive => DISPERSIVE_UNITS,
        _ => RESONANT_UNITS,
    }
}

fn protocol_list(cfg: &RunConfig, default: &[&str]) -> Vec<String> {
    cfg.protocols
        .clone()
        .unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect())
}

pub fn protocol(label: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = resolve_protocol(label, cfg)?;
    let run = run_ideal(&spec)?;
    let layout = spec.layout()?;
    let mut table = Table::new(format!("protocol {label}"), cfg, units_of(&spec), &["label", "re", "im"]);
    table.meta("protocol", spec.name.as_str());
    table.meta("ideal_time", spec.ideal_time);
    table.meta("fidelity", run.fidelity);
    for (k, a) in run.state.iter().enumerate() {
        if a.norm() > AMPLITUDE_CUTOFF {
            table.push(vec![layout.ket_label(k).into(), a.re.into(), a.im.into()]);
        }
    }
    Ok(Outcome {
        table,
        passed: run.fidelity >= PROTOCOL_FIDELITY_FLOOR,
    })
}

pub fn sweep_dissipation(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scenarios = match &cfg.scenario {
        Some(name) => vec![name.parse::<DissipationScenario>()?],
        None => DissipationScenario::FIGURE.to_vec(),
    };
    let grid = linear_grid(0.0, cfg.chi_max, cfg.grid_step.unwrap_or(DEFAULT_CHI_STEP))?;
    let mut table = Table::new(
        "sweep dissipation",
        cfg,
        MIXED_UNITS,
        &["chi_over_unit", "scenario", "protocol", "fidelity"],
    );
    for label in protocol_list(cfg, &DEFAULT_DISSIPATION_PROTOCOLS) {
        let spec = resolve_protocol(&label, cfg)?;
        for scenario in &scenarios {
            for row in chi_sweep(&spec, scenario, &grid)?.rows {
                table.push(vec![row.parameter.into(), scenario.name.into(), label.as_str().into(), row.mean.into()]);
            }
        }
    }
    Ok(Outcome::ok(table))
}

fn jitter_config(cfg: &RunConfig) -> JitterConfig {
    JitterConfig {
        sigma_fraction: 0.0,
        reps: cfg.reps,
        seed: cfg.seed,
        transit: cfg.transit,
    }
}

pub fn sweep_jitter(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pcts = cfg.sigma_pct.clone().unwrap_or_else(|| DEFAULT_JITTER_PCTS.to_vec());
    let fractions: Vec<f64> = pcts.iter().map(|p| p / 100.0).collect();
    let mut table = Table::new(
        "sweep jitter",
        cfg,
        DISPERSIVE_UNITS,
        &["sigma_pct", "protocol", "mean_fidelity", "stderr", "reps", "seed"],
    );
    for label in protocol_list(cfg, &DEFAULT_JITTER_PROTOCOLS) {
        let spec = resolve_protocol(&label, cfg)?;
        if spec.scheme != Scheme::Dispersive {
            return Err(Error::InvalidParameter(format!("{label} is not a dispersive protocol")).into());
        }
        let result = jitter_sweep(&spec, &fractions, &jitter_config(cfg), 0.0)?;
        for (pct, row) in pcts.iter().zip(result.rows) {
            table.push(vec![
                (*pct).into(),
                label.as_str().into(),
                row.mean.into(),
                row.stderr.into(),
                row.reps.into(),
                row.seed.into(),
            ]);
        }
    }
    Ok(Outcome::ok(table))
}

pub fn sweep_sasa(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let defaults = SasaGrid::default();
    let grid = SasaGrid {
        gammas: match cfg.grid_step {
            Some(step) => linear_grid(0.0, cfg.gamma_over_lambda_max, step)?,
            None => linear_grid(0.0, cfg.gamma_over_lambda_max, 0.05)?,
        },
        jitter_pcts: cfg.sigma_pct.clone().unwrap_or(defaults.jitter_pcts),
    };
    let label = cfg
        .protocols
        .as_ref()
        .and_then(|p| p.first().cloned())
        .unwrap_or_else(|| ProtocolName::Cluster4.as_str().to_string());
    let spec = resolve_protocol(&label, cfg)?;
    let result = sasa_sweep(&spec, &grid, &jitter_config(cfg))?;
    let mut table = Table::new(
        "sweep sasa",
        cfg,
        DISPERSIVE_UNITS,
        &["gamma_over_lambda", "jitter_pct", "mean_B", "stderr", "reps", "seed", "threshold_gamma_star"],
    );
    table.meta("threshold_gamma_star", result.threshold);
    for row in &result.rows {
        table.push(vec![
            row.parameter.into(),
            row.jitter_pct.into(),
            row.mean.into(),
            row.stderr.into(),
            row.reps.into(),
            row.seed.into(),
            result.threshold.into(),
        ]);
    }
    Ok(Outcome::ok(table))
}

pub fn oracle(family: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let families = match family {
        "all" => OracleFamily::ALL.to_vec(),
        name => vec![name.parse::<OracleFamily>()?],
    };
    let ocfg = OracleConfig {
        draws: cfg.draws,
        seed: cfg.seed,
        delta_over_omega: cfg.delta_over_omega.unwrap_or(OracleConfig::default().delta_over_omega),
        nmax: cfg.nmax,
    };
    let mut table = Table::new(
        format!("oracle {family}"),
        cfg,
        MIXED_UNITS,
        &["family", "draws", "metric", "tolerance", "passed"],
    );
    let mut passed = true;
    for f in families {
        let report = run_oracle(f, &ocfg)?;
        passed &= report.passed;
        table.push(vec![
            f.as_str().into(),
            report.draws.into(),
            report.metric.into(),
            report.tolerance.into(),
            report.passed.to_string().into(),
        ]);
    }
    Ok(Outcome { table, passed })
}

pub fn positions(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = u32::try_from(cfg.n.unwrap_or(1))
        .map_err(|_| Error::InvalidParameter("mode index does not fit in 32 bits".into()))?;
    let signs = match cfg.sign.as_deref().unwrap_or("both") {
        "both" => vec![RelativeSign::Equal, RelativeSign::Opposite],
        s => vec![s.parse::<RelativeSign>()?],
    };
    let mut table = Table::new(
        "positions",
        cfg,
        "positions in cavity lengths, mirrors at -1/2 and +1/2",
        &["n", "sign", "r_tilde", "residual", "g_n", "g_n_plus_1"],
    );
    for sign in signs {
        for p in solve_position(n, sign)? {
            table.push(vec![
                Cell::Int(n.into()),
                sign.to_string().into(),
                p.r_tilde.into(),
                p.residual(sign).into(),
                p.coupling(n).into(),
                p.coupling(n + 1).into(),
            ]);
        }
    }
    Ok(Outcome::ok(table))
}
