//! Resolved run configuration: JSON file values overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use bimodal_core::analytic::PKind;
use bimodal_core::imperfections::TransitModel;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every knob a command may read. Rates and times are in units of `Ω`
/// for resonant schemes and `λ` for dispersive ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega: f64,
    pub delta_over_omega: Option<f64>,
    pub n: Option<usize>,
    pub nmax: usize,
    pub p1: Option<f64>,
    pub p_kind: PKind,
    pub seed: u64,
    pub reps: usize,
    pub draws: usize,
    /// Jitter levels in percent of `1/λ`.
    pub sigma_pct: Option<Vec<f64>>,
    pub scenario: Option<String>,
    pub protocols: Option<Vec<String>>,
    pub chi_max: f64,
    pub gamma_over_lambda_max: f64,
    pub grid_step: Option<f64>,
    pub transit: TransitModel,
    pub sign: Option<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            delta_over_omega: None,
            n: None,
            nmax: 1,
            p1: None,
            p_kind: PKind::Real,
            seed: 1,
            reps: 3000,
            draws: 100,
            sigma_pct: None,
            scenario: None,
            protocols: None,
            chi_max: 0.2,
            gamma_over_lambda_max: 1.0,
            grid_step: None,
            transit: TransitModel::FixedTransit,
            sign: None,
            format: Format::Csv,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config is always serializable")
    }
}

/// Flags shared by every subcommand; each set flag overrides the file value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true)]
    pub delta_over_omega: Option<f64>,
    /// Number of qubits, or mode index for `positions`.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Target up-population of qubit 1 in the dispersive W scheme.
    #[arg(long, global = true)]
    pub p1: Option<f64>,
    #[arg(long, global = true, value_parser = parse_p_kind)]
    pub p_kind: Option<PKind>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    #[arg(long, global = true)]
    pub draws: Option<usize>,
    /// Comma-separated jitter levels in percent of 1/lambda.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sigma_pct: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Comma-separated protocol names for sweeps.
    #[arg(long, global = true, value_delimiter = ',')]
    pub protocols: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub chi_max: Option<f64>,
    #[arg(long, global = true)]
    pub gamma_over_lambda_max: Option<f64>,
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    #[arg(long, global = true, value_parser = parse_transit)]
    pub transit: Option<TransitModel>,
    /// `equal`, `opposite` or `both` for `positions`.
    #[arg(long, global = true)]
    pub sign: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_p_kind(s: &str) -> Result<PKind, String> {
    match s {
        "real" => Ok(PKind::Real),
        "imaginary" => Ok(PKind::Imaginary),
        other => Err(format!("expected real or imaginary, got {other}")),
    }
}

fn parse_transit(s: &str) -> Result<TransitModel, String> {
    match s {
        "fixed-transit" => Ok(TransitModel::FixedTransit),
        "common-stop" => Ok(TransitModel::CommonStop),
        other => Err(format!("expected fixed-transit or common-stop, got {other}")),
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    cfg.$field = self.$field.clone();
                }
            )*};
        }
        set!(omega, nmax, p_kind, seed, reps, draws, chi_max, gamma_over_lambda_max, transit, format);
        set_opt!(delta_over_omega, n, p1, sigma_pct, scenario, protocols, grid_step, sign, out);
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_uses_kebab_case() {
        let cfg = RunConfig {
            delta_over_omega: Some(1.5),
            sigma_pct: Some(vec![0.0, 5.0]),
            ..Default::default()
        };
        let text = cfg.to_json();
        assert!(text.contains("\"delta-over-omega\":1.5"));
        assert!(text.contains("\"p-kind\":\"real\""));
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn flags_override_file_values() {
        let dir = std::env::temp_dir().join(format!("bimodal-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.json");
        fs::write(&path, r#"{"seed": 5, "reps": 10, "nmax": 2}"#).unwrap();
        let args = ConfigArgs {
            config: Some(path),
            reps: Some(20),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!((cfg.seed, cfg.reps, cfg.nmax), (5, 20, 2));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 5}"#).is_err());
    }
}
