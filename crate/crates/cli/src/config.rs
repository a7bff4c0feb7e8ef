use std::path::{Path, PathBuf};

use dbp_core::ccnn::{CcnnConfig, Topology};
use dbp_core::evaluation::{DEFAULT_REPEATS, DEFAULT_TRAIN_FRACTION};
use dbp_core::pipeline::ExtractionConfig;
use dbp_core::svm::SvmConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub manifest: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub charge_table: Option<PathBuf>,
    pub radius_table: Option<PathBuf>,
    pub reference_sasa: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSettings {
    pub repeats: usize,
    pub train_fraction: f64,
    pub normalize: bool,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        Self {
            repeats: DEFAULT_REPEATS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub gamma: String,
    pub degree: String,
    pub hidden: String,
    pub topologies: Vec<Topology>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            gamma: "1..100".into(),
            degree: "1..10".into(),
            hidden: "1..50".into(),
            topologies: vec![Topology::Flat],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSettings {
    /// Width of the overall-charge histogram bins, e.
    pub charge_bin_width: f64,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self { charge_bin_width: 2.0 }
    }
}

/// Everything that shapes a run. Loaded from TOML, then overridden by
/// command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub verbosity: u8,
    pub offline: bool,
    pub paths: Paths,
    pub extraction: ExtractionConfig,
    pub svm: SvmConfig,
    pub ccnn: CcnnConfig,
    pub evaluation: EvaluationSettings,
    pub sweep: SweepSettings,
    pub report: ReportSettings,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok(config)
    }

    /// Referenced input files must exist and numeric settings must be in range.
    pub fn validate(&self) -> Result<(), CliError> {
        for path in [&self.paths.charge_table, &self.paths.radius_table, &self.paths.reference_sasa]
            .into_iter()
            .flatten()
        {
            if !path.is_file() {
                return Err(CliError::input(format!("{} does not exist", path.display())));
            }
        }
        self.extraction.solver.validate().map_err(|e| CliError::input(e.to_string()))?;
        self.svm.validate().map_err(|e| CliError::input(e.to_string()))?;
        self.ccnn.validate().map_err(|e| CliError::input(e.to_string()))?;
        if self.evaluation.repeats == 0 {
            return Err(CliError::input("evaluation.repeats must be >= 1"));
        }
        if !(self.evaluation.train_fraction > 0.0 && self.evaluation.train_fraction < 1.0) {
            return Err(CliError::input("evaluation.train_fraction must lie in (0, 1)"));
        }
        if !(self.report.charge_bin_width > 0.0) {
            return Err(CliError::input("report.charge_bin_width must be positive"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the effective configuration, hex.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `a..b` (inclusive), `a,b,c` or a single value.
pub fn parse_int_range(spec: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::input(format!("bad range {spec:?}"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// Like [`parse_int_range`], but list entries may be fractional.
pub fn parse_real_range(spec: &str) -> Result<Vec<f64>, CliError> {
    if spec.contains("..") {
        return Ok(parse_int_range(spec)?.into_iter().map(|v| v as f64).collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::input(format!("bad range {spec:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_int_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_int_range("5").unwrap(), vec![5]);
        assert_eq!(parse_int_range("2,4").unwrap(), vec![2, 4]);
        assert!(parse_int_range("3..1").is_err());
        assert!(parse_int_range("x").is_err());
        assert_eq!(parse_real_range("0.5,2").unwrap(), vec![0.5, 2.0]);
        assert_eq!(parse_real_range("1..100").unwrap().len(), 100);
    }

    #[test]
    fn default_round_trips_and_fingerprint_is_stable() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.fingerprint(), back.fingerprint());
        let mut d = c.clone();
        d.seed = 1;
        assert_ne!(c.fingerprint(), d.fingerprint());
        assert_eq!(c.fingerprint().len(), 64);
    }

    #[test]
    fn defaults_match_recorded_hyperparameters() {
        let c = RunConfig::default();
        assert_eq!(c.svm.kernel, dbp_core::svm::KernelSpec::Anova { gamma: 2.0, degree: 5 });
        assert_eq!(c.ccnn.max_hidden_units, 5);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 3").is_err());
        let c: RunConfig = toml::from_str("seed = 3\n[svm]\nc = 10.0\n").unwrap();
        assert_eq!((c.seed, c.svm.c), (3, 10.0));
    }
}
