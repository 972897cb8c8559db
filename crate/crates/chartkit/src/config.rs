//! Experiment configuration, read from TOML.
//!
//! ```toml
//! algorithms = ["MM", "RS", "JM", "ISQ", "LR", "PCA", "SM"]
//! subcarriers = [2, 8, 20, 32]
//! k = []            # empty: round(0.05 · n_ue)
//! seed = 1          # run r uses seed + r
//! runs = 4          # defaults to system.n_ave
//! workers = 0       # 0: all cores
//!
//! [scenario]
//! n_ue = 512
//! width = 1000.0
//! depth = 500.0
//! bs_height = 8.5
//! site = "long-edge"
//!
//! [system]
//! n_rx = 32
//! carrier_freq = 2.0e9
//! subcarrier_spacing = 312500.0
//! snr_db = 0.0
//! path_loss_exponent = 2.0
//! n_ave = 4
//!
//! [[channels]]
//! family = "vanilla-los"
//!
//! [[channels]]
//! family = "multipath-los"
//! n_paths = 24
//! k_factor_db = 6.0
//!
//! [estimator]
//! threshold_ratio = 0.5
//! n_sa = 4
//! m_sa = 4
//!
//! [sammon]
//! max_iters = 500
//! step = 1.0
//!
//! [output]
//! dir = "out"
//! charts = true
//! svg = true
//! ```

use std::path::{Path, PathBuf};

use chartcore::baselines::SammonSettings;
use chartcore::channel::{ChannelFamily, MultipathParams};
use chartcore::estimators::{ChartSettings, ModelAlgorithm, DEFAULT_THRESHOLD_RATIO};
use chartcore::metrics::{default_k, validate_k};
use chartcore::scenario::{ScenarioParams, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};
use crate::formats::parse_site;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Model(ModelAlgorithm),
    Pca,
    Sammon,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Model(m) => m.name(),
            Self::Pca => "PCA",
            Self::Sammon => "SM",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PCA" => Some(Self::Pca),
            "SM" | "SAMMON" => Some(Self::Sammon),
            other => ModelAlgorithm::from_name(other).map(Self::Model),
        }
    }

    /// Charted per subcarrier count rather than once from a single subcarrier.
    pub fn uses_subcarrier_sweep(self) -> bool {
        matches!(self, Self::Model(m) if m.needs_subcarriers())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    VanillaLos,
    MultipathLos,
    MultipathNlos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub family: FamilyName,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    #[serde(default = "default_k_factor")]
    pub k_factor_db: f64,
    /// Name used in reports; defaults to LOS, QLOS or QNLOS.
    #[serde(default)]
    pub label: Option<String>,
}

fn default_paths() -> usize {
    24
}

fn default_k_factor() -> f64 {
    6.0
}

impl ChannelSpec {
    pub fn new(family: FamilyName) -> Self {
        Self { family, n_paths: default_paths(), k_factor_db: default_k_factor(), label: None }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            match self.family {
                FamilyName::VanillaLos => "LOS",
                FamilyName::MultipathLos => "QLOS",
                FamilyName::MultipathNlos => "QNLOS",
            }
            .to_owned()
        })
    }

    pub fn family(&self) -> ChannelFamily {
        match self.family {
            FamilyName::VanillaLos => ChannelFamily::VanillaLos,
            FamilyName::MultipathLos => ChannelFamily::Multipath(MultipathParams {
                los: true,
                n_paths: self.n_paths,
                k_factor_db: self.k_factor_db,
            }),
            FamilyName::MultipathNlos => ChannelFamily::Multipath(MultipathParams {
                los: false,
                n_paths: self.n_paths,
                k_factor_db: self.k_factor_db,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub n_ue: usize,
    pub width: f64,
    pub depth: f64,
    pub bs_height: f64,
    pub site: String,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let p = ScenarioParams::default();
        Self { n_ue: p.n_ue, width: p.bounds.0, depth: p.bounds.1, bs_height: p.bs_height, site: "long-edge".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub n_rx: usize,
    pub carrier_freq: f64,
    /// Element spacing in metres; half a wavelength when absent.
    pub antenna_spacing: Option<f64>,
    pub subcarrier_spacing: f64,
    pub snr_db: f64,
    pub path_loss_exponent: f64,
    pub n_ave: usize,
}

impl Default for SystemSection {
    fn default() -> Self {
        let s = SystemConfig::default();
        Self {
            n_rx: s.n_rx,
            carrier_freq: s.carrier_freq,
            antenna_spacing: None,
            subcarrier_spacing: s.subcarrier_spacing,
            snr_db: s.snr_db,
            path_loss_exponent: s.path_loss_exponent,
            n_ave: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorSection {
    pub threshold_ratio: f64,
    pub n_sa: usize,
    pub m_sa: usize,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self { threshold_ratio: DEFAULT_THRESHOLD_RATIO, n_sa: 4, m_sa: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SammonSection {
    pub max_iters: usize,
    pub step: f64,
}

impl Default for SammonSection {
    fn default() -> Self {
        let s = SammonSettings::default();
        Self { max_iters: s.max_iters, step: s.step }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// Chart CSVs for the first run.
    pub charts: bool,
    /// SVG renders for the first run.
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: None, charts: true, svg: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub algorithms: Vec<String>,
    pub subcarriers: Vec<usize>,
    pub k: Vec<usize>,
    pub seed: u64,
    pub runs: Option<usize>,
    pub workers: usize,
    pub scenario: ScenarioSection,
    pub system: SystemSection,
    pub channels: Vec<ChannelSpec>,
    pub estimator: EstimatorSection,
    pub sammon: SammonSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl ExperimentConfig {
    /// 512 UEs, four runs, subcarriers {2, 8, 20, 32}.
    pub fn desk() -> Self {
        Self {
            algorithms: ["MM", "RS", "JM", "ISQ", "LR", "PCA", "SM"].map(String::from).to_vec(),
            subcarriers: vec![2, 8, 20, 32],
            k: Vec::new(),
            seed: 1,
            runs: None,
            workers: 0,
            scenario: ScenarioSection::default(),
            system: SystemSection::default(),
            channels: vec![ChannelSpec::new(FamilyName::VanillaLos)],
            estimator: EstimatorSection::default(),
            sammon: SammonSection::default(),
            output: OutputSection::default(),
        }
    }

    /// 2048 UEs, ten runs, K = 102, subcarriers {2, 8, 14, 20, 26, 32}.
    pub fn full() -> Self {
        let mut c = Self::desk();
        c.scenario.n_ue = 2048;
        c.system.n_ave = 10;
        c.subcarriers = vec![2, 8, 14, 20, 26, 32];
        c.k = vec![102];
        c
    }

    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "full" => Ok(Self::full()),
            other => Err(ToolError::Config(format!("unknown profile `{other}` (expected desk or full)"))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn runs(&self) -> usize {
        self.runs.unwrap_or(self.system.n_ave)
    }

    pub fn run_seeds(&self) -> Vec<u64> {
        (0..self.runs() as u64).map(|r| self.seed.wrapping_add(r)).collect()
    }

    pub fn ks(&self) -> Vec<usize> {
        if self.k.is_empty() {
            vec![default_k(self.scenario.n_ue)]
        } else {
            self.k.clone()
        }
    }

    pub fn parsed_algorithms(&self) -> Result<Vec<Algorithm>> {
        let mut out = Vec::new();
        for a in &self.algorithms {
            let alg = Algorithm::parse(a).ok_or_else(|| ToolError::Config(format!("unknown algorithm `{a}`")))?;
            if !out.contains(&alg) {
                out.push(alg);
            }
        }
        Ok(out)
    }

    pub fn scenario_params(&self) -> Result<ScenarioParams> {
        let s = &self.scenario;
        let site = parse_site(&s.site)
            .ok_or_else(|| ToolError::Config(format!("unknown site `{}` (long-edge or short-edge)", s.site)))?;
        Ok(ScenarioParams { n_ue: s.n_ue, bounds: (s.width, s.depth), bs_height: s.bs_height, site })
    }

    pub fn system_config(&self, n_sc: usize) -> SystemConfig {
        let s = &self.system;
        SystemConfig {
            n_rx: s.n_rx,
            n_sc,
            carrier_freq: s.carrier_freq,
            antenna_spacing: s.antenna_spacing.unwrap_or(chartcore::SPEED_OF_LIGHT / (2.0 * s.carrier_freq)),
            subcarrier_spacing: s.subcarrier_spacing,
            snr_db: s.snr_db,
            path_loss_exponent: s.path_loss_exponent,
            n_ave: s.n_ave,
        }
    }

    pub fn chart_settings(&self) -> ChartSettings {
        ChartSettings {
            threshold_ratio: self.estimator.threshold_ratio,
            delta_f: self.system.subcarrier_spacing,
            n_sa: self.estimator.n_sa,
            m_sa: self.estimator.m_sa,
        }
    }

    pub fn sammon_settings(&self) -> SammonSettings {
        SammonSettings { max_iters: self.sammon.max_iters, step: self.sammon.step, ..SammonSettings::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let algs = self.parsed_algorithms()?;
        if algs.is_empty() {
            return Err(ToolError::Config("no algorithms requested".into()));
        }
        self.scenario_params()?;
        self.system_config(1).validate()?;
        if algs.iter().any(|a| a.uses_subcarrier_sweep()) && self.subcarriers.is_empty() {
            return Err(ToolError::Config("subcarrier sweep is empty".into()));
        }
        if self.subcarriers.contains(&0) {
            return Err(ToolError::Config("subcarrier counts must be positive".into()));
        }
        if self.channels.is_empty() {
            return Err(ToolError::Config("no channel families listed".into()));
        }
        for c in &self.channels {
            if let ChannelFamily::Multipath(mp) = c.family() {
                mp.validate()?;
            }
        }
        if self.runs() == 0 {
            return Err(ToolError::Config("runs must be at least 1".into()));
        }
        for k in self.ks() {
            validate_k(self.scenario.n_ue, k)?;
        }
        let t = self.estimator.threshold_ratio;
        if !(t > 0.0 && t <= 1.0) {
            return Err(ToolError::Config("estimator.threshold_ratio must lie in (0, 1]".into()));
        }
        if self.estimator.n_sa == 0 || self.estimator.m_sa == 0 {
            return Err(ToolError::Config("subarray dimensions must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ExperimentConfig::desk();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
        assert_eq!(c.ks(), vec![26]);
        assert_eq!(c.runs(), 4);
        assert_eq!(ExperimentConfig::full().ks(), vec![102]);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c = ExperimentConfig::from_toml("algorithms = [\"MM\"]\n[scenario]\nn_ue = 128\n").unwrap();
        assert_eq!(c.scenario.n_ue, 128);
        assert_eq!(c.system.n_rx, 32);
        assert_eq!(c.ks(), vec![6]);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ExperimentConfig::from_toml("algorithms = [\"XYZ\"]").is_err());
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("k = [400]").is_err());
        assert!(ExperimentConfig::from_toml("[scenario]\nsite = \"corner\"").is_err());
    }
}
