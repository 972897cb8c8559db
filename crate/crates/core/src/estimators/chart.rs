//! Composition of estimators into chart points.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::joint::{jm_estimate, DEFAULT_SUBARRAY};
use super::music::{music_rho_with, music_theta_with};
use super::range::{isq_rho, lr_rho, LrModel};
use super::rotate_sum::{rs_rho_with, rs_theta_with, RsTables};
use super::steering::SteeringTable;
use crate::channel::CsiTensor;
use crate::{Error, Result};

/// Default noise/signal eigenvalue cut, relative to the largest eigenvalue.
pub const DEFAULT_THRESHOLD_RATIO: f64 = 0.5;

/// A chart coordinate in the base-station frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub theta_deg: f64,
    pub rho_m: f64,
    pub x: f64,
    pub y: f64,
}

impl ChartPoint {
    pub fn from_polar(theta_deg: f64, rho_m: f64) -> Self {
        let t = theta_deg.to_radians();
        Self { theta_deg, rho_m, x: rho_m * t.cos(), y: rho_m * t.sin() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelAlgorithm {
    /// Angle and range by separate subspace searches.
    Mm,
    /// Angle and range by rotate-and-sum.
    Rs,
    /// Joint subspace search over a smoothed matrix.
    Jm,
    /// Subspace angle, inverse-square-root range.
    Isq,
    /// Subspace angle, regression range.
    Lr,
}

impl ModelAlgorithm {
    pub const ALL: [ModelAlgorithm; 5] = [Self::Mm, Self::Rs, Self::Jm, Self::Isq, Self::Lr];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mm => "MM",
            Self::Rs => "RS",
            Self::Jm => "JM",
            Self::Isq => "ISQ",
            Self::Lr => "LR",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name().eq_ignore_ascii_case(s))
    }

    /// Whether range comes from the subcarrier axis.
    pub fn needs_subcarriers(self) -> bool {
        matches!(self, Self::Mm | Self::Rs | Self::Jm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartSettings {
    pub threshold_ratio: f64,
    pub delta_f: f64,
    pub n_sa: usize,
    pub m_sa: usize,
}

impl Default for ChartSettings {
    fn default() -> Self {
        Self {
            threshold_ratio: DEFAULT_THRESHOLD_RATIO,
            delta_f: 312.5e3,
            n_sa: DEFAULT_SUBARRAY.0,
            m_sa: DEFAULT_SUBARRAY.1,
        }
    }
}

/// Outcome for one UE; failures stay in the list.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartOutcome {
    pub ue_index: usize,
    pub result: Result<ChartPoint>,
}

/// Estimator state shared across a batch of equally shaped tensors.
#[derive(Debug, Clone)]
pub struct Charter {
    pub algorithm: ModelAlgorithm,
    pub settings: ChartSettings,
    lr_model: Option<LrModel>,
    n_rx: usize,
    n_sc: usize,
    theta_table: Option<SteeringTable>,
    rho_table: Option<SteeringTable>,
    rs_tables: Option<RsTables>,
}

impl Charter {
    /// Tables are sized for `n_rx × n_sc` tensors; other shapes fall back to
    /// building tables per call.
    pub fn new(algorithm: ModelAlgorithm, settings: ChartSettings, n_rx: usize, n_sc: usize) -> Result<Self> {
        if !(settings.threshold_ratio > 0.0 && settings.threshold_ratio <= 1.0) {
            return Err(Error::InvalidConfig("threshold_ratio must lie in (0, 1]"));
        }
        if !(settings.delta_f > 0.0) {
            return Err(Error::InvalidConfig("subcarrier spacing must be positive"));
        }
        let mut c = Self {
            algorithm,
            settings,
            lr_model: None,
            n_rx,
            n_sc,
            theta_table: None,
            rho_table: None,
            rs_tables: None,
        };
        match algorithm {
            ModelAlgorithm::Mm | ModelAlgorithm::Isq | ModelAlgorithm::Lr => {
                if n_rx > 0 {
                    c.theta_table = Some(SteeringTable::theta(n_rx)?);
                }
                if algorithm == ModelAlgorithm::Mm && n_sc >= 2 {
                    c.rho_table = Some(SteeringTable::rho(n_sc, settings.delta_f)?);
                }
            }
            ModelAlgorithm::Rs => c.rs_tables = Some(RsTables::new(n_rx, n_sc, settings.delta_f)),
            ModelAlgorithm::Jm => {}
        }
        Ok(c)
    }

    pub fn with_lr_model(mut self, model: LrModel) -> Self {
        self.lr_model = Some(model);
        self
    }

    pub fn lr_model(&self) -> Option<&LrModel> {
        self.lr_model.as_ref()
    }

    fn theta_mm(&self, csi: &CsiTensor) -> Result<f64> {
        match &self.theta_table {
            Some(t) if csi.n_rx() == self.n_rx => music_theta_with(csi, self.settings.threshold_ratio, t),
            _ => music_theta_with(csi, self.settings.threshold_ratio, &SteeringTable::theta(csi.n_rx())?),
        }
    }

    fn rho_mm(&self, csi: &CsiTensor) -> Result<f64> {
        if csi.n_sc() < 2 {
            return Err(Error::InsufficientSubcarriers);
        }
        match &self.rho_table {
            Some(t) if csi.n_sc() == self.n_sc => music_rho_with(csi, self.settings.threshold_ratio, t),
            _ => music_rho_with(
                csi,
                self.settings.threshold_ratio,
                &SteeringTable::rho(csi.n_sc(), self.settings.delta_f)?,
            ),
        }
    }

    /// `(θ°, ρ m)` for one UE.
    pub fn estimate(&self, csi: &CsiTensor) -> Result<(f64, f64)> {
        if csi.matrix.as_slice().is_empty() {
            return Err(Error::EmptyInput);
        }
        match self.algorithm {
            ModelAlgorithm::Mm => {
                if csi.n_sc() < 2 {
                    return Err(Error::InsufficientSubcarriers);
                }
                Ok((self.theta_mm(csi)?, self.rho_mm(csi)?))
            }
            ModelAlgorithm::Isq => {
                let rho = isq_rho(csi.row(0))?;
                Ok((self.theta_mm(csi)?, rho))
            }
            ModelAlgorithm::Lr => {
                let model = self.lr_model.as_ref().ok_or(Error::MissingModel)?;
                let rho = lr_rho(model, csi.row(0))?;
                Ok((self.theta_mm(csi)?, rho))
            }
            ModelAlgorithm::Rs => {
                if csi.n_sc() < 2 {
                    return Err(Error::InsufficientSubcarriers);
                }
                let own;
                let tables = match &self.rs_tables {
                    Some(t) if t.n_rx() == csi.n_rx() && t.n_sc() == csi.n_sc() => t,
                    _ => {
                        own = RsTables::new(csi.n_rx(), csi.n_sc(), self.settings.delta_f);
                        &own
                    }
                };
                Ok((rs_theta_with(csi, tables)?, rs_rho_with(csi, tables)?))
            }
            ModelAlgorithm::Jm => jm_estimate(
                csi,
                self.settings.n_sa,
                self.settings.m_sa,
                self.settings.threshold_ratio,
                self.settings.delta_f,
            ),
        }
    }

    pub fn chart_point(&self, csi: &CsiTensor) -> ChartOutcome {
        ChartOutcome { ue_index: csi.ue_index, result: self.estimate(csi).map(|(t, r)| ChartPoint::from_polar(t, r)) }
    }

    /// Sequential batch chart in input order.
    pub fn chart(&self, batch: &[CsiTensor]) -> Vec<ChartOutcome> {
        batch.iter().map(|csi| self.chart_point(csi)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_conversion() {
        let p = ChartPoint::from_polar(90.0, 10.0);
        assert!(p.x.abs() < 1e-12 && (p.y - 10.0).abs() < 1e-12);
        let p = ChartPoint::from_polar(0.0, 3.0);
        assert_eq!((p.x, p.y), (3.0, 0.0));
    }

    #[test]
    fn names_round_trip() {
        for a in ModelAlgorithm::ALL {
            assert_eq!(ModelAlgorithm::from_name(a.name()), Some(a));
        }
        assert_eq!(ModelAlgorithm::from_name("pca"), None);
    }

    #[test]
    fn lr_without_model_is_reported() {
        let c = Charter::new(ModelAlgorithm::Lr, ChartSettings::default(), 4, 1).unwrap();
        let csi = CsiTensor::new(0, crate::numerics::ComplexMatrix::identity(4));
        assert_eq!(c.chart_point(&csi).result, Err(Error::MissingModel));
    }
}
