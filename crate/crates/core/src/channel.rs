//! CSI synthesis.
//!
//! A CSI tensor is the `n_sc × n_rx` matrix of complex gains seen by one UE:
//! rows are subcarriers, columns are array elements. A single ray of length
//! ρ arriving at angle θ contributes
//!
//! ```text
//! h[s, n] = a · ρ^(−r) · exp(−j(2πρ/λ + φ)) · exp(j·2π(d/λ)·n·cos θ) · exp(−j2π·ρ·s·Δf/c)
//! ```
//!
//! so columns advance by a fixed rotation in θ and rows by a fixed rotation
//! in ρ. Three families are available: the single-ray line-of-sight channel,
//! and a single-bounce scatterer stand-in with or without the direct ray.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::ComplexMatrix;
use crate::rng::{self, Domain};
use crate::scenario::{Scenario, SystemConfig};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// CSI of one UE.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTensor {
    pub ue_index: usize,
    /// `n_sc × n_rx`, rows are subcarriers.
    pub matrix: ComplexMatrix,
}

impl CsiTensor {
    pub fn new(ue_index: usize, matrix: ComplexMatrix) -> Self {
        Self { ue_index, matrix }
    }

    pub fn zeros(ue_index: usize, n_sc: usize, n_rx: usize) -> Self {
        Self::new(ue_index, ComplexMatrix::zeros(n_sc, n_rx))
    }

    pub fn n_sc(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_rx(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row(&self, s: usize) -> &[Complex64] {
        self.matrix.row(s)
    }

    pub fn column(&self, n: usize) -> Vec<Complex64> {
        self.matrix.column(n)
    }

    /// Mean per-entry power `|h|²`.
    pub fn mean_power(&self) -> f64 {
        let data = self.matrix.as_slice();
        if data.is_empty() {
            return 0.0;
        }
        data.iter().map(|z| z.norm_sqr()).sum::<f64>() / data.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.is_finite()
    }

    /// Stack `n` copies of the first row, e.g. to hold independent noise
    /// realizations of a single-subcarrier measurement.
    pub fn repeat_first_row(&self, n: usize) -> Self {
        let row = self.row(0).to_vec();
        Self::new(self.ue_index, ComplexMatrix::from_fn(n, self.n_rx(), |_, c| row[c]))
    }
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayParams {
    /// Path length, m.
    pub rho: f64,
    /// Angle between the array axis and the arrival direction, degrees.
    pub theta_deg: f64,
    /// Extra carrier phase in `[0, 2π)`.
    pub phi: f64,
    /// Amplitude multiplier; 1 for the direct ray, unit mean power for
    /// scattered rays.
    pub amplitude_fading: f64,
}

impl RayParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::DegenerateGeometry);
        }
        if !(0.0..=180.0).contains(&self.theta_deg) {
            return Err(Error::InvalidAngle);
        }
        Ok(())
    }
}

/// Accumulate `scale ·` (ray response) into `m`.
fn add_ray(m: &mut ComplexMatrix, ray: &RayParams, scale: f64, cfg: &SystemConfig) -> Result<()> {
    ray.validate()?;
    let lambda = cfg.wavelength();
    let amp = scale * ray.amplitude_fading * ray.rho.powf(-cfg.path_loss_exponent);
    let carrier = -(2.0 * PI * ray.rho / lambda + ray.phi);
    let spatial = 2.0 * PI * cfg.antenna_spacing / lambda * ray.theta_deg.to_radians().cos();
    let spectral = -2.0 * PI * ray.rho * cfg.subcarrier_spacing / SPEED_OF_LIGHT;
    for s in 0..m.rows() {
        let row = m.row_mut(s);
        for (n, h) in row.iter_mut().enumerate() {
            let phase = carrier + spatial * n as f64 + spectral * s as f64;
            *h += Complex64::from_polar(amp, phase);
        }
    }
    Ok(())
}

/// Settings for the scatterer stand-in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipathParams {
    /// Include the direct ray.
    pub los: bool,
    /// Number of single-bounce scattered rays.
    pub n_paths: usize,
    /// Direct-to-scattered power ratio in dB (ignored without the direct ray).
    pub k_factor_db: f64,
}

impl MultipathParams {
    pub fn validate(&self) -> Result<()> {
        if !self.los && self.n_paths == 0 {
            return Err(Error::InvalidConfig("a non-line-of-sight channel needs scattered paths"));
        }
        if self.los && !self.k_factor_db.is_finite() {
            return Err(Error::InvalidConfig("k_factor_db must be finite with a direct ray"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelFamily {
    VanillaLos,
    Multipath(MultipathParams),
}

/// The direct ray of a UE, with its carrier phase drawn from the UE's stream.
pub fn direct_ray(scenario: &Scenario, ue: usize, seed: u64) -> Result<RayParams> {
    let mut rng = rng::stream(seed, Domain::RayPhase, ue as u64);
    let phi = rng.random::<f64>() * 2.0 * PI;
    let rho = scenario.distance(ue);
    if !(rho > 0.0) {
        return Err(Error::DegenerateGeometry);
    }
    Ok(RayParams { rho, theta_deg: scenario.theta_deg(ue), phi, amplitude_fading: 1.0 })
}

fn scattered_rays(scenario: &Scenario, ue: usize, n_paths: usize, seed: u64) -> Vec<RayParams> {
    let mut rng = rng::stream(seed, Domain::Scatter, ue as u64);
    let (width, depth) = scenario.bounds;
    let bs = scenario.bs_position;
    let ue_pos = scenario.ue_positions[ue];
    let axis = scenario.array_axis();
    let mut rays = Vec::with_capacity(n_paths);
    while rays.len() < n_paths {
        let sc = [rng.random::<f64>() * width, rng.random::<f64>() * depth, 0.0];
        let leg =
            |a: [f64; 3], b: [f64; 3]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        let to_bs = leg(sc, bs);
        let rho = to_bs + leg(sc, ue_pos);
        let cos = ((sc[0] - bs[0]) * axis[0] + (sc[1] - bs[1]) * axis[1]) / to_bs;
        let phi = rng.random::<f64>() * 2.0 * PI;
        let g = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) / 2.0f64.sqrt();
        if rho > 0.0 {
            rays.push(RayParams {
                rho,
                theta_deg: cos.clamp(-1.0, 1.0).acos().to_degrees(),
                phi,
                amplitude_fading: g.norm(),
            });
        }
    }
    rays
}

/// Noise-free CSI of one UE.
pub fn noiseless_ue(
    scenario: &Scenario,
    cfg: &SystemConfig,
    family: &ChannelFamily,
    ue: usize,
    seed: u64,
) -> Result<CsiTensor> {
    let mut m = ComplexMatrix::zeros(cfg.n_sc, cfg.n_rx);
    let direct = direct_ray(scenario, ue, seed)?;
    match family {
        ChannelFamily::VanillaLos => add_ray(&mut m, &direct, 1.0, cfg)?,
        ChannelFamily::Multipath(mp) => {
            mp.validate()?;
            let r = cfg.path_loss_exponent;
            let direct_power = direct.rho.powf(-2.0 * r);
            let scattered_power = if mp.los {
                add_ray(&mut m, &direct, 1.0, cfg)?;
                direct_power / 10.0f64.powf(mp.k_factor_db / 10.0)
            } else {
                direct_power
            };
            if mp.n_paths > 0 && scattered_power > 0.0 {
                let rays = scattered_rays(scenario, ue, mp.n_paths, seed);
                let expected: f64 = rays.iter().map(|ray| ray.rho.powf(-2.0 * r)).sum();
                let scale = (scattered_power / expected).sqrt();
                for ray in &rays {
                    add_ray(&mut m, ray, scale, cfg)?;
                }
            }
        }
    }
    Ok(CsiTensor::new(ue, m))
}

pub fn noiseless_csi(
    scenario: &Scenario,
    cfg: &SystemConfig,
    family: &ChannelFamily,
    seed: u64,
) -> Result<Vec<CsiTensor>> {
    cfg.validate()?;
    (0..scenario.n_ue()).map(|ue| noiseless_ue(scenario, cfg, family, ue, seed)).collect()
}

/// Add circular complex Gaussian noise with per-entry variance equal to the
/// tensor's mean per-entry power divided by `10^(snr_db/10)`.
pub fn add_noise(csi: &CsiTensor, snr_db: f64, seed: u64) -> CsiTensor {
    let mut out = csi.clone();
    if snr_db == f64::INFINITY {
        return out;
    }
    let variance = csi.mean_power() / 10.0f64.powf(snr_db / 10.0);
    if !(variance > 0.0) {
        return out;
    }
    let sigma = (variance / 2.0).sqrt();
    let mut rng = rng::stream(seed, Domain::Noise, csi.ue_index as u64);
    for h in out.matrix.as_mut_slice() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *h += Complex64::new(sigma * re, sigma * im);
    }
    out
}

/// Single line-of-sight ray per UE plus noise at `cfg.snr_db`.
pub fn vanilla_los_csi(scenario: &Scenario, cfg: &SystemConfig, seed: u64) -> Result<Vec<CsiTensor>> {
    let clean = noiseless_csi(scenario, cfg, &ChannelFamily::VanillaLos, seed)?;
    Ok(clean.iter().map(|t| add_noise(t, cfg.snr_db, seed)).collect())
}

/// Scatterer stand-in plus noise at `cfg.snr_db`.
///
/// Scatterers are drawn uniformly in the scene; each scattered ray has the
/// two-leg path length, Rayleigh amplitude, and a common scale chosen so the
/// expected scattered power is the direct power over the K-factor (with the
/// direct ray) or equal to the direct-ray power it replaces (without it).
pub fn multipath_csi(
    scenario: &Scenario,
    cfg: &SystemConfig,
    params: &MultipathParams,
    seed: u64,
) -> Result<Vec<CsiTensor>> {
    let clean = noiseless_csi(scenario, cfg, &ChannelFamily::Multipath(*params), seed)?;
    Ok(clean.iter().map(|t| add_noise(t, cfg.snr_db, seed)).collect())
}
