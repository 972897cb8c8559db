//! Steering vectors and search grids.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, SPEED_OF_LIGHT};

/// Number of points on the angle grid (0° to 180° in half-degree steps).
pub const THETA_GRID_LEN: usize = 361;
pub const THETA_STEP_DEG: f64 = 0.5;
/// Largest range on the search grids, m.
pub const RHO_MAX_M: usize = 1000;

/// `0, 0.5, …, 180` degrees.
pub fn theta_grid() -> Vec<f64> {
    (0..THETA_GRID_LEN).map(|i| i as f64 * THETA_STEP_DEG).collect()
}

/// `0, 1, …, 1000` m (subspace search).
pub fn music_rho_grid() -> Vec<f64> {
    (0..=RHO_MAX_M).map(|r| r as f64).collect()
}

/// `1, 2, …, 1000` m (rotate-and-sum search).
pub fn rs_rho_grid() -> Vec<f64> {
    (1..=RHO_MAX_M).map(|r| r as f64).collect()
}

/// Half-wavelength array response: entry `n` is `exp(jπ n cos θ)`.
pub fn steering_theta(theta_deg: f64, n_rx: usize) -> Result<Vec<Complex64>> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(Error::InvalidAngle);
    }
    if n_rx == 0 {
        return Err(Error::EmptyInput);
    }
    let step = PI * theta_deg.to_radians().cos();
    Ok((0..n_rx).map(|n| Complex64::cis(step * n as f64)).collect())
}

/// Subcarrier response: entry `s` is `exp(−j2πρ s Δf / c)`.
pub fn steering_rho(rho_m: f64, n_sc: usize, delta_f: f64) -> Result<Vec<Complex64>> {
    if !(rho_m >= 0.0) || !rho_m.is_finite() {
        return Err(Error::InvalidRange);
    }
    if n_sc == 0 {
        return Err(Error::EmptyInput);
    }
    let step = -2.0 * PI * rho_m * delta_f / SPEED_OF_LIGHT;
    Ok((0..n_sc).map(|s| Complex64::cis(step * s as f64)).collect())
}

/// Map a range peak into `[0, c/Δf)`. Grid points past the alias range
/// describe the same phase progression as the point one period earlier.
pub fn fold_alias(rho_m: f64, delta_f: f64) -> f64 {
    let period = SPEED_OF_LIGHT / delta_f;
    if rho_m >= period {
        rho_m - period
    } else {
        rho_m
    }
}

/// Steering vectors evaluated once over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringTable {
    grid: Vec<f64>,
    dim: usize,
    vectors: Vec<Complex64>,
    delta_f: Option<f64>,
}

impl SteeringTable {
    pub fn build(grid: Vec<f64>, dim: usize, mut f: impl FnMut(f64) -> Result<Vec<Complex64>>) -> Result<Self> {
        let mut vectors = Vec::with_capacity(grid.len() * dim);
        for &g in &grid {
            let v = f(g)?;
            if v.len() != dim {
                return Err(Error::ShapeMismatch);
            }
            vectors.extend_from_slice(&v);
        }
        Ok(Self { grid, dim, vectors, delta_f: None })
    }

    pub fn theta(n_rx: usize) -> Result<Self> {
        Self::build(theta_grid(), n_rx, |t| steering_theta(t, n_rx))
    }

    pub fn rho(n_sc: usize, delta_f: f64) -> Result<Self> {
        let mut t = Self::build(music_rho_grid(), n_sc, |r| steering_rho(r, n_sc, delta_f))?;
        t.delta_f = Some(delta_f);
        Ok(t)
    }

    /// Subcarrier spacing for range tables.
    pub fn delta_f(&self) -> Option<f64> {
        self.delta_f
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }
}
