//! Rotate-and-sum spectral search.
//!
//! For a single ray the accumulated Gram matrix `S` has entries
//! `S[i,k] ∝ exp(jψ(k−i))`. Counter-rotating each entry by `exp(jψ'(i−k))`
//! and summing gives a value whose magnitude peaks at `ψ' = ψ`. No
//! eigendecomposition is needed.
//!
//! Rotation factors are `cis(π·cos θ·(i−k))` for angle and
//! `cis(2π·Δf·ρ·(i−k)/c)` for range; the sum runs over `k` outer, `i` inner.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::music::PseudoSpectrum;
use super::steering::{fold_alias, rs_rho_grid, theta_grid};
use crate::channel::CsiTensor;
use crate::numerics::ComplexMatrix;
use crate::{Error, Result, SPEED_OF_LIGHT};

/// `Σ_rows rowᴴ·row`: entry `(i,k)` accumulates `conj(c_i)·c_k` row by row.
pub fn rs_theta_gram(csi: &CsiTensor) -> ComplexMatrix {
    let n = csi.n_rx();
    let mut s = ComplexMatrix::zeros(n, n);
    for r in 0..csi.n_sc() {
        let c = csi.row(r);
        for i in 0..n {
            for k in 0..n {
                s[(i, k)] += c[i].conj() * c[k];
            }
        }
    }
    s
}

/// `Σ_cols col·colᴴ`: entry `(i,k)` accumulates `c_i·conj(c_k)` column by column.
pub fn rs_rho_gram(csi: &CsiTensor) -> ComplexMatrix {
    let n = csi.n_sc();
    let m = &csi.matrix;
    let mut s = ComplexMatrix::zeros(n, n);
    for col in 0..csi.n_rx() {
        for i in 0..n {
            for k in 0..n {
                s[(i, k)] += m[(i, col)] * m[(k, col)].conj();
            }
        }
    }
    s
}

/// Rotation factors for one grid point, indexed by `i − k + n − 1`.
fn rotations(n: usize, phase: impl Fn(f64) -> f64) -> Vec<Complex64> {
    (0..2 * n - 1)
        .map(|j| {
            let d = j as f64 - (n - 1) as f64;
            Complex64::cis(phase(d))
        })
        .collect()
}

/// Precomputed rotation factors for fixed tensor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct RsTables {
    n_rx: usize,
    n_sc: usize,
    delta_f: f64,
    theta_grid: Vec<f64>,
    rho_grid: Vec<f64>,
    theta: Vec<Vec<Complex64>>,
    rho: Vec<Vec<Complex64>>,
}

impl RsTables {
    pub fn new(n_rx: usize, n_sc: usize, delta_f: f64) -> Self {
        let theta_grid = theta_grid();
        let rho_grid = rs_rho_grid();
        let theta = if n_rx == 0 {
            Vec::new()
        } else {
            theta_grid
                .iter()
                .map(|&t| {
                    let cos_t = t.to_radians().cos();
                    rotations(n_rx, |d| PI * cos_t * d)
                })
                .collect()
        };
        let rho = if n_sc == 0 {
            Vec::new()
        } else {
            rho_grid.iter().map(|&r| rotations(n_sc, |d| 2.0 * PI * delta_f * r * d / SPEED_OF_LIGHT)).collect()
        };
        Self { n_rx, n_sc, delta_f, theta_grid, rho_grid, theta, rho }
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_sc(&self) -> usize {
        self.n_sc
    }
}

fn rotate_and_sum(s: &ComplexMatrix, rot: &[Complex64]) -> Complex64 {
    let n = s.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for i in 0..n {
            acc += s[(i, k)] * rot[i + n - 1 - k];
        }
    }
    acc
}

fn spectrum(s: &ComplexMatrix, grid: &[f64], rots: &[Vec<Complex64>]) -> Result<PseudoSpectrum> {
    if s.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::NoSignal);
    }
    let values = rots.iter().map(|rot| rotate_and_sum(s, rot).norm()).collect();
    Ok(PseudoSpectrum { grid: grid.to_vec(), values })
}

/// `|C(θ)|` over the half-degree grid.
pub fn rs_spectrum_theta(csi: &CsiTensor, tables: &RsTables) -> Result<PseudoSpectrum> {
    if csi.n_rx() < 2 {
        return Err(Error::InvalidConfig("angle search needs at least two antennas"));
    }
    if csi.n_rx() != tables.n_rx {
        return Err(Error::ShapeMismatch);
    }
    spectrum(&rs_theta_gram(csi), &tables.theta_grid, &tables.theta)
}

/// `|C(ρ)|` over `1..=1000` m.
pub fn rs_spectrum_rho(csi: &CsiTensor, tables: &RsTables) -> Result<PseudoSpectrum> {
    if csi.n_sc() < 2 {
        return Err(Error::InsufficientSubcarriers);
    }
    if csi.n_sc() != tables.n_sc {
        return Err(Error::ShapeMismatch);
    }
    spectrum(&rs_rho_gram(csi), &tables.rho_grid, &tables.rho)
}

pub fn rs_theta_with(csi: &CsiTensor, tables: &RsTables) -> Result<f64> {
    rs_spectrum_theta(csi, tables)?.peak().ok_or(Error::EmptyInput)
}

/// Range peak folded into `[0, c/Δf)`.
pub fn rs_rho_with(csi: &CsiTensor, tables: &RsTables) -> Result<f64> {
    let peak = rs_spectrum_rho(csi, tables)?.peak().ok_or(Error::EmptyInput)?;
    Ok(fold_alias(peak, tables.delta_f))
}

pub fn rs_estimate_theta(csi: &CsiTensor) -> Result<f64> {
    rs_theta_with(csi, &RsTables::new(csi.n_rx(), 0, 1.0))
}

pub fn rs_estimate_rho(csi: &CsiTensor, delta_f: f64) -> Result<f64> {
    if csi.n_sc() < 2 {
        return Err(Error::InsufficientSubcarriers);
    }
    rs_rho_with(csi, &RsTables::new(0, csi.n_sc(), delta_f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preconditions() {
        assert_eq!(rs_estimate_rho(&CsiTensor::zeros(0, 1, 4), 312.5e3), Err(Error::InsufficientSubcarriers));
        assert_eq!(rs_estimate_theta(&CsiTensor::zeros(0, 3, 4)), Err(Error::NoSignal));
    }

    #[test]
    fn rotation_index_matches_offset() {
        let r = rotations(3, |d| d);
        assert_eq!(r.len(), 5);
        assert_eq!(r[2], Complex64::cis(0.0));
        assert_eq!(r[0], Complex64::cis(-2.0));
    }
}
