//! Subspace (MUSIC) estimation of angle and range.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::steering::{fold_alias, SteeringTable};
use crate::channel::CsiTensor;
use crate::numerics::{hermitian_eig, ComplexMatrix, EigenDecomposition};
use crate::{Error, Result};

/// Value reported where the noise projection vanishes exactly.
pub const SPECTRUM_CLAMP: f64 = 1e12;

/// Which dimension of the CSI matrix is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Rows are snapshots; the covariance is `n_rx × n_rx`.
    Antennas,
    /// Columns are snapshots; the covariance is `n_sc × n_sc`.
    Subcarriers,
}

/// Sample covariance `E[h hᴴ]` where `h` runs over the snapshots of `axis`.
pub fn snapshot_covariance(csi: &CsiTensor, axis: Axis) -> ComplexMatrix {
    let m = &csi.matrix;
    let (n, snapshots) = match axis {
        Axis::Antennas => (m.cols(), m.rows()),
        Axis::Subcarriers => (m.rows(), m.cols()),
    };
    let mut r = ComplexMatrix::zeros(n, n);
    let entry = |snap: usize, i: usize| match axis {
        Axis::Antennas => m[(snap, i)],
        Axis::Subcarriers => m[(i, snap)],
    };
    for snap in 0..snapshots {
        for i in 0..n {
            let hi = entry(snap, i);
            for k in 0..n {
                r[(i, k)] += hi * entry(snap, k).conj();
            }
        }
    }
    if snapshots > 0 {
        r.scale(1.0 / snapshots as f64);
    }
    r
}

/// Partition of eigenvectors into signal and noise spans.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSplit {
    pub signal_dim: usize,
    /// `n × p`, orthonormal columns.
    pub noise_basis: ComplexMatrix,
}

impl SubspaceSplit {
    pub fn noise_dim(&self) -> usize {
        self.noise_basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.noise_basis.rows()
    }

    /// `‖Nᴴ a‖₂`.
    pub fn noise_projection_norm(&self, a: &[Complex64]) -> f64 {
        let nb = &self.noise_basis;
        let mut acc = vec_zeroed(nb.cols());
        for (i, ai) in a.iter().enumerate() {
            for (q, slot) in acc.iter_mut().enumerate() {
                *slot += nb[(i, q)].conj() * ai;
            }
        }
        acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn vec_zeroed(n: usize) -> Vec<Complex64> {
    alloc::vec![Complex64::new(0.0, 0.0); n]
}

/// Eigenvalues at or above `threshold_ratio · λ_max` span the signal space
/// (at least one); the rest span the noise space.
pub fn split_subspace(eig: &EigenDecomposition, threshold_ratio: f64) -> Result<SubspaceSplit> {
    let n = eig.dim();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let lmax = eig.eigenvalues[0];
    let cut = threshold_ratio * lmax;
    let signal_dim = eig.eigenvalues.iter().filter(|&&l| l >= cut).count().max(1);
    if signal_dim >= n {
        return Err(Error::NoNoiseSubspace);
    }
    let p = n - signal_dim;
    let noise_basis = ComplexMatrix::from_fn(n, p, |r, c| eig.eigenvectors[(r, signal_dim + c)]);
    Ok(SubspaceSplit { signal_dim, noise_basis })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl PseudoSpectrum {
    /// Index and value of the first global maximum.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best
    }

    pub fn peak(&self) -> Option<f64> {
        self.argmax().map(|(i, _)| self.grid[i])
    }
}

fn spectrum_value(norm: f64) -> f64 {
    let v = 1.0 / norm;
    if v.is_finite() {
        v
    } else {
        SPECTRUM_CLAMP
    }
}

/// `1/‖Nᴴ a(g)‖₂` for every `g` in `grid`.
pub fn music_spectrum(
    split: &SubspaceSplit,
    grid: &[f64],
    mut steering: impl FnMut(f64) -> Result<Vec<Complex64>>,
) -> Result<PseudoSpectrum> {
    let mut values = Vec::with_capacity(grid.len());
    for &g in grid {
        let a = steering(g)?;
        if a.len() != split.dim() {
            return Err(Error::ShapeMismatch);
        }
        values.push(spectrum_value(split.noise_projection_norm(&a)));
    }
    Ok(PseudoSpectrum { grid: grid.to_vec(), values })
}

/// As [`music_spectrum`] over precomputed steering vectors.
pub fn music_spectrum_table(split: &SubspaceSplit, table: &SteeringTable) -> Result<PseudoSpectrum> {
    if table.dim() != split.dim() {
        return Err(Error::ShapeMismatch);
    }
    let values = (0..table.len()).map(|i| spectrum_value(split.noise_projection_norm(table.vector(i)))).collect();
    Ok(PseudoSpectrum { grid: table.grid().to_vec(), values })
}

/// Covariance, eigendecomposition and subspace split along `axis`.
pub fn noise_subspace(csi: &CsiTensor, axis: Axis, threshold_ratio: f64) -> Result<SubspaceSplit> {
    if csi.matrix.as_slice().is_empty() {
        return Err(Error::EmptyInput);
    }
    let r = snapshot_covariance(csi, axis);
    let eig = hermitian_eig(&r)?;
    if !(eig.eigenvalues[0] > 0.0) {
        return Err(Error::NoSignal);
    }
    split_subspace(&eig, threshold_ratio)
}

pub fn music_spectrum_theta(csi: &CsiTensor, threshold_ratio: f64, table: &SteeringTable) -> Result<PseudoSpectrum> {
    let split = noise_subspace(csi, Axis::Antennas, threshold_ratio)?;
    music_spectrum_table(&split, table)
}

pub fn music_spectrum_rho(csi: &CsiTensor, threshold_ratio: f64, table: &SteeringTable) -> Result<PseudoSpectrum> {
    if csi.n_sc() < 2 {
        return Err(Error::InsufficientSubcarriers);
    }
    let split = noise_subspace(csi, Axis::Subcarriers, threshold_ratio)?;
    music_spectrum_table(&split, table)
}

/// Angle of arrival in degrees on the half-degree grid.
pub fn music_estimate_theta(csi: &CsiTensor, threshold_ratio: f64) -> Result<f64> {
    let table = SteeringTable::theta(csi.n_rx())?;
    music_theta_with(csi, threshold_ratio, &table)
}

pub fn music_theta_with(csi: &CsiTensor, threshold_ratio: f64, table: &SteeringTable) -> Result<f64> {
    music_spectrum_theta(csi, threshold_ratio, table)?.peak().ok_or(Error::EmptyInput)
}

/// Range in metres from the 1 m grid, folded into `[0, c/Δf)`.
pub fn music_estimate_rho(csi: &CsiTensor, threshold_ratio: f64, delta_f: f64) -> Result<f64> {
    if csi.n_sc() < 2 {
        return Err(Error::InsufficientSubcarriers);
    }
    let table = SteeringTable::rho(csi.n_sc(), delta_f)?;
    music_rho_with(csi, threshold_ratio, &table)
}

pub fn music_rho_with(csi: &CsiTensor, threshold_ratio: f64, table: &SteeringTable) -> Result<f64> {
    let peak = music_spectrum_rho(csi, threshold_ratio, table)?.peak().ok_or(Error::EmptyInput)?;
    Ok(match table.delta_f() {
        Some(df) => fold_alias(peak, df),
        None => peak,
    })
}
