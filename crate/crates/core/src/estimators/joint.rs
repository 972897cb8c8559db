//! Joint angle–range MUSIC over a smoothed CSI matrix.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::music::{split_subspace, SPECTRUM_CLAMP};
use super::steering::{fold_alias, SteeringTable};
use crate::channel::CsiTensor;
use crate::numerics::{hermitian_eig, ComplexMatrix};
use crate::{Error, Result};

/// Default subarray: 4 subcarriers × 4 antennas.
pub const DEFAULT_SUBARRAY: (usize, usize) = (4, 4);

/// Stack every `n_sa × m_sa` window of the CSI matrix as a column.
///
/// Window entries are vectorized subcarrier-major (index `a·m_sa + b` holds
/// subcarrier offset `a`, antenna offset `b`); windows are ordered the same way.
pub fn jm_smooth(csi: &CsiTensor, n_sa: usize, m_sa: usize) -> Result<ComplexMatrix> {
    if n_sa == 0 || m_sa == 0 {
        return Err(Error::InvalidConfig("subarray dimensions must be positive"));
    }
    if n_sa > csi.n_sc() || m_sa > csi.n_rx() {
        return Err(Error::SubarrayTooLarge);
    }
    let ws = csi.n_sc() - n_sa + 1;
    let wr = csi.n_rx() - m_sa + 1;
    let m = &csi.matrix;
    Ok(ComplexMatrix::from_fn(n_sa * m_sa, ws * wr, |row, col| {
        let (a, b) = (row / m_sa, row % m_sa);
        let (s0, r0) = (col / wr, col % wr);
        m[(s0 + a, r0 + b)]
    }))
}

/// Joint estimate and the full 2D spectrum (angle-major, `361 × 1001`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub theta_grid: Vec<f64>,
    pub rho_grid: Vec<f64>,
    /// `values[t * rho_grid.len() + r]`.
    pub values: Vec<f64>,
}

impl JointSpectrum {
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        let nr = self.rho_grid.len();
        (self.theta_grid[best.0 / nr], self.rho_grid[best.0 % nr])
    }
}

pub fn jm_spectrum(
    csi: &CsiTensor,
    n_sa: usize,
    m_sa: usize,
    threshold_ratio: f64,
    delta_f: f64,
) -> Result<JointSpectrum> {
    let x = jm_smooth(csi, n_sa, m_sa)?;
    let mut r = x.matmul(&x.conj_transpose())?;
    r.scale(1.0 / x.cols() as f64);
    let eig = hermitian_eig(&r)?;
    if !(eig.eigenvalues[0] > 0.0) {
        return Err(Error::NoSignal);
    }
    let split = split_subspace(&eig, threshold_ratio)?;
    let dim = n_sa * m_sa;
    let p = split.noise_dim();

    // Rows of Nᴴ, split into real and imaginary parts.
    let mut nh_re = Vec::with_capacity(p * dim);
    let mut nh_im = Vec::with_capacity(p * dim);
    for q in 0..p {
        for j in 0..dim {
            let z = split.noise_basis[(j, q)].conj();
            nh_re.push(z.re);
            nh_im.push(z.im);
        }
    }

    let a_tab = SteeringTable::theta(m_sa)?;
    let b_tab = SteeringTable::rho(n_sa, delta_f)?;
    let mut values = Vec::with_capacity(a_tab.len() * b_tab.len());
    let mut c_re = alloc::vec![0.0; dim];
    let mut c_im = alloc::vec![0.0; dim];
    for t in 0..a_tab.len() {
        let av = a_tab.vector(t);
        for rr in 0..b_tab.len() {
            let bv = b_tab.vector(rr);
            for (ai, ba) in bv.iter().enumerate() {
                for (bi, ab) in av.iter().enumerate() {
                    let z: Complex64 = ba * ab;
                    c_re[ai * m_sa + bi] = z.re;
                    c_im[ai * m_sa + bi] = z.im;
                }
            }
            let mut norm2 = 0.0;
            for q in 0..p {
                let (nr, ni) = (&nh_re[q * dim..(q + 1) * dim], &nh_im[q * dim..(q + 1) * dim]);
                let (mut sr, mut si) = (0.0, 0.0);
                for j in 0..dim {
                    sr += nr[j] * c_re[j] - ni[j] * c_im[j];
                    si += nr[j] * c_im[j] + ni[j] * c_re[j];
                }
                norm2 += sr * sr + si * si;
            }
            let v = 1.0 / norm2.sqrt();
            values.push(if v.is_finite() { v } else { SPECTRUM_CLAMP });
        }
    }
    Ok(JointSpectrum { theta_grid: a_tab.grid().to_vec(), rho_grid: b_tab.grid().to_vec(), values })
}

/// `(θ°, ρ m)` at the joint spectrum peak, range folded into `[0, c/Δf)`.
pub fn jm_estimate(
    csi: &CsiTensor,
    n_sa: usize,
    m_sa: usize,
    threshold_ratio: f64,
    delta_f: f64,
) -> Result<(f64, f64)> {
    let (t, r) = jm_spectrum(csi, n_sa, m_sa, threshold_ratio, delta_f)?.argmax();
    Ok((t, fold_alias(r, delta_f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothing_shapes() {
        let t = CsiTensor::new(0, ComplexMatrix::from_fn(4, 4, |r, c| Complex64::new((r * 4 + c) as f64, 0.0)));
        let x = jm_smooth(&t, 4, 4).unwrap();
        assert_eq!((x.rows(), x.cols()), (16, 1));
        assert_eq!(x.column(0), t.matrix.as_slice().to_vec());
        assert_eq!(jm_smooth(&CsiTensor::zeros(0, 8, 32), 4, 4).unwrap().cols(), 145);
        assert_eq!(jm_smooth(&CsiTensor::zeros(0, 2, 32), 4, 4), Err(Error::SubarrayTooLarge));
    }
}
