//! Training-free reference embeddings: angular-domain features, PCA and
//! Sammon's mapping.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channel::CsiTensor;
use crate::metrics::distance;
use crate::numerics::{hermitian_eig, ComplexMatrix};
use crate::rng::{self, Domain};
use crate::{Error, Result};

/// Unitary DFT of `x`.
pub fn unitary_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, xm) in x.iter().enumerate() {
                let phase = -2.0 * PI * ((k * m) % n) as f64 / n as f64;
                acc += xm * Complex64::cis(phase);
            }
            acc * scale
        })
        .collect()
}

/// Angular magnitudes of each subcarrier row, rows concatenated.
pub fn raw_features(csi: &CsiTensor) -> Vec<f64> {
    (0..csi.n_sc()).flat_map(|s| unitary_dft(csi.row(s)).into_iter().map(|z| z.norm())).collect()
}

/// Features for a batch, scaled to unit mean power over the whole batch.
pub fn extract_features(batch: &[CsiTensor]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = batch.first() else {
        return Ok(Vec::new());
    };
    let shape = (first.n_sc(), first.n_rx());
    if batch.iter().any(|t| (t.n_sc(), t.n_rx()) != shape) {
        return Err(Error::ShapeMismatch);
    }
    let mut feats: Vec<Vec<f64>> = batch.iter().map(raw_features).collect();
    let count: usize = feats.iter().map(Vec::len).sum();
    let power = feats.iter().flatten().map(|v| v * v).sum::<f64>() / count.max(1) as f64;
    if power > 0.0 && power.is_finite() {
        let s = 1.0 / power.sqrt();
        feats.iter_mut().flatten().for_each(|v| *v *= s);
    }
    Ok(feats)
}

fn check_batch(features: &[Vec<f64>]) -> Result<usize> {
    if features.len() < 3 {
        return Err(Error::TooFewPoints);
    }
    let d = features[0].len();
    if d == 0 {
        return Err(Error::EmptyInput);
    }
    if features.iter().any(|f| f.len() != d) {
        return Err(Error::ShapeMismatch);
    }
    Ok(d)
}

/// Projection onto the two leading principal directions.
pub fn pca_chart(features: &[Vec<f64>]) -> Result<Vec<[f64; 2]>> {
    let d = check_batch(features)?;
    let n = features.len() as f64;
    let mut mean = alloc::vec![0.0; d];
    for f in features {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v / n;
        }
    }
    let centered: Vec<Vec<f64>> = features.iter().map(|f| f.iter().zip(&mean).map(|(v, m)| v - m).collect()).collect();
    let mut cov = alloc::vec![0.0; d * d];
    for f in &centered {
        for i in 0..d {
            for k in i..d {
                cov[i * d + k] += f[i] * f[k];
            }
        }
    }
    for i in 0..d {
        for k in i..d {
            cov[i * d + k] /= n;
            cov[k * d + i] = cov[i * d + k];
        }
    }
    let eig = hermitian_eig(&ComplexMatrix::from_real(d, d, &cov)?)?;
    if d < 2 || !(eig.eigenvalues[0] > 0.0) || !(eig.eigenvalues[1] > 1e-12 * eig.eigenvalues[0]) {
        return Err(Error::DegenerateFeatures);
    }
    let axes: Vec<Vec<f64>> = (0..2).map(|c| eig.eigenvector(c).iter().map(|z| z.re).collect()).collect();
    Ok(centered
        .iter()
        .map(|f| {
            let p = |a: &Vec<f64>| a.iter().zip(f).map(|(x, y)| x * y).sum::<f64>();
            [p(&axes[0]), p(&axes[1])]
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SammonSettings {
    pub max_iters: usize,
    /// Multiplier on the Newton step.
    pub step: f64,
    pub tolerance: f64,
    pub max_halvings: usize,
}

impl Default for SammonSettings {
    fn default() -> Self {
        Self { max_iters: 500, step: 1.0, tolerance: 1e-9, max_halvings: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SammonOutput {
    pub points: Vec<[f64; 2]>,
    pub initial_stress: f64,
    pub stress: f64,
    pub iterations: usize,
}

/// Pairwise distances in feature space (`N × N`, row-major).
pub fn feature_distances(features: &[Vec<f64>]) -> Vec<f64> {
    let n = features.len();
    let mut d = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = distance(&features[i], &features[j]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// Sammon stress `Σ_{i<j} (D_ij − d_ij)² / D_ij  /  Σ_{i<j} D_ij`.
pub fn sammon_stress(dist: &[f64], points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let (mut e, mut total) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let big = dist[i * n + j];
            let small = distance(&points[i], &points[j]);
            e += (big - small).powi(2) / big;
            total += big;
        }
    }
    e / total
}

/// Nudge points that coincide with an earlier point.
fn jitter_duplicates(features: &[Vec<f64>], seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut out = features.to_vec();
    let scale = features.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0) * 1e-9;
    let n = out.len();
    for i in 1..n {
        if (0..i).any(|j| distance(&out[i], &out[j]) == 0.0) {
            let mut rng = rng::stream(seed, Domain::Jitter, i as u64);
            for v in out[i].iter_mut() {
                *v += scale * (rng.random::<f64>() - 0.5);
            }
        }
    }
    for i in 1..n {
        if (0..i).any(|j| distance(&out[i], &out[j]) == 0.0) {
            return Err(Error::DuplicatePoints);
        }
    }
    Ok(out)
}

/// Sammon's mapping from the PCA projection.
pub fn sammon_chart(features: &[Vec<f64>], settings: &SammonSettings, seed: u64) -> Result<SammonOutput> {
    check_batch(features)?;
    let features = jitter_duplicates(features, seed)?;
    let init = pca_chart(&features)?;
    sammon_from(&feature_distances(&features), init, settings)
}

/// Diagonal-Newton descent with step halving, from a given start.
pub fn sammon_from(dist: &[f64], init: Vec<[f64; 2]>, settings: &SammonSettings) -> Result<SammonOutput> {
    let n = init.len();
    if n < 3 {
        return Err(Error::TooFewPoints);
    }
    if dist.len() != n * n {
        return Err(Error::ShapeMismatch);
    }
    for i in 0..n {
        for j in i + 1..n {
            if !(dist[i * n + j] > 0.0) {
                return Err(Error::DuplicatePoints);
            }
        }
    }
    let mean_dist = dist.iter().sum::<f64>() / (n * (n - 1)) as f64;
    let floor = mean_dist * 1e-12;

    let mut y = init;
    let mut e = sammon_stress(dist, &y);
    let initial_stress = e;
    let mut iterations = 0;
    let mut grad = alloc::vec![[0.0f64; 2]; n];
    let mut hess = alloc::vec![[0.0f64; 2]; n];
    while iterations < settings.max_iters && e > 0.0 {
        iterations += 1;
        for i in 0..n {
            let (mut g, mut h) = ([0.0; 2], [0.0; 2]);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let big = dist[i * n + j];
                let small = distance(&y[i], &y[j]).max(floor);
                let delta = 1.0 / small - 1.0 / big;
                let inv3 = 1.0 / (small * small * small);
                for a in 0..2 {
                    let diff = y[i][a] - y[j][a];
                    g[a] += delta * diff;
                    h[a] += delta - diff * diff * inv3;
                }
            }
            grad[i] = g;
            hess[i] = h;
        }
        let mut step: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let mut s = [0.0; 2];
                for a in 0..2 {
                    let h = hess[i][a].abs();
                    s[a] = if h > 0.0 { settings.step * grad[i][a] / h } else { 0.0 };
                }
                s
            })
            .collect();
        let mut accepted = None;
        for _ in 0..settings.max_halvings {
            let trial: Vec<[f64; 2]> = y.iter().zip(&step).map(|(p, s)| [p[0] + s[0], p[1] + s[1]]).collect();
            let e_new = sammon_stress(dist, &trial);
            if e_new < e {
                accepted = Some((trial, e_new));
                break;
            }
            step.iter_mut().for_each(|s| *s = [s[0] * 0.5, s[1] * 0.5]);
        }
        let Some((trial, e_new)) = accepted else {
            break;
        };
        let rel = (e - e_new) / e;
        y = trial;
        e = e_new;
        if rel < settings.tolerance {
            break;
        }
    }
    Ok(SammonOutput { points: y, initial_stress, stress: e, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dft_of_constant_is_dc() {
        let x = [Complex64::new(1.0, 0.0); 4];
        let y = unitary_dft(&x);
        assert!((y[0].norm() - 2.0).abs() < 1e-12);
        assert!(y[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn zero_csi_gives_zero_features() {
        let f = extract_features(&[CsiTensor::zeros(0, 2, 4), CsiTensor::zeros(1, 2, 4)]).unwrap();
        assert!(f.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(f[0].len(), 8);
    }

    #[test]
    fn collinear_features_are_degenerate() {
        let f: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64, 1.0]).collect();
        assert_eq!(pca_chart(&f), Err(Error::DegenerateFeatures));
    }

    #[test]
    fn sammon_recovers_a_square() {
        let f = vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0]];
        let out = sammon_chart(&f, &SammonSettings::default(), 3).unwrap();
        assert!(out.stress < 1e-6, "{}", out.stress);
    }

    #[test]
    fn isometric_start_is_a_fixed_point() {
        let pts = vec![[0.0, 0.0], [3.0, 0.0], [0.0, 4.0], [1.0, 1.0]];
        let mut dist = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                dist[i * 4 + j] = crate::metrics::distance(&pts[i], &pts[j]);
            }
        }
        let out = sammon_from(&dist, pts.clone(), &SammonSettings::default()).unwrap();
        assert!(out.initial_stress < 1e-24);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.points, pts);
    }

    #[test]
    fn duplicates_are_jittered() {
        let f = vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let out = sammon_chart(&f, &SammonSettings::default(), 3).unwrap();
        assert!(out.stress <= out.initial_stress);
    }
}
