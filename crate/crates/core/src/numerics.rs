//! Dense complex matrices and the Hermitian eigensolver.
//!
//! Everything here is sized for array processing: covariance matrices of at
//! most a few dozen rows. The eigensolver is a cyclic complex Jacobi method,
//! which is deterministic and accurate to working precision at these sizes.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix embedded with zero imaginary part.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { rows, cols, data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch);
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                for (o, b) in out.row_mut(i).iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖M − M^H‖_F ≤ tol · ‖M‖_F` for a square matrix.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut diff = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                diff += 2.0 * (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        diff.sqrt() <= tol * self.frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Which rank-1 product [`gram`] forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramForm {
    /// `v v^H` with `v` a column: entry `(i, k) = v_i · conj(v_k)`.
    Outer,
    /// `v^H v` with `v` a row: entry `(i, k) = conj(v_i) · v_k`.
    InnerTransposed,
}

/// Rank-1 Hermitian Gram matrix of a vector.
pub fn gram(v: &[Complex64], form: GramForm) -> Result<ComplexMatrix> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = v.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            out[(i, k)] = match form {
                GramForm::Outer => v[i] * v[k].conj(),
                GramForm::InnerTransposed => v[i].conj() * v[k],
            };
        }
    }
    Ok(out)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unit-norm eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    /// `V Λ V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum())
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Eigenvectors are phase-normalized so their first non-negligible component
/// is real and positive. Eigenvalues that tie (to 1e-12 relative) are ordered
/// by that first component, real part then imaginary part, descending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() || m.rows() == 0 || !m.is_finite() || !m.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::InvalidMatrix);
    }
    let n = m.rows();
    let mut a = m.clone();
    // Enforce exact symmetry so rounding in the input cannot stall convergence.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].norm_sqr()).sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for k in 0..n {
        normalize_phase(&mut v, k);
    }

    let lead = |k: usize| -> Complex64 { (0..n).map(|r| v[(r, k)]).find(|z| z.norm() > 1e-12).unwrap_or_default() };
    let lambda_max = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let tie_tol = 1e-12 * lambda_max.max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[y].partial_cmp(&values[x]).unwrap_or(core::cmp::Ordering::Equal));
    // Reorder runs of tied eigenvalues by their leading component.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[order[start]] - values[order[end]]).abs() <= tie_tol {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&x, &y| {
                let (lx, ly) = (lead(x), lead(y));
                ly.re
                    .partial_cmp(&lx.re)
                    .unwrap_or(core::cmp::Ordering::Equal)
                    .then(ly.im.partial_cmp(&lx.im).unwrap_or(core::cmp::Ordering::Equal))
            });
        }
        start = end;
    }

    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// One Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Unit phase e^{-iφ} of the off-diagonal entry.
    let phase = apq.conj() / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase * s;
    let g_qq = phase * c;

    let n = a.rows();
    // A ← A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G^H A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

fn normalize_phase(v: &mut ComplexMatrix, col: usize) {
    let n = v.rows();
    let norm = (0..n).map(|r| v[(r, col)].norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let lead = (0..n).map(|r| v[(r, col)]).find(|z| z.norm() > 1e-12 * norm);
    let rot = match lead {
        Some(z) => z.conj() / z.norm(),
        None => Complex64::new(1.0, 0.0),
    };
    for r in 0..n {
        v[(r, col)] = v[(r, col)] * rot / norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let eig = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_returns_standard_basis() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 3.0]).unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(eig.eigenvector(0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(eig.eigenvector(1), vec![c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn two_by_two_complex_case() {
        // det([[2-λ, i], [-i, 2-λ]]) = (2-λ)² - 1 → λ ∈ {3, 1}
        let m = ComplexMatrix::from_vec(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        let rec = eig.reconstruct();
        for (x, y) in rec.as_slice().iter().zip(m.as_slice()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert_eq!(hermitian_eig(&ComplexMatrix::zeros(2, 3)).unwrap_err(), Error::InvalidMatrix);
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert_eq!(hermitian_eig(&m).unwrap_err(), Error::InvalidMatrix);
    }

    #[test]
    fn zero_matrix_decomposes() {
        let eig = hermitian_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn gram_examples() {
        let g = gram(&[c(1.0, 0.0), c(0.0, 1.0)], GramForm::Outer).unwrap();
        assert_eq!(g.as_slice(), &[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        let g = gram(&[c(1.0, 0.0)], GramForm::InnerTransposed).unwrap();
        assert_eq!(g.as_slice(), &[c(1.0, 0.0)]);
        let g = gram(&[c(1.0, 0.0); 3], GramForm::Outer).unwrap();
        assert!(g.as_slice().iter().all(|&z| z == c(1.0, 0.0)));
        assert_eq!(gram(&[], GramForm::Outer).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn gram_forms_are_transposes_with_equal_trace() {
        let v = [c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0)];
        let outer = gram(&v, GramForm::Outer).unwrap();
        let inner = gram(&v, GramForm::InnerTransposed).unwrap();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((outer.trace().re - norm2).abs() < 1e-12);
        assert!((inner.trace().re - norm2).abs() < 1e-12);
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(outer[(i, k)], inner[(k, i)]);
            }
        }
    }
}
