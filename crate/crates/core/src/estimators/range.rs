//! Magnitude-based range proxies.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// `1/√(Σ|h_n|)`.
pub fn isq_rho(row: &[Complex64]) -> Result<f64> {
    if row.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s: f64 = row.iter().map(|h| h.norm()).sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DegenerateInput);
    }
    Ok(1.0 / s.sqrt())
}

/// Regression feature `ln Σ|h_n|`.
pub fn lr_feature(row: &[Complex64]) -> Result<f64> {
    if row.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s: f64 = row.iter().map(|h| h.norm()).sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DegenerateInput);
    }
    Ok(s.ln())
}

/// `ρ = a·X + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrModel {
    pub a: f64,
    pub b: f64,
}

impl LrModel {
    pub fn predict(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    /// Coefficient of determination on `(X, ρ)` pairs.
    pub fn r_squared(&self, known: &[(f64, f64)]) -> f64 {
        let n = known.len() as f64;
        let mean = known.iter().map(|p| p.1).sum::<f64>() / n;
        let ss_tot: f64 = known.iter().map(|p| (p.1 - mean).powi(2)).sum();
        let ss_res: f64 = known.iter().map(|&(x, y)| (y - self.predict(x)).powi(2)).sum();
        1.0 - ss_res / ss_tot
    }
}

/// Ordinary least squares on `(X, ρ)` pairs.
pub fn lr_fit(known: &[(f64, f64)]) -> Result<LrModel> {
    if known.len() < 2 {
        return Err(Error::SingularFit);
    }
    let n = known.len() as f64;
    let mx = known.iter().map(|p| p.0).sum::<f64>() / n;
    let my = known.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = known.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = known.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) || !sxx.is_finite() || !sxy.is_finite() {
        return Err(Error::SingularFit);
    }
    let a = sxy / sxx;
    Ok(LrModel { a, b: my - a * mx })
}

pub fn lr_rho(model: &LrModel, row: &[Complex64]) -> Result<f64> {
    Ok(model.predict(lr_feature(row)?))
}
