//! Trustworthiness and continuity of a chart against the original layout.
//!
//! Both scores compare neighbourhood ranks. For point `i`, `r(i, j)` is the
//! rank of `j` by distance from `i` in the original space (1 for the nearest)
//! and `r̂(i, j)` the same in the chart. Ties go to the smaller index.
//!
//! * Continuity penalizes original K-neighbours that leave the chart
//!   K-neighbourhood, by how far (`r̂ − K`) they moved.
//! * Trustworthiness penalizes chart K-neighbours that were not original
//!   K-neighbours, by `r − K`.
//!
//! Per-point values are scaled by `2 / (K(2N − 3K − 1))` so each lies in
//! `[0, 1]`; the global score is their mean.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Euclidean distance.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `N × N` rank table; `rank(i, i) = 0`, otherwise a permutation of `1..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    n: usize,
    ranks: Vec<u32>,
}

impl RankTable {
    pub fn new<P: AsRef<[f64]>>(points: &[P]) -> Self {
        let n = points.len();
        let mut ranks = alloc::vec![0u32; n * n];
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
        for i in 0..n {
            order.clear();
            let pi = points[i].as_ref();
            order.extend((0..n).filter(|&j| j != i).map(|j| (distance(pi, points[j].as_ref()), j)));
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (r, &(_, j)) in order.iter().enumerate() {
                ranks[i * n + j] = r as u32 + 1;
            }
        }
        Self { n, ranks }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.ranks[i * self.n + j] as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodScore {
    pub global: f64,
    pub per_point: Vec<f64>,
}

/// Check `N ≥ 4` and `1 ≤ K ≤ (N − 1)/2`. Larger `K` would let a point's
/// penalty exceed the normalizer and push scores below zero.
pub fn validate_k(n: usize, k: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::TooFewPoints);
    }
    if k == 0 || 2 * k + 1 > n {
        return Err(Error::InvalidK);
    }
    Ok(())
}

/// Penalty sum over `j` with `keep(i, j) ≤ K` and `move(i, j) > K`.
fn score(keep: &RankTable, moved: &RankTable, k: usize) -> Result<NeighborhoodScore> {
    let n = keep.len();
    if moved.len() != n {
        return Err(Error::ShapeMismatch);
    }
    validate_k(n, k)?;
    let denom = (k * (2 * n - 3 * k - 1)) as f64;
    let per_point: Vec<f64> = (0..n)
        .map(|i| {
            let penalty: usize = (0..n)
                .filter(|&j| j != i && keep.rank(i, j) <= k)
                .map(|j| moved.rank(i, j))
                .filter(|&r| r > k)
                .map(|r| r - k)
                .sum();
            1.0 - (2 * penalty) as f64 / denom
        })
        .collect();
    let global = per_point.iter().sum::<f64>() / n as f64;
    Ok(NeighborhoodScore { global, per_point })
}

pub fn continuity_from_ranks(original: &RankTable, chart: &RankTable, k: usize) -> Result<NeighborhoodScore> {
    score(original, chart, k)
}

pub fn trustworthiness_from_ranks(original: &RankTable, chart: &RankTable, k: usize) -> Result<NeighborhoodScore> {
    score(chart, original, k)
}

fn tables<P: AsRef<[f64]>, Q: AsRef<[f64]>>(original: &[P], chart: &[Q], k: usize) -> Result<(RankTable, RankTable)> {
    if original.len() != chart.len() {
        return Err(Error::ShapeMismatch);
    }
    validate_k(original.len(), k)?;
    Ok((RankTable::new(original), RankTable::new(chart)))
}

pub fn continuity<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    original: &[P],
    chart: &[Q],
    k: usize,
) -> Result<NeighborhoodScore> {
    let (o, c) = tables(original, chart, k)?;
    continuity_from_ranks(&o, &c, k)
}

pub fn trustworthiness<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    original: &[P],
    chart: &[Q],
    k: usize,
) -> Result<NeighborhoodScore> {
    let (o, c) = tables(original, chart, k)?;
    trustworthiness_from_ranks(&o, &c, k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub k: usize,
    pub tw: f64,
    pub ct: f64,
}

/// TW and CT for each `K`, sharing one pair of rank tables.
pub fn metric_curve<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    original: &[P],
    chart: &[Q],
    ks: &[usize],
) -> Result<Vec<MetricRow>> {
    if original.len() != chart.len() {
        return Err(Error::ShapeMismatch);
    }
    for &k in ks {
        validate_k(original.len(), k)?;
    }
    let o = RankTable::new(original);
    let c = RankTable::new(chart);
    ks.iter()
        .map(|&k| {
            Ok(MetricRow {
                k,
                tw: trustworthiness_from_ranks(&o, &c, k)?.global,
                ct: continuity_from_ranks(&o, &c, k)?.global,
            })
        })
        .collect()
}

/// `round(0.05·N)`, at least 1.
pub fn default_k(n: usize) -> usize {
    ((n as f64 * 0.05).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(xs: &[f64]) -> Vec<[f64; 1]> {
        xs.iter().map(|&x| [x]).collect()
    }

    #[test]
    fn identity_and_similarity() {
        let pts: Vec<[f64; 2]> = (0..12).map(|i| [(i * 7 % 5) as f64, (i * i % 11) as f64 * 0.3]).collect();
        let moved: Vec<[f64; 2]> = pts.iter().map(|p| [-2.0 * p[1] + 5.0, 2.0 * p[0] - 1.0]).collect();
        for k in 1..=5 {
            assert_eq!(trustworthiness(&pts, &pts, k).unwrap().global, 1.0);
            assert_eq!(continuity(&pts, &moved, k).unwrap().global, 1.0);
            assert_eq!(trustworthiness(&pts, &moved, k).unwrap().global, 1.0);
        }
    }

    #[test]
    fn swapped_pair_on_a_line() {
        let orig = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let chart = line(&[0.0, 1.0, 3.0, 2.0, 4.0, 5.0]);
        // K = 1, N = 6 gives scale 1/4. Point 2 sits at x = 3 in the chart, where its
        // original nearest neighbour (point 1) has chart rank 3.
        let ct = continuity(&orig, &chart, 1).unwrap();
        assert!((0.0..=1.0).contains(&ct.global));
        assert_eq!(ct.per_point[0], 1.0);
        assert_eq!(ct.per_point[2], 1.0 - 0.25 * 2.0);
        let tw = trustworthiness(&chart, &orig, 1).unwrap();
        assert_eq!(tw.global, ct.global);
    }

    #[test]
    fn k_validation() {
        let p = line(&[0.0, 1.0, 2.0]);
        assert_eq!(continuity(&p, &p, 1), Err(Error::TooFewPoints));
        let p = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(continuity(&p, &p, 0), Err(Error::InvalidK));
        assert!(continuity(&p, &p, 2).is_ok());
        assert_eq!(continuity(&p, &p, 3), Err(Error::InvalidK));
        assert_eq!(continuity(&p, &line(&[0.0; 5]), 1), Err(Error::ShapeMismatch));
    }

    #[test]
    fn curve_rows() {
        let p: Vec<[f64; 2]> = (0..20).map(|i| [i as f64, (i % 3) as f64]).collect();
        let rows = metric_curve(&p, &p, &[1, 2, 5]).unwrap();
        assert_eq!(
            rows,
            vec![
                MetricRow { k: 1, tw: 1.0, ct: 1.0 },
                MetricRow { k: 2, tw: 1.0, ct: 1.0 },
                MetricRow { k: 5, tw: 1.0, ct: 1.0 },
            ]
        );
        assert_eq!(default_k(512), 26);
        assert_eq!(default_k(2048), 102);
    }
}
