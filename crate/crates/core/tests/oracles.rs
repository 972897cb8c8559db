//! Implementations checked against direct loop-nest references.

use std::f64::consts::PI;

use chartcore::baselines::pca_chart;
use chartcore::channel::CsiTensor;
use chartcore::estimators::rotate_sum::{rs_spectrum_rho, rs_spectrum_theta, RsTables};
use chartcore::estimators::{lr_fit, snapshot_covariance, Axis};
use chartcore::metrics::{continuity, trustworthiness};
use chartcore::numerics::{hermitian_eig, ComplexMatrix};
use chartcore::{Complex64, SPEED_OF_LIGHT};
use num_traits::Float;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec(complex(), n * n).prop_map(move |v| {
            ComplexMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    Complex64::new(v[r * n + c].re, 0.0)
                } else if r < c {
                    v[r * n + c]
                } else {
                    v[c * n + r].conj()
                }
            })
        })
    })
}

fn tensor(max_sc: usize, max_rx: usize) -> impl Strategy<Value = CsiTensor> {
    (2..=max_sc, 2..=max_rx).prop_flat_map(|(s, r)| {
        prop::collection::vec(complex(), s * r)
            .prop_map(move |v| CsiTensor::new(0, ComplexMatrix::from_vec(s, r, v).unwrap()))
    })
}

/// Rank of `j` around `i`: one plus the points strictly closer, or equally close with a smaller index.
fn brute_rank(pts: &[[f64; 2]], i: usize, j: usize) -> usize {
    let d = |a: usize, b: usize| ((pts[a][0] - pts[b][0]).powi(2) + (pts[a][1] - pts[b][1]).powi(2)).sqrt();
    1 + (0..pts.len())
        .filter(|&l| l != i && l != j)
        .filter(|&l| d(i, l) < d(i, j) || (d(i, l) == d(i, j) && l < j))
        .count()
}

fn brute_scores(orig: &[[f64; 2]], chart: &[[f64; 2]], k: usize) -> (Vec<f64>, Vec<f64>) {
    let n = orig.len();
    let denom = (k * (2 * n - 3 * k - 1)) as f64;
    let mut tw = Vec::new();
    let mut ct = Vec::new();
    for i in 0..n {
        let (mut pt, mut pc) = (0usize, 0usize);
        for j in 0..n {
            if j == i {
                continue;
            }
            let r = brute_rank(orig, i, j);
            let rh = brute_rank(chart, i, j);
            if rh <= k && r > k {
                pt += r - k;
            }
            if r <= k && rh > k {
                pc += rh - k;
            }
        }
        tw.push(1.0 - (2 * pt) as f64 / denom);
        ct.push(1.0 - (2 * pc) as f64 / denom);
    }
    (tw, ct)
}

fn points(n: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    // Small integer grid so distance ties occur.
    prop::collection::vec((0..5i32, 0..5i32).prop_map(|(a, b)| [a as f64, b as f64]), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eigendecomposition_reconstructs(m in hermitian()) {
        let eig = hermitian_eig(&m).unwrap();
        let rec = eig.reconstruct();
        let err = rec.as_slice().iter().zip(m.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-8, "error {}", err);
        for w in eig.eigenvalues.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let n = m.rows();
        for p in 0..n {
            for q in 0..n {
                let dot: Complex64 = (0..n).map(|r| eig.eigenvectors[(r, p)].conj() * eig.eigenvectors[(r, q)]).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn neighbourhood_scores_match_enumeration(
        (orig, chart) in (4usize..=10).prop_flat_map(|n| (points(n), points(n)))
    ) {
        let n = orig.len();
        for k in (1..n).filter(|&k| 2 * k < n) {
            let (tw, ct) = brute_scores(&orig, &chart, k);
            let got_tw = trustworthiness(&orig, &chart, k).unwrap();
            let got_ct = continuity(&orig, &chart, k).unwrap();
            prop_assert_eq!(&got_tw.per_point, &tw);
            prop_assert_eq!(&got_ct.per_point, &ct);
            prop_assert!((got_tw.global - tw.iter().sum::<f64>() / n as f64).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&got_tw.global) && (0.0..=1.0).contains(&got_ct.global), "k={} tw={:?} ct={:?}", k, got_tw, got_ct);
        }
    }
}

/// Gram accumulation, then counter-rotation summed with `k` outer and `i` inner.
fn rs_reference_theta(csi: &CsiTensor) -> Vec<f64> {
    let n = csi.n_rx();
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..csi.n_sc() {
        let c = csi.row(r);
        for i in 0..n {
            for k in 0..n {
                s[i * n + k] += c[i].conj() * c[k];
            }
        }
    }
    (0..361)
        .map(|t| {
            let cos_t = Float::cos((t as f64 * 0.5).to_radians());
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for i in 0..n {
                    acc += s[i * n + k] * Complex64::cis(PI * cos_t * (i as f64 - k as f64));
                }
            }
            acc.norm()
        })
        .collect()
}

fn rs_reference_rho(csi: &CsiTensor, delta_f: f64) -> Vec<f64> {
    let n = csi.n_sc();
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for col in 0..csi.n_rx() {
        for i in 0..n {
            for k in 0..n {
                s[i * n + k] += csi.matrix[(i, col)] * csi.matrix[(k, col)].conj();
            }
        }
    }
    (1..=1000)
        .map(|rho| {
            let rho = rho as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for i in 0..n {
                    acc += s[i * n + k]
                        * Complex64::cis(2.0 * PI * delta_f * rho * (i as f64 - k as f64) / SPEED_OF_LIGHT);
                }
            }
            acc.norm()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn rotate_and_sum_matches_reference_bit_for_bit(csi in tensor(4, 8)) {
        let df = 312.5e3;
        let tables = RsTables::new(csi.n_rx(), csi.n_sc(), df);
        let th = rs_spectrum_theta(&csi, &tables).unwrap();
        let rh = rs_spectrum_rho(&csi, &tables).unwrap();
        prop_assert_eq!(th.values, rs_reference_theta(&csi));
        prop_assert_eq!(rh.values, rs_reference_rho(&csi, df));
    }

    #[test]
    fn covariance_matches_summation(csi in tensor(4, 4)) {
        let ant = snapshot_covariance(&csi, Axis::Antennas);
        let sub = snapshot_covariance(&csi, Axis::Subcarriers);
        let (ns, nr) = (csi.n_sc(), csi.n_rx());
        for i in 0..nr {
            for k in 0..nr {
                let mut want = Complex64::new(0.0, 0.0);
                for s in 0..ns {
                    want += csi.matrix[(s, i)] * csi.matrix[(s, k)].conj();
                }
                prop_assert!((ant[(i, k)] - want / ns as f64).norm() < 1e-12);
            }
        }
        for i in 0..ns {
            for k in 0..ns {
                let mut want = Complex64::new(0.0, 0.0);
                for r in 0..nr {
                    want += csi.matrix[(i, r)] * csi.matrix[(k, r)].conj();
                }
                prop_assert!((sub[(i, k)] - want / nr as f64).norm() < 1e-12);
            }
        }
        prop_assert!(ant.is_hermitian(1e-12) && sub.is_hermitian(1e-12));
    }

    #[test]
    fn least_squares_matches_normal_equations(
        pts in prop::collection::vec((-5.0..5.0f64, -100.0..100.0f64), 3..30)
    ) {
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let det = n * sxx - sx * sx;
        prop_assume!(det.abs() > 1e-6);
        let a = (n * sxy - sx * sy) / det;
        let b = (sy - a * sx) / n;
        let m = lr_fit(&pts).unwrap();
        prop_assert!((m.a - a).abs() < 1e-8 * (1.0 + a.abs()));
        prop_assert!((m.b - b).abs() < 1e-8 * (1.0 + b.abs()));
    }
}

#[test]
fn pca_on_three_points_matches_closed_form() {
    // Centered points (−1, 0), (0, 1), (1, −1): covariance [[2/3, −1/3], [−1/3, 2/3]],
    // eigenvectors (1, −1)/√2 (λ = 1) and (1, 1)/√2 (λ = 1/3).
    let f = vec![vec![1.0, 2.0], vec![2.0, 3.0], vec![3.0, 1.0]];
    let p = pca_chart(&f).unwrap();
    let s = 1.0 / 2f64.sqrt();
    let want = [[-s, -s], [-s, s], [2.0 * s, 0.0]];
    for (got, w) in p.iter().zip(&want) {
        // Axis signs are a convention; compare up to a per-axis sign.
        assert!((got[0].abs() - w[0].abs()).abs() < 1e-12, "{got:?}");
        assert!((got[1].abs() - w[1].abs()).abs() < 1e-12, "{got:?}");
    }
}

#[test]
fn pca_of_planar_data_preserves_distances() {
    let f: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![-1.0, 0.5], vec![0.3, -2.0], vec![-0.3, 1.5]];
    let mean = [0.0, 0.0];
    let centered: Vec<Vec<f64>> = f.iter().map(|v| vec![v[0] - mean[0], v[1] - mean[1]]).collect();
    let p = pca_chart(&centered).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let a = chartcore::metrics::distance(&f[i], &f[j]);
            let b = chartcore::metrics::distance(&p[i], &p[j]);
            assert!((a - b).abs() < 1e-8);
        }
    }
}
