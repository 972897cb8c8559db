//! Structure and statistics of synthesized CSI.

use std::f64::consts::PI;

use chartcore::channel::{add_noise, multipath_csi, noiseless_csi, vanilla_los_csi, ChannelFamily, MultipathParams};
use chartcore::estimators::{snapshot_covariance, Axis};
use chartcore::numerics::hermitian_eig;
use chartcore::scenario::{generate_scenario, Scenario, ScenarioParams, SystemConfig};
use chartcore::{Complex64, SPEED_OF_LIGHT};

fn scene(n: usize, seed: u64) -> Scenario {
    generate_scenario(&ScenarioParams { n_ue: n, ..Default::default() }, seed).unwrap()
}

fn quiet(n_sc: usize) -> SystemConfig {
    SystemConfig { n_sc, snr_db: f64::INFINITY, ..Default::default() }
}

#[test]
fn vanilla_rows_and_columns_advance_by_fixed_rotations() {
    let s = scene(64, 1);
    let cfg = quiet(8);
    let batch = vanilla_los_csi(&s, &cfg, 1).unwrap();
    for t in &batch {
        let u = t.ue_index;
        let col = Complex64::cis(PI * s.theta_deg(u).to_radians().cos());
        let row = Complex64::cis(-2.0 * PI * s.distance(u) * cfg.subcarrier_spacing / SPEED_OF_LIGHT);
        for sc in 0..8 {
            for n in 0..32 {
                let h = t.matrix[(sc, n)];
                if n + 1 < 32 {
                    assert!((t.matrix[(sc, n + 1)] / h - col).norm() < 1e-9);
                }
                if sc + 1 < 8 {
                    assert!((t.matrix[(sc + 1, n)] / h - row).norm() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn vanilla_is_rank_one_and_decays_with_range() {
    let s = scene(64, 2);
    let batch = vanilla_los_csi(&s, &quiet(8), 2).unwrap();
    for t in &batch {
        for axis in [Axis::Antennas, Axis::Subcarriers] {
            let e = hermitian_eig(&snapshot_covariance(t, axis)).unwrap().eigenvalues;
            assert!(e[1] < 1e-10 * e[0]);
        }
    }
    let mut by_range: Vec<(f64, f64)> =
        batch.iter().map(|t| (s.distance(t.ue_index), t.matrix[(0, 0)].norm())).collect();
    by_range.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(by_range.windows(2).all(|w| w[1].1 <= w[0].1));
}

#[test]
fn synthesis_is_deterministic() {
    let s = scene(64, 3);
    let cfg = SystemConfig { n_sc: 4, ..Default::default() };
    assert_eq!(vanilla_los_csi(&s, &cfg, 8).unwrap(), vanilla_los_csi(&s, &cfg, 8).unwrap());
    assert_ne!(vanilla_los_csi(&s, &cfg, 8).unwrap(), vanilla_los_csi(&s, &cfg, 9).unwrap());
    let mp = MultipathParams { los: false, n_paths: 16, k_factor_db: 0.0 };
    assert_eq!(multipath_csi(&s, &cfg, &mp, 8).unwrap(), multipath_csi(&s, &cfg, &mp, 8).unwrap());
}

#[test]
fn strong_direct_ray_converges_to_vanilla() {
    let s = scene(64, 4);
    let cfg = quiet(4);
    let van = noiseless_csi(&s, &cfg, &ChannelFamily::VanillaLos, 4).unwrap();
    let mp = MultipathParams { los: true, n_paths: 20, k_factor_db: 120.0 };
    let near = noiseless_csi(&s, &cfg, &ChannelFamily::Multipath(mp), 4).unwrap();
    for (a, b) in van.iter().zip(&near) {
        let scale = a.matrix.frobenius_norm();
        let diff: f64 =
            a.matrix.as_slice().iter().zip(b.matrix.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-4 * scale);
    }
    let inf = MultipathParams { los: true, n_paths: 20, k_factor_db: f64::INFINITY };
    assert!(multipath_csi(&s, &cfg, &inf, 4).is_err());
}

#[test]
fn scattered_only_channel_has_rayleigh_power() {
    let s = scene(500, 5);
    let cfg = quiet(4);
    let mp = MultipathParams { los: false, n_paths: 24, k_factor_db: 0.0 };
    let batch = noiseless_csi(&s, &cfg, &ChannelFamily::Multipath(mp), 5).unwrap();
    let p: Vec<f64> = batch
        .iter()
        .flat_map(|t| {
            let reference = s.distance(t.ue_index).powi(-4);
            t.matrix.as_slice().iter().map(move |h| h.norm_sqr() / reference).collect::<Vec<_>>()
        })
        .collect();
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    let sd = (p.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
    let cv = sd / mean;
    assert!((cv - 1.0).abs() <= 0.15, "CV {cv}");
}

#[test]
fn noise_power_follows_snr() {
    let s = scene(64, 6);
    let cfg = quiet(32);
    let clean = vanilla_los_csi(&s, &cfg, 6).unwrap();
    for snr in [0.0, 10.0] {
        let mut ratio = 0.0;
        for t in &clean {
            let noisy = add_noise(t, snr, 6);
            let noise: f64 =
                noisy.matrix.as_slice().iter().zip(t.matrix.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
                    / 1024.0;
            ratio += noise / t.mean_power();
        }
        ratio /= clean.len() as f64;
        let want = 10f64.powf(-snr / 10.0);
        assert!((ratio / want - 1.0).abs() < 0.05, "snr {snr}: {ratio}");
    }
}
