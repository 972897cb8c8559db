//! Estimators against forward-synthesized single-ray CSI.

use std::f64::consts::PI;

use chartcore::channel::{noiseless_csi, ChannelFamily, CsiTensor};
use chartcore::estimators::joint::jm_estimate;
use chartcore::estimators::rotate_sum::{rs_spectrum_theta, RsTables};
use chartcore::estimators::{
    isq_rho, lr_feature, lr_fit, music_estimate_rho, music_estimate_theta, rs_estimate_rho, rs_estimate_theta,
    ChartSettings, Charter, ModelAlgorithm,
};
use chartcore::numerics::ComplexMatrix;
use chartcore::scenario::{generate_scenario, BsSite, ScenarioParams, SystemConfig};
use chartcore::{Complex64, Error, SPEED_OF_LIGHT};

const DF: f64 = 312.5e3;
const RATIO: f64 = 0.5;

/// `h[s, n] = exp(jπ n cos θ) · exp(−j2π ρ s Δf / c)`.
fn ray(theta_deg: f64, rho: f64, n_sc: usize, n_rx: usize) -> CsiTensor {
    let c = theta_deg.to_radians().cos();
    CsiTensor::new(
        0,
        ComplexMatrix::from_fn(n_sc, n_rx, |s, n| {
            Complex64::cis(PI * n as f64 * c) * Complex64::cis(-2.0 * PI * rho * s as f64 * DF / SPEED_OF_LIGHT)
        }),
    )
}

#[test]
fn music_theta_recovers_every_five_degrees() {
    for t in (1..=35).map(|i| i as f64 * 5.0) {
        let est = music_estimate_theta(&ray(t, 250.0, 4, 32), RATIO).unwrap();
        assert!((est - t).abs() <= 0.5, "θ = {t}: got {est}");
    }
    assert!((music_estimate_theta(&ray(120.0, 10.0, 1, 32), RATIO).unwrap() - 120.0).abs() <= 0.5);
    assert!((music_estimate_theta(&ray(90.0, 10.0, 1, 32), RATIO).unwrap() - 90.0).abs() <= 0.5);
}

#[test]
fn music_rho_recovers_every_fifty_metres() {
    for r in (1..=18).map(|i| i as f64 * 50.0) {
        let est = music_estimate_rho(&ray(70.0, r, 8, 32), RATIO, DF).unwrap();
        assert!((est - r).abs() <= 1.0, "ρ = {r}: got {est}");
    }
}

#[test]
fn music_rho_wraps_past_the_alias_range() {
    let alias = SPEED_OF_LIGHT / DF;
    let est = music_estimate_rho(&ray(70.0, alias + 100.0, 8, 32), RATIO, DF).unwrap();
    assert!((est - 100.0).abs() <= 1.0, "{est}");
}

#[test]
fn rotate_and_sum_recovers_ray() {
    let csi = ray(60.0, 300.0, 8, 32);
    assert!((rs_estimate_theta(&csi).unwrap() - 60.0).abs() <= 0.5);
    assert!((rs_estimate_rho(&csi, DF).unwrap() - 300.0).abs() <= 1.0);
    let tables = RsTables::new(32, 8, DF);
    let sp = rs_spectrum_theta(&csi, &tables).unwrap();
    let peak = sp.values[120];
    for (i, v) in sp.values.iter().enumerate() {
        if i != 120 {
            assert!(*v < peak, "θ index {i}");
        }
    }
    for r in [120.0, 455.0, 870.0] {
        let csi = ray(33.0, r, 8, 16);
        let m = music_estimate_rho(&csi, RATIO, DF).unwrap();
        let s = rs_estimate_rho(&csi, DF).unwrap();
        assert!((m - s).abs() <= 1.0);
    }
}

#[test]
fn joint_search_agrees_with_separate_searches() {
    let csi = ray(60.0, 300.0, 8, 32);
    let (t, r) = jm_estimate(&csi, 4, 4, RATIO, DF).unwrap();
    assert!((t - 60.0).abs() <= 0.5 && (r - 300.0).abs() <= 1.0, "({t}, {r})");
    let csi = ray(131.3, 612.4, 8, 16);
    let (t, r) = jm_estimate(&csi, 4, 4, RATIO, DF).unwrap();
    let tm = music_estimate_theta(&csi, RATIO).unwrap();
    let rm = music_estimate_rho(&csi, RATIO, DF).unwrap();
    assert!((t - tm).abs() <= 0.5 && (r - rm).abs() <= 1.0, "({t}, {r}) vs ({tm}, {rm})");
    assert_eq!(jm_estimate(&ray(60.0, 300.0, 2, 32), 4, 4, RATIO, DF), Err(Error::SubarrayTooLarge));
}

#[test]
fn noiseless_mm_chart_matches_geometry() {
    let s = generate_scenario(&ScenarioParams { n_ue: 256, ..Default::default() }, 9).unwrap();
    let cfg = SystemConfig { n_sc: 8, snr_db: f64::INFINITY, ..Default::default() };
    let batch = noiseless_csi(&s, &cfg, &ChannelFamily::VanillaLos, 9).unwrap();
    let charter = Charter::new(ModelAlgorithm::Mm, ChartSettings::default(), 32, 8).unwrap();
    let out = charter.chart(&batch);
    let mut sq = 0.0;
    for o in &out {
        let p = o.result.unwrap();
        let truth = s.bs_frame(o.ue_index);
        sq += (p.x - truth[0]).powi(2) + (p.y - truth[1]).powi(2);
    }
    let rms = (sq / out.len() as f64).sqrt();
    assert!(rms <= 2.0, "RMS {rms}");
}

#[test]
fn single_subcarrier_paths() {
    let csi = ray(45.0, 100.0, 1, 8);
    let isq = Charter::new(ModelAlgorithm::Isq, ChartSettings::default(), 8, 1).unwrap();
    assert!(isq.chart_point(&csi).result.is_ok());
    let mm = Charter::new(ModelAlgorithm::Mm, ChartSettings::default(), 8, 1).unwrap();
    assert_eq!(mm.chart_point(&csi).result, Err(Error::InsufficientSubcarriers));
}

#[test]
fn regression_on_line_of_sight_ues() {
    // ρ is exponential in X, so a straight line fits only approximately (R² ≈ 0.85–0.9 here).
    let params = ScenarioParams { n_ue: 512, site: BsSite::ShortEdge, ..Default::default() };
    let s = generate_scenario(&params, 4).unwrap();
    let cfg = SystemConfig { n_sc: 1, snr_db: f64::INFINITY, ..Default::default() };
    let batch = noiseless_csi(&s, &cfg, &ChannelFamily::VanillaLos, 4).unwrap();
    let known: Vec<(f64, f64)> = (0..256).map(|u| (lr_feature(batch[u].row(0)).unwrap(), s.distance(u))).collect();
    let m = lr_fit(&known).unwrap();
    assert!(m.a < 0.0);
    assert!(m.r_squared(&known) > 0.8, "{}", m.r_squared(&known));
    // ISQ is exact in the noiseless single-ray case: Σ|h| = n_rx / ρ².
    let u = 7;
    let isq = isq_rho(batch[u].row(0)).unwrap();
    assert!((isq - s.distance(u) / 32f64.sqrt()).abs() < 1e-9 * s.distance(u));
}
