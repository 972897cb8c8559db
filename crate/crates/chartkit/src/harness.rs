//! Seeded multi-run experiments: synthesize, chart, score, aggregate.

use std::path::Path;
use std::time::Instant;

use chartcore::baselines::{extract_features, pca_chart, sammon_chart};
use chartcore::channel::{add_noise, noiseless_csi, CsiTensor};
use chartcore::estimators::music::music_theta_with;
use chartcore::estimators::{
    isq_rho, lr_feature, lr_fit, lr_rho, ChartOutcome, ChartPoint, Charter, ModelAlgorithm, SteeringTable,
};
use chartcore::metrics::{metric_curve, validate_k};
use chartcore::rng::{derive_seed, Domain};
use chartcore::scenario::{generate_scenario, Scenario};

use crate::config::{Algorithm, ChannelSpec, ExperimentConfig};
use crate::error::Result;
use crate::formats::{
    chart_records, planar_records, write_records, write_scenario_csv, ChartRecord, MetricRecord, SkippedRecord,
    SummaryRecord, TimingRecord,
};
use crate::parallel::Pool;
use crate::svg::render_chart_svg;

/// Number of UEs with known positions used to fit the regression model.
pub fn lr_training_count(n_ue: usize) -> usize {
    ((n_ue as f64 / 8.0).round() as usize).max(2)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FailureRecord {
    pub algorithm: String,
    pub channel: String,
    pub n_sc: usize,
    pub seed: u64,
    pub failed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartArtifact {
    pub channel: String,
    pub algorithm: String,
    pub n_sc: usize,
    pub records: Vec<ChartRecord>,
}

#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    /// One row per run, algorithm, channel, subcarrier count and K.
    pub metrics: Vec<MetricRecord>,
    pub summary: Vec<SummaryRecord>,
    pub timing: Vec<TimingRecord>,
    pub skipped: Vec<SkippedRecord>,
    pub failures: Vec<FailureRecord>,
    pub conventions: Vec<String>,
    /// Scene of the first run.
    pub scenario: Option<Scenario>,
    /// Charts of the first run.
    pub charts: Vec<ChartArtifact>,
}

impl EvalReport {
    pub fn summary_for(&self, algorithm: &str, channel: &str, n_sc: usize, k: usize) -> Option<&SummaryRecord> {
        self.summary.iter().find(|s| s.algorithm == algorithm && s.channel == channel && s.n_sc == n_sc && s.k == k)
    }

    pub fn seconds_for(&self, algorithm: &str, channel: &str, n_sc: usize) -> Option<f64> {
        self.timing
            .iter()
            .find(|t| t.algorithm == algorithm && t.channel == channel && t.n_sc == n_sc)
            .map(|t| t.seconds_mean)
    }
}

/// Keyed accumulation that keeps first-insertion order.
struct Groups<K, V> {
    entries: Vec<(K, Vec<V>)>,
}

impl<K: PartialEq, V> Groups<K, V> {
    fn new() -> Self {
        Self { entries: Vec::new() }
    }

    fn push(&mut self, key: K, v: V) {
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some((_, vs)) => vs.push(v),
            None => self.entries.push((key, vec![v])),
        }
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 { (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, std)
}

/// Noisy CSI for every UE. With one subcarrier, subcarrier 0 is observed in
/// `n_ave` independently noisy snapshots stacked as rows.
pub fn synthesize(
    cfg: &ExperimentConfig,
    pool: &Pool,
    scenario: &Scenario,
    channel: &ChannelSpec,
    n_sc: usize,
    seed: u64,
) -> Result<Vec<CsiTensor>> {
    let sys = cfg.system_config(n_sc);
    let clean = noiseless_csi(scenario, &sys, &channel.family(), seed)?;
    let snr = sys.snr_db;
    if n_sc == 1 {
        let noise_seed = derive_seed(seed, Domain::Noise, u64::MAX);
        let n_ave = sys.n_ave;
        Ok(pool.map(&clean, |t| add_noise(&t.repeat_first_row(n_ave), snr, noise_seed)))
    } else {
        Ok(pool.map(&clean, |t| add_noise(t, snr, seed)))
    }
}

/// Algorithm, channel, subcarrier count, K.
type CellKey = (String, String, usize, usize);

struct Cell<'a> {
    algorithm: &'static str,
    channel: &'a str,
    n_sc: usize,
    seed: u64,
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    pool: Pool,
    ks: Vec<usize>,
    report: EvalReport,
    timings: Groups<(String, String, usize), f64>,
}

impl Runner<'_> {
    fn skip(&mut self, cell: &Cell, reason: &str) {
        self.report.skipped.push(SkippedRecord {
            algorithm: cell.algorithm.to_owned(),
            channel: cell.channel.to_owned(),
            n_sc: cell.n_sc,
            seed: cell.seed,
            reason: reason.to_owned(),
        });
    }

    fn time(&mut self, cell: &Cell, seconds: f64) {
        self.timings.push((cell.algorithm.to_owned(), cell.channel.to_owned(), cell.n_sc), seconds);
    }

    /// Score the successfully charted UEs and keep first-run artifacts.
    fn score(&mut self, cell: &Cell, scenario: &Scenario, records: Vec<ChartRecord>, first_run: bool) {
        let (idx, pts): (Vec<usize>, Vec<[f64; 2]>) =
            records.iter().filter_map(|r| r.point().map(|p| (r.ue_index, p))).unzip();
        let failed = records.len() - idx.len();
        if failed > 0 {
            self.report.failures.push(FailureRecord {
                algorithm: cell.algorithm.to_owned(),
                channel: cell.channel.to_owned(),
                n_sc: cell.n_sc,
                seed: cell.seed,
                failed,
                total: records.len(),
            });
        }
        let original: Vec<[f64; 2]> = idx.iter().map(|&u| scenario.ground_xy(u)).collect();
        let ks: Vec<usize> = self.ks.clone();
        let valid: Vec<usize> = ks.iter().copied().filter(|&k| validate_k(idx.len(), k).is_ok()).collect();
        if valid.len() < ks.len() {
            self.skip(cell, "InvalidK");
        }
        if !valid.is_empty() {
            match metric_curve(&original, &pts, &valid) {
                Ok(rows) => {
                    for row in rows {
                        self.report.metrics.push(MetricRecord {
                            algorithm: cell.algorithm.to_owned(),
                            channel: cell.channel.to_owned(),
                            n_sc: cell.n_sc,
                            k: row.k,
                            tw: row.tw,
                            ct: row.ct,
                            n_ue: idx.len(),
                            seed: cell.seed,
                        });
                    }
                }
                Err(e) => self.skip(cell, e.kind()),
            }
        }
        if first_run && (self.cfg.output.charts || self.cfg.output.svg) {
            self.report.charts.push(ChartArtifact {
                channel: cell.channel.to_owned(),
                algorithm: cell.algorithm.to_owned(),
                n_sc: cell.n_sc,
                records,
            });
        }
    }

    fn single_subcarrier(
        &mut self,
        algs: &[Algorithm],
        scenario: &Scenario,
        channel: &ChannelSpec,
        seed: u64,
        first_run: bool,
    ) -> Result<()> {
        let wanted = |a: Algorithm| algs.contains(&a);
        let isq = wanted(Algorithm::Model(ModelAlgorithm::Isq));
        let lr = wanted(Algorithm::Model(ModelAlgorithm::Lr));
        let pca = wanted(Algorithm::Pca);
        let sm = wanted(Algorithm::Sammon);
        if !(isq || lr || pca || sm) {
            return Ok(());
        }
        let label = channel.label();
        let cfg = self.cfg;
        let sys = cfg.system_config(1);
        let batch = synthesize(cfg, &self.pool, scenario, channel, 1, seed)?;

        if isq || lr {
            let table = SteeringTable::theta(sys.n_rx)?;
            let ratio = cfg.estimator.threshold_ratio;
            let start = Instant::now();
            let thetas = self.pool.map(&batch, |t| music_theta_with(t, ratio, &table));
            let theta_secs = start.elapsed().as_secs_f64();
            let combine = |rhos: Vec<chartcore::Result<f64>>| -> Vec<ChartOutcome> {
                batch
                    .iter()
                    .zip(thetas.iter().zip(rhos))
                    .map(|(t, (th, rho))| ChartOutcome {
                        ue_index: t.ue_index,
                        result: (*th).and_then(|th| rho.map(|r| ChartPoint::from_polar(th, r))),
                    })
                    .collect()
            };
            if isq {
                let cell = Cell { algorithm: "ISQ", channel: &label, n_sc: 1, seed };
                let start = Instant::now();
                let rhos = self.pool.map(&batch, |t| isq_rho(t.row(0)));
                self.time(&cell, theta_secs + start.elapsed().as_secs_f64());
                let outcomes = combine(rhos);
                self.score(&cell, scenario, chart_records("ISQ", &outcomes), first_run);
            }
            if lr {
                let cell = Cell { algorithm: "LR", channel: &label, n_sc: 1, seed };
                let start = Instant::now();
                let n_fit = lr_training_count(scenario.n_ue()).min(batch.len());
                let known: Vec<(f64, f64)> = batch[..n_fit]
                    .iter()
                    .filter_map(|t| lr_feature(t.row(0)).ok().map(|x| (x, scenario.distance(t.ue_index))))
                    .collect();
                match lr_fit(&known) {
                    Ok(model) => {
                        let rhos = self.pool.map(&batch, |t| lr_rho(&model, t.row(0)));
                        self.time(&cell, theta_secs + start.elapsed().as_secs_f64());
                        let outcomes = combine(rhos);
                        self.score(&cell, scenario, chart_records("LR", &outcomes), first_run);
                    }
                    Err(e) => self.skip(&cell, e.kind()),
                }
            }
        }

        if pca || sm {
            let features = extract_features(&batch)?;
            let ues: Vec<usize> = batch.iter().map(|t| t.ue_index).collect();
            if pca {
                let cell = Cell { algorithm: "PCA", channel: &label, n_sc: 1, seed };
                let start = Instant::now();
                let result = pca_chart(&features);
                self.time(&cell, start.elapsed().as_secs_f64());
                match result {
                    Ok(points) => self.score(&cell, scenario, planar_records("PCA", &ues, &points), first_run),
                    Err(e) => self.skip(&cell, e.kind()),
                }
            }
            if sm {
                let cell = Cell { algorithm: "SM", channel: &label, n_sc: 1, seed };
                let start = Instant::now();
                let result = sammon_chart(&features, &cfg.sammon_settings(), seed);
                self.time(&cell, start.elapsed().as_secs_f64());
                match result {
                    Ok(out) => self.score(&cell, scenario, planar_records("SM", &ues, &out.points), first_run),
                    Err(e) => self.skip(&cell, e.kind()),
                }
            }
        }
        Ok(())
    }

    fn subcarrier_sweep(
        &mut self,
        algs: &[Algorithm],
        scenario: &Scenario,
        channel: &ChannelSpec,
        seed: u64,
        first_run: bool,
    ) -> Result<()> {
        let cfg = self.cfg;
        let label = channel.label();
        let settings = cfg.chart_settings();
        let models: Vec<ModelAlgorithm> = algs
            .iter()
            .filter_map(|a| match a {
                Algorithm::Model(m) if m.needs_subcarriers() => Some(*m),
                _ => None,
            })
            .collect();
        if models.is_empty() {
            return Ok(());
        }
        for &n_sc in &cfg.subcarriers {
            let mut feasible = Vec::new();
            for &m in &models {
                let cell = Cell { algorithm: m.name(), channel: &label, n_sc, seed };
                if n_sc < 2 {
                    self.skip(&cell, "InsufficientSubcarriers");
                } else if m == ModelAlgorithm::Jm && (n_sc < settings.n_sa || cfg.system.n_rx < settings.m_sa) {
                    self.skip(&cell, "SubarrayTooLarge");
                } else {
                    feasible.push(m);
                }
            }
            if feasible.is_empty() {
                continue;
            }
            let sys = cfg.system_config(n_sc);
            let batch = synthesize(cfg, &self.pool, scenario, channel, n_sc, seed)?;
            for m in feasible {
                let cell = Cell { algorithm: m.name(), channel: &label, n_sc, seed };
                let charter = Charter::new(m, settings, sys.n_rx, n_sc)?;
                let start = Instant::now();
                let outcomes = self.pool.map(&batch, |t| charter.chart_point(t));
                self.time(&cell, start.elapsed().as_secs_f64());
                self.score(&cell, scenario, chart_records(m.name(), &outcomes), first_run);
            }
        }
        Ok(())
    }
}

/// Run every configured cell and aggregate; nothing is written to disk.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let algs = cfg.parsed_algorithms()?;
    let params = cfg.scenario_params()?;
    let mut runner = Runner {
        cfg,
        pool: Pool::new(cfg.workers)?,
        ks: cfg.ks(),
        report: EvalReport::default(),
        timings: Groups::new(),
    };
    for (r, seed) in cfg.run_seeds().into_iter().enumerate() {
        let scenario = generate_scenario(&params, seed)?;
        for channel in &cfg.channels {
            runner.single_subcarrier(&algs, &scenario, channel, seed, r == 0)?;
            runner.subcarrier_sweep(&algs, &scenario, channel, seed, r == 0)?;
        }
        if r == 0 {
            runner.report.scenario = Some(scenario);
        }
    }

    let mut report = runner.report;
    let mut groups: Groups<CellKey, (f64, f64, usize)> = Groups::new();
    for m in &report.metrics {
        groups.push((m.algorithm.clone(), m.channel.clone(), m.n_sc, m.k), (m.tw, m.ct, m.n_ue));
    }
    report.summary = groups
        .entries
        .into_iter()
        .map(|((algorithm, channel, n_sc, k), vals)| {
            let tw: Vec<f64> = vals.iter().map(|v| v.0).collect();
            let ct: Vec<f64> = vals.iter().map(|v| v.1).collect();
            let (tw_mean, tw_std) = mean_std(&tw);
            let (ct_mean, ct_std) = mean_std(&ct);
            SummaryRecord {
                algorithm,
                channel,
                n_sc,
                k,
                runs: vals.len(),
                tw_mean,
                tw_std,
                ct_mean,
                ct_std,
                n_ue: vals.iter().map(|v| v.2).min().unwrap_or(0),
            }
        })
        .collect();
    report.timing = runner
        .timings
        .entries
        .into_iter()
        .map(|((algorithm, channel, n_sc), secs)| TimingRecord {
            algorithm,
            channel,
            n_sc,
            runs: secs.len(),
            seconds_mean: secs.iter().sum::<f64>() / secs.len() as f64,
        })
        .collect();
    report.conventions = conventions(cfg);
    Ok(report)
}

fn conventions(cfg: &ExperimentConfig) -> Vec<String> {
    vec![
        format!(
            "snr_db={} per entry, relative to the mean per-entry power of each UE tensor",
            cfg.system.snr_db
        ),
        format!(
            "ISQ, LR, PCA and SM use {} noisy snapshots of subcarrier 0 (n_sc column = 1); ISQ and LR share one MUSIC angle pass",
            cfg.system.n_ave
        ),
        format!("LR is fitted on the first {} UEs with their true range", lr_training_count(cfg.scenario.n_ue)),
        "TW/CT use ground-plane (x, y) as the original space and only successfully charted UEs".to_owned(),
        format!("run r uses seed {} + r; mean and sample stddev over {} runs", cfg.seed, cfg.runs()),
    ]
}

/// Write report tables and first-run artifacts under `dir`.
pub fn write_report(dir: &Path, report: &EvalReport, cfg: &ExperimentConfig) -> Result<()> {
    write_records(&dir.join("metrics.csv"), &report.metrics, &[])?;
    write_records(&dir.join("summary.csv"), &report.summary, &report.conventions)?;
    write_records(&dir.join("timing.csv"), &report.timing, &[])?;
    write_records(&dir.join("skipped.csv"), &report.skipped, &[])?;
    write_records(&dir.join("failures.csv"), &report.failures, &[])?;
    let Some(scenario) = &report.scenario else {
        return Ok(());
    };
    write_scenario_csv(&dir.join("scenario.csv"), scenario)?;
    let vip: Vec<bool> = (0..scenario.n_ue()).map(|u| scenario.is_vip(u)).collect();
    if cfg.output.svg {
        let ground: Vec<[f64; 2]> = (0..scenario.n_ue()).map(|u| scenario.ground_xy(u)).collect();
        render_chart_svg(&ground, &vip, "scene", &dir.join("svg").join("scene.svg"))?;
    }
    for art in &report.charts {
        let stem = format!("{}_{}_sc{}", art.channel, art.algorithm, art.n_sc);
        if cfg.output.charts {
            write_records(&dir.join("charts").join(format!("{stem}.csv")), &art.records, &[])?;
        }
        if cfg.output.svg {
            let (pts, marks): (Vec<[f64; 2]>, Vec<bool>) = art
                .records
                .iter()
                .filter_map(|r| r.point().map(|p| (p, vip.get(r.ue_index).copied().unwrap_or(false))))
                .unzip();
            if !pts.is_empty() {
                render_chart_svg(&pts, &marks, &stem, &dir.join("svg").join(format!("{stem}.svg")))?;
            }
        }
    }
    Ok(())
}

/// [`evaluate`], then write to `output.dir` when set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvalReport> {
    let report = evaluate(cfg)?;
    if let Some(dir) = &cfg.output.dir {
        write_report(dir, &report, cfg)?;
    }
    Ok(report)
}
