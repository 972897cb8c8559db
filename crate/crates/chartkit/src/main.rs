use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chartcore::baselines::{extract_features, pca_chart, sammon_chart};
use chartcore::estimators::music::{music_spectrum_rho, music_spectrum_theta, PseudoSpectrum};
use chartcore::estimators::rotate_sum::{rs_spectrum_rho, rs_spectrum_theta};
use chartcore::estimators::{lr_feature, lr_fit, Charter, ModelAlgorithm, RsTables, SteeringTable};
use chartcore::metrics::metric_curve;
use chartcore::scenario::generate_scenario;

use chartkit::config::{Algorithm, ChannelSpec, ExperimentConfig, FamilyName};
use chartkit::formats::{
    chart_records, planar_records, read_csi_csv, read_records, read_scenario_csv, records_to_csv, write_atomic,
    write_csi_csv, write_records, write_scenario_csv, ChartRecord, SpectrumRecord,
};
use chartkit::harness::{lr_training_count, run_experiment, synthesize};
use chartkit::parallel::Pool;
use chartkit::svg::render_chart_svg;
use chartkit::{Result, ToolError};

#[derive(Parser)]
#[command(name = "chartkit", version, about = "Model-based channel charting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in profile used when no file is given.
    #[arg(long, default_value = "desk")]
    profile: String,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::profile(&self.profile)?,
        };
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    VanillaLos,
    MultipathLos,
    MultipathNlos,
}

#[derive(Clone, Copy, ValueEnum)]
enum Parameter {
    Theta,
    Rho,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scene and its noisy CSI.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 32)]
        n_sc: usize,
        #[arg(long, value_enum)]
        channel: Option<Family>,
        /// Output directory for scenario.csv and csi.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Chart a CSI file with one algorithm.
    Chart {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        csi: PathBuf,
        /// MM, RS, JM, ISQ, LR, PCA or SM.
        #[arg(long)]
        algorithm: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, requires = "lr_b")]
        lr_a: Option<f64>,
        #[arg(long, requires = "lr_a")]
        lr_b: Option<f64>,
        /// Scene whose first UEs train the LR model.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Trustworthiness and continuity of a chart against its scene.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        chart: PathBuf,
        /// Neighbourhood sizes; defaults to 5% of the UE count.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full seeded experiment.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory, overriding the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a chart or scene as SVG.
    Render {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        chart: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pseudospectrum of one UE.
    Spectrum {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        csi: PathBuf,
        #[arg(long)]
        ue: usize,
        #[arg(long, value_enum)]
        parameter: Parameter,
        /// MM or RS.
        #[arg(long, default_value = "MM")]
        algorithm: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a profile as TOML.
    DefaultConfig {
        #[arg(long, default_value = "desk")]
        profile: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { cfg, seed, n_sc, channel, out } => simulate(&cfg.load()?, seed, n_sc, channel, &out),
        Command::Chart { cfg, csi, algorithm, out, lr_a, lr_b, scenario, seed } => {
            let lr = lr_a.zip(lr_b);
            chart(&cfg.load()?, &csi, &algorithm, &out, lr, scenario.as_deref(), seed)
        }
        Command::Evaluate { scenario, chart, k, out } => evaluate(&scenario, &chart, &k, out.as_deref()),
        Command::Run { cfg, out } => {
            let mut c = cfg.load()?;
            if out.is_some() {
                c.output.dir = out;
            }
            let report = run_experiment(&c)?;
            print!("{}", String::from_utf8_lossy(&records_to_csv(&report.summary, &report.conventions)?));
            Ok(())
        }
        Command::Render { scenario, chart, title, out } => render(scenario.as_deref(), chart.as_deref(), title, &out),
        Command::Spectrum { cfg, csi, ue, parameter, algorithm, out } => {
            spectrum(&cfg.load()?, &csi, ue, parameter, &algorithm, &out)
        }
        Command::DefaultConfig { profile } => {
            print!("{}", ExperimentConfig::profile(&profile)?.to_toml());
            Ok(())
        }
    }
}

fn simulate(cfg: &ExperimentConfig, seed: Option<u64>, n_sc: usize, family: Option<Family>, out: &Path) -> Result<()> {
    if n_sc == 0 {
        return Err(ToolError::Config("n_sc must be positive".into()));
    }
    let seed = seed.unwrap_or(cfg.seed);
    let channel = match family {
        None => cfg.channels.first().cloned().unwrap_or_else(|| ChannelSpec::new(FamilyName::VanillaLos)),
        Some(Family::VanillaLos) => ChannelSpec::new(FamilyName::VanillaLos),
        Some(Family::MultipathLos) => ChannelSpec::new(FamilyName::MultipathLos),
        Some(Family::MultipathNlos) => ChannelSpec::new(FamilyName::MultipathNlos),
    };
    let scenario = generate_scenario(&cfg.scenario_params()?, seed)?;
    let pool = Pool::new(cfg.workers)?;
    let batch = synthesize(cfg, &pool, &scenario, &channel, n_sc, seed)?;
    write_scenario_csv(&out.join("scenario.csv"), &scenario)?;
    write_csi_csv(&out.join("csi.csv"), &batch)
}

fn chart(
    cfg: &ExperimentConfig,
    csi: &Path,
    algorithm: &str,
    out: &Path,
    lr: Option<(f64, f64)>,
    scenario: Option<&Path>,
    seed: u64,
) -> Result<()> {
    let alg =
        Algorithm::parse(algorithm).ok_or_else(|| ToolError::Config(format!("unknown algorithm `{algorithm}`")))?;
    let batch = read_csi_csv(csi)?;
    let first = batch.first().ok_or(chartcore::Error::EmptyInput)?;
    let records = match alg {
        Algorithm::Model(m) => {
            let mut charter = Charter::new(m, cfg.chart_settings(), first.n_rx(), first.n_sc())?;
            if m == ModelAlgorithm::Lr {
                let model = match (lr, scenario) {
                    (Some((a, b)), _) => chartcore::estimators::LrModel { a, b },
                    (None, Some(path)) => {
                        let scene = read_scenario_csv(path)?;
                        let n_fit = lr_training_count(batch.len()).min(batch.len());
                        let known: Vec<(f64, f64)> = batch[..n_fit]
                            .iter()
                            .filter(|t| t.ue_index < scene.n_ue())
                            .filter_map(|t| lr_feature(t.row(0)).ok().map(|x| (x, scene.distance(t.ue_index))))
                            .collect();
                        lr_fit(&known)?
                    }
                    (None, None) => return Err(chartcore::Error::MissingModel.into()),
                };
                charter = charter.with_lr_model(model);
            }
            let pool = Pool::new(cfg.workers)?;
            chart_records(m.name(), &pool.map(&batch, |t| charter.chart_point(t)))
        }
        Algorithm::Pca | Algorithm::Sammon => {
            let features = extract_features(&batch)?;
            let ues: Vec<usize> = batch.iter().map(|t| t.ue_index).collect();
            let points = if alg == Algorithm::Pca {
                pca_chart(&features)?
            } else {
                sammon_chart(&features, &cfg.sammon_settings(), seed)?.points
            };
            planar_records(alg.name(), &ues, &points)
        }
    };
    write_records(out, &records, &[])
}

fn evaluate(scenario: &Path, chart: &Path, ks: &[usize], out: Option<&Path>) -> Result<()> {
    let scene = read_scenario_csv(scenario)?;
    let records: Vec<ChartRecord> = read_records(chart)?;
    let mut original = Vec::new();
    let mut points = Vec::new();
    for r in &records {
        if let Some(p) = r.point() {
            if r.ue_index >= scene.n_ue() {
                return Err(ToolError::format(chart, format!("UE {} is not in the scene", r.ue_index)));
            }
            original.push(scene.ground_xy(r.ue_index));
            points.push(p);
        }
    }
    let ks = if ks.is_empty() { vec![chartcore::metrics::default_k(points.len())] } else { ks.to_vec() };
    #[derive(serde::Serialize)]
    struct Row {
        #[serde(rename = "K")]
        k: usize,
        #[serde(rename = "TW")]
        tw: f64,
        #[serde(rename = "CT")]
        ct: f64,
        n_ue: usize,
    }
    let rows: Vec<Row> = metric_curve(&original, &points, &ks)?
        .into_iter()
        .map(|m| Row { k: m.k, tw: m.tw, ct: m.ct, n_ue: points.len() })
        .collect();
    let bytes = records_to_csv(&rows, &[])?;
    match out {
        Some(p) => write_atomic(p, &bytes),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn render(scenario: Option<&Path>, chart: Option<&Path>, title: Option<String>, out: &Path) -> Result<()> {
    let scene = scenario.map(read_scenario_csv).transpose()?;
    let is_vip = |u: usize| scene.as_ref().is_some_and(|s| u < s.n_ue() && s.is_vip(u));
    let (points, vip, default_title): (Vec<[f64; 2]>, Vec<bool>, String) = match (chart, &scene) {
        (Some(c), _) => {
            let records: Vec<ChartRecord> = read_records(c)?;
            let (p, v) = records.iter().filter_map(|r| r.point().map(|p| (p, is_vip(r.ue_index)))).unzip();
            let name = records.first().map(|r| r.algorithm.clone()).unwrap_or_default();
            (p, v, name)
        }
        (None, Some(s)) => {
            let p = (0..s.n_ue()).map(|u| s.ground_xy(u)).collect();
            let v = (0..s.n_ue()).map(|u| s.is_vip(u)).collect();
            (p, v, "scene".to_owned())
        }
        (None, None) => return Err(ToolError::Config("render needs --chart or --scenario".into())),
    };
    render_chart_svg(&points, &vip, &title.unwrap_or(default_title), out)
}

fn spectrum(
    cfg: &ExperimentConfig,
    csi: &Path,
    ue: usize,
    parameter: Parameter,
    algorithm: &str,
    out: &Path,
) -> Result<()> {
    let batch = read_csi_csv(csi)?;
    let t =
        batch.iter().find(|t| t.ue_index == ue).ok_or_else(|| ToolError::format(csi, format!("UE {ue} not found")))?;
    let settings = cfg.chart_settings();
    let spec: PseudoSpectrum = match (algorithm, parameter) {
        ("MM", Parameter::Theta) => {
            music_spectrum_theta(t, settings.threshold_ratio, &SteeringTable::theta(t.n_rx())?)?
        }
        ("MM", Parameter::Rho) => {
            music_spectrum_rho(t, settings.threshold_ratio, &SteeringTable::rho(t.n_sc(), settings.delta_f)?)?
        }
        ("RS", p) => {
            let tables = RsTables::new(t.n_rx(), t.n_sc(), settings.delta_f);
            match p {
                Parameter::Theta => rs_spectrum_theta(t, &tables)?,
                Parameter::Rho => rs_spectrum_rho(t, &tables)?,
            }
        }
        (other, _) => return Err(ToolError::Config(format!("no spectrum for algorithm `{other}` (MM or RS)"))),
    };
    let rows: Vec<SpectrumRecord> =
        spec.grid.iter().zip(&spec.values).map(|(&parameter, &value)| SpectrumRecord { parameter, value }).collect();
    write_records(out, &rows, &[])
}
