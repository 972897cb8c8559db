//! CSV file formats. Every writer goes through a temporary file and a rename.

use std::fs;
use std::io::Write;
use std::path::Path;

use chartcore::channel::CsiTensor;
use chartcore::estimators::ChartOutcome;
use chartcore::numerics::ComplexMatrix;
use chartcore::scenario::{BsSite, Scenario};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

/// Write `bytes` to `path` via a sibling temporary file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let result = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(ToolError::io(path, e));
    }
    fs::rename(&tmp, path).map_err(|e| ToolError::io(path, e))
}

/// Serialize records as CSV, preceded by `# `-prefixed comment lines.
pub fn records_to_csv<T: Serialize>(records: &[T], comments: &[String]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for c in comments {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| ToolError::csv("<buffer>", e))?;
    }
    w.into_inner().map_err(|e| ToolError::format("<buffer>", e.to_string()))
}

pub fn write_records<T: Serialize>(path: &Path, records: &[T], comments: &[String]) -> Result<()> {
    write_atomic(path, &records_to_csv(records, comments)?)
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| ToolError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(std::io::BufReader::new(file));
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| ToolError::csv(path, e))
}

fn comment_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    Ok(text.lines().filter_map(|l| l.strip_prefix("# ")).map(str::to_owned).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeRecord {
    pub ue_index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vip: u8,
}

pub fn site_name(site: BsSite) -> &'static str {
    match site {
        BsSite::LongEdge => "long-edge",
        BsSite::ShortEdge => "short-edge",
    }
}

pub fn parse_site(s: &str) -> Option<BsSite> {
    match s {
        "long-edge" => Some(BsSite::LongEdge),
        "short-edge" => Some(BsSite::ShortEdge),
        _ => None,
    }
}

/// Scene CSV: comment header with BS position, bounds, site and seed, then
/// one row per UE.
pub fn write_scenario_csv(path: &Path, s: &Scenario) -> Result<()> {
    let b = s.bs_position;
    let comments = vec![
        format!("bs,{},{},{}", b[0], b[1], b[2]),
        format!("bounds,{},{}", s.bounds.0, s.bounds.1),
        format!("site,{}", site_name(s.site)),
        format!("seed,{}", s.seed),
    ];
    let rows: Vec<UeRecord> = s
        .ue_positions
        .iter()
        .enumerate()
        .map(|(i, p)| UeRecord { ue_index: i, x: p[0], y: p[1], z: p[2], vip: s.is_vip(i) as u8 })
        .collect();
    write_records(path, &rows, &comments)
}

pub fn read_scenario_csv(path: &Path) -> Result<Scenario> {
    let bad = |m: &str| ToolError::format(path, m.to_owned());
    let mut bs = None;
    let mut bounds = None;
    let mut site = None;
    let mut seed = None;
    for line in comment_lines(path)? {
        let parts: Vec<&str> = line.split(',').collect();
        let num = |i: usize| parts.get(i).and_then(|v| v.trim().parse::<f64>().ok());
        match parts[0] {
            "bs" => bs = Some([num(1), num(2), num(3)]),
            "bounds" => bounds = Some((num(1), num(2))),
            "site" => site = parts.get(1).and_then(|s| parse_site(s.trim())),
            "seed" => seed = parts.get(1).and_then(|s| s.trim().parse::<u64>().ok()),
            _ => {}
        }
    }
    let bs = match bs {
        Some([Some(x), Some(y), Some(z)]) => [x, y, z],
        _ => return Err(bad("missing or malformed `# bs` header")),
    };
    let bounds = match bounds {
        Some((Some(w), Some(d))) => (w, d),
        _ => return Err(bad("missing or malformed `# bounds` header")),
    };
    let mut rows: Vec<UeRecord> = read_records(path)?;
    rows.sort_by_key(|r| r.ue_index);
    if rows.iter().enumerate().any(|(i, r)| r.ue_index != i) {
        return Err(bad("ue_index values must be 0..N without gaps"));
    }
    Ok(Scenario {
        bs_position: bs,
        ue_positions: rows.iter().map(|r| [r.x, r.y, r.z]).collect(),
        vip_indices: rows.iter().filter(|r| r.vip != 0).map(|r| r.ue_index).collect(),
        bounds,
        site: site.ok_or_else(|| bad("missing or unknown `# site` header"))?,
        seed: seed.unwrap_or(0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsiRecord {
    pub ue_index: usize,
    pub subcarrier: usize,
    pub antenna: usize,
    pub re: f64,
    pub im: f64,
}

pub fn csi_records(batch: &[CsiTensor]) -> Vec<CsiRecord> {
    let mut rows = Vec::new();
    for t in batch {
        for s in 0..t.n_sc() {
            for (a, h) in t.row(s).iter().enumerate() {
                rows.push(CsiRecord { ue_index: t.ue_index, subcarrier: s, antenna: a, re: h.re, im: h.im });
            }
        }
    }
    rows
}

pub fn write_csi_csv(path: &Path, batch: &[CsiTensor]) -> Result<()> {
    write_records(path, &csi_records(batch), &[])
}

/// Rebuild tensors from CSI rows; every UE must have the same complete shape.
pub fn tensors_from_records(path: &Path, rows: &[CsiRecord]) -> Result<Vec<CsiTensor>> {
    let bad = |m: String| ToolError::format(path, m);
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let n_sc = rows.iter().map(|r| r.subcarrier).max().unwrap_or(0) + 1;
    let n_rx = rows.iter().map(|r| r.antenna).max().unwrap_or(0) + 1;
    let mut by_ue: std::collections::BTreeMap<usize, Vec<Option<Complex64>>> = Default::default();
    for r in rows {
        let cells = by_ue.entry(r.ue_index).or_insert_with(|| vec![None; n_sc * n_rx]);
        let slot = &mut cells[r.subcarrier * n_rx + r.antenna];
        if slot.is_some() {
            return Err(bad(format!("duplicate entry for UE {} ({}, {})", r.ue_index, r.subcarrier, r.antenna)));
        }
        *slot = Some(Complex64::new(r.re, r.im));
    }
    by_ue
        .into_iter()
        .map(|(ue, cells)| {
            let data: Option<Vec<Complex64>> = cells.into_iter().collect();
            let data = data.ok_or_else(|| bad(format!("UE {ue} is missing entries of a {n_sc}×{n_rx} tensor")))?;
            Ok(CsiTensor::new(ue, ComplexMatrix::from_vec(n_sc, n_rx, data)?))
        })
        .collect()
}

pub fn read_csi_csv(path: &Path) -> Result<Vec<CsiTensor>> {
    let rows: Vec<CsiRecord> = read_records(path)?;
    tensors_from_records(path, &rows)
}

/// One chart point; estimate fields are empty when `error_flag` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub ue_index: usize,
    pub theta_deg: Option<f64>,
    pub rho_m: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub algorithm: String,
    pub error_flag: String,
}

impl ChartRecord {
    pub fn point(&self) -> Option<[f64; 2]> {
        match (self.x, self.y, self.error_flag.is_empty()) {
            (Some(x), Some(y), true) => Some([x, y]),
            _ => None,
        }
    }
}

pub fn chart_records(algorithm: &str, outcomes: &[ChartOutcome]) -> Vec<ChartRecord> {
    outcomes
        .iter()
        .map(|o| match &o.result {
            Ok(p) => ChartRecord {
                ue_index: o.ue_index,
                theta_deg: Some(p.theta_deg),
                rho_m: Some(p.rho_m),
                x: Some(p.x),
                y: Some(p.y),
                algorithm: algorithm.to_owned(),
                error_flag: String::new(),
            },
            Err(e) => ChartRecord {
                ue_index: o.ue_index,
                theta_deg: None,
                rho_m: None,
                x: None,
                y: None,
                algorithm: algorithm.to_owned(),
                error_flag: e.kind().to_owned(),
            },
        })
        .collect()
}

/// Records for embeddings that have no polar form.
pub fn planar_records(algorithm: &str, ue_indices: &[usize], points: &[[f64; 2]]) -> Vec<ChartRecord> {
    ue_indices
        .iter()
        .zip(points)
        .map(|(&ue_index, p)| ChartRecord {
            ue_index,
            theta_deg: None,
            rho_m: None,
            x: Some(p[0]),
            y: Some(p[1]),
            algorithm: algorithm.to_owned(),
            error_flag: String::new(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub algorithm: String,
    pub channel: String,
    pub n_sc: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "TW")]
    pub tw: f64,
    #[serde(rename = "CT")]
    pub ct: f64,
    pub n_ue: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub algorithm: String,
    pub channel: String,
    pub n_sc: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub runs: usize,
    pub tw_mean: f64,
    pub tw_std: f64,
    pub ct_mean: f64,
    pub ct_std: f64,
    pub n_ue: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub algorithm: String,
    pub channel: String,
    pub n_sc: usize,
    pub runs: usize,
    pub seconds_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRecord {
    pub algorithm: String,
    pub channel: String,
    pub n_sc: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub parameter: f64,
    pub value: f64,
}
