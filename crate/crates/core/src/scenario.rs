//! Scene geometry: one base station with a uniform linear array and a field
//! of single-antenna UEs on the ground plane, a subset of which spells "VIP".

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::rng::{self, Domain};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Fraction of UEs drawn on the glyph (234 of 2048 in the reference scene).
pub const VIP_NUMERATOR: usize = 234;
pub const VIP_DENOMINATOR: usize = 2048;

/// Radio parameters shared by synthesis and estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub n_rx: usize,
    pub n_sc: usize,
    pub carrier_freq: f64,
    /// Element spacing in meters; half a wavelength unless overridden.
    pub antenna_spacing: f64,
    /// Spacing Δf between adjacent subcarriers, Hz.
    pub subcarrier_spacing: f64,
    pub snr_db: f64,
    pub path_loss_exponent: f64,
    /// Independent noise realizations averaged per estimate and runs per cell.
    pub n_ave: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let carrier_freq = 2.0e9;
        Self {
            n_rx: 32,
            n_sc: 32,
            carrier_freq,
            antenna_spacing: SPEED_OF_LIGHT / (2.0 * carrier_freq),
            subcarrier_spacing: 312.5e3,
            snr_db: 0.0,
            path_loss_exponent: 2.0,
            n_ave: 10,
        }
    }
}

impl SystemConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    /// Range at which the subcarrier phase progression wraps around, `c/Δf`.
    pub fn alias_range(&self) -> f64 {
        SPEED_OF_LIGHT / self.subcarrier_spacing
    }

    pub fn with_subcarriers(&self, n_sc: usize) -> Self {
        Self { n_sc, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rx < 2 {
            return Err(Error::InvalidConfig("n_rx must be at least 2"));
        }
        if self.n_sc < 1 {
            return Err(Error::InvalidConfig("n_sc must be at least 1"));
        }
        if !(self.carrier_freq > 0.0) || !(self.subcarrier_spacing > 0.0) || !(self.antenna_spacing > 0.0) {
            return Err(Error::InvalidConfig("frequencies and spacing must be positive"));
        }
        if self.snr_db.is_nan() || !self.path_loss_exponent.is_finite() {
            return Err(Error::InvalidConfig("snr and path-loss exponent must be numbers"));
        }
        if self.n_ave < 1 {
            return Err(Error::InvalidConfig("n_ave must be at least 1"));
        }
        Ok(())
    }
}

/// Where the base station sits on the scene boundary. The array axis runs
/// along that edge, so every UE lies in the array's front half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BsSite {
    /// Midpoint of the long edge `y = 0`, array along +x.
    #[default]
    LongEdge,
    /// Midpoint of the short edge `x = 0`, array along +y.
    ShortEdge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub n_ue: usize,
    /// (width along x, depth along y), meters.
    pub bounds: (f64, f64),
    pub bs_height: f64,
    pub site: BsSite,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self { n_ue: 512, bounds: (1000.0, 500.0), bs_height: 8.5, site: BsSite::LongEdge }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bs_position: [f64; 3],
    pub ue_positions: Vec<[f64; 3]>,
    /// Sorted indices of the UEs drawn on the glyph.
    pub vip_indices: Vec<usize>,
    pub bounds: (f64, f64),
    pub site: BsSite,
    pub seed: u64,
}

impl Scenario {
    pub fn n_ue(&self) -> usize {
        self.ue_positions.len()
    }

    /// Unit vector of the array axis in the ground plane.
    pub fn array_axis(&self) -> [f64; 2] {
        match self.site {
            BsSite::LongEdge => [1.0, 0.0],
            BsSite::ShortEdge => [0.0, 1.0],
        }
    }

    pub fn ground_xy(&self, ue: usize) -> [f64; 2] {
        let p = self.ue_positions[ue];
        [p[0], p[1]]
    }

    pub fn is_vip(&self, ue: usize) -> bool {
        self.vip_indices.binary_search(&ue).is_ok()
    }

    fn offset(&self, ue: usize) -> [f64; 3] {
        let p = self.ue_positions[ue];
        let b = self.bs_position;
        [p[0] - b[0], p[1] - b[1], p[2] - b[2]]
    }

    /// 3-D BS–UE distance.
    pub fn distance(&self, ue: usize) -> f64 {
        let d = self.offset(ue);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn ground_distance(&self, ue: usize) -> f64 {
        let d = self.offset(ue);
        (d[0] * d[0] + d[1] * d[1]).sqrt()
    }

    /// Angle between the array axis and the 3-D direction to the UE, degrees.
    pub fn theta_deg(&self, ue: usize) -> f64 {
        let d = self.offset(ue);
        let axis = self.array_axis();
        let cos = (d[0] * axis[0] + d[1] * axis[1]) / self.distance(ue);
        cos.clamp(-1.0, 1.0).acos().to_degrees()
    }

    /// The UE in the chart frame, `(ρ cos θ, ρ sin θ)` from true geometry.
    /// Along the axis this is the ground offset from the BS; across it the
    /// coordinate includes the BS height.
    pub fn bs_frame(&self, ue: usize) -> [f64; 2] {
        let rho = self.distance(ue);
        let theta = self.theta_deg(ue).to_radians();
        [rho * theta.cos(), rho * theta.sin()]
    }
}

/// Number of glyph UEs for a scene of `n_ue` points.
pub fn vip_count(n_ue: usize) -> usize {
    n_ue * VIP_NUMERATOR / VIP_DENOMINATOR
}

/// A thick line segment of the glyph, in glyph units (letter height 1).
#[derive(Debug, Clone, Copy)]
struct Stroke {
    from: [f64; 2],
    to: [f64; 2],
}

impl Stroke {
    fn length(&self) -> f64 {
        ((self.to[0] - self.from[0]).powi(2) + (self.to[1] - self.from[1]).powi(2)).sqrt()
    }
}

const STROKE_WIDTH: f64 = 0.12;
const GLYPH_WIDTH: f64 = 2.0;

/// "V I P" with baseline at y = 0 and cap height 1.
fn glyph_strokes() -> [Stroke; 7] {
    let s = |from, to| Stroke { from, to };
    [
        // V
        s([0.0, 1.0], [0.3, 0.0]),
        s([0.3, 0.0], [0.6, 1.0]),
        // I
        s([1.0, 0.0], [1.0, 1.0]),
        // P
        s([1.4, 0.0], [1.4, 1.0]),
        s([1.4, 1.0], [2.0, 1.0]),
        s([2.0, 1.0], [2.0, 0.5]),
        s([2.0, 0.5], [1.4, 0.5]),
    ]
}

/// Largest-remainder split of `total` points over strokes by length, with at
/// least one point per stroke.
fn allocate(strokes: &[Stroke], total: usize) -> Result<Vec<usize>> {
    if total < strokes.len() {
        return Err(Error::GlyphTooSparse);
    }
    let spare = total - strokes.len();
    let lengths: Vec<f64> = strokes.iter().map(Stroke::length).collect();
    let sum: f64 = lengths.iter().sum();
    let shares: Vec<f64> = lengths.iter().map(|l| spare as f64 * l / sum).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut left = spare - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..strokes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    Ok(counts.into_iter().map(|c| c + 1).collect())
}

/// Place `n_ue` UEs uniformly in `bounds`, with `⌊n_ue·234/2048⌋` of them
/// drawn on a "VIP" glyph centered in the scene. Indices are shuffled so the
/// glyph points are spread through the index range.
pub fn generate_scenario(params: &ScenarioParams, seed: u64) -> Result<Scenario> {
    let (width, depth) = params.bounds;
    if params.n_ue == 0 {
        return Err(Error::InvalidConfig("n_ue must be at least 1"));
    }
    if !(width > 0.0 && depth > 0.0) || !width.is_finite() || !depth.is_finite() {
        return Err(Error::InvalidConfig("bounds must be positive"));
    }
    if !(params.bs_height > 0.0) {
        return Err(Error::InvalidConfig("bs_height must be positive"));
    }
    let strokes = glyph_strokes();
    let n_vip = vip_count(params.n_ue);
    let counts = allocate(&strokes, n_vip)?;

    let mut rng = rng::stream(seed, Domain::Scenario, 0);
    let mut seen = BTreeSet::new();
    let mut points: Vec<([f64; 3], bool)> = Vec::with_capacity(params.n_ue);

    let cap = (depth / 3.0).min(0.8 * width / GLYPH_WIDTH);
    let origin = [0.5 * (width - GLYPH_WIDTH * cap), 0.5 * (depth - cap)];
    for (stroke, &count) in strokes.iter().zip(&counts) {
        let dx = stroke.to[0] - stroke.from[0];
        let dy = stroke.to[1] - stroke.from[1];
        let len = stroke.length();
        let normal = [-dy / len, dx / len];
        for _ in 0..count {
            loop {
                let t: f64 = rng.random();
                let u: f64 = rng.random::<f64>() - 0.5;
                let gx = stroke.from[0] + t * dx + u * STROKE_WIDTH * normal[0];
                let gy = stroke.from[1] + t * dy + u * STROKE_WIDTH * normal[1];
                let p = [(origin[0] + gx * cap).clamp(0.0, width), (origin[1] + gy * cap).clamp(0.0, depth), 0.0];
                if seen.insert((p[0].to_bits(), p[1].to_bits())) {
                    points.push((p, true));
                    break;
                }
            }
        }
    }
    while points.len() < params.n_ue {
        let p = [rng.random::<f64>() * width, rng.random::<f64>() * depth, 0.0];
        if seen.insert((p[0].to_bits(), p[1].to_bits())) {
            points.push((p, false));
        }
    }
    // Fisher–Yates
    for i in (1..points.len()).rev() {
        let j = rng.random_range(0..=i);
        points.swap(i, j);
    }

    let bs_position = match params.site {
        BsSite::LongEdge => [0.5 * width, 0.0, params.bs_height],
        BsSite::ShortEdge => [0.0, 0.5 * depth, params.bs_height],
    };
    let vip_indices = points.iter().enumerate().filter(|(_, p)| p.1).map(|(i, _)| i).collect();
    Ok(Scenario {
        bs_position,
        ue_positions: points.into_iter().map(|p| p.0).collect(),
        vip_indices,
        bounds: params.bounds,
        site: params.site,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scene_has_234_vip_points() {
        let params = ScenarioParams { n_ue: 2048, ..Default::default() };
        let s = generate_scenario(&params, 1).unwrap();
        assert_eq!(s.vip_indices.len(), 234);
        assert_eq!(s.n_ue(), 2048);
        assert_eq!(s.bs_position[2], 8.5);
    }

    #[test]
    fn single_ue_cannot_draw_glyph() {
        let params = ScenarioParams { n_ue: 1, bounds: (10.0, 10.0), ..Default::default() };
        assert_eq!(generate_scenario(&params, 0).unwrap_err(), Error::GlyphTooSparse);
    }

    #[test]
    fn same_seed_same_positions() {
        let params = ScenarioParams::default();
        let a = generate_scenario(&params, 42).unwrap();
        let b = generate_scenario(&params, 42).unwrap();
        let bits =
            |s: &Scenario| -> Vec<u64> { s.ue_positions.iter().flat_map(|p| p.iter().map(|x| x.to_bits())).collect() };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.vip_indices, b.vip_indices);
        let c = generate_scenario(&params, 43).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn points_inside_bounds_and_distinct() {
        for site in [BsSite::LongEdge, BsSite::ShortEdge] {
            let params = ScenarioParams { site, ..Default::default() };
            let s = generate_scenario(&params, 9).unwrap();
            let diag = (1000.0f64.powi(2) + 500.0f64.powi(2)).sqrt();
            for i in 0..s.n_ue() {
                let p = s.ue_positions[i];
                assert!(p[0] >= 0.0 && p[0] <= 1000.0 && p[1] >= 0.0 && p[1] <= 500.0);
                assert_eq!(p[2], 0.0);
                assert!(s.ground_distance(i) <= diag);
                assert!(s.distance(i) > s.ground_distance(i));
                let th = s.theta_deg(i);
                assert!((0.0..=180.0).contains(&th));
            }
            let set: BTreeSet<(u64, u64)> = s.ue_positions.iter().map(|p| (p[0].to_bits(), p[1].to_bits())).collect();
            assert_eq!(set.len(), s.n_ue());
        }
    }

    #[test]
    fn vip_fraction_near_reference() {
        for n in [512usize, 1000, 2048, 4096] {
            let frac = vip_count(n) as f64 / n as f64;
            assert!((frac - 234.0 / 2048.0).abs() < 0.02, "n={n} frac={frac}");
        }
        assert_eq!(vip_count(512), 58);
    }

    #[test]
    fn allocation_gives_every_stroke_a_point() {
        let strokes = glyph_strokes();
        let counts = allocate(&strokes, 7).unwrap();
        assert!(counts.iter().all(|&c| c == 1));
        let counts = allocate(&strokes, 234).unwrap();
        assert_eq!(counts.iter().sum::<usize>(), 234);
        assert!(allocate(&strokes, 6).is_err());
    }

    #[test]
    fn default_config_mirrors_reference_parameters() {
        let cfg = SystemConfig::default();
        assert_eq!(cfg.n_rx, 32);
        assert!((cfg.antenna_spacing - 0.07495).abs() < 1e-5);
        assert_eq!(cfg.subcarrier_spacing, 312.5e3);
        assert!((cfg.alias_range() - 959.34).abs() < 0.01);
        cfg.validate().unwrap();
    }
}
