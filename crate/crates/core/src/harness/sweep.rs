//! Scan success of rendered codes under occlusion, warping and tilt.

use std::collections::BTreeMap;
use std::io::Write;

use rand::distr::{Alphanumeric, SampleString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distort::{occlude, perspective, warp_image, OcclusionSpec, PerspectiveSpec, WarpSpec};
use crate::bittree::Scheme;
use crate::error::{invalid, Result};
use crate::framing::{build_code_tree, RedundancyLevel};
use crate::geometry::Polygon;
use crate::packer::{pack_auto, rasterize, ClaycodeDocument, Style};
use crate::raster::RasterImage;
use crate::scanner::{scan, ScanParams};

/// A rendered code and the message it carries.
#[derive(Debug, Clone)]
pub struct CodeSample {
    pub message: String,
    pub redundancy: RedundancyLevel,
    pub document: ClaycodeDocument,
    pub image: RasterImage,
}

impl CodeSample {
    pub fn render(message: &str, redundancy: RedundancyLevel, style: &Style, size: usize) -> Result<Self> {
        let tree = build_code_tree(message, redundancy, Scheme::Squares)?;
        let document = pack_auto(&tree, &Polygon::unit_square(), style)?;
        let image = rasterize(&document, size, size);
        Ok(Self { message: message.to_string(), redundancy, document, image })
    }
}

/// Random alphanumeric text of the given length.
pub fn random_message<R: Rng + ?Sized>(len: usize, rng: &mut R) -> String {
    Alphanumeric.sample_string(rng, len)
}

/// One distortion setting, applied as perspective ∘ warp ∘ occlusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: usize,
    pub warp: WarpSpec,
    pub occlusion: Option<OcclusionSpec>,
    pub perspective: Option<PerspectiveSpec>,
    /// Seeds the wave phase.
    pub seed: u64,
}

impl Scenario {
    pub fn identity(id: usize) -> Self {
        Self { id, warp: WarpSpec { omega: 0.0, nu_x: 1.0, nu_y: 1.0 }, occlusion: None, perspective: None, seed: 0 }
    }

    pub fn apply(&self, img: &RasterImage) -> Result<RasterImage> {
        let mut out = match &self.occlusion {
            Some(o) => occlude(img, o)?,
            None => img.clone(),
        };
        out = warp_image(&out, &self.warp, &mut ChaCha8Rng::seed_from_u64(self.seed));
        if let Some(p) = &self.perspective {
            out = perspective(&out, p);
        }
        Ok(out)
    }

    pub fn psi(&self) -> f64 {
        self.occlusion.map_or(0.0, |o| o.psi)
    }
}

/// The three robustness experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// ω from 0.1 to 1 in steps of 0.1, no occlusion.
    Deformation,
    /// ψ ∈ {0.01, 0.04, 0.09, 0.16, 0.25}, no deformation.
    Occlusion,
    /// The occlusion sweep at ω = 0.2.
    Combined,
}

pub const OCCLUSION_LEVELS: [f64; 5] = [0.01, 0.04, 0.09, 0.16, 0.25];

/// `per_value` random scenarios for every swept value of the experiment.
pub fn experiment_scenarios(experiment: Experiment, per_value: usize, size: usize, tilt: bool, seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let settings: Vec<(f64, f64)> = match experiment {
        Experiment::Deformation => (1..=10).map(|i| (i as f64 / 10.0, 0.0)).collect(),
        Experiment::Occlusion => OCCLUSION_LEVELS.iter().map(|&p| (0.0, p)).collect(),
        Experiment::Combined => OCCLUSION_LEVELS.iter().map(|&p| (0.2, p)).collect(),
    };
    let mut out = Vec::new();
    for (omega, psi) in settings {
        for _ in 0..per_value {
            let warp = WarpSpec::random(omega, &mut rng).expect("swept omega is valid");
            let occlusion = (psi > 0.0).then(|| OcclusionSpec::random(psi, size, size, &mut rng));
            let perspective = tilt.then(|| PerspectiveSpec::random(&mut rng));
            out.push(Scenario { id: out.len(), warp, occlusion, perspective, seed: rng.random() });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub code: usize,
    pub redundancy: u32,
    pub scenario: usize,
    pub omega: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    pub psi: f64,
    pub rho_x: f64,
    pub rho_y: f64,
    pub phi_x: f64,
    pub phi_y: f64,
    pub seed: u64,
    pub success: bool,
}

/// Scans every code under every scenario. A scan succeeds when it returns
/// exactly the encoded message.
pub fn robustness_sweep(codes: &[CodeSample], scenarios: &[Scenario], params: &ScanParams) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, &Scenario)> = (0..codes.len()).flat_map(|c| scenarios.iter().map(move |s| (c, s))).collect();
    jobs.par_iter()
        .map(|&(c, s)| {
            let code = &codes[c];
            let found = scan(&s.apply(&code.image)?, params, Scheme::Squares);
            let success = found.len() == 1 && found.contains(&code.message);
            Ok(SweepRow {
                code: c,
                redundancy: code.redundancy.copies(),
                scenario: s.id,
                omega: s.warp.omega,
                nu_x: s.warp.nu_x,
                nu_y: s.warp.nu_y,
                psi: s.psi(),
                rho_x: s.occlusion.map_or(0.0, |o| o.rho_x),
                rho_y: s.occlusion.map_or(0.0, |o| o.rho_y),
                phi_x: s.perspective.map_or(0.0, |p| p.phi_x()),
                phi_y: s.perspective.map_or(0.0, |p| p.phi_y()),
                seed: s.seed,
                success,
            })
        })
        .collect()
}

/// Success counts keyed by `(redundancy, omega, psi)`, rounded to 0.01.
pub fn success_table(rows: &[SweepRow]) -> BTreeMap<(u32, i64, i64), (usize, usize)> {
    let mut table = BTreeMap::new();
    for r in rows {
        let key = (r.redundancy, (r.omega * 100.0).round() as i64, (r.psi * 100.0).round() as i64);
        let entry = table.entry(key).or_insert((0, 0));
        entry.0 += r.success as usize;
        entry.1 += 1;
    }
    table
}

/// Settings for a full sweep run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    /// Codes per redundancy level.
    pub codes: usize,
    pub message_length: usize,
    pub redundancy: Vec<u32>,
    pub per_value: usize,
    pub size: usize,
    pub tilt: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Deformation,
            codes: 6,
            message_length: 8,
            redundancy: vec![1, 2],
            per_value: 1,
            size: 1024,
            tilt: false,
            seed: 0,
        }
    }
}

pub fn run_sweep(cfg: &SweepConfig, style: &Style, params: &ScanParams) -> Result<Vec<SweepRow>> {
    if cfg.codes == 0 || cfg.message_length == 0 || cfg.size < 64 {
        return Err(invalid("sweep needs codes, a message length and a size of at least 64"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut specs = Vec::new();
    for &r in &cfg.redundancy {
        let level = RedundancyLevel::new(r)?;
        for _ in 0..cfg.codes {
            specs.push((random_message(cfg.message_length, &mut rng), level, rng.random::<u64>()));
        }
    }
    let codes: Vec<CodeSample> = specs
        .par_iter()
        .map(|(msg, level, seed)| CodeSample::render(msg, *level, &Style { seed: *seed, ..style.clone() }, cfg.size))
        .collect::<Result<_>>()?;
    let scenarios = experiment_scenarios(cfg.experiment, cfg.per_value, cfg.size, cfg.tilt, rng.random());
    robustness_sweep(&codes, &scenarios, params)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| invalid(format!("csv: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}
