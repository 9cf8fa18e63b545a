//! Run configuration file (TOML). Angles are degrees, everything else SI.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::efficiency::{ETA_S_ETA_T_FULL, ETA_S_ETA_T_RIM};
use crate::farfield::{CutSpec, Direction};
use crate::feed::FeedModel;
use crate::geometry::{DishConfig, Polarization};
use crate::model::ModelOptions;
use crate::nullsteer::NullSpec;
use crate::scattering::{DyadSource, DyadTable, SwitchState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dish: DishSection,
    #[serde(default)]
    pub feed: FeedSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub dyads: DyadSection,
    pub null: Option<NullSection>,
    #[serde(default)]
    pub pattern: PatternSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub efficiency: EfficiencySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DishSection {
    pub diameter_m: f64,
    /// Diameter of the solid part; defaults to `diameter_m` (no annulus).
    pub reflector_diameter_m: Option<f64>,
    pub focal_length_m: f64,
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedSection {
    pub q: f64,
    pub e0: f64,
    pub e0_phase_deg: f64,
    pub polarization: Polarization,
    pub model: FeedModel,
}

impl Default for FeedSection {
    fn default() -> Self {
        FeedSection {
            q: 1.14,
            e0: 1.0,
            e0_phase_deg: 0.0,
            polarization: Polarization::Y,
            model: FeedModel::Projected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub samples_per_wavelength: f64,
}

impl Default for MeshSection {
    fn default() -> Self {
        MeshSection {
            samples_per_wavelength: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DyadKind {
    Pec,
    Ideal,
    #[default]
    Ruc,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DyadSection {
    pub source: DyadKind,
    /// CSV dyad table, required when `source = "table"`.
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullSection {
    pub theta_z_deg: f64,
    pub phi_deg: f64,
    #[serde(default = "default_states")]
    pub states: Vec<SwitchState>,
}

fn default_states() -> Vec<SwitchState> {
    SwitchState::BOTH.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatternSection {
    /// Cut azimuth; defaults to the null azimuth when a null is set.
    pub phi_deg: Option<f64>,
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
    /// Extra `(theta_z, phi)` directions reported in the summary.
    pub probes_deg: Vec<[f64; 2]>,
}

impl Default for PatternSection {
    fn default() -> Self {
        PatternSection {
            phi_deg: None,
            start_deg: -8.0,
            stop_deg: 8.0,
            step_deg: 0.02,
            probes_deg: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub theta_z_deg: Vec<f64>,
    pub phi_deg: Vec<f64>,
    /// Grid points computed per streamed batch; defaults to 4 per worker.
    pub batch: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EfficiencySection {
    pub eta_s_eta_t_full: f64,
    pub eta_s_eta_t_rim: f64,
}

impl Default for EfficiencySection {
    fn default() -> Self {
        EfficiencySection {
            eta_s_eta_t_full: ETA_S_ETA_T_FULL,
            eta_s_eta_t_rim: ETA_S_ETA_T_RIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: PathBuf::from("out"),
            svg: true,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite, got {v}")))
    }
}

fn theta_in_range(field: &str, v: f64) -> Result<()> {
    if (0.0..=90.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in [0, 90] degrees, got {v}")))
    }
}

impl RunConfig {
    /// Reads, parses and validates a config file. Relative table paths are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::parse(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })?;
        if let (Some(t), Some(dir)) = (cfg.dyads.table.as_mut(), path.parent()) {
            if t.is_relative() {
                *t = dir.join(&*t);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::parse("<config>", e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dish;
        positive("dish.diameter_m", d.diameter_m)?;
        positive("dish.focal_length_m", d.focal_length_m)?;
        positive("dish.frequency_hz", d.frequency_hz)?;
        if let Some(d0) = d.reflector_diameter_m {
            positive("dish.reflector_diameter_m", d0)?;
            if d0 > d.diameter_m {
                return Err(Error::config(
                    "dish.reflector_diameter_m",
                    format!("{d0} exceeds dish.diameter_m = {}", d.diameter_m),
                ));
            }
        }
        positive("feed.q", self.feed.q)?;
        positive("feed.e0", self.feed.e0)?;
        finite("feed.e0_phase_deg", self.feed.e0_phase_deg)?;
        let spw = self.mesh.samples_per_wavelength;
        if !(spw >= 2.0 && spw.is_finite()) {
            return Err(Error::config(
                "mesh.samples_per_wavelength",
                format!("must be at least 2, got {spw}"),
            ));
        }
        if self.dyads.source == DyadKind::Table && self.dyads.table.is_none() {
            return Err(Error::config("dyads.table", "required when dyads.source = \"table\""));
        }
        if let Some(n) = &self.null {
            theta_in_range("null.theta_z_deg", n.theta_z_deg)?;
            finite("null.phi_deg", n.phi_deg)?;
            if n.states.is_empty() {
                return Err(Error::config("null.states", "must list at least one state"));
            }
        }
        let p = &self.pattern;
        if let Some(phi) = p.phi_deg {
            finite("pattern.phi_deg", phi)?;
        }
        finite("pattern.start_deg", p.start_deg)?;
        finite("pattern.stop_deg", p.stop_deg)?;
        positive("pattern.step_deg", p.step_deg)?;
        if p.stop_deg < p.start_deg {
            return Err(Error::config("pattern.stop_deg", "must not be below pattern.start_deg"));
        }
        if p.start_deg.abs() > 180.0 || p.stop_deg.abs() > 180.0 {
            return Err(Error::config(
                "pattern.start_deg",
                "cut limits must lie within ±180 degrees",
            ));
        }
        for (i, pr) in p.probes_deg.iter().enumerate() {
            let field = format!("pattern.probes_deg[{i}]");
            if !(0.0..=180.0).contains(&pr[0]) || !pr[1].is_finite() {
                return Err(Error::config(&field, format!("invalid direction {pr:?}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.theta_z_deg.is_empty() {
                return Err(Error::config("sweep.theta_z_deg", "grid must not be empty"));
            }
            if s.phi_deg.is_empty() {
                return Err(Error::config("sweep.phi_deg", "grid must not be empty"));
            }
            for &t in &s.theta_z_deg {
                theta_in_range("sweep.theta_z_deg", t)?;
            }
            for &p in &s.phi_deg {
                finite("sweep.phi_deg", p)?;
            }
            if s.batch == Some(0) {
                return Err(Error::config("sweep.batch", "must be at least 1"));
            }
        }
        for (field, v) in [
            ("efficiency.eta_s_eta_t_full", self.efficiency.eta_s_eta_t_full),
            ("efficiency.eta_s_eta_t_rim", self.efficiency.eta_s_eta_t_rim),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(field, format!("must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }

    pub fn dish_config(&self) -> Result<DishConfig> {
        let d = &self.dish;
        DishConfig::new(
            d.diameter_m,
            d.reflector_diameter_m.unwrap_or(d.diameter_m),
            d.focal_length_m,
            d.frequency_hz,
            self.feed.q,
            self.feed.polarization,
        )
        .map_err(|e| Error::config("dish", e.to_string()))
    }

    pub fn model_options(&self) -> ModelOptions {
        ModelOptions {
            samples_per_wavelength: self.mesh.samples_per_wavelength,
            feed_model: self.feed.model,
            feed_amplitude: Complex64::from_polar(self.feed.e0, self.feed.e0_phase_deg.to_radians()),
        }
    }

    pub fn dyad_source(&self) -> Result<DyadSource> {
        Ok(match self.dyads.source {
            DyadKind::Pec => DyadSource::Pec,
            DyadKind::Ideal => DyadSource::IdealOneBit,
            DyadKind::Ruc => DyadSource::RucTable2,
            DyadKind::Table => {
                let path = self
                    .dyads
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::config("dyads.table", "missing"))?;
                DyadSource::UserTable(DyadTable::from_csv_path(path)?)
            }
        })
    }

    pub fn null_spec(&self) -> Result<Option<NullSpec>> {
        self.null
            .as_ref()
            .map(|n| {
                NullSpec::with_states(Direction::from_degrees(n.theta_z_deg, n.phi_deg), n.states.clone())
                    .map_err(|e| Error::config("null", e.to_string()))
            })
            .transpose()
    }

    pub fn require_null(&self) -> Result<NullSpec> {
        self.null_spec()?
            .ok_or_else(|| Error::config("null", "a [null] section is required for this command"))
    }

    /// Cut azimuth: explicit, else the null azimuth, else 0 (H-plane for y-pol).
    pub fn cut(&self) -> CutSpec {
        let p = &self.pattern;
        let phi = p.phi_deg.or(self.null.as_ref().map(|n| n.phi_deg)).unwrap_or(0.0);
        CutSpec::from_degrees(phi, p.start_deg, p.stop_deg, p.step_deg)
    }

    pub fn probes(&self) -> Vec<Direction> {
        let mut out: Vec<Direction> = self
            .null
            .iter()
            .map(|n| Direction::from_degrees(n.theta_z_deg, n.phi_deg))
            .collect();
        out.extend(
            self.pattern
                .probes_deg
                .iter()
                .map(|p| Direction::from_degrees(p[0], p[1])),
        );
        out
    }
}
