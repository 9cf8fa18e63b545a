//! End-to-end runs shared by the CLI subcommands: build models, design or
//! replay a switch map, evaluate the pattern and assemble the summary.

use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::efficiency::EfficiencyReport;
use crate::farfield::{self, CutSpec, Direction, FarFieldResult, Lobe};
use crate::geometry;
use crate::model::{CellAssignment, ImsModel};
use crate::nullsteer::{self, NullSpec, SwitchConfig};
use crate::output::{self, PatternRow, Provenance, StateRow};
use crate::scattering::{DyadSource, SwitchState};
use crate::svg;
use crate::{Error, Result};

/// Note written to the summary whenever the ideal ±j dyads are used.
pub const IDEAL_MODE_NOTE: &str = "ideal +j/-j dyads stand in for the variable-patch fixed reflectarray; \
its synthesized patch phases are not modelled, so directivity differs from a fixed design by a few tenths of a dB";

#[derive(Debug, Clone, Serialize)]
pub struct SummaryNull {
    pub theta_z_deg: f64,
    pub phi_deg: f64,
    pub d_co_db: f64,
    pub d_cr_db: f64,
    pub reference_d_co_db: f64,
    pub null_depth_db: f64,
    pub residual_re: f64,
    pub residual_im: f64,
    pub residual_abs: f64,
    pub on_cells: usize,
    pub off_cells: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryLobe {
    pub theta_z_deg: f64,
    pub level_db: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryProbe {
    pub theta_z_deg: f64,
    pub phi_deg: f64,
    pub d_co_db: f64,
    pub d_cr_db: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub dyad_source: String,
    pub diameter_m: f64,
    pub reflector_diameter_m: f64,
    pub rim_angle_deg: f64,
    pub boundary_angle_deg: f64,
    pub reflector_samples: usize,
    pub rings: usize,
    pub cells: usize,
    pub p_rad_w: f64,
    pub peak_directivity_db: f64,
    pub peak_theta_z_deg: f64,
    pub peak_phi_deg: f64,
    pub cut_phi_deg: f64,
    pub notes: Vec<String>,
    pub efficiency: EfficiencyReport,
    pub null: Option<SummaryNull>,
    pub sidelobes: Vec<SummaryLobe>,
    pub probes: Vec<SummaryProbe>,
}

pub struct RunOutput {
    pub provenance: Provenance,
    pub summary: RunSummary,
    pub cut: CutSpec,
    pub pattern: FarFieldResult,
    pub sidelobes: Vec<Lobe>,
    pub model: ImsModel,
    pub design: Option<SwitchConfig>,
    pub states: Option<Vec<SwitchState>>,
}

impl RunOutput {
    pub fn pattern_rows(&self) -> Vec<PatternRow> {
        self.pattern
            .samples
            .iter()
            .map(|s| PatternRow::from_sample(s, self.cut.phi))
            .collect()
    }

    pub fn state_rows(&self) -> Option<Vec<StateRow>> {
        self.states.as_ref().map(|s| output::state_rows(self.model.cells(), s))
    }

    /// Writes pattern, states, summary and (optionally) SVG files to `dir`.
    pub fn write(&self, dir: &Path, svg_plots: bool) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let rows = self.pattern_rows();
        output::write_csv(&dir.join("pattern.csv"), &self.provenance, &[], &rows)?;
        if svg_plots {
            let title = format!(
                "{}: co/cross directivity, phi = {:.1} deg",
                self.summary.command, self.summary.cut_phi_deg
            );
            write_text(&dir.join("pattern.svg"), &svg::cut_plot(&rows, &title))?;
        }
        if let Some(states) = self.state_rows() {
            output::write_csv(&dir.join("states.csv"), &self.provenance, &[], &states)?;
            if svg_plots {
                write_text(
                    &dir.join("states.svg"),
                    &svg::state_map(&states, "switch states (dark = on)"),
                )?;
            }
        }
        output::write_summary(&dir.join("summary.toml"), &self.provenance, &self.summary)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Solid full-diameter PEC dish.
pub fn reference(cfg: &RunConfig) -> Result<RunOutput> {
    let dish = cfg.dish_config()?;
    let model = ImsModel::reference(&dish, cfg.model_options())?;
    evaluate(cfg, "reference", model, None, None, None)
}

/// Serial-search design for the configured null.
pub fn design(cfg: &RunConfig) -> Result<RunOutput> {
    let null = cfg.require_null()?;
    let dish = cfg.dish_config()?;
    let model = ImsModel::build(dish.clone(), cfg.dyad_source()?, cfg.model_options())?;
    let reference = ImsModel::reference(&dish, cfg.model_options())?;
    let switch = nullsteer::design(&model, &null)?;
    let states = switch.states.clone();
    evaluate(
        cfg,
        "design",
        model,
        Some(&reference),
        Some(switch),
        Some((null, states)),
    )
}

/// Replays a stored switch map.
pub fn replay(cfg: &RunConfig, rows: &[StateRow]) -> Result<RunOutput> {
    let dish = cfg.dish_config()?;
    let model = ImsModel::build(dish.clone(), cfg.dyad_source()?, cfg.model_options())?;
    let states = output::states_for_cells(model.cells(), rows)?;
    let reference = ImsModel::reference(&dish, cfg.model_options())?;
    let null = cfg.null_spec()?;
    match null {
        Some(n) => evaluate(cfg, "pattern", model, Some(&reference), None, Some((n, states))),
        None => {
            let mut out = evaluate_states(cfg, "pattern", model, &states)?;
            out.states = Some(states);
            Ok(out)
        }
    }
}

fn evaluate_states(cfg: &RunConfig, command: &str, model: ImsModel, states: &[SwitchState]) -> Result<RunOutput> {
    let assignment = nullsteer::apply_states(&model, states)?;
    finish(cfg, command, model, assignment, None, None, None)
}

fn evaluate(
    cfg: &RunConfig,
    command: &str,
    model: ImsModel,
    reference: Option<&ImsModel>,
    switch: Option<SwitchConfig>,
    null: Option<(NullSpec, Vec<SwitchState>)>,
) -> Result<RunOutput> {
    let assignment = match &null {
        Some((_, states)) => nullsteer::apply_states(&model, states)?,
        None => model.uniform_assignment(crate::scattering::ReflectionDyad::pec()),
    };
    finish(cfg, command, model, assignment, reference, switch, null)
}

fn finish(
    cfg: &RunConfig,
    command: &str,
    model: ImsModel,
    assignment: CellAssignment,
    reference: Option<&ImsModel>,
    switch: Option<SwitchConfig>,
    null: Option<(NullSpec, Vec<SwitchState>)>,
) -> Result<RunOutput> {
    let dish = model.dish().clone();
    let pol = model.polarization();
    let sources = model.sources(&assignment)?;
    let cut = cfg.cut();
    let probes = cfg.probes();
    let mut pattern = farfield::pattern_cut(&sources, pol, model.p_rad(), &cut, &probes)?;
    let (peak_dir, peak) = farfield::peak_search(&sources, pol, model.p_rad())?;
    if peak >= pattern.summary.peak_directivity {
        pattern.summary.peak_directivity = peak;
        pattern.summary.peak_direction = peak_dir;
    }
    let sidelobes = farfield::sidelobes(&pattern.samples);
    let e_r = model.radiation_efficiency(&assignment)?;
    let has_rim = !model.cells().is_empty() && !matches!(model.dyads(), DyadSource::Pec);
    let eta = if has_rim {
        cfg.efficiency.eta_s_eta_t_rim
    } else {
        cfg.efficiency.eta_s_eta_t_full
    };
    let efficiency = EfficiencyReport::new(e_r, eta, dish.diameter(), dish.wavelength());

    let mut notes = Vec::new();
    if matches!(model.dyads(), DyadSource::IdealOneBit) {
        notes.push(IDEAL_MODE_NOTE.to_string());
    }

    let null_summary = match &null {
        Some((spec, states)) => {
            let dir = spec.direction;
            let (co, cr) = farfield::co_cross(farfield::radiate(&sources, dir)?, dir, pol);
            let d_co = farfield::directivity(co, model.p_rad())?;
            let reference_d_co = match reference {
                Some(r) => {
                    let (rc, _) = farfield::co_cross(farfield::radiate(r.reflector_sources(), dir)?, dir, pol);
                    farfield::directivity(rc, r.p_rad())?
                }
                None => f64::NAN,
            };
            let on = states.iter().filter(|&&s| s == SwitchState::On).count();
            Some(SummaryNull {
                theta_z_deg: dir.theta_z.to_degrees(),
                phi_deg: dir.phi.to_degrees(),
                d_co_db: d_co,
                d_cr_db: farfield::directivity(cr, model.p_rad())?,
                reference_d_co_db: reference_d_co,
                null_depth_db: reference_d_co - d_co,
                residual_re: co.re,
                residual_im: co.im,
                residual_abs: co.norm(),
                on_cells: on,
                off_cells: states.len() - on,
            })
        }
        None => None,
    };

    let provenance = Provenance::new(
        &cfg.hash(),
        model.options().samples_per_wavelength,
        model.reflector().len(),
        model.cells().len(),
    );
    let summary = RunSummary {
        command: command.to_string(),
        version: crate::VERSION.to_string(),
        config_hash: provenance.config_hash.clone(),
        dyad_source: model.dyads().name().to_string(),
        diameter_m: dish.diameter(),
        reflector_diameter_m: dish.reflector_diameter(),
        rim_angle_deg: dish.rim_angle().to_degrees(),
        boundary_angle_deg: dish.boundary_angle().to_degrees(),
        reflector_samples: model.reflector().len(),
        rings: geometry::ring_count(model.cells()),
        cells: model.cells().len(),
        p_rad_w: model.p_rad(),
        peak_directivity_db: pattern.summary.peak_directivity,
        peak_theta_z_deg: pattern.summary.peak_direction.theta_z.to_degrees(),
        peak_phi_deg: pattern.summary.peak_direction.phi.to_degrees(),
        cut_phi_deg: cut.phi.to_degrees(),
        notes,
        efficiency,
        null: null_summary,
        sidelobes: sidelobes
            .iter()
            .map(|l| SummaryLobe {
                theta_z_deg: l.angle.to_degrees(),
                level_db: l.level_db,
            })
            .collect(),
        probes: pattern
            .summary
            .probes
            .iter()
            .map(|p| SummaryProbe {
                theta_z_deg: p.direction.theta_z.to_degrees(),
                phi_deg: p.direction.phi.to_degrees(),
                d_co_db: p.d_co,
                d_cr_db: p.d_cr,
            })
            .collect(),
    };
    Ok(RunOutput {
        provenance,
        summary,
        cut,
        pattern,
        sidelobes,
        model,
        states: null.map(|(_, s)| s),
        design: switch,
    })
}

/// Directivity of `sources` toward `dir` for the model's polarization.
pub fn co_directivity(model: &ImsModel, sources: &farfield::SourceSet, dir: Direction) -> Result<f64> {
    let (co, _) = farfield::co_cross(farfield::radiate(sources, dir)?, dir, model.polarization());
    farfield::directivity(co, model.p_rad())
}
