//! Null-direction sweeps: one serial-search design per grid point, run in
//! parallel across points and streamed to the caller in grid order.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::farfield::{self, Direction};
use crate::model::ImsModel;
use crate::nullsteer::{self, NullSpec};
use crate::output::{self, Checkpoint, Provenance, SweepRow, SweepWriter};
use crate::parallel;
use crate::scattering::SwitchState;
use crate::{Error, Result};

/// Null directions, `theta_z` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub points: Vec<Direction>,
}

impl SweepGrid {
    pub fn from_degrees(theta_z_deg: &[f64], phi_deg: &[f64]) -> Result<Self> {
        if theta_z_deg.is_empty() || phi_deg.is_empty() {
            return Err(Error::Domain("sweep grid is empty".into()));
        }
        let points = phi_deg
            .iter()
            .flat_map(|&p| theta_z_deg.iter().map(move |&t| Direction::from_degrees(t, p)))
            .collect();
        Ok(SweepGrid { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Shared immutable inputs of every grid point.
pub struct SweepContext<'a> {
    pub ims: &'a ImsModel,
    /// Unmodified full-diameter dish the null depth is measured against.
    pub reference: &'a ImsModel,
    pub states: Vec<SwitchState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    /// Reference minus designed co-polar directivity at the null, dB.
    pub null_depth_db: f64,
    pub peak_directivity_db: f64,
    pub d_co_null_db: f64,
    pub reference_d_co_null_db: f64,
    pub e_r: f64,
    pub residual: Complex64,
}

#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub index: usize,
    pub direction: Direction,
    pub outcome: std::result::Result<PointOutcome, String>,
    /// Timing metadata; not part of the reproducible result.
    pub wall_time: Duration,
}

impl SweepRecord {
    pub fn to_row(&self) -> SweepRow {
        let (status, error, o) = match &self.outcome {
            Ok(o) => ("ok", String::new(), Some(o)),
            Err(e) => ("error", e.clone(), None),
        };
        SweepRow {
            index: self.index,
            theta_z_deg: self.direction.theta_z.to_degrees(),
            phi_deg: self.direction.phi.to_degrees(),
            status: status.into(),
            null_depth_db: o.map(|o| o.null_depth_db),
            peak_directivity_db: o.map(|o| o.peak_directivity_db),
            d_co_null_db: o.map(|o| o.d_co_null_db),
            reference_d_co_null_db: o.map(|o| o.reference_d_co_null_db),
            e_r: o.map(|o| o.e_r),
            residual_abs: o.map(|o| o.residual.norm()),
            wall_time_s: self.wall_time.as_secs_f64(),
            error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepSummary {
    pub computed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Designs a null at `dir` and measures it.
pub fn evaluate_point(ctx: &SweepContext<'_>, dir: Direction) -> Result<PointOutcome> {
    let null = NullSpec::with_states(dir, ctx.states.clone())?;
    let design = nullsteer::design(ctx.ims, &null)?;
    let assignment = nullsteer::apply_states(ctx.ims, &design.states)?;
    let sources = ctx.ims.sources(&assignment)?;
    let pol = ctx.ims.polarization();
    let (co, _) = farfield::co_cross(farfield::radiate(&sources, dir)?, dir, pol);
    let d_co_null = farfield::directivity(co, ctx.ims.p_rad())?;
    let (ref_co, _) = farfield::co_cross(farfield::radiate(ctx.reference.reflector_sources(), dir)?, dir, pol);
    let d_ref = farfield::directivity(ref_co, ctx.reference.p_rad())?;
    let (_, peak) = farfield::peak_search(&sources, pol, ctx.ims.p_rad())?;
    Ok(PointOutcome {
        null_depth_db: d_ref - d_co_null,
        peak_directivity_db: peak,
        d_co_null_db: d_co_null,
        reference_d_co_null_db: d_ref,
        e_r: ctx.ims.radiation_efficiency(&assignment)?,
        residual: design.residual,
    })
}

/// Runs every grid point not in `skip`, `batch` points at a time on
/// `workers` threads, handing records to `sink` in grid order. Point
/// failures become error records; only sink errors abort.
pub fn run_sweep<F>(
    ctx: &SweepContext<'_>,
    grid: &SweepGrid,
    workers: usize,
    batch: usize,
    skip: &BTreeSet<usize>,
    mut sink: F,
) -> Result<SweepSummary>
where
    F: FnMut(&SweepRecord) -> Result<()>,
{
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    let todo: Vec<usize> = (0..grid.len()).filter(|i| !skip.contains(i)).collect();
    let mut summary = SweepSummary {
        skipped: grid.len() - todo.len(),
        ..Default::default()
    };
    for chunk in todo.chunks(batch.max(1)) {
        let records = parallel::with_workers(workers, || {
            parallel::map(chunk, |&index| {
                let direction = grid.points[index];
                let start = Instant::now();
                let outcome = evaluate_point(ctx, direction).map_err(|e| e.to_string());
                SweepRecord {
                    index,
                    direction,
                    outcome,
                    wall_time: start.elapsed(),
                }
            })
        });
        for r in &records {
            if let Err(e) = &r.outcome {
                log::warn!("sweep point {} failed: {e}", r.index);
                summary.failed += 1;
            }
            summary.computed += 1;
            sink(r)?;
        }
    }
    Ok(summary)
}

/// Collects a whole sweep in memory.
pub fn run_sweep_collect(ctx: &SweepContext<'_>, grid: &SweepGrid, workers: usize) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::with_capacity(grid.len());
    run_sweep(ctx, grid, workers, 4 * workers.max(1), &BTreeSet::new(), |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Checkpoint file kept next to a sweep CSV.
pub fn checkpoint_path(csv_path: &Path) -> std::path::PathBuf {
    let mut name = csv_path.file_name().unwrap_or_default().to_os_string();
    name.push(".checkpoint");
    csv_path.with_file_name(name)
}

/// Streams a sweep to `csv_path`. With `resume`, points listed in the
/// checkpoint are kept from the existing CSV and not recomputed.
pub fn run_sweep_to_file(
    ctx: &SweepContext<'_>,
    grid: &SweepGrid,
    workers: usize,
    batch: usize,
    csv_path: &Path,
    prov: &Provenance,
    resume: bool,
) -> Result<SweepSummary> {
    let ckpt_path = checkpoint_path(csv_path);
    let (kept, done) = if resume && csv_path.exists() {
        let done: BTreeSet<usize> = Checkpoint::read(&ckpt_path)?.into_iter().collect();
        let mut seen = BTreeSet::new();
        let rows: Vec<SweepRow> = output::read_csv::<SweepRow>(csv_path)?
            .into_iter()
            .filter(|r| done.contains(&r.index) && seen.insert(r.index))
            .collect();
        let done: BTreeSet<usize> = rows.iter().map(|r| r.index).collect();
        (rows, done)
    } else {
        (Vec::new(), BTreeSet::new())
    };
    if let Some(bad) = done.iter().find(|&&i| i >= grid.len()) {
        return Err(Error::Contract(format!(
            "checkpoint lists point {bad} but the grid has {} points",
            grid.len()
        )));
    }
    let mut writer = SweepWriter::create(csv_path, prov, &kept)?;
    let mut ckpt = Checkpoint::create(&ckpt_path, &done.iter().copied().collect::<Vec<_>>())?;
    run_sweep(ctx, grid, workers, batch, &done, |r| {
        writer.append(&r.to_row())?;
        writer.flush()?;
        ckpt.mark(r.index)?;
        ckpt.flush()
    })
}
