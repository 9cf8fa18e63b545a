use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rimsteer::config::RunConfig;
use rimsteer::model::ImsModel;
use rimsteer::output::{self, PatternRow, Provenance, StateRow};
use rimsteer::parallel;
use rimsteer::pipeline::{self, RunOutput};
use rimsteer::svg;
use rimsteer::sweep::{self, SweepContext, SweepGrid};
use rimsteer::{Error, Result};

/// Reflector + rim reflectarray simulator and null-steering designer.
#[derive(Parser)]
#[command(name = "rimsteer", version)]
struct Cli {
    /// Worker threads (default: RIMSTEER_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides `[output] directory`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pattern and summary of the solid full-diameter dish.
    Reference(Common),
    /// Serial-search switch design for the configured null.
    Design(Common),
    /// Pattern of a stored switch map.
    Pattern {
        #[command(flatten)]
        common: Common,
        /// Switch map CSV to replay.
        #[arg(long)]
        states: PathBuf,
    },
    /// Null-direction sweep over the `[sweep]` grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Continue from the checkpoint next to the sweep CSV.
        #[arg(long)]
        resume: bool,
    },
    /// Switch map export/import.
    #[command(subcommand)]
    States(StatesCommand),
    /// Re-render an SVG from a pattern or states CSV.
    Plot {
        kind: PlotKind,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum StatesCommand {
    /// Design and write only the switch map.
    Export(Common),
    /// Check a switch map against the tessellation and rewrite it with a
    /// fresh header.
    Import {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        states: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Pattern,
    States,
}

fn out_dir(cfg: &RunConfig, common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| cfg.output.directory.clone())
}

fn report(out: &RunOutput, dir: &Path) {
    let s = &out.summary;
    println!(
        "peak co-pol directivity: {:.3} dBi at theta_z = {:.4} deg",
        s.peak_directivity_db, s.peak_theta_z_deg
    );
    println!(
        "rings: {}, cells: {}, e_r: {:.6}, gain: {:.3} dB",
        s.rings, s.cells, s.efficiency.e_r, s.efficiency.gain_db
    );
    if let Some(n) = &s.null {
        println!(
            "null ({:.3} deg, {:.1} deg): {:.2} dBi, {:.2} dB below reference",
            n.theta_z_deg, n.phi_deg, n.d_co_db, n.null_depth_db
        );
    }
    for note in &s.notes {
        println!("note: {note}");
    }
    println!("wrote {}", dir.display());
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers.unwrap_or_else(parallel::default_workers);
    match cli.command {
        Command::Reference(common) => {
            let cfg = RunConfig::load(&common.config)?;
            let out = parallel::with_workers(workers, || pipeline::reference(&cfg))?;
            let dir = out_dir(&cfg, &common);
            out.write(&dir, cfg.output.svg)?;
            report(&out, &dir);
        }
        Command::Design(common) => {
            let cfg = RunConfig::load(&common.config)?;
            let out = parallel::with_workers(workers, || pipeline::design(&cfg))?;
            let dir = out_dir(&cfg, &common);
            out.write(&dir, cfg.output.svg)?;
            report(&out, &dir);
        }
        Command::Pattern { common, states } => {
            let cfg = RunConfig::load(&common.config)?;
            let rows: Vec<StateRow> = output::read_csv(&states)?;
            let out = parallel::with_workers(workers, || pipeline::replay(&cfg, &rows))?;
            let dir = out_dir(&cfg, &common);
            out.write(&dir, cfg.output.svg)?;
            report(&out, &dir);
        }
        Command::Sweep { common, resume } => {
            let cfg = RunConfig::load(&common.config)?;
            let spec = cfg
                .sweep
                .clone()
                .ok_or_else(|| Error::config("sweep", "a [sweep] section is required for this command"))?;
            let states = cfg
                .require_null()
                .map(|n| n.state_set)
                .unwrap_or_else(|_| rimsteer::scattering::SwitchState::BOTH.to_vec());
            let grid = SweepGrid::from_degrees(&spec.theta_z_deg, &spec.phi_deg)?;
            let dish = cfg.dish_config()?;
            let (ims, reference) = parallel::with_workers(workers, || -> Result<_> {
                Ok((
                    ImsModel::build(dish.clone(), cfg.dyad_source()?, cfg.model_options())?,
                    ImsModel::reference(&dish, cfg.model_options())?,
                ))
            })?;
            let ctx = SweepContext {
                ims: &ims,
                reference: &reference,
                states,
            };
            let dir = out_dir(&cfg, &common);
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let path = dir.join("sweep.csv");
            let prov = Provenance::new(
                &cfg.hash(),
                cfg.mesh.samples_per_wavelength,
                ims.reflector().len(),
                ims.cells().len(),
            );
            let batch = spec.batch.unwrap_or(4 * workers.max(1));
            let s = sweep::run_sweep_to_file(&ctx, &grid, workers, batch, &path, &prov, resume)?;
            println!(
                "sweep: {} points computed ({} failed), {} reused from checkpoint; wrote {}",
                s.computed,
                s.failed,
                s.skipped,
                path.display()
            );
        }
        Command::States(StatesCommand::Export(common)) => {
            let cfg = RunConfig::load(&common.config)?;
            let null = cfg.require_null()?;
            let dish = cfg.dish_config()?;
            let (model, design) = parallel::with_workers(workers, || -> Result<_> {
                let model = ImsModel::build(dish, cfg.dyad_source()?, cfg.model_options())?;
                let design = rimsteer::nullsteer::design(&model, &null)?;
                Ok((model, design))
            })?;
            let dir = out_dir(&cfg, &common);
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let prov = Provenance::new(
                &cfg.hash(),
                cfg.mesh.samples_per_wavelength,
                model.reflector().len(),
                model.cells().len(),
            );
            let rows = output::state_rows(model.cells(), &design.states);
            let path = dir.join("states.csv");
            output::write_csv(
                &path,
                &prov,
                &[format!("residual_abs = {}", design.residual.norm())],
                &rows,
            )?;
            println!(
                "{} cells, residual |T| = {:e}; wrote {}",
                rows.len(),
                design.residual.norm(),
                path.display()
            );
        }
        Command::States(StatesCommand::Import { common, states }) => {
            let cfg = RunConfig::load(&common.config)?;
            let rows: Vec<StateRow> = output::read_csv(&states)?;
            let model = parallel::with_workers(workers, || {
                ImsModel::build(cfg.dish_config()?, cfg.dyad_source()?, cfg.model_options())
            })?;
            let matched = output::states_for_cells(model.cells(), &rows)?;
            let dir = out_dir(&cfg, &common);
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let prov = Provenance::new(
                &cfg.hash(),
                cfg.mesh.samples_per_wavelength,
                model.reflector().len(),
                model.cells().len(),
            );
            let path = dir.join("states.csv");
            output::write_csv(&path, &prov, &[], &output::state_rows(model.cells(), &matched))?;
            println!(
                "{} cells match the tessellation; wrote {}",
                matched.len(),
                path.display()
            );
        }
        Command::Plot { kind, input, output } => {
            let title = input.display().to_string();
            let text = match kind {
                PlotKind::Pattern => svg::cut_plot(&output::read_csv::<PatternRow>(&input)?, &title),
                PlotKind::States => svg::state_map(&output::read_csv::<StateRow>(&input)?, &title),
            };
            pipeline::write_text(&output, &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
