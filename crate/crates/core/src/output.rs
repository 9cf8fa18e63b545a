//! CSV and summary files. Every file opens with a `#` header block carrying
//! the code version, config hash and mesh density.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::farfield::FarFieldSample;
use crate::geometry::UnitCell;
use crate::scattering::SwitchState;
use crate::{Error, Result, VERSION};

/// Reproducibility header shared by all outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub config_hash: String,
    pub samples_per_wavelength: f64,
    pub reflector_samples: usize,
    pub cells: usize,
}

impl Provenance {
    pub fn new(config_hash: &str, samples_per_wavelength: f64, reflector_samples: usize, cells: usize) -> Self {
        Provenance {
            version: VERSION.to_string(),
            config_hash: config_hash.to_string(),
            samples_per_wavelength,
            reflector_samples,
            cells,
        }
    }

    pub fn header_lines(&self) -> Vec<String> {
        vec![
            format!("rimsteer {}", self.version),
            format!("config_sha256 = {}", self.config_hash),
            format!(
                "mesh: samples_per_wavelength = {}, reflector_samples = {}, cells = {}",
                self.samples_per_wavelength, self.reflector_samples, self.cells
            ),
            "angles in degrees; directivity in dBi = 10log10(4 pi U / P_rad); field and dyad magnitudes in dB use 20log10".into(),
        ]
    }

    fn write_to<W: Write>(&self, w: &mut W, extra: &[String]) -> std::io::Result<()> {
        for line in self.header_lines().iter().chain(extra) {
            writeln!(w, "# {line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    /// Signed angle along the cut.
    pub theta_z_deg: f64,
    pub phi_deg: f64,
    pub d_co_db: f64,
    pub d_cr_db: f64,
    pub e_co_re: f64,
    pub e_co_im: f64,
    pub e_cr_re: f64,
    pub e_cr_im: f64,
}

impl PatternRow {
    pub fn from_sample(s: &FarFieldSample, phi_cut: f64) -> Self {
        PatternRow {
            theta_z_deg: s.cut_angle.to_degrees(),
            phi_deg: phi_cut.to_degrees(),
            d_co_db: s.d_co,
            d_cr_db: s.d_cr,
            e_co_re: s.e_co.re,
            e_co_im: s.e_co.im,
            e_cr_re: s.e_cr.re,
            e_cr_im: s.e_cr.im,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub ring: usize,
    pub index_in_ring: usize,
    pub theta_p_deg: f64,
    pub phi_p_deg: f64,
    pub state: SwitchState,
}

pub fn state_rows(cells: &[UnitCell], states: &[SwitchState]) -> Vec<StateRow> {
    cells
        .iter()
        .zip(states)
        .map(|(c, &state)| StateRow {
            ring: c.ring,
            index_in_ring: c.index_in_ring,
            theta_p_deg: c.center.theta_p.to_degrees(),
            phi_p_deg: c.center.phi_p.to_degrees(),
            state,
        })
        .collect()
}

/// Matches imported rows against the tessellation and returns the states in
/// cell order.
pub fn states_for_cells(cells: &[UnitCell], rows: &[StateRow]) -> Result<Vec<SwitchState>> {
    if rows.len() != cells.len() {
        return Err(Error::Contract(format!(
            "switch map has {} rows but the tessellation has {} cells",
            rows.len(),
            cells.len()
        )));
    }
    let mut sorted: Vec<&StateRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.ring, r.index_in_ring));
    cells
        .iter()
        .zip(sorted)
        .map(|(c, r)| {
            let dt = (r.theta_p_deg - c.center.theta_p.to_degrees()).abs();
            let dp = (r.phi_p_deg - c.center.phi_p.to_degrees()).abs();
            if r.ring != c.ring || r.index_in_ring != c.index_in_ring || dt > 1e-6 || dp > 1e-6 {
                return Err(Error::Contract(format!(
                    "switch map row (ring {}, index {}) does not match cell (ring {}, index {})",
                    r.ring, r.index_in_ring, c.ring, c.index_in_ring
                )));
            }
            Ok(r.state)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub theta_z_deg: f64,
    pub phi_deg: f64,
    pub status: String,
    pub null_depth_db: Option<f64>,
    pub peak_directivity_db: Option<f64>,
    pub d_co_null_db: Option<f64>,
    pub reference_d_co_null_db: Option<f64>,
    pub e_r: Option<f64>,
    pub residual_abs: Option<f64>,
    pub wall_time_s: f64,
    pub error: String,
}

/// Writes `rows` as CSV below the provenance header.
pub fn write_csv<T: Serialize>(path: &Path, prov: &Provenance, extra: &[String], rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    prov.write_to(&mut buf, extra).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(buf);
    for r in rows {
        w.serialize(r).map_err(|e| Error::parse(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    })
}

pub fn read_csv_from<T: DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    r.deserialize()
        .map(|row| row.map_err(|e| Error::parse("<csv>", e)))
        .collect()
}

/// Appending sweep writer; the header is written only for a new file.
pub struct SweepWriter {
    inner: csv::Writer<BufWriter<File>>,
    path: std::path::PathBuf,
}

impl SweepWriter {
    pub fn create(path: &Path, prov: &Provenance, rows: &[SweepRow]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = BufWriter::new(file);
        prov.write_to(&mut buf, &[]).map_err(|e| Error::io(path, e))?;
        let mut w = SweepWriter {
            inner: csv::Writer::from_writer(buf),
            path: path.to_path_buf(),
        };
        for r in rows {
            w.append(r)?;
        }
        w.flush()?;
        Ok(w)
    }

    pub fn append(&mut self, row: &SweepRow) -> Result<()> {
        self.inner.serialize(row).map_err(|e| Error::parse(&self.path, e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Plain-text list of completed grid indices, one per line.
pub struct Checkpoint {
    file: BufWriter<File>,
    path: std::path::PathBuf,
}

impl Checkpoint {
    pub fn read(path: &Path) -> Result<Vec<usize>> {
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::parse(path, format!("bad checkpoint line `{l}`: {e}")))
            })
            .collect()
    }

    /// Opens `path` rewriting it to hold exactly `done`.
    pub fn create(path: &Path, done: &[usize]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut c = Checkpoint {
            file: BufWriter::new(file),
            path: path.to_path_buf(),
        };
        for &i in done {
            c.mark(i)?;
        }
        c.flush()?;
        Ok(c)
    }

    pub fn mark(&mut self, index: usize) -> Result<()> {
        writeln!(self.file, "{index}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.file.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Serializes a summary value as TOML with the provenance comment block.
pub fn write_summary<T: Serialize>(path: &Path, prov: &Provenance, summary: &T) -> Result<()> {
    let body = toml::to_string_pretty(summary).map_err(|e| Error::parse(path, e))?;
    let mut out = Vec::new();
    prov.write_to(&mut out, &[]).map_err(|e| Error::io(path, e))?;
    out.extend_from_slice(body.as_bytes());
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance::new("abc", 4.0, 10, 2)
    }

    #[test]
    fn pattern_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let rows = vec![
            PatternRow {
                theta_z_deg: -0.1 - 0.2,
                phi_deg: 30.0,
                d_co_db: 48.379_999_999_1,
                d_cr_db: f64::NEG_INFINITY,
                e_co_re: 1.0 / 3.0,
                e_co_im: -2e-300,
                e_cr_re: 0.0,
                e_cr_im: std::f64::consts::PI,
            };
            2
        ];
        write_csv(&path, &prov(), &[], &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# rimsteer "));
        assert!(text.contains("config_sha256 = abc"));
        assert!(text.contains("samples_per_wavelength = 4"));
        let back: Vec<PatternRow> = read_csv(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn sweep_rows_with_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows = vec![SweepRow {
            index: 3,
            theta_z_deg: 1.75,
            phi_deg: 0.0,
            status: "error".into(),
            null_depth_db: None,
            peak_directivity_db: Some(48.0),
            d_co_null_db: None,
            reference_d_co_null_db: None,
            e_r: None,
            residual_abs: None,
            wall_time_s: 0.5,
            error: "dyad lookup, failed".into(),
        }];
        let mut w = SweepWriter::create(&path, &prov(), &rows).unwrap();
        w.flush().unwrap();
        let back: Vec<SweepRow> = read_csv(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        assert!(Checkpoint::read(&path).unwrap().is_empty());
        let mut c = Checkpoint::create(&path, &[0, 1]).unwrap();
        c.mark(2).unwrap();
        c.flush().unwrap();
        assert_eq!(Checkpoint::read(&path).unwrap(), vec![0, 1, 2]);
    }
}
