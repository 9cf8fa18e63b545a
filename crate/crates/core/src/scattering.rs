//! Reflection dyads and physical-optics surface currents.
//!
//! A dyad maps incident `(TM, TE)` field components to reflected ones in the
//! local basis of [`local_polarization_basis`]. TM plays the role of the θ
//! index and TE the φ index of the tabulated unit-cell data. The reflected TM
//! vector is oriented so that the dyad `-I` reproduces the perfect-conductor
//! boundary condition, which lets the solid reflector and the reflectarray
//! share one current formula.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::SurfaceSample;
use crate::vector::{CVec3, Vec3};
use crate::{Error, Result, ETA0};

/// 1-bit switch state of a reconfigurable cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchState {
    Off,
    On,
}

impl SwitchState {
    pub const BOTH: [SwitchState; 2] = [SwitchState::On, SwitchState::Off];
}

impl fmt::Display for SwitchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SwitchState::On => "on",
            SwitchState::Off => "off",
        })
    }
}

impl FromStr for SwitchState {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "on" | "1" => Ok(SwitchState::On),
            "off" | "0" => Ok(SwitchState::Off),
            other => Err(format!("unknown switch state `{other}` (expected on/off)")),
        }
    }
}

/// 2×2 reflection dyad in the local (TM, TE) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionDyad {
    /// R_θθ (TM → TM)
    pub tt: Complex64,
    /// R_θφ (TE → TM)
    pub tp: Complex64,
    /// R_φθ (TM → TE)
    pub pt: Complex64,
    /// R_φφ (TE → TE)
    pub pp: Complex64,
}

impl ReflectionDyad {
    pub const fn new(tt: Complex64, tp: Complex64, pt: Complex64, pp: Complex64) -> Self {
        ReflectionDyad { tt, tp, pt, pp }
    }

    pub fn diagonal(value: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        ReflectionDyad::new(value, zero, zero, value)
    }

    /// Perfect conductor, `-I`.
    pub fn pec() -> Self {
        ReflectionDyad::diagonal(Complex64::new(-1.0, 0.0))
    }

    pub fn zero() -> Self {
        ReflectionDyad::diagonal(Complex64::new(0.0, 0.0))
    }

    /// Builds a dyad from magnitudes and phases in degrees, ordered
    /// `tt, tp, pt, pp`.
    pub fn from_polar_deg(entries: [(f64, f64); 4]) -> Self {
        let c = |(m, p): (f64, f64)| Complex64::from_polar(m, p.to_radians());
        ReflectionDyad::new(c(entries[0]), c(entries[1]), c(entries[2]), c(entries[3]))
    }

    /// Reflected `(TM, TE)` components for incident `(tm, te)`.
    #[inline]
    pub fn apply(&self, tm: Complex64, te: Complex64) -> (Complex64, Complex64) {
        (self.tt * tm + self.tp * te, self.pt * tm + self.pp * te)
    }

    /// Largest singular value.
    pub fn max_singular_value(&self) -> f64 {
        // Eigenvalues of AᴴA = [[a, b], [b*, d]].
        let a = self.tt.norm_sqr() + self.pt.norm_sqr();
        let d = self.tp.norm_sqr() + self.pp.norm_sqr();
        let b = self.tt.conj() * self.tp + self.pt.conj() * self.pp;
        let half_tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (half_tr + disc).max(0.0).sqrt()
    }

    pub fn is_passive(&self) -> bool {
        self.max_singular_value() <= 1.0 + 1e-6
    }
}

/// Diode on/off circuit values used by the unit-cell full-wave model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodeModel {
    pub capacitance_pf: f64,
    pub resistance_ohm: f64,
    pub inductance_nh: f64,
}

/// Physical description of the reconfigurable unit cell behind the
/// built-in dyads. Informational only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RucDatasheet {
    pub patch_length_mm: f64,
    pub patch_width_mm: f64,
    pub upper_substrate_mm: f64,
    pub lower_substrate_mm: f64,
    pub upper_eps_r: f64,
    pub upper_tan_delta: f64,
    pub diode_on: DiodeModel,
    pub diode_off: DiodeModel,
}

/// Square-patch PIN-diode cell on Taconic TLX-8 over RT/Duroid 5880.
pub const RUC_DATASHEET: RucDatasheet = RucDatasheet {
    patch_length_mm: 51.0,
    patch_width_mm: 51.0,
    upper_substrate_mm: 13.5,
    lower_substrate_mm: 4.167,
    upper_eps_r: 2.55,
    upper_tan_delta: 0.0017,
    diode_on: DiodeModel {
        capacitance_pf: 0.0,
        resistance_ohm: 0.75,
        inductance_nh: 0.45,
    },
    diode_off: DiodeModel {
        capacitance_pf: 0.23,
        resistance_ohm: 0.0,
        inductance_nh: 0.45,
    },
};

/// Operating point of the built-in unit-cell dyads.
pub const RUC_FREQUENCY_HZ: f64 = 1.5e9;
pub const RUC_THETA_INC_DEG: f64 = 31.25;
/// Incidence deviation the built-in dyads are assumed to cover.
pub const RUC_THETA_TOLERANCE_DEG: f64 = 1.5;
/// Nearest-neighbour window for user tables.
pub const USER_THETA_TOLERANCE_DEG: f64 = 2.0;
const FREQUENCY_REL_TOLERANCE: f64 = 1e-6;

/// Built-in unit-cell dyad (magnitude, phase in degrees) for each state.
pub fn ruc_dyad(state: SwitchState) -> ReflectionDyad {
    match state {
        SwitchState::On => {
            ReflectionDyad::from_polar_deg([(0.97, 93.73), (0.185, -146.18), (0.187, 160.74), (0.97, 100.65)])
        }
        SwitchState::Off => {
            ReflectionDyad::from_polar_deg([(0.95, -127.12), (0.274, 12.92), (0.272, -82.68), (0.95, -123.54)])
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadEntry {
    pub state: SwitchState,
    pub frequency_hz: f64,
    pub theta_inc_deg: f64,
    pub dyad: ReflectionDyad,
}

/// User-supplied dyads keyed by (state, frequency, incidence angle).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DyadTable {
    pub entries: Vec<DyadEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DyadRow {
    state: String,
    frequency_hz: f64,
    theta_inc_deg: f64,
    tt_mag: f64,
    tt_phase_deg: f64,
    tp_mag: f64,
    tp_phase_deg: f64,
    pt_mag: f64,
    pt_phase_deg: f64,
    pp_mag: f64,
    pp_phase_deg: f64,
}

impl DyadTable {
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut entries = Vec::new();
        for (i, row) in rdr.deserialize::<DyadRow>().enumerate() {
            let row = row.map_err(|e| Error::parse("<dyad table>", format!("row {}: {e}", i + 1)))?;
            let state = row
                .state
                .parse()
                .map_err(|e| Error::parse("<dyad table>", format!("row {}: {e}", i + 1)))?;
            let dyad = ReflectionDyad::from_polar_deg([
                (row.tt_mag, row.tt_phase_deg),
                (row.tp_mag, row.tp_phase_deg),
                (row.pt_mag, row.pt_phase_deg),
                (row.pp_mag, row.pp_phase_deg),
            ]);
            if !dyad.is_passive() {
                log::warn!(
                    "dyad table row {} is not passive (max singular value {:.4})",
                    i + 1,
                    dyad.max_singular_value()
                );
            }
            entries.push(DyadEntry {
                state,
                frequency_hz: row.frequency_hz,
                theta_inc_deg: row.theta_inc_deg,
                dyad,
            });
        }
        if entries.is_empty() {
            return Err(Error::parse("<dyad table>", "no rows"));
        }
        Ok(DyadTable { entries })
    }

    /// Nearest entry in incidence angle at the requested state and frequency.
    pub fn lookup(&self, state: SwitchState, theta_li: f64, frequency_hz: f64) -> Result<ReflectionDyad> {
        let theta_deg = theta_li.to_degrees();
        self.entries
            .iter()
            .filter(|e| e.state == state && same_frequency(e.frequency_hz, frequency_hz))
            .map(|e| ((e.theta_inc_deg - theta_deg).abs(), e))
            .filter(|(d, _)| *d <= USER_THETA_TOLERANCE_DEG + 1e-9)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, e)| e.dyad)
            .ok_or_else(|| missing(state, frequency_hz, theta_deg))
    }
}

fn same_frequency(a: f64, b: f64) -> bool {
    (a - b).abs() <= FREQUENCY_REL_TOLERANCE * a.abs().max(b.abs())
}

fn missing(state: SwitchState, frequency_hz: f64, theta_inc_deg: f64) -> Error {
    Error::DyadLookup {
        state: state.to_string(),
        frequency_hz,
        theta_inc_deg,
    }
}

/// Where reflectarray dyads come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DyadSource {
    /// `-I` for every state (annulus behaves as solid reflector).
    Pec,
    /// `+jI` for on, `-jI` for off.
    IdealOneBit,
    /// The built-in PIN-diode unit-cell dyads.
    RucTable2,
    UserTable(DyadTable),
}

impl DyadSource {
    pub fn name(&self) -> &'static str {
        match self {
            DyadSource::Pec => "pec",
            DyadSource::IdealOneBit => "ideal_one_bit",
            DyadSource::RucTable2 => "ruc_table2",
            DyadSource::UserTable(_) => "user_table",
        }
    }

    pub fn lookup(&self, state: SwitchState, theta_li: f64, frequency_hz: f64) -> Result<ReflectionDyad> {
        match self {
            DyadSource::Pec => Ok(ReflectionDyad::pec()),
            DyadSource::IdealOneBit => Ok(ReflectionDyad::diagonal(match state {
                SwitchState::On => Complex64::new(0.0, 1.0),
                SwitchState::Off => Complex64::new(0.0, -1.0),
            })),
            DyadSource::RucTable2 => {
                let theta_deg = theta_li.to_degrees();
                if !same_frequency(frequency_hz, RUC_FREQUENCY_HZ)
                    || (theta_deg - RUC_THETA_INC_DEG).abs() > RUC_THETA_TOLERANCE_DEG + 1e-9
                {
                    return Err(missing(state, frequency_hz, theta_deg));
                }
                Ok(ruc_dyad(state))
            }
            DyadSource::UserTable(table) => table.lookup(state, theta_li, frequency_hz),
        }
    }
}

/// Free-function form of [`DyadSource::lookup`].
pub fn dyad_lookup(src: &DyadSource, state: SwitchState, theta_li: f64, frequency_hz: f64) -> Result<ReflectionDyad> {
    src.lookup(state, theta_li, frequency_hz)
}

/// Incident/reflected propagation and polarization vectors at a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub k_inc: Vec3,
    pub k_ref: Vec3,
    pub e_te: Vec3,
    pub e_tm_inc: Vec3,
    pub e_tm_ref: Vec3,
}

impl PolarizationBasis {
    /// Incident `(TM, TE)` components of a transverse field.
    #[inline]
    pub fn decompose(&self, e: CVec3) -> (Complex64, Complex64) {
        (e.dot_r(self.e_tm_inc), e.dot_r(self.e_te))
    }

    /// Reflected field vector from reflected `(TM, TE)` components.
    #[inline]
    pub fn reflected_field(&self, tm: Complex64, te: Complex64) -> CVec3 {
        self.e_tm_ref.scale_c(tm) + self.e_te.scale_c(te)
    }
}

pub fn local_polarization_basis(sample: &SurfaceSample) -> PolarizationBasis {
    let n = sample.normal();
    let k_inc = sample.incident_direction();
    let k_ref = (k_inc - n * (2.0 * k_inc.dot(n))).normalized();
    let e_te = sample.frame.y;
    PolarizationBasis {
        k_inc,
        k_ref,
        e_te,
        e_tm_inc: e_te.cross(k_inc),
        e_tm_ref: k_ref.cross(e_te),
    }
}

/// Relative tolerance on `|E·k̂| / |E|` for incident fields.
pub const TRANSVERSE_TOLERANCE: f64 = 1e-9;

/// Physical-optics current `2n̂ × H^r` with `E^r = R·E^i`, A/m.
pub fn surface_current(sample: &SurfaceSample, dyad: &ReflectionDyad, e_inc: CVec3) -> Result<CVec3> {
    let basis = local_polarization_basis(sample);
    current_with_basis(sample.normal(), &basis, dyad, e_inc)
}

pub(crate) fn current_with_basis(
    normal: Vec3,
    basis: &PolarizationBasis,
    dyad: &ReflectionDyad,
    e_inc: CVec3,
) -> Result<CVec3> {
    let radial = e_inc.dot_r(basis.k_inc).norm();
    if radial > TRANSVERSE_TOLERANCE * e_inc.norm() {
        return Err(Error::Contract(format!(
            "incident field is not transverse (|E·k| = {radial:e}, |E| = {:e})",
            e_inc.norm()
        )));
    }
    let (tm, te) = basis.decompose(e_inc);
    let (tm_r, te_r) = dyad.apply(tm, te);
    let e_ref = basis.reflected_field(tm_r, te_r);
    let h_ref = basis.k_ref.cross_c(e_ref) * (1.0 / ETA0);
    Ok(normal.cross_c(h_ref) * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Region;

    fn j() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn built_in_dyads_are_exact_table_values() {
        let on = dyad_lookup(&DyadSource::RucTable2, SwitchState::On, 31.25f64.to_radians(), 1.5e9).unwrap();
        assert!((on.tt.norm() - 0.97).abs() < 1e-15);
        assert!((on.tt.arg().to_degrees() - 93.73).abs() < 1e-12);
        assert!((on.pp.arg().to_degrees() - 100.65).abs() < 1e-12);
        assert!((on.tp.norm() - 0.185).abs() < 1e-15);
        assert!((on.tp.arg().to_degrees() + 146.18).abs() < 1e-12);
        assert!((on.pt.norm() - 0.187).abs() < 1e-15);
        assert!((on.pt.arg().to_degrees() - 160.74).abs() < 1e-12);
        let off = ruc_dyad(SwitchState::Off);
        assert!((off.tt.norm() - 0.95).abs() < 1e-15);
        assert!((off.tt.arg().to_degrees() + 127.12).abs() < 1e-12);
        assert!((off.pp.arg().to_degrees() + 123.54).abs() < 1e-12);
    }

    #[test]
    fn built_in_lookup_tolerates_small_incidence_shift_only() {
        let src = DyadSource::RucTable2;
        assert!(src.lookup(SwitchState::On, 30.0f64.to_radians(), 1.5e9).is_ok());
        let err = src.lookup(SwitchState::Off, 33.0f64.to_radians(), 1.5e9).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("off") && msg.contains("33.000"), "{msg}");
        assert!(src.lookup(SwitchState::On, 31.25f64.to_radians(), 1.6e9).is_err());
    }

    #[test]
    fn pec_and_ideal_sources() {
        for s in SwitchState::BOTH {
            assert_eq!(DyadSource::Pec.lookup(s, 0.3, 1e9).unwrap(), ReflectionDyad::pec());
        }
        let on = DyadSource::IdealOneBit.lookup(SwitchState::On, 0.0, 1.0).unwrap();
        let off = DyadSource::IdealOneBit.lookup(SwitchState::Off, 0.0, 1.0).unwrap();
        assert_eq!(on, ReflectionDyad::diagonal(j()));
        assert_eq!(off, ReflectionDyad::diagonal(-j()));
        let pec = ReflectionDyad::pec();
        assert_eq!(pec.tt, Complex64::new(-1.0, 0.0));
        assert_eq!(pec.tp, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn built_in_dyads_are_passive() {
        for s in SwitchState::BOTH {
            let d = ruc_dyad(s);
            assert!(d.is_passive(), "{s}: {}", d.max_singular_value());
        }
        assert!((ReflectionDyad::pec().max_singular_value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn co_pol_loss_matches_quoted_figure() {
        let worst = SwitchState::BOTH
            .iter()
            .map(|&s| ruc_dyad(s))
            .flat_map(|d| [d.tt.norm(), d.pp.norm()])
            .fold(f64::INFINITY, f64::min);
        let loss_db = -20.0 * worst.log10();
        assert!((loss_db - 0.4455).abs() < 1e-4);
        assert!(loss_db <= 0.45);
    }

    #[test]
    fn user_table_nearest_neighbour() {
        let csv = "state,frequency_hz,theta_inc_deg,tt_mag,tt_phase_deg,tp_mag,tp_phase_deg,pt_mag,pt_phase_deg,pp_mag,pp_phase_deg\n\
                   on,1.5e9,30,0.9,90,0,0,0,0,0.9,90\n\
                   on,1.5e9,32,0.8,80,0,0,0,0,0.8,80\n\
                   off,1.5e9,31,0.7,-90,0,0,0,0,0.7,-90\n";
        let t = DyadTable::from_csv_reader(csv.as_bytes()).unwrap();
        let d = t.lookup(SwitchState::On, 31.6f64.to_radians(), 1.5e9).unwrap();
        assert!((d.tt.norm() - 0.8).abs() < 1e-12);
        let d = t.lookup(SwitchState::Off, 29.5f64.to_radians(), 1.5e9).unwrap();
        assert!((d.tt.norm() - 0.7).abs() < 1e-12);
        assert!(t.lookup(SwitchState::Off, 35.0f64.to_radians(), 1.5e9).is_err());
        assert!(t.lookup(SwitchState::On, 31.0f64.to_radians(), 2.0e9).is_err());
    }

    #[test]
    fn user_table_rejects_bad_state() {
        let csv = "state,frequency_hz,theta_inc_deg,tt_mag,tt_phase_deg,tp_mag,tp_phase_deg,pt_mag,pt_phase_deg,pp_mag,pp_phase_deg\n\
                   maybe,1.5e9,30,0.9,90,0,0,0,0,0.9,90\n";
        assert!(DyadTable::from_csv_reader(csv.as_bytes()).is_err());
    }

    #[test]
    fn basis_is_orthonormal_and_collimated() {
        for &(t, p) in &[(0.0, 0.0), (0.4, 1.0), (1.1, 5.5)] {
            let s = SurfaceSample::new(t, p, 7.2, 1.0, Region::Reflector);
            let b = local_polarization_basis(&s);
            for v in [b.k_inc, b.k_ref, b.e_te, b.e_tm_inc, b.e_tm_ref] {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
            assert!(b.e_tm_inc.dot(b.k_inc).abs() < 1e-12);
            assert!(b.e_tm_ref.dot(b.k_ref).abs() < 1e-12);
            assert!((b.k_ref + Vec3::Z).norm() < 1e-12);
        }
        let s = SurfaceSample::new(0.0, 0.0, 7.2, 1.0, Region::Reflector);
        assert_eq!(local_polarization_basis(&s).e_te, Vec3::Y);
    }

    #[test]
    fn zero_dyad_gives_no_current() {
        let s = SurfaceSample::new(0.5, 0.5, 7.2, 1.0, Region::Reflector);
        let b = local_polarization_basis(&s);
        let e = b.e_te.scale_c(Complex64::new(1.0, 2.0)) + b.e_tm_inc.scale_c(Complex64::new(-0.3, 0.1));
        let jc = surface_current(&s, &ReflectionDyad::zero(), e).unwrap();
        assert_eq!(jc.norm(), 0.0);
    }

    #[test]
    fn vertex_current_follows_incident_field() {
        let k = 31.4;
        let s = SurfaceSample::new(0.0, 0.0, 7.2, 1.0, Region::Reflector);
        let amp = Complex64::from_polar(1.0, -k * 7.2) / 7.2;
        let jc = surface_current(&s, &ReflectionDyad::pec(), Vec3::Y.scale_c(amp)).unwrap();
        let expect = amp * (2.0 / ETA0);
        assert!((jc.y - expect).norm() < 1e-15);
        assert!(jc.x.norm() < 1e-18 && jc.z.norm() < 1e-18);
    }

    #[test]
    fn non_transverse_field_is_rejected() {
        let s = SurfaceSample::new(0.5, 0.5, 7.2, 1.0, Region::Reflector);
        let e = s.incident_direction().scale_c(Complex64::new(1.0, 0.0));
        assert!(matches!(
            surface_current(&s, &ReflectionDyad::pec(), e),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn switch_state_parsing() {
        assert_eq!("ON".parse::<SwitchState>().unwrap(), SwitchState::On);
        assert_eq!("0".parse::<SwitchState>().unwrap(), SwitchState::Off);
        assert!("x".parse::<SwitchState>().is_err());
    }
}
