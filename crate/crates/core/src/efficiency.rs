//! Radiation efficiency, aperture efficiency and gain.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::parallel::CompensatedSum;
use crate::scattering::ReflectionDyad;
use crate::{Error, Result};

/// Spillover × taper product assumed for the unmodified dish.
pub const ETA_S_ETA_T_FULL: f64 = 0.82;

/// Spillover × taper product once the rim is reallocated to the reflectarray.
pub const ETA_S_ETA_T_RIM: f64 = 0.731;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub e_r: f64,
    pub eta_s_eta_t: f64,
    pub eta_ap: f64,
    pub gain_db: f64,
    /// Physical aperture area, m².
    pub area: f64,
}

impl EfficiencyReport {
    pub fn new(e_r: f64, eta_s_eta_t: f64, diameter: f64, wavelength: f64) -> Self {
        let area = PI * (0.5 * diameter).powi(2);
        EfficiencyReport {
            e_r,
            eta_s_eta_t,
            eta_ap: e_r * eta_s_eta_t,
            gain_db: gain(e_r, eta_s_eta_t, area, wavelength),
            area,
        }
    }
}

/// Area-weighted power ratio after/before reflection.
///
/// Each term is `(dS, dyad, (E_TM, E_TE))` with the incident field already
/// resolved in the sample's orthonormal polarization basis.
pub fn radiation_efficiency<I>(terms: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, ReflectionDyad, (Complex64, Complex64))>,
{
    let mut num = CompensatedSum::default();
    let mut den = CompensatedSum::default();
    for (w, dyad, (tm, te)) in terms {
        let (rtm, rte) = dyad.apply(tm, te);
        num.add(w * (rtm.norm_sqr() + rte.norm_sqr()));
        den.add(w * (tm.norm_sqr() + te.norm_sqr()));
    }
    let den = den.value();
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::Domain(
            "radiation efficiency undefined: no incident power on the surface".into(),
        ));
    }
    Ok(num.value() / den)
}

/// `10 log10(e_r η_sη_t 4πA/λ²)`; `-inf` when the product vanishes.
pub fn gain(e_r: f64, eta_s_eta_t: f64, area: f64, wavelength: f64) -> f64 {
    let eta_ap = e_r * eta_s_eta_t;
    if eta_ap <= 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (eta_ap * 4.0 * PI * area / (wavelength * wavelength)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pec_everywhere_is_unity() {
        let terms = (0..500).map(|i| {
            let x = i as f64;
            (
                1.0 + 0.01 * x,
                ReflectionDyad::pec(),
                (c(x.sin(), 0.3), c(0.1, x.cos())),
            )
        });
        assert_eq!(radiation_efficiency(terms).unwrap(), 1.0);
    }

    #[test]
    fn uniform_magnitude() {
        let d = ReflectionDyad::diagonal(Complex64::from_polar(0.95, 1.0));
        let terms = (0..100).map(|i| (0.5 + i as f64, d, (c(1.0, 0.2), c(-0.3, 0.7))));
        let e = radiation_efficiency(terms).unwrap();
        assert!((e - 0.9025).abs() < 1e-12);
    }

    #[test]
    fn zero_denominator() {
        let terms = vec![(1.0, ReflectionDyad::pec(), (c(0.0, 0.0), c(0.0, 0.0)))];
        assert!(radiation_efficiency(terms).is_err());
        assert!(radiation_efficiency(Vec::new()).is_err());
    }

    #[test]
    fn gain_values() {
        let lambda = crate::SPEED_OF_LIGHT / 1.5e9;
        let r = EfficiencyReport::new(1.0, ETA_S_ETA_T_FULL, 18.0, lambda);
        assert!((r.gain_db - 48.18).abs() < 0.05, "{}", r.gain_db);
        // G = D_co for the full dish, against the quoted reference directivity
        assert!((r.gain_db - 48.38).abs() <= 0.25);
        assert_eq!(gain(0.0, 0.82, r.area, lambda), f64::NEG_INFINITY);
        let r = EfficiencyReport::new(0.99, ETA_S_ETA_T_RIM, 18.0, lambda);
        assert!((r.eta_ap - 0.72369).abs() < 1e-12);
    }
}
