//! Raised-cosine feed at the focus.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{DishConfig, Polarization, SurfaceSample};
use crate::vector::{CVec3, Vec3};
use crate::{Error, Result, ETA0};

/// Polarization vector used for the feed's angular pattern.
///
/// Both variants divide by `√(1 − sin²θ′ sin²φ′)` (y-pol) or
/// `√(1 − sin²θ′ cos²φ′)` (x-pol).
///
/// * `Projected` uses the transverse projection of `ŷ` (or `x̂`),
///   `θ̂ cosθ′ sinφ′ + φ̂ cosφ′`, whose norm is exactly that divisor. The
///   field magnitude is then `cos^q θ′ / r_i` at every azimuth and the
///   closed-form intercepted power in [`feed_power`] is exact.
/// * `Literal` uses `θ̂ sinφ′ + φ̂ cosφ′`, which is already unit length; the
///   divisor then boosts the field off the `φ′ = 0` plane and the intercepted
///   power exceeds [`feed_power`] by about 30 % for the 18 m dish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FeedModel {
    #[default]
    Projected,
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedConfig {
    pub amplitude: Complex64,
    pub exponent: f64,
    pub polarization: Polarization,
    pub wavenumber: f64,
    pub model: FeedModel,
}

impl FeedConfig {
    /// Unit-amplitude feed matching the dish's exponent and polarization.
    pub fn for_dish(cfg: &DishConfig) -> Self {
        FeedConfig {
            amplitude: Complex64::new(1.0, 0.0),
            exponent: cfg.feed_exponent(),
            polarization: cfg.polarization(),
            wavenumber: cfg.wavenumber(),
            model: FeedModel::default(),
        }
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_model(mut self, model: FeedModel) -> Self {
        self.model = model;
        self
    }
}

/// Incident electric field at a surface sample, global Cartesian, V/m.
pub fn incident_field(feed: &FeedConfig, sample: &SurfaceSample) -> Result<CVec3> {
    let (st, ct) = sample.theta_p.sin_cos();
    let (sp, cp) = sample.phi_p.sin_cos();
    let theta_hat = Vec3::new(ct * cp, ct * sp, -st);
    let phi_hat = Vec3::new(-sp, cp, 0.0);

    let (along_theta, along_phi, divisor_sq) = match feed.polarization {
        Polarization::Y => (sp, cp, 1.0 - st * st * sp * sp),
        Polarization::X => (cp, -sp, 1.0 - st * st * cp * cp),
    };
    if !(divisor_sq > 0.0) {
        return Err(Error::Domain(format!(
            "feed polarization divisor vanishes at theta' = {:.6} rad, phi' = {:.6} rad",
            sample.theta_p, sample.phi_p
        )));
    }
    let theta_weight = match feed.model {
        FeedModel::Projected => along_theta * ct,
        FeedModel::Literal => along_theta,
    };
    let pol = (theta_hat * theta_weight + phi_hat * along_phi) * (1.0 / divisor_sq.sqrt());

    let r = sample.r_i;
    let spherical = Complex64::from_polar(1.0, -feed.wavenumber * r) / r;
    let taper = ct.max(0.0).powf(feed.exponent);
    Ok(pol.scale_c(feed.amplitude * spherical * taper))
}

/// Feed power intercepted by a cap of half-angle `theta0`,
/// `|E₀|²·2π / (2η₀(2q+1))·(1 − cos^{2q+1} θ₀)`.
pub fn feed_power(feed: &FeedConfig, theta0: f64) -> f64 {
    let q = feed.exponent;
    let n = 2.0 * q + 1.0;
    feed.amplitude.norm_sqr() * TAU / (2.0 * ETA0 * n) * (1.0 - theta0.cos().max(0.0).powf(n))
}

/// Edge illumination relative to the vertex along `φ′ = 0`, as a field ratio.
pub fn edge_taper(feed_exponent: f64, theta0: f64, focal_length: f64) -> f64 {
    let r = crate::geometry::focal_distance(theta0, focal_length);
    theta0.cos().powf(feed_exponent) * focal_length / r
}
