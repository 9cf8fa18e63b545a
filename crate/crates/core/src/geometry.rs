//! Paraboloid parameterization, local tangent frames, the reflector
//! quadrature mesh and the reflectarray unit-cell tessellation.
//!
//! The feed sits at the global origin and the vertex at `(0, 0, F)`, so the
//! dish opens toward `-z` and a point at source angles `(θ′, φ′)` lies at
//! `F·sec²(θ′/2)·r̂`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::vector::Vec3;
use crate::{Error, Result, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    X,
    #[default]
    Y,
}

/// Full system geometry and operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct DishConfig {
    diameter: f64,
    reflector_diameter: f64,
    focal_length: f64,
    frequency: f64,
    wavelength: f64,
    rim_angle: f64,
    boundary_angle: f64,
    feed_exponent: f64,
    polarization: Polarization,
}

impl DishConfig {
    pub fn new(
        diameter: f64,
        reflector_diameter: f64,
        focal_length: f64,
        frequency: f64,
        feed_exponent: f64,
        polarization: Polarization,
    ) -> Result<Self> {
        let (rim_angle, boundary_angle) = subtended_angles(diameter, reflector_diameter, focal_length)?;
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::Domain(format!("frequency must be positive, got {frequency}")));
        }
        if !(feed_exponent > 0.0 && feed_exponent.is_finite()) {
            return Err(Error::Domain(format!(
                "feed exponent must be positive, got {feed_exponent}"
            )));
        }
        Ok(DishConfig {
            diameter,
            reflector_diameter,
            focal_length,
            frequency,
            wavelength: SPEED_OF_LIGHT / frequency,
            rim_angle,
            boundary_angle,
            feed_exponent,
            polarization,
        })
    }

    /// 18 m dish, F = 0.4 D, 1.5 GHz, q = 1.14, y-polarized, with the given
    /// reflector-portion diameter.
    pub fn l_band_18m(reflector_diameter: f64) -> Result<Self> {
        DishConfig::new(18.0, reflector_diameter, 7.2, 1.5e9, 1.14, Polarization::Y)
    }

    /// Same system with the rim annulus removed (solid dish of diameter D).
    pub fn solid(&self) -> DishConfig {
        let mut cfg = self.clone();
        cfg.reflector_diameter = cfg.diameter;
        cfg.boundary_angle = cfg.rim_angle;
        cfg
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }
    pub fn reflector_diameter(&self) -> f64 {
        self.reflector_diameter
    }
    pub fn focal_length(&self) -> f64 {
        self.focal_length
    }
    pub fn frequency(&self) -> f64 {
        self.frequency
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }
    /// θ₀, the full rim angle.
    pub fn rim_angle(&self) -> f64 {
        self.rim_angle
    }
    /// θ₁, the reflector/reflectarray boundary angle.
    pub fn boundary_angle(&self) -> f64 {
        self.boundary_angle
    }
    pub fn feed_exponent(&self) -> f64 {
        self.feed_exponent
    }
    pub fn polarization(&self) -> Polarization {
        self.polarization
    }
    /// Unit-cell edge, λ₀/2.
    pub fn cell_size(&self) -> f64 {
        0.5 * self.wavelength
    }
    /// Projected aperture area π(D/2)².
    pub fn aperture_area(&self) -> f64 {
        PI * 0.25 * self.diameter * self.diameter
    }
}

/// Rim angle θ₀ and boundary angle θ₁ subtended at the focus.
pub fn subtended_angles(diameter: f64, reflector_diameter: f64, focal_length: f64) -> Result<(f64, f64)> {
    if !(diameter > 0.0 && reflector_diameter > 0.0 && focal_length > 0.0) {
        return Err(Error::Domain(format!(
            "dish dimensions must be positive (D = {diameter}, D0 = {reflector_diameter}, F = {focal_length})"
        )));
    }
    if reflector_diameter > diameter {
        return Err(Error::Domain(format!(
            "reflector diameter {reflector_diameter} exceeds dish diameter {diameter}"
        )));
    }
    let theta0 = 2.0 * (diameter / (4.0 * focal_length)).atan();
    let theta1 = 2.0 * (reflector_diameter / (4.0 * focal_length)).atan();
    Ok((theta0, theta1))
}

/// Focus-to-surface distance `F·sec²(θ′/2)`.
#[inline]
pub fn focal_distance(theta_p: f64, focal_length: f64) -> f64 {
    let c = (0.5 * theta_p).cos();
    focal_length / (c * c)
}

/// Point on the paraboloid at source angles `(θ′, φ′)`.
pub fn surface_point(theta_p: f64, phi_p: f64, focal_length: f64) -> Result<(f64, Vec3)> {
    if !(0.0..PI).contains(&theta_p) {
        return Err(Error::Domain(format!(
            "source angle theta' = {theta_p} rad is outside [0, pi)"
        )));
    }
    let r = focal_distance(theta_p, focal_length);
    Ok((r, r * unit_radial(theta_p, phi_p)))
}

#[inline]
pub(crate) fn unit_radial(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Orthonormal tangent-plane frame; `z` is the unit normal facing the feed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub x: Vec3,
    pub y: Vec3,
    pub z: Vec3,
}

/// Local frame at `(θ′, φ′)`.
///
/// `y` is normal to the plane of incidence and `x = y × z`, so the incident
/// direction lies in the x–z plane with a positive `x` component. At the
/// vertex the plane of incidence is undefined and `y` is pinned to `ŷ_g`.
pub fn local_frame(theta_p: f64, phi_p: f64) -> LocalFrame {
    // Gradient form -(x/2F, y/2F, 1) normalized; independent of F.
    let (sh, ch) = (0.5 * theta_p).sin_cos();
    let (sp, cp) = phi_p.sin_cos();
    let n = Vec3::new(-sh * cp, -sh * sp, -ch).normalized();
    let k = unit_radial(theta_p, phi_p);
    let nk = n.cross(k);
    let y = if nk.norm() < 1e-12 { Vec3::Y } else { nk.normalized() };
    let x = y.cross(n).normalized();
    LocalFrame { x, y, z: n }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Reflector,
    Reflectarray,
}

/// One quadrature point on the paraboloid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    pub theta_p: f64,
    pub phi_p: f64,
    pub r_i: f64,
    pub position: Vec3,
    pub frame: LocalFrame,
    /// Area weight dS, m².
    pub area: f64,
    pub region: Region,
}

impl SurfaceSample {
    pub fn new(theta_p: f64, phi_p: f64, focal_length: f64, area: f64, region: Region) -> Self {
        let r_i = focal_distance(theta_p, focal_length);
        SurfaceSample {
            theta_p,
            phi_p,
            r_i,
            position: r_i * unit_radial(theta_p, phi_p),
            frame: local_frame(theta_p, phi_p),
            area,
            region,
        }
    }

    /// Unit normal toward the feed (`z` of the local frame).
    pub fn normal(&self) -> Vec3 {
        self.frame.z
    }

    /// Incident propagation direction r̂ from the focus.
    pub fn incident_direction(&self) -> Vec3 {
        unit_radial(self.theta_p, self.phi_p)
    }
}

/// Area element `r_i²·sinθ′·sec(θ′/2)` per unit dθ′ dφ′.
#[inline]
pub fn area_density(theta_p: f64, focal_length: f64) -> f64 {
    let r = focal_distance(theta_p, focal_length);
    r * r * theta_p.sin() / (0.5 * theta_p).cos()
}

/// Meridian arc length from the vertex to θ′.
///
/// `ds/dθ′ = r_i·sec(θ′/2) = F·sec³(θ′/2)`, which integrates to
/// `F·[sec u tan u + ln(sec u + tan u)]` with `u = θ′/2`.
pub fn meridian_arc(theta_p: f64, focal_length: f64) -> f64 {
    let u = 0.5 * theta_p;
    let sec = 1.0 / u.cos();
    let tan = u.tan();
    focal_length * (sec * tan + (sec + tan).ln())
}

/// Inverse of [`meridian_arc`] on `[0, π)`.
pub fn meridian_angle(arc: f64, focal_length: f64) -> f64 {
    if arc <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, PI * (1.0 - 1e-9));
    let mut theta = (arc / focal_length).min(2.0);
    for _ in 0..100 {
        let f = meridian_arc(theta, focal_length) - arc;
        if f > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        let c = (0.5 * theta).cos();
        let step = f * c * c * c / focal_length;
        let mut next = theta - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - theta).abs() <= 1e-15 * theta.max(1.0) {
            return next;
        }
        theta = next;
    }
    theta
}

/// Uniform midpoint grid in `(θ′, φ′)` over the cap `0 ≤ θ′ ≤ theta_max`.
///
/// Step counts are chosen so that at the cap edge there are at least
/// `samples_per_wavelength` samples per wavelength along both the meridian
/// and the circumference. The azimuthal count is a multiple of four so the
/// grid shares the dish's mirror symmetries.
pub fn mesh_cap(
    focal_length: f64,
    wavelength: f64,
    theta_max: f64,
    samples_per_wavelength: f64,
    region: Region,
) -> Result<Vec<SurfaceSample>> {
    if !(samples_per_wavelength >= 2.0) {
        return Err(Error::Domain(format!(
            "samples_per_wavelength must be at least 2, got {samples_per_wavelength}"
        )));
    }
    if theta_max <= 0.0 {
        return Ok(Vec::new());
    }
    let r_edge = focal_distance(theta_max, focal_length);
    let meridian_rate = r_edge / (0.5 * theta_max).cos();
    let n_theta = ((theta_max * meridian_rate * samples_per_wavelength / wavelength).ceil() as usize).max(1);
    let circumference = TAU * r_edge * theta_max.sin();
    let n_phi = ((circumference * samples_per_wavelength / wavelength / 4.0).ceil() as usize).max(1) * 4;
    let d_theta = theta_max / n_theta as f64;
    let d_phi = TAU / n_phi as f64;

    let mut samples = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * d_theta;
        let da = area_density(theta, focal_length) * d_theta * d_phi;
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * d_phi;
            samples.push(SurfaceSample::new(theta, phi, focal_length, da, region));
        }
    }
    Ok(samples)
}

/// Quadrature mesh of the reflector portion `0 ≤ θ′ ≤ θ₁`.
pub fn mesh_reflector(cfg: &DishConfig, samples_per_wavelength: f64) -> Result<Vec<SurfaceSample>> {
    mesh_cap(
        cfg.focal_length(),
        cfg.wavelength(),
        cfg.boundary_angle(),
        samples_per_wavelength,
        Region::Reflector,
    )
}

/// Subsamples per cell edge.
pub const CELL_SUBDIVISION: usize = 3;

/// One reflectarray element.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    pub ring: usize,
    pub index_in_ring: usize,
    /// Center sample; its `area` is the summed subsample area.
    pub center: SurfaceSample,
    /// Nominal edge lengths (λ₀/2).
    pub a: f64,
    pub b: f64,
    pub subsamples: Vec<SurfaceSample>,
    /// Local incidence polar angle θ′/2 at the center.
    pub theta_li: f64,
}

/// Splits the annulus `θ₁ ≤ θ′ ≤ θ₀` into rings of half-wavelength cells.
///
/// Rings are spaced evenly in meridian arc length; ring `k` holds
/// `round(2π·ρ_k / a)` cells with centers uniform in φ′, starting at
/// φ′ = π/N_k. Cells come out innermost ring first, then by increasing φ′.
pub fn tessellate_annulus(cfg: &DishConfig) -> Vec<UnitCell> {
    let f = cfg.focal_length();
    let cell = cfg.cell_size();
    let s_inner = meridian_arc(cfg.boundary_angle(), f);
    let s_outer = meridian_arc(cfg.rim_angle(), f);
    let width = s_outer - s_inner;
    let n_rings = (width / cell).round() as usize;
    if n_rings == 0 {
        if cfg.boundary_angle() < cfg.rim_angle() {
            log::warn!("annulus arc width {width:.4} m is narrower than one cell ({cell:.4} m); no reflectarray cells");
        }
        return Vec::new();
    }

    let ring_width = width / n_rings as f64;
    let mut cells = Vec::new();
    for ring in 0..n_rings {
        let s_lo = s_inner + ring as f64 * ring_width;
        let s_hi = s_lo + ring_width;
        let theta_lo = meridian_angle(s_lo, f);
        let theta_hi = meridian_angle(s_hi, f);
        let theta_c = meridian_angle(0.5 * (s_lo + s_hi), f);
        let rho = focal_distance(theta_c, f) * theta_c.sin();
        let n_cells = ((TAU * rho / cell).round() as usize).max(1);
        let d_phi = TAU / n_cells as f64;

        let sub = CELL_SUBDIVISION as f64;
        let dt = (theta_hi - theta_lo) / sub;
        let dp = d_phi / sub;
        for idx in 0..n_cells {
            let phi_lo = idx as f64 * d_phi;
            let mut subsamples = Vec::with_capacity(CELL_SUBDIVISION * CELL_SUBDIVISION);
            for i in 0..CELL_SUBDIVISION {
                let theta = theta_lo + (i as f64 + 0.5) * dt;
                let da = area_density(theta, f) * dt * dp;
                for j in 0..CELL_SUBDIVISION {
                    let phi = phi_lo + (j as f64 + 0.5) * dp;
                    subsamples.push(SurfaceSample::new(theta, phi, f, da, Region::Reflectarray));
                }
            }
            let total: f64 = subsamples.iter().map(|s| s.area).sum();
            let center = SurfaceSample::new(theta_c, phi_lo + 0.5 * d_phi, f, total, Region::Reflectarray);
            cells.push(UnitCell {
                ring,
                index_in_ring: idx,
                center,
                a: cell,
                b: cell,
                subsamples,
                theta_li: 0.5 * theta_c,
            });
        }
    }
    cells
}

/// Number of rings in a tessellation.
pub fn ring_count(cells: &[UnitCell]) -> usize {
    cells.iter().map(|c| c.ring + 1).max().unwrap_or(0)
}
