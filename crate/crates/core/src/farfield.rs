//! Radiation integral, Ludwig-3 decomposition and directivity.
//!
//! Fields are r-normalized: `Ẽ = r·E·e^{+jkr}`, with the `1/(4π)` of the
//! free-space Green's function kept so `|Ẽ|²/(2η₀)` is radiation intensity.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::geometry::Polarization;
use crate::parallel;
use crate::vector::{CVec3, Vec3};
use crate::{Error, Result, ETA0};

/// Observation direction measured from the dish axis `-ẑ_g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    /// Offset from boresight, radians, in `[0, π]`.
    pub theta_z: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta_z: f64, phi: f64) -> Self {
        Direction { theta_z, phi }
    }

    pub fn from_degrees(theta_z: f64, phi: f64) -> Self {
        Direction::new(theta_z.to_radians(), phi.to_radians())
    }

    pub const BORESIGHT: Direction = Direction { theta_z: 0.0, phi: 0.0 };

    /// Point on a planar cut; negative offsets fold to `φ + π`.
    pub fn on_cut(signed_theta_z: f64, phi_cut: f64) -> Self {
        if signed_theta_z < 0.0 {
            Direction::new(-signed_theta_z, phi_cut + PI)
        } else {
            Direction::new(signed_theta_z, phi_cut)
        }
    }

    pub fn unit_vector(&self) -> Vec3 {
        let (st, ct) = self.theta_z.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(st * cp, st * sp, -ct)
    }

    /// Global spherical unit vectors `(θ̂, φ̂)` at this direction; the global
    /// polar angle is `π − θ_z`.
    pub fn spherical_basis(&self) -> (Vec3, Vec3) {
        let (st, ct) = self.theta_z.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        (Vec3::new(-ct * cp, -ct * sp, -st), Vec3::new(-sp, cp, 0.0))
    }
}

/// One quadrature term of the radiation integral: position and `J_s·dS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentElement {
    pub position: Vec3,
    pub moment: CVec3,
}

/// Current elements radiating at a common wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSet {
    pub wavenumber: f64,
    pub elements: Vec<CurrentElement>,
}

#[inline]
fn term(k: f64, u: Vec3, e: &CurrentElement) -> CVec3 {
    let (s, c) = (k * u.dot(e.position)).sin_cos();
    e.moment.scale(Complex64::new(c, s))
}

#[inline]
fn prefactor(k: f64) -> Complex64 {
    // -jωμ/(4π) with ωμ = kη₀
    Complex64::new(0.0, -k * ETA0 / (4.0 * PI))
}

/// `Ẽ(û) = (−jωμ/4π)·Σ J_s·dS·e^{jk û·r′}`, Cartesian, volts.
///
/// Sums run over fixed-size chunks that are combined in a fixed order, so
/// the result does not depend on the worker count.
pub fn radiate(sources: &SourceSet, dir: Direction) -> Result<CVec3> {
    if sources.elements.is_empty() {
        return Err(Error::Contract("radiate called with no current elements".into()));
    }
    let k = sources.wavenumber;
    let u = dir.unit_vector();
    Ok(parallel::chunked_sum(&sources.elements, |e| term(k, u, e)).scale(prefactor(k)))
}

/// Single-threaded [`radiate`]; bit-identical output.
pub fn radiate_sequential(sources: &SourceSet, dir: Direction) -> Result<CVec3> {
    if sources.elements.is_empty() {
        return Err(Error::Contract("radiate called with no current elements".into()));
    }
    let k = sources.wavenumber;
    let u = dir.unit_vector();
    Ok(parallel::chunked_sum_sequential(&sources.elements, |e| term(k, u, e)).scale(prefactor(k)))
}

/// [`radiate`] for many directions, parallel over directions.
pub fn radiate_many(sources: &SourceSet, dirs: &[Direction]) -> Result<Vec<CVec3>> {
    if sources.elements.is_empty() {
        return Err(Error::Contract("radiate called with no current elements".into()));
    }
    Ok(parallel::map(dirs, |d| {
        radiate_sequential(sources, *d).expect("non-empty source set")
    }))
}

/// Ludwig-3 co- and cross-polar components from global spherical
/// `(E_θ, E_φ)` in the lower hemisphere.
pub fn ludwig_copol(e_theta: Complex64, e_phi: Complex64, phi: f64, pol: Polarization) -> (Complex64, Complex64) {
    let (s, c) = phi.sin_cos();
    match pol {
        Polarization::X => (-c * e_theta - s * e_phi, -s * e_theta + c * e_phi),
        Polarization::Y => (-s * e_theta + c * e_phi, -c * e_theta - s * e_phi),
    }
}

/// Co/cross-polar components of a Cartesian far field at `dir`.
pub fn co_cross(e: CVec3, dir: Direction, pol: Polarization) -> (Complex64, Complex64) {
    let (th, ph) = dir.spherical_basis();
    ludwig_copol(e.dot_r(th), e.dot_r(ph), dir.phi, pol)
}

/// Directivity in dB of an r-normalized field component. A zero field maps
/// to `-∞`.
pub fn directivity(e: Complex64, p_rad: f64) -> Result<f64> {
    if !(p_rad > 0.0) {
        return Err(Error::Domain(format!("radiated power must be positive, got {p_rad}")));
    }
    let u = e.norm_sqr() / (2.0 * ETA0);
    if u == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (4.0 * PI * u / p_rad).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldSample {
    pub direction: Direction,
    /// Signed angle along the cut; equals `theta_z` off cuts.
    pub cut_angle: f64,
    pub e_co: Complex64,
    pub e_cr: Complex64,
    pub d_co: f64,
    pub d_cr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub direction: Direction,
    pub d_co: f64,
    pub d_cr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSummary {
    pub peak_directivity: f64,
    pub peak_direction: Direction,
    pub probes: Vec<Probe>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldResult {
    pub samples: Vec<FarFieldSample>,
    pub p_rad: f64,
    pub summary: PatternSummary,
}

/// Evaluates co/cross-polar fields and directivities at arbitrary points.
pub fn evaluate(
    sources: &SourceSet,
    pol: Polarization,
    p_rad: f64,
    points: &[(f64, Direction)],
) -> Result<Vec<FarFieldSample>> {
    let dirs: Vec<Direction> = points.iter().map(|p| p.1).collect();
    let fields = radiate_many(sources, &dirs)?;
    points
        .iter()
        .zip(fields)
        .map(|(&(cut_angle, direction), e)| {
            let (e_co, e_cr) = co_cross(e, direction, pol);
            Ok(FarFieldSample {
                direction,
                cut_angle,
                e_co,
                e_cr,
                d_co: directivity(e_co, p_rad)?,
                d_cr: directivity(e_cr, p_rad)?,
            })
        })
        .collect()
}

/// Signed cut angles `start, start + step, …, ≤ stop` in the plane `phi_cut`.
pub fn cut_points(phi_cut: f64, start: f64, stop: f64, step: f64) -> Result<Vec<(f64, Direction)>> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!("cut step must be positive, got {step}")));
    }
    if !(stop >= start) {
        return Err(Error::Domain(format!("cut range is empty ({start} .. {stop})")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|i| {
            let a = start + i as f64 * step;
            (a, Direction::on_cut(a, phi_cut))
        })
        .collect())
}

/// Planar cut: azimuth `phi` and signed offsets `start..=stop` every
/// `step`, all radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSpec {
    pub phi: f64,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl CutSpec {
    pub fn from_degrees(phi: f64, start: f64, stop: f64, step: f64) -> Self {
        CutSpec {
            phi: phi.to_radians(),
            start: start.to_radians(),
            stop: stop.to_radians(),
            step: step.to_radians(),
        }
    }

    pub fn points(&self) -> Result<Vec<(f64, Direction)>> {
        cut_points(self.phi, self.start, self.stop, self.step)
    }
}

/// Pattern along a planar cut, plus summary values at `probes`.
pub fn pattern_cut(
    sources: &SourceSet,
    pol: Polarization,
    p_rad: f64,
    cut: &CutSpec,
    probes: &[Direction],
) -> Result<FarFieldResult> {
    let samples = evaluate(sources, pol, p_rad, &cut.points()?)?;
    let peak = samples
        .iter()
        .max_by(|a, b| a.d_co.total_cmp(&b.d_co))
        .expect("cut has at least one point");
    let probe_pts: Vec<(f64, Direction)> = probes.iter().map(|d| (d.theta_z, *d)).collect();
    let probes = evaluate(sources, pol, p_rad, &probe_pts)?
        .into_iter()
        .map(|s| Probe {
            direction: s.direction,
            d_co: s.d_co,
            d_cr: s.d_cr,
        })
        .collect();
    Ok(FarFieldResult {
        summary: PatternSummary {
            peak_directivity: peak.d_co,
            peak_direction: peak.direction,
            probes,
        },
        samples,
        p_rad,
    })
}

/// Co-polar main-beam maximum found by compass search around boresight in
/// `(θ_z cos φ, θ_z sin φ)`. Returns the direction and its directivity.
pub fn peak_search(sources: &SourceSet, pol: Polarization, p_rad: f64) -> Result<(Direction, f64)> {
    let eval = |u: f64, v: f64| -> Result<f64> {
        let d = uv_direction(u, v);
        let (co, _) = co_cross(radiate(sources, d)?, d, pol);
        directivity(co, p_rad)
    };
    let (mut u, mut v) = (0.0, 0.0);
    let mut best = eval(u, v)?;
    let mut step = 0.02f64.to_radians();
    let min_step = 1e-4f64.to_radians();
    while step >= min_step {
        let mut moved = false;
        for (du, dv) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let val = eval(u + du, v + dv)?;
            if val > best {
                best = val;
                u += du;
                v += dv;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((uv_direction(u, v), best))
}

fn uv_direction(u: f64, v: f64) -> Direction {
    let t = u.hypot(v);
    if t == 0.0 {
        Direction::BORESIGHT
    } else {
        Direction::new(t, v.atan2(u))
    }
}

/// A local maximum of a sampled cut, refined by a parabola through the three
/// samples around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lobe {
    pub angle: f64,
    pub level_db: f64,
}

/// Local maxima of `d_co` along a cut with strictly positive angle, in
/// increasing angle; the first is the first sidelobe when the cut starts at
/// or before boresight.
pub fn sidelobes(samples: &[FarFieldSample]) -> Vec<Lobe> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.cut_angle >= 0.0)
        .map(|s| (s.cut_angle, s.d_co))
        .collect();
    let mut lobes = Vec::new();
    for w in pts.windows(3) {
        let ((x0, y0), (x1, y1), (_, y2)) = (w[0], w[1], w[2]);
        if x1 > 0.0 && y1 > y0 && y1 >= y2 {
            let denom = y0 - 2.0 * y1 + y2;
            let h = x1 - x0;
            let (dx, level) = if denom < 0.0 {
                let dx = 0.5 * h * (y0 - y2) / denom;
                (dx, y1 - 0.25 * (y0 - y2) * dx / h)
            } else {
                (0.0, y1)
            };
            lobes.push(Lobe {
                angle: x1 + dx,
                level_db: level,
            });
        }
    }
    lobes
}

/// Panel layout for full-sphere power integration.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    /// `(upper θ_z edge, panel width)` pairs in radians, ascending, ending
    /// at π. Each panel uses 4-point Gauss–Legendre.
    pub theta_bands: Vec<(f64, f64)>,
    /// Trapezoid points in φ.
    pub n_phi: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        let d = |x: f64| x.to_radians();
        SphereQuadrature {
            theta_bands: vec![(d(8.0), d(0.25)), (d(40.0), d(1.0)), (d(90.0), d(2.0)), (PI, d(4.0))],
            n_phi: 16,
        }
    }
}

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

impl SphereQuadrature {
    /// Quadrature nodes and solid-angle weights.
    pub fn nodes(&self) -> Vec<(Direction, f64)> {
        let mut thetas = Vec::new();
        let mut lo = 0.0;
        for &(hi, width) in &self.theta_bands {
            let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let a = lo + p as f64 * h;
                for (x, w) in GL4 {
                    let t = a + 0.5 * h * (x + 1.0);
                    thetas.push((t, 0.5 * h * w * t.sin()));
                }
            }
            lo = hi;
        }
        let dphi = TAU / self.n_phi as f64;
        let mut nodes = Vec::with_capacity(thetas.len() * self.n_phi);
        for (t, wt) in thetas {
            for j in 0..self.n_phi {
                nodes.push((Direction::new(t, j as f64 * dphi), wt * dphi));
            }
        }
        nodes
    }
}

/// Total radiated power `(1/2η₀)∮|Ẽ_⊥|² dΩ`, watts.
pub fn radiated_power(sources: &SourceSet, quad: &SphereQuadrature) -> Result<f64> {
    let (a, b) = radiated_power_split(sources, quad, FRAC_PI_2)?;
    Ok(a + b)
}

/// Radiated power split into `θ_z ≤ split` and `θ_z > split`. Exact in the
/// quadrature sense when `split` is a band edge.
pub fn radiated_power_split(sources: &SourceSet, quad: &SphereQuadrature, split: f64) -> Result<(f64, f64)> {
    let nodes = quad.nodes();
    let dirs: Vec<Direction> = nodes.iter().map(|n| n.0).collect();
    let fields = radiate_many(sources, &dirs)?;
    let mut near = parallel::CompensatedSum::default();
    let mut far = parallel::CompensatedSum::default();
    for ((d, w), e) in nodes.iter().zip(fields) {
        let (th, ph) = d.spherical_basis();
        let transverse = e.dot_r(th).norm_sqr() + e.dot_r(ph).norm_sqr();
        if d.theta_z <= split {
            near.add(w * transverse);
        } else {
            far.add(w * transverse);
        }
    }
    Ok((near.value() / (2.0 * ETA0), far.value() / (2.0 * ETA0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn boresight_vector() {
        assert_eq!(Direction::BORESIGHT.unit_vector(), Vec3::new(0.0, 0.0, -1.0));
        let d = Direction::on_cut(-0.1, 0.0);
        assert!((d.phi - PI).abs() < 1e-15 && d.theta_z == 0.1);
    }

    #[test]
    fn spherical_basis_is_orthonormal() {
        for d in [
            Direction::new(0.3, 1.0),
            Direction::new(2.0, -0.4),
            Direction::BORESIGHT,
        ] {
            let (t, p) = d.spherical_basis();
            let u = d.unit_vector();
            assert!(t.dot(p).abs() < 1e-15 && t.dot(u).abs() < 1e-15 && p.dot(u).abs() < 1e-15);
            // (r̂, θ̂, φ̂) right-handed
            assert!((u.cross(t) - p).norm() < 1e-15);
        }
    }

    #[test]
    fn ludwig_principal_planes() {
        let (et, ep) = (c(1.0, 2.0), c(-0.5, 0.3));
        let (co, cr) = ludwig_copol(et, ep, 0.0, Polarization::Y);
        assert_eq!((co, cr), (ep, -et));
        let (co, cr) = ludwig_copol(et, ep, PI / 2.0, Polarization::Y);
        assert!((co + et).norm() < 1e-15 && (cr + ep).norm() < 1e-15);
        let (co, cr) = ludwig_copol(et, ep, 0.0, Polarization::X);
        assert_eq!((co, cr), (-et, ep));
    }

    #[test]
    fn single_element_magnitude() {
        let k = 10.0;
        let m = CVec3::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let s = SourceSet {
            wavenumber: k,
            elements: vec![CurrentElement {
                position: Vec3::default(),
                moment: m,
            }],
        };
        let e = radiate(&s, Direction::BORESIGHT).unwrap();
        assert!((e.norm() - k * ETA0 * 2.0 / (4.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn antipodal_opposite_currents_cancel_broadside() {
        let m = CVec3::new(c(1.0, 0.5), c(0.0, 0.0), c(0.0, 0.0));
        let s = SourceSet {
            wavenumber: 7.0,
            elements: vec![
                CurrentElement {
                    position: Vec3::new(0.0, 1.0, 0.0),
                    moment: m,
                },
                CurrentElement {
                    position: Vec3::new(0.0, -1.0, 0.0),
                    moment: -m,
                },
            ],
        };
        // û ⊥ baseline (y): any direction in the xz plane
        let e = radiate(&s, Direction::new(0.4, 0.0)).unwrap();
        assert_eq!(e.norm(), 0.0);
    }

    #[test]
    fn empty_sources_error() {
        let s = SourceSet {
            wavenumber: 1.0,
            elements: vec![],
        };
        assert!(radiate(&s, Direction::BORESIGHT).is_err());
        assert!(radiate_many(&s, &[Direction::BORESIGHT]).is_err());
    }

    #[test]
    fn directivity_handles_zero_and_bad_power() {
        assert_eq!(directivity(c(0.0, 0.0), 1.0).unwrap(), f64::NEG_INFINITY);
        assert!(directivity(c(1.0, 0.0), 0.0).is_err());
        let a = directivity(c(1.0, 0.0), 1.0).unwrap();
        let b = directivity(c(2.0, 0.0), 4.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn cut_points_are_monotone_and_inclusive() {
        let pts = cut_points(0.0, -8f64.to_radians(), 8f64.to_radians(), 0.02f64.to_radians()).unwrap();
        assert_eq!(pts.len(), 801);
        assert!(pts.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(cut_points(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(cut_points(0.0, 0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn sphere_weights_cover_full_solid_angle() {
        let total: f64 = SphereQuadrature::default().nodes().iter().map(|n| n.1).sum();
        assert!((total - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn sidelobe_refinement_on_parabola() {
        let mk = |a: f64, d: f64| FarFieldSample {
            direction: Direction::new(a, 0.0),
            cut_angle: a,
            e_co: c(0.0, 0.0),
            e_cr: c(0.0, 0.0),
            d_co: d,
            d_cr: 0.0,
        };
        let f = |x: f64| 10.0 - (x - 1.03).powi(2) * 50.0;
        let samples: Vec<_> = [0.9, 1.0, 1.1, 1.2].iter().map(|&x| mk(x, f(x))).collect();
        let lobes = sidelobes(&samples);
        assert_eq!(lobes.len(), 1);
        assert!((lobes[0].angle - 1.03).abs() < 1e-12);
        assert!((lobes[0].level_db - 10.0).abs() < 1e-12);
    }
}
