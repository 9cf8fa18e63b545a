//! Brute-force reference implementations. Nothing here calls into the
//! engine code paths it is used to check; inputs are plain numbers.
#![allow(dead_code)]

use num_complex::Complex64;

pub const ETA0: f64 = 376.730_313_668;
pub const C0: f64 = 299_792_458.0;

pub type C3 = [Complex64; 3];

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub quantity: String,
    pub engine: f64,
    pub oracle: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(quantity: &str, engine: f64, oracle: f64, tolerance: f64) -> Self {
        let scale = oracle.abs().max(f64::MIN_POSITIVE);
        let rel_error = (engine - oracle).abs() / scale;
        OracleReport {
            quantity: quantity.to_string(),
            engine,
            oracle,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }

    /// Report for an already-computed relative error.
    pub fn from_error(quantity: &str, engine: f64, oracle: f64, rel_error: f64, tolerance: f64) -> Self {
        OracleReport {
            quantity: quantity.to_string(),
            engine,
            oracle,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: engine {:.12e}, oracle {:.12e}, rel err {:.3e} (tol {:.1e}) {}",
            self.quantity,
            self.engine,
            self.oracle,
            self.rel_error,
            self.tolerance,
            if self.pass { "ok" } else { "MISMATCH" }
        )
    }
}

/// Far-field sum over point currents with the phase written in global
/// spherical angles of both source and observer. `sources` holds
/// `(r, θ', φ', J·dS)`; the observer polar angle is measured from +z so the
/// boresight offset `theta_z` maps to `π - theta_z`. `sign` is +1 for the
/// physical kernel; -1 gives the mutated kernel used to prove the check
/// bites.
pub fn direct_field_spherical(sources: &[(f64, f64, f64, C3)], k: f64, theta_z: f64, phi: f64, sign: f64) -> C3 {
    let th = std::f64::consts::PI - theta_z;
    let (st, ct) = th.sin_cos();
    let pref = Complex64::new(0.0, -k * ETA0 / (4.0 * std::f64::consts::PI));
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for &(r, tp, pp, m) in sources {
        let arg = k * r * (tp.sin() * st * (pp - phi).cos() + tp.cos() * ct);
        let ph = Complex64::new(0.0, sign * arg).exp();
        for a in 0..3 {
            acc[a] += m[a] * ph;
        }
    }
    [acc[0] * pref, acc[1] * pref, acc[2] * pref]
}

/// Same sum for arbitrary Cartesian source points.
pub fn direct_field_cartesian(sources: &[([f64; 3], C3)], k: f64, theta_z: f64, phi: f64) -> C3 {
    let th = std::f64::consts::PI - theta_z;
    let u = [th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos()];
    let pref = Complex64::new(0.0, -k * ETA0 / (4.0 * std::f64::consts::PI));
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for (p, m) in sources {
        let arg = k * (u[0] * p[0] + u[1] * p[1] + u[2] * p[2]);
        let ph = Complex64::new(arg.cos(), arg.sin());
        for a in 0..3 {
            acc[a] += m[a] * ph;
        }
    }
    [acc[0] * pref, acc[1] * pref, acc[2] * pref]
}

/// Co-polar (Ludwig 3, y reference) component of a Cartesian far field at
/// boresight offset `theta_z`, azimuth `phi`, built from the textbook
/// spherical unit vectors at polar angle `π - theta_z`.
pub fn copol_y(e: C3, theta_z: f64, phi: f64) -> Complex64 {
    let th = std::f64::consts::PI - theta_z;
    let theta_hat = [th.cos() * phi.cos(), th.cos() * phi.sin(), -th.sin()];
    let phi_hat = [-phi.sin(), phi.cos(), 0.0];
    let dot = |v: [f64; 3]| e[0] * v[0] + e[1] * v[1] + e[2] * v[2];
    let e_th = dot(theta_hat);
    let e_ph = dot(phi_hat);
    -phi.sin() * e_th + phi.cos() * e_ph
}

pub fn norm3(v: C3) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

pub fn sub3(a: C3, b: C3) -> C3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross_rc(a: [f64; 3], b: C3) -> C3 {
    [
        b[2] * a[1] - b[1] * a[2],
        b[0] * a[2] - b[2] * a[0],
        b[1] * a[0] - b[0] * a[1],
    ]
}

/// Textbook PO current `2 n̂ × H` on the focus-fed paraboloid
/// `z = F - ρ²/4F`, with `H = r̂ × E / η₀` for the feed wave at `pos`.
pub fn po_current(pos: [f64; 3], e_inc: C3, focal_length: f64) -> C3 {
    let f = focal_length;
    let g = [pos[0] / (2.0 * f), pos[1] / (2.0 * f), 1.0];
    let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    let n = [-g[0] / gn, -g[1] / gn, -g[2] / gn];
    let r = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt();
    let k_hat = [pos[0] / r, pos[1] / r, pos[2] / r];
    let h = cross_rc(k_hat, e_inc).map(|c| c / ETA0);
    cross_rc(n, h).map(|c| c * 2.0)
}

/// Best assignment over every combination of per-cell options, by plain
/// enumeration. Returns chosen option indices and the residual magnitude.
pub fn exhaustive_states(contributions: &[Vec<Complex64>], t0: Complex64) -> (Vec<usize>, f64) {
    let n = contributions.len();
    let mut choice = vec![0usize; n];
    let mut best = (choice.clone(), f64::INFINITY);
    loop {
        let mut total = t0;
        for (i, &c) in choice.iter().enumerate() {
            total += contributions[i][c];
        }
        if total.norm() < best.1 {
            best = (choice.clone(), total.norm());
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choice[i] += 1;
            if choice[i] < contributions[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Directivity `4πA/λ²` of a uniformly illuminated circular aperture, dB.
/// `None` when the inputs are not positive or the result overflows.
pub fn aperture_directivity_db(d_ap: f64, lambda: f64) -> Option<f64> {
    if !(d_ap > 0.0 && lambda > 0.0) {
        return None;
    }
    let area = std::f64::consts::PI * d_ap * d_ap / 4.0;
    let d = 4.0 * std::f64::consts::PI * area / (lambda * lambda);
    d.is_finite().then(|| 10.0 * d.log10())
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Surface area of the paraboloid cap `0 ≤ θ' ≤ theta_max` seen from the
/// focus, via `∫ 2π r² sinθ' sec(θ'/2) dθ'` with `r = F sec²(θ'/2)`.
pub fn cap_area(focal_length: f64, theta_max: f64) -> f64 {
    let f = |t: f64| {
        let r = focal_length / (0.5 * t).cos().powi(2);
        2.0 * std::f64::consts::PI * r * r * t.sin() / (0.5 * t).cos()
    };
    adaptive_simpson(&f, 0.0, theta_max, 1e-10)
}

/// Closed-form surface area of the same cap from the paraboloid of
/// revolution formula, as a check on the quadrature oracle.
pub fn cap_area_closed_form(focal_length: f64, rho: f64) -> f64 {
    let f = focal_length;
    8.0 * std::f64::consts::PI * f * f / 3.0 * ((1.0 + (rho / (2.0 * f)).powi(2)).powf(1.5) - 1.0)
}

/// Feed power reaching the cap, by integrating `|E|² r² / 2η₀` for a
/// field whose magnitude is `cos^q θ / r` times `shape(θ, φ)`.
pub fn intercepted_power<S: Fn(f64, f64) -> f64>(q: f64, theta0: f64, shape: S) -> f64 {
    let inner = |t: f64| {
        let g = |p: f64| shape(t, p).powi(2);
        let ring = adaptive_simpson(&g, 0.0, 2.0 * std::f64::consts::PI, 1e-11);
        t.cos().powf(2.0 * q) * t.sin() * ring
    };
    adaptive_simpson(&inner, 0.0, theta0, 1e-12) / (2.0 * ETA0)
}
