use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// `Re ζ = −ε`, from `−iπ` to `iπ`.
    Vertical,
    /// `−ε` only between `∓iπb`, with the ends pushed out to `Re ζ = ε1`.
    Rectangle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub epsilon: f64,
    pub epsilon1: f64,
    pub b: f64,
    pub path: PathKind,
    /// Absolute tolerance per path segment.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-9
}

impl ContourSpec {
    pub fn vertical(epsilon: f64) -> Self {
        Self { epsilon, epsilon1: epsilon, b: 0.5, path: PathKind::Vertical, tol: default_tol() }
    }

    pub fn rectangle(epsilon: f64, epsilon1: f64, b: f64) -> Self {
        Self { epsilon, epsilon1, b, path: PathKind::Rectangle, tol: default_tol() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon1 > 0.0 && self.b > 0.0 && self.b < 1.0 && self.tol > 0.0) {
            return Err(Error::InvalidArgument("contour needs eps, eps1 > 0, 0 < b < 1 and tol > 0".into()));
        }
        Ok(())
    }

    /// Path vertices, traversed in order.
    pub fn vertices(&self) -> Vec<Complex64> {
        let (e, e1, pb) = (self.epsilon, self.epsilon1, PI * self.b);
        let c = Complex64::new;
        match self.path {
            PathKind::Vertical => vec![c(-e, -PI), c(-e, PI)],
            PathKind::Rectangle => vec![c(e1, -PI), c(e1, -pb), c(-e, -pb), c(-e, pb), c(e1, pb), c(e1, PI)],
        }
    }

    pub fn length(&self) -> f64 {
        self.vertices().windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// `max_{ζ ∈ γ} Re(−zζ)/|z|` for `z = e^{iθ}`; attained at a vertex.
    pub fn h_path(&self, theta: f64) -> f64 {
        let u = Complex64::from_polar(1.0, theta);
        self.vertices().iter().map(|z| (-u * z).re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `πb|sin θ| + ε cos θ`.
    pub fn h_bound(&self, theta: f64) -> f64 {
        PI * self.b * theta.sin().abs() + self.epsilon * theta.cos()
    }

    /// Rejects singular points `w` of `f` for which `−e^ζ = w` puts `ζ` on the
    /// path or between it and the plain vertical path.
    pub fn check_singularities(&self, singular_points: &[Complex64]) -> Result<()> {
        for &w in singular_points {
            if w.norm() == 0.0 {
                return Err(Error::InvalidArgument("f is singular at the origin".into()));
            }
            let re = w.norm().ln();
            let arg = (-w).arg();
            let ims = if (arg.abs() - PI).abs() < 1e-15 { vec![PI, -PI] } else { vec![arg] };
            let hit = match self.path {
                PathKind::Vertical => re <= -self.epsilon,
                PathKind::Rectangle => re <= -self.epsilon || (re <= self.epsilon1 && ims.iter().any(|im| im.abs() >= PI * self.b - 1e-15)),
            };
            if hit {
                return Err(Error::InvalidArgument(format!(
                    "path meets or encloses the singularity at w = {w} (zeta = {re} + {}i)",
                    ims[0]
                )));
            }
        }
        Ok(())
    }
}

/// A function evaluable on the path (its continuation, where needed),
/// with its known singular points.
pub struct BoundaryFunction<'a> {
    pub f: &'a (dyn Fn(Complex64) -> Complex64 + Sync),
    pub singular_points: Vec<Complex64>,
}

// Gauss–Kronrod 15/7 nodes and weights on [−1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639,
    0.949107912342758525,
    0.864864423359769073,
    0.741531185599394440,
    0.586087235467691130,
    0.405845151377397167,
    0.207784955007898468,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529225,
    0.063092092629978553,
    0.104790010322250184,
    0.140653259715525919,
    0.169004726639267903,
    0.190350578064785410,
    0.204432940075298892,
    0.209482141084727828,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [0.129484966168869693, 0.279705391489276668, 0.381830050505118945, 0.417959183673469388];

/// Kronrod value, Kronrod–Gauss difference, and the Kronrod integral of `|g|`.
fn gk15(g: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mid = g(c);
    let mut k = mid * WGK[7];
    let mut gauss = mid * WG[3];
    let mut abs = mid.norm() * WGK[7];
    for i in 0..7 {
        let (lo, hi) = (g(c - h * XGK[i]), g(c + h * XGK[i]));
        k += (lo + hi) * WGK[i];
        abs += (lo.norm() + hi.norm()) * WGK[i];
        if i % 2 == 1 {
            gauss += (lo + hi) * WG[i / 2];
        }
    }
    (k * h, ((k - gauss) * h).norm(), abs * h.abs())
}

/// Adaptive bisection on `[a, b]` until the Kronrod–Gauss difference of each
/// piece is below its share of `tol`, or at the roundoff level of `∫|g|`.
pub fn integrate(g: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    fn go(g: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Result<Complex64> {
        let (v, err, abs) = gk15(g, a, b);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= tol || err <= 50.0 * f64::EPSILON * abs {
            return Ok(v);
        }
        if depth == 0 {
            return Err(Error::Quadrature(format!("error {err:.3e} above {tol:.3e} on [{a}, {b}]")));
        }
        let m = 0.5 * (a + b);
        Ok(go(g, a, m, tol / 2.0, depth - 1)? + go(g, m, b, tol / 2.0, depth - 1)?)
    }
    go(g, a, b, tol, 40)
}

/// `F(z) = (1/2πi) ∫_γ f(−e^ζ) e^{−zζ} dζ`; at `z = m ∈ ℕ` this is
/// `(−1)^m a_m`.
pub fn contour_interpolant(f: &BoundaryFunction, z: Complex64, spec: &ContourSpec) -> Result<Complex64> {
    spec.validate()?;
    spec.check_singularities(&f.singular_points)?;
    let v = spec.vertices();
    let segments: Vec<(Complex64, Complex64)> = v.windows(2).map(|w| (w[0], w[1])).collect();
    let parts: Vec<Complex64> = segments
        .par_iter()
        .map(|&(p, q)| {
            let d = q - p;
            let g = |t: f64| {
                let zeta = p + d * t;
                (f.f)(-zeta.exp()) * (-z * zeta).exp() * d
            };
            integrate(&g, 0.0, 1.0, spec.tol)
        })
        .collect::<Result<_>>()?;
    let total: Complex64 = parts.into_iter().sum();
    Ok(total / Complex64::new(0.0, 2.0 * PI))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub theta: f64,
    pub radius: f64,
    pub log_abs_f: f64,
    /// `ln(L·max|f|/2π) + R·h_path(θ)`, a strict bound for `ln|F|`.
    pub log_bound: f64,
    pub h_path: f64,
    pub h_bound: f64,
    pub ok: bool,
}

/// Checks `|F(Re^{iθ})| ≤ (L·M/2π)·e^{R·h_path(θ)}`, `M = max |f(−e^ζ)|` on
/// the path (sampled), at each requested ray and radius.
pub fn growth_check(f: &BoundaryFunction, spec: &ContourSpec, thetas: &[f64], radii: &[f64]) -> Result<Vec<GrowthRecord>> {
    let v = spec.vertices();
    let m = v
        .windows(2)
        .flat_map(|w| (0..=400).map(move |i| w[0] + (w[1] - w[0]) * (i as f64 / 400.0)))
        .map(|zeta| (f.f)(-zeta.exp()).norm())
        .fold(0.0, f64::max);
    let log_c = (spec.length() * m / (2.0 * PI)).ln();
    let mut out = Vec::new();
    for &theta in thetas {
        for &r in radii {
            let fz = contour_interpolant(f, Complex64::from_polar(r, theta), spec)?;
            let h_path = spec.h_path(theta);
            let log_abs_f = fz.norm().ln();
            let log_bound = log_c + r * h_path;
            out.push(GrowthRecord {
                theta,
                radius: r,
                log_abs_f,
                log_bound,
                h_path,
                h_bound: spec.h_bound(theta),
                ok: log_abs_f <= log_bound + 1e-9,
            });
        }
    }
    Ok(out)
}
