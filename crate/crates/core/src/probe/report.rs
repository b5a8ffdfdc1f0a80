use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{pade_poles, ray_growth, GrowthProfile, PadeResult};
use crate::density::DensityReport;
use crate::seqcore::CoefficientSequence;
use crate::{Error, Result};

/// Probe thresholds. None of them come from theory; they are pinned here so
/// reports and tests can state them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub angular_tol: f64,
    pub froissart_tol: f64,
    /// Largest admissible tail bound in `ray_growth`.
    pub ray_tol: f64,
    /// Detections with radius in this band count as lying on the circle.
    pub radius_band: (f64, f64),
    /// A ray is a detection when every successive growth ratio exceeds this.
    pub growth_threshold: f64,
    /// Dense detections: at least `dense_min` on the circle with no circular
    /// gap wider than `dense_gap`.
    pub dense_min: usize,
    pub dense_gap: f64,
    /// Rotations sampled by the gap form of [`arc_consistency`].
    pub rotations: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            angular_tol: 0.05,
            froissart_tol: 1e-6,
            ray_tol: 1e-9,
            radius_band: (0.9, 1.1),
            growth_threshold: 1.1,
            dense_min: 8,
            dense_gap: PI / 2.0,
            rotations: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMethod {
    Pade,
    RayGrowth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Angle in `(−π, π]`.
    pub theta: f64,
    pub radius: f64,
    /// Heuristic weight in `[0, 1]`.
    pub confidence: f64,
    pub method: ProbeMethod,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbeRequest {
    /// `[L/M]` approximants to compute.
    pub pade: Vec<(usize, usize)>,
    pub rays: Vec<f64>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub method: Vec<ProbeMethod>,
    pub detections: Vec<Detection>,
    /// `πΔ` when a density estimate was supplied.
    pub predicted_half_angle: Option<f64>,
    pub consistent: Option<bool>,
    pub natural_boundary: bool,
    pub evidence: Vec<String>,
    pub pade: Vec<PadeResult>,
    pub rays: Vec<GrowthProfile>,
    pub config: ProbeConfig,
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Widest circular gap between sorted angles (`2π` when there are none).
fn max_gap(angles: &[f64]) -> f64 {
    let mut a: Vec<f64> = angles.to_vec();
    a.sort_by(f64::total_cmp);
    match (a.first(), a.last()) {
        (Some(&lo), Some(&hi)) => a.windows(2).map(|w| w[1] - w[0]).fold(2.0 * PI - (hi - lo), f64::max),
        _ => 2.0 * PI,
    }
}

impl ProbeReport {
    pub fn on_circle(&self) -> impl Iterator<Item = &Detection> {
        let (lo, hi) = self.config.radius_band;
        self.detections.iter().filter(move |d| (lo..=hi).contains(&d.radius))
    }

    /// Some on-circle detection with `|θ| ≤ half_angle + angular_tol`, or
    /// dense detections.
    pub fn consistent_with(&self, half_angle: f64) -> bool {
        self.natural_boundary || self.on_circle().any(|d| d.theta.abs() <= half_angle + self.config.angular_tol)
    }
}

/// Runs the requested Padé approximants and rays and collects detections.
/// `delta`, when known, fills the predicted arc and the consistency flag.
pub fn run_probe(seq: &CoefficientSequence, req: &ProbeRequest, cfg: &ProbeConfig, delta: Option<f64>) -> Result<ProbeReport> {
    let mut method = Vec::new();
    let mut detections = Vec::new();
    let mut evidence = Vec::new();
    let mut pade = Vec::new();
    for &(l, m) in &req.pade {
        let r = pade_poles(seq, l, m, cfg.froissart_tol)?;
        let (lo, hi) = cfg.radius_band;
        let near = r.poles.iter().filter(|p| (lo..=hi).contains(&p.norm())).count();
        evidence.push(format!(
            "[{l}/{m}]: {} poles kept, {near} with radius in [{lo}, {hi}], {} Froissart pairs, condition {:.3e}",
            r.poles.len(),
            r.froissart.len(),
            r.condition
        ));
        for p in &r.poles {
            let radius = p.norm();
            detections.push(Detection {
                theta: wrap_angle(p.arg()),
                radius,
                confidence: (-10.0 * radius.ln().abs()).exp(),
                method: ProbeMethod::Pade,
            });
        }
        pade.push(r);
    }
    if !pade.is_empty() {
        method.push(ProbeMethod::Pade);
    }
    let mut rays = Vec::new();
    if !req.rays.is_empty() {
        method.push(ProbeMethod::RayGrowth);
        for &theta in &req.rays {
            let p = ray_growth(seq, theta, &req.radii, cfg.ray_tol)?;
            let grows = !p.growth_ratios.is_empty() && p.growth_ratios.iter().all(|&q| q > cfg.growth_threshold);
            if grows {
                let (first, last) = (&p.points[0], &p.points[p.points.len() - 1]);
                // Log growth relative to a simple pole, clamped to [0, 1].
                let exponent = (last.value / first.value).ln() / ((1.0 - first.r) / (1.0 - last.r)).ln();
                detections.push(Detection {
                    theta: wrap_angle(theta),
                    radius: 1.0,
                    confidence: exponent.clamp(0.0, 1.0),
                    method: ProbeMethod::RayGrowth,
                });
            }
            evidence.push(format!("ray θ = {theta:.6}: growth ratios {:?}{}", p.growth_ratios, if grows { " (detection)" } else { "" }));
            rays.push(p);
        }
    }
    let mut report = ProbeReport {
        method,
        detections,
        predicted_half_angle: delta.map(|d| PI * d),
        consistent: None,
        natural_boundary: false,
        evidence,
        pade,
        rays,
        config: cfg.clone(),
    };
    let angles: Vec<f64> = report.on_circle().map(|d| d.theta).collect();
    report.natural_boundary = angles.len() >= cfg.dense_min && max_gap(&angles) <= cfg.dense_gap;
    if report.natural_boundary {
        report.evidence.push(format!(
            "{} detections near |z| = 1 with no gap wider than {:.3} rad: treated as dense (heuristic, not a certified boundary)",
            angles.len(),
            cfg.dense_gap
        ));
    }
    report.consistent = report.predicted_half_angle.map(|h| report.consistent_with(h));
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcForm {
    /// A detection on `{|θ| ≤ πΔ}`.
    Single,
    /// A detection on every closed arc of length `πΔ`.
    EveryArc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcConsistency {
    pub consistent: bool,
    pub form: ArcForm,
    pub delta: f64,
    pub half_angle: f64,
    /// Angles of the detections that satisfied the check.
    pub witnesses: Vec<f64>,
    pub narrative: String,
}

/// Compares probe detections with the arc predicted by the density report.
pub fn arc_consistency(density: &DensityReport, probe: &ProbeReport, form: ArcForm) -> Result<ArcConsistency> {
    let delta = density.delta;
    if !delta.is_finite() || !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("density report has no usable Δ ({delta})")));
    }
    let tol = probe.config.angular_tol;
    let circle: Vec<f64> = probe.on_circle().map(|d| d.theta).collect();
    let (consistent, witnesses, what) = match form {
        ArcForm::Single => {
            let half = PI * delta;
            let w: Vec<f64> = circle.iter().copied().filter(|t| t.abs() <= half + tol).collect();
            let what = format!("a detection with |θ| ≤ πΔ = {half:.4} (+{tol} rad)");
            (!w.is_empty() || probe.natural_boundary, w, what)
        }
        ArcForm::EveryArc => {
            let half = PI * delta / 2.0;
            let n = probe.config.rotations.max(1);
            let mut w = Vec::new();
            let mut all = true;
            for j in 0..n {
                let phi = wrap_angle(-PI + 2.0 * PI * (j as f64 + 0.5) / n as f64);
                match circle.iter().find(|&&t| circular_distance(t, phi) <= half + tol) {
                    Some(&t) => w.push(t),
                    None => all = false,
                }
            }
            w.sort_by(f64::total_cmp);
            w.dedup();
            let what = format!("a detection on each of {n} arcs of length πΔ = {:.4} (+{tol} rad each side)", 2.0 * half);
            (all || probe.natural_boundary, w, what)
        }
    };
    let narrative = if consistent {
        if witnesses.is_empty() || (form == ArcForm::EveryArc && probe.natural_boundary) {
            format!("consistent: detections are dense on the circle, which meets the requirement of {what}")
        } else {
            format!("consistent: found {what}")
        }
    } else {
        format!(
            "inconsistent: no {what} among {} on-circle detections. The theorem asserts that such a singularity \
             exists, so this indicts the probe (resolution, degrees, radii) or the Δ estimate, not the theorem",
            circle.len()
        )
    };
    Ok(ArcConsistency { consistent, form, delta, half_angle: PI * delta, witnesses, narrative })
}
