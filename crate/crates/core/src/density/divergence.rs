use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::selfsimilar::SelfSimilarSpec;
use crate::envelope::{lower_regularization, upper_regularization, PwlFunction, SlopeBound};
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Divergent,
    Convergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Evidence {
    /// Local analysis of the integrand `d = αr + β` on the first segment.
    Exact {
        reason: String,
        alpha: f64,
        beta: f64,
    },
    BandSums {
        increments: Vec<f64>,
    },
    GrowthFit {
        c_log: f64,
        c_pole: f64,
        residual: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceVerdict {
    pub verdict: Verdict,
    pub evidence: Evidence,
    /// `(ε, I(ε))` pairs.
    pub truncated_values: Vec<(f64, f64)>,
}

impl DivergenceVerdict {
    pub fn is_divergent(&self) -> bool {
        self.verdict == Verdict::Divergent
    }
}

/// `∫_{x_a}^{x_b} d(r)/r² dr` for a PWL `d` on `[lo, hi]`, `lo > 0`,
/// summed in closed form per segment. Each segment term is clamped at 0
/// since callers only pass non-negative integrands.
fn integral_over_r2<T: Scalar>(d: &PwlFunction<T>) -> f64 {
    d.points()
        .windows(2)
        .map(|w| {
            let (x1, y1) = &w[0];
            let (x2, y2) = &w[1];
            let h = x2.clone() - x1.clone();
            let alpha = (y2.clone() - y1.clone()) / h.clone();
            let beta = y1.clone() - alpha.clone() * x1.clone();
            let log_term = (h.clone() / x1.clone()).as_f64().ln_1p();
            let pole_term = (beta * h / (x1.clone() * x2.clone())).as_f64();
            (alpha.as_f64() * log_term + pole_term).max(0.0)
        })
        .sum()
}

fn check_eps<T: Scalar>(delta: &T, eps: &T) -> Result<()> {
    if *eps <= T::zero() || eps >= delta {
        return Err(Error::InvalidArgument(format!("need 0 < eps < delta, got eps = {}, delta = {}", eps.as_f64(), delta.as_f64())));
    }
    Ok(())
}

fn check_start<T: Scalar>(n: &PwlFunction<T>) -> Result<()> {
    if !n.x0().is_zero() {
        return Err(Error::InvalidArgument("limit function must be given on an interval starting at 0".into()));
    }
    Ok(())
}

/// `n − lower_Δ(n)` on `[0, δ]`.
pub fn lower_gap<T: Scalar>(n: &PwlFunction<T>, bound: &SlopeBound<T>, delta: &T) -> Result<PwlFunction<T>> {
    check_start(n)?;
    let interval = (T::zero(), delta.clone());
    let phi = lower_regularization(n, bound, &interval)?;
    n.restrict(&T::zero(), delta)?.sub(&phi)
}

/// `upper_a(n) − n` on `[0, δ]`.
pub fn upper_gap<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, delta: &T) -> Result<PwlFunction<T>> {
    check_start(n)?;
    let interval = (T::zero(), delta.clone());
    let psi = upper_regularization(n, a, &interval)?;
    psi.sub(&n.restrict(&T::zero(), delta)?)
}

/// `∫_ε^δ (n − lower_Δ(n))/r² dr`, with the regularization taken on `[0, δ]`.
pub fn truncated_integral<T: Scalar>(n: &PwlFunction<T>, bound: &SlopeBound<T>, delta: &T, eps: &T) -> Result<f64> {
    check_eps(delta, eps)?;
    Ok(integral_over_r2(&lower_gap(n, bound, delta)?.restrict(eps, delta)?))
}

/// `∫_ε^δ (upper_a(n) − n)/r² dr`.
pub fn truncated_upper_integral<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, delta: &T, eps: &T) -> Result<f64> {
    check_eps(delta, eps)?;
    Ok(integral_over_r2(&upper_gap(n, a, delta)?.restrict(eps, delta)?))
}

fn eps_schedule(delta: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|j| delta * 0.5f64.powi(j as i32)).collect()
}

fn sample_integral<T: Scalar>(gap: &PwlFunction<T>, delta: &T, steps: usize) -> Vec<(f64, f64)> {
    eps_schedule(delta.as_f64(), steps)
        .into_iter()
        .filter_map(|e| {
            let eps = T::of_f64(e);
            (eps > T::zero() && eps < *delta).then(|| gap.restrict(&eps, delta).ok().map(|g| (e, integral_over_r2(&g)))).flatten()
        })
        .collect()
}

/// Exact decision for a finite PWL integrand `d ≥ 0` on `[0, δ]`: the
/// integral of `d/r²` diverges iff `d(0) > 0` or `d` leaves 0 with a
/// positive slope.
fn local_verdict<T: Scalar>(gap: &PwlFunction<T>, delta: &T) -> DivergenceVerdict {
    let (x1, y1) = gap.points()[1].clone();
    let y0 = gap.points()[0].1.clone();
    let alpha = (y1 - y0.clone()) / x1;
    let (verdict, reason) = if y0 > T::zero() {
        (Verdict::Divergent, "integrand ~ c/r^2 near 0 (regularization below n at 0)")
    } else if alpha > T::zero() {
        (Verdict::Divergent, "integrand ~ c/r near 0 (first slopes differ)")
    } else {
        (Verdict::Convergent, "integrand vanishes on the first segment")
    };
    DivergenceVerdict {
        verdict,
        evidence: Evidence::Exact { reason: reason.into(), alpha: alpha.as_f64(), beta: y0.as_f64() },
        truncated_values: sample_integral(gap, delta, 20),
    }
}

/// Divergence of `∫_0^δ (n − lower_Δ(n))/r² dr` for a finite PWL `n`; always
/// conclusive.
pub fn classify_divergence<T: Scalar>(n: &PwlFunction<T>, bound: &SlopeBound<T>, delta: &T) -> Result<DivergenceVerdict> {
    Ok(local_verdict(&lower_gap(n, bound, delta)?, delta))
}

/// Divergence of `∫_0^δ (upper_a(n) − n)/r² dr`.
pub fn classify_upper_divergence<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, delta: &T) -> Result<DivergenceVerdict> {
    Ok(local_verdict(&upper_gap(n, a, delta)?, delta))
}

/// Band-sum analysis for a self-similar limit: the integral over each band
/// `[ρ^{j+1}, ρ^j]` below `δ`, for `spec.bands` bands.
pub fn classify_self_similar(spec: &SelfSimilarSpec, bound: &SlopeBound<BigRational>, delta: &BigRational) -> Result<DivergenceVerdict> {
    let mut top = 0;
    while spec.scale(top) > *delta {
        top += 1;
    }
    let bands = spec.bands.max(3);
    // Two spare bands keep the linear floor of the truncation away from the last band.
    let n = spec.truncated_pwl(delta, top + bands + 2)?;
    let gap = lower_gap(&n, bound, delta)?;
    let mut increments = Vec::with_capacity(bands);
    let mut truncated_values = Vec::with_capacity(bands + 1);
    let mut total = if spec.scale(top) < *delta { integral_over_r2(&gap.restrict(&spec.scale(top), delta)?) } else { 0.0 };
    for j in top..top + bands {
        let b = integral_over_r2(&gap.restrict(&spec.scale(j + 1), &spec.scale(j))?);
        increments.push(b);
        total += b;
        truncated_values.push((spec.scale(j + 1).as_f64(), total));
    }
    // The first band can still feel the cut at δ.
    let tail = &increments[1..];
    let largest = tail.iter().cloned().fold(0.0, f64::max);
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    let verdict = if largest <= 1e-12 {
        Verdict::Convergent
    } else if tail.iter().all(|&b| b > 1e-10) && ratios.iter().all(|&q| q >= 0.9) {
        Verdict::Divergent
    } else if tail.iter().all(|&b| b > 0.0) && ratios.iter().all(|&q| q <= 0.5) {
        Verdict::Convergent
    } else {
        Verdict::Inconclusive
    };
    Ok(DivergenceVerdict { verdict, evidence: Evidence::BandSums { increments }, truncated_values })
}

/// Heuristic for empirical limit functions: fits
/// `I(ε) ≈ c_0 + c_log·ln(1/ε) + c_pole/ε` over the dyadic `ε` schedule down
/// to `eps_min` (the data resolution) and reads the verdict off the fitted
/// coefficients.
pub fn classify_growth_fit(n: &PwlFunction<f64>, bound: &SlopeBound<f64>, delta: f64, eps_min: f64) -> Result<DivergenceVerdict> {
    let gap = lower_gap(n, bound, &delta)?;
    let values: Vec<(f64, f64)> = sample_integral(&gap, &delta, 40).into_iter().filter(|&(e, _)| e >= eps_min).collect();
    let inconclusive = |values: Vec<(f64, f64)>, c_log, c_pole, residual| DivergenceVerdict {
        verdict: Verdict::Inconclusive,
        evidence: Evidence::GrowthFit { c_log, c_pole, residual },
        truncated_values: values,
    };
    if values.len() < 4 {
        return Ok(inconclusive(values, f64::NAN, f64::NAN, f64::NAN));
    }
    let fit = &values[values.len().saturating_sub(8)..];
    let e_ref = fit.last().unwrap().0;
    // Columns scaled to O(1) at the smallest ε.
    let log_scale = (1.0 / e_ref).ln().max(1.0);
    let a = DMatrix::from_fn(fit.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => (1.0 / fit[i].0).ln() / log_scale,
        _ => e_ref / fit[i].0,
    });
    let b = DVector::from_iterator(fit.len(), fit.iter().map(|p| p.1));
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| Error::InvalidArgument(format!("growth fit: {e}")))?;
    let residual = (&a * &coef - &b).amax();
    let c_log = coef[1] / log_scale;
    let c_pole = coef[2] * e_ref;
    let scale = 1.0 + b.amax();
    let (pole_tol, log_tol) = (1e-9 * scale * e_ref, 1e-7 * scale / log_scale);
    let verdict = if residual > 1e-6 * scale || c_pole < -pole_tol || c_log < -log_tol && c_pole <= pole_tol {
        Verdict::Inconclusive
    } else if c_pole > pole_tol || c_log > log_tol {
        Verdict::Divergent
    } else {
        Verdict::Convergent
    };
    Ok(DivergenceVerdict { verdict, evidence: Evidence::GrowthFit { c_log, c_pole, residual }, truncated_values: values })
}

/// A limit-function candidate: a finite PWL on `[0, x1]` or a self-similar spec.
#[derive(Clone, Debug)]
pub enum LimitInput {
    Pwl(PwlFunction<BigRational>),
    SelfSimilar(SelfSimilarSpec),
}

impl LimitInput {
    pub fn classify(&self, bound: &SlopeBound<BigRational>, delta: &BigRational) -> Result<DivergenceVerdict> {
        match self {
            LimitInput::Pwl(n) => classify_divergence(n, bound, delta),
            LimitInput::SelfSimilar(s) => classify_self_similar(s, bound, delta),
        }
    }

    /// Largest admissible `δ`.
    pub fn reach(&self) -> BigRational {
        match self {
            LimitInput::Pwl(n) => n.x1().clone(),
            LimitInput::SelfSimilar(_) => BigRational::one(),
        }
    }

    pub fn is_zero_at_origin(&self) -> bool {
        match self {
            LimitInput::Pwl(n) => n.x0().is_zero() && n.points()[0].1.is_zero(),
            LimitInput::SelfSimilar(_) => true,
        }
    }
}
