use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::seqcore::CoefficientSequence;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayPoint {
    pub r: f64,
    /// `|f(r e^{iθ})|` from the compensated f64 sum.
    pub value: f64,
    pub re: f64,
    pub im: f64,
    /// `tail_bound + rounding_bound`.
    pub bound: f64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    /// `|value − value_dd|` against the double-double recomputation.
    pub recompute_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub theta: f64,
    pub points: Vec<RayPoint>,
    /// `value[i+1] / value[i]`.
    pub growth_ratios: Vec<f64>,
    pub monotone: bool,
    /// The tail bound assumes `|a_k| ≤ coeff_bound` beyond the known terms.
    pub coeff_bound: f64,
}

impl GrowthProfile {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// The bound holds at every radius against the recomputation.
    pub fn certified(&self) -> bool {
        self.points.iter().all(|p| p.recompute_diff <= p.bound)
    }
}

/// Neumaier-compensated complex sum.
#[derive(Default)]
struct Compensated {
    s: Complex64,
    c: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        let (re, ce) = two_sum(self.s.re, x.re);
        let (im, ci) = two_sum(self.s.im, x.im);
        self.s = Complex64::new(re, im);
        self.c += Complex64::new(ce, ci);
    }

    fn total(&self) -> Complex64 {
        self.s + self.c
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn dd_of(x: &BigRational) -> TwoFloat {
    let hi = x.as_f64();
    match BigRational::from_float(hi) {
        Some(h) => TwoFloat::new_add(hi, (x - h).as_f64()),
        None => TwoFloat::from(hi),
    }
}

#[derive(Clone, Copy)]
struct DdComplex(TwoFloat, TwoFloat);

impl DdComplex {
    fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }

    fn abs(self) -> f64 {
        (self.0 * self.0 + self.1 * self.1).sqrt().hi()
    }
}

fn eval_dd(seq: &CoefficientSequence, theta: f64, r: f64) -> f64 {
    let (s, c) = TwoFloat::from(theta).sin_cos();
    let rr = TwoFloat::from(r);
    let z = DdComplex(rr * c, rr * s);
    let mut w = DdComplex(TwoFloat::from(1.0), TwoFloat::from(0.0));
    let mut acc = DdComplex(TwoFloat::from(0.0), TwoFloat::from(0.0));
    for a in seq.exact() {
        let t = DdComplex(dd_of(&a.re), dd_of(&a.im)).mul(w);
        acc = DdComplex(acc.0 + t.0, acc.1 + t.1);
        w = w.mul(z);
    }
    acc.abs()
}

/// `|f(r e^{iθ})|` along a ray by compensated partial sums `Σ_{k≤N} a_k z^k`.
///
/// Each value carries a certificate: the geometric tail bound
/// `A r^{N+1}/(1−r)` with `A = max |a_k|`, plus a first-order rounding bound
/// `4u(2+|θ|) Σ (k+2)|a_k| r^k`. The same sum is recomputed in double-double
/// from the exact coefficients and the difference is reported.
/// Fails when the tail bound exceeds `tol`.
pub fn ray_growth(seq: &CoefficientSequence, theta: f64, radii: &[f64], tol: f64) -> Result<GrowthProfile> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("angle {theta} is not finite")));
    }
    if radii.is_empty() || radii.iter().any(|r| !(0.0..1.0).contains(r)) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must be increasing within [0, 1)".into()));
    }
    let coeffs = seq.approx();
    let n = coeffs.len();
    let coeff_bound = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let u = f64::EPSILON / 2.0;
    let points = radii
        .par_iter()
        .map(|&r| {
            let tail_bound = coeff_bound * r.powi(n as i32) / (1.0 - r);
            if tail_bound > tol {
                return Err(Error::Truncation(format!("tail bound {tail_bound:.3e} > {tol:.1e} at r = {r} with N = {}", n - 1)));
            }
            let mut sum = Compensated::default();
            let mut weight = 0.0;
            for (k, a) in coeffs.iter().enumerate() {
                let rk = r.powi(k as i32);
                sum.add(a * Complex64::from_polar(rk, k as f64 * theta));
                weight += (k + 2) as f64 * a.norm() * rk;
            }
            let total = sum.total();
            let value = total.norm();
            let rounding_bound = 4.0 * u * (2.0 + theta.abs()) * weight + 2.0 * u * value;
            let recompute_diff = (value - eval_dd(seq, theta, r)).abs();
            Ok(RayPoint {
                r,
                value,
                re: total.re,
                im: total.im,
                bound: tail_bound + rounding_bound,
                tail_bound,
                rounding_bound,
                recompute_diff,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let growth_ratios: Vec<f64> = points.windows(2).map(|w| w[1].value / w[0].value).collect();
    let monotone = points.windows(2).all(|w| w[1].value >= w[0].value - w[0].bound - w[1].bound);
    Ok(GrowthProfile { theta, points, growth_ratios, monotone, coeff_bound })
}
