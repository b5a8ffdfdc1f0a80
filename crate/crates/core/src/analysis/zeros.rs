use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seqcore::{sign_changes, sign_changes_f64};
use crate::{Error, Result};

/// `N − s`, with `s` the number of sign changes of `a_0..a_N`: a lower bound
/// for the zeros on `[0, N]` of any real-analytic `f` with `f(n) = (−1)^n a_n`.
pub fn min_zero_bound(seq: &[f64]) -> usize {
    if seq.is_empty() {
        return 0;
    }
    let s = sign_changes(seq).len();
    (seq.len() - 1).saturating_sub(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroVerification {
    pub bound: usize,
    pub crossings: usize,
    /// Allowance for even-order zeros, which sign crossings cannot see.
    pub slack: usize,
    pub holds: bool,
    /// Largest `|f(n) − (−1)^n a_n|` over the integer samples.
    pub interpolation_error: f64,
}

/// Counts strict sign crossings of `samples` (pairs `(x, f(x))`, increasing
/// in `x`) and compares them with [`min_zero_bound`].
///
/// The samples must include every integer `0..=N`, where they must match
/// `(−1)^n a_n` within `tol`.
pub fn verify_zero_bound(seq: &[f64], samples: &[(f64, f64)], tol: f64, slack: usize) -> Result<ZeroVerification> {
    let mut interpolation_error = 0.0f64;
    for (n, a) in seq.iter().enumerate() {
        let target = if n % 2 == 0 { *a } else { -*a };
        let i = samples.partition_point(|p| p.0 < n as f64 - 1e-9);
        let Some(&(x, fx)) = samples.get(i).filter(|p| (p.0 - n as f64).abs() <= 1e-9) else {
            return Err(Error::InvalidArgument(format!("no sample at the integer {n}")));
        };
        let err = (fx - target).abs();
        if err > tol {
            return Err(Error::InvalidArgument(format!("f({x}) = {fx} but (-1)^n a_n = {target}")));
        }
        interpolation_error = interpolation_error.max(err);
    }
    let values: Vec<f64> = samples.iter().map(|p| p.1).collect();
    let crossings = sign_changes_f64(&values, 0.0).len();
    let bound = min_zero_bound(seq);
    Ok(ZeroVerification { bound, crossings, slack, holds: crossings + slack >= bound, interpolation_error })
}

/// Smooth real interpolant of `(−1)^n a_n` at `n = 0..N`: a sum of shifted
/// sinc kernels plus `jitter·sin(πx)·w(x)`, where `w` is a seeded random
/// trigonometric polynomial. The second term vanishes at the integers and
/// makes the zeros generic (simple).
#[derive(Clone, Debug)]
pub struct SincInterpolant {
    values: Vec<f64>,
    jitter: f64,
    modes: Vec<(f64, f64, f64)>,
}

impl SincInterpolant {
    pub fn new(seq: &[f64], jitter: f64, seed: u64) -> Self {
        let values = seq.iter().enumerate().map(|(n, a)| if n % 2 == 0 { *a } else { -*a }).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..4).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.1..0.9), rng.random_range(0.0..2.0 * PI))).collect();
        Self { values, jitter, modes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let base: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let u = x - n as f64;
                if u.abs() < 1e-12 {
                    *v
                } else {
                    v * (PI * u).sin() / (PI * u)
                }
            })
            .sum();
        let w: f64 = self.modes.iter().map(|(c, om, ph)| c * (om * x + ph).cos()).sum();
        base + self.jitter * (PI * x).sin() * w
    }

    /// Samples on `[0, N]` with spacing `step`, integers included exactly.
    pub fn samples(&self, step: f64) -> Vec<(f64, f64)> {
        let n = self.values.len().saturating_sub(1);
        let per = (1.0 / step).round().max(1.0) as usize;
        let mut out = Vec::with_capacity(n * per + 1);
        for k in 0..n {
            out.push((k as f64, self.values[k]));
            for j in 1..per {
                let x = k as f64 + j as f64 / per as f64;
                out.push((x, self.eval(x)));
            }
        }
        out.push((n as f64, self.values[n]));
        out
    }
}
