use super::pwl::PwlFunction;
use crate::{Error, Result, Scalar};

/// A slope bound in `[0, 1]` (the `Δ` of the lower and the `a` of the upper
/// regularization).
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct SlopeBound<T: Scalar>(T);

impl<T: Scalar> SlopeBound<T> {
    pub fn new(value: T) -> Result<Self> {
        if value < T::zero() || value > T::one() {
            return Err(Error::SlopeBound(value.as_f64()));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    /// `1 − value`.
    pub fn complement(&self) -> Self {
        Self(T::one() - self.0.clone())
    }
}

/// `S(x) = min_{y ∈ [x, x1]} g(y)`, swept right to left.
fn suffix_min<T: Scalar>(g: &PwlFunction<T>) -> PwlFunction<T> {
    let pts = g.points();
    let n = pts.len();
    let mut rev: Vec<(T, T)> = Vec::with_capacity(n + 4);
    let mut s = pts[n - 1].1.clone();
    rev.push(pts[n - 1].clone());
    for i in (0..n - 1).rev() {
        let (xi, gi) = &pts[i];
        let (xn, gn) = &pts[i + 1];
        if *gi >= s {
            rev.push((xi.clone(), s.clone()));
            continue;
        }
        // g rises from gi < s to gn ≥ s on this segment.
        if *gn > s {
            let xc = xi.clone() + (s.clone() - gi.clone()) * (xn.clone() - xi.clone()) / (gn.clone() - gi.clone());
            if xc < *xn {
                rev.push((xc, s.clone()));
            }
        }
        rev.push((xi.clone(), gi.clone()));
        s = gi.clone();
    }
    rev.reverse();
    PwlFunction::new(rev).expect("sweep keeps abscissae ordered").simplified()
}

/// `P(x) = min_{y ∈ [x0, x]} g(y)`, by reflecting `x ↦ −x`.
fn prefix_min<T: Scalar>(g: &PwlFunction<T>) -> PwlFunction<T> {
    let mirrored: Vec<(T, T)> = g.points().iter().rev().map(|(x, y)| (-x.clone(), y.clone())).collect();
    let s = suffix_min(&PwlFunction::new(mirrored).expect("mirror"));
    let back: Vec<(T, T)> = s.points().iter().rev().map(|(x, y)| (-x.clone(), y.clone())).collect();
    PwlFunction::new(back).expect("mirror")
}

fn check_interval<T: Scalar>(n: &PwlFunction<T>, interval: &(T, T)) -> Result<PwlFunction<T>> {
    let (lo, hi) = interval;
    if lo == n.x0() && hi == n.x1() {
        return Ok(n.clone());
    }
    n.restrict(lo, hi)
}

/// Largest minorant of `n` on `interval` whose slopes lie in `[Δ, 1]`:
/// the infimal convolution with `k(t) = t` for `t ≥ 0`, `Δ·t` for `t < 0`.
pub fn lower_regularization<T: Scalar>(n: &PwlFunction<T>, delta: &SlopeBound<T>, interval: &(T, T)) -> Result<PwlFunction<T>> {
    let n = check_interval(n, interval)?;
    let d = delta.value();
    // y ≤ x contributes x + min_{y ≤ x}(n(y) − y).
    let left = prefix_min(&n.add_linear(&-T::one(), &T::zero())).add_linear(&T::one(), &T::zero());
    // y ≥ x contributes Δx + min_{y ≥ x}(n(y) − Δy).
    let right = suffix_min(&n.add_linear(&-d.clone(), &T::zero())).add_linear(d, &T::zero());
    left.pointwise_min(&right)
}

/// Smallest majorant of `n` on `interval` whose slopes lie in `[0, a]`:
/// the supremal convolution with the dual kernel.
///
/// On a compact interval this always exists; see
/// [`upper_regularization_anchored`] for the variant that additionally
/// requires agreement with `n` at the left endpoint.
pub fn upper_regularization<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, interval: &(T, T)) -> Result<PwlFunction<T>> {
    let n = check_interval(n, interval)?;
    let a = a.value();
    // y ≤ x contributes max_{y ≤ x} n(y).
    let left = prefix_min(&n.neg()).neg();
    // y ≥ x contributes ax + max_{y ≥ x}(n(y) − ay).
    let right = suffix_min(&n.add_linear(&-a.clone(), &T::zero()).neg()).neg().add_linear(a, &T::zero());
    left.pointwise_max(&right)
}

/// Upper regularization that must start at `n(x0)`; fails when the total
/// rise of `n` cannot be absorbed by slopes `≤ a`.
pub fn upper_regularization_anchored<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, interval: &(T, T)) -> Result<PwlFunction<T>> {
    let up = upper_regularization(n, a, interval)?;
    let start = n.eval(&interval.0);
    if up.eval(&interval.0) != start {
        return Err(Error::Infeasible(format!(
            "no majorant with slopes in [0, {}] passes through ({}, {})",
            a.value().as_f64(),
            interval.0.as_f64(),
            start.as_f64()
        )));
    }
    Ok(up)
}

/// Both sides of `upper_a(id − n) = id − lower_{1−a}(n)`, computed independently.
pub fn duality_check<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, interval: &(T, T)) -> Result<(PwlFunction<T>, PwlFunction<T>)> {
    let id_minus_n = n.neg().add_linear(&T::one(), &T::zero());
    let lhs = upper_regularization(&id_minus_n, a, interval)?;
    let rhs = lower_regularization(n, &a.complement(), interval)?.neg().add_linear(&T::one(), &T::zero());
    Ok((lhs, rhs))
}

/// `n1 ≻ n2`: `n1 − n2` is non-decreasing.
pub fn succ<T: Scalar>(n1: &PwlFunction<T>, n2: &PwlFunction<T>) -> Result<bool> {
    Ok(n1.sub(n2)?.is_increasing())
}

/// The witness `n1(r) = a·r − upper_a(n)(r) + n(r)` on `[0, δ]`.
///
/// Fails when the upper regularization does not pass through `n(0)`, since
/// the witness must vanish at 0.
pub fn lemma2_construct<T: Scalar>(n: &PwlFunction<T>, a: &SlopeBound<T>, delta: &T) -> Result<PwlFunction<T>> {
    if !n.x0().is_zero() {
        return Err(Error::InvalidArgument("witness construction needs a domain starting at 0".into()));
    }
    let interval = (T::zero(), delta.clone());
    let up = upper_regularization_anchored(n, a, &interval)?;
    let n = check_interval(n, &interval)?;
    let n1 = n.sub(&up)?.add_linear(a.value(), &T::zero());
    Ok(n1)
}
