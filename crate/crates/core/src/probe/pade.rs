use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::seqcore::{CoefficientSequence, ExactComplex};
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PadeResult {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    /// Pole–zero pairs closer than `froissart_tol`, removed from `poles`.
    pub froissart: Vec<(Complex64, Complex64)>,
    /// 1-norm condition number of the Toeplitz system (exact inverse).
    pub condition: f64,
    pub froissart_tol: f64,
    /// Denominator `1 + q_1 z + … + q_M z^M` (approximated for the report).
    pub denominator: Vec<Complex64>,
    pub numerator: Vec<Complex64>,
}

fn to_c64(c: &ExactComplex) -> Complex64 {
    Complex64::new(c.re.as_f64(), c.im.as_f64())
}

fn c_norm1(c: &ExactComplex) -> f64 {
    to_c64(c).norm()
}

/// Gauss–Jordan over exact complex rationals: returns `A^{-1} b` and `A^{-1}`.
fn solve_exact(a: Vec<Vec<ExactComplex>>, b: Vec<ExactComplex>) -> Result<(Vec<ExactComplex>, Vec<Vec<ExactComplex>>)> {
    let n = a.len();
    let zero = Complex::new(BigRational::zero(), BigRational::zero());
    let one = Complex::new(BigRational::one(), BigRational::zero());
    let mut rows: Vec<Vec<ExactComplex>> = a
        .into_iter()
        .zip(b)
        .enumerate()
        .map(|(i, (mut row, bi))| {
            row.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            row.push(bi);
            row
        })
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return Err(Error::Singular(format!("Toeplitz system has no pivot in column {}", col + 1)));
        };
        rows.swap(col, p);
        let inv = &one / &rows[col][col];
        for x in rows[col].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
    }
    let sol = rows.iter().map(|r| r[2 * n].clone()).collect();
    let inverse = rows.iter().map(|r| r[n..2 * n].to_vec()).collect();
    Ok((sol, inverse))
}

fn norm_1(a: &[Vec<ExactComplex>]) -> f64 {
    let n = a.len();
    (0..n).map(|j| a.iter().map(|row| c_norm1(&row[j])).sum::<f64>()).fold(0.0, f64::max)
}

pub fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// All roots of `Σ c_k z^k` by Aberth iteration, then Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().unwrap().norm() <= 1e-14 * scale {
        c.pop();
    }
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    let dc = derivative(&c);
    let radius = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut worst = 0.0f64;
        for i in 0..d {
            let p = eval_poly(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / eval_poly(&dc, z[i]);
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                worst = worst.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let step = eval_poly(&c, *zi) / eval_poly(&dc, *zi);
            if step.re.is_finite() && step.im.is_finite() {
                *zi -= step;
            }
        }
    }
    z
}

/// `[L/M]` Padé approximant from exact coefficients: solves
/// `Σ_{j=1}^{M} q_j c_{L+i−j} = −c_{L+i}` (`i = 1..M`, `c_k = 0` for `k < 0`)
/// and reports the denominator roots as poles.
pub fn pade_poles(seq: &CoefficientSequence, l: usize, m: usize, froissart_tol: f64) -> Result<PadeResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("denominator degree M must be positive".into()));
    }
    if l + m >= seq.max_index() {
        return Err(Error::TooShort(format!("[{l}/{m}] needs L + M < N = {}", seq.max_index())));
    }
    let c = seq.exact();
    let zero = Complex::new(BigRational::zero(), BigRational::zero());
    let coef = |k: isize| if k < 0 { zero.clone() } else { c[k as usize].clone() };
    let a: Vec<Vec<ExactComplex>> = (1..=m).map(|i| (1..=m).map(|j| coef(l as isize + i as isize - j as isize)).collect()).collect();
    let b: Vec<ExactComplex> = (1..=m).map(|i| -coef((l + i) as isize)).collect();
    let condition = norm_1(&a);
    let (q, inv) = solve_exact(a, b)?;
    let condition = condition * norm_1(&inv);
    let mut qs = vec![Complex::new(BigRational::one(), BigRational::zero())];
    qs.extend(q);
    let p: Vec<ExactComplex> = (0..=l).map(|i| (0..=i.min(m)).fold(zero.clone(), |acc, j| acc + &qs[j] * &c[i - j])).collect();
    let den: Vec<Complex64> = qs.iter().map(to_c64).collect();
    let num: Vec<Complex64> = p.iter().map(to_c64).collect();
    let zeros = poly_roots(&num);
    let dden = derivative(&den);
    let mut poles = Vec::new();
    let mut residues = Vec::new();
    let mut froissart = Vec::new();
    for z in poly_roots(&den) {
        match zeros.iter().find(|w| (**w - z).norm() < froissart_tol) {
            Some(&w) => froissart.push((z, w)),
            None => {
                residues.push(eval_poly(&num, z) / eval_poly(&dden, z));
                poles.push(z);
            }
        }
    }
    Ok(PadeResult { l, m, poles, residues, froissart, condition, froissart_tol, denominator: den, numerator: num })
}
