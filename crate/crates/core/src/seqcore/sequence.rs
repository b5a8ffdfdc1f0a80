use std::io::{BufRead, Write};

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scalar::{ln_abs, parse_rational, ratio_to_f64, terminating_decimal};
use crate::{Error, Result};

pub type ExactComplex = Complex<BigRational>;

/// Finite prefix `a_0..a_N` of a power series.
///
/// Coefficients are always held exactly; decimal input is converted to the
/// rational it denotes. A floating copy is cached for numerical probes.
#[derive(Clone, Debug)]
pub struct CoefficientSequence {
    coeffs: Vec<ExactComplex>,
    approx: Vec<Complex64>,
    normalization: Option<NormalizationCheck>,
}

/// Result of the finite-prefix surrogate for `limsup |a_m|^{1/m} = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationCheck {
    pub tail_start: usize,
    pub max_root: f64,
    pub tol: f64,
    pub ok: bool,
}

impl CoefficientSequence {
    pub fn new(coeffs: Vec<ExactComplex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::TooShort("coefficient sequence is empty".into()));
        }
        let approx = coeffs.iter().map(|c| Complex64::new(ratio_to_f64(&c.re), ratio_to_f64(&c.im))).collect();
        Ok(Self { coeffs, approx, normalization: None })
    }

    pub fn from_real(values: Vec<BigRational>) -> Result<Self> {
        Self::new(values.into_iter().map(|re| Complex::new(re, BigRational::zero())).collect())
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        Self::from_real(values.iter().map(|&x| BigRational::from_float(x).unwrap()).collect())
    }

    /// Largest index `N`.
    pub fn max_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn exact(&self) -> &[ExactComplex] {
        &self.coeffs
    }

    pub fn approx(&self) -> &[Complex64] {
        &self.approx
    }

    pub fn normalization(&self) -> Option<&NormalizationCheck> {
        self.normalization.as_ref()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im.is_zero())
    }

    pub fn is_nonnegative_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im.is_zero() && !c.re.is_negative())
    }

    /// `ln |a_m|`, `-inf` for a zero coefficient.
    pub fn ln_abs(&self, m: usize) -> f64 {
        ln_abs_complex(&self.coeffs[m])
    }

    /// Checks `max |a_m|^{1/m}` over the last `tail_fraction` of the prefix
    /// against `[1 − tol, 1 + tol]` and records the outcome.
    pub fn check_normalization(&mut self, tail_fraction: f64, tol: f64) -> &NormalizationCheck {
        let n = self.max_index();
        let start = ((n as f64) * (1.0 - tail_fraction.clamp(0.0, 1.0))).floor() as usize;
        let start = start.max(1).min(n.max(1));
        let max_root = (start..=n).map(|m| (self.ln_abs(m) / m as f64).exp()).fold(0.0_f64, f64::max);
        let ok = (max_root - 1.0).abs() <= tol;
        self.normalization = Some(NormalizationCheck { tail_start: start, max_root, tol, ok });
        self.normalization.as_ref().unwrap()
    }

    /// Reads the line-delimited coefficient format.
    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries: Vec<(usize, ExactComplex)> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            let v: Value = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
            let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| parse_err("missing or invalid integer field `m`".into()))?;
            let re = match v.get("re") {
                Some(c) => parse_component(c).map_err(parse_err)?,
                // A bare {"m", "num", "den"} record is a real exact coefficient.
                None if v.get("num").is_some() => parse_component(&v).map_err(parse_err)?,
                None => return Err(parse_err("missing field `re`".into())),
            };
            let im = match v.get("im") {
                Some(c) => parse_component(c).map_err(parse_err)?,
                None => BigRational::zero(),
            };
            entries.push((m as usize, Complex::new(re, im)));
        }
        if entries.is_empty() {
            return Err(Error::Parse { line: 0, msg: "no coefficient records".into() });
        }
        entries.sort_by_key(|e| e.0);
        for (expect, (m, _)) in entries.iter().enumerate() {
            if *m != expect {
                return Err(Error::Parse { line: 0, msg: format!("indices must be contiguous from 0; expected {expect}, found {m}") });
            }
        }
        Self::new(entries.into_iter().map(|e| e.1).collect())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (m, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{{\"m\":{},\"re\":{},\"im\":{}}}", m, render_component(&c.re), render_component(&c.im))?;
        }
        Ok(())
    }
}

pub fn ln_abs_complex(c: &ExactComplex) -> f64 {
    let a = ln_abs(&c.re);
    let b = ln_abs(&c.im);
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + 0.5 * (2.0 * (lo - hi)).exp().ln_1p()
}

fn parse_component(v: &Value) -> std::result::Result<BigRational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| e.to_string()),
        Value::Object(o) => {
            let num = o.get("num").and_then(Value::as_str).ok_or("missing `num` string")?;
            let den = o.get("den").and_then(Value::as_str).ok_or("missing `den` string")?;
            parse_rational(&format!("{num}/{den}")).map_err(|e| e.to_string())
        }
        _ => Err(format!("unsupported component {v}")),
    }
}

fn render_component(r: &BigRational) -> String {
    match terminating_decimal(r) {
        Some(s) => Value::String(s).to_string(),
        None => format!("{{\"num\":\"{}\",\"den\":\"{}\"}}", r.numer(), r.denom()),
    }
}
