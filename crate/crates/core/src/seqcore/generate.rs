use std::path::Path;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::sequence::{CoefficientSequence, ExactComplex};
use crate::density::{SelfSimilarDoc, SelfSimilarSpec};
use crate::scalar::parse_rational;
use crate::{Error, Result, Scalar};

pub const FAMILIES: [&str; 6] = ["geometric", "rational", "hadamard_gap", "density_gap", "oscillating", "random_signs"];

/// `{family, params, seed, N}`, read from JSON or TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: String,
    #[serde(default = "empty_params")]
    pub params: Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
}

fn empty_params() -> Value {
    Value::Object(Default::default())
}

/// What is classically known about a generated series.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Singular points on or inside the plane, as `[re, im]`.
    pub singular_points: Vec<[f64; 2]>,
    pub natural_boundary: bool,
    /// Density of the support, as an exact rational string.
    pub support_density: Option<String>,
    /// Declared limit of the `+` window counts.
    pub declared_limit: Option<SelfSimilarDoc>,
    pub declared_windows: Vec<DeclaredWindow>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeclaredWindow {
    pub m: u64,
    pub lambda_plus: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub seq: CoefficientSequence,
    pub truth: GroundTruth,
}

impl GeneratorSpec {
    pub fn new(family: &str, params: Value, seed: u64, n: usize) -> Self {
        Self { family: family.to_string(), params, seed, n }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("generator spec: {e}")))
    }

    /// Picks the format from the extension (`.toml`, anything else is JSON).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_json(&text),
        }
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }

    fn rational(&self, key: &str, default: &str) -> Result<BigRational> {
        match self.get(key) {
            None => parse_rational(default),
            Some(v) => value_rational(v),
        }
    }
}

fn value_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::BadNumber(other.to_string())),
    }
}

fn value_f64(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) => f64::parse(s),
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::BadNumber(n.to_string())),
        other => Err(Error::BadNumber(other.to_string())),
    }
}

/// A complex parameter: a bare number, `{"re","im"}`, or polar `{"r","theta"}`.
/// Polar values are only available in floating form.
enum ComplexParam {
    Exact(ExactComplex),
    Float(Complex64),
}

fn value_complex(v: &Value) -> Result<ComplexParam> {
    match v {
        Value::Object(o) if o.contains_key("theta") => {
            let r = o.get("r").map(value_f64).transpose()?.unwrap_or(1.0);
            let theta = value_f64(&o["theta"])?;
            Ok(ComplexParam::Float(Complex64::from_polar(r, theta)))
        }
        Value::Object(o) => {
            let re = o.get("re").map(value_rational).transpose()?.unwrap_or_else(BigRational::zero);
            let im = o.get("im").map(value_rational).transpose()?.unwrap_or_else(BigRational::zero);
            Ok(ComplexParam::Exact(Complex::new(re, im)))
        }
        other => Ok(ComplexParam::Exact(Complex::new(value_rational(other)?, BigRational::zero()))),
    }
}

fn exact_of(c: &ComplexParam) -> Option<ExactComplex> {
    match c {
        ComplexParam::Exact(e) => Some(e.clone()),
        ComplexParam::Float(_) => None,
    }
}

fn float_of(c: &ComplexParam) -> Complex64 {
    match c {
        ComplexParam::Exact(e) => Complex64::new(e.re.as_f64(), e.im.as_f64()),
        ComplexParam::Float(f) => *f,
    }
}

/// Shortest round-trip decimal of `x`, read back exactly.
fn rational_of_f64(x: f64) -> BigRational {
    parse_rational(&format!("{x:?}")).expect("finite float")
}

fn real(x: BigRational) -> ExactComplex {
    Complex::new(x, BigRational::zero())
}

fn unit_signs(n: usize, support: impl Fn(usize) -> bool, sign: impl FnMut(usize) -> i8) -> Vec<ExactComplex> {
    let mut sign = sign;
    (0..=n).map(|m| if support(m) { real(BigRational::from_integer(BigInt::from(sign(m)))) } else { real(BigRational::zero()) }).collect()
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    let n = spec.n;
    match spec.family.as_str() {
        "geometric" => geometric(spec),
        "rational" => rational(spec),
        "hadamard_gap" => {
            let base = spec.get("base").map(value_f64).transpose()?.unwrap_or(2.0) as u64;
            if base < 2 {
                return Err(Error::InvalidArgument("hadamard_gap base must be at least 2".into()));
            }
            if n < base as usize {
                return Err(Error::TooShort(format!("hadamard_gap needs N >= {base}")));
            }
            let is_power = |m: usize| {
                let mut p = 1usize;
                while p < m {
                    p *= base as usize;
                }
                m >= 1 && p == m
            };
            let coeffs = unit_signs(n, is_power, |_| 1);
            Ok(Generated {
                seq: CoefficientSequence::new(coeffs)?,
                truth: GroundTruth {
                    natural_boundary: true,
                    support_density: Some("0".into()),
                    note: "Hadamard gaps: the unit circle is the natural boundary".into(),
                    ..Default::default()
                },
            })
        }
        "density_gap" => {
            let density = spec.rational("density", "1/2")?;
            if density <= BigRational::zero() || density > BigRational::one() {
                return Err(Error::InvalidArgument("density must lie in (0, 1]".into()));
            }
            let floor_at = |m: usize| (&density * BigRational::from_integer(BigInt::from(m))).floor();
            let in_support = |m: usize| m >= 1 && floor_at(m) > floor_at(m - 1);
            let mode = spec.get("signs").and_then(Value::as_str).unwrap_or("random");
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let coeffs = match mode {
                "random" => unit_signs(n, in_support, |_| if rng.random_bool(0.5) { 1 } else { -1 }),
                "positive" => unit_signs(n, in_support, |_| 1),
                "alternating" => {
                    let mut s = -1i8;
                    unit_signs(n, in_support, |_| {
                        s = -s;
                        s
                    })
                }
                other => return Err(Error::InvalidArgument(format!("unknown sign mode `{other}`"))),
            };
            if coeffs.iter().all(|c| c.re.is_zero()) {
                return Err(Error::TooShort("density_gap support is empty for this N".into()));
            }
            Ok(Generated {
                seq: CoefficientSequence::new(coeffs)?,
                truth: GroundTruth {
                    natural_boundary: mode == "random",
                    support_density: Some(density.render()),
                    note: format!("support {{m : floor(m*d) > floor((m-1)*d)}}, d = {}, {mode} signs", density.render()),
                    ..Default::default()
                },
            })
        }
        "oscillating" => oscillating(spec),
        "random_signs" => {
            let support: Option<Vec<usize>> = match spec.get("support") {
                None => None,
                Some(Value::String(s)) if s == "all" => None,
                Some(Value::Array(items)) => Some(
                    items
                        .iter()
                        .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| Error::BadNumber(v.to_string())))
                        .collect::<Result<_>>()?,
                ),
                Some(other) => return Err(Error::InvalidArgument(format!("bad support {other}"))),
            };
            if let Some(s) = &support {
                if let Some(&bad) = s.iter().find(|&&m| m > n) {
                    return Err(Error::TooShort(format!("support index {bad} exceeds N = {n}")));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let member = |m: usize| support.as_ref().is_none_or(|s| s.contains(&m));
            let coeffs = unit_signs(n, member, |_| if rng.random_bool(0.5) { 1 } else { -1 });
            Ok(Generated {
                seq: CoefficientSequence::new(coeffs)?,
                truth: GroundTruth { natural_boundary: support.is_none(), note: "independent fair signs".into(), ..Default::default() },
            })
        }
        other => Err(Error::UnknownFamily(format!("`{other}` (known: {})", FAMILIES.join(", ")))),
    }
}

fn geometric(spec: &GeneratorSpec) -> Result<Generated> {
    let c = match spec.get("c") {
        None => ComplexParam::Exact(real(BigRational::one())),
        Some(v) => value_complex(v)?,
    };
    let coeffs: Vec<ExactComplex> = match exact_of(&c) {
        Some(c) => {
            let mut out = Vec::with_capacity(spec.n + 1);
            let mut p = real(BigRational::one());
            for _ in 0..=spec.n {
                out.push(p.clone());
                p = &p * &c;
            }
            out
        }
        None => {
            let c = float_of(&c);
            (0..=spec.n)
                .map(|m| {
                    let z = c.powu(m as u32);
                    Complex::new(rational_of_f64(z.re), rational_of_f64(z.im))
                })
                .collect()
        }
    };
    let cf = float_of(&c);
    let singular_points = if cf.norm() > 0.0 {
        let p = cf.inv();
        vec![[p.re, p.im]]
    } else {
        Vec::new()
    };
    Ok(Generated {
        seq: CoefficientSequence::new(coeffs)?,
        truth: GroundTruth { singular_points, note: "1/(1 - c z)".into(), ..Default::default() },
    })
}

/// `Σ_i w_i / (1 − z/p_i) + poly(z)`, so `a_m = Σ_i w_i p_i^{−m} + poly_m`.
fn rational(spec: &GeneratorSpec) -> Result<Generated> {
    let list = |key: &str| -> Result<Vec<ComplexParam>> {
        match spec.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items.iter().map(value_complex).collect(),
            Some(other) => Err(Error::InvalidArgument(format!("`{key}` must be a list, got {other}"))),
        }
    };
    let poles = list("poles")?;
    if poles.is_empty() {
        return Err(Error::InvalidArgument("rational family needs at least one pole".into()));
    }
    let mut weights = list("weights")?;
    if weights.is_empty() {
        weights = poles.iter().map(|_| ComplexParam::Exact(real(BigRational::one()))).collect();
    }
    if weights.len() != poles.len() {
        return Err(Error::InvalidArgument("weights and poles differ in length".into()));
    }
    let poly = list("poly")?;
    if poly.len() > spec.n + 1 {
        return Err(Error::TooShort("polynomial part is longer than the sequence".into()));
    }
    for p in &poles {
        if float_of(p).norm() == 0.0 {
            return Err(Error::InvalidArgument("poles must be nonzero".into()));
        }
    }
    let all_exact = poles.iter().chain(&weights).chain(&poly).all(|c| matches!(c, ComplexParam::Exact(_)));
    let coeffs: Vec<ExactComplex> = if all_exact {
        let mut acc: Vec<ExactComplex> = vec![real(BigRational::zero()); spec.n + 1];
        for (p, w) in poles.iter().zip(&weights) {
            let inv = real(BigRational::one()) / exact_of(p).unwrap();
            let mut term = exact_of(w).unwrap();
            for slot in acc.iter_mut() {
                *slot = &*slot + &term;
                term = &term * &inv;
            }
        }
        for (slot, c) in acc.iter_mut().zip(&poly) {
            *slot = &*slot + exact_of(c).unwrap();
        }
        acc
    } else {
        let mut acc = vec![Complex64::new(0.0, 0.0); spec.n + 1];
        for (p, w) in poles.iter().zip(&weights) {
            let inv = float_of(p).inv();
            let w = float_of(w);
            for (m, slot) in acc.iter_mut().enumerate() {
                *slot += w * inv.powu(m as u32);
            }
        }
        for (slot, c) in acc.iter_mut().zip(&poly) {
            *slot += float_of(c);
        }
        acc.into_iter().map(|z| Complex::new(rational_of_f64(z.re), rational_of_f64(z.im))).collect()
    };
    Ok(Generated {
        seq: CoefficientSequence::new(coeffs)?,
        truth: GroundTruth {
            singular_points: poles.iter().map(float_of).map(|p| [p.re, p.im]).collect(),
            note: "partial fractions plus polynomial".into(),
            ..Default::default()
        },
    })
}

fn oscillating(spec: &GeneratorSpec) -> Result<Generated> {
    if spec.n < 8 {
        return Err(Error::TooShort("oscillating needs N >= 8".into()));
    }
    let rho = spec.rational("rho", "1/4")?;
    let peak = spec.rational("peak", "19/20")?;
    let bands = spec.get("bands").and_then(Value::as_u64).unwrap_or(12) as usize;
    let limit = SelfSimilarSpec::oscillating(rho, peak, bands)?;
    let anchors: Vec<u64> = (0..).map(|k| 1u64 << k).take_while(|&m| 2 * m <= spec.n as u64).collect();
    let (seq, windows) = sequence_from_window_limits(spec.n, &anchors, |_, r| limit.eval(r))?;
    Ok(Generated {
        seq,
        truth: GroundTruth {
            declared_limit: Some(limit.to_doc()),
            declared_windows: windows,
            note: "windows m_k = 2^k (k >= 0); + counts follow the declared self-similar limit".into(),
            ..Default::default()
        },
    })
}

/// `±1` sequence whose sign changes inside each window `(m_k, 2m_k)` make
/// `n_{k,+}(r) = ⌊m_k · limit(k, r)⌋ / m_k` at every lattice point
/// `r = i/m_k < 1`.
///
/// Windows must not overlap (`m_{k+1} ≥ 2m_k`) and each limit must be
/// increasing, 1-Lipschitz and vanish at 0.
pub fn sequence_from_window_limits<F>(n: usize, anchors: &[u64], limit: F) -> Result<(CoefficientSequence, Vec<DeclaredWindow>)>
where
    F: Fn(usize, &BigRational) -> BigRational,
{
    if anchors.windows(2).any(|w| w[1] < 2 * w[0]) {
        return Err(Error::InvalidArgument("window anchors must satisfy m_(k+1) >= 2 m_k".into()));
    }
    if let Some(&m) = anchors.iter().find(|&&m| m == 0 || 2 * m as usize > n) {
        return Err(Error::TooShort(format!("window at m = {m} does not fit in N = {n}")));
    }
    let mut change = vec![false; n + 1];
    let mut windows = Vec::with_capacity(anchors.len());
    for (k, &m) in anchors.iter().enumerate() {
        let mb = BigRational::from_integer(BigInt::from(m));
        let mut prev = BigInt::zero();
        let mut lambda = Vec::new();
        for j in m + 1..2 * m {
            let r = BigRational::new(BigInt::from(j - m), BigInt::from(m));
            let c = (limit(k, &r) * &mb).floor().to_integer();
            if c > prev {
                if c != &prev + 1 {
                    return Err(Error::InvalidArgument(format!("limit {k} rises faster than slope 1 near r = {r}")));
                }
                change[j as usize] = true;
                lambda.push(j);
                prev = c;
            }
        }
        windows.push(DeclaredWindow { m, lambda_plus: lambda });
    }
    let mut s = 1i64;
    let coeffs = (0..=n)
        .map(|j| {
            if change[j] {
                s = -s;
            }
            real(BigRational::from_integer(BigInt::from(s)))
        })
        .collect();
    Ok((CoefficientSequence::new(coeffs)?, windows))
}
