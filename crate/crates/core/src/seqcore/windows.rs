use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::sequence::{ln_abs_complex, CoefficientSequence};
use super::signs::{sign_changes_of_signs, IndexSet};
use crate::envelope::PwlFunction;
use crate::scalar::big_sign;
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Side::Plus),
            "-" | "−" | "minus" => Ok(Side::Minus),
            other => Err(Error::InvalidArgument(format!("side must be `+` or `-`, got `{other}`"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

/// One window: anchor `m_k`, direction `β_k` and the one-sided index sets
/// `Λ_{k,+} ⊂ [m_k, 2m_k]`, `Λ_{k,−} ⊂ [0, m_k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub m: u64,
    pub beta: f64,
    pub lambda_plus: IndexSet,
    pub lambda_minus: IndexSet,
}

impl Window {
    pub fn lambda(&self, side: Side) -> &IndexSet {
        match side {
            Side::Plus => &self.lambda_plus,
            Side::Minus => &self.lambda_minus,
        }
    }

    /// Normalized counts `n_{k,±}` of this window.
    ///
    /// The anchor `m_k` itself is not counted, so every count function
    /// starts at 0.
    pub fn counts(&self, side: Side) -> StepCounts {
        let m = self.m;
        let offsets = match side {
            Side::Plus => self.lambda_plus.members().iter().filter(|&&j| j > m).map(|&j| j - m).collect(),
            Side::Minus => {
                let mut v: Vec<u64> = self.lambda_minus.members().iter().filter(|&&j| j < m).map(|&j| m - j).collect();
                v.reverse();
                v
            }
        };
        StepCounts { m, offsets }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowFamily {
    windows: Vec<Window>,
    /// Notes recorded during extraction (dropped windows, thresholds used).
    pub diagnostics: Vec<String>,
}

impl WindowFamily {
    pub fn new(windows: Vec<Window>) -> Result<Self> {
        if windows.windows(2).any(|w| w[0].m >= w[1].m) {
            return Err(Error::InvalidArgument("window anchors must be strictly increasing".into()));
        }
        for w in &windows {
            if w.m == 0 {
                return Err(Error::InvalidArgument("window anchors must be positive".into()));
            }
            let plus_ok = w.lambda_plus.members().iter().all(|&j| j >= w.m && j <= 2 * w.m);
            let minus_ok = w.lambda_minus.members().iter().all(|&j| j <= w.m);
            if !plus_ok || !minus_ok {
                return Err(Error::InvalidArgument(format!("window m={} has indices outside its range", w.m)));
            }
        }
        Ok(Self { windows, diagnostics: Vec::new() })
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn window_counts(&self, k: usize, side: Side) -> Result<StepCounts> {
        self.windows
            .get(k)
            .map(|w| w.counts(side))
            .ok_or_else(|| Error::InvalidArgument(format!("window index {k} out of range (family has {})", self.len())))
    }

    /// `∪_k Λ_{k,side}`.
    pub fn union(&self, side: Side) -> IndexSet {
        self.windows.iter().flat_map(|w| w.lambda(side).members().iter().copied()).collect()
    }
}

/// Right-continuous step function `r ↦ card{d ∈ offsets : d ≤ r·m} / m` on
/// `[0, 1]`, where the offsets are distances from the anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCounts {
    m: u64,
    offsets: Vec<u64>,
}

impl StepCounts {
    pub fn new(m: u64, mut offsets: Vec<u64>) -> Result<Self> {
        offsets.sort_unstable();
        offsets.dedup();
        if m == 0 || offsets.iter().any(|&d| d == 0 || d > m) {
            return Err(Error::InvalidArgument("offsets must lie in 1..=m".into()));
        }
        Ok(Self { m, offsets })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    fn count_upto(&self, k: u64) -> usize {
        self.offsets.partition_point(|&d| d <= k)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        // Lattice points r = i/m must not be lost to rounding in r·m.
        let k = (r * self.m as f64 * (1.0 + 1e-12)).floor() as u64;
        self.count_upto(k) as f64 / self.m as f64
    }

    pub fn eval_exact(&self, r: &BigRational) -> BigRational {
        if r.is_negative() {
            return BigRational::zero();
        }
        let k = (r * BigRational::from_integer(BigInt::from(self.m))).floor().to_integer();
        let k: u64 = k.try_into().unwrap_or(u64::MAX);
        BigRational::new(BigInt::from(self.count_upto(k)), BigInt::from(self.m))
    }

    /// Value on the lattice `i/m`.
    pub fn lattice_value(&self, i: u64) -> BigRational {
        BigRational::new(BigInt::from(self.count_upto(i)), BigInt::from(self.m))
    }

    /// Interpolant through the lattice points `(i/m, n(i/m))`, `i = 0..=m`.
    pub fn lattice_pwl(&self) -> PwlFunction<BigRational> {
        let m = BigInt::from(self.m);
        let pts = (0..=self.m).map(|i| (BigRational::new(BigInt::from(i), m.clone()), self.lattice_value(i))).collect();
        PwlFunction::new(pts).expect("lattice is increasing").simplified()
    }

    /// Interpolant through `(r, n(r))` for the given increasing grid.
    pub fn grid_pwl<T: Scalar>(&self, grid: &[T]) -> Result<PwlFunction<T>> {
        let m = T::from_u64(self.m).unwrap();
        let pts = grid
            .iter()
            .map(|r| {
                let k = if T::EXACT {
                    let rm = parse_exact(r) * BigRational::from_integer(self.m.into());
                    rm.floor().to_integer().try_into().unwrap_or(0u64)
                } else {
                    (r.as_f64() * self.m as f64 * (1.0 + 1e-12)).floor().max(0.0) as u64
                };
                (r.clone(), T::from_usize(self.count_upto(k)).unwrap() / m.clone())
            })
            .collect();
        PwlFunction::new(pts)
    }

    /// The 1-Lipschitz bound on the lattice: `|n(x) − n(y)| ≤ |x − y|` whenever
    /// `m·x`, `m·y` are integers. Offsets are distinct, so this reduces to
    /// at most one jump per lattice step.
    pub fn lipschitz_on_lattice(&self) -> bool {
        (0..self.m).all(|i| self.count_upto(i + 1) - self.count_upto(i) <= 1)
    }

    /// `∫_0^r n(t)/t dt` in closed form: each jump at `t_j = d_j/m`
    /// contributes `(1/m)·ln(r/t_j)`.
    pub fn log_integral(&self, r: f64) -> f64 {
        let m = self.m as f64;
        self.offsets.iter().map(|&d| d as f64 / m).take_while(|&t| t <= r * (1.0 + 1e-12)).map(|t| (r / t).ln() / m).sum()
    }
}

fn parse_exact<T: Scalar>(x: &T) -> BigRational {
    // Exact scalars render losslessly as "p/q".
    crate::scalar::parse_rational(&x.render()).expect("exact scalar renders as a rational")
}

/// Where window anchors are placed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// The index maximizing `|a_m|^{1/m}` in each dyadic block `[2^j, 2^{j+1})`.
    DyadicMaxima,
    /// Every index with a complete window.
    All,
    Explicit(Vec<u64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaPolicy {
    /// `β_k = arg a_{m_k}`.
    Arg,
    Zero,
    HalfPi,
}

/// What the window index sets record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaKind {
    /// Sign changes of `Re(e^{−iβ_k} a_j)`.
    SignChanges,
    /// Indices of nonzero coefficients (the gap version).
    NonZero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowPolicy {
    pub placement: Placement,
    pub beta: BetaPolicy,
    pub lambda: LambdaKind,
    /// Windows need `|Re(e^{−iβ} a_m)|^{1/m} ≥ 1 − tol`.
    pub tol: f64,
    /// When set, keep a subsequence whose intervals `[(1−r)m, (1+r)m]` are
    /// pairwise disjoint.
    pub disjoint_r: Option<f64>,
    /// Floating projections with magnitude at most this count as zero.
    pub zero_eps: f64,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            placement: Placement::DyadicMaxima,
            beta: BetaPolicy::Arg,
            lambda: LambdaKind::SignChanges,
            tol: 0.05,
            disjoint_r: None,
            zero_eps: 1e-300,
        }
    }
}

fn exact_signs(seq: &CoefficientSequence, beta: BetaPolicy) -> Option<Vec<i8>> {
    match beta {
        BetaPolicy::Zero => Some(seq.exact().iter().map(|c| big_sign(&c.re)).collect()),
        BetaPolicy::HalfPi => Some(seq.exact().iter().map(|c| big_sign(&c.im)).collect()),
        BetaPolicy::Arg => None,
    }
}

/// Chooses windows on `seq` and computes their index sets.
pub fn extract_windows(seq: &CoefficientSequence, policy: &WindowPolicy) -> Result<WindowFamily> {
    let n = seq.max_index() as u64;
    let mut diagnostics = Vec::new();
    let half = n / 2;
    let candidates: Vec<u64> = match &policy.placement {
        Placement::DyadicMaxima => {
            let mut out = Vec::new();
            let mut lo = 1u64;
            while lo <= half {
                let hi = (2 * lo - 1).min(half);
                let best = (lo..=hi).map(|m| (m, seq.ln_abs(m as usize) / m as f64)).filter(|(_, v)| v.is_finite()).fold(
                    None::<(u64, f64)>,
                    |acc, (m, v)| match acc {
                        Some((_, bv)) if bv >= v => acc,
                        _ => Some((m, v)),
                    },
                );
                if let Some((m, _)) = best {
                    out.push(m);
                }
                lo *= 2;
            }
            out
        }
        Placement::All => (1..=half).collect(),
        Placement::Explicit(ms) => {
            let mut v: Vec<u64> = ms.clone();
            v.sort_unstable();
            v.dedup();
            let (ok, dropped): (Vec<u64>, Vec<u64>) = v.into_iter().partition(|&m| m >= 1 && m <= half);
            if !dropped.is_empty() {
                diagnostics.push(format!("dropped anchors without a complete window: {dropped:?}"));
            }
            ok
        }
    };

    let shared_signs = exact_signs(seq, policy.beta);
    let threshold = (1.0 - policy.tol).max(0.0).ln();
    let mut windows: Vec<Window> = Vec::new();
    let mut rejected = 0usize;
    let mut last_right: Option<f64> = None;
    for m in candidates {
        let a_m = &seq.exact()[m as usize];
        let beta = match policy.beta {
            BetaPolicy::Arg => seq.approx()[m as usize].arg(),
            BetaPolicy::Zero => 0.0,
            BetaPolicy::HalfPi => std::f64::consts::FRAC_PI_2,
        };
        let ln_proj = match policy.beta {
            BetaPolicy::Arg => ln_abs_complex(a_m),
            BetaPolicy::Zero => crate::scalar::ln_abs(&a_m.re),
            BetaPolicy::HalfPi => crate::scalar::ln_abs(&a_m.im),
        };
        if ln_proj / (m as f64) < threshold {
            rejected += 1;
            continue;
        }
        if let Some(r) = policy.disjoint_r {
            let left = (1.0 - r) * m as f64;
            if let Some(prev) = last_right {
                if left <= prev {
                    continue;
                }
            }
            last_right = Some((1.0 + r) * m as f64);
        }
        let hi = (2 * m) as usize;
        let (plus, minus) = match policy.lambda {
            LambdaKind::NonZero => {
                let nz = |j: usize| !seq.exact()[j].re.is_zero() || !seq.exact()[j].im.is_zero();
                (
                    (m as usize..=hi).filter(|&j| nz(j)).map(|j| j as u64).collect(),
                    (0..=m as usize).filter(|&j| nz(j)).map(|j| j as u64).collect(),
                )
            }
            LambdaKind::SignChanges => {
                let signs: Vec<i8> = match &shared_signs {
                    Some(s) => s[..=hi].to_vec(),
                    None => {
                        let (c, s) = (beta.cos(), beta.sin());
                        seq.approx()[..=hi]
                            .iter()
                            .map(|z| {
                                let p = c * z.re + s * z.im;
                                if p.abs() <= policy.zero_eps {
                                    0
                                } else if p > 0.0 {
                                    1
                                } else {
                                    -1
                                }
                            })
                            .collect()
                    }
                };
                let plus: IndexSet = sign_changes_of_signs(&signs[m as usize..=hi]).members().iter().map(|&d| d + m).collect();
                let minus = sign_changes_of_signs(&signs[..=m as usize]);
                (plus, minus)
            }
        };
        windows.push(Window { m, beta, lambda_plus: plus, lambda_minus: minus });
    }
    diagnostics.push(format!(
        "growth surrogate |Re(e^(-i beta) a_m)|^(1/m) >= {:.4}: {} accepted, {} rejected",
        1.0 - policy.tol,
        windows.len(),
        rejected
    ));
    if windows.is_empty() {
        return Err(Error::EmptyFamily(diagnostics.join("; ")));
    }
    let mut fam = WindowFamily::new(windows)?;
    fam.diagnostics = diagnostics;
    Ok(fam)
}
