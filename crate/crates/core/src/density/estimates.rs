use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::divergence::{LimitInput, Verdict};
use super::selfsimilar::SelfSimilarSpec;
use crate::envelope::{PwlDoc, PwlFunction, SlopeBound};
use crate::seqcore::{IndexSet, Side, WindowFamily};
use crate::{Error, Result, Scalar};

/// Grids and thresholds shared by the estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub r_grid: Vec<f64>,
    pub delta_grid: Vec<String>,
    pub a_tol: f64,
    pub k_min: usize,
    /// Smallest interval length (in indices) a count may be read from.
    pub min_span: f64,
    pub cluster_tol: f64,
    /// Helly limits are compared on `i/helly_grid`.
    pub helly_grid: u64,
    pub chain_tol: f64,
    /// Stability threshold for the `d2` r-profile.
    pub stable_tol: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            r_grid: (1..=10).map(|j| 0.5f64.powi(j)).collect(),
            delta_grid: (1..=9).map(|i| format!("0.{i}")).collect(),
            a_tol: 1.0 / 64.0,
            k_min: 0,
            min_span: 300.0,
            cluster_tol: 0.05,
            helly_grid: 64,
            chain_tol: 0.05,
            stable_tol: 0.02,
        }
    }
}

impl EstimatorConfig {
    pub fn deltas(&self) -> Result<Vec<BigRational>> {
        self.delta_grid.iter().map(|s| BigRational::parse(s)).collect()
    }
}

/// A scalar estimate with the profile it was read from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Clamped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    /// `(r, value at r)` over the admissible part of the grid.
    pub profile: Vec<(f64, f64)>,
    /// Window index range (or `t` range for `d2`) that contributed.
    pub range: (u64, u64),
    pub stable: bool,
    pub monotone: bool,
}

impl Estimate {
    fn from_profile(raw: f64, profile: Vec<(f64, f64)>, range: (u64, u64), stable: bool) -> Self {
        // Profiles are listed with r decreasing.
        let monotone = profile.windows(2).all(|w| w[1].1 >= w[0].1) || profile.windows(2).all(|w| w[1].1 <= w[0].1);
        Self { value: raw.clamp(0.0, 1.0) + 0.0, raw, profile, range, stable, monotone }
    }
}

/// Maximum density: for each `r`, the supremum over integer `t` of
/// `(n((1+r)t) − n(t))/(rt)`, restricted to `t ≥ min_span/r`,
/// `t ∈ t_range` and `(1+r)t ≤ horizon`.
///
/// The scalar is the value at the smallest admissible `r`.
pub fn d2_estimate(
    lambda: &IndexSet,
    r_grid: &[f64],
    t_range: (u64, u64),
    horizon: u64,
    min_span: f64,
    stable_tol: f64,
) -> Result<Estimate> {
    if lambda.is_empty() {
        return Ok(Estimate::from_profile(0.0, Vec::new(), t_range, true));
    }
    if t_range.1 > horizon || t_range.0 > t_range.1 {
        return Err(Error::InvalidArgument(format!("t range [{}, {}] exceeds the data horizon {horizon}", t_range.0, t_range.1)));
    }
    let prefix: Vec<u32> = (0..=horizon).map(|x| lambda.count_le(x) as u32).collect();
    let mut rs: Vec<f64> = r_grid.to_vec();
    rs.sort_by(|a, b| b.total_cmp(a));
    let profile: Vec<(f64, f64)> = rs
        .par_iter()
        .filter_map(|&r| {
            let lo = t_range.0.max((min_span / r).ceil() as u64).max(1);
            let hi = t_range.1.min(((horizon as f64) / (1.0 + r)).floor() as u64);
            (lo <= hi).then(|| {
                let best = (lo..=hi)
                    .map(|t| {
                        let top = (((1.0 + r) * t as f64) * (1.0 + 1e-12)).floor() as u64;
                        (prefix[top.min(horizon) as usize] - prefix[t as usize]) as f64 / (r * t as f64)
                    })
                    .fold(0.0, f64::max);
                (r, best)
            })
        })
        .collect();
    let Some(&(_, last)) = profile.last() else {
        return Err(Error::TooShort(format!("no r in the grid admits t >= {min_span}/r below {horizon}")));
    };
    let stable = profile.len() < 2 || (profile[profile.len() - 2].1 - last).abs() <= stable_tol;
    Ok(Estimate::from_profile(last, profile, t_range, stable))
}

/// Windows `k ≥ k_min` that admit at least one `r` with `r·m_k ≥ min_span`.
fn admissible_windows(fam: &WindowFamily, r_grid: &[f64], k_min: usize, min_span: f64) -> Vec<usize> {
    let r_max = r_grid.iter().cloned().fold(0.0, f64::max);
    (k_min..fam.len()).filter(|&k| r_max * fam.windows()[k].m as f64 >= min_span).collect()
}

fn window_range(fam: &WindowFamily, ks: &[usize]) -> (u64, u64) {
    (fam.windows()[ks[0]].m, fam.windows()[*ks.last().unwrap()].m)
}

fn sorted_desc(r_grid: &[f64]) -> Vec<f64> {
    let mut rs = r_grid.to_vec();
    rs.sort_by(|a, b| b.total_cmp(a));
    rs
}

/// `limsup_{r→0} limsup_k n_{k,side}(r)/r`, read as the maximum over
/// admissible `(k, r)` with `r·m_k ≥ min_span`.
pub fn d1_estimate(fam: &WindowFamily, side: Side, r_grid: &[f64], k_min: usize, min_span: f64) -> Result<Estimate> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily("d1 needs at least one window".into()));
    }
    let ks = admissible_windows(fam, r_grid, k_min, min_span);
    if ks.is_empty() {
        return Err(Error::TooShort(format!("no window k >= {k_min} spans {min_span} indices")));
    }
    let counts: Vec<_> = ks.iter().map(|&k| fam.windows()[k].counts(side)).collect();
    let profile: Vec<(f64, f64)> = sorted_desc(r_grid)
        .into_iter()
        .filter_map(|r| counts.iter().filter(|c| r * c.m() as f64 >= min_span).map(|c| c.eval(r) / r).reduce(f64::max).map(|v| (r, v)))
        .collect();
    let raw = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(Estimate::from_profile(raw, profile, window_range(fam, &ks), true))
}

/// `liminf_{r→0} liminf_k (1/2r)·∫_0^r (n_{k,+} + n_{k,−})(t)/t dt`, with the
/// step-function integrals in closed form.
pub fn d4_estimate(fam: &WindowFamily, r_grid: &[f64], k_min: usize, min_span: f64) -> Result<Estimate> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily("d4 needs at least one window".into()));
    }
    let ks = admissible_windows(fam, r_grid, k_min, min_span);
    if ks.is_empty() {
        return Err(Error::TooShort(format!("no window k >= {k_min} spans {min_span} indices")));
    }
    let pairs: Vec<_> = ks.iter().map(|&k| (fam.windows()[k].counts(Side::Plus), fam.windows()[k].counts(Side::Minus))).collect();
    let profile: Vec<(f64, f64)> = sorted_desc(r_grid)
        .into_iter()
        .filter_map(|r| {
            pairs
                .iter()
                .filter(|(p, _)| r * p.m() as f64 >= min_span)
                .map(|(p, q)| (p.log_integral(r) + q.log_integral(r)) / (2.0 * r))
                .reduce(f64::min)
                .map(|v| (r, v))
        })
        .collect();
    let raw = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(Estimate::from_profile(raw, profile, window_range(fam, &ks), true))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct D3Estimate {
    pub value: f64,
    pub bracket: (f64, f64),
    pub inconclusive: bool,
    /// Verdicts at the bracket top, one per `δ`.
    pub per_delta: Vec<(f64, Verdict)>,
    pub source: String,
}

/// `inf{a : the regularization integral diverges for every δ in the grid}`
/// by bisection on `a ∈ [0, 1]`.
pub fn d3_estimate(n: &LimitInput, deltas: &[BigRational], a_tol: f64) -> Result<D3Estimate> {
    let reach = n.reach();
    let deltas: Vec<BigRational> = deltas.iter().filter(|d| **d > BigRational::zero() && **d <= reach).cloned().collect();
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("no delta of the grid lies inside the domain".into()));
    }
    let probe = |a: &BigRational| -> Result<Vec<(f64, Verdict)>> {
        let bound = SlopeBound::new(a.clone())?;
        deltas.par_iter().map(|d| Ok((d.as_f64(), n.classify(&bound, d)?.verdict))).collect()
    };
    let all_div = |v: &[(f64, Verdict)]| v.iter().all(|p| p.1 == Verdict::Divergent);
    let any_inc = |v: &[(f64, Verdict)]| v.iter().any(|p| p.1 == Verdict::Inconclusive);
    let source = match n {
        LimitInput::Pwl(_) => "pwl",
        LimitInput::SelfSimilar(_) => "self_similar",
    };
    let at_one = probe(&BigRational::one())?;
    if !all_div(&at_one) {
        return Ok(D3Estimate {
            value: 1.0,
            bracket: (1.0, 1.0),
            inconclusive: any_inc(&at_one),
            per_delta: at_one,
            source: source.into(),
        });
    }
    let (mut lo, mut hi) = (BigRational::zero(), BigRational::one());
    let mut at_hi = at_one;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut inconclusive = false;
    while (&hi - &lo).as_f64() > a_tol {
        let mid = (&lo + &hi) / &two;
        let v = probe(&mid)?;
        if all_div(&v) {
            hi = mid;
            at_hi = v;
        } else if any_inc(&v) {
            inconclusive = true;
            break;
        } else {
            lo = mid;
        }
    }
    Ok(D3Estimate {
        value: ((&lo + &hi) / &two).as_f64(),
        bracket: (lo.as_f64(), hi.as_f64()),
        inconclusive,
        per_delta: at_hi,
        source: source.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HellyCluster {
    pub representative: PwlFunction<BigRational>,
    /// Window indices in the cluster; the representative comes from the last.
    pub members: Vec<usize>,
    /// Increasing, 1-Lipschitz and 0 at 0.
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HellyClusterDoc {
    pub representative: PwlDoc,
    pub members: Vec<usize>,
    pub valid: bool,
}

impl HellyCluster {
    pub fn to_doc(&self) -> HellyClusterDoc {
        HellyClusterDoc { representative: self.representative.to_doc(), members: self.members.clone(), valid: self.valid }
    }
}

/// `{0} ∪ {i/g : i/g ≥ floor}` on `[0, 1]`.
pub fn helly_grid(g: u64, floor: &BigRational) -> Vec<BigRational> {
    let gb = BigInt::from(g);
    let mut out = vec![BigRational::zero()];
    if *floor > BigRational::zero() && *floor < BigRational::one() {
        let on_grid = (floor * BigRational::from_integer(gb.clone())).is_integer();
        if !on_grid {
            out.push(floor.clone());
        }
    }
    out.extend((1..=g).map(|i| BigRational::new(BigInt::from(i), gb.clone())).filter(|x| x >= floor));
    out
}

/// Candidate elements of the Helly-limit set: each `n_{k,side}` (`k ≥ k_min`)
/// is sampled on `grid`, samples within `cluster_tol` (sup distance) of a
/// cluster leader join that cluster, and each cluster is represented by the
/// interpolant of its largest-anchor member.
pub fn helly_limits(fam: &WindowFamily, side: Side, grid: &[BigRational], cluster_tol: f64, k_min: usize) -> Result<Vec<HellyCluster>> {
    let ks: Vec<usize> = (k_min..fam.len()).collect();
    if ks.len() < 2 {
        return Err(Error::TooShort(format!("Helly limits need at least 2 windows, have {}", ks.len())));
    }
    let samples: Vec<PwlFunction<BigRational>> =
        ks.par_iter().map(|&k| fam.windows()[k].counts(side).grid_pwl(grid)).collect::<Result<_>>()?;
    let floats: Vec<Vec<f64>> = samples.iter().map(|p| p.points().iter().map(|(_, y)| y.as_f64()).collect()).collect();
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut leaders: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, v) in floats.iter().enumerate() {
        match leaders.iter().position(|&l| sup(&floats[l], v) <= cluster_tol) {
            Some(c) => members[c].push(i),
            None => {
                leaders.push(i);
                members.push(vec![i]);
            }
        }
    }
    Ok(members
        .into_iter()
        .map(|ms| {
            let rep = samples[*ms.last().unwrap()].clone().simplified();
            let valid = rep.is_limit_function();
            HellyCluster { representative: rep, members: ms.into_iter().map(|i| ks[i]).collect(), valid }
        })
        .collect())
}

/// `min n(r)/r` over the grid points and breakpoints in `(0, upto]`, an
/// upper bound on `D3`.
pub fn liminf_ratio(n: &PwlFunction<BigRational>, grid: &[BigRational], upto: &BigRational) -> Option<f64> {
    n.points()
        .iter()
        .map(|(x, _)| x)
        .chain(grid)
        .chain(std::iter::once(upto))
        .filter(|x| **x > BigRational::zero() && *x <= upto)
        .map(|x| (n.eval(x) / x).as_f64())
        .reduce(f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    pub d1: Estimate,
    pub d3: D3Estimate,
    /// Upper bound on `D3`: smallest `n(r)/r` of any representative for `r ≤ min δ`.
    pub liminf_ratio: Option<f64>,
    pub clusters: Vec<HellyClusterDoc>,
    pub chain_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub d1_plus: Estimate,
    pub d1_minus: Estimate,
    pub d2: Estimate,
    pub d3_plus: D3Estimate,
    pub d3_minus: D3Estimate,
    pub d4: Estimate,
    /// `D3 ≤ D1 ≤ D2` within `config.chain_tol`, on both sides.
    pub chain_ok: bool,
    /// `Δ`: the smaller of the two `d3` bracket tops and the `min n(r)/r` bounds.
    pub delta: f64,
    /// `πΔ`, the half-angle of the arc that must carry a singularity.
    pub arc_half_angle: f64,
    pub plus: SideReport,
    pub minus: SideReport,
    pub config: EstimatorConfig,
    pub diagnostics: Vec<String>,
}

fn side_report(
    fam: &WindowFamily,
    side: Side,
    cfg: &EstimatorConfig,
    d2: &Estimate,
    declared: Option<&SelfSimilarSpec>,
    diagnostics: &mut Vec<String>,
) -> Result<SideReport> {
    let d1 = d1_estimate(fam, side, &cfg.r_grid, cfg.k_min, cfg.min_span)?;
    let ks = admissible_windows(fam, &cfg.r_grid, cfg.k_min, cfg.min_span);
    // Finest r resolved by at least two windows (one if that is all there is).
    let need = ks.len().min(2);
    let resolving = |r: f64| ks.iter().filter(|&&k| r * fam.windows()[k].m as f64 >= cfg.min_span).count();
    let floor_r = sorted_desc(&cfg.r_grid).into_iter().rfind(|&r| resolving(r) >= need).unwrap();
    let ks: Vec<usize> = ks.into_iter().filter(|&k| floor_r * fam.windows()[k].m as f64 >= cfg.min_span).collect();
    let grid = helly_grid(cfg.helly_grid, &BigRational::of_f64(floor_r));
    let clusters = if ks.len() >= 2 {
        helly_limits(fam, side, &grid, cfg.cluster_tol, ks[0])?
    } else {
        let rep = fam.windows()[ks[0]].counts(side).grid_pwl(&grid)?.simplified();
        let valid = rep.is_limit_function();
        vec![HellyCluster { representative: rep, members: ks.clone(), valid }]
    };
    let deltas = cfg.deltas()?;
    let min_delta = deltas.iter().cloned().reduce(BigRational::min_of).unwrap_or_else(BigRational::one);
    let mut d3 = clusters
        .par_iter()
        .map(|c| d3_estimate(&LimitInput::Pwl(c.representative.clone()), &deltas, cfg.a_tol))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .unwrap();
    if let Some(spec) = declared {
        let newest = &clusters.iter().max_by_key(|c| c.members.last().copied()).unwrap().representative;
        let sup = newest.points().iter().map(|(x, y)| (spec.eval(x) - y).as_f64().abs()).fold(0.0, f64::max);
        if sup <= cfg.cluster_tol {
            let from_spec = d3_estimate(&LimitInput::SelfSimilar(spec.clone()), &deltas, cfg.a_tol)?;
            diagnostics.push(format!("{side}: declared limit within {sup:.4} of the data; d3 from it is {:.4}", from_spec.value));
            if from_spec.value < d3.value {
                d3 = from_spec;
            }
        } else {
            diagnostics.push(format!("{side}: declared limit is {sup:.4} from the data (tolerance {}); ignored", cfg.cluster_tol));
        }
    }
    let liminf_ratio = clusters.iter().filter_map(|c| liminf_ratio(&c.representative, &grid, &min_delta)).reduce(f64::min);
    let chain_ok = d3.value <= d1.value + cfg.chain_tol && d1.value <= d2.value + cfg.chain_tol;
    Ok(SideReport { d1, d3, liminf_ratio, clusters: clusters.iter().map(HellyCluster::to_doc).collect(), chain_ok })
}

/// All densities of a window family; `lambda` is the set `d2` is read from
/// and `horizon` the largest index it is known up to.
pub fn density_report(
    fam: &WindowFamily,
    lambda: &IndexSet,
    horizon: u64,
    cfg: &EstimatorConfig,
    declared: Option<&SelfSimilarSpec>,
) -> Result<DensityReport> {
    let mut diagnostics = fam.diagnostics.clone();
    let d2 = d2_estimate(lambda, &cfg.r_grid, (1, horizon), horizon, cfg.min_span, cfg.stable_tol)?;
    if !d2.stable {
        diagnostics.push("d2 profile has not settled at the smallest admissible r".into());
    }
    let plus = side_report(fam, Side::Plus, cfg, &d2, declared, &mut diagnostics)?;
    let minus = side_report(fam, Side::Minus, cfg, &d2, None, &mut diagnostics)?;
    let d4 = d4_estimate(fam, &cfg.r_grid, cfg.k_min, cfg.min_span)?;
    let delta = [Some(plus.d3.bracket.1), Some(minus.d3.bracket.1), plus.liminf_ratio, minus.liminf_ratio]
        .into_iter()
        .flatten()
        .fold(1.0, f64::min)
        .clamp(0.0, 1.0);
    if d4.value < plus.d3.value.min(minus.d3.value) || d4.value > plus.d1.value.max(minus.d1.value) {
        diagnostics.push(format!("d4 = {:.4} lies outside [min d3, max d1]", d4.value));
    }
    Ok(DensityReport {
        d1_plus: plus.d1.clone(),
        d1_minus: minus.d1.clone(),
        d2,
        d3_plus: plus.d3.clone(),
        d3_minus: minus.d3.clone(),
        d4,
        chain_ok: plus.chain_ok && minus.chain_ok,
        delta,
        arc_half_angle: std::f64::consts::PI * delta,
        plus,
        minus,
        config: cfg.clone(),
        diagnostics,
    })
}

/// [`density_report`] with `d2` read from the union of both sides' index
/// sets, known up to `2·m` of the last window.
pub fn family_report(fam: &WindowFamily, cfg: &EstimatorConfig, declared: Option<&SelfSimilarSpec>) -> Result<DensityReport> {
    let Some(last) = fam.windows().last() else {
        return Err(Error::EmptyFamily("density report needs at least one window".into()));
    };
    let lambda = fam.union(Side::Plus).union(&fam.union(Side::Minus));
    density_report(fam, &lambda, 2 * last.m, cfg, declared)
}
