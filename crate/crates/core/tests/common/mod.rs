#![allow(dead_code)]

use fabry::envelope::{PwlFunction, SlopeBound};
use fabry::seqcore::{IndexSet, Window, WindowFamily};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(p: i64, d: i64) -> Q {
    Q::new(p.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Increasing 1-Lipschitz PWL on `[0, 1]` with `n(0) = 0`, at most
/// `max_pieces` pieces, breakpoints and slopes on the `1/1000` lattice.
pub fn random_limit(rng: &mut ChaCha8Rng, max_pieces: usize) -> PwlFunction<Q> {
    let pieces = rng.random_range(1..=max_pieces);
    let mut cuts: Vec<i64> = (0..pieces - 1).map(|_| rng.random_range(1..1000)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    cuts.push(1000);
    let mut pts = vec![(Q::zero(), Q::zero())];
    let (mut x, mut y) = (0i64, Q::zero());
    for c in cuts {
        let slope = match rng.random_range(0..4) {
            0 => Q::zero(),
            1 => Q::one(),
            _ => q(rng.random_range(0..=1000), 1000),
        };
        y += &slope * q(c - x, 1000);
        x = c;
        pts.push((q(x, 1000), y.clone()));
    }
    PwlFunction::new(pts).unwrap()
}

/// Like [`random_limit`], but starting with slope exactly `a` on `[0, t]`
/// and continuing with slopes in `[0, a]` half of the time, so that the
/// upper-envelope integral converges for a fair share of the corpus.
pub fn random_limit_near(rng: &mut ChaCha8Rng, a: &Q, max_pieces: usize) -> PwlFunction<Q> {
    let t = rng.random_range(50..500i64);
    let tame = rng.random_bool(0.5);
    let mut pts = vec![(Q::zero(), Q::zero()), (q(t, 1000), a * q(t, 1000))];
    let (mut x, mut y) = (t, a * q(t, 1000));
    let pieces = rng.random_range(1..=max_pieces.saturating_sub(1).max(1));
    let mut cuts: Vec<i64> = (0..pieces - 1).map(|_| rng.random_range(t + 1..1000)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    cuts.push(1000);
    for c in cuts {
        let slope = if tame { a * q(rng.random_range(0..=1000), 1000) } else { q(rng.random_range(0..=1000), 1000) };
        y += &slope * q(c - x, 1000);
        x = c;
        pts.push((q(x, 1000), y.clone()));
    }
    PwlFunction::new(pts).unwrap()
}

/// An increasing PWL `h` with `h(0) = 0` on the lattice, slopes in `[0, cap]`.
pub fn random_increasing(rng: &mut ChaCha8Rng, cap: &Q) -> PwlFunction<Q> {
    let mut cuts: Vec<i64> = (0..rng.random_range(0..6)).map(|_| rng.random_range(1..1000)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    cuts.push(1000);
    let mut pts = vec![(Q::zero(), Q::zero())];
    let (mut x, mut y) = (0i64, Q::zero());
    for c in cuts {
        let s = if rng.random_bool(0.3) { Q::zero() } else { cap * q(rng.random_range(0..=1000), 1000) };
        y += s * q(c - x, 1000);
        x = c;
        pts.push((q(x, 1000), y.clone()));
    }
    PwlFunction::new(pts).unwrap()
}

pub fn bound(v: Q) -> SlopeBound<Q> {
    SlopeBound::new(v).unwrap()
}

pub fn random_bound(rng: &mut ChaCha8Rng) -> Q {
    q(rng.random_range(1..8), 8)
}

/// Values of `n` on the grid `i/1000`, `i = 0..=1000`.
pub fn grid_values(n: &PwlFunction<Q>) -> Vec<f64> {
    (0..=1000).map(|i| fabry::Scalar::as_f64(&n.eval(&q(i, 1000)))).collect()
}

/// Lower regularization by brute force on the grid: `min_y n(y) + k(x − y)`.
pub fn brute_lower(vals: &[f64], delta: f64) -> Vec<f64> {
    let h = 1e-3;
    (0..vals.len())
        .map(|i| {
            vals.iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = (i as f64 - j as f64) * h;
                    v + if t >= 0.0 { t } else { delta * t }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Upper regularization by brute force: `max_y n(y) − k_a(y − x)` with
/// `k_a(t) = a·t` for `t ≥ 0` and `0` for `t < 0`.
pub fn brute_upper(vals: &[f64], a: f64) -> Vec<f64> {
    let h = 1e-3;
    (0..vals.len())
        .map(|i| {
            vals.iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = (j as f64 - i as f64) * h;
                    v - if t >= 0.0 { a * t } else { 0.0 }
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Exact equality of two PWL functions on the union of their breakpoints.
pub fn same_function(f: &PwlFunction<Q>, g: &PwlFunction<Q>) -> bool {
    f.x0() == g.x0() && f.x1() == g.x1() && f.points().iter().chain(g.points()).all(|(x, _)| f.eval(x) == g.eval(x))
}

/// Random window family on anchors `base·2^k`, each `Λ_{k,±}` a random
/// subset of its half-window with density drawn per family.
pub fn random_family(rng: &mut ChaCha8Rng, base: u64, windows: usize) -> WindowFamily {
    let p = rng.random_range(0.05..0.9);
    let ws = (0..windows)
        .map(|k| {
            let m = base << k;
            let plus: Vec<u64> = (m + 1..=2 * m).filter(|_| rng.random_bool(p)).collect();
            let minus: Vec<u64> = (0..m).filter(|_| rng.random_bool(p)).collect();
            Window { m, beta: 0.0, lambda_plus: IndexSet::from_unsorted(plus), lambda_minus: IndexSet::from_unsorted(minus) }
        })
        .collect();
    WindowFamily::new(ws).unwrap()
}

/// Adds each missing index of every `Λ_{k,±}` with probability `p`.
pub fn enlarge(rng: &mut ChaCha8Rng, fam: &WindowFamily, p: f64) -> WindowFamily {
    let ws = fam
        .windows()
        .iter()
        .map(|w| {
            let m = w.m;
            let grow = |set: &IndexSet, range: std::ops::Range<u64>, rng: &mut ChaCha8Rng| {
                let mut v: Vec<u64> = set.members().to_vec();
                v.extend(range.filter(|i| set.members().binary_search(i).is_err() && rng.random_bool(p)));
                IndexSet::from_unsorted(v)
            };
            let plus = grow(&w.lambda_plus, m + 1..2 * m + 1, rng);
            let minus = grow(&w.lambda_minus, 0..m, rng);
            Window { m, beta: w.beta, lambda_plus: plus, lambda_minus: minus }
        })
        .collect();
    WindowFamily::new(ws).unwrap()
}
