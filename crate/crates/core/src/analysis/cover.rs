use std::cmp::Ordering;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Open interval `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("({lo}, {hi}) is not a nonempty open interval")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    fn exact_len(&self) -> BigRational {
        BigRational::from_float(self.hi).unwrap() - BigRational::from_float(self.lo).unwrap()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        Ok(Self { intervals: pairs.iter().map(|&(a, b)| Interval::new(a, b)).collect::<Result<_>>()? })
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|i| (i.lo, i.hi)).collect()
    }

    /// Connected components of the union, as open intervals sorted by `lo`.
    /// Intervals that only touch at an endpoint stay separate, since the
    /// shared endpoint is not covered.
    pub fn components(&self) -> Vec<Interval> {
        let mut v = self.intervals.clone();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::new();
        for i in v {
            match out.last_mut() {
                Some(last) if i.lo < last.hi => last.hi = last.hi.max(i.hi),
                _ => out.push(i),
            }
        }
        out
    }

    pub fn covers(&self, i: &Interval) -> bool {
        self.components().iter().any(|c| c.lo <= i.lo && i.hi <= c.hi)
    }

    pub fn multiplicity(&self, x: f64) -> usize {
        self.intervals.iter().filter(|i| i.contains(x)).count()
    }

    /// Largest number of intervals sharing a point, by an endpoint sweep.
    pub fn max_multiplicity(&self) -> usize {
        let mut events: Vec<(f64, i32)> = self.intervals.iter().flat_map(|i| [(i.lo, 1), (i.hi, -1)]).collect();
        // Open intervals: at a shared coordinate, closings come first.
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (mut cur, mut best) = (0i32, 0i32);
        for (_, d) in events {
            cur += d;
            best = best.max(cur);
        }
        best as usize
    }

    pub fn same_union(&self, other: &IntervalSet) -> bool {
        self.components() == other.components()
    }
}

fn without(set: &[Interval], skip: usize) -> IntervalSet {
    IntervalSet { intervals: set.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, iv)| *iv).collect() }
}

/// Subfamily with the same union covering no point more than twice.
///
/// Intervals are visited by decreasing length (ties: smaller left endpoint,
/// then input order); each is kept unless already covered by the kept ones.
/// A second pass then drops, latest first, any kept interval covered by
/// the remaining others. The result is sorted by left endpoint.
pub fn select_cover(e: &IntervalSet) -> IntervalSet {
    let mut order: Vec<usize> = (0..e.intervals.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&e.intervals[a], &e.intervals[b]);
        ib.exact_len().cmp(&ia.exact_len()).then(ia.lo.partial_cmp(&ib.lo).unwrap_or(Ordering::Equal)).then(a.cmp(&b))
    });
    let mut chosen: Vec<Interval> = Vec::new();
    for i in order {
        let iv = e.intervals[i];
        if !(IntervalSet { intervals: chosen.clone() }).covers(&iv) {
            chosen.push(iv);
        }
    }
    let mut k = chosen.len();
    while k > 0 {
        k -= 1;
        if without(&chosen, k).covers(&chosen[k]) {
            chosen.remove(k);
        }
    }
    chosen.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    IntervalSet { intervals: chosen }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverAudit {
    pub union_preserved: bool,
    pub max_multiplicity: usize,
    /// Largest multiplicity seen at the probe points.
    pub probe_multiplicity: usize,
    /// No selected interval is covered by the others.
    pub minimal: bool,
}

pub fn audit_cover(input: &IntervalSet, output: &IntervalSet, probes: &[f64]) -> CoverAudit {
    CoverAudit {
        union_preserved: input.same_union(output),
        max_multiplicity: output.max_multiplicity(),
        probe_multiplicity: probes.iter().map(|&x| output.multiplicity(x)).max().unwrap_or(0),
        minimal: (0..output.intervals.len()).all(|k| !without(&output.intervals, k).covers(&output.intervals[k])),
    }
}
