use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::envelope::PwlFunction;
use crate::{Error, Result, Scalar};

/// Limit function determined by one band: `n(r) = ρ^j · p(r / ρ^j)` for
/// `r ∈ [ρ^{j+1}, ρ^j]`, where `p` is the pattern on `[ρ, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfSimilarSpec {
    pattern: PwlFunction<BigRational>,
    rho: BigRational,
    /// Number of bands used by band-sum analyses.
    pub bands: usize,
}

/// On-disk form: `{"pattern": [[x,y],…], "rho": "1/4", "bands": K}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarDoc {
    pub pattern: Vec<[String; 2]>,
    pub rho: String,
    pub bands: usize,
}

impl SelfSimilarSpec {
    pub fn new(pattern: PwlFunction<BigRational>, rho: BigRational, bands: usize) -> Result<Self> {
        if rho <= BigRational::zero() || rho >= BigRational::one() {
            return Err(Error::InvalidArgument("rho must lie in (0, 1)".into()));
        }
        if *pattern.x0() != rho || !pattern.x1().is_one() {
            return Err(Error::InvalidArgument("pattern must be given on [rho, 1]".into()));
        }
        let (_, p_rho) = pattern.points()[0].clone();
        let p_one = pattern.points().last().unwrap().1.clone();
        if p_rho != &rho * &p_one {
            return Err(Error::InvalidArgument("pattern must satisfy p(rho) = rho * p(1)".into()));
        }
        if p_rho < BigRational::zero() || !pattern.is_increasing() || !pattern.is_one_lipschitz() {
            return Err(Error::InvalidArgument("pattern must be non-negative, increasing and 1-Lipschitz".into()));
        }
        if bands == 0 {
            return Err(Error::InvalidArgument("at least one band is needed".into()));
        }
        Ok(Self { pattern, rho, bands })
    }

    /// Flat on `[ρ, c]`, slope 1 on `[c, 1]`, peaking at `n(1) = peak`.
    ///
    /// The ratio `n(r)/r` oscillates between `peak` (at `r = ρ^j`) and
    /// `ρ·peak/c` (at the end of each flat piece).
    pub fn oscillating(rho: BigRational, peak: BigRational, bands: usize) -> Result<Self> {
        if peak <= BigRational::zero() || peak >= BigRational::one() {
            return Err(Error::InvalidArgument("peak must lie in (0, 1)".into()));
        }
        let low = &rho * &peak;
        let c = BigRational::one() - &peak * (BigRational::one() - &rho);
        let pattern = PwlFunction::new(vec![(rho.clone(), low.clone()), (c, low), (BigRational::one(), peak)])?;
        Self::new(pattern, rho, bands)
    }

    pub fn rho(&self) -> &BigRational {
        &self.rho
    }

    pub fn pattern(&self) -> &PwlFunction<BigRational> {
        &self.pattern
    }

    pub fn eval(&self, r: &BigRational) -> BigRational {
        if *r <= BigRational::zero() {
            return BigRational::zero();
        }
        let mut x = r.clone();
        let mut scale = BigRational::one();
        while x < self.rho {
            x /= &self.rho;
            scale *= &self.rho;
        }
        while x > BigRational::one() {
            x *= &self.rho;
            scale /= &self.rho;
        }
        scale * self.pattern.eval(&x)
    }

    pub fn eval_f64(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.eval(&BigRational::of_f64(r)).as_f64()
    }

    /// `ρ^j`.
    pub fn scale(&self, j: usize) -> BigRational {
        num_traits::pow(self.rho.clone(), j)
    }

    /// Index of the band `[ρ^{j+1}, ρ^j]` that contains `r ∈ (0, 1]`
    /// (the upper one when `r` is a band edge).
    pub fn band_of(&self, r: &BigRational) -> usize {
        let mut j = 0;
        let mut s = BigRational::one();
        while *r <= &s * &self.rho {
            s *= &self.rho;
            j += 1;
        }
        j
    }

    /// Finite PWL on `[0, δ]` that equals the limit on `[ρ^{deepest+1}, δ]`
    /// and is linear on `[0, ρ^{deepest+1}]`.
    pub fn truncated_pwl(&self, delta: &BigRational, deepest: usize) -> Result<PwlFunction<BigRational>> {
        if *delta <= BigRational::zero() || *delta > BigRational::one() {
            return Err(Error::InvalidArgument("delta must lie in (0, 1]".into()));
        }
        let mut pts: Vec<(BigRational, BigRational)> = vec![(BigRational::zero(), BigRational::zero())];
        for j in (0..=deepest).rev() {
            let s = self.scale(j);
            let band = self.pattern.points();
            // The first pattern point repeats the last point of the band below.
            let skip = if j == deepest { 0 } else { 1 };
            for (x, y) in band.iter().skip(skip) {
                let sx = &s * x;
                if sx >= *delta {
                    break;
                }
                pts.push((sx, &s * y));
            }
        }
        pts.push((delta.clone(), self.eval(delta)));
        pts.dedup_by(|b, a| a.0 == b.0);
        Ok(PwlFunction::new(pts)?.simplified())
    }

    /// Extremes of `n(r)/r` over one band, attained at pattern breakpoints.
    pub fn ratio_range(&self) -> (BigRational, BigRational) {
        let ratios: Vec<BigRational> = self.pattern.points().iter().map(|(x, y)| y / x).collect();
        let lo = ratios.iter().cloned().fold(ratios[0].clone(), BigRational::min_of);
        let hi = ratios.iter().cloned().fold(ratios[0].clone(), BigRational::max_of);
        (lo, hi)
    }

    pub fn min_slope(&self) -> BigRational {
        let s = self.pattern.slopes();
        s.iter().cloned().fold(s[0].clone(), BigRational::min_of)
    }

    pub fn to_doc(&self) -> SelfSimilarDoc {
        SelfSimilarDoc {
            pattern: self.pattern.points().iter().map(|(x, y)| [x.render(), y.render()]).collect(),
            rho: self.rho.render(),
            bands: self.bands,
        }
    }

    pub fn from_doc(doc: &SelfSimilarDoc) -> Result<Self> {
        let pts = doc.pattern.iter().map(|[x, y]| Ok((BigRational::parse(x)?, BigRational::parse(y)?))).collect::<Result<Vec<_>>>()?;
        Self::new(PwlFunction::new(pts)?, BigRational::parse(&doc.rho)?, doc.bands)
    }
}
