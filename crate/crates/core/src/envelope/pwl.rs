use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Continuous piecewise-linear function on a closed interval, given by its
/// breakpoints with strictly increasing abscissae.
///
/// Monotonicity and the Lipschitz bound are properties checked on demand
/// (regularized or shifted functions may legitimately violate them).
#[derive(Clone, Debug, PartialEq)]
pub struct PwlFunction<T: Scalar> {
    pts: Vec<(T, T)>,
}

/// On-disk form: `{"domain":[x0,x1],"breakpoints":[[x,y],…]}` with numbers
/// as strings (`"p/q"` in exact mode).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwlDoc {
    pub domain: [String; 2],
    pub breakpoints: Vec<[String; 2]>,
}

impl<T: Scalar> PwlFunction<T> {
    pub fn new(pts: Vec<(T, T)>) -> Result<Self> {
        if pts.len() < 2 {
            return Err(Error::InvalidArgument("a PWL function needs at least two breakpoints".into()));
        }
        if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument("breakpoint abscissae must be strictly increasing".into()));
        }
        Ok(Self { pts })
    }

    pub fn from_f64_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(x, y)| (T::of_f64(x), T::of_f64(y))).collect())
    }

    /// `x ↦ slope·x + intercept` on `[x0, x1]`.
    pub fn linear(x0: T, x1: T, slope: T, intercept: T) -> Result<Self> {
        let y0 = slope.clone() * x0.clone() + intercept.clone();
        let y1 = slope * x1.clone() + intercept;
        Self::new(vec![(x0, y0), (x1, y1)])
    }

    pub fn identity(x0: T, x1: T) -> Result<Self> {
        Self::linear(x0, x1, T::one(), T::zero())
    }

    pub fn zero(x0: T, x1: T) -> Result<Self> {
        Self::linear(x0, x1, T::zero(), T::zero())
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.pts
    }

    pub fn x0(&self) -> &T {
        &self.pts[0].0
    }

    pub fn x1(&self) -> &T {
        &self.pts[self.pts.len() - 1].0
    }

    pub fn domain(&self) -> (T, T) {
        (self.x0().clone(), self.x1().clone())
    }

    pub fn xs(&self) -> Vec<T> {
        self.pts.iter().map(|p| p.0.clone()).collect()
    }

    /// Value at `x`; abscissae outside the domain are clamped to it.
    pub fn eval(&self, x: &T) -> T {
        let n = self.pts.len();
        if *x <= self.pts[0].0 {
            return self.pts[0].1.clone();
        }
        if *x >= self.pts[n - 1].0 {
            return self.pts[n - 1].1.clone();
        }
        let i = self.pts.partition_point(|p| p.0 <= *x);
        let (xa, ya) = &self.pts[i - 1];
        let (xb, yb) = &self.pts[i];
        if x == xa {
            return ya.clone();
        }
        ya.clone() + (yb.clone() - ya.clone()) * (x.clone() - xa.clone()) / (xb.clone() - xa.clone())
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval(&T::of_f64(x)).as_f64()
    }

    pub fn slopes(&self) -> Vec<T> {
        self.pts.windows(2).map(|w| (w[1].1.clone() - w[0].1.clone()) / (w[1].0.clone() - w[0].0.clone())).collect()
    }

    pub fn is_increasing(&self) -> bool {
        self.pts.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    /// All segment slopes are at most 1.
    pub fn is_one_lipschitz(&self) -> bool {
        self.slopes().iter().all(|s| *s <= T::one())
    }

    /// Increasing, 1-Lipschitz and vanishing at 0 (when the domain starts there).
    pub fn is_limit_function(&self) -> bool {
        let anchored = !self.x0().is_zero() || self.pts[0].1.is_zero();
        anchored && self.is_increasing() && self.is_one_lipschitz()
    }

    pub fn restrict(&self, lo: &T, hi: &T) -> Result<Self> {
        if lo < self.x0() || hi > self.x1() || lo >= hi {
            return Err(Error::OutsideDomain { lo: lo.as_f64(), hi: hi.as_f64(), x0: self.x0().as_f64(), x1: self.x1().as_f64() });
        }
        let mut pts = vec![(lo.clone(), self.eval(lo))];
        pts.extend(self.pts.iter().filter(|p| p.0 > *lo && p.0 < *hi).cloned());
        pts.push((hi.clone(), self.eval(hi)));
        Self::new(pts)
    }

    pub fn map_values(&self, f: impl Fn(&T, &T) -> T) -> Self {
        Self { pts: self.pts.iter().map(|(x, y)| (x.clone(), f(x, y))).collect() }
    }

    /// `y + slope·x + intercept`.
    pub fn add_linear(&self, slope: &T, intercept: &T) -> Self {
        self.map_values(|x, y| y.clone() + slope.clone() * x.clone() + intercept.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_values(|_, y| y.clone() * c.clone())
    }

    pub fn neg(&self) -> Self {
        self.map_values(|_, y| -y.clone())
    }

    fn same_domain(&self, other: &Self) -> Result<()> {
        if self.x0() != other.x0() || self.x1() != other.x1() {
            return Err(Error::DomainMismatch(self.x0().as_f64(), self.x1().as_f64(), other.x0().as_f64(), other.x1().as_f64()));
        }
        Ok(())
    }

    /// Union of both breakpoint sets (common domain required).
    pub fn merged_xs(&self, other: &Self) -> Result<Vec<T>> {
        self.same_domain(other)?;
        let mut xs = Vec::with_capacity(self.pts.len() + other.pts.len());
        let (mut i, mut j) = (0, 0);
        while i < self.pts.len() || j < other.pts.len() {
            let next = match (self.pts.get(i), other.pts.get(j)) {
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    a.0.clone()
                }
                (Some(a), Some(b)) if b.0 < a.0 => {
                    j += 1;
                    b.0.clone()
                }
                (Some(a), Some(_)) => {
                    i += 1;
                    j += 1;
                    a.0.clone()
                }
                (Some(a), None) => {
                    i += 1;
                    a.0.clone()
                }
                (None, Some(b)) => {
                    j += 1;
                    b.0.clone()
                }
                (None, None) => unreachable!(),
            };
            xs.push(next);
        }
        Ok(xs)
    }

    fn combine(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        let xs = self.merged_xs(other)?;
        let pts = xs.into_iter().map(|x| {
            let y = f(self.eval(&x), other.eval(&x));
            (x, y)
        });
        Ok(Self { pts: pts.collect() }.simplified())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn extremum(&self, other: &Self, take_min: bool) -> Result<Self> {
        let xs = self.merged_xs(other)?;
        let mut pts: Vec<(T, T)> = Vec::with_capacity(xs.len() * 2);
        let pick = |a: T, b: T| if take_min { T::min_of(a, b) } else { T::max_of(a, b) };
        for (k, x) in xs.iter().enumerate() {
            let (fa, ga) = (self.eval(x), other.eval(x));
            if k > 0 {
                let xp = &xs[k - 1];
                let (fp, gp) = (self.eval(xp), other.eval(xp));
                let dp = fp - gp;
                let da = fa.clone() - ga.clone();
                let crosses =
                    !dp.is_zero() && !da.is_zero() && ((dp.is_positive() && da.is_negative()) || (dp.is_negative() && da.is_positive()));
                if crosses {
                    // f − g is linear on [xp, x]; insert its root.
                    let t = dp.clone() / (dp - da);
                    let xc = xp.clone() + (x.clone() - xp.clone()) * t;
                    let yc = self.eval(&xc);
                    pts.push((xc, yc));
                }
            }
            pts.push((x.clone(), pick(fa, ga)));
        }
        Ok(Self { pts }.simplified())
    }

    pub fn pointwise_min(&self, other: &Self) -> Result<Self> {
        self.extremum(other, true)
    }

    pub fn pointwise_max(&self, other: &Self) -> Result<Self> {
        self.extremum(other, false)
    }

    /// Drops interior breakpoints where the slope does not change, and
    /// duplicate abscissae produced by rounding in floating mode.
    pub fn simplified(mut self) -> Self {
        self.pts.dedup_by(|b, a| a.0 >= b.0);
        if self.pts.len() <= 2 {
            return self;
        }
        let mut out: Vec<(T, T)> = Vec::with_capacity(self.pts.len());
        for p in self.pts.into_iter() {
            while out.len() >= 2 {
                let (xa, ya) = &out[out.len() - 2];
                let (xb, yb) = &out[out.len() - 1];
                let lhs = (yb.clone() - ya.clone()) * (p.0.clone() - xb.clone());
                let rhs = (p.1.clone() - yb.clone()) * (xb.clone() - xa.clone());
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        Self { pts: out }
    }

    /// Largest `|f − g|` over the merged breakpoints (exact sup for PWL pairs).
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        let xs = self.merged_xs(other)?;
        Ok(xs.iter().map(|x| (self.eval(x) - other.eval(x)).abs()).fold(T::zero(), T::max_of))
    }

    /// Same function on the same domain (breakpoint lists may differ).
    pub fn same_function(&self, other: &Self) -> bool {
        match self.merged_xs(other) {
            Ok(xs) => xs.iter().all(|x| self.eval(x) == other.eval(x)),
            Err(_) => false,
        }
    }

    pub fn to_f64(&self) -> PwlFunction<f64> {
        PwlFunction { pts: self.pts.iter().map(|(x, y)| (x.as_f64(), y.as_f64())).collect() }
    }

    pub fn to_doc(&self) -> PwlDoc {
        PwlDoc {
            domain: [self.x0().render(), self.x1().render()],
            breakpoints: self.pts.iter().map(|(x, y)| [x.render(), y.render()]).collect(),
        }
    }

    pub fn from_doc(doc: &PwlDoc) -> Result<Self> {
        let pts = doc.breakpoints.iter().map(|[x, y]| Ok((T::parse(x)?, T::parse(y)?))).collect::<Result<Vec<_>>>()?;
        let f = Self::new(pts)?;
        if *f.x0() != T::parse(&doc.domain[0])? || *f.x1() != T::parse(&doc.domain[1])? {
            return Err(Error::InvalidArgument("domain does not match the first/last breakpoint".into()));
        }
        Ok(f)
    }
}

impl PwlFunction<f64> {
    /// Lifts a floating function to exact rationals (each value converted exactly).
    pub fn to_exact(&self) -> PwlFunction<num_rational::BigRational> {
        PwlFunction { pts: self.pts.iter().map(|&(x, y)| (Scalar::of_f64(x), Scalar::of_f64(y))).collect() }
    }
}
