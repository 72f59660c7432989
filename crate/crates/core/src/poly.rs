//! Real root isolation for univariate polynomials on an interval.
//!
//! Roots are split apart by recursively isolating the roots of the
//! derivative (which gives monotone pieces), then refined by bisection.
//! Expanded coefficients are only used to locate split points; the sign
//! tests that decide the final roots go through a caller-supplied
//! evaluator, which can use a better-conditioned product form.

/// Polynomial in powers of `(x - shift)`, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub shift: f64,
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn constant(shift: f64, c: f64) -> Self {
        Poly { shift, coeffs: vec![c] }
    }

    /// Product of `scale * (x - r)` style linear factors given as
    /// `(slope, offset)` pairs meaning `slope * x + offset`.
    pub fn from_linear_factors(shift: f64, factors: &[(f64, f64)]) -> Self {
        let mut p = Poly::constant(shift, 1.0);
        for &(slope, offset) in factors {
            p = p.mul_linear(slope, offset);
        }
        p
    }

    /// Multiplies by `slope * x + offset`.
    pub fn mul_linear(&self, slope: f64, offset: f64) -> Self {
        // slope * x + offset = slope * t + (offset + slope * shift)
        let c0 = offset + slope * self.shift;
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c * c0;
            out[k + 1] += c * slope;
        }
        Poly {
            shift: self.shift,
            coeffs: out,
        }
    }

    pub fn add(&self, other: &Poly) -> Self {
        assert_eq!(self.shift, other.shift, "polynomials must share a shift");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Poly {
            shift: self.shift,
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly {
            shift: self.shift,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Drops leading coefficients that are zero or negligible relative to
    /// the largest coefficient.
    pub fn trimmed(mut self) -> Self {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while self.coeffs.len() > 1 {
            let last = *self.coeffs.last().unwrap();
            if last == 0.0 || last.abs() <= 1e-15 * max {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Value and a magnitude scale (sum of |term|) at `x`.
    pub fn eval_scaled(&self, x: f64) -> (f64, f64) {
        let t = x - self.shift;
        let mut v = 0.0;
        let mut m = 0.0;
        for &c in self.coeffs.iter().rev() {
            v = v * t + c;
            m = m * t.abs() + c.abs();
        }
        (v, m)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_scaled(x).0
    }

    pub fn derivative(&self) -> Self {
        let coeffs = if self.coeffs.len() <= 1 {
            vec![0.0]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect()
        };
        Poly {
            shift: self.shift,
            coeffs,
        }
    }

    /// Every real root lies within this distance of `shift` (Cauchy bound).
    pub fn root_radius(&self) -> f64 {
        let p = self.clone().trimmed();
        let lead = *p.coeffs.last().unwrap();
        if p.degree() == 0 || lead == 0.0 {
            return 0.0;
        }
        1.0 + p.coeffs[..p.degree()]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()))
    }
}

/// A root found inside the search interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsolatedRoot {
    pub x: f64,
    /// Bracket on which the evaluator changes sign (or the touching point).
    pub bracket: (f64, f64),
    /// The evaluator touches zero without changing sign (even multiplicity).
    pub touching: bool,
}

/// Evaluator returning `(value, scale)`; a value with |value| <= tol * scale
/// counts as zero when testing for touching roots.
pub trait Evaluator: Fn(f64) -> (f64, f64) {}
impl<F: Fn(f64) -> (f64, f64)> Evaluator for F {}

pub const TOUCH_TOL: f64 = 1e-10;

fn root_tol(x: f64) -> f64 {
    1e-13 * x.abs().max(1.0)
}

/// Bisects a sign change of `f` on `[lo, hi]` down to adjacent doubles.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Isolates the real roots of `p` in the open interval `(lo, hi)` (which may
/// be unbounded). Sign decisions use `eval`, which must have the same
/// roots as `p` in the interval.
pub fn isolate_roots(p: &Poly, lo: f64, hi: f64, eval: &dyn Evaluator) -> Vec<IsolatedRoot> {
    let p = p.clone().trimmed();
    if p.degree() == 0 || lo >= hi {
        return Vec::new();
    }
    let r = p.root_radius();
    let lo_c = lo.max(p.shift - r - 1.0);
    let hi_c = hi.min(p.shift + r + 1.0);
    if lo_c >= hi_c {
        return Vec::new();
    }
    isolate_bounded(&p, lo_c, hi_c, eval, lo, hi)
}

fn isolate_bounded(p: &Poly, lo: f64, hi: f64, eval: &dyn Evaluator, open_lo: f64, open_hi: f64) -> Vec<IsolatedRoot> {
    // split points: roots of the derivative, found with the expanded form
    let mut splits: Vec<f64> = Vec::new();
    if p.degree() >= 2 {
        let dp = p.derivative();
        let dpeval = |x: f64| dp.eval_scaled(x);
        splits = isolate_bounded(&dp, lo, hi, &dpeval, lo, hi)
            .into_iter()
            .map(|r| r.x)
            .filter(|&x| x > lo && x < hi)
            .collect();
        splits.dedup();
    }
    let mut points = Vec::with_capacity(splits.len() + 2);
    points.push(lo);
    points.extend(splits.iter().copied());
    points.push(hi);
    let values: Vec<(f64, f64)> = points.iter().map(|&x| eval(x)).collect();

    let mut roots: Vec<IsolatedRoot> = Vec::new();
    for k in 0..points.len() - 1 {
        let (a, b) = (points[k], points[k + 1]);
        let (fa, fb) = (values[k].0, values[k + 1].0);
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            let x = bisect(|x| eval(x).0, a, b);
            roots.push(IsolatedRoot {
                x,
                bracket: (a, b),
                touching: false,
            });
        }
    }
    // interior split points where the evaluator vanishes without a sign change
    for k in 1..points.len() - 1 {
        let (x, v) = (points[k], values[k]);
        if !is_touch(v) {
            continue;
        }
        let left = values[k - 1].0;
        let right = values[k + 1].0;
        let sign_change_here = roots.iter().any(|r| (r.x - x).abs() <= 1e-9 * x.abs().max(1.0));
        if !sign_change_here && (left < 0.0) == (right < 0.0) {
            roots.push(IsolatedRoot {
                x,
                bracket: (x, x),
                touching: true,
            });
        }
    }
    // exact zeros at interior split points count once
    for k in 1..points.len() - 1 {
        if values[k].0 == 0.0 && !roots.iter().any(|r| r.x == points[k]) {
            let left = values[k - 1].0;
            let right = values[k + 1].0;
            roots.push(IsolatedRoot {
                x: points[k],
                bracket: (points[k - 1], points[k + 1]),
                touching: (left < 0.0) == (right < 0.0),
            });
        }
    }
    roots.retain(|r| r.x > open_lo && r.x < open_hi);
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    roots.dedup_by(|a, b| (a.x - b.x).abs() <= root_tol(a.x));
    roots
}

fn is_touch((v, scale): (f64, f64)) -> bool {
    v.abs() <= TOUCH_TOL * scale
}
