//! The univariate function g(z) whose level sets are the steady states.
//!
//! Along the one-dimensional stoichiometric direction every concentration is
//! x_i = N_i1 (z + mu_i). The steady-state equation reduces to
//! g(z) = K with
//!
//! ```text
//! g(z) = sum_S1 a ln g_i(z + d_i) - sum_S2 a ln g_i(d_i - z)
//!      + sum_S3 a ln g_i(d_i - z) - sum_S4 a ln g_i(z + d_i)
//! ```
//!
//! on the interval where every argument is positive, and a root z* is a
//! stable steady state exactly when g'(z*) < 0.

use serde::Serialize;
use thiserror::Error;

use crate::network::{IndexPartition, Rational, SpeciesSet};
use crate::poly::{bisect, isolate_roots, Poly};

/// One logarithmic term of g.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GTerm {
    pub species: usize,
    pub set: SpeciesSet,
    pub a: f64,
    pub gamma: f64,
    pub d: f64,
}

impl GTerm {
    /// Signed weight of ln(gamma * arg) in g.
    pub fn coef(&self) -> f64 {
        match self.set {
            SpeciesSet::S1 | SpeciesSet::S3 => self.a,
            _ => -self.a,
        }
    }

    /// alpha_i1 - alpha_i2, so that g'(z) = sum exponent / (z + mu). Since
    /// ln(gamma * arg) = ln x_i this coincides with the weight in g.
    pub fn exponent(&self) -> f64 {
        self.coef()
    }

    /// Terms of S1 and S4 have argument z + d and bound the domain from the left.
    pub fn opens_left(&self) -> bool {
        matches!(self.set, SpeciesSet::S1 | SpeciesSet::S4)
    }

    /// mu with z + mu the (signed) linear factor: d for S1/S4, -d for S2/S3.
    pub fn mu(&self) -> f64 {
        if self.opens_left() {
            self.d
        } else {
            -self.d
        }
    }

    /// The positive argument of the logarithm.
    pub fn arg(&self, z: f64) -> f64 {
        if self.opens_left() {
            z + self.d
        } else {
            self.d - z
        }
    }

    /// Domain endpoint contributed by this term.
    pub fn pole(&self) -> f64 {
        -self.mu()
    }
}

/// Everything that pins down g: the terms, the level K and the extra domain
/// cuts coming from passive species.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryParams {
    pub terms: Vec<GTerm>,
    pub level: f64,
    #[serde(serialize_with = "ser_rational")]
    pub lambda: Rational,
    /// Contribution of constant species to the log-ratio of monomials; the
    /// steady-state level is ln(-lambda k2/k1) = level + folded_offset.
    pub folded_offset: f64,
    /// Positivity of passive species restricts z to (lower_cut, upper_cut).
    pub lower_cut: f64,
    pub upper_cut: f64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("z = {z} lies outside the domain ({lo}, {hi}) of g")]
pub struct DomainError {
    pub z: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Limit of g or g' at an end of the domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Limit {
    PosInf,
    NegInf,
    Finite(f64),
}

impl Limit {
    pub fn value(self) -> f64 {
        match self {
            Limit::PosInf => f64::INFINITY,
            Limit::NegInf => f64::NEG_INFINITY,
            Limit::Finite(v) => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndLimits {
    pub at: f64,
    pub g: Limit,
    pub dg: Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryLimits {
    pub left: EndLimits,
    pub right: EndLimits,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub z: f64,
    pub bracket: (f64, f64),
    /// g' touches zero without changing sign.
    pub multiple: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelRoot {
    pub z: f64,
    /// g'(z) at the root.
    pub slope: f64,
    pub degenerate: bool,
    /// Interval on which g - K is monotone and changes sign.
    pub bracket: (f64, f64),
}

impl LevelRoot {
    pub fn stable(&self) -> bool {
        !self.degenerate && self.slope < 0.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RootReport {
    pub roots: Vec<LevelRoot>,
}

impl RootReport {
    pub fn negative_slopes(&self) -> usize {
        self.roots.iter().filter(|r| r.stable()).count()
    }
}

/// Maximal interval on which g is strictly monotone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub g_lo: Limit,
    pub g_hi: Limit,
    pub increasing: bool,
}

impl Piece {
    fn crosses(&self, k: f64) -> bool {
        let (a, b) = (self.g_lo.value(), self.g_hi.value());
        a.min(b) < k && k < a.max(b)
    }
}

/// A level together with the number of negative-slope crossings it produces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelChoice {
    pub level: f64,
    pub negative_crossings: usize,
    /// Open range of levels with the same crossing pattern.
    pub range: (f64, f64),
}

const DEGENERATE_TOL: f64 = 1e-8;

impl GeometryParams {
    /// Builds g from the partition; `d` is indexed by species and read only
    /// at active indices.
    pub fn new(part: &IndexPartition, d: &[f64], lambda: Rational) -> Self {
        let terms = part
            .active()
            .into_iter()
            .map(|i| GTerm {
                species: i,
                set: part.class[i],
                a: part.a[i] as f64,
                gamma: part.gamma[i] as f64,
                d: d[i],
            })
            .collect();
        GeometryParams {
            terms,
            level: 0.0,
            lambda,
            folded_offset: 0.0,
            lower_cut: f64::NEG_INFINITY,
            upper_cut: f64::INFINITY,
        }
    }

    /// The interval (L, R) where every active argument is positive.
    pub fn interval(&self) -> (f64, f64) {
        let mut l = f64::NEG_INFINITY;
        let mut r = f64::INFINITY;
        for t in &self.terms {
            if t.opens_left() {
                l = l.max(-t.d);
            } else {
                r = r.min(t.d);
            }
        }
        (l, r)
    }

    /// The interval intersected with the passive-species cuts.
    pub fn domain(&self) -> (f64, f64) {
        let (l, r) = self.interval();
        (l.max(self.lower_cut), r.min(self.upper_cut))
    }

    pub fn contains(&self, z: f64) -> bool {
        let (lo, hi) = self.domain();
        lo < z && z < hi
    }

    fn check(&self, z: f64) -> Result<(), DomainError> {
        let (lo, hi) = self.domain();
        if lo < z && z < hi {
            Ok(())
        } else {
            Err(DomainError { z, lo, hi })
        }
    }

    fn g_unchecked(&self, z: f64) -> f64 {
        self.terms.iter().map(|t| t.coef() * (t.gamma * t.arg(z)).ln()).sum()
    }

    fn dg_unchecked(&self, z: f64) -> f64 {
        self.terms.iter().map(|t| t.exponent() / (z + t.mu())).sum()
    }

    /// Sum of |term| of g', the scale for degeneracy tests.
    fn dg_scale(&self, z: f64) -> f64 {
        self.terms.iter().map(|t| (t.exponent() / (z + t.mu())).abs()).sum()
    }

    pub fn eval_g(&self, z: f64) -> Result<f64, DomainError> {
        self.check(z)?;
        Ok(self.g_unchecked(z))
    }

    pub fn eval_dg(&self, z: f64) -> Result<f64, DomainError> {
        self.check(z)?;
        Ok(self.dg_unchecked(z))
    }

    pub fn eval_d2g(&self, z: f64) -> Result<f64, DomainError> {
        self.check(z)?;
        Ok(self.terms.iter().map(|t| -t.exponent() / (z + t.mu()).powi(2)).sum())
    }

    /// Limit of g at a pole where the terms in `attaining` vanish; the other
    /// terms are evaluated at the pole.
    fn pole_limit(&self, at: f64, left: bool) -> EndLimits {
        let attaining: Vec<&GTerm> = self
            .terms
            .iter()
            .filter(|t| t.pole() == at && t.opens_left() == left)
            .collect();
        let net: f64 = attaining.iter().map(|t| t.coef()).sum();
        let others = || {
            self.terms
                .iter()
                .filter(|t| !(t.pole() == at && t.opens_left() == left))
        };
        // ln(arg) -> -inf, so g moves against the sign of the net weight
        let (g, dg) = if net > 0.0 {
            (Limit::NegInf, if left { Limit::PosInf } else { Limit::NegInf })
        } else if net < 0.0 {
            (Limit::PosInf, if left { Limit::NegInf } else { Limit::PosInf })
        } else {
            // equal-weight logarithms at the same pole cancel
            let g = attaining.iter().map(|t| t.coef() * t.gamma.ln()).sum::<f64>()
                + others().map(|t| t.coef() * (t.gamma * t.arg(at)).ln()).sum::<f64>();
            let dg = others().map(|t| t.exponent() / (at + t.mu())).sum();
            (Limit::Finite(g), Limit::Finite(dg))
        };
        EndLimits { at, g, dg }
    }

    /// Limit as z -> +-inf; only terms whose argument grows are present.
    fn infinite_limit(&self, at: f64) -> EndLimits {
        let net: f64 = self.terms.iter().map(|t| t.coef()).sum();
        let g = if net > 0.0 {
            Limit::PosInf
        } else if net < 0.0 {
            Limit::NegInf
        } else {
            Limit::Finite(self.terms.iter().map(|t| t.coef() * t.gamma.ln()).sum())
        };
        EndLimits {
            at,
            g,
            dg: Limit::Finite(0.0),
        }
    }

    fn end_limits(&self, left: bool) -> EndLimits {
        let (l, r) = self.interval();
        let (pole, cut) = if left { (l, self.lower_cut) } else { (r, self.upper_cut) };
        let cut_binds = if left { cut > pole } else { cut < pole };
        if cut_binds {
            EndLimits {
                at: cut,
                g: Limit::Finite(self.g_unchecked(cut)),
                dg: Limit::Finite(self.dg_unchecked(cut)),
            }
        } else if pole.is_finite() {
            self.pole_limit(pole, left)
        } else {
            self.infinite_limit(pole)
        }
    }

    pub fn boundary_limits(&self) -> BoundaryLimits {
        BoundaryLimits {
            left: self.end_limits(true),
            right: self.end_limits(false),
        }
    }

    /// Poles of g' after merging equal mu, as (mu, summed exponent).
    fn merged_poles(&self) -> Vec<(f64, f64)> {
        let mut poles: Vec<(f64, f64)> = Vec::new();
        for t in &self.terms {
            match poles.iter_mut().find(|(mu, _)| *mu == t.mu()) {
                Some(p) => p.1 += t.exponent(),
                None => poles.push((t.mu(), t.exponent())),
            }
        }
        poles.retain(|&(_, e)| e != 0.0);
        poles
    }

    /// Real zeros of g' inside the domain, in increasing order.
    pub fn critical_points(&self) -> Vec<CriticalPoint> {
        let poles = self.merged_poles();
        if poles.len() < 2 {
            return Vec::new();
        }
        let (lo, hi) = self.domain();
        let shift = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        };
        // numerator of g' over the product of (z + mu)
        let mut numer = Poly::constant(shift, 0.0);
        for (k, &(_, e)) in poles.iter().enumerate() {
            let factors: Vec<(f64, f64)> = poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &(mu, _))| (1.0, mu))
                .collect();
            numer = numer.add(&Poly::from_linear_factors(shift, &factors).scale(e));
        }
        let eval = |z: f64| {
            let mut value = 0.0;
            let mut scale = 0.0;
            for (k, &(_, e)) in poles.iter().enumerate() {
                let mut prod = e;
                for (j, &(mu, _)) in poles.iter().enumerate() {
                    if j != k {
                        prod *= z + mu;
                    }
                }
                value += prod;
                scale += prod.abs();
            }
            (value, scale)
        };
        isolate_roots(&numer, lo, hi, &eval)
            .into_iter()
            .map(|r| CriticalPoint {
                z: r.x,
                bracket: r.bracket,
                multiple: r.touching,
            })
            .collect()
    }

    /// Splits the domain into maximal monotone pieces.
    pub fn pieces(&self) -> Vec<Piece> {
        let limits = self.boundary_limits();
        let crit: Vec<f64> = self.critical_points().iter().map(|c| c.z).collect();
        let mut ends = vec![(limits.left.at, limits.left.g)];
        ends.extend(crit.iter().map(|&z| (z, Limit::Finite(self.g_unchecked(z)))));
        ends.push((limits.right.at, limits.right.g));
        ends.windows(2)
            .filter(|w| w[0].0 < w[1].0)
            .map(|w| {
                let (lo, hi) = (w[0].0, w[1].0);
                let probe = interior_point(lo, hi);
                Piece {
                    lo,
                    hi,
                    g_lo: w[0].1,
                    g_hi: w[1].1,
                    increasing: self.dg_unchecked(probe) > 0.0,
                }
            })
            .collect()
    }

    /// Finds a point in `(lo, hi)` where g - k has the given sign, moving from
    /// an interior point toward `end`.
    fn approach(&self, lo: f64, hi: f64, toward_hi: bool, k: f64, want_positive: bool) -> Option<f64> {
        let end = if toward_hi { hi } else { lo };
        let mut x = interior_point(lo, hi);
        for _ in 0..2200 {
            let v = self.g_unchecked(x) - k;
            if (v > 0.0) == want_positive && v != 0.0 && !v.is_nan() {
                return Some(x);
            }
            let next = if end.is_finite() {
                0.5 * (x + end)
            } else {
                let step = x.abs().max(1.0);
                if toward_hi {
                    x + step
                } else {
                    x - step
                }
            };
            if next == x || next == end || !next.is_finite() {
                return None;
            }
            x = next;
        }
        None
    }

    /// All solutions of g(z) = k in the domain.
    pub fn solve_level(&self, k: f64) -> RootReport {
        let pieces = self.pieces();
        let mut roots = Vec::new();
        for p in &pieces {
            if !p.crosses(k) {
                continue;
            }
            // g - k is negative on the low-value side
            let (neg_toward_hi, pos_toward_hi) = if p.increasing { (false, true) } else { (true, false) };
            let a = match p.g_lo {
                Limit::Finite(v) if p.lo.is_finite() && (v - k > 0.0) == !p.increasing => Some(p.lo),
                _ => None,
            };
            let b = match p.g_hi {
                Limit::Finite(v) if p.hi.is_finite() && (v - k > 0.0) == p.increasing => Some(p.hi),
                _ => None,
            };
            let neg = if p.increasing { a } else { b }.or_else(|| self.approach(p.lo, p.hi, neg_toward_hi, k, false));
            let pos = if p.increasing { b } else { a }.or_else(|| self.approach(p.lo, p.hi, pos_toward_hi, k, true));
            let (neg, pos) = match (neg, pos) {
                (Some(neg), Some(pos)) => (neg, pos),
                (found, None) | (None, found) if found.is_some() => {
                    // the crossing lies closer to a pole than one ulp
                    let toward_hi = if neg.is_none() { neg_toward_hi } else { pos_toward_hi };
                    let z = if toward_hi { p.hi.next_down() } else { p.lo.next_up() };
                    if z.is_finite() && self.contains(z) {
                        log::debug!("level {k} crosses within one ulp of {z}");
                        roots.push(self.make_root(z, (z, z)));
                    } else {
                        log::warn!("could not bracket level {k} on ({}, {})", p.lo, p.hi);
                    }
                    continue;
                }
                _ => {
                    log::warn!("could not bracket level {k} on ({}, {})", p.lo, p.hi);
                    continue;
                }
            };
            let (lo, hi) = if neg < pos { (neg, pos) } else { (pos, neg) };
            let z = bisect(|z| self.g_unchecked(z) - k, lo, hi);
            roots.push(self.make_root(z, (lo, hi)));
        }
        // levels that hit a local extremum exactly
        for c in self.critical_points() {
            let gc = self.g_unchecked(c.z);
            if (gc - k).abs() <= 1e-12 * k.abs().max(1.0)
                && !roots
                    .iter()
                    .any(|r: &LevelRoot| (r.z - c.z).abs() <= 1e-9 * c.z.abs().max(1.0))
            {
                roots.push(LevelRoot {
                    z: c.z,
                    slope: self.dg_unchecked(c.z),
                    degenerate: true,
                    bracket: (c.z, c.z),
                });
            }
        }
        roots.sort_by(|a, b| a.z.total_cmp(&b.z));
        RootReport { roots }
    }

    fn make_root(&self, z: f64, bracket: (f64, f64)) -> LevelRoot {
        let slope = self.dg_unchecked(z);
        LevelRoot {
            z,
            slope,
            degenerate: slope.abs() < DEGENERATE_TOL * self.dg_scale(z),
            bracket,
        }
    }

    /// Number of decreasing pieces crossed by level `k`.
    pub fn negative_crossings(&self, k: f64) -> usize {
        self.pieces().iter().filter(|p| !p.increasing && p.crosses(k)).count()
    }

    /// Chooses the level with the most negative-slope crossings; ties go to
    /// the widest bounded range of levels, whose midpoint is returned.
    pub fn best_level(&self) -> LevelChoice {
        let pieces = self.pieces();
        let mut values: Vec<f64> = pieces
            .iter()
            .flat_map(|p| [p.g_lo, p.g_hi])
            .filter_map(|l| match l {
                Limit::Finite(v) => Some(v),
                _ => None,
            })
            .collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let count = |k: f64| pieces.iter().filter(|p| !p.increasing && p.crosses(k)).count();
        if values.is_empty() {
            return LevelChoice {
                level: 0.0,
                negative_crossings: count(0.0),
                range: (f64::NEG_INFINITY, f64::INFINITY),
            };
        }
        let spread = (values[values.len() - 1] - values[0]).max(1.0);
        let mut ranges: Vec<(f64, f64, f64)> = Vec::new();
        ranges.push((f64::NEG_INFINITY, values[0], values[0] - spread));
        for w in values.windows(2) {
            ranges.push((w[0], w[1], 0.5 * (w[0] + w[1])));
        }
        ranges.push((
            values[values.len() - 1],
            f64::INFINITY,
            values[values.len() - 1] + spread,
        ));

        let mut best: Option<LevelChoice> = None;
        for (lo, hi, k) in ranges {
            let c = count(k);
            let better = match &best {
                None => true,
                Some(b) => {
                    let (w, bw) = (hi - lo, b.range.1 - b.range.0);
                    // bounded ranges beat unbounded ones on ties
                    c > b.negative_crossings
                        || (c == b.negative_crossings && w.is_finite() && (!bw.is_finite() || w > bw))
                }
            };
            if better {
                best = Some(LevelChoice {
                    level: k,
                    negative_crossings: c,
                    range: (lo, hi),
                });
            }
        }
        best.expect("at least one range")
    }
}

fn interior_point(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + lo.abs().max(1.0),
        (false, true) => hi - hi.abs().max(1.0),
        (false, false) => 0.0,
    }
}
