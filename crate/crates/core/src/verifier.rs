//! Independent certification of steady states for given parameters.
//!
//! On the compatibility class W x = c every concentration is an affine
//! function of the pivot concentration y = x_p, so the steady states are the
//! roots of the univariate polynomial
//! `k1 prod x_k(y)^alpha_k1 + lambda k2 prod x_k(y)^alpha_k2` on the segment
//! where all x_k(y) > 0. Stability comes from the single nonzero Jacobian
//! eigenvalue.

use nalgebra::{Complex, DMatrix};
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::network::{row_species, stoich_data};
use crate::parser::BiNetwork;
use crate::poly::{isolate_roots, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("the stoichiometric subspace is not one-dimensional")]
    NotOneDimensional,
    #[error("lambda = {0} is not negative; there is no positive steady state")]
    LambdaNonnegative(String),
    #[error("expected {expected} total constants, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rate constants must be positive and finite")]
    InvalidKappa,
    #[error("total constants must be finite")]
    InvalidTotals,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SteadyStateSet {
    /// Positive steady states, ordered by increasing pivot concentration.
    pub states: Vec<Vec<f64>>,
    /// The nonzero Jacobian eigenvalue at each state.
    pub eigenvalue: Vec<f64>,
    pub stable: Vec<bool>,
    /// |eigenvalue| within tolerance of zero.
    pub degenerate: Vec<bool>,
    /// Largest relative residual of the augmented steady-state system.
    pub residuals: Vec<f64>,
}

impl SteadyStateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn stable_count(&self) -> usize {
        self.stable.iter().filter(|&&s| s).count()
    }
}

/// Relative threshold separating stable, degenerate and unstable states.
pub const STABILITY_TOL: f64 = 1e-9;

fn check_kappa(kappa: [f64; 2]) -> Result<(), VerifyError> {
    if kappa.iter().all(|k| k.is_finite() && *k > 0.0) {
        Ok(())
    } else {
        Err(VerifyError::InvalidKappa)
    }
}

fn monomial(net: &BiNetwork, j: usize, x: &[f64]) -> f64 {
    (0..x.len()).map(|k| x[k].powi(net.alpha(k, j) as i32)).product()
}

/// The trace of the Jacobian together with the sum of the absolute values
/// of its terms.
fn trace_and_scale(net: &BiNetwork, kappa: [f64; 2], x: &[f64]) -> (f64, f64) {
    let mut trace = 0.0;
    let mut scale = 0.0;
    for (j, &k) in kappa.iter().enumerate() {
        let rate = k * monomial(net, j, x);
        for (k, &xk) in x.iter().enumerate() {
            let n = net.beta(k, j) as f64 - net.alpha(k, j) as f64;
            let term = n * rate * net.alpha(k, j) as f64 / xk;
            trace += term;
            scale += term.abs();
        }
    }
    (trace, scale)
}

/// The one eigenvalue of Jac_f(x) that can be nonzero. Jac_f = u grad(phi)^T
/// has rank at most one, so this eigenvalue equals its trace.
pub fn jacobian_eigenvalue(net: &BiNetwork, kappa: [f64; 2], x: &[f64]) -> f64 {
    trace_and_scale(net, kappa, x).0
}

/// Jacobian of the mass-action vector field, assembled entry by entry.
pub fn full_jacobian(net: &BiNetwork, kappa: [f64; 2], x: &[f64]) -> DMatrix<f64> {
    let s = x.len();
    DMatrix::from_fn(s, s, |i, k| {
        (0..2)
            .map(|j| {
                let n = net.beta(i, j) as f64 - net.alpha(i, j) as f64;
                n * kappa[j] * net.alpha(k, j) as f64 * monomial(net, j, x) / x[k]
            })
            .sum()
    })
}

pub fn jacobian_spectrum(net: &BiNetwork, kappa: [f64; 2], x: &[f64]) -> Vec<Complex<f64>> {
    full_jacobian(net, kappa, x)
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Mass-action right-hand side dx/dt.
pub fn vector_field(net: &BiNetwork, kappa: [f64; 2], x: &[f64]) -> Vec<f64> {
    let rates = [kappa[0] * monomial(net, 0, x), kappa[1] * monomial(net, 1, x)];
    (0..x.len())
        .map(|i| {
            (0..2)
                .map(|j| (net.beta(i, j) as f64 - net.alpha(i, j) as f64) * rates[j])
                .sum()
        })
        .collect()
}

/// Affine parametrization x_k = slope * y + offset of the class W x = c by the
/// pivot concentration y.
#[derive(Clone, Debug)]
pub struct ClassLine {
    pub pivot: usize,
    pub slope: Vec<f64>,
    pub offset: Vec<f64>,
    /// Open y-segment where every coordinate is positive (None if empty).
    pub segment: Option<(f64, f64)>,
}

impl ClassLine {
    pub fn point(&self, y: f64) -> Vec<f64> {
        self.slope.iter().zip(&self.offset).map(|(s, o)| s * y + o).collect()
    }
}

pub fn class_line(net: &BiNetwork, c: &[f64]) -> Result<ClassLine, VerifyError> {
    let sd = stoich_data(net);
    if !sd.rank_ok {
        return Err(VerifyError::NotOneDimensional);
    }
    let s = net.num_species();
    if c.len() + 1 != s {
        return Err(VerifyError::DimensionMismatch {
            expected: s - 1,
            got: c.len(),
        });
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(VerifyError::InvalidTotals);
    }
    let p = sd.pivot;
    let up = sd.u(p) as f64;
    let mut slope = vec![0.0; s];
    let mut offset = vec![0.0; s];
    slope[p] = 1.0;
    // row: N_k1 x_p - N_p1 x_k = c_k
    for (row, k) in row_species(&sd).into_iter().enumerate() {
        slope[k] = sd.u(k) as f64 / up;
        offset[k] = -c[row] / up;
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut empty = false;
    for k in 0..s {
        if slope[k] > 0.0 {
            lo = lo.max(-offset[k] / slope[k]);
        } else if slope[k] < 0.0 {
            hi = hi.min(-offset[k] / slope[k]);
        } else if offset[k] <= 0.0 {
            empty = true;
        }
    }
    let segment = (!empty && lo < hi).then_some((lo, hi));
    Ok(ClassLine {
        pivot: p,
        slope,
        offset,
        segment,
    })
}

/// All positive steady states in the class W x = c.
pub fn enumerate_steady_states(net: &BiNetwork, kappa: [f64; 2], c: &[f64]) -> Result<SteadyStateSet, VerifyError> {
    check_kappa(kappa)?;
    let line = class_line(net, c)?;
    let sd = stoich_data(net);
    if !sd.lambda.is_negative() {
        return Err(VerifyError::LambdaNonnegative(sd.lambda.to_string()));
    }
    let lambda = sd.lambda.to_f64().expect("finite ratio");
    let Some((lo, hi)) = line.segment else {
        return Ok(SteadyStateSet::default());
    };
    let s = net.num_species();

    // exponents after dividing out the common monomial
    let common: Vec<u32> = (0..s).map(|k| net.alpha(k, 0).min(net.alpha(k, 1))).collect();
    let e1: Vec<u32> = (0..s).map(|k| net.alpha(k, 0) - common[k]).collect();
    let e2: Vec<u32> = (0..s).map(|k| net.alpha(k, 1) - common[k]).collect();
    if e1 == e2 {
        // the two monomials coincide; steady states are not isolated
        return Ok(SteadyStateSet::default());
    }
    let k1 = kappa[0];
    let k2 = -lambda * kappa[1];

    let shift = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    };
    let side = |e: &[u32], coef: f64| {
        let mut p = Poly::constant(shift, coef);
        for (k, &ek) in e.iter().enumerate() {
            for _ in 0..ek {
                p = p.mul_linear(line.slope[k], line.offset[k]);
            }
        }
        p
    };
    let poly = side(&e1, k1).add(&side(&e2, -k2));
    let eval = |y: f64| {
        let x = line.point(y);
        let prod = |e: &[u32]| (0..s).map(|k| x[k].powi(e[k] as i32)).product::<f64>();
        let (a, b) = (k1 * prod(&e1), k2 * prod(&e2));
        (a - b, a.abs() + b.abs())
    };

    let mut out = SteadyStateSet::default();
    for root in isolate_roots(&poly, lo, hi, &eval) {
        let x = line.point(root.x);
        if x.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let (ev, scale) = trace_and_scale(net, kappa, &x);
        let thr = STABILITY_TOL * scale;
        out.residuals.push(residual(net, &line, kappa, lambda, c, &x));
        out.eigenvalue.push(ev);
        out.stable.push(ev < -thr);
        out.degenerate.push(ev.abs() <= thr || root.touching);
        out.states.push(x);
    }
    Ok(out)
}

fn residual(net: &BiNetwork, line: &ClassLine, kappa: [f64; 2], lambda: f64, c: &[f64], x: &[f64]) -> f64 {
    let (m1, m2) = (kappa[0] * monomial(net, 0, x), -lambda * kappa[1] * monomial(net, 1, x));
    let mut worst = (m1 - m2).abs() / (m1 + m2);
    let p = line.pivot;
    let mut row = 0;
    for k in 0..x.len() {
        if k == p {
            continue;
        }
        // recompute c from the state: N_k1 x_p - N_p1 x_k
        let up = 1.0 / line.slope[p];
        let nk = line.slope[k] * up;
        let lhs = nk * x[p] - up * x[k];
        let scale = c[row].abs().max((nk * x[p]).abs()).max(1.0);
        worst = worst.max((lhs - c[row]).abs() / scale);
        row += 1;
    }
    worst
}

/// True iff the class holds at least two stable positive steady states.
pub fn certify_multistable(net: &BiNetwork, kappa: [f64; 2], c: &[f64]) -> Result<(bool, SteadyStateSet), VerifyError> {
    let set = enumerate_steady_states(net, kappa, c)?;
    Ok((set.stable_count() >= 2, set))
}

/// Samples of an integrated trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Integration stopped early because a coordinate left [1e-12, 1e12].
    pub blew_up: bool,
    /// Steps used by the accepted refinement.
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

const SAMPLES: usize = 200;
const MAX_STEPS: usize = 1 << 22;

fn rk4_step(net: &BiNetwork, kappa: [f64; 2], x: &[f64], h: f64) -> Vec<f64> {
    let f = |y: &[f64]| vector_field(net, kappa, y);
    let axpy = |a: &[f64], k: &[f64], t: f64| a.iter().zip(k).map(|(a, k)| a + t * k).collect::<Vec<_>>();
    let k1 = f(x);
    let k2 = f(&axpy(x, &k1, h / 2.0));
    let k3 = f(&axpy(x, &k2, h / 2.0));
    let k4 = f(&axpy(x, &k3, h));
    (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn integrate(net: &BiNetwork, kappa: [f64; 2], x0: &[f64], t_end: f64, steps: usize) -> Trajectory {
    let h = t_end / steps as f64;
    let every = (steps / SAMPLES).max(1);
    let mut x = x0.to_vec();
    let mut out = Trajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        blew_up: false,
        steps,
    };
    for n in 1..=steps {
        x = rk4_step(net, kappa, &x, h);
        let bad = x.iter().any(|&v| !v.is_finite() || !(1e-12..=1e12).contains(&v));
        if bad || n % every == 0 || n == steps {
            out.times.push(n as f64 * h);
            out.states.push(x.clone());
        }
        if bad {
            out.blew_up = true;
            break;
        }
    }
    out
}

/// Integrates dx/dt from `x0` to `t_end` with classical RK4, halving the step
/// until two successive refinements agree to 1e-6 relative at `t_end`.
pub fn simulate(net: &BiNetwork, kappa: [f64; 2], x0: &[f64], t_end: f64) -> Trajectory {
    let mut steps = 1000;
    let mut prev = integrate(net, kappa, x0, t_end, steps);
    while steps < MAX_STEPS {
        steps *= 2;
        let next = integrate(net, kappa, x0, t_end, steps);
        if prev.blew_up && next.blew_up {
            return next;
        }
        let (a, b) = (prev.last(), next.last());
        let norm = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let diff = a.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        prev = next;
        if !prev.blew_up && diff <= 1e-6 * norm {
            break;
        }
    }
    prev
}
