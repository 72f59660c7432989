#![allow(dead_code)]

use bistab::gfunction::GeometryParams;
use bistab::network::row_species;
use bistab::verifier::class_line;
use bistab::{analyze_network, BiNetwork};
use num_traits::ToPrimitive;
use rand::Rng;

pub const MAX_COEF: i64 = 6;

/// Random one-dimensional network with negative column ratio: up to
/// `max_species` species and coefficients at most 6.
pub fn random_network<R: Rng>(rng: &mut R, max_species: usize) -> BiNetwork {
    loop {
        let s = rng.gen_range(1..=max_species);
        let v: Vec<i64> = (0..s).map(|_| rng.gen_range(-3..=3)).collect();
        let vmax = v.iter().map(|x| x.abs()).max().unwrap();
        if vmax == 0 {
            continue;
        }
        let kmax = MAX_COEF / vmax;
        let p = rng.gen_range(1..=kmax);
        let q = rng.gen_range(1..=kmax);
        let mut cols = [vec![0u32; s], vec![0u32; s], vec![0u32; s], vec![0u32; s]];
        for i in 0..s {
            for (j, n) in [(0, p * v[i]), (1, -q * v[i])] {
                let lo = (-n).max(0);
                let hi = (MAX_COEF - n).min(MAX_COEF);
                let alpha = rng.gen_range(lo..=hi);
                cols[2 * j][i] = alpha as u32;
                cols[2 * j + 1][i] = (alpha + n) as u32;
            }
        }
        if let Ok(net) = BiNetwork::from_columns(&cols[0], &cols[1], &cols[2], &cols[3]) {
            return net;
        }
    }
}

/// Exponents alpha_i1 - alpha_i2.
pub fn exponents(net: &BiNetwork) -> Vec<f64> {
    (0..net.num_species())
        .map(|i| net.alpha(i, 0) as f64 - net.alpha(i, 1) as f64)
        .collect()
}

/// Total constants of the class through `x`, in conservation-row order.
pub fn totals_through(net: &BiNetwork, x: &[f64]) -> Vec<f64> {
    let sd = bistab::stoich_data(net);
    let p = sd.pivot;
    row_species(&sd)
        .into_iter()
        .map(|k| sd.u(k) as f64 * x[p] - sd.u(p) as f64 * x[k])
        .collect()
}

/// kappa2 (with kappa1 = 1) making `x` a steady state.
pub fn kappa_through(net: &BiNetwork, x: &[f64]) -> f64 {
    let lambda = bistab::stoich_data(net).lambda.to_f64().unwrap();
    let log: f64 = exponents(net).iter().zip(x).map(|(e, xi)| e * xi.ln()).sum();
    log.exp() / -lambda
}

/// g and the level K describing the steady states of (kappa, c), built
/// directly from the class parameterisation with the pivot at z = x_p / N_p1.
pub struct GPath {
    pub gp: GeometryParams,
    pub level: f64,
    pub pivot: usize,
    pub pivot_net: f64,
    /// Class is empty because a constant species would be nonpositive.
    pub empty: bool,
}

impl GPath {
    pub fn z_of(&self, x: &[f64]) -> f64 {
        x[self.pivot] / self.pivot_net
    }

    pub fn count(&self) -> usize {
        if self.empty {
            return 0;
        }
        let (lo, hi) = self.gp.domain();
        if lo >= hi {
            return 0;
        }
        self.gp.solve_level(self.level).roots.len()
    }
}

pub fn g_path(net: &BiNetwork, kappa: [f64; 2], c: &[f64]) -> GPath {
    let analysis = analyze_network(net);
    let sd = &analysis.stoich;
    let part = &analysis.partition;
    let s = net.num_species();
    let p = sd.pivot;
    let up = sd.u(p) as f64;
    let mut mu = vec![0.0; s];
    let mut fixed = vec![None; s];
    for (row, k) in row_species(sd).into_iter().enumerate() {
        let uk = sd.u(k) as f64;
        if uk == 0.0 {
            fixed[k] = Some(-c[row] / up);
        } else {
            mu[k] = -c[row] / (up * uk);
        }
    }
    let mut gp = GeometryParams::new(part, &vec![0.0; s], sd.lambda);
    for t in gp.terms.iter_mut() {
        t.d = if t.opens_left() { mu[t.species] } else { -mu[t.species] };
    }
    let mut empty = false;
    let mut offset = 0.0;
    let e = exponents(net);
    for k in 0..s {
        if let Some(xk) = fixed[k] {
            if xk <= 0.0 {
                empty = true;
            } else {
                offset += e[k] * xk.ln();
            }
        } else if part.class[k] == bistab::SpeciesSet::S5 {
            if sd.u(k) > 0 {
                gp.lower_cut = gp.lower_cut.max(-mu[k]);
            } else {
                gp.upper_cut = gp.upper_cut.min(-mu[k]);
            }
        }
    }
    gp.folded_offset = offset;
    let lambda = sd.lambda.to_f64().unwrap();
    let level = (-lambda * kappa[1] / kappa[0]).ln() - offset;
    gp.level = level;
    GPath {
        gp,
        level,
        pivot: p,
        pivot_net: up,
        empty,
    }
}

/// Sign changes of the log steady-state function on a dense grid of the
/// class segment, clustered toward the ends.
pub fn grid_sign_changes(net: &BiNetwork, kappa: [f64; 2], c: &[f64], n: usize) -> usize {
    let line = class_line(net, c).unwrap();
    let Some((lo, hi)) = line.segment else {
        return 0;
    };
    let lambda = bistab::stoich_data(net).lambda.to_f64().unwrap();
    let target = (-lambda * kappa[1] / kappa[0]).ln();
    let e = exponents(net);
    let h = |y: f64| -> f64 {
        let x = line.point(y);
        e.iter()
            .zip(&x)
            .map(|(ei, xi)| if *ei == 0.0 { 0.0 } else { ei * xi.ln() })
            .sum::<f64>()
            - target
    };
    let map = |t: f64| -> f64 {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => lo + (hi - lo) * 0.5 * (1.0 - (std::f64::consts::PI * t).cos()),
            (true, false) => {
                let w = lo.abs().max(1.0);
                lo + w * (t / (1.0 - t)).powi(2)
            }
            (false, true) => {
                let w = hi.abs().max(1.0);
                hi - w * ((1.0 - t) / t).powi(2)
            }
            (false, false) => {
                let u = 2.0 * t - 1.0;
                u / (1.0 - u * u)
            }
        }
    };
    let mut changes = 0;
    let mut prev: Option<f64> = None;
    for k in 1..n {
        let y = map(k as f64 / n as f64);
        if !(y > lo && y < hi) {
            continue;
        }
        let v = h(y);
        if !v.is_finite() || v == 0.0 {
            continue;
        }
        if let Some(pv) = prev {
            if (pv > 0.0) != (v > 0.0) {
                changes += 1;
            }
        }
        prev = Some(v);
    }
    changes
}
