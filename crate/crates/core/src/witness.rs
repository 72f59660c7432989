//! Construction of multistability witnesses.
//!
//! For a multistable verdict the d_i of g are chosen following the
//! constructive arguments for each case, the level K is picked where g = K
//! has the most negative-slope crossings, and the geometry is mapped back
//! to rate constants and total constants. The result is re-certified by the
//! [`verifier`](crate::verifier) before it is returned.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::criterion::{decide, Case, Verdict};
use crate::gfunction::{GeometryParams, RootReport};
use crate::network::{analyze_network, row_species, Applicability, IndexPartition, SpeciesSet, StoichData};
use crate::parser::BiNetwork;
use crate::verifier::{enumerate_steady_states, SteadyStateSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("network is not multistable (case {})", .0.as_str())]
    NotMultistable(Case),
    #[error("criterion does not apply: {}", .0.as_str())]
    NotApplicable(Applicability),
    #[error("witness construction failed: {0}")]
    ConstructionFailed(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessOptions {
    /// Seeds the jitter of the distinctness offsets.
    pub seed: u64,
    /// Concentration assigned to species that are constant on every class.
    pub constant_value: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            seed: 0,
            constant_value: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub kappa: [f64; 2],
    /// Total constants in the order of the conservation rows.
    pub c: Vec<f64>,
    pub steady_states: Vec<Vec<f64>>,
    /// Stability read off the slope of g at each root.
    pub stable: Vec<bool>,
    pub geometry: GeometryParams,
    pub roots: RootReport,
    /// mu_i of x_i = N_i1 (z + mu_i); unused for constant species.
    pub mu: Vec<f64>,
    /// Independent enumeration of the steady states for (kappa, c).
    pub certification: SteadyStateSet,
}

/// Sets seen from the construction's point of view; mirrored verdicts swap
/// S1 with S2 and S3 with S4.
struct Roles<'a> {
    part: &'a IndexPartition,
    mirrored: bool,
}

impl Roles<'_> {
    fn set(&self, set: SpeciesSet) -> Vec<usize> {
        let actual = if self.mirrored { set.mirrored() } else { set };
        self.part.set(actual)
    }

    fn a(&self, i: usize) -> f64 {
        self.part.a[i] as f64
    }

    fn sum(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.a(i)).sum()
    }

    fn argmin(&self, set: SpeciesSet) -> usize {
        let members = self.set(set);
        *members
            .iter()
            .min_by_key(|&&i| self.part.a[i])
            .expect("argmin over a nonempty set")
    }
}

/// Samples z in (0, 1) at k / 65, k = 1..64.
fn unit_samples() -> impl Iterator<Item = f64> {
    (1..=64).map(|k| k as f64 / 65.0)
}

/// Samples in (lo, 1): a uniform grid followed by points accumulating at 1.
fn samples_toward_one(lo: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (1..=64).map(|k| lo + (1.0 - lo) * k as f64 / 65.0).collect();
    let mut gap = (1.0 - lo) / 65.0;
    for _ in 0..40 {
        gap *= 0.5;
        out.push(1.0 - gap);
    }
    out.retain(|&z| z > lo && z < 1.0);
    out
}

fn fail(msg: impl Into<String>) -> WitnessError {
    WitnessError::ConstructionFailed(msg.into())
}

/// First disjunct of case a: sum over S1 > min over S4.
fn construct_a(r: &Roles, d: &mut [f64]) -> Result<(), WitnessError> {
    use SpeciesSet::*;
    let i0 = r.argmin(S4);
    let a0 = r.a(i0);
    let s1 = r.sum(&r.set(S1));
    let s3 = r.sum(&r.set(S3));
    let rest4: Vec<usize> = r.set(S4).into_iter().filter(|&i| i != i0).collect();
    let s4 = r.sum(&rest4);

    let sigma1 = (s1 + a0) / (2.0 * a0);
    let c0 = a0 * (s1 - a0) / (s1 + a0);
    let sigma3 = 2.0 * s3 / c0;
    let sigma4 = (2.0 * s4 / c0).max(2.0);
    let sigma2 = sigma3 + 1.0;
    d[i0] = 1.0;
    for i in r.set(S1) {
        d[i] = sigma1;
    }
    for i in r.set(S3) {
        d[i] = sigma3;
    }
    for &i in &rest4 {
        d[i] = sigma4;
    }
    for i in r.set(S2) {
        d[i] = sigma2;
    }
    Ok(())
}

/// Case b1 (S2 empty): sum over S1 > min over S4.
fn construct_b1(r: &Roles, d: &mut [f64]) -> Result<(), WitnessError> {
    use SpeciesSet::*;
    let p = r.argmin(S4);
    let ap = r.a(p);
    let s1 = r.sum(&r.set(S1));
    let s3 = r.sum(&r.set(S3));
    let rest4: Vec<usize> = r.set(S4).into_iter().filter(|&i| i != p).collect();
    let s4 = r.sum(&rest4);

    // dg > 0 at z needs d < N(z) / D(z) for the S1 shift
    let numer = |z: f64| s1 - z / (1.0 - z) * s3 - ap;
    let denom = |z: f64| s3 / (1.0 - z) + ap / z;
    let (z, ratio) = unit_samples()
        .map(|z| (z, numer(z) / denom(z)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("samples");
    if ratio <= 0.0 {
        return Err(fail("no z in (0, 1) with positive slope budget"));
    }
    let shift1 = 0.5 * ratio;
    let h = s1 / (z + shift1) - s3 / (1.0 - z) - ap / z;
    let e = if s4 > 0.0 { 2.0 * s4 / h } else { 1.0 };
    d[p] = 0.0;
    for i in r.set(S3) {
        d[i] = 1.0;
    }
    for i in r.set(S1) {
        d[i] = shift1;
    }
    for &i in &rest4 {
        d[i] = e;
    }
    Ok(())
}

/// Cases b3 and c1 (S4 empty): a subset S2* of S2 with
/// sum over S3 > sum over S2* > min over S3.
fn construct_b3(r: &Roles, subset: &[usize], d: &mut [f64]) -> Result<(), WitnessError> {
    use SpeciesSet::*;
    let p = r.argmin(S3);
    let ap = r.a(p);
    let s1 = r.sum(&r.set(S1));
    let rest3: Vec<usize> = r.set(S3).into_iter().filter(|&i| i != p).collect();
    let s3 = r.sum(&rest3);
    let star = r.sum(subset);
    let others: Vec<usize> = r.set(S2).into_iter().filter(|i| !subset.contains(i)).collect();
    let s2 = r.sum(&others);

    // Step 1: a point z1 where the S3 terms at w3 make g' negative.
    let n1 = |z: f64| s3 + s1 + (star - ap) * z / (1.0 - z);
    let d1 = |z: f64| s1 / z + (star - ap) / (1.0 - z);
    let (z1, ratio1) = unit_samples()
        .map(|z| (z, n1(z) / d1(z)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("samples");
    if ratio1 <= 1.0 {
        return Err(fail("no admissible w3 > 1"));
    }
    let w3 = 0.5 * (1.0 + ratio1);

    // Step 2: a later point z2 where the S2* terms at w1 make g' positive.
    let n2 = |z: f64| star - s1 + ap * z / (1.0 - z) + s3 * z / (w3 - z);
    let d2 = |z: f64| -s1 / z + ap / (1.0 - z) + s3 / (w3 - z);
    let mut w1 = None;
    let mut best = 1.0;
    for z in samples_toward_one(z1) {
        let (nv, dv) = (n2(z), d2(z));
        if dv <= 0.0 {
            // g' > 0 at z for every w1 > 1
            w1 = Some(2.0);
            break;
        }
        if nv > 0.0 && nv / dv > best {
            best = nv / dv;
            w1 = Some(0.5 * (1.0 + best));
        }
    }
    let w1 = w1.ok_or_else(|| fail("no admissible w1 > 1"))?;

    // Step 3: push the remaining S2 terms far enough right.
    let h = s1 / z1 + star / (w1 - z1) - ap / (1.0 - z1) - s3 / (w3 - z1);
    if h >= 0.0 {
        return Err(fail("slope at z1 is not negative"));
    }
    let w2 = (2.0 * s2 / -h + z1).max(2.0);

    d[p] = 1.0;
    for i in r.set(S1) {
        d[i] = 0.0;
    }
    for &i in subset {
        d[i] = w1;
    }
    for &i in &others {
        d[i] = w2;
    }
    for &i in &rest3 {
        d[i] = w3;
    }
    Ok(())
}

/// Chooses d_i for every active index following the case that fired. The
/// returned geometry has level 0; see [`certify_geometry`].
pub fn construct_geometry(
    part: &IndexPartition,
    verdict: &Verdict,
    lambda: crate::network::Rational,
) -> Result<GeometryParams, WitnessError> {
    if !verdict.multistable {
        return Err(WitnessError::NotMultistable(verdict.case));
    }
    let roles = Roles {
        part,
        mirrored: verdict.mirrored,
    };
    let mut d = vec![0.0; part.num_species()];
    match verdict.case {
        Case::A => construct_a(&roles, &mut d)?,
        Case::B1 | Case::B2 => construct_b1(&roles, &mut d)?,
        Case::B3 | Case::B4 | Case::C1 | Case::C2 => {
            let subset = verdict.cert_subset.as_deref().unwrap_or(&[]);
            construct_b3(&roles, subset, &mut d)?
        }
        other => return Err(WitnessError::NotMultistable(other)),
    }
    Ok(GeometryParams::new(part, &d, lambda))
}

/// Separates coinciding poles: within each group of terms sharing a pole the
/// first keeps its d, the others are pushed outward by growing offsets.
fn separate_poles(gp: &GeometryParams, base: f64, rng: &mut ChaCha8Rng) -> GeometryParams {
    let mut out = gp.clone();
    let n = out.terms.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let mu = gp.terms[i].mu();
        let group: Vec<usize> = (i..n).filter(|&j| gp.terms[j].mu() == mu).collect();
        let mut eps = base;
        for &j in &group[1..] {
            out.terms[j].d += eps * (1.0 + 0.5 * rng.gen::<f64>());
            eps *= 2.0;
        }
        for j in group {
            done[j] = true;
        }
    }
    out
}

/// Picks the level and checks that g = K has two stable nondegenerate roots.
pub fn certify_geometry(gp: &GeometryParams) -> Option<(GeometryParams, RootReport)> {
    let choice = gp.best_level();
    if choice.negative_crossings < 2 {
        return None;
    }
    let mut gp = gp.clone();
    gp.level = choice.level;
    let report = gp.solve_level(choice.level);
    (report.negative_slopes() >= 2).then_some((gp, report))
}

const ATTEMPTS: usize = 20;
const RANDOM_SEARCH: usize = 4000;

/// Chooses mu for every species and maps the geometry to (kappa, c).
pub fn backmap(
    gp: &GeometryParams,
    part: &IndexPartition,
    sd: &StoichData,
    report: &RootReport,
    constant_value: f64,
) -> Result<Witness, WitnessError> {
    let s = part.num_species();
    if report.roots.is_empty() {
        return Err(fail("no roots to map back"));
    }
    let zs: Vec<f64> = report.roots.iter().map(|r| r.z).collect();
    let zmin = zs.iter().copied().fold(f64::INFINITY, f64::min);
    let zmax = zs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let margin = (zmax - zmin).max(1.0);

    let mut gp = gp.clone();
    let mut mu = vec![0.0; s];
    for t in &gp.terms {
        mu[t.species] = t.mu();
    }
    // passive species stay positive across all roots
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for i in part.passive() {
        if sd.u(i) > 0 {
            mu[i] = margin - zmin;
            lower = lower.max(-mu[i]);
        } else {
            mu[i] = -zmax - margin;
            upper = upper.min(-mu[i]);
        }
    }
    gp.lower_cut = lower;
    gp.upper_cut = upper;
    let mut offset = 0.0;
    for i in part.constant() {
        offset += part.exponent[i] as f64 * constant_value.ln();
    }
    gp.folded_offset = offset;

    let lambda = sd.lambda.to_f64().expect("finite lambda");
    let kappa = [1.0, (gp.level + offset).exp() / -lambda];
    if !kappa[1].is_finite() || kappa[1] <= 0.0 {
        return Err(fail(format!("level {} gives an unusable rate constant", gp.level)));
    }

    let p = sd.pivot;
    let up = sd.u(p) as f64;
    let constants = part.constant();
    let c: Vec<f64> = row_species(sd)
        .into_iter()
        .map(|i| {
            if constants.contains(&i) {
                -up * constant_value
            } else {
                up * sd.u(i) as f64 * (mu[p] - mu[i])
            }
        })
        .collect();

    let report = gp.solve_level(gp.level);
    let mut states = Vec::with_capacity(report.roots.len());
    let mut stable = Vec::with_capacity(report.roots.len());
    for root in &report.roots {
        let x: Vec<f64> = (0..s)
            .map(|i| {
                if constants.contains(&i) {
                    constant_value
                } else {
                    sd.u(i) as f64 * (root.z + mu[i])
                }
            })
            .collect();
        if let Some(k) = x.iter().position(|&v| v <= 0.0) {
            return Err(fail(format!("root z = {} maps to x_{} = {} <= 0", root.z, k + 1, x[k])));
        }
        states.push(x);
        stable.push(root.stable());
    }
    Ok(Witness {
        kappa,
        c,
        steady_states: states,
        stable,
        geometry: gp,
        roots: report,
        mu,
        certification: SteadyStateSet::default(),
    })
}

fn finish(
    net: &BiNetwork,
    gp: &GeometryParams,
    part: &IndexPartition,
    sd: &StoichData,
    opts: &WitnessOptions,
) -> Option<Witness> {
    let (gp, report) = certify_geometry(gp)?;
    let mut w = match backmap(&gp, part, sd, &report, opts.constant_value) {
        Ok(w) => w,
        Err(e) => {
            log::debug!("back-map rejected geometry: {e}");
            return None;
        }
    };
    let set = enumerate_steady_states(net, w.kappa, &w.c).ok()?;
    if set.stable_count() < 2 {
        log::debug!("verifier found {} stable states", set.stable_count());
        return None;
    }
    if set.len() != w.steady_states.len() {
        log::warn!(
            "level set has {} roots but the class holds {} steady states",
            w.steady_states.len(),
            set.len()
        );
    }
    w.certification = set;
    Some(w)
}

/// End to end: partition, verdict, geometry, level, back-map, certification.
pub fn make_witness(net: &BiNetwork, opts: &WitnessOptions) -> Result<Witness, WitnessError> {
    let analysis = analyze_network(net);
    if !analysis.applicability.is_ok() {
        return Err(WitnessError::NotApplicable(analysis.applicability));
    }
    let part = &analysis.partition;
    let sd = &analysis.stoich;
    let verdict = decide(part, analysis.applicability);
    let base_gp = construct_geometry(part, &verdict, sd.lambda)?;

    let ds: Vec<f64> = base_gp.terms.iter().map(|t| t.d).collect();
    let spread =
        ds.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ds.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if spread > 0.0 { spread } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut base = 1e-4 * spread;
    for attempt in 0..ATTEMPTS {
        let gp = separate_poles(&base_gp, base, &mut rng);
        if let Some(w) = finish(net, &gp, part, sd, opts) {
            log::debug!("witness certified on attempt {}", attempt + 1);
            return Ok(w);
        }
        base *= 0.1;
    }

    // The constructed geometry did not certify numerically; search nearby.
    log::info!("falling back to randomized search over d");
    for _ in 0..RANDOM_SEARCH {
        let mut gp = base_gp.clone();
        for t in gp.terms.iter_mut() {
            t.d = rng.gen_range(1e-3..10.0);
        }
        if let Some(w) = finish(net, &gp, part, sd, opts) {
            return Ok(w);
        }
    }
    Err(fail(format!(
        "no certified geometry after {ATTEMPTS} perturbations (case {})",
        verdict.case.as_str()
    )))
}
