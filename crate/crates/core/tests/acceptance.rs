//! Acceptance run: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::Instant;

use bistab::verifier::{
    certify_multistable, enumerate_steady_states, full_jacobian, jacobian_spectrum, SteadyStateSet,
};
use bistab::witness::{make_witness, WitnessOptions};
use bistab::{analyze_network, decide, parse_network, BiNetwork, GeometryParams, IndexPartition, SpeciesSet};
use common::{g_path, grid_sign_changes, kappa_through, random_network, totals_through};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const NET_A: &str = include_str!("../../../networks/bistable/a.net");
const NET_B1: &str = include_str!("../../../networks/bistable/b1.net");
const NET_B2: &str = include_str!("../../../networks/bistable/b2.net");
const NET_C: &str = include_str!("../../../networks/bistable/c.net");

/// A network with parameters and its certified steady states.
type Certified = (BiNetwork, [f64; 2], Vec<f64>, SteadyStateSet);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Agreement to three significant digits of a reference value.
fn three_digits(got: f64, reference: f64) -> bool {
    let unit = 10f64.powf(reference.abs().log10().floor() - 2.0);
    (got - reference).abs() <= 0.5 * unit
}

struct Example {
    text: &'static str,
    kappa: [f64; 2],
    c: &'static [f64],
    states: &'static [&'static [f64]],
    stable: &'static [bool],
}

// Totals follow the row orientation N_k1 x_p - N_p1 x_k = c_k.
const EXAMPLES: [Example; 4] = [
    Example {
        text: NET_A,
        kappa: [1.0, 1.0],
        c: &[-2.0, -1.7, 0.3],
        states: &[
            &[0.3293, 1.671, 1.371, 0.02930],
            &[1.000, 1.000, 0.7000, 0.7000],
            &[1.548, 0.4521, 0.1521, 1.248],
        ],
        stable: &[true, false, true],
    },
    Example {
        text: NET_B1,
        kappa: [1.0, 2.0],
        c: &[0.09, -3.0, 0.1],
        states: &[
            &[0.1448, 0.05478, 2.855, 0.04478],
            &[0.7442, 0.6542, 2.256, 0.6442],
            &[2.103, 2.013, 0.8967, 2.003],
        ],
        stable: &[true, false, true],
    },
    Example {
        text: NET_B2,
        kappa: [1.0, 72.0],
        c: &[-101.0, -101.0, -1000.0, -100.0, -315.0],
        states: &[
            &[32.09, 68.91, 68.91, 967.9, 67.91, 218.7],
            &[86.24, 14.76, 14.76, 913.8, 13.76, 56.29],
            &[97.55, 3.450, 3.450, 902.5, 2.450, 22.35],
            &[99.54, 1.464, 1.464, 900.5, 0.4641, 16.39],
        ],
        stable: &[false, true, false, true],
    },
    Example {
        text: NET_C,
        kappa: [1.0, 328.0],
        c: &[100.0, 1.0, 101.0, 90.0],
        states: &[
            &[101.6, 1.588, 202.2, 0.5879, 11.59],
            &[108.1, 8.081, 215.2, 7.081, 18.08],
            &[128.2, 28.21, 255.4, 27.21, 38.21],
            &[190.6, 90.62, 380.2, 89.62, 100.6],
        ],
        stable: &[true, false, true, false],
    },
];

fn check_example(ex: &Example, time_limit: Option<f64>) -> Outcome {
    let net = parse_network(ex.text).unwrap();
    let start = Instant::now();
    let set = match enumerate_steady_states(&net, ex.kappa, ex.c) {
        Ok(set) => set,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    if set.len() != ex.states.len() {
        return outcome(false, format!("{} states, expected {}", set.len(), ex.states.len()));
    }
    let mut worst: f64 = 0.0;
    for (got, want) in set.states.iter().zip(ex.states) {
        for (g, w) in got.iter().zip(*want) {
            if !three_digits(*g, *w) {
                return outcome(false, format!("component {g} does not match {w}"));
            }
            worst = worst.max(((g - w) / w).abs());
        }
    }
    if set.stable != ex.stable {
        return outcome(false, format!("stability {:?}, expected {:?}", set.stable, ex.stable));
    }
    if let Some(limit) = time_limit {
        if secs >= limit {
            return outcome(false, format!("took {secs:.3} s"));
        }
    }
    outcome(
        true,
        format!(
            "{} states, stable {:?}, max rel. deviation {worst:.1e}, {:.1} ms",
            set.len(),
            set.stable,
            secs * 1e3
        ),
    )
}

fn criterion_5() -> Outcome {
    let expected = [
        (NET_A, "a", "3 > 1"),
        (NET_B1, "b1", "4 > 3"),
        (NET_B2, "b3", "4 > 3 > 1"),
        (NET_C, "c2", "3 > 2 > 1"),
    ];
    let mut got = Vec::new();
    for (text, case, chain) in expected {
        let net = parse_network(text).unwrap();
        let a = analyze_network(&net);
        let v = decide(&a.partition, a.applicability);
        if !v.multistable || v.case.as_str() != case || v.chain_text() != chain {
            return outcome(
                false,
                format!(
                    "got case {} with {}, expected {case} with {chain}",
                    v.case.as_str(),
                    v.chain_text()
                ),
            );
        }
        got.push(format!("{case}: {}", v.chain_text()));
    }
    outcome(true, got.join("; "))
}

fn random_networks(seed: u64, count: usize, want_multistable: bool) -> Vec<BiNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let net = random_network(&mut rng, 5);
        let a = analyze_network(&net);
        if !a.applicability.is_ok() {
            continue;
        }
        if decide(&a.partition, a.applicability).multistable == want_multistable {
            out.push(net);
        }
    }
    out
}

/// Witness soundness; also returns the certified sets for the sign bridge.
fn criterion_6() -> (Outcome, Vec<Certified>) {
    let nets = random_networks(6, 200, true);
    let start = Instant::now();
    let results: Vec<Result<_, String>> = nets
        .par_iter()
        .map(|net| {
            let w = make_witness(net, &WitnessOptions::default()).map_err(|e| format!("{net}: {e}"))?;
            let (ok, set) = certify_multistable(net, w.kappa, &w.c).map_err(|e| e.to_string())?;
            if !ok {
                return Err(format!(
                    "{net}: certification found {} stable states",
                    set.stable_count()
                ));
            }
            Ok((net.clone(), w.kappa, w.c, set))
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let (certified, failures): (Vec<_>, Vec<_>) = results.into_iter().partition(Result::is_ok);
    let certified: Vec<_> = certified.into_iter().map(Result::unwrap).collect();
    let failures: Vec<String> = failures.into_iter().map(|r| r.err().unwrap()).collect();
    let pass = failures.is_empty() && secs < 60.0;
    let mut detail = format!(
        "{}/{} witnesses certified in {:.0} ms",
        certified.len(),
        nets.len(),
        secs * 1e3
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure: {}", f.replace('\n', " | ")));
    }
    (outcome(pass, detail), certified)
}

/// Most stable roots of g = K over `samples` random d in (0, 10] and all K.
fn probe(net: &BiNetwork, seed: u64, samples: usize) -> usize {
    let a = analyze_network(net);
    let base = GeometryParams::new(&a.partition, &vec![0.0; net.num_species()], a.stoich.lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..samples {
        let mut gp = base.clone();
        for t in gp.terms.iter_mut() {
            t.d = 10.0 - rng.gen_range(0.0..10.0);
        }
        let (lo, hi) = gp.domain();
        if lo >= hi {
            continue;
        }
        let choice = gp.best_level();
        let stable = gp.solve_level(choice.level).negative_slopes();
        best = best.max(choice.negative_crossings).max(stable);
        if best >= 2 {
            break;
        }
    }
    best
}

fn criterion_7() -> Outcome {
    let nets = random_networks(7, 200, false);
    let start = Instant::now();
    let found: Vec<usize> = nets
        .par_iter()
        .enumerate()
        .map(|(n, net)| probe(net, 7_000 + n as u64, 10_000))
        .collect();
    let secs = start.elapsed().as_secs_f64();
    if let Some(i) = found.iter().position(|&b| b >= 2) {
        return outcome(
            false,
            format!(
                "two stable roots found for {}",
                nets[i].to_string().replace('\n', " ; ")
            ),
        );
    }
    // the probe does find bistability where the criterion says it exists
    let control = random_networks(70, 50, true);
    let hits = control
        .par_iter()
        .enumerate()
        .filter(|(n, net)| probe(net, 7_500 + *n as u64, 10_000) >= 2)
        .count();
    outcome(
        hits > 0,
        format!(
            "{} networks x 10^4 geometries, max stable roots {}; control finds two on {hits}/{} multistable networks; {secs:.1} s",
            nets.len(),
            found.iter().max().unwrap_or(&0),
            control.len()
        ),
    )
}

/// Parameter draws for the oracle comparison: classes through a random
/// point, some with kappa making it steady, some from a witness.
fn oracle_cases() -> Vec<(BiNetwork, [f64; 2], Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut multi = random_networks(80, 25, true).into_iter();
    let mut out = Vec::new();
    while out.len() < 100 {
        if out.len() % 4 == 3 {
            let net = multi.next().unwrap();
            if let Ok(w) = make_witness(
                &net,
                &WitnessOptions {
                    seed: out.len() as u64,
                    ..Default::default()
                },
            ) {
                out.push((net, w.kappa, w.c));
            }
            continue;
        }
        let net = random_network(&mut rng, 5);
        if !analyze_network(&net).applicability.is_ok() {
            continue;
        }
        let x: Vec<f64> = (0..net.num_species())
            .map(|_| rng.gen_range(-1.5f64..1.5).exp())
            .collect();
        let mut k2 = kappa_through(&net, &x);
        if out.len() % 2 == 1 {
            k2 *= rng.gen_range(-2.0f64..2.0).exp();
        }
        let c = totals_through(&net, &x);
        out.push((net, [1.0, k2], c));
    }
    out
}

fn criterion_8() -> Outcome {
    let cases = oracle_cases();
    let counts: Vec<(usize, usize)> = cases
        .par_iter()
        .map(|(net, kappa, c)| {
            let poly = enumerate_steady_states(net, *kappa, c)
                .map(|s| s.len())
                .unwrap_or(usize::MAX);
            (poly, g_path(net, *kappa, c).count())
        })
        .collect();
    if let Some(i) = counts.iter().position(|(p, g)| p != g) {
        let (net, kappa, c) = &cases[i];
        return outcome(
            false,
            format!(
                "{} roots vs {} for {} kappa {kappa:?} c {c:?}",
                counts[i].0,
                counts[i].1,
                net.to_string().replace('\n', " ; ")
            ),
        );
    }
    let grid: Vec<(usize, usize)> = cases
        .par_iter()
        .step_by(5)
        .zip(counts.par_iter().step_by(5))
        .map(|((net, kappa, c), (poly, _))| (*poly, grid_sign_changes(net, *kappa, c, 1_000_000)))
        .collect();
    if let Some(i) = grid.iter().position(|(p, g)| p != g) {
        return outcome(
            false,
            format!(
                "grid oracle sees {} sign changes, polynomial path {}",
                grid[i].1, grid[i].0
            ),
        );
    }
    let mut hist = [0usize; 6];
    for (p, _) in &counts {
        hist[(*p).min(5)] += 1;
    }
    outcome(
        true,
        format!(
            "100 cases agree (root-count histogram {hist:?}); grid oracle agrees on {} cases",
            grid.len()
        ),
    )
}

/// dg at each nondegenerate state has the sign of the Jacobian eigenvalue,
/// and the Jacobian has s - 1 negligible eigenvalues.
fn criterion_9(cases: &[Certified]) -> Outcome {
    let mut checked = 0;
    let mut worst_null: f64 = 0.0;
    for (net, kappa, c, set) in cases {
        let path = g_path(net, *kappa, c);
        for (i, x) in set.states.iter().enumerate() {
            if set.degenerate[i] {
                continue;
            }
            let z = path.z_of(x);
            let dg = match path.gp.eval_dg(z) {
                Ok(v) => v,
                Err(e) => return outcome(false, format!("state {x:?} outside the g domain: {e}")),
            };
            if (dg > 0.0) != (set.eigenvalue[i] > 0.0) {
                return outcome(
                    false,
                    format!("dg = {dg} but eigenvalue {} at {x:?}", set.eigenvalue[i]),
                );
            }
            let scale = full_jacobian(net, *kappa, x).norm();
            let mut mags: Vec<f64> = jacobian_spectrum(net, *kappa, x).iter().map(|v| v.norm()).collect();
            mags.sort_by(f64::total_cmp);
            let null = mags[..mags.len() - 1].iter().copied().fold(0.0, f64::max) / scale;
            worst_null = worst_null.max(null);
            if null >= 1e-8 {
                return outcome(
                    false,
                    format!("eigenvalue of relative size {null:.1e} besides the nonzero one at {x:?}"),
                );
            }
            checked += 1;
        }
    }
    outcome(
        true,
        format!("{checked} states; largest other eigenvalue {worst_null:.1e} of the Jacobian norm"),
    )
}

fn random_geometry<R: Rng>(rng: &mut R) -> GeometryParams {
    let s = rng.gen_range(1..=6);
    let sets = [SpeciesSet::S1, SpeciesSet::S2, SpeciesSet::S3, SpeciesSet::S4];
    let class: Vec<SpeciesSet> = (0..s).map(|_| sets[rng.gen_range(0..4)]).collect();
    let a: Vec<u32> = (0..s).map(|_| rng.gen_range(1..=6)).collect();
    let gamma: Vec<u32> = (0..s).map(|_| rng.gen_range(1..=6)).collect();
    let exponent = class
        .iter()
        .zip(&a)
        .map(|(set, &ai)| match set {
            SpeciesSet::S1 | SpeciesSet::S3 => ai as i64,
            _ => -(ai as i64),
        })
        .collect();
    let part = IndexPartition {
        class,
        a,
        gamma,
        exponent,
        reduced: true,
        folded: Vec::new(),
    };
    let d: Vec<f64> = (0..s).map(|_| rng.gen_range(0.01..10.0)).collect();
    GeometryParams::new(&part, &d, Ratio::new(-1, 1))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut geometries = 0;
    let mut worst: (f64, f64) = (0.0, 0.0);
    while geometries < 50 {
        let gp = random_geometry(&mut rng);
        let (lo, hi) = gp.domain();
        if lo >= hi {
            continue;
        }
        geometries += 1;
        let (lo, hi) = (
            if lo.is_finite() { lo } else { hi.min(0.0) - 20.0 },
            if hi.is_finite() { hi } else { lo.max(0.0) + 20.0 },
        );
        for _ in 0..100 {
            let z = rng.gen_range(lo..hi);
            if !gp.contains(z) {
                continue;
            }
            let dist = gp
                .terms
                .iter()
                .map(|t| (z - t.pole()).abs())
                .fold(f64::INFINITY, f64::min)
                .min(20.0);
            let h = 1e-3 * dist;
            // five-point stencils
            let stencil = |f: &dyn Fn(f64) -> f64| {
                (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h)
            };
            let fd1 = stencil(&|w| gp.eval_g(w).unwrap());
            let fd2 = stencil(&|w| gp.eval_dg(w).unwrap());
            let dg = gp.eval_dg(z).unwrap();
            let d2g = gp.eval_d2g(z).unwrap();
            let scale1: f64 = gp.terms.iter().map(|t| (t.exponent() / (z + t.mu())).abs()).sum();
            let scale2: f64 = gp
                .terms
                .iter()
                .map(|t| (t.exponent() / (z + t.mu()).powi(2)).abs())
                .sum();
            let e1 = (fd1 - dg).abs() / scale1;
            let e2 = (fd2 - d2g).abs() / scale2;
            worst = (worst.0.max(e1), worst.1.max(e2));
            if e1 > 1e-6 || e2 > 1e-6 {
                return outcome(false, format!("at z = {z}: dg {dg} vs {fd1}, d2g {d2g} vs {fd2}"));
            }
        }
    }
    outcome(
        true,
        format!(
            "50 geometries x 100 points; max relative error dg {:.1e}, d2g {:.1e}",
            worst.0, worst.1
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let names = ["first network", "second network", "third network", "fourth network"];
    for (k, ex) in EXAMPLES.iter().enumerate() {
        let limit = (k == 0).then_some(1.0);
        results.push((k + 1, names[k], check_example(ex, limit)));
    }
    results.push((5, "criterion verdicts and certificates", criterion_5()));
    let (c6, certified) = criterion_6();
    results.push((6, "witness soundness on random networks", c6));
    results.push((7, "necessity probe on random networks", criterion_7()));
    results.push((8, "polynomial and g-function root counts", criterion_8()));

    let mut bridge_cases = Vec::new();
    for ex in &EXAMPLES {
        let net = parse_network(ex.text).unwrap();
        let set = enumerate_steady_states(&net, ex.kappa, ex.c).unwrap();
        bridge_cases.push((net, ex.kappa, ex.c.to_vec(), set));
    }
    bridge_cases.extend(certified);
    results.push((9, "slope and eigenvalue signs", criterion_9(&bridge_cases)));
    results.push((10, "derivatives against finite differences", criterion_10()));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {n:>2} {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
