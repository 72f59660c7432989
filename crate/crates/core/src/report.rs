//! JSON and text reports shared by the command-line tool.

use std::fmt::Write as _;

use serde::Serialize;

use crate::criterion::{decide, Verdict};
use crate::network::{analyze_network, Applicability, IndexPartition, SpeciesSet};
use crate::parser::{serialize_network, BiNetwork};
use crate::verifier::SteadyStateSet;
use crate::witness::Witness;

pub const SCHEMA_VERSION: &str = "1.0";

/// Decimal text for a float: the shortest string that parses back to the
/// same value, in scientific form outside [1e-6, 1e15).
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-6..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_vec(v: &[f64]) -> Vec<String> {
    v.iter().copied().map(fmt_num).collect()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NetworkEcho {
    pub text: String,
    pub species: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PartitionReport {
    #[serde(rename = "S1")]
    pub s1: Vec<usize>,
    #[serde(rename = "S2")]
    pub s2: Vec<usize>,
    #[serde(rename = "S3")]
    pub s3: Vec<usize>,
    #[serde(rename = "S4")]
    pub s4: Vec<usize>,
    #[serde(rename = "S5")]
    pub s5: Vec<usize>,
    pub a: Vec<u32>,
    pub gamma: Vec<u32>,
    /// S5 indices kept on the line but without a term in g.
    pub passive: Vec<usize>,
    /// S5 indices that are constant on every compatibility class.
    pub constant: Vec<usize>,
}

impl PartitionReport {
    pub fn new(part: &IndexPartition) -> Self {
        let raw_s5: Vec<usize> = (0..part.num_species())
            .filter(|&i| part.class[i] == SpeciesSet::S5)
            .collect();
        PartitionReport {
            s1: one_based(&part.set(SpeciesSet::S1)),
            s2: one_based(&part.set(SpeciesSet::S2)),
            s3: one_based(&part.set(SpeciesSet::S3)),
            s4: one_based(&part.set(SpeciesSet::S4)),
            s5: one_based(&raw_s5),
            a: part.a.clone(),
            gamma: part.gamma.clone(),
            passive: one_based(&part.passive()),
            constant: one_based(&part.constant()),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerdictReport {
    pub multistable: bool,
    pub case: &'static str,
    pub cert_subset: Option<Vec<usize>>,
    pub cert_inequality: Option<String>,
    pub chain: Vec<u64>,
}

impl VerdictReport {
    pub fn new(v: &Verdict) -> Self {
        VerdictReport {
            multistable: v.multistable,
            case: v.case.as_str(),
            cert_subset: v.cert_subset.as_deref().map(one_based),
            cert_inequality: v.cert_inequality.clone(),
            chain: v.chain.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StateReport {
    pub x: Vec<String>,
    pub stable: bool,
    pub degenerate: bool,
    pub eigenvalue: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SteadyStateReport {
    pub kappa: Vec<String>,
    pub c: Vec<String>,
    pub count: usize,
    pub stable_count: usize,
    pub states: Vec<StateReport>,
}

impl SteadyStateReport {
    pub fn new(kappa: [f64; 2], c: &[f64], set: &SteadyStateSet) -> Self {
        let states = (0..set.len())
            .map(|k| StateReport {
                x: fmt_vec(&set.states[k]),
                stable: set.stable[k],
                degenerate: set.degenerate[k],
                eigenvalue: fmt_num(set.eigenvalue[k]),
                residual: fmt_num(set.residuals[k]),
            })
            .collect();
        SteadyStateReport {
            kappa: fmt_vec(&kappa),
            c: fmt_vec(c),
            count: set.len(),
            stable_count: set.stable_count(),
            states,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WitnessReport {
    pub seed: u64,
    pub d: Vec<Option<String>>,
    pub level: String,
    pub roots: Vec<RootEntry>,
    #[serde(flatten)]
    pub steady: SteadyStateReport,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RootEntry {
    pub z: String,
    pub slope: String,
    pub degenerate: bool,
}

impl WitnessReport {
    pub fn new(w: &Witness, seed: u64) -> Self {
        let mut d = vec![None; w.mu.len()];
        for t in &w.geometry.terms {
            d[t.species] = Some(fmt_num(t.d));
        }
        WitnessReport {
            seed,
            d,
            level: fmt_num(w.geometry.level),
            roots: w
                .roots
                .roots
                .iter()
                .map(|r| RootEntry {
                    z: fmt_num(r.z),
                    slope: fmt_num(r.slope),
                    degenerate: r.degenerate,
                })
                .collect(),
            steady: SteadyStateReport::new(w.kappa, &w.c, &w.certification),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub tool: ToolInfo,
    pub timing: Timing,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applicability: Option<Applicability>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steady_states: Option<SteadyStateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

impl AnalysisReport {
    fn empty(source: Option<String>) -> Self {
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::default(),
            timing: Timing { elapsed_ms: 0.0 },
            source,
            network: None,
            lambda: None,
            partition: None,
            applicability: None,
            verdict: None,
            witness: None,
            steady_states: None,
            error: None,
        }
    }

    pub fn failure(source: Option<String>, kind: &'static str, message: String) -> Self {
        AnalysisReport {
            error: Some(ErrorReport { kind, message }),
            ..Self::empty(source)
        }
    }

    /// Network echo, partition, applicability and verdict.
    pub fn analyze(net: &BiNetwork, source: Option<String>) -> (Self, Verdict) {
        let analysis = analyze_network(net);
        let verdict = decide(&analysis.partition, analysis.applicability);
        let report = AnalysisReport {
            network: Some(NetworkEcho {
                text: serialize_network(net),
                species: net.species().to_vec(),
            }),
            lambda: analysis.stoich.rank_ok.then(|| analysis.stoich.lambda.to_string()),
            partition: Some(PartitionReport::new(&analysis.partition)),
            applicability: Some(analysis.applicability),
            verdict: Some(VerdictReport::new(&verdict)),
            ..Self::empty(source)
        };
        (report, verdict)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Aligned plain-text rendering.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        if let Some(src) = &self.source {
            let _ = writeln!(out, "file: {src}");
        }
        if let Some(err) = &self.error {
            let _ = writeln!(out, "error ({}): {}", err.kind, err.message);
            return out;
        }
        if let Some(net) = &self.network {
            out.push_str(&net.text);
        }
        if let Some(l) = &self.lambda {
            let _ = writeln!(out, "lambda = {l}");
        }
        if let Some(p) = &self.partition {
            let list = |v: &[usize]| format!("{{{}}}", v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", "));
            let _ = writeln!(
                out,
                "S1 = {}  S2 = {}  S3 = {}  S4 = {}  S5 = {}",
                list(&p.s1),
                list(&p.s2),
                list(&p.s3),
                list(&p.s4),
                list(&p.s5)
            );
            let _ = writeln!(out, "a = {:?}  gamma = {:?}", p.a, p.gamma);
        }
        if let Some(app) = self.applicability {
            let _ = writeln!(out, "applicability: {}", app.as_str());
        }
        if let Some(v) = &self.verdict {
            let _ = writeln!(
                out,
                "multistable: {}  (case {})",
                if v.multistable { "yes" } else { "no" },
                v.case
            );
            if let Some(text) = &v.cert_inequality {
                let _ = writeln!(out, "certificate: {text}");
            }
        }
        let table = |out: &mut String, s: &SteadyStateReport| {
            let _ = writeln!(out, "kappa = ({})", s.kappa.join(", "));
            let _ = writeln!(out, "c = ({})", s.c.join(", "));
            let _ = writeln!(out, "{} positive steady states, {} stable", s.count, s.stable_count);
            let width = s
                .states
                .iter()
                .flat_map(|st| st.x.iter().map(|v| short(v).len()))
                .max()
                .unwrap_or(0);
            for (k, st) in s.states.iter().enumerate() {
                let coords: Vec<String> = st.x.iter().map(|v| format!("{:>width$}", short(v))).collect();
                let tag = if st.stable {
                    "stable"
                } else if st.degenerate {
                    "degenerate"
                } else {
                    "unstable"
                };
                let _ = writeln!(out, "  x({}) = ({})  {tag}", k + 1, coords.join(", "));
            }
        };
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness (seed {}):", w.seed);
            table(&mut out, &w.steady);
        }
        if let Some(s) = &self.steady_states {
            table(&mut out, s);
        }
        out
    }
}

/// Four significant digits for tables.
fn short(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) if x != 0.0 && (x.abs() >= 1e6 || x.abs() < 1e-3) => format!("{x:.3e}"),
        Ok(x) => {
            let digits = (3 - x.abs().log10().floor() as i32).max(0) as usize;
            format!("{x:.digits$}")
        }
        Err(_) => v.to_string(),
    }
}
