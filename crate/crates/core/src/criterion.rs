//! Exact multistability decision from the index partition.

use serde::Serialize;

use crate::network::{Applicability, IndexPartition, SpeciesSet};

/// Which branch of the criterion decided the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    A,
    B1,
    B2,
    B3,
    B4,
    C1,
    C2,
    COtherPair,
    D,
    NotApplicable,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::A => "a",
            Case::B1 => "b1",
            Case::B2 => "b2",
            Case::B3 => "b3",
            Case::B4 => "b4",
            Case::C1 => "c1",
            Case::C2 => "c2",
            Case::COtherPair => "c_other_pair",
            Case::D => "d",
            Case::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub multistable: bool,
    pub case: Case,
    /// The S1* or S2* subset (species indices, 0-based) for cases b3, b4, c1, c2.
    pub cert_subset: Option<Vec<usize>>,
    /// Human-readable instance of the inequality that fired.
    pub cert_inequality: Option<String>,
    /// The integers of that inequality, largest first, e.g. [4, 3, 1] for 4 > 3 > 1.
    pub chain: Vec<u64>,
    /// True when the fired condition is stated for the mirrored sets
    /// (S1 <-> S2, S3 <-> S4): the second disjunct of case a, and b2, b4, c2.
    pub mirrored: bool,
}

impl Verdict {
    fn negative(case: Case) -> Self {
        Verdict {
            multistable: false,
            case,
            cert_subset: None,
            cert_inequality: None,
            chain: Vec::new(),
            mirrored: false,
        }
    }

    /// The certificate as `4 > 3 > 1`.
    pub fn chain_text(&self) -> String {
        self.chain.iter().map(u64::to_string).collect::<Vec<_>>().join(" > ")
    }
}

/// sum over `big` > min over `small`, as in case a and b1/b2.
fn sum_exceeds_min(part: &IndexPartition, big: SpeciesSet, small: SpeciesSet) -> Option<(u64, u64)> {
    let sum = part.sum_a(big);
    let min = part.min_a(small)?;
    (sum > min).then_some((sum, min))
}

/// sum over `outer` > sum over a subset of `inner` > min over `outer`.
fn subset_between(part: &IndexPartition, inner: SpeciesSet, outer: SpeciesSet) -> Option<(Vec<usize>, [u64; 3])> {
    let hi = part.sum_a(outer);
    let lo = part.min_a(outer)?;
    let members = part.set(inner);
    let values: Vec<u64> = members.iter().map(|&i| part.a[i] as u64).collect();
    let picked = subset_in_open_interval(&values, lo as i64, hi as i64)?;
    let subset: Vec<usize> = picked.iter().map(|&k| members[k]).collect();
    let mid = picked.iter().map(|&k| values[k]).sum();
    Some((subset, [hi, mid, lo]))
}

fn name(set: SpeciesSet) -> &'static str {
    match set {
        SpeciesSet::S1 => "S1",
        SpeciesSet::S2 => "S2",
        SpeciesSet::S3 => "S3",
        SpeciesSet::S4 => "S4",
        SpeciesSet::S5 => "S5",
    }
}

fn sum_min_verdict(case: Case, big: SpeciesSet, small: SpeciesSet, (sum, min): (u64, u64), mirrored: bool) -> Verdict {
    Verdict {
        multistable: true,
        case,
        cert_subset: None,
        cert_inequality: Some(format!("sum_{}(a) = {sum} > min_{}(a) = {min}", name(big), name(small))),
        chain: vec![sum, min],
        mirrored,
    }
}

fn subset_verdict(
    case: Case,
    inner: SpeciesSet,
    outer: SpeciesSet,
    found: (Vec<usize>, [u64; 3]),
    mirrored: bool,
) -> Verdict {
    let (subset, [hi, mid, lo]) = found;
    let listed = subset
        .iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let (o, i) = (name(outer), name(inner));
    Verdict {
        multistable: true,
        case,
        cert_inequality: Some(format!(
            "sum_{o}(a) = {hi} > sum_{i}*(a) = {mid} > min_{o}(a) = {lo} with {i}* = {{{listed}}}"
        )),
        cert_subset: Some(subset),
        chain: vec![hi, mid, lo],
        mirrored,
    }
}

/// Decides multistability from the nonemptiness pattern of S1..S4 and the
/// multisets of a over them.
pub fn decide(part: &IndexPartition, app: Applicability) -> Verdict {
    use SpeciesSet::*;
    if !app.is_ok() {
        return Verdict::negative(Case::NotApplicable);
    }
    let ne = part.nonempty();
    let count = ne.iter().filter(|&&b| b).count();
    match (count, ne) {
        (4, _) => {
            if let Some(v) = sum_exceeds_min(part, S1, S4) {
                sum_min_verdict(Case::A, S1, S4, v, false)
            } else if let Some(v) = sum_exceeds_min(part, S2, S3) {
                sum_min_verdict(Case::A, S2, S3, v, true)
            } else {
                Verdict::negative(Case::A)
            }
        }
        // S2 empty
        (3, [true, false, true, true]) => match sum_exceeds_min(part, S1, S4) {
            Some(v) => sum_min_verdict(Case::B1, S1, S4, v, false),
            None => Verdict::negative(Case::B1),
        },
        // S1 empty
        (3, [false, true, true, true]) => match sum_exceeds_min(part, S2, S3) {
            Some(v) => sum_min_verdict(Case::B2, S2, S3, v, true),
            None => Verdict::negative(Case::B2),
        },
        // S4 empty
        (3, [true, true, true, false]) => match subset_between(part, S2, S3) {
            Some(found) => subset_verdict(Case::B3, S2, S3, found, false),
            None => Verdict::negative(Case::B3),
        },
        // S3 empty
        (3, _) => match subset_between(part, S1, S4) {
            Some(found) => subset_verdict(Case::B4, S1, S4, found, true),
            None => Verdict::negative(Case::B4),
        },
        (2, [false, true, true, false]) => match subset_between(part, S2, S3) {
            Some(found) => subset_verdict(Case::C1, S2, S3, found, false),
            None => Verdict::negative(Case::C1),
        },
        (2, [true, false, false, true]) => match subset_between(part, S1, S4) {
            Some(found) => subset_verdict(Case::C2, S1, S4, found, true),
            None => Verdict::negative(Case::C2),
        },
        (2, _) => Verdict::negative(Case::COtherPair),
        _ => Verdict::negative(Case::D),
    }
}

/// Finds a subset of `values` (by position) whose sum lies strictly between
/// `lo` and `hi`. Among qualifying subsets the lexicographically first
/// increasing position sequence is returned, so `{0, 2}` wins over `{1}`.
/// The empty subset qualifies only when `lo < 0 < hi`.
pub fn subset_in_open_interval(values: &[u64], lo: i64, hi: i64) -> Option<Vec<usize>> {
    if lo >= hi {
        return None;
    }
    let total: u64 = values.iter().sum();
    let in_range = |sum: u64| (sum as i128) > lo as i128 && (sum as i128) < hi as i128;
    let n = values.len();
    // reach[k][t]: some subset of values[k..] sums to t
    let width = total as usize + 1;
    let mut reach = vec![vec![false; width]; n + 1];
    reach[n][0] = true;
    for k in (0..n).rev() {
        let v = values[k] as usize;
        for t in 0..width {
            reach[k][t] = reach[k + 1][t] || (t >= v && reach[k + 1][t - v]);
        }
    }
    // Can a subset of values[k..] complete `acc` into the interval?
    let completes = |k: usize, acc: u64| (0..width).any(|t| reach[k][t] && in_range(acc + t as u64));

    let mut chosen = Vec::new();
    let mut acc = 0u64;
    let mut start = 0;
    if in_range(0) {
        return Some(chosen);
    }
    // Greedy walk: at each step take the smallest next position from which a
    // qualifying extension still exists; stop as soon as the prefix qualifies.
    loop {
        let next = (start..n).find(|&k| completes(k + 1, acc + values[k]))?;
        chosen.push(next);
        acc += values[next];
        if in_range(acc) {
            return Some(chosen);
        }
        start = next + 1;
    }
}
