//! Stoichiometric data, conservation laws and the index partition.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::parser::BiNetwork;

pub type Rational = Ratio<i64>;

/// Net stoichiometry of a bi-reaction network.
#[derive(Clone, Debug, PartialEq)]
pub struct StoichData {
    /// s x 2 matrix of net changes beta - alpha.
    pub n: Vec<[i64; 2]>,
    /// (s-1) x s conservation rows, see [`conservation_rows`].
    pub w: Vec<Vec<Rational>>,
    /// Column ratio N[.,2] = lambda N[.,1]; meaningful only when `rank_ok`.
    pub lambda: Rational,
    pub rank_ok: bool,
    /// First species whose net change in reaction 1 is nonzero.
    pub pivot: usize,
}

impl StoichData {
    pub fn num_species(&self) -> usize {
        self.n.len()
    }

    /// Net change of species `i` in reaction 1 (column 1 of N).
    pub fn u(&self, i: usize) -> i64 {
        self.n[i][0]
    }

    /// Column 1 of N.
    pub fn direction(&self) -> Vec<i64> {
        self.n.iter().map(|col| col[0]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Applicability {
    Ok,
    LambdaNonnegative,
    DegenerateConstantG,
    NotOneDimensional,
}

impl Applicability {
    pub fn is_ok(self) -> bool {
        self == Applicability::Ok
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Applicability::Ok => "ok",
            Applicability::LambdaNonnegative => "lambda_nonnegative",
            Applicability::DegenerateConstantG => "degenerate_constant_g",
            Applicability::NotOneDimensional => "not_one_dimensional",
        }
    }
}

/// Computes N, lambda and the conservation rows. Networks whose columns are
/// not proportional come back with `rank_ok = false` and no rows.
pub fn stoich_data(net: &BiNetwork) -> StoichData {
    let s = net.num_species();
    let n: Vec<[i64; 2]> = (0..s)
        .map(|i| {
            [
                net.beta(i, 0) as i64 - net.alpha(i, 0) as i64,
                net.beta(i, 1) as i64 - net.alpha(i, 1) as i64,
            ]
        })
        .collect();

    let pivot = n.iter().position(|col| col[0] != 0);
    let (rank_ok, lambda, pivot) = match pivot {
        None => (false, Rational::zero(), 0),
        Some(p) => {
            let lambda = Rational::new(n[p][1], n[p][0]);
            let proportional = n
                .iter()
                .all(|col| Rational::from_integer(col[1]) == lambda * Rational::from_integer(col[0]));
            (proportional, lambda, p)
        }
    };
    let mut sd = StoichData {
        n,
        w: Vec::new(),
        lambda,
        rank_ok,
        pivot,
    };
    if rank_ok {
        sd.w = conservation_rows(&sd);
    }
    sd
}

/// Conservation rows in pivot form: for every species i != p (in index
/// order) the row encodes N[i,1] x_p - N[p,1] x_i. With pivot species 1
/// these are the h_i of the augmented steady-state system.
pub fn conservation_rows(sd: &StoichData) -> Vec<Vec<Rational>> {
    assert!(sd.rank_ok, "conservation rows need a one-dimensional network");
    let s = sd.num_species();
    let p = sd.pivot;
    (0..s)
        .filter(|&i| i != p)
        .map(|i| {
            let mut row = vec![Rational::zero(); s];
            row[p] = Rational::from_integer(sd.u(i));
            row[i] = Rational::from_integer(-sd.u(p));
            row
        })
        .collect()
}

/// Species indices other than the pivot, in the order of the rows of W
/// (and of the total constants c).
pub fn row_species(sd: &StoichData) -> Vec<usize> {
    (0..sd.num_species()).filter(|&i| i != sd.pivot).collect()
}

/// Membership of one species in the partition of {1..s}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpeciesSet {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl SpeciesSet {
    pub const ACTIVE: [SpeciesSet; 4] = [SpeciesSet::S1, SpeciesSet::S2, SpeciesSet::S3, SpeciesSet::S4];

    /// Image under z -> -z, which exchanges S1 with S2 and S3 with S4.
    pub fn mirrored(self) -> SpeciesSet {
        match self {
            SpeciesSet::S1 => SpeciesSet::S2,
            SpeciesSet::S2 => SpeciesSet::S1,
            SpeciesSet::S3 => SpeciesSet::S4,
            SpeciesSet::S4 => SpeciesSet::S3,
            SpeciesSet::S5 => SpeciesSet::S5,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// How an index of S5 is treated once the partition is reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum S5Role {
    /// alpha_i1 = alpha_i2 with nonzero net change: x_i follows z but adds
    /// no term to g.
    Passive,
    /// Zero net change: x_i is constant on every compatibility class and
    /// its term a_i ln x_i moves into the level.
    Constant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexPartition {
    /// Set of each species, indexed by species.
    pub class: Vec<SpeciesSet>,
    /// a_i = |alpha_i1 - alpha_i2|.
    pub a: Vec<u32>,
    /// gamma_i = |beta_i1 - alpha_i1|.
    pub gamma: Vec<u32>,
    /// alpha_i1 - alpha_i2, the exponent of x_i in the ratio of monomials.
    pub exponent: Vec<i64>,
    pub reduced: bool,
    /// S5 indices with their role after reduction; populated by `reduce_s5`.
    pub folded: Vec<(usize, S5Role)>,
}

impl IndexPartition {
    pub fn num_species(&self) -> usize {
        self.class.len()
    }

    /// Indices in `set`, ascending. After reduction S5 is reported empty.
    pub fn set(&self, set: SpeciesSet) -> Vec<usize> {
        if self.reduced && set == SpeciesSet::S5 {
            return Vec::new();
        }
        (0..self.class.len()).filter(|&i| self.class[i] == set).collect()
    }

    pub fn sum_a(&self, set: SpeciesSet) -> u64 {
        self.set(set).iter().map(|&i| self.a[i] as u64).sum()
    }

    pub fn min_a(&self, set: SpeciesSet) -> Option<u64> {
        self.set(set).iter().map(|&i| self.a[i] as u64).min()
    }

    pub fn active(&self) -> Vec<usize> {
        (0..self.class.len())
            .filter(|&i| self.class[i] != SpeciesSet::S5)
            .collect()
    }

    pub fn passive(&self) -> Vec<usize> {
        self.role_members(S5Role::Passive)
    }

    pub fn constant(&self) -> Vec<usize> {
        self.role_members(S5Role::Constant)
    }

    fn role_members(&self, role: S5Role) -> Vec<usize> {
        self.folded
            .iter()
            .filter(|(_, r)| *r == role)
            .map(|(i, _)| *i)
            .collect()
    }

    /// Which of S1..S4 are nonempty.
    pub fn nonempty(&self) -> [bool; 4] {
        let mut out = [false; 4];
        for c in &self.class {
            if *c != SpeciesSet::S5 {
                out[c.index()] = true;
            }
        }
        out
    }

    /// The partition seen through z -> -z (S1 <-> S2, S3 <-> S4).
    pub fn mirrored(&self) -> IndexPartition {
        IndexPartition {
            class: self.class.iter().map(|c| c.mirrored()).collect(),
            exponent: self.exponent.iter().map(|e| -e).collect(),
            ..self.clone()
        }
    }
}

/// Exact sign classification of every species.
pub fn partition_indices(net: &BiNetwork) -> IndexPartition {
    let s = net.num_species();
    let mut class = Vec::with_capacity(s);
    let mut a = Vec::with_capacity(s);
    let mut gamma = Vec::with_capacity(s);
    let mut exponent = Vec::with_capacity(s);
    for i in 0..s {
        let (a1, a2, b1) = (net.alpha(i, 0), net.alpha(i, 1), net.beta(i, 0));
        let set = if a1 == a2 || b1 == a1 {
            SpeciesSet::S5
        } else {
            match (a1 > a2, b1 > a1) {
                (true, true) => SpeciesSet::S1,
                (false, false) => SpeciesSet::S2,
                (true, false) => SpeciesSet::S3,
                (false, true) => SpeciesSet::S4,
            }
        };
        class.push(set);
        a.push(a1.abs_diff(a2));
        gamma.push(b1.abs_diff(a1));
        exponent.push(a1 as i64 - a2 as i64);
    }
    IndexPartition {
        class,
        a,
        gamma,
        exponent,
        reduced: false,
        folded: Vec::new(),
    }
}

/// Removes S5 from the partition: indices with zero net change become
/// constant species, the rest become passive species. Also decides whether
/// the multistability criterion applies to the network at all.
pub fn reduce_s5(net: &BiNetwork, sd: &StoichData) -> (IndexPartition, Applicability) {
    let mut part = partition_indices(net);
    if !sd.rank_ok {
        return (part, Applicability::NotOneDimensional);
    }
    part.folded = part
        .set(SpeciesSet::S5)
        .into_iter()
        .map(|i| {
            let role = if sd.u(i) == 0 {
                S5Role::Constant
            } else {
                S5Role::Passive
            };
            (i, role)
        })
        .collect();
    part.reduced = true;
    let app = if !sd.lambda.is_negative() {
        Applicability::LambdaNonnegative
    } else if part.active().is_empty() {
        Applicability::DegenerateConstantG
    } else {
        Applicability::Ok
    };
    (part, app)
}

/// Everything the criterion needs, in one call.
#[derive(Clone, Debug)]
pub struct NetworkAnalysis {
    pub stoich: StoichData,
    pub partition: IndexPartition,
    pub applicability: Applicability,
}

pub fn analyze_network(net: &BiNetwork) -> NetworkAnalysis {
    let stoich = stoich_data(net);
    let (partition, applicability) = reduce_s5(net, &stoich);
    NetworkAnalysis {
        stoich,
        partition,
        applicability,
    }
}
