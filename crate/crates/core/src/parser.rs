//! Text format for bi-reaction networks.
//!
//! A document holds exactly two reactions, separated by newlines or `;`.
//! Each reaction is `[label:] side -> side`, a side is `0` (the empty
//! complex) or terms joined by `+`, and a term is `[coefficient] species`
//! with the coefficient separated from the species name by whitespace.
//! `#` starts a comment that runs to the end of the line.
//!
//! ```text
//! # all four sets nonempty
//! 4 X1 + X2 + X3 -> 5 X1 + X4
//! X1 + 2 X2 + X4 -> 3 X2 + X3
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// One irreversible reaction. Maps go from species index to a positive
/// stoichiometric coefficient; absent species have coefficient zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Reaction {
    pub reactants: BTreeMap<usize, u32>,
    pub products: BTreeMap<usize, u32>,
    pub label: Option<String>,
}

impl Reaction {
    pub fn new(
        reactants: impl IntoIterator<Item = (usize, u32)>,
        products: impl IntoIterator<Item = (usize, u32)>,
    ) -> Self {
        Self {
            reactants: reactants.into_iter().filter(|&(_, c)| c > 0).collect(),
            products: products.into_iter().filter(|&(_, c)| c > 0).collect(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Reactant coefficient of species `i` (the alpha of the reaction).
    pub fn reactant(&self, i: usize) -> u32 {
        self.reactants.get(&i).copied().unwrap_or(0)
    }

    /// Product coefficient of species `i` (the beta of the reaction).
    pub fn product(&self, i: usize) -> u32 {
        self.products.get(&i).copied().unwrap_or(0)
    }

    fn species(&self) -> impl Iterator<Item = usize> + '_ {
        self.reactants.keys().chain(self.products.keys()).copied()
    }
}

/// A network of exactly two reactions over an ordered species list.
///
/// Species are kept in first-appearance order (reactants of the first
/// reaction, its products, then the second reaction); [`BiNetwork::new`]
/// reorders its input to enforce this so that serialization round-trips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiNetwork {
    species: Vec<String>,
    r1: Reaction,
    r2: Reaction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("species index {0} is out of range")]
    UnknownSpecies(usize),
    #[error("species `{0}` does not occur in either reaction")]
    DeadSpecies(String),
    #[error("reaction {0} has identical reactant and product sides")]
    TrivialReaction(usize),
    #[error("invalid species name `{0}`")]
    InvalidName(String),
    #[error("species name `{0}` is listed twice")]
    DuplicateName(String),
}

impl BiNetwork {
    pub fn new(species: Vec<String>, r1: Reaction, r2: Reaction) -> Result<Self, NetworkError> {
        for name in &species {
            if !is_identifier(name) {
                return Err(NetworkError::InvalidName(name.clone()));
            }
        }
        for (k, name) in species.iter().enumerate() {
            if species[..k].contains(name) {
                return Err(NetworkError::DuplicateName(name.clone()));
            }
        }
        let mut r1 = r1;
        let mut r2 = r2;
        for r in [&mut r1, &mut r2] {
            r.reactants.retain(|_, c| *c > 0);
            r.products.retain(|_, c| *c > 0);
        }
        for (j, r) in [&r1, &r2].into_iter().enumerate() {
            if let Some(i) = r.species().find(|&i| i >= species.len()) {
                return Err(NetworkError::UnknownSpecies(i));
            }
            if r.reactants == r.products {
                return Err(NetworkError::TrivialReaction(j + 1));
            }
        }

        // first-appearance order
        let mut order: Vec<usize> = Vec::with_capacity(species.len());
        for r in [&r1, &r2] {
            for side in [&r.reactants, &r.products] {
                for &i in side.keys() {
                    if !order.contains(&i) {
                        order.push(i);
                    }
                }
            }
        }
        if let Some(dead) = (0..species.len()).find(|i| !order.contains(i)) {
            return Err(NetworkError::DeadSpecies(species[dead].clone()));
        }
        let mut new_index = vec![0; species.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let remap = |r: &Reaction| Reaction {
            reactants: r.reactants.iter().map(|(&i, &c)| (new_index[i], c)).collect(),
            products: r.products.iter().map(|(&i, &c)| (new_index[i], c)).collect(),
            label: r.label.clone(),
        };
        let species = order.iter().map(|&i| species[i].clone()).collect();
        Ok(Self {
            species,
            r1: remap(&r1),
            r2: remap(&r2),
        })
    }

    /// Builds a network from dense coefficient columns, naming species
    /// `X1..Xs`. Columns are (alpha_1, beta_1, alpha_2, beta_2).
    pub fn from_columns(alpha1: &[u32], beta1: &[u32], alpha2: &[u32], beta2: &[u32]) -> Result<Self, NetworkError> {
        let s = alpha1.len();
        assert!(
            beta1.len() == s && alpha2.len() == s && beta2.len() == s,
            "coefficient columns must have equal length"
        );
        let species = (1..=s).map(|i| format!("X{i}")).collect();
        let dense = |v: &[u32]| v.iter().copied().enumerate().collect::<Vec<_>>();
        Self::new(
            species,
            Reaction::new(dense(alpha1), dense(beta1)),
            Reaction::new(dense(alpha2), dense(beta2)),
        )
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn r1(&self) -> &Reaction {
        &self.r1
    }

    pub fn r2(&self) -> &Reaction {
        &self.r2
    }

    pub fn reaction(&self, j: usize) -> &Reaction {
        match j {
            0 => &self.r1,
            1 => &self.r2,
            _ => panic!("bi-reaction network has no reaction {j}"),
        }
    }

    /// alpha_{i,j+1}: reactant coefficient of species `i` in reaction `j` (0-based).
    pub fn alpha(&self, i: usize, j: usize) -> u32 {
        self.reaction(j).reactant(i)
    }

    /// beta_{i,j+1}: product coefficient of species `i` in reaction `j` (0-based).
    pub fn beta(&self, i: usize, j: usize) -> u32 {
        self.reaction(j).product(i)
    }
}

impl fmt::Display for BiNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_network(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    BadCoefficient(String),
    ReactionCount(usize),
    TrivialReaction,
    DuplicateSpecies(String),
}

/// Parse failure with a 1-based source position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {}", describe(.kind))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(msg) => format!("syntax error: {msg}"),
        ParseErrorKind::BadCoefficient(tok) => {
            format!("coefficient `{tok}` is not a positive integer")
        }
        ParseErrorKind::ReactionCount(n) => format!("expected exactly 2 reactions, found {n}"),
        ParseErrorKind::TrivialReaction => "reactant side equals product side".to_string(),
        ParseErrorKind::DuplicateSpecies(name) => {
            format!("species `{name}` appears twice on one side")
        }
    }
}

fn is_identifier(tok: &str) -> bool {
    let mut chars = tok.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A slice of the source together with where it starts.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    /// byte offset of `text` inside its line
    offset: usize,
    line_text: &'a str,
}

impl<'a> Span<'a> {
    fn column_at(&self, byte: usize) -> usize {
        self.line_text[..self.offset + byte].chars().count() + 1
    }

    fn error(&self, byte: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column_at(byte),
            kind,
        }
    }

    fn sub(&self, start: usize, end: usize) -> Span<'a> {
        Span {
            text: &self.text[start..end],
            offset: self.offset + start,
            ..*self
        }
    }

    /// Trims whitespace, keeping positions consistent.
    fn trim(&self) -> Span<'a> {
        let start = self.text.len() - self.text.trim_start().len();
        let end = self.text.trim_end().len().max(start);
        self.sub(start, end)
    }

    fn split(&self, sep: &str) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (pos, _) in self.text.match_indices(sep) {
            out.push(self.sub(start, pos));
            start = pos + sep.len();
        }
        out.push(self.sub(start, self.text.len()));
        out
    }
}

struct RawReaction<'a> {
    label: Option<String>,
    sides: [Vec<(u32, Span<'a>)>; 2],
    at: Span<'a>,
}

fn parse_side<'a>(side: Span<'a>) -> Result<Vec<(u32, Span<'a>)>, ParseError> {
    let side = side.trim();
    if side.text.is_empty() {
        return Err(side.error(
            0,
            ParseErrorKind::Syntax("empty reaction side (write `0` for the empty complex)".into()),
        ));
    }
    if side.text == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    for term in side.split("+") {
        let term = term.trim();
        if term.text.is_empty() {
            return Err(term.error(0, ParseErrorKind::Syntax("missing term around `+`".into())));
        }
        let tokens: Vec<(usize, &str)> = term
            .text
            .split_whitespace()
            .map(|t| (t.as_ptr() as usize - term.text.as_ptr() as usize, t))
            .collect();
        let (coef, (name_at, name)) = match tokens.as_slice() {
            [(at, name)] => (1, (*at, *name)),
            [(cat, coef), (at, name)] => {
                if !coef.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(term.error(*cat, ParseErrorKind::BadCoefficient(coef.to_string())));
                }
                let value: u32 = coef
                    .parse()
                    .map_err(|_| term.error(*cat, ParseErrorKind::BadCoefficient(coef.to_string())))?;
                if value == 0 {
                    return Err(term.error(*cat, ParseErrorKind::BadCoefficient(coef.to_string())));
                }
                (value, (*at, *name))
            }
            _ => {
                return Err(term.error(
                    0,
                    ParseErrorKind::Syntax(format!("expected `[coefficient] species`, found `{}`", term.text)),
                ))
            }
        };
        if !is_identifier(name) {
            let kind = if tokens.len() == 1 && name.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
                ParseErrorKind::Syntax(format!(
                    "invalid term `{name}` (separate coefficient and species with whitespace)"
                ))
            } else {
                ParseErrorKind::Syntax(format!("invalid species name `{name}`"))
            };
            return Err(term.error(name_at, kind));
        }
        terms.push((coef, term.sub(name_at, name_at + name.len())));
    }
    Ok(terms)
}

fn parse_reaction<'a>(span: Span<'a>) -> Result<RawReaction<'a>, ParseError> {
    let mut body = span;
    let mut label = None;
    if let Some(colon) = span.text.find(':') {
        let head = span.sub(0, colon).trim();
        if !is_identifier(head.text) {
            return Err(head.error(
                0,
                ParseErrorKind::Syntax(format!("invalid reaction label `{}`", head.text)),
            ));
        }
        label = Some(head.text.to_string());
        body = span.sub(colon + 1, span.text.len());
    }
    let parts = body.split("->");
    if parts.len() != 2 {
        return Err(body.error(
            0,
            ParseErrorKind::Syntax(format!("expected exactly one `->`, found {}", parts.len() - 1)),
        ));
    }
    Ok(RawReaction {
        label,
        sides: [parse_side(parts[0])?, parse_side(parts[1])?],
        at: span,
    })
}

fn side_key<'a>(terms: &[(u32, Span<'a>)]) -> Vec<(&'a str, u32)> {
    let mut key: Vec<(&str, u32)> = terms.iter().map(|(c, n)| (n.text, *c)).collect();
    key.sort();
    key
}

/// Parses a network document. Species are numbered by first appearance.
pub fn parse_network(text: &str) -> Result<BiNetwork, ParseError> {
    let mut raw = Vec::new();
    let mut last_line = (1, "");
    for (lineno, line) in text.lines().enumerate() {
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let whole = Span {
            text: content,
            line: lineno + 1,
            offset: 0,
            line_text: line,
        };
        last_line = (lineno + 1, line);
        for piece in whole.split(";") {
            if piece.text.trim().is_empty() {
                continue;
            }
            raw.push(parse_reaction(piece.trim())?);
        }
    }
    for r in &raw {
        if side_key(&r.sides[0]) == side_key(&r.sides[1]) {
            return Err(r.at.error(0, ParseErrorKind::TrivialReaction));
        }
    }
    if raw.len() != 2 {
        let (line, column) = match raw.get(2) {
            Some(r) => (r.at.line, r.at.column_at(0)),
            None => (last_line.0, last_line.1.chars().count() + 1),
        };
        return Err(ParseError {
            line,
            column,
            kind: ParseErrorKind::ReactionCount(raw.len()),
        });
    }

    let mut species: Vec<String> = Vec::new();
    let mut reactions = Vec::with_capacity(2);
    for r in &raw {
        let mut maps: [BTreeMap<usize, u32>; 2] = Default::default();
        for (side, terms) in r.sides.iter().enumerate() {
            for (coef, name) in terms {
                let idx = match species.iter().position(|s| s == name.text) {
                    Some(i) => i,
                    None => {
                        species.push(name.text.to_string());
                        species.len() - 1
                    }
                };
                if maps[side].insert(idx, *coef).is_some() {
                    return Err(name.error(0, ParseErrorKind::DuplicateSpecies(name.text.to_string())));
                }
            }
        }
        let [reactants, products] = maps;
        reactions.push(Reaction {
            reactants,
            products,
            label: r.label.clone(),
        });
    }
    let r2 = reactions.pop().expect("two reactions");
    let r1 = reactions.pop().expect("two reactions");
    // Every invariant was checked above; construction cannot fail.
    Ok(BiNetwork::new(species, r1, r2).expect("parsed network is valid"))
}

fn write_side(out: &mut String, net: &BiNetwork, side: &BTreeMap<usize, u32>) {
    if side.is_empty() {
        out.push('0');
        return;
    }
    for (k, (&i, &c)) in side.iter().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        if c != 1 {
            out.push_str(&c.to_string());
            out.push(' ');
        }
        out.push_str(&net.species[i]);
    }
}

/// Canonical two-line text form: single spaces, coefficient 1 elided,
/// terms in species order.
pub fn serialize_network(net: &BiNetwork) -> String {
    let mut out = String::new();
    for r in [&net.r1, &net.r2] {
        if let Some(label) = &r.label {
            out.push_str(label);
            out.push_str(": ");
        }
        write_side(&mut out, net, &r.reactants);
        out.push_str(" -> ");
        write_side(&mut out, net, &r.products);
        out.push('\n');
    }
    out
}
