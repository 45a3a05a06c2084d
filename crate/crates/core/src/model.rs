//! Probabilistic Boolean networks: Boolean update functions, their algebraic
//! form, the transition probability matrix, and convex decomposition of a
//! column-stochastic matrix back into logical constituents.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::algebra::{select_input_block, CanonicalIndex, LogicalMatrix, SparseMatrix, StochasticMatrix};
use crate::error::{Error, Result};

/// Largest number of state plus input variables accepted when tabulating a
/// network (`2^(n+m)` columns).
pub const MAX_VARIABLES: usize = 20;

/// Boolean expression over a vocabulary of variables, referenced by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn negate(e: BoolExpr) -> Self {
        Self::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        Self::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        Self::Or(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, values: &[bool]) -> bool {
        match self {
            Self::Const(b) => *b,
            Self::Var(i) => values[*i],
            Self::Not(e) => !e.eval(values),
            Self::And(a, b) => a.eval(values) && b.eval(values),
            Self::Or(a, b) => a.eval(values) || b.eval(values),
        }
    }

    /// Replaces variables for which `bind` returns a value with constants and
    /// renumbers the others through `remap`.
    pub fn substitute<B, R>(&self, bind: &B, remap: &R) -> Self
    where
        B: Fn(usize) -> Option<bool>,
        R: Fn(usize) -> usize,
    {
        match self {
            Self::Const(b) => Self::Const(*b),
            Self::Var(i) => match bind(*i) {
                Some(b) => Self::Const(b),
                None => Self::Var(remap(*i)),
            },
            Self::Not(e) => Self::negate(e.substitute(bind, remap)),
            Self::And(a, b) => Self::and(a.substitute(bind, remap), b.substitute(bind, remap)),
            Self::Or(a, b) => Self::or(a.substitute(bind, remap), b.substitute(bind, remap)),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Self::Const(_) => None,
            Self::Var(i) => Some(*i),
            Self::Not(e) => e.max_var(),
            Self::And(a, b) | Self::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, names }
    }
}

struct ExprDisplay<'a> {
    expr: &'a BoolExpr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(e: &BoolExpr, names: &[String], prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                BoolExpr::Const(b) => write!(f, "{}", u8::from(*b)),
                BoolExpr::Var(i) => write!(f, "{}", names[*i]),
                BoolExpr::Not(x) => {
                    write!(f, "!")?;
                    go(x, names, 3, f)
                }
                BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                    let (p, op) = if matches!(e, BoolExpr::And(..)) {
                        (2, " & ")
                    } else {
                        (1, " | ")
                    };
                    if prec > p {
                        write!(f, "(")?;
                    }
                    go(a, names, p, f)?;
                    write!(f, "{op}")?;
                    go(b, names, p + 1, f)?;
                    if prec > p {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self.expr, self.names, 0, f)
    }
}

/// Parses `text` with `!`/`~` (not), `&` (and), `|` (or), constants `0`/`1`
/// and parentheses. Precedence is NOT > AND > OR; binary operators associate
/// to the left. Identifiers resolve to their index in `vocabulary`.
pub fn parse_bool_expr<S: AsRef<str>>(text: &str, vocabulary: &[S]) -> Result<BoolExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vocabulary,
    };
    let e = p.or_expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a, S> {
    src: &'a [u8],
    pos: usize,
    vocabulary: &'a [S],
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn error(&self, message: String) -> Error {
        Error::Syntax {
            position: self.pos + 1,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn or_expr(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.and_expr()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            lhs = BoolExpr::or(lhs, self.and_expr()?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.not_expr()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            lhs = BoolExpr::and(lhs, self.not_expr()?);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<BoolExpr> {
        match self.peek() {
            Some(b'!') | Some(b'~') => {
                self.pos += 1;
                Ok(BoolExpr::negate(self.not_expr()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<BoolExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression".into())),
            Some(b'(') => {
                self.pos += 1;
                let e = self.or_expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                self.vocabulary
                    .iter()
                    .position(|v| v.as_ref() == name)
                    .map(BoolExpr::Var)
                    .ok_or_else(|| Error::UndeclaredIdentifier(name.to_string()))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"0" => Ok(BoolExpr::Const(false)),
                    b"1" => Ok(BoolExpr::Const(true)),
                    _ => {
                        self.pos = start;
                        Err(self.error("constants must be 0 or 1".into()))
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }
}

/// 1-based index of the state `x = x_1 ⋉ … ⋉ x_n` with `x_i = [X_i, ¬X_i]^T`:
/// `1 + Σ (1 − X_i) 2^(n−i)`. The first variable is the most significant.
pub fn state_to_index(bits: &[bool]) -> usize {
    1 + bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(!b))
}

/// Inverse of [`state_to_index`] for `n` variables.
pub fn index_to_state(index: usize, n: usize) -> Vec<bool> {
    assert!(index >= 1 && index <= 1usize << n, "index {index} out of range for n = {n}");
    let k = index - 1;
    (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 0).collect()
}

/// One constituent Boolean network and its selection probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Constituent {
    pub probability: f64,
    /// One update function per state variable, over `state_vars ++ input_vars`.
    pub functions: Vec<BoolExpr>,
}

/// Textual description of a constituent: one expression per state variable
/// plus constant bindings for any parameters the expressions mention.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstituentSpec {
    pub probability: f64,
    pub functions: Vec<String>,
    pub bindings: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDef {
    state_vars: Vec<String>,
    input_vars: Vec<String>,
    constituents: Vec<Constituent>,
}

impl NetworkDef {
    pub fn new(
        state_vars: Vec<String>,
        input_vars: Vec<String>,
        constituents: Vec<Constituent>,
        eps: f64,
    ) -> Result<Self> {
        let n = state_vars.len();
        let m = input_vars.len();
        if n == 0 {
            return Err(Error::InvalidNetwork("at least one state variable is required".into()));
        }
        if n + m > MAX_VARIABLES {
            return Err(Error::InvalidNetwork(format!(
                "{} variables exceed the limit of {MAX_VARIABLES}",
                n + m
            )));
        }
        let mut seen = HashSet::new();
        for name in state_vars.iter().chain(&input_vars) {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidNetwork(format!("variable `{name}` declared twice")));
            }
        }
        if constituents.is_empty() {
            return Err(Error::InvalidNetwork("no constituent networks".into()));
        }
        check_probabilities(constituents.iter().map(|c| c.probability), eps)?;
        for (k, c) in constituents.iter().enumerate() {
            if c.functions.len() != n {
                return Err(Error::InvalidNetwork(format!(
                    "constituent {} defines {} functions for {n} state variables",
                    k + 1,
                    c.functions.len()
                )));
            }
            if c.functions.iter().any(|f| f.max_var().is_some_and(|v| v >= n + m)) {
                return Err(Error::InvalidNetwork(format!(
                    "constituent {} references an unknown variable",
                    k + 1
                )));
            }
        }
        Ok(Self {
            state_vars,
            input_vars,
            constituents,
        })
    }

    /// Parses every constituent's expressions over
    /// `state_vars ++ input_vars ++ parameters` and substitutes the
    /// constituent's parameter bindings.
    pub fn parse(
        state_vars: Vec<String>,
        input_vars: Vec<String>,
        parameters: &[String],
        specs: &[ConstituentSpec],
        eps: f64,
    ) -> Result<Self> {
        let base = state_vars.len() + input_vars.len();
        let vocab: Vec<&str> = state_vars
            .iter()
            .chain(&input_vars)
            .chain(parameters)
            .map(String::as_str)
            .collect();
        let mut constituents = Vec::with_capacity(specs.len());
        for (k, spec) in specs.iter().enumerate() {
            if let Some(name) = spec.bindings.keys().find(|b| !parameters.contains(b)) {
                return Err(Error::UndeclaredIdentifier(name.clone()));
            }
            let values: Vec<Option<bool>> =
                parameters.iter().map(|p| spec.bindings.get(p).copied()).collect();
            let mut functions = Vec::with_capacity(spec.functions.len());
            for text in &spec.functions {
                let e = parse_bool_expr(text, &vocab)?;
                if let Some(v) = unbound_parameter(&e, base, &values) {
                    return Err(Error::InvalidNetwork(format!(
                        "parameter `{}` is not bound in constituent {}",
                        parameters[v - base],
                        k + 1
                    )));
                }
                functions.push(e.substitute(
                    &|i| if i >= base { values[i - base] } else { None },
                    &|i| i,
                ));
            }
            constituents.push(Constituent {
                probability: spec.probability,
                functions,
            });
        }
        Self::new(state_vars, input_vars, constituents, eps)
    }

    pub fn state_vars(&self) -> &[String] {
        &self.state_vars
    }

    pub fn input_vars(&self) -> &[String] {
        &self.input_vars
    }

    pub fn constituents(&self) -> &[Constituent] {
        &self.constituents
    }

    pub fn n_states(&self) -> usize {
        1 << self.state_vars.len()
    }

    pub fn n_inputs(&self) -> usize {
        1 << self.input_vars.len()
    }

    /// Evaluates constituent `k` (0-based) on the given state and input bits.
    pub fn step(&self, k: usize, state: &[bool], input: &[bool]) -> Vec<bool> {
        let values: Vec<bool> = state.iter().chain(input).copied().collect();
        self.constituents[k]
            .functions
            .iter()
            .map(|f| f.eval(&values))
            .collect()
    }
}

fn unbound_parameter(e: &BoolExpr, base: usize, values: &[Option<bool>]) -> Option<usize> {
    match e {
        BoolExpr::Const(_) => None,
        BoolExpr::Var(i) => (*i >= base && values[*i - base].is_none()).then_some(*i),
        BoolExpr::Not(x) => unbound_parameter(x, base, values),
        BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
            unbound_parameter(a, base, values).or_else(|| unbound_parameter(b, base, values))
        }
    }
}

fn check_probabilities(ps: impl Iterator<Item = f64>, eps: f64) -> Result<()> {
    let mut total = 0.0;
    for (k, p) in ps.enumerate() {
        if !(p > 0.0 && p <= 1.0 + eps) {
            return Err(Error::InvalidProbabilities(format!(
                "probability {p} of constituent {} is not in (0, 1]",
                k + 1
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > eps {
        return Err(Error::InvalidProbabilities(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// The logical matrix `F ∈ L^{N×NM}` of constituent `k` (0-based): column
/// `(u−1)N + x` carries the successor of state `x` under input `u`.
pub fn bn_to_logical(def: &NetworkDef, k: usize) -> LogicalMatrix {
    let n_vars = def.state_vars.len();
    let m_vars = def.input_vars.len();
    let n = def.n_states();
    let m = def.n_inputs();
    let mut targets = Vec::with_capacity(n * m);
    for u in 1..=m {
        let input = index_to_state(u, m_vars);
        for x in 1..=n {
            let next = def.step(k, &index_to_state(x, n_vars), &input);
            targets.push(state_to_index(&next) - 1);
        }
    }
    LogicalMatrix::from_raw_targets(n, targets)
}

/// `P = Σ p_i F_i`.
pub fn transition_matrix(constituents: &[(f64, LogicalMatrix)], eps: f64) -> Result<StochasticMatrix> {
    let (rows, cols) = match constituents.first() {
        Some((_, f)) => (f.rows(), f.cols()),
        None => return Err(Error::InvalidProbabilities("no constituents".into())),
    };
    if constituents.iter().any(|(_, f)| f.rows() != rows || f.cols() != cols) {
        return Err(Error::DimensionMismatch("constituents differ in size".into()));
    }
    check_probabilities(constituents.iter().map(|c| c.0), eps)?;
    let m = SparseMatrix::from_entries(
        rows,
        cols,
        constituents.iter().flat_map(|(p, f)| {
            f.raw_targets()
                .iter()
                .enumerate()
                .map(move |(j, &t)| (t + 1, j + 1, *p))
        }),
    )?;
    StochasticMatrix::new(m, eps)
}

/// Residual entries at or below this magnitude are treated as exhausted.
const DECOMPOSE_CLEANUP: f64 = 1e-13;

/// Writes a column-stochastic matrix as a convex combination of logical
/// matrices by greedy extraction: each round picks the largest remaining entry
/// of every column (smallest row on ties) and removes the smallest of those
/// picks from all of them.
pub fn decompose(p: &StochasticMatrix, eps: f64) -> Result<Vec<(f64, LogicalMatrix)>> {
    let defect = p.stochasticity_defect();
    if defect > eps {
        return Err(Error::NotStochastic(format!("column sum off by {defect}")));
    }
    let rows = p.rows();
    let mut residual: Vec<Vec<(usize, f64)>> =
        (0..p.cols()).map(|j| p.raw_column(j).to_vec()).collect();
    let mut terms = Vec::new();
    let mut extracted = 0.0;
    while 1.0 - extracted > DECOMPOSE_CLEANUP && residual.iter().all(|c| !c.is_empty()) {
        let picks: Vec<usize> = residual
            .iter()
            .map(|c| {
                let mut best = 0;
                for (k, e) in c.iter().enumerate() {
                    if e.1 > c[best].1 {
                        best = k;
                    }
                }
                best
            })
            .collect();
        let lambda = residual
            .iter()
            .zip(&picks)
            .map(|(c, &k)| c[k].1)
            .fold(f64::INFINITY, f64::min);
        let targets = residual.iter().zip(&picks).map(|(c, &k)| c[k].0).collect();
        for (c, &k) in residual.iter_mut().zip(&picks) {
            c[k].1 -= lambda;
            if c[k].1 <= DECOMPOSE_CLEANUP {
                c.remove(k);
            }
        }
        extracted += lambda;
        terms.push((lambda, LogicalMatrix::from_raw_targets(rows, targets)));
    }
    if p.cols() == 0 {
        return Ok(vec![(1.0, LogicalMatrix::from_raw_targets(rows, Vec::new()))]);
    }
    for (l, _) in &mut terms {
        *l /= extracted;
    }
    Ok(terms)
}

/// A probabilistic Boolean network `x(t+1) = F_θ(t) ⋉ u(t) ⋉ x(t)` in algebraic
/// form, with its cached transition probability matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Pbn {
    n_states: usize,
    n_inputs: usize,
    constituents: Vec<(f64, LogicalMatrix)>,
    transition: StochasticMatrix,
}

impl Pbn {
    pub fn from_constituents(constituents: Vec<(f64, LogicalMatrix)>, eps: f64) -> Result<Self> {
        let transition = transition_matrix(&constituents, eps)?;
        let n_states = transition.rows();
        let n_inputs = transition.input_count()?;
        Ok(Self {
            n_states,
            n_inputs,
            constituents,
            transition,
        })
    }

    pub fn from_network(def: &NetworkDef, eps: f64) -> Result<Self> {
        let constituents = def
            .constituents()
            .iter()
            .enumerate()
            .map(|(k, c)| (c.probability, bn_to_logical(def, k)))
            .collect();
        Self::from_constituents(constituents, eps)
    }

    /// Interprets an arbitrary `N × NM` column-stochastic matrix as a PBN via
    /// [`decompose`]. The stored transition matrix is `p` itself.
    pub fn from_matrix(p: StochasticMatrix, eps: f64) -> Result<Self> {
        let n_inputs = p.input_count()?;
        let constituents = decompose(&p, eps)?;
        Ok(Self {
            n_states: p.rows(),
            n_inputs,
            constituents,
            transition: p,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn constituents(&self) -> &[(f64, LogicalMatrix)] {
        &self.constituents
    }

    pub fn transition(&self) -> &StochasticMatrix {
        &self.transition
    }

    /// `P(δ_M^u)` for 1-based `u`.
    pub fn input_block(&self, u: usize) -> Result<StochasticMatrix> {
        select_input_block(&self.transition, CanonicalIndex::new(u, self.n_inputs)?)
    }
}
