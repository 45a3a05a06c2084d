//! Partitions of the state set, their relation matrices and projection
//! matrices, the lumpability condition and the maximal lumpable refinement.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::algebra::{input_blocks, LogicalMatrix, SparseMatrix, StochasticMatrix, ZeroOneMatrix};
use crate::error::{Error, Result};

/// A partition of the states `1..=N` into nonempty disjoint blocks.
///
/// Blocks are sorted internally and ordered by their smallest element, so
/// equal partitions compare equal. Block labels are 1-based positions in that
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds a partition from 1-based blocks given in any order.
    pub fn new(n_states: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; n_states];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {} is empty", b + 1)));
            }
            for &x in block {
                if x == 0 || x > n_states {
                    return Err(Error::InvalidPartition(format!(
                        "state {x} outside 1..={n_states}"
                    )));
                }
                if labels[x - 1] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "state {x} appears in more than one block"
                    )));
                }
                labels[x - 1] = b;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "state {} is not covered",
                x + 1
            )));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Canonical partition from arbitrary 0-based per-state labels.
    pub(crate) fn from_labels(labels: &[usize]) -> Self {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (x, l) in labels.iter().enumerate() {
            let b = *relabel.entry(*l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(x);
            block_of.push(b);
        }
        Self { blocks, block_of }
    }

    pub fn identity(n_states: usize) -> Self {
        Self::from_labels(&(0..n_states).collect::<Vec<_>>())
    }

    pub fn single_block(n_states: usize) -> Self {
        Self::from_labels(&vec![0; n_states])
    }

    pub fn n_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// All blocks with 1-based states.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect()
    }

    /// Members of 1-based block `label`.
    pub fn block(&self, label: usize) -> Vec<usize> {
        self.blocks[label - 1].iter().map(|x| x + 1).collect()
    }

    /// 1-based label of the block containing 1-based state `x`.
    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x - 1] + 1
    }

    pub(crate) fn raw_blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub(crate) fn raw_labels(&self) -> &[usize] {
        &self.block_of
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n_states() == coarser.n_states()
            && self.blocks.iter().all(|b| {
                let l = coarser.block_of[b[0]];
                b.iter().all(|&x| coarser.block_of[x] == l)
            })
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (i, x) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// `A_R` with `(A_R)_ij = 1` iff states `i` and `j` share a block.
pub fn partition_to_relation_matrix(p: &Partition) -> ZeroOneMatrix {
    let n = p.n_states();
    let mut a = ZeroOneMatrix::zeros(n, n);
    for block in &p.blocks {
        for &i in block {
            for &j in block {
                a.set_raw(i, j, true);
            }
        }
    }
    a
}

/// Inverse of [`partition_to_relation_matrix`]; blocks are the groups of
/// identical rows. Fails unless `a` is reflexive, symmetric and transitive.
pub fn relation_matrix_to_partition(a: &ZeroOneMatrix) -> Result<Partition> {
    if !a.is_square() {
        return Err(Error::NotEquivalence(format!(
            "{}x{} matrix is not square",
            a.rows(),
            a.cols()
        )));
    }
    if let Some(i) = (0..a.rows()).find(|&i| !a.get_raw(i, i)) {
        return Err(Error::NotEquivalence(format!("({0}, {0}) is missing", i + 1)));
    }
    for i in 0..a.rows() {
        if let Some(j) = a.row_ones(i).find(|&j| !a.get_raw(j, i)) {
            return Err(Error::NotEquivalence(format!(
                "({}, {}) is related but ({}, {}) is not",
                i + 1,
                j + 1,
                j + 1,
                i + 1
            )));
        }
    }
    if let Some((i, j, k)) = a.transitivity_violation() {
        return Err(Error::NotEquivalence(format!(
            "({i}, {j}) and ({j}, {k}) are related but ({i}, {k}) is not"
        )));
    }
    Ok(rows_to_partition(a))
}

/// Groups identical rows. Only meaningful for equivalence matrices.
fn rows_to_partition(a: &ZeroOneMatrix) -> Partition {
    let mut seen: HashMap<&[u64], usize> = HashMap::new();
    let labels: Vec<usize> = (0..a.rows())
        .map(|i| {
            let next = seen.len();
            *seen.entry(a.row_words(i)).or_insert(next)
        })
        .collect();
    Partition::from_labels(&labels)
}

/// The projection `C ∈ L^{Ñ×N}` of a partition together with a section
/// `C̃ ∈ L^{N×Ñ}` satisfying `C·C̃ = I` and `C̃ ≤ C^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    partition: Partition,
    projection: LogicalMatrix,
    section: LogicalMatrix,
}

impl ProjectionPair {
    /// Uses the given 1-based representative for each block, in block order.
    pub fn with_section(partition: &Partition, representatives: &[usize]) -> Result<Self> {
        if representatives.len() != partition.block_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} representatives for {} blocks",
                representatives.len(),
                partition.block_count()
            )));
        }
        for (b, &r) in representatives.iter().enumerate() {
            if r == 0 || r > partition.n_states() || partition.block_of[r - 1] != b {
                return Err(Error::InvalidPartition(format!(
                    "state {r} is not a member of block {}",
                    b + 1
                )));
            }
        }
        Ok(Self {
            partition: partition.clone(),
            projection: LogicalMatrix::from_raw_targets(
                partition.block_count(),
                partition.block_of.clone(),
            ),
            section: LogicalMatrix::from_raw_targets(
                partition.n_states(),
                representatives.iter().map(|r| r - 1).collect(),
            ),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// `C`: column `x` is `δ_Ñ^b` when state `x` lies in block `b`.
    pub fn projection(&self) -> &LogicalMatrix {
        &self.projection
    }

    /// `C̃`: column `b` is the representative of block `b`.
    pub fn section(&self) -> &LogicalMatrix {
        &self.section
    }

    pub fn quotient_size(&self) -> usize {
        self.partition.block_count()
    }

    pub fn parent_size(&self) -> usize {
        self.partition.n_states()
    }

    /// 1-based quotient state of 1-based parent state `x`.
    pub fn project_state(&self, x: usize) -> Result<usize> {
        if x == 0 || x > self.parent_size() {
            return Err(Error::IndexOutOfRange {
                index: x,
                dim: self.parent_size(),
            });
        }
        Ok(self.partition.block_of(x))
    }

    /// Parent states mapped to 1-based quotient state `q`.
    pub fn lift_state(&self, q: usize) -> Result<Vec<usize>> {
        if q == 0 || q > self.quotient_size() {
            return Err(Error::IndexOutOfRange {
                index: q,
                dim: self.quotient_size(),
            });
        }
        Ok(self.partition.block(q))
    }
}

/// `C` from the block labels and `C̃` from the smallest member of each block.
pub fn projection_pair(p: &Partition) -> ProjectionPair {
    let reps: Vec<usize> = p.blocks.iter().map(|b| b[0] + 1).collect();
    ProjectionPair::with_section(p, &reps).expect("smallest members are valid representatives")
}

/// A witness that two states of one block reach some block with different
/// probabilities under some input.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// 1-based input index.
    pub input: usize,
    /// Target block, 1-based states.
    pub target_block: Vec<usize>,
    pub state_a: usize,
    pub state_b: usize,
    pub probability_a: f64,
    pub probability_b: f64,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "under input {} states {} and {} move into block {:?} with probabilities {} and {}",
            self.input,
            self.state_a,
            self.state_b,
            self.target_block,
            self.probability_a,
            self.probability_b
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lumpability {
    Holds,
    Violated(Counterexample),
}

impl Lumpability {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds)
    }
}

/// First row where two sparse columns differ by more than `eps`, with the
/// two values.
pub(crate) fn first_difference(
    a: &[(usize, f64)],
    b: &[(usize, f64)],
    eps: f64,
) -> Option<(usize, f64, f64)> {
    let (mut i, mut k) = (0, 0);
    loop {
        let (row, va, vb) = match (a.get(i), b.get(k)) {
            (None, None) => return None,
            (Some(x), Some(y)) if x.0 == y.0 => {
                i += 1;
                k += 1;
                (x.0, x.1, y.1)
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                i += 1;
                (x.0, x.1, 0.0)
            }
            (Some(x), None) => {
                i += 1;
                (x.0, x.1, 0.0)
            }
            (_, Some(y)) => {
                k += 1;
                (y.0, 0.0, y.1)
            }
        };
        if (va - vb).abs() > eps {
            return Some((row, va, vb));
        }
    }
}

fn check_dims(p: &StochasticMatrix, n_states: usize) -> Result<()> {
    if p.rows() != n_states {
        return Err(Error::DimensionMismatch(format!(
            "partition of {n_states} states for a matrix with {} rows",
            p.rows()
        )));
    }
    p.input_count().map(|_| ())
}

/// Checks that for every input, states of a common block have equal
/// probabilities (within `eps`) of moving into every block, by comparing the
/// columns of `C·P(u)` inside each block against the block's first member.
pub fn check_lumpability(p: &StochasticMatrix, partition: &Partition, eps: f64) -> Result<Lumpability> {
    check_dims(p, partition.n_states())?;
    let c = projection_pair(partition).projection().to_sparse();
    for (u, pu) in input_blocks(p)?.iter().enumerate() {
        let cp = c.mul(pu.as_sparse())?;
        for block in &partition.blocks {
            let rep = block[0];
            for &a in &block[1..] {
                if let Some((b, pa, pb)) = first_difference(cp.raw_column(rep), cp.raw_column(a), eps) {
                    return Ok(Lumpability::Violated(Counterexample {
                        input: u + 1,
                        target_block: partition.block(b + 1),
                        state_a: rep + 1,
                        state_b: a + 1,
                        probability_a: pa,
                        probability_b: pb,
                    }));
                }
            }
        }
    }
    Ok(Lumpability::Holds)
}

/// Result of the relation-matrix refinement iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    /// The coarsest lumpable partition refining the seed.
    pub partition: Partition,
    /// Partitions of `A_1, A_2, …, A_{k*}`; the last one equals `partition`.
    pub history: Vec<Partition>,
}

impl Refinement {
    /// The first `k*` with `A_{k*+1} = A_{k*}`.
    pub fn fixpoint_index(&self) -> usize {
        self.history.len()
    }
}

/// Iterates `A_{k+1} = A_k ∧ B_{k,1} ∧ … ∧ B_{k,M}` from the seed's relation
/// matrix until it stops changing.
///
/// `(B_{k,l})_{ij} = 1` iff columns `i` and `j` of `A_k·P(δ_M^l)` agree within
/// `eps`. Rows of `A_k` repeat within each class, so columns are compared in
/// the row-collapsed form `C_k·P(δ_M^l)`. `B_{k,l}` is only evaluated where
/// `A_k` is 1; elsewhere the meet is 0 regardless. Inside a class, states are
/// grouped with the first earlier state whose column agrees, which keeps every
/// `A_k` an equivalence even when agreement within `eps` is not transitive.
pub fn max_lumpable_refinement(p: &StochasticMatrix, seed: &Partition, eps: f64) -> Result<Refinement> {
    check_dims(p, seed.n_states())?;
    let blocks = input_blocks(p)?;
    let n = seed.n_states();
    let mut a = partition_to_relation_matrix(seed);
    let mut current = seed.clone();
    let mut history = vec![current.clone()];
    loop {
        let c = projection_pair(&current).projection().to_sparse();
        let agreements: Vec<ZeroOneMatrix> = blocks
            .par_iter()
            .map(|pu| -> Result<ZeroOneMatrix> {
                let cp = c.mul(pu.as_sparse())?;
                Ok(agreement_matrix(&cp, &current, n, eps))
            })
            .collect::<Result<_>>()?;
        let mut next = a.clone();
        for b in &agreements {
            next = next.meet(b)?;
        }
        if next == a {
            return Ok(Refinement {
                partition: current,
                history,
            });
        }
        a = next;
        current = rows_to_partition(&a);
        history.push(current.clone());
    }
}

fn agreement_matrix(cp: &SparseMatrix, classes: &Partition, n: usize, eps: f64) -> ZeroOneMatrix {
    let mut b = ZeroOneMatrix::zeros(n, n);
    for class in classes.raw_blocks() {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &x in class {
            match groups
                .iter_mut()
                .find(|g| first_difference(cp.raw_column(g[0]), cp.raw_column(x), eps).is_none())
            {
                Some(g) => g.push(x),
                None => groups.push(vec![x]),
            }
        }
        for g in &groups {
            for &i in g {
                for &j in g {
                    b.set_raw(i, j, true);
                }
            }
        }
    }
    b
}

/// States share a block iff their terminal costs and all stage costs agree
/// within `eps`. `stage[u-1][x-1]` is `l(δ_M^u, δ_N^x)`.
pub fn relation_from_costs(stage: &[Vec<f64>], terminal: &[f64], eps: f64) -> Result<Partition> {
    let n = terminal.len();
    if stage.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "stage cost rows must have {n} entries"
        )));
    }
    let same = |x: usize, y: usize| {
        (terminal[x] - terminal[y]).abs() <= eps
            && stage.iter().all(|row| (row[x] - row[y]).abs() <= eps)
    };
    let mut reps: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for x in 0..n {
        match reps.iter().position(|&r| same(r, x)) {
            Some(b) => labels.push(b),
            None => {
                labels.push(reps.len());
                reps.push(x);
            }
        }
    }
    Ok(Partition::from_labels(&labels))
}

/// `{M, Δ_N − M}` for a nonempty target `M` of 1-based states.
pub fn partition_from_target(target: &[usize], n_states: usize) -> Result<Partition> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let mut labels = vec![1usize; n_states];
    for &x in target {
        if x == 0 || x > n_states {
            return Err(Error::IndexOutOfRange {
                index: x,
                dim: n_states,
            });
        }
        labels[x - 1] = 0;
    }
    Ok(Partition::from_labels(&labels))
}
