//! Quotient systems `P̃(u) = C·P(u)·C̃` and the maps between parent and
//! quotient states and costs.

use rayon::prelude::*;

use crate::algebra::{input_blocks, LogicalMatrix, StochasticMatrix};
use crate::control::CostSpec;
use crate::error::{Error, Result};
use crate::relations::{check_lumpability, Lumpability, Partition, ProjectionPair};

/// The quotient of a PBN transition matrix by a lumpable partition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSystem {
    pair: ProjectionPair,
    transition: StochasticMatrix,
    blocks: Vec<StochasticMatrix>,
}

impl QuotientSystem {
    pub fn pair(&self) -> &ProjectionPair {
        &self.pair
    }

    pub fn partition(&self) -> &Partition {
        self.pair.partition()
    }

    pub fn parent_size(&self) -> usize {
        self.pair.parent_size()
    }

    pub fn size(&self) -> usize {
        self.pair.quotient_size()
    }

    pub fn n_inputs(&self) -> usize {
        self.blocks.len()
    }

    /// `P̃ = [P̃(δ_M^1) … P̃(δ_M^M)]`.
    pub fn transition(&self) -> &StochasticMatrix {
        &self.transition
    }

    /// `P̃(δ_M^u)` for 1-based `u`.
    pub fn input_block(&self, u: usize) -> &StochasticMatrix {
        &self.blocks[u - 1]
    }

    pub fn input_blocks(&self) -> &[StochasticMatrix] {
        &self.blocks
    }
}

/// Builds `P̃(u) = C·P(u)·C̃` for every input after checking lumpability.
pub fn build_quotient(p: &StochasticMatrix, pair: &ProjectionPair, eps: f64) -> Result<QuotientSystem> {
    if let Lumpability::Violated(cx) = check_lumpability(p, pair.partition(), eps)? {
        return Err(Error::NotLumpable(Box::new(cx)));
    }
    let c = pair.projection().to_sparse();
    let c_tilde = pair.section().to_sparse();
    let blocks: Vec<StochasticMatrix> = input_blocks(p)?
        .par_iter()
        .map(|pu| {
            let m = c.mul(pu.as_sparse())?.mul(&c_tilde)?;
            StochasticMatrix::new(m, eps)
        })
        .collect::<Result<_>>()?;
    let transition = StochasticMatrix::hstack(&blocks)?;
    Ok(QuotientSystem {
        pair: pair.clone(),
        transition,
        blocks,
    })
}

/// Parent states belonging to quotient state `q`.
pub fn lift_state(pair: &ProjectionPair, q: usize) -> Result<Vec<usize>> {
    pair.lift_state(q)
}

/// Quotient state of parent state `x`, i.e. the index of `C·δ_N^x`.
pub fn project_state(pair: &ProjectionPair, x: usize) -> Result<usize> {
    pair.project_state(x)
}

/// Transfers stage and terminal costs to the quotient, checking that they are
/// constant on every block. The initial state is projected.
pub fn quotient_costs(costs: &CostSpec, pair: &ProjectionPair, eps: f64) -> Result<CostSpec> {
    if costs.n_states() != pair.parent_size() {
        return Err(Error::DimensionMismatch(format!(
            "costs over {} states for a partition of {}",
            costs.n_states(),
            pair.parent_size()
        )));
    }
    let partition = pair.partition();
    let reps: Vec<usize> = pair.section().targets();
    let check = |table: &[f64]| -> Result<Vec<f64>> {
        for (b, &r) in reps.iter().enumerate() {
            let first = table[r - 1];
            for x in partition.block(b + 1) {
                let second = table[x - 1];
                if (second - first).abs() > eps {
                    return Err(Error::CostInconsistent {
                        block: partition.block(b + 1),
                        first,
                        second,
                    });
                }
            }
        }
        Ok(reps.iter().map(|&r| table[r - 1]).collect())
    };
    let stage = costs
        .stage()
        .iter()
        .map(|row| check(row))
        .collect::<Result<Vec<_>>>()?;
    let terminal = check(costs.terminal())?;
    CostSpec::new(stage, terminal, costs.horizon(), pair.project_state(costs.x0())?)
}

/// The quotient of a deterministic transition matrix, returned as a logical
/// matrix. Lumpability is checked exactly.
pub fn deterministic_quotient_is_logical(f: &LogicalMatrix, pair: &ProjectionPair) -> Result<LogicalMatrix> {
    let q = build_quotient(&StochasticMatrix::from_logical(f), pair, 0.0)?;
    let out = LogicalMatrix::try_from_sparse(q.transition().as_sparse());
    assert!(out.is_ok(), "quotient of a lumpable logical matrix is not logical");
    out
}
