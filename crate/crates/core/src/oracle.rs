//! Seeded Monte-Carlo simulation, exhaustive reference solvers for small
//! instances, and random instance generators.
//!
//! Every random draw comes from ChaCha8 seeded with `seed_from_u64(seed)`;
//! run `r` of a batch uses stream `r`, so batches are reproducible and
//! independent of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{LogicalMatrix, StochasticMatrix};
use crate::control::{closed_loop_matrix, verify_stabilization, Policy, StateFeedback};
use crate::error::{Error, Result};
use crate::model::Pbn;
use crate::relations::{check_lumpability, Partition};

/// How inputs are chosen during a simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    Constant(usize),
    Feedback(StateFeedback),
    Policy(Policy),
}

impl Controller {
    fn input(&self, t: usize, x: usize) -> usize {
        match self {
            Self::Constant(u) => *u,
            Self::Feedback(fb) => fb.input(x),
            Self::Policy(p) => p.input(t, x),
        }
    }

    fn check(&self, pbn: &Pbn, steps: usize) -> Result<()> {
        let (n, m) = (pbn.n_states(), pbn.n_inputs());
        let ok = match self {
            Self::Constant(u) => (1..=m).contains(u),
            Self::Feedback(fb) => fb.n_states() == n && fb.n_inputs() == m,
            Self::Policy(p) => p.n_states() == n && p.n_inputs() == m && p.horizon() >= steps,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ControllerMismatch(format!(
                "controller does not fit {n} states, {m} inputs and {steps} steps"
            )))
        }
    }
}

/// One sampled run: `states` has one more entry than `inputs` and `thetas`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub seed: u64,
    pub run: u64,
    pub states: Vec<usize>,
    pub inputs: Vec<usize>,
    /// 1-based index of the constituent network used at each step.
    pub thetas: Vec<usize>,
}

pub fn rng_for(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn sample_constituent(pbn: &Pbn, rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let last = pbn.constituents().len() - 1;
    for (k, (p, _)) in pbn.constituents().iter().enumerate() {
        acc += p;
        if r < acc {
            return k;
        }
    }
    last
}

/// Samples `steps` transitions from `x0`.
pub fn simulate(pbn: &Pbn, controller: &Controller, x0: usize, steps: usize, seed: u64, run: u64) -> Result<Trajectory> {
    controller.check(pbn, steps)?;
    let n = pbn.n_states();
    if x0 == 0 || x0 > n {
        return Err(Error::IndexOutOfRange { index: x0, dim: n });
    }
    let mut rng = rng_for(seed, run);
    let mut tr = Trajectory {
        seed,
        run,
        states: vec![x0],
        inputs: Vec::with_capacity(steps),
        thetas: Vec::with_capacity(steps),
    };
    let mut x = x0;
    for t in 0..steps {
        let u = controller.input(t, x);
        let k = sample_constituent(pbn, &mut rng);
        x = pbn.constituents()[k].1.target((u - 1) * n + x);
        tr.inputs.push(u);
        tr.thetas.push(k + 1);
        tr.states.push(x);
    }
    Ok(tr)
}

/// Runs `0..runs` in parallel; the result is ordered by run index.
pub fn simulate_runs(
    pbn: &Pbn,
    controller: &Controller,
    x0: usize,
    steps: usize,
    runs: u64,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    (0..runs)
        .into_par_iter()
        .map(|r| simulate(pbn, controller, x0, steps, seed, r))
        .collect()
}

/// Frequencies of the one-step successor of `x0` under input `u`.
pub fn empirical_transition_estimate(pbn: &Pbn, u: usize, x0: usize, runs: u64, seed: u64) -> Result<Vec<f64>> {
    if runs == 0 {
        return Err(Error::InvalidProbabilities("at least one run is required".into()));
    }
    let trs = simulate_runs(pbn, &Controller::Constant(u), x0, 1, runs, seed)?;
    let mut freq = vec![0.0; pbn.n_states()];
    for tr in &trs {
        freq[tr.states[1] - 1] += 1.0;
    }
    freq.iter_mut().for_each(|f| *f /= runs as f64);
    Ok(freq)
}

/// `P_U^k δ_N^{x0}` by repeated sparse matrix-vector products.
pub fn distribution_propagation(p_u: &StochasticMatrix, x0: usize, k: usize) -> Result<Vec<f64>> {
    let n = p_u.rows();
    if p_u.cols() != n {
        return Err(Error::DimensionMismatch("closed loop must be square".into()));
    }
    if x0 == 0 || x0 > n {
        return Err(Error::IndexOutOfRange { index: x0, dim: n });
    }
    let mut mu = vec![0.0; n];
    mu[x0 - 1] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; n];
        for (a, &m) in mu.iter().enumerate() {
            if m != 0.0 {
                for &(b, v) in p_u.raw_column(a) {
                    next[b] += v * m;
                }
            }
        }
        mu = next;
    }
    Ok(mu)
}

pub const BRUTE_FORCE_MAX_STATES: usize = 10;
pub const BRUTE_FORCE_MAX_FEEDBACKS: u64 = 1 << 16;

/// All set partitions of `items`, as label vectors in restricted growth form.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(labels: &mut Vec<usize>, max: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == k {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max {
            labels.push(l);
            go(labels, max.max(l + 1), k, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), 0, k, &mut out);
    out
}

/// Enumerates every partition refining `seed` and returns a lumpable one
/// with the fewest blocks.
pub fn brute_force_coarsest_lumpable(p: &StochasticMatrix, seed: &Partition, eps: f64) -> Result<Partition> {
    let n = seed.n_states();
    if n > BRUTE_FORCE_MAX_STATES {
        return Err(Error::SearchSpaceTooLarge(format!(
            "{n} states exceed the enumeration limit of {BRUTE_FORCE_MAX_STATES}"
        )));
    }
    let blocks = seed.blocks();
    let choices: Vec<Vec<Vec<usize>>> = blocks.iter().map(|b| set_partitions(b.len())).collect();
    let mut best: Option<Partition> = None;
    let mut idx = vec![0usize; blocks.len()];
    loop {
        let mut labels = vec![0usize; n];
        let mut offset = 0;
        for (b, block) in blocks.iter().enumerate() {
            let lab = &choices[b][idx[b]];
            for (i, &x) in block.iter().enumerate() {
                labels[x - 1] = offset + lab[i];
            }
            offset += lab.iter().max().map_or(0, |m| m + 1);
        }
        let candidate = Partition::from_labels(&labels);
        if best.as_ref().is_none_or(|b| candidate.block_count() < b.block_count())
            && check_lumpability(p, &candidate, eps)?.holds()
        {
            best = Some(candidate);
        }
        // odometer over the per-block choices
        let mut b = 0;
        loop {
            if b == blocks.len() {
                return Ok(best.expect("the identity partition is always lumpable"));
            }
            idx[b] += 1;
            if idx[b] < choices[b].len() {
                break;
            }
            idx[b] = 0;
            b += 1;
        }
    }
}

/// Tries every static feedback.
pub fn brute_force_stabilizable(p: &StochasticMatrix, target: &[usize], eps: f64) -> Result<bool> {
    let n = p.rows();
    let m = p.input_count()?;
    let total = (m as f64).powi(n as i32);
    if total > BRUTE_FORCE_MAX_FEEDBACKS as f64 {
        return Err(Error::SearchSpaceTooLarge(format!(
            "{m}^{n} feedbacks exceed the enumeration limit of {BRUTE_FORCE_MAX_FEEDBACKS}"
        )));
    }
    for code in 0..total as u64 {
        let mut c = code;
        let inputs = (0..n)
            .map(|_| {
                let u = (c % m as u64) as usize + 1;
                c /= m as u64;
                u
            })
            .collect();
        let fb = StateFeedback::new(inputs, m)?;
        if verify_stabilization(&closed_loop_matrix(p, &fb)?, target, eps)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn random_probabilities(rng: &mut ChaCha8Rng, s: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..s).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// A PBN with `s` uniformly random constituent networks on `n` states and
/// `m` inputs.
pub fn random_pbn(rng: &mut ChaCha8Rng, n: usize, m: usize, s: usize) -> Result<Pbn> {
    let probs = random_probabilities(rng, s);
    let constituents = probs
        .into_iter()
        .map(|p| {
            let targets = (0..n * m).map(|_| rng.gen_range(1..=n)).collect();
            Ok((p, LogicalMatrix::new(n, targets)?))
        })
        .collect::<Result<_>>()?;
    Pbn::from_constituents(constituents, 1e-9)
}

/// A partition of `n` states into exactly `k` nonempty blocks.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Partition {
    assert!(1 <= k && k <= n);
    let mut labels: Vec<usize> = (0..n).map(|x| if x < k { x } else { rng.gen_range(0..k) }).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.gen_range(0..=i));
    }
    Partition::from_labels(&labels)
}

/// A PBN for which `partition` is lumpable: random quotient networks on the
/// blocks are lifted by sending each state to a random member of the target
/// block.
pub fn random_lumpable_pbn(rng: &mut ChaCha8Rng, partition: &Partition, m: usize, s: usize) -> Result<Pbn> {
    let n = partition.n_states();
    let k = partition.block_count();
    let probs = random_probabilities(rng, s);
    let constituents = probs
        .into_iter()
        .map(|p| {
            let quotient: Vec<usize> = (0..k * m).map(|_| rng.gen_range(0..k)).collect();
            let targets = (0..m)
                .flat_map(|u| (0..n).map(move |x| (u, x)))
                .map(|(u, x)| {
                    let block = &partition.raw_blocks()[quotient[u * k + partition.raw_labels()[x]]];
                    block[rng.gen_range(0..block.len())] + 1
                })
                .collect::<Vec<_>>();
            Ok((p, LogicalMatrix::new(n, targets)?))
        })
        .collect::<Result<_>>()?;
    Pbn::from_constituents(constituents, 1e-9)
}
