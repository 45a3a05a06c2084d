#![allow(dead_code)]

use pbnq::control::CostSpec;
use pbnq::oracle::{random_lumpable_pbn, random_partition, random_pbn, rng_for};
use pbnq::{Partition, Pbn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const EPS: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_for(seed, 0)
}

/// A lumpable instance with `n ≤ max_n` states, `m ≤ 2` inputs, `s ≤ 3`
/// constituents.
pub fn lumpable_instance(rng: &mut ChaCha8Rng, max_n: usize) -> (Pbn, Partition) {
    let n = rng.gen_range(2..=max_n);
    let k = rng.gen_range(1..=n);
    let m = rng.gen_range(1..=2);
    let s = rng.gen_range(1..=3);
    let part = random_partition(rng, n, k);
    let pbn = random_lumpable_pbn(rng, &part, m, s).unwrap();
    (pbn, part)
}

pub fn arbitrary_instance(rng: &mut ChaCha8Rng, max_n: usize, m: usize) -> Pbn {
    let n = rng.gen_range(2..=max_n);
    let s = rng.gen_range(1..=3);
    random_pbn(rng, n, m, s).unwrap()
}

pub fn random_target(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=n.div_ceil(2));
    let mut all: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        all.swap(i, rng.gen_range(0..=i));
    }
    let mut t = all[..size].to_vec();
    t.sort_unstable();
    t
}

/// Costs drawn from a few integer levels, constant on the blocks of `part`.
pub fn block_costs(rng: &mut ChaCha8Rng, part: &Partition, m: usize, horizon: usize) -> CostSpec {
    let k = part.block_count();
    let n = part.n_states();
    let stage_b: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..k).map(|_| rng.gen_range(0..3) as f64).collect())
        .collect();
    let term_b: Vec<f64> = (0..k).map(|_| rng.gen_range(0..3) as f64).collect();
    let stage = stage_b
        .iter()
        .map(|row| (1..=n).map(|x| row[part.block_of(x) - 1]).collect())
        .collect();
    let terminal = (1..=n).map(|x| term_b[part.block_of(x) - 1]).collect();
    let x0 = rng.gen_range(1..=n);
    CostSpec::new(stage, terminal, horizon, x0).unwrap()
}
